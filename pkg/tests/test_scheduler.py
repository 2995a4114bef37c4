import itertools

import numpy as np
import pytest
from oracles import brute_schedule_value

from ldmcast.scheduler import (brute_force_schedule, make_decision, random_schedule, schedule_objective,
                               solve_schedule)


def _theta(rng, k):
    A = rng.uniform(0, 1, size=(k, k))
    T = (A + A.T) / 2
    np.fill_diagonal(T, 0)
    return T


def test_matches_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(40):
        k = int(rng.integers(2, 9))
        theta = _theta(rng, k)
        for kp in range(1, k + 1):
            dec = solve_schedule(theta, kp)
            assert dec.objective == brute_schedule_value(theta, kp)
            assert len(dec.selected) == kp


def test_lexicographic_tie_break():
    theta = np.ones((5, 5)) - np.eye(5)
    assert solve_schedule(theta, 3).selected == (0, 1, 2)
    assert brute_force_schedule(theta, 3).selected == (0, 1, 2)


def test_decision_indicators():
    dec = make_decision((3, 1), 5)
    assert dec.selected == (1, 3)
    assert list(dec.mu) == [0, 1, 0, 1, 0]
    nu = np.zeros((5, 5), int)
    nu[1, 3] = 1
    assert np.array_equal(dec.nu, nu)
    assert dec.k == 5 and dec.k_prime == 2


def test_linking_constraints_hold_for_every_subset():
    for subset in itertools.combinations(range(5), 3):
        dec = make_decision(subset, 5)
        for j, l in itertools.combinations(range(5), 2):
            assert dec.nu[j, l] <= dec.mu[j] and dec.nu[j, l] <= dec.mu[l]
            assert dec.mu[j] + dec.mu[l] <= 1 + dec.nu[j, l]


def test_single_and_full_selection():
    theta = _theta(np.random.default_rng(1), 6)
    assert solve_schedule(theta, 1).objective == 0.0
    assert solve_schedule(theta, 6).selected == tuple(range(6))


def test_invalid_inputs():
    theta = _theta(np.random.default_rng(2), 4)
    with pytest.raises(ValueError):
        solve_schedule(theta, 0)
    with pytest.raises(ValueError):
        solve_schedule(theta, 5)
    with pytest.raises(ValueError):
        solve_schedule(np.zeros((3, 4)), 1)
    with pytest.raises(ValueError):
        make_decision((1, 1), 4)


def test_objective_independent_of_order():
    theta = _theta(np.random.default_rng(3), 7)
    assert schedule_objective(theta, (5, 1, 3)) == schedule_objective(theta, (1, 3, 5))


def test_random_schedule_reproducible():
    a = random_schedule(np.random.default_rng(9), 10, 4)
    b = random_schedule(np.random.default_rng(9), 10, 4)
    assert a.selected == b.selected and len(set(a.selected)) == 4
    assert np.isnan(a.objective)


def test_random_schedule_covers_all_devices():
    rng = np.random.default_rng(4)
    seen = set()
    for _ in range(200):
        seen.update(random_schedule(rng, 6, 2).selected)
    assert seen == set(range(6))
