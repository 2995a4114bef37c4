"""Selection of the dual-layer devices.

The exact scheduler picks ``k_prime`` of ``K`` devices minimizing the sum of
pairwise discordance over co-scheduled pairs.  It is a depth-first
branch-and-bound over device inclusion in index order with the include branch
first, so among equal-cost subsets the lexicographically smallest is found
first and kept.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScheduleDecision:
    selected: tuple
    mu: np.ndarray
    nu: np.ndarray
    objective: float

    @property
    def k(self):
        return self.mu.size

    @property
    def k_prime(self):
        return len(self.selected)


def schedule_objective(theta, selected):
    """Pair cost of a subset, summed exactly so the value is order independent."""
    return math.fsum(theta[j, l] for j, l in itertools.combinations(sorted(selected), 2))


def make_decision(selected, k, theta=None):
    selected = tuple(sorted(int(i) for i in selected))
    if len(set(selected)) != len(selected) or any(i < 0 or i >= k for i in selected):
        raise ValueError("selected indices must be distinct and within range")
    mu = np.zeros(k, dtype=int)
    mu[list(selected)] = 1
    nu = np.triu(np.outer(mu, mu), 1)
    objective = schedule_objective(theta, selected) if theta is not None else float("nan")
    return ScheduleDecision(selected, mu, nu, objective)


def _check_decision(dec, k_prime):
    # linking constraints of the 0-1 formulation: nu <= mu_j, mu_j + mu_l <= 1 + nu, sum mu = K'
    mu, nu = dec.mu, dec.nu
    iu = np.triu_indices(mu.size, 1)
    assert mu.sum() == k_prime
    assert np.all(nu[iu] <= mu[iu[0]]) and np.all(nu[iu] <= mu[iu[1]])
    assert np.all(mu[iu[0]] + mu[iu[1]] <= 1 + nu[iu])


def _validate(theta, k_prime):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ValueError("theta must be a square matrix")
    K = theta.shape[0]
    if not 1 <= k_prime <= K:
        raise ValueError(f"k_prime must lie in [1, {K}], got {k_prime}")
    return theta, K


def solve_schedule(theta, k_prime):
    """Globally optimal subset of size ``k_prime`` (lexicographic tie-break)."""
    theta, K = _validate(theta, k_prime)
    theta = (theta + theta.T) / 2 if not np.array_equal(theta, theta.T) else theta
    best = [math.inf, None]

    def bound(chosen, cost, start, slots):
        if slots == 0:
            return cost
        cand = np.arange(start, K)
        if cand.size < slots:
            return math.inf
        inc = theta[np.ix_(chosen, cand)].sum(axis=0) if chosen else np.zeros(cand.size)
        if slots > 1:
            sub = theta[np.ix_(cand, cand)].copy()
            np.fill_diagonal(sub, np.inf)
            inc = inc + 0.5 * np.sort(sub, axis=1)[:, :slots - 1].sum(axis=1)
        return cost + np.partition(inc, slots - 1)[:slots].sum()

    def visit(chosen, cost, start):
        slots = k_prime - len(chosen)
        if slots == 0:
            exact = schedule_objective(theta, chosen)
            if exact < best[0]:
                best[0], best[1] = exact, tuple(chosen)
            return
        if K - start < slots:
            return
        lb = bound(chosen, cost, start, slots)
        # keep near-ties alive so the exact leaf comparison decides them
        if lb > best[0] + 1e-12 * (1.0 + abs(best[0])):
            return
        add = theta[chosen, start].sum() if chosen else 0.0
        visit(chosen + [start], cost + add, start + 1)
        visit(chosen, cost, start + 1)

    visit([], 0.0, 0)
    dec = make_decision(best[1], K, theta)
    _check_decision(dec, k_prime)
    return dec


def brute_force_schedule(theta, k_prime):
    """Exhaustive enumeration; first minimum in lexicographic order wins."""
    theta, K = _validate(theta, k_prime)
    best, arg = math.inf, None
    for subset in itertools.combinations(range(K), k_prime):
        val = schedule_objective(theta, subset)
        if val < best:
            best, arg = val, subset
    return make_decision(arg, K, theta)


def random_schedule(rng, k, k_prime, theta=None):
    """Uniformly random subset; ``objective`` is NaN unless ``theta`` is given."""
    if not 1 <= k_prime <= k:
        raise ValueError(f"k_prime must lie in [1, {k}], got {k_prime}")
    chosen = rng.choice(k, size=k_prime, replace=False)
    return make_decision(chosen, k, None if theta is None else np.asarray(theta, dtype=float))
