import numpy as np
import pytest
from oracles import pawn_loop

from ldmcast.channel import ArrayGeometry, generate_channels
from ldmcast.metrics import (MetricKind, corr, discordance_matrix, energy, pairwise_metric, pawn,
                             read_matrix_csv, write_matrix_csv)


def _pair(seed, n_rx=2, n_tx=8):
    return [c.entries for c in generate_channels(seed, 0, 2, ArrayGeometry(n_tx, n_rx), 3)]


def test_corr_scale_invariant():
    A, _ = _pair(0)
    assert abs(corr(A, (2 - 3j) * A) - 1) < 1e-12


def test_pawn_equals_corr_single_antenna():
    for seed in range(20):
        A, B = _pair(seed, n_rx=1)
        assert abs(pawn(A, B) - corr(A, B)) <= 1e-12


def test_rook_vanishes_for_equal_energy_at_full_weight():
    A, B = _pair(1)
    B = B * np.sqrt(energy(A) / energy(B))
    assert abs(pairwise_metric(MetricKind("ROOK", 1.0), A, B)) < 1e-12


def test_king_weight_zero_is_pawn():
    A, B = _pair(2)
    e_max = max(energy(A), energy(B))
    assert pairwise_metric(MetricKind("KING", 0.0), A, B, e_max) == pawn(A, B)
    assert pairwise_metric(MetricKind("ROOK", 0.0), A, B) == pawn(A, B)


def test_king_zero_for_two_strongest_equal_devices():
    A, B = _pair(3)
    B = B * np.sqrt(energy(A) / energy(B))
    assert abs(pairwise_metric(MetricKind("KING", 1.0), A, B, energy(A))) < 1e-12


def test_pawn_is_mean_row_correlation():
    A, B = _pair(4, n_rx=3)
    assert abs(pawn(A, B) - pawn_loop(A, B)) < 1e-12


def test_symmetry_and_scaling_invariance():
    rng = np.random.default_rng(0)
    A, B = _pair(5, n_rx=3)
    e = max(energy(A), energy(B))
    for tag in ("CORR", "PAWN", "ROOK", "KING"):
        kind = MetricKind(tag, 0.3)
        assert pairwise_metric(kind, A, B, e) == pairwise_metric(kind, B, A, e)
    s = complex(*rng.normal(size=2))
    assert abs(corr(A, s * B) - corr(A, B)) < 1e-10
    assert abs(pawn(s * A, B) - pawn(A, B)) < 1e-10


def test_ranges():
    for seed in range(30):
        A, B = _pair(seed)
        e = max(energy(A), energy(B)) * 1.7
        assert 0 <= corr(A, B) <= 1 + 1e-12
        assert 0 <= pawn(A, B) <= 1 + 1e-12
        assert 0 <= pairwise_metric(MetricKind("ROOK", 0.5), A, B) <= 1 + 1e-12
        assert 0 <= pairwise_metric(MetricKind("KING", 0.5), A, B, e) <= 1.5 + 1e-12


def test_zero_row_rejected():
    A, B = _pair(6)
    A[0] = 0
    with pytest.raises(ValueError):
        pawn(A, B)
    with pytest.raises(ValueError):
        corr(np.zeros_like(B), B)


def test_king_requires_population_energy():
    A, B = _pair(7)
    with pytest.raises(ValueError):
        pairwise_metric(MetricKind("KING"), A, B)


def test_metric_kind_validation():
    with pytest.raises(ValueError):
        MetricKind("QUEEN")
    with pytest.raises(ValueError):
        MetricKind("ROOK", 1.5)


def test_two_device_matrix():
    chans = generate_channels(9, 0, 2, ArrayGeometry(8, 2), 3)
    theta = discordance_matrix(chans, MetricKind("PAWN"))
    assert theta[0, 1] == theta[1, 0] == pawn(chans[0].entries, chans[1].entries)
    assert theta[0, 0] == theta[1, 1] == 0


def test_identical_channels_fully_correlated():
    ch = generate_channels(1, 0, 1, ArrayGeometry(8, 1), 3)[0]
    theta = discordance_matrix([ch] * 4, MetricKind("CORR"))
    off = theta[~np.eye(4, dtype=bool)]
    np.testing.assert_allclose(off, 1.0, atol=1e-12)


def test_king_matrix_matches_recomputation():
    chans = generate_channels(2, 5, 6, ArrayGeometry(16, 2), 3)
    theta = discordance_matrix(chans, MetricKind("KING", 0.5))
    Hs = [c.entries for c in chans]
    energies = [float(np.sum(np.abs(H) ** 2)) for H in Hs]
    e_max = max(energies)
    for j in range(6):
        for l in range(6):
            if j == l:
                assert theta[j, l] == 0
                continue
            expect = 0.5 * ((e_max - energies[j]) / e_max + (e_max - energies[l]) / e_max) + 0.5 * pawn_loop(Hs[j], Hs[l])
            assert abs(theta[j, l] - expect) < 1e-12


def test_fewer_than_two_channels_rejected():
    ch = generate_channels(1, 0, 1, ArrayGeometry(8, 1), 3)
    with pytest.raises(ValueError):
        discordance_matrix(ch, MetricKind("CORR"))


def test_matrix_csv_round_trip(tmp_path):
    chans = generate_channels(3, 0, 5, ArrayGeometry(8, 1), 3)
    theta = discordance_matrix(chans, MetricKind("ROOK"))
    write_matrix_csv(tmp_path / "t.csv", theta)
    assert np.array_equal(read_matrix_csv(tmp_path / "t.csv"), theta)
