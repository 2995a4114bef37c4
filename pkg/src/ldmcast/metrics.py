"""Pairwise discordance metrics used to decide which devices to co-schedule.

Smaller values mean two devices are a better pair.  CORR and PAWN measure
normalized channel correlation, ROOK adds the relative energy difference of
the pair, and KING adds each device's energy deficit relative to the
strongest device in the population.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

KINDS = ("CORR", "PAWN", "ROOK", "KING")


@dataclass(frozen=True)
class MetricKind:
    tag: str
    omega: float = 0.5

    def __post_init__(self):
        if self.tag not in KINDS:
            raise ValueError(f"unknown metric {self.tag!r}; expected one of {KINDS}")
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")


def _entries(H):
    return np.asarray(getattr(H, "entries", H), dtype=complex)


def energy(H):
    """Squared Frobenius norm."""
    H = _entries(H)
    return float(np.vdot(H, H).real)


def _corr(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("normalized correlation undefined for a zero-norm channel")
    return abs(np.vdot(a, b)) / (na * nb)


def corr(Hj, Hl):
    return _corr(_entries(Hj).ravel(), _entries(Hl).ravel())


def pawn(Hj, Hl):
    """Mean normalized correlation over all ``n_rx^2`` row pairs."""
    A, B = _entries(Hj), _entries(Hl)
    if A.shape != B.shape:
        raise ValueError("channels must share dimensions")
    na = np.linalg.norm(A, axis=1)
    nb = np.linalg.norm(B, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ValueError("normalized correlation undefined for a zero-norm channel row")
    M = np.abs(A.conj() @ B.T) / np.outer(na, nb)
    # fsum is order independent, so swapping the pair gives a bit-identical value
    return math.fsum(M.ravel()) / M.size


def pairwise_metric(kind, Hj, Hl, e_max=None):
    if kind.tag == "CORR":
        return corr(Hj, Hl)
    base = pawn(Hj, Hl)
    if kind.tag == "PAWN":
        return base
    ej, el = energy(Hj), energy(Hl)
    w = kind.omega
    if kind.tag == "ROOK":
        return w * abs(ej - el) / (ej + el) + (1 - w) * base
    if e_max is None or e_max <= 0:
        raise ValueError("KING needs the population maximum energy e_max > 0")
    return w * ((e_max - ej) / e_max + (e_max - el) / e_max) + (1 - w) * base


def discordance_matrix(channels, kind):
    """Symmetric ``K x K`` matrix of pairwise metrics with a zero diagonal."""
    if len(channels) < 2:
        raise ValueError("need at least two channels")
    shape = _entries(channels[0]).shape
    if any(_entries(ch).shape != shape for ch in channels):
        raise ValueError("channels must share dimensions")
    e_max = max(energy(ch) for ch in channels)
    K = len(channels)
    theta = np.zeros((K, K))
    for j in range(K):
        for l in range(j + 1, K):
            theta[j, l] = theta[l, j] = pairwise_metric(kind, channels[j], channels[l], e_max)
    return theta


def write_matrix_csv(path, theta):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.asarray(theta):
            writer.writerow([repr(float(v)) for v in row])


def read_matrix_csv(path):
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    theta = np.array(rows, dtype=float)
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ValueError("discordance matrix must be square")
    return theta
