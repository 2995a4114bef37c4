"""Constant-modulus, finite-resolution receive combiners.

Each device steers its single RF chain along the dominant left singular
direction of its channel and then rounds every element to the nearest
available phase shift.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PhaseCodebook:
    l_rx: int
    delta_rx: float

    def __post_init__(self):
        if self.l_rx < 1:
            raise ValueError("l_rx must be positive")
        if self.delta_rx <= 0:
            raise ValueError("delta_rx must be positive")

    @classmethod
    def from_power(cls, l_rx, p_rx_mw, n_rx):
        """Codebook whose combiners have total power ``p_rx_mw`` over ``n_rx`` elements."""
        return cls(l_rx, float(np.sqrt(p_rx_mw / n_rx)))

    @property
    def points(self):
        return self.delta_rx * np.exp(2j * np.pi * np.arange(self.l_rx) / self.l_rx)


@dataclass(frozen=True)
class Combiner:
    w: np.ndarray
    indices: np.ndarray


def principal_eigvec(H, tol=1e-10, max_iter=10_000):
    """Unit-norm dominant eigenvector of ``H H^H`` by power iteration.

    The global phase is fixed so that the largest-magnitude element is real
    and positive.
    """
    H = np.asarray(getattr(H, "entries", H), dtype=complex)
    R = H @ H.conj().T
    scale = np.linalg.norm(R)
    if scale == 0:
        raise ValueError("principal eigenvector undefined for a zero channel")
    x = R[:, np.argmax(np.linalg.norm(R, axis=0))]
    x = x / np.linalg.norm(x)
    for _ in range(max_iter):
        y = R @ x
        lam = np.vdot(x, y).real
        if np.linalg.norm(y - lam * x) <= tol * scale:
            break
        x = y / np.linalg.norm(y)
    i = np.argmax(np.abs(x))
    x = x * (abs(x[i]) / x[i])
    x[i] = abs(x[i])
    return x


def project_to_codebook(r, codebook):
    """Per element, the codebook entry maximizing ``Re{conj(phi) r_l}``.

    Scores within a relative 1e-12 of the best count as ties, resolved to the
    lowest index, so round-off in the phase table never decides a tie.
    """
    pts = codebook.points
    r = np.asarray(r)
    score = (pts.conj()[None, :] * r[:, None]).real
    tol = 1e-12 * codebook.delta_rx * np.abs(r)[:, None]
    idx = np.argmax(score >= score.max(axis=1, keepdims=True) - tol, axis=1)
    return pts[idx], idx


def design_combiner(H, codebook):
    r = principal_eigvec(H)
    w, idx = project_to_codebook(r, codebook)
    return Combiner(w, idx)
