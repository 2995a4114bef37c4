"""Geometric mmWave channel model with uniform linear arrays.

Each device channel is a sum of ``L`` planar-wave paths,

    H = sqrt(n_rx * n_tx / L) * sum_l rho_l a_rx(psi_l) a_tx(phi_l)^H,

with complex gains ``rho_l ~ CN(0, 1)``.  Path parameters are drawn
independently of the array sizes, so one random stream yields matched
channels for every ``(n_tx, n_rx)`` in a sweep.
"""

import hashlib
import json
from dataclasses import dataclass

import numpy as np

AOA_RANGE = (-np.pi, np.pi)
AOD_RANGE = (-np.pi / 3, np.pi / 3)


@dataclass(frozen=True)
class ArrayGeometry:
    n_tx: int
    n_rx: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be positive")


@dataclass(frozen=True)
class PathParams:
    gain: complex
    aoa: float
    aod: float


@dataclass
class ChannelMatrix:
    """An ``n_rx x n_tx`` channel together with the paths that generated it."""

    entries: np.ndarray
    paths: tuple
    geometry: ArrayGeometry

    @property
    def n_rx(self):
        return self.entries.shape[0]

    @property
    def n_tx(self):
        return self.entries.shape[1]

    def reconstruct(self):
        return channel_from_paths(self.paths, self.geometry)


def array_response(angle, n, spacing_ratio=0.5):
    """Unit-norm ULA steering vector; element ``i`` is ``exp(-j i 2 pi (d/lambda) cos(angle)) / sqrt(n)``."""
    if n < 1:
        raise ValueError("array size must be at least 1")
    i = np.arange(n)
    return np.exp(-1j * i * 2 * np.pi * spacing_ratio * np.cos(angle)) / np.sqrt(n)


def channel_from_paths(paths, geom):
    if not paths:
        raise ValueError("a channel needs at least one path")
    scale = np.sqrt(geom.n_rx * geom.n_tx / len(paths))
    H = np.zeros((geom.n_rx, geom.n_tx), dtype=complex)
    for p in paths:
        a_rx = array_response(p.aoa, geom.n_rx, geom.spacing_ratio)
        a_tx = array_response(p.aod, geom.n_tx, geom.spacing_ratio)
        H += p.gain * np.outer(a_rx, a_tx.conj())
    return scale * H


def draw_paths(rng, path_count, aoa_range=AOA_RANGE, aod_range=AOD_RANGE):
    """Draw ``path_count`` paths: CN(0,1) gains, uniform AoA/AoD on the given intervals."""
    if path_count < 1:
        raise ValueError("path_count must be at least 1")
    parts = rng.normal(scale=np.sqrt(0.5), size=(path_count, 2))
    aoa = rng.uniform(aoa_range[0], aoa_range[1], size=path_count)
    aod = rng.uniform(aod_range[0], aod_range[1], size=path_count)
    return tuple(PathParams(complex(re, im), float(a), float(d))
                 for (re, im), a, d in zip(parts, aoa, aod))


def generate_channel(rng, geom, path_count, aoa_range=AOA_RANGE, aod_range=AOD_RANGE):
    paths = draw_paths(rng, path_count, aoa_range, aod_range)
    return ChannelMatrix(channel_from_paths(paths, geom), paths, geom)


def device_rng(master_seed, seed_index, device):
    """Independent stream for one (Monte-Carlo seed, device) pair.

    Derived by counter from the master seed, so the draws for a pair never
    depend on how many other pairs exist or in which order they run.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(seed_index), int(device)))
    return np.random.default_rng(ss)


def scenario_rng(master_seed, seed_index, purpose):
    """Stream for non-channel randomness (e.g. random scheduling) of one seed."""
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(int(seed_index), 1_000_003, int(purpose)))
    return np.random.default_rng(ss)


def generate_channels(master_seed, seed_index, k, geom, path_count,
                      aoa_range=AOA_RANGE, aod_range=AOD_RANGE):
    return [generate_channel(device_rng(master_seed, seed_index, d), geom, path_count,
                             aoa_range, aod_range) for d in range(k)]


def fingerprint(channels):
    """Short hash of the channel entries; equal for identical realizations."""
    h = hashlib.sha256()
    for ch in channels:
        h.update(np.ascontiguousarray(ch.entries, dtype=complex).tobytes())
    return h.hexdigest()[:16]


def dump_channels(channels, seed=None):
    """Serialize channels to a JSON-compatible dict (paths only; entries are rebuilt on load)."""
    geom = channels[0].geometry
    return {
        "n_tx": geom.n_tx,
        "n_rx": geom.n_rx,
        "spacing_ratio": geom.spacing_ratio,
        "devices": [
            {"device": k, "seed": seed,
             "paths": [{"gain_re": p.gain.real, "gain_im": p.gain.imag, "aoa": p.aoa, "aod": p.aod}
                       for p in ch.paths]}
            for k, ch in enumerate(channels)
        ],
    }


def load_channels(record):
    if isinstance(record, str):
        record = json.loads(record)
    geom = ArrayGeometry(int(record["n_tx"]), int(record["n_rx"]), float(record.get("spacing_ratio", 0.5)))
    out = []
    for dev in record["devices"]:
        paths = tuple(PathParams(complex(p["gain_re"], p["gain_im"]), float(p["aoa"]), float(p["aod"]))
                      for p in dev["paths"])
        out.append(ChannelMatrix(channel_from_paths(paths, geom), paths, geom))
    return out
