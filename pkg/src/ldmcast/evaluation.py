"""SINR evaluation and the end-to-end scheme pipelines.

A scheme turns one channel realization into a scheduled set, combiners and
precoders, then scores the result.  Pipelines that only differ in how the
dual-layer set is chosen share a :class:`PipelineCache`, so a subset solved
once (for instance by the exhaustive search) is never solved again for the
same realization.
"""

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import precoder
from .combiner import PhaseCodebook, design_combiner
from .errors import ScenarioInfeasible
from .metrics import KINDS, MetricKind, discordance_matrix
from .scheduler import random_schedule, solve_schedule

SCHEMES = ("BEAMWAVE", "RANDOM", "XHAUS", "TDM")


@dataclass(frozen=True)
class SchemeKind:
    """``BEAMWAVE`` with a metric, ``RANDOM``, ``XHAUS`` or ``TDM`` with a unicast share.

    TDM picks its unicast set with the BEAMWAVE scheduler under ``metric``.
    """

    tag: str
    metric: str = None
    t_u: float = None

    def __post_init__(self):
        if self.tag not in SCHEMES:
            raise ValueError(f"unknown scheme {self.tag!r}; expected one of {SCHEMES}")
        if self.tag in ("BEAMWAVE", "TDM"):
            if self.metric is None:
                object.__setattr__(self, "metric", "KING")
            if self.metric not in KINDS:
                raise ValueError(f"unknown metric {self.metric!r}")
        elif self.metric is not None:
            raise ValueError(f"{self.tag} takes no metric")
        if self.tag == "TDM":
            if self.t_u is None or not 0.0 < self.t_u < 1.0:
                raise ValueError("TDM needs a unicast share t_u in (0, 1)")
        elif self.t_u is not None:
            raise ValueError(f"{self.tag} takes no time share")

    @property
    def label(self):
        if self.tag == "BEAMWAVE":
            return f"BEAMWAVE-{self.metric}"
        if self.tag == "TDM":
            return f"TDM-{self.t_u:g}" + ("" if self.metric == "KING" else f"-{self.metric}")
        return self.tag

    @classmethod
    def parse(cls, text):
        """Inverse of :attr:`label`, e.g. ``BEAMWAVE-KING``, ``RANDOM``, ``TDM-0.75``."""
        parts = text.strip().upper().split("-")
        tag = parts[0]
        if tag == "BEAMWAVE" and len(parts) <= 2:
            return cls(tag, parts[1] if len(parts) == 2 else None)
        if tag == "TDM" and len(parts) in (2, 3):
            try:
                share = float(parts[1])
            except ValueError:
                raise ValueError(f"bad TDM share in {text!r}") from None
            return cls(tag, parts[2] if len(parts) == 3 else None, share)
        if tag in ("RANDOM", "XHAUS") and len(parts) == 1:
            return cls(tag)
        raise ValueError(f"cannot parse scheme {text!r}")


@dataclass
class ScenarioResult:
    scheme: SchemeKind
    selected: tuple
    min_unicast_sinr: float
    unicast_sinrs: np.ndarray
    multicast_sinrs: np.ndarray
    unicast_se: float
    feasible: bool
    iterations: int
    runtime_ms: float
    converged: bool = False
    failure: str = None
    solution: object = field(default=None, repr=False)


class XhausCapExceeded(ValueError):
    pass


def evaluate_sinrs(channels, solution, schedule, sigma2):
    """Multicast SINR of every device and unicast SINR of every scheduled device.

    Computed from the raw channels, combiners and precoders; the multicast
    layer is decoded first, so the whole unicast layer interferes with it,
    while unicast streams only see each other after cancellation.
    """
    sched = precoder._selected(schedule)
    W, B, m = solution.W, np.asarray(solution.B), solution.m
    if len(W) != len(channels):
        raise ValueError("need one combiner per channel")
    if B.shape[0] != len(sched):
        raise ValueError(f"{B.shape[0]} unicast precoders for {len(sched)} scheduled devices")
    K = len(channels)
    mc = np.zeros(K)
    uc = np.zeros(len(sched))
    for k, (ch, w) in enumerate(zip(channels, W)):
        H = np.asarray(getattr(ch, "entries", ch), dtype=complex)
        w = np.asarray(w, dtype=complex).reshape(-1)
        if H.shape != (w.size, B.shape[1] if B.size else H.shape[1]):
            raise ValueError("channel, combiner and precoder dimensions disagree")
        eff = w.conj() @ H
        gains = np.abs(B @ eff) ** 2 if B.size else np.zeros(0)
        noise = sigma2 * float(np.vdot(w, w).real)
        if m is not None:
            mc[k] = abs(eff @ m) ** 2 / (gains.sum() + noise)
        if k in sched:
            i = sched.index(k)
            uc[i] = gains[i] / (gains.sum() - gains[i] + noise)
    return (mc if m is not None else None), uc


def spectral_efficiency(unicast_sinrs, time_share=1.0):
    if not 0.0 < time_share <= 1.0:
        raise ValueError("time_share must lie in (0, 1]")
    sinrs = np.asarray(unicast_sinrs, dtype=float)
    if np.any(sinrs < 0):
        raise ValueError("SINRs must be nonnegative")
    return time_share * math.fsum(np.log2(1.0 + sinrs))


@dataclass
class _Outcome:
    solution: object
    multicast_sinrs: np.ndarray
    unicast_sinrs: np.ndarray
    runtime_ms: float
    failure: str = None


class PipelineCache:
    """Per-realization store of combiners, discordance matrices and solved subsets."""

    def __init__(self, channels, cfg):
        self.channels = channels
        self.cfg = cfg
        codebook = PhaseCodebook.from_power(cfg.l_rx, cfg.p_rx_mw, channels[0].entries.shape[0])
        self.combiners = [design_combiner(ch, codebook) for ch in channels]
        self.g = precoder.effective_channels(channels, self.combiners)
        self.theta = {}
        self.outcomes = {}
        self.solve_ms = 0.0  # wall time spent computing (not fetching) outcomes

    def discordance(self, metric):
        if metric not in self.theta:
            self.theta[metric] = discordance_matrix(self.channels, MetricKind(metric, self.cfg.omega))
        return self.theta[metric]

    def solve(self, selected, multicast=True):
        key = (tuple(selected), multicast)
        if key not in self.outcomes:
            self.outcomes[key] = self._run(key[0], multicast)
            self.solve_ms += self.outcomes[key].runtime_ms
        return self.outcomes[key]

    def _run(self, selected, multicast):
        start = time.perf_counter()
        try:
            sol = precoder.solve_precoders(self.g, selected, self.cfg, multicast=multicast)
        except ScenarioInfeasible as exc:
            return _Outcome(None, None, None, 1e3 * (time.perf_counter() - start),
                            failure=f"{exc.constraint}: {exc}")
        sol.W = [c.w for c in self.combiners]
        mc, uc = evaluate_sinrs(self.channels, sol, selected, self.cfg.sigma2_mw)
        return _Outcome(sol, mc, uc, 1e3 * (time.perf_counter() - start))


def _verify(cfg, sol, mc):
    """Power budget and multicast QoS from raw precoders and SINRs."""
    power = float(np.sum(np.abs(sol.B) ** 2) + (0.0 if sol.m is None else np.sum(np.abs(sol.m) ** 2)))
    ok = power <= cfg.p_tx_mw + 1e-9
    if mc is not None:
        ok = ok and bool(np.min(mc) >= cfg.gamma_min * (1 - 1e-6))
    return ok


def _result(scheme, selected, outcome, cfg, share=1.0, multicast_sinrs=None):
    if outcome.solution is None:
        return ScenarioResult(scheme, tuple(selected), math.nan, np.zeros(0), np.zeros(0), math.nan,
                              False, 0, 0.0, failure=outcome.failure)
    sol = outcome.solution
    mc = outcome.multicast_sinrs if multicast_sinrs is None else multicast_sinrs
    feasible = _verify(cfg, sol, outcome.multicast_sinrs)
    if multicast_sinrs is not None:
        feasible = feasible and bool(np.min(multicast_sinrs) >= cfg.gamma_min * (1 - 1e-6))
    uc = outcome.unicast_sinrs
    return ScenarioResult(scheme, tuple(selected), float(np.min(uc)), uc, mc,
                          spectral_efficiency(uc, share), feasible, sol.iterations, 0.0,
                          converged=sol.converged, solution=sol)


def xhaus_subsets(k, k_prime, cap):
    count = math.comb(k, k_prime)
    if count > cap:
        raise XhausCapExceeded(f"exhaustive search needs {count} subsets, above the cap of {cap}")
    return itertools.combinations(range(k), k_prime)


def run_scheme(channels, cfg, scheme, rng=None, cache=None):
    """Run one scheme on one channel realization.

    ``rng`` drives RANDOM scheduling only.  Pass a shared ``cache`` to reuse
    combiners and solved subsets across schemes on the same realization.
    Infeasible realizations come back with ``feasible=False`` and ``failure``
    naming the violated constraint family.  ``runtime_ms`` charges every
    precoder solve the scheme relied on, whether or not it was cached.
    """
    if isinstance(scheme, str):
        scheme = SchemeKind.parse(scheme)
    if len(channels) != cfg.k:
        raise ValueError(f"config has k={cfg.k} but {len(channels)} channels were given")
    if cache is None:
        cache = PipelineCache(channels, cfg)
    start = time.perf_counter()
    solved_before = cache.solve_ms

    def charge(result, *outcomes):
        own = 1e3 * (time.perf_counter() - start) - (cache.solve_ms - solved_before)
        result.runtime_ms = own + sum(o.runtime_ms for o in outcomes)
        return result

    if scheme.tag == "XHAUS":
        best, best_sel, done = None, (), []
        for subset in xhaus_subsets(cfg.k, cfg.k_prime, cfg.xhaus_cap):
            out = cache.solve(subset)
            done.append(out)
            if out.solution is not None and (best is None or np.min(out.unicast_sinrs) > np.min(best.unicast_sinrs)):
                best, best_sel = out, subset
        return charge(_result(scheme, best_sel, best or done[0], cfg), *done)

    if scheme.tag == "RANDOM":
        if rng is None:
            raise ValueError("RANDOM scheduling needs an rng")
        selected = random_schedule(rng, cfg.k, cfg.k_prime).selected
    else:
        selected = solve_schedule(cache.discordance(scheme.metric), cfg.k_prime).selected

    if scheme.tag != "TDM":
        out = cache.solve(selected)
        return charge(_result(scheme, selected, out, cfg), out)

    # TDM multicast window: the whole budget on m and no unicast layer
    try:
        m_hat, _ = precoder.multicast_beam(cache.g, cfg)
    except ScenarioInfeasible as exc:
        return charge(_result(scheme, selected, _Outcome(None, None, None, 0.0, f"{exc.constraint}: {exc}"), cfg))
    m = math.sqrt(cfg.p_tx_mw) * m_hat
    mc = np.array([abs(e.g.conj() @ m) ** 2 / (cfg.sigma2_mw * e.w_norm2) for e in cache.g])
    out = cache.solve(selected, multicast=False)
    res = _result(scheme, selected, out, cfg, share=scheme.t_u, multicast_sinrs=mc)
    if not res.feasible and res.failure is None:
        res.failure = "multicast: TDM multicast window below gamma_min"
    return charge(res, out)
