"""Transmit precoder design: zero-forcing warm start and the CCP max-min loop.

The non-convex max-min problem is lifted with auxiliary variables

    r_k <= |g_k^H b_k|^2,            t_k >= sum_{j != k} |g_k^H b_j|^2 + n_k,
    alpha * t_k <= r_k               (as (alpha + t)^2 - 4 r <= (alpha - t)^2),
    p_k <= |g_k^H m|^2,              q_k >= sum_j |g_k^H b_j|^2 + n_k,
    gamma * q_k <= p_k,              sum ||b_k||^2 + ||m||^2 <= P_tx,

with ``n_k = sigma^2 ||w_k||^2``.  Each CCP step replaces the concave sides
(``|g^H b|^2``, ``|g^H m|^2`` and ``(alpha - t)^2``) by their first-order
expansions and solves the resulting second-order cone program.

Internally every device is rescaled so that its noise term is 1 and the power
budget is 1, and precoders are restricted to the span of the effective
channels.  Neither change alters the optimum: components orthogonal to every
``g_k`` are invisible to all devices and only consume power.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import conic
from .errors import InternalConsistencyError, ScenarioInfeasible, SingularConfiguration

# Relative safety margins so solver round-off never lands on the wrong side of
# the multicast threshold or the power budget.
GAMMA_MARGIN = 1e-7
POWER_MARGIN = 1e-12
SOLVER_TOL = 1e-9


@dataclass(frozen=True)
class EffectiveChannel:
    """``g = H^H w`` for one device, with the combiner that produced it."""

    g: np.ndarray
    w: np.ndarray = None

    @property
    def w_norm2(self):
        return 1.0 if self.w is None else float(np.vdot(self.w, self.w).real)


@dataclass
class InitialPoint:
    b0: np.ndarray          # K' x N_tx
    m0: np.ndarray          # N_tx, or None without a multicast layer
    t0: np.ndarray          # mW, per scheduled device
    alpha0: float
    a_unicast: np.ndarray   # mW
    a_multicast: float      # mW
    b_hat: np.ndarray
    m_hat: np.ndarray
    maxmin_fallback: bool = False  # True when m_hat is the max-min beam, not the eigen-direction


@dataclass
class CcpState:
    """One CCP iterate; the lifted values ``t, r, p, q`` are in mW."""

    B: np.ndarray
    m: np.ndarray
    alpha: float
    t: np.ndarray
    r: np.ndarray
    p: np.ndarray
    q: np.ndarray
    iteration: int = 0
    trace: list = field(default_factory=list)
    log: list = field(default_factory=list)
    stalled: bool = False


@dataclass
class BeamformingSolution:
    W: list
    B: np.ndarray
    m: np.ndarray
    alpha: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list)
    log: list = field(default_factory=list)
    initial: InitialPoint = None


def _selected(schedule):
    return tuple(int(i) for i in getattr(schedule, "selected", schedule))


def effective_channels(channels, combiners):
    if len(channels) != len(combiners):
        raise ValueError("need one combiner per channel")
    out = []
    for ch, comb in zip(channels, combiners):
        H = np.asarray(getattr(ch, "entries", ch), dtype=complex)
        w = np.asarray(getattr(comb, "w", comb), dtype=complex).reshape(-1)
        if H.shape[0] != w.size:
            raise ValueError(f"combiner length {w.size} does not match {H.shape[0]} receive antennas")
        out.append(EffectiveChannel(H.conj().T @ w, w))
    return out


def zero_forcing_directions(g_scheduled):
    """Unit-norm ``b_hat_k`` with ``g_k^H b_hat_j = 0`` for ``j != k``."""
    M = np.column_stack([np.asarray(getattr(e, "g", e), dtype=complex) for e in g_scheduled])
    if M.shape[1] > M.shape[0]:
        raise SingularConfiguration(f"{M.shape[1]} zero-forcing beams need at least as many antennas")
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0 or sv[-1] <= 1e-10 * sv[0]:
        raise SingularConfiguration("scheduled effective channels are linearly dependent")
    D = np.linalg.pinv(M.conj().T)
    return (D / np.linalg.norm(D, axis=0)).T


def multicast_direction(g_all):
    """Dominant eigenvector of ``sum_k g_k g_k^H`` over all devices."""
    M = np.column_stack([e.g for e in g_all])
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s[0] == 0:
        raise SingularConfiguration("all effective channels vanish")
    u = U[:, 0]
    i = np.argmax(np.abs(u))
    return u * (abs(u[i]) / u[i])


def maxmin_multicast_direction(uh, start, max_iter=50, rel_tol=1e-6):
    """Unit-norm beam locally maximizing ``min_k |uh[k] @ m|^2`` by CCP from ``start``.

    Each step maximizes the weakest linearized gain over the unit ball.
    """
    K, d = uh.shape
    n = 2 * d + 1
    m = start / np.linalg.norm(start)
    best = np.min(np.abs(uh @ m) ** 2)
    lay = _Layout(0, 0, d, False)
    lay.n = n
    for _ in range(max_iter):
        prog = conic.ConicProgram(n, np.eye(n)[2 * d])
        y0 = uh @ m
        for k in range(K):
            re, im = _rows(lay, uh[k], 0)
            prog.add_linear(np.eye(n)[2 * d] - 2 * (y0[k].real * re + y0[k].imag * im), -abs(y0[k]) ** 2)
        prog.add_soc(np.eye(n)[:2 * d], np.zeros(2 * d), np.zeros(n), 1.0)
        sol = conic.solve_conic(prog, tol=SOLVER_TOL)
        cand = sol.x[:d] + 1j * sol.x[d:2 * d]
        cand = cand / np.linalg.norm(cand)
        value = np.min(np.abs(uh @ cand) ** 2)
        if value <= best * (1 + rel_tol):
            if value > best:
                m, best = cand, value
            break
        m, best = cand, value
    return m


class _Frame:
    """Noise-normalized coordinates on the span of a set of effective channels.

    ``b = sqrt(P_tx) Q c`` and ``g_k^H b / sqrt(n_k) = uh[k] @ c``.
    """

    def __init__(self, g_all, sigma2, p_tx, span, reduce=True):
        self.K = len(g_all)
        self.n_tx = g_all[0].g.size
        self.noise = np.array([sigma2 * e.w_norm2 for e in g_all])
        self.p_tx = p_tx
        G = np.column_stack([g_all[k].g for k in span])
        if reduce:
            U, s, _ = np.linalg.svd(G, full_matrices=False)
            keep = s > 1e-12 * s[0] if s[0] > 0 else np.zeros(s.size, bool)
            keep[0] = True
            self.Q = U[:, keep]
        else:
            self.Q = np.eye(self.n_tx, dtype=complex)
        scale = np.sqrt(p_tx / self.noise)
        self.uh = np.stack([e.g.conj() @ self.Q for e in g_all]) * scale[:, None]

    @property
    def d(self):
        return self.Q.shape[1]

    def to_tx(self, c):
        return math.sqrt(self.p_tx) * (np.asarray(c) @ self.Q.T)

    def from_tx(self, b):
        return (np.asarray(b) @ self.Q.conj()) / math.sqrt(self.p_tx)


def _measure(frame, sched, C, m):
    """SINRs of ``(C, m)`` and the tight lifted values ``r, t, p, q`` in mW."""
    Z = frame.uh @ C.T if len(sched) else np.zeros((frame.K, 0))
    P = np.abs(Z) ** 2
    idx = list(sched)
    Zs = P[idx]
    own = np.diag(Zs).copy()
    interf = Zs.sum(axis=1) - own + 1.0
    n_s = frame.noise[idx]
    out = dict(r=own * n_s, t=interf * n_s, sinr_u=own / interf, p=None, q=None, sinr_m=None)
    if m is not None:
        p = np.abs(frame.uh @ m) ** 2
        q = P.sum(axis=1) + 1.0
        out.update(p=p * frame.noise, q=q * frame.noise, sinr_m=p / q)
    return out


def _lp_powers(coef_self, coef_cross_all, coef_mc, gamma, multicast, interference):
    """Power split maximizing the weakest zero-forcing SNR among interference minimizers.

    Variables are fractions of the budget.  Returns ``(x_unicast, x_multicast)``
    or raises :class:`ScenarioInfeasible`.
    """
    kp = coef_self.size
    n = kp + 1 if multicast else kp
    lp = conic.ConicProgram(n + 1)
    tau = n
    budget = np.zeros(n + 1)
    budget[:n] = 1.0
    lp.add_linear(budget, 1.0 - POWER_MARGIN)
    lp.add_linear(-np.eye(n + 1)[:n], np.zeros(n))
    if multicast:
        g = gamma * (1 + GAMMA_MARGIN)
        rows = np.zeros((coef_mc.size, n + 1))
        rows[:, :kp] = g * coef_cross_all
        rows[:, kp] = -coef_mc
        lp.add_linear(rows, -g * np.ones(coef_mc.size))
    # phase 1: minimize the unicast interference
    obj = np.zeros(n + 1)
    obj[:kp] = -interference
    lp.objective = obj
    lp.add_linear(np.eye(n + 1)[tau], 0.0)
    first = conic.solve_conic(lp, tol=SOLVER_TOL)
    if first.status == conic.INFEASIBLE:
        raise ScenarioInfeasible("warm-start power allocation is infeasible")
    if first.status != conic.OPTIMAL:
        raise InternalConsistencyError(f"warm-start LP ended with status {first.status}",
                                       dump=conic.dump_program(lp))
    lp.constraints.pop()
    # phase 2: among (near-)minimizers, maximize the weakest unicast SNR
    f_star = -first.objective_value
    lp.add_linear(-obj, f_star + 1e-9 * (1.0 + abs(f_star)))
    rows = np.zeros((kp, n + 1))
    rows[:, :kp] = -np.diag(coef_self)
    rows[:, tau] = 1.0
    lp.add_linear(rows, np.zeros(kp))
    lp.objective = np.eye(n + 1)[tau]
    second = conic.solve_conic(lp, tol=SOLVER_TOL)
    if second.status != conic.OPTIMAL:
        raise InternalConsistencyError(f"warm-start LP phase 2 ended with status {second.status}",
                                       dump=conic.dump_program(lp))
    x = np.clip(second.x[:n], 0.0, None)
    total = x.sum()
    if total > 1.0 - POWER_MARGIN:
        x *= (1.0 - POWER_MARGIN) / total
    return x[:kp], (x[kp] if multicast else 0.0)


def multicast_beam(g_all, cfg):
    """Unit multicast direction and whether the max-min fallback replaced the eigen-direction.

    The eigen-direction is kept whenever full power on it meets ``gamma_min``
    at every device.
    """
    m_hat = multicast_direction(g_all)
    G = np.stack([e.g for e in g_all])
    noise = np.array([cfg.sigma2_mw * e.w_norm2 for e in g_all])
    snr = cfg.p_tx_mw * np.abs(G.conj() @ m_hat) ** 2 / noise
    if np.min(snr) >= cfg.gamma_min * (1 + 2 * GAMMA_MARGIN):
        return m_hat, False
    frame = _Frame(g_all, cfg.sigma2_mw, cfg.p_tx_mw, range(len(g_all)))
    return frame.Q @ maxmin_multicast_direction(frame.uh, frame.from_tx(m_hat)), True


def build_initial_point(g_all, schedule, cfg, multicast=True):
    sched = _selected(schedule)
    g_s = [g_all[k] for k in sched]
    b_hat = zero_forcing_directions(g_s)
    P = cfg.p_tx_mw
    noise = np.array([cfg.sigma2_mw * e.w_norm2 for e in g_all])
    G = np.stack([e.g for e in g_all])
    h_cross = np.abs(G.conj() @ b_hat.T) ** 2                 # |g_k^H b_hat_j|^2, K x K'
    norm = (P / noise)[:, None]
    coef_self = np.array([h_cross[k, i] for i, k in enumerate(sched)]) * norm[list(sched), 0]
    interference = np.array([sum(h_cross[k, j] for i, k in enumerate(sched) if i != j)
                             for j in range(len(sched))])
    interference = interference * P / noise.mean()
    coef_mc, m_hat = None, None
    fallback = False
    if multicast:
        m_hat, fallback = multicast_beam(g_all, cfg)
        coef_mc = np.abs(G.conj() @ m_hat) ** 2 * norm[:, 0]
        slack = float(np.min(coef_mc / cfg.gamma_min - 1.0))
        if slack < 2 * GAMMA_MARGIN:
            raise ScenarioInfeasible(
                f"multicast threshold unattainable even with full power (relative slack {slack:.3g})",
                constraint="multicast", slack=slack)
    try:
        x_u, x_m = _lp_powers(coef_self, h_cross * norm, coef_mc, cfg.gamma_min, multicast, interference)
    except ScenarioInfeasible as exc:
        raise ScenarioInfeasible(str(exc), constraint="multicast") from exc
    a_u = x_u * P
    a_m = x_m * P
    b0 = np.sqrt(a_u)[:, None] * b_hat
    m0 = math.sqrt(a_m) * m_hat if multicast else None
    h_s = h_cross[list(sched)]
    t0 = np.array([sum(a_u[j] * h_s[i, j] for j in range(len(sched)) if j != i) for i in range(len(sched))])
    t0 = t0 + noise[list(sched)]
    alpha0 = float(np.min(a_u * np.diag(h_s) / t0))
    init = InitialPoint(b0, m0, t0, alpha0, a_u, float(a_m), b_hat, m_hat, fallback)
    check_feasible(g_all, sched, cfg, b0, m0, alpha0, where="warm start")
    return init


def sinrs(g_all, sched, sigma2, B, m):
    """Per-device multicast (all K) and unicast (scheduled) SINRs from effective channels."""
    G = np.stack([e.g for e in g_all])
    noise = np.array([sigma2 * e.w_norm2 for e in g_all])
    P = np.abs(G.conj() @ np.asarray(B).T) ** 2 if len(sched) else np.zeros((len(g_all), 0))
    total_u = P.sum(axis=1)
    mc = None if m is None else np.abs(G.conj() @ m) ** 2 / (total_u + noise)
    own = np.array([P[k, i] for i, k in enumerate(sched)])
    uc = own / (total_u[list(sched)] - own + noise[list(sched)])
    return mc, uc


def check_feasible(g_all, sched, cfg, B, m, alpha, where="solution", rel_tol=1e-6):
    """Verify power, multicast and (at level ``alpha``) unicast constraints in original units."""
    power = float(np.sum(np.abs(B) ** 2) + (0.0 if m is None else np.sum(np.abs(m) ** 2)))
    mc, uc = sinrs(g_all, sched, cfg.sigma2_mw, B, m)
    problems = []
    if power > cfg.p_tx_mw + 1e-9:
        problems.append(f"power {power!r} exceeds {cfg.p_tx_mw!r}")
    if mc is not None and np.min(mc) < cfg.gamma_min * (1 - rel_tol):
        problems.append(f"multicast SINR {np.min(mc)!r} below {cfg.gamma_min!r}")
    if np.min(uc) < alpha - rel_tol * max(1.0, abs(alpha)):
        problems.append(f"unicast SINR {np.min(uc)!r} below claimed level {alpha!r}")
    if problems:
        raise InternalConsistencyError(f"{where} infeasible: " + "; ".join(problems),
                                       dump=dict(B=B, m=m, alpha=alpha, power=power))
    return mc, uc


class _Layout:
    def __init__(self, kp, k, d, multicast):
        self.kp, self.k, self.d = kp, k, d
        self.c = 0
        self.m = 2 * d * kp
        self.alpha = self.m + (2 * d if multicast else 0)
        self.r = self.alpha + 1
        self.t = self.r + kp
        self.p = self.t + kp
        self.q = self.p + (k if multicast else 0)
        self.n = self.q + (k if multicast else 0)

    def block(self, j):
        return self.c + 2 * self.d * j

    def e(self, i):
        v = np.zeros(self.n)
        v[i] = 1.0
        return v


def _rows(lay, vh, off):
    """Real rows giving Re and Im of ``vh @ c`` for the complex block at ``off``."""
    d = lay.d
    re = np.zeros(lay.n)
    im = np.zeros(lay.n)
    re[off:off + d], re[off + d:off + 2 * d] = vh.real, -vh.imag
    im[off:off + d], im[off + d:off + 2 * d] = vh.imag, vh.real
    return re, im


def _unpack(lay, x):
    d = lay.d
    C = np.array([x[lay.block(j):lay.block(j) + d] + 1j * x[lay.block(j) + d:lay.block(j) + 2 * d]
                  for j in range(lay.kp)]).reshape(lay.kp, d)
    m = None
    if lay.alpha > lay.m:
        m = x[lay.m:lay.m + d] + 1j * x[lay.m + d:lay.m + 2 * d]
    return C, m


def build_subproblem(frame, sched, C0, m0, alpha0, t0, gamma):
    """Convexified program around ``(C0, m0, alpha0, t0)`` in frame coordinates."""
    kp, K, d = len(sched), frame.K, frame.d
    multicast = m0 is not None
    lay = _Layout(kp, K, d, multicast)
    prog = conic.ConicProgram(lay.n, lay.e(lay.alpha))
    rows = {}
    for k in range(K):
        for j in range(kp):
            rows[k, j] = _rows(lay, frame.uh[k], lay.block(j))
    # frame gains are noise-normalized; lifted variables stay in mW, hence the nk factors
    for i, k in enumerate(sched):
        nk = frame.noise[k]
        z0 = frame.uh[k] @ C0[i]
        re, im = rows[k, i]
        prog.add_linear(lay.e(lay.r + i) - 2 * nk * (z0.real * re + z0.imag * im), -nk * abs(z0) ** 2)
        others = [row for j in range(kp) if j != i for row in rows[k, j]]
        prog.add_quadratic(math.sqrt(nk) * np.array(others) if others else np.zeros((0, lay.n)),
                           -lay.e(lay.t + i), nk)
        delta = alpha0 - t0[i]
        prog.add_quadratic(lay.e(lay.alpha) + lay.e(lay.t + i),
                           -4 * lay.e(lay.r + i) - 2 * delta * (lay.e(lay.alpha) - lay.e(lay.t + i)),
                           delta * delta)
    if multicast:
        g = gamma * (1 + GAMMA_MARGIN)
        for k in range(K):
            nk = frame.noise[k]
            y0 = frame.uh[k] @ m0
            re, im = _rows(lay, frame.uh[k], lay.m)
            prog.add_linear(lay.e(lay.p + k) - 2 * nk * (y0.real * re + y0.imag * im), -nk * abs(y0) ** 2)
            prog.add_quadratic(math.sqrt(nk) * np.array([row for j in range(kp) for row in rows[k, j]]),
                               -lay.e(lay.q + k), nk)
            prog.add_linear(g * lay.e(lay.q + k) - lay.e(lay.p + k), 0.0)
    sel = np.eye(lay.n)[:lay.alpha]
    prog.add_soc(sel, np.zeros(lay.alpha), np.zeros(lay.n), math.sqrt(1.0 - POWER_MARGIN))
    return prog, lay


def _pack(lay, C, m, alpha, meas):
    """The expansion point as a vector of program variables."""
    x = np.zeros(lay.n)
    d = lay.d
    for j in range(lay.kp):
        x[lay.block(j):lay.block(j) + d] = C[j].real
        x[lay.block(j) + d:lay.block(j) + 2 * d] = C[j].imag
    if m is not None:
        x[lay.m:lay.m + d], x[lay.m + d:lay.m + 2 * d] = m.real, m.imag
        x[lay.p:lay.p + lay.k] = meas["p"]
        x[lay.q:lay.q + lay.k] = meas["q"]
    x[lay.alpha] = alpha
    x[lay.r:lay.r + lay.kp] = meas["r"]
    x[lay.t:lay.t + lay.kp] = meas["t"]
    return x


def _variable_scale(lay, frame, sched, alpha0, meas):
    """Magnitudes of the lifted variables at the expansion point (precoder blocks are O(1))."""
    D = np.ones(lay.n)
    n_s = frame.noise[list(sched)]
    D[lay.alpha] = max(alpha0, 1.0)
    D[lay.r:lay.r + lay.kp] = np.maximum(meas["r"], n_s)
    D[lay.t:lay.t + lay.kp] = meas["t"]
    if meas["p"] is not None:
        D[lay.p:lay.p + lay.k] = np.maximum(meas["p"], frame.noise)
        D[lay.q:lay.q + lay.k] = meas["q"]
    return D


def _state_from(frame, sched, C, m, iteration, trace, log):
    meas = _measure(frame, sched, C, m)
    return CcpState(B=frame.to_tx(C), m=None if m is None else frame.to_tx(m),
                    alpha=float(np.min(meas["sinr_u"])), t=meas["t"], r=meas["r"],
                    p=meas["p"], q=meas["q"], iteration=iteration, trace=trace, log=log)


def initial_state(frame, sched, init):
    C = frame.from_tx(init.b0)
    m = None if init.m0 is None else frame.from_tx(init.m0)
    state = _state_from(frame, sched, C, m, 0, [], [])
    state.trace.append(state.alpha)
    return state


def ccp_step(state, g_all, schedule, cfg, frame=None):
    """One convexify-and-solve step.  Steps that would lower alpha are rejected."""
    sched = _selected(schedule)
    multicast = state.m is not None
    if frame is None:
        frame = _Frame(g_all, cfg.sigma2_mw, cfg.p_tx_mw,
                       range(len(g_all)) if multicast else sched)
    C0 = frame.from_tx(state.B)
    m0 = frame.from_tx(state.m) if multicast else None
    meas = _measure(frame, sched, C0, m0)
    alpha0 = float(np.min(meas["sinr_u"]))
    prog, lay = build_subproblem(frame, sched, C0, m0, alpha0, meas["t"], cfg.gamma_min)
    D = _variable_scale(lay, frame, sched, alpha0, meas)
    x0 = _pack(lay, C0, m0, alpha0, meas)
    sol = conic.solve_conic(conic.rescale(prog, D, at=x0), tol=SOLVER_TOL)
    if sol.status in (conic.INFEASIBLE, conic.UNBOUNDED):
        raise InternalConsistencyError(f"CCP subproblem {sol.status} at iteration {state.iteration + 1}",
                                       dump=conic.dump_program(prog))
    x = D * sol.x
    C, m = _unpack(lay, x)
    power = np.sum(np.abs(C) ** 2) + (0.0 if m is None else np.sum(np.abs(m) ** 2))
    if power > 1.0 - POWER_MARGIN:
        s = math.sqrt((1.0 - POWER_MARGIN) / power)
        C, m = C * s, (None if m is None else m * s)
    new = _measure(frame, sched, C, m)
    alpha = float(np.min(new["sinr_u"]))
    ok = alpha >= alpha0 and (m is None or np.min(new["sinr_m"]) >= cfg.gamma_min)
    entry = dict(iteration=state.iteration + 1, alpha=alpha if ok else alpha0, subproblem_alpha=float(x[lay.alpha]),
                 status=sol.status, primal_residual=sol.primal_residual, dual_residual=sol.dual_residual,
                 duality_gap=sol.duality_gap, solver_iterations=sol.iterations, accepted=bool(ok))
    log = state.log + [entry]
    if not ok:
        kept = _state_from(frame, sched, C0, m0, state.iteration + 1, state.trace + [alpha0], log)
        kept.B, kept.m, kept.stalled = state.B, state.m, True
        return kept
    return _state_from(frame, sched, C, m, state.iteration + 1, state.trace + [alpha], log)


def solve_precoders(g_all, schedule, cfg, multicast=True, reduce=True):
    """Warm start, then CCP until ``n_conv`` steps or an alpha change of at most ``epsilon``."""
    sched = _selected(schedule)
    init = build_initial_point(g_all, sched, cfg, multicast=multicast)
    frame = _Frame(g_all, cfg.sigma2_mw, cfg.p_tx_mw, range(len(g_all)) if multicast else sched, reduce)
    state = initial_state(frame, sched, init)
    converged = False
    while state.iteration < cfg.n_conv:
        prev = state.alpha
        state = ccp_step(state, g_all, sched, cfg, frame)
        if state.stalled or abs(state.alpha - prev) <= cfg.epsilon:
            converged = True
            break
    _, uc = check_feasible(g_all, sched, cfg, state.B, state.m, state.alpha)
    return BeamformingSolution(W=[e.w for e in g_all], B=state.B, m=state.m, alpha=float(np.min(uc)),
                               iterations=state.iteration, converged=converged,
                               trace=state.trace, log=state.log, initial=init)


TRACE_FIELDS = ("iteration", "alpha", "subproblem_alpha", "status", "primal_residual",
                "dual_residual", "duality_gap", "solver_iterations", "accepted")


def write_trace_csv(path, solution):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_FIELDS)
        writer.writeheader()
        writer.writerow(dict(iteration=0, alpha=repr(solution.trace[0]), status="warm-start", accepted=True))
        for row in solution.log:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
