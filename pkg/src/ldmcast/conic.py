"""Dense primal-dual interior-point solver for small second-order cone programs.

Programs are stated in a modelling form (:class:`ConicProgram`: maximize a
linear objective subject to linear, convex quadratic and second-order cone
constraints) and lowered to the standard form

    minimize    c^T x
    subject to  G x + s = h,   A x = b,   s in K

where ``K`` is a product of second-order cones.  Nonnegative-orthant rows are
handled as one-dimensional cones, so every cone operation is vectorized over
cone segments.  The solver runs a homogeneous self-dual embedding with
Nesterov-Todd scaling and a Mehrotra predictor-corrector, which gives both
optimality and infeasibility certificates without a phase-one problem.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

_STEP_FRACTION = 0.99


@dataclass
class LinearConstraint:
    """``a @ x <= b`` (or ``==`` when ``equality``)."""

    a: np.ndarray
    b: float
    equality: bool = False


@dataclass
class QuadraticConstraint:
    """``||G x||^2 + b @ x + c <= 0``; the quadratic form is ``G^T G``.

    ``kappa`` only affects the cone lowering (see :meth:`ConicProgram.lower`);
    a value near the typical size of ``||G x||^2`` keeps the cone well
    conditioned.
    """

    G: np.ndarray
    b: np.ndarray
    c: float
    kappa: float = 1.0


@dataclass
class SocConstraint:
    """``||A x + b||_2 <= c @ x + d``."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float


@dataclass
class ConicProgram:
    """Maximize ``objective @ x`` over a real vector of length ``n``."""

    n: int
    objective: np.ndarray = None
    constraints: list = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a conic program needs at least one variable")
        if self.objective is None:
            self.objective = np.zeros(self.n)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.n,):
            raise ValueError(f"objective must have shape ({self.n},)")

    def _vec(self, v, name):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"{name} must have shape ({self.n},), got {v.shape}")
        return v

    def add_linear(self, a, b):
        """Add ``a @ x <= b``; a 2-D ``a`` with vector ``b`` adds one row each."""
        a = np.asarray(a, dtype=float)
        if a.ndim == 2:
            for row, rhs in zip(a, np.broadcast_to(b, a.shape[:1])):
                self.add_linear(row, rhs)
            return
        self.constraints.append(LinearConstraint(self._vec(a, "a"), float(b)))

    def add_equality(self, a, b):
        self.constraints.append(LinearConstraint(self._vec(a, "a"), float(b), True))

    def add_quadratic(self, G, b, c):
        G = np.atleast_2d(np.asarray(G, dtype=float))
        if G.size == 0:
            G = np.zeros((0, self.n))
        if G.shape[1] != self.n:
            raise ValueError(f"quadratic factor must have {self.n} columns")
        self.constraints.append(QuadraticConstraint(G, self._vec(b, "b"), float(c)))

    def add_soc(self, A, b, c, d):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.shape[1] != self.n or A.shape[0] != b.shape[0]:
            raise ValueError("cone matrix and offset have inconsistent shapes")
        self.constraints.append(SocConstraint(A, b, self._vec(c, "c"), float(d)))

    def violations(self, x):
        """Per-constraint violation ``max(0, lhs - rhs)`` at ``x`` (abs for equalities)."""
        x = np.asarray(x, dtype=float)
        out = []
        for con in self.constraints:
            if isinstance(con, LinearConstraint):
                r = con.a @ x - con.b
                out.append(abs(r) if con.equality else max(r, 0.0))
            elif isinstance(con, QuadraticConstraint):
                gx = con.G @ x
                out.append(max(gx @ gx + con.b @ x + con.c, 0.0))
            else:
                out.append(max(np.linalg.norm(con.A @ x + con.b) - con.c @ x - con.d, 0.0))
        return np.array(out)

    def lower(self):
        """Return ``(c, G, h, A, b, cone_sizes)`` of the equivalent minimization."""
        g_rows, h_rows, sizes = [], [], []
        a_rows, b_rows = [], []
        for con in self.constraints:
            if isinstance(con, LinearConstraint):
                if con.equality:
                    a_rows.append(con.a[None, :])
                    b_rows.append([con.b])
                else:
                    g_rows.append(con.a[None, :])
                    h_rows.append([con.b])
                    sizes.append(1)
            elif isinstance(con, QuadraticConstraint):
                if con.G.shape[0] == 0:
                    g_rows.append(con.b[None, :])
                    h_rows.append([-con.c])
                    sizes.append(1)
                    continue
                # ||Gx||^2 <= u with u = -b@x - c  <=>  (u+k, u-k, 2 sqrt(k) Gx) in Q
                k = con.kappa
                g_rows.append(np.vstack([con.b, con.b, -2.0 * np.sqrt(k) * con.G]))
                h_rows.append(np.concatenate([[k - con.c, -k - con.c], np.zeros(con.G.shape[0])]))
                sizes.append(con.G.shape[0] + 2)
            else:
                g_rows.append(np.vstack([-con.c, -con.A]))
                h_rows.append(np.concatenate([[con.d], con.b]))
                sizes.append(con.A.shape[0] + 1)
        n = self.n
        G = np.vstack(g_rows) if g_rows else np.zeros((0, n))
        h = np.concatenate(h_rows) if h_rows else np.zeros(0)
        A = np.vstack(a_rows) if a_rows else np.zeros((0, n))
        b = np.concatenate(b_rows).astype(float) if b_rows else np.zeros(0)
        return -self.objective, G, h, A, b, np.array(sizes, dtype=int)


@dataclass
class ConicSolution:
    x: np.ndarray
    objective_value: float
    status: str
    primal_residual: float
    dual_residual: float
    duality_gap: float
    iterations: int = 0
    s: np.ndarray = None
    z: np.ndarray = None
    y: np.ndarray = None


class _Cones:
    """Index bookkeeping for a product of second-order cones laid out contiguously."""

    def __init__(self, sizes):
        sizes = np.asarray(sizes, dtype=int)
        if np.any(sizes < 1):
            raise ValueError("cone sizes must be positive")
        self.sizes = sizes
        self.m = int(sizes.sum())
        self.heads = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(int)
        self.owner = np.repeat(np.arange(sizes.size), sizes)
        self.J = -np.ones(self.m)
        self.J[self.heads] = 1.0
        self.e = np.zeros(self.m)
        self.e[self.heads] = 1.0
        self.tail = 1.0 - self.e
        self.block_mask = (self.owner[:, None] == self.owner[None, :]).astype(float)
        self.diag = np.diag_indices(self.m)
        self.degree = sizes.size

    def seg(self, v):
        return np.add.reduceat(v, self.heads, axis=0)

    def spread(self, v):
        return v[self.owner]

    def tail_norm(self, u):
        return np.sqrt(self.seg(u * u * self.tail))

    def margin(self, u):
        """Per-cone ``u0 - ||u1||``; positive iff ``u`` is interior."""
        return u[self.heads] - self.tail_norm(u)

    def jnorm2(self, u):
        """Per-cone ``u^T J u`` computed as a product to avoid cancellation."""
        u0 = u[self.heads]
        t = self.tail_norm(u)
        return (u0 - t) * (u0 + t)

    def product(self, u, v):
        """Jordan product ``u o v``."""
        head = self.seg(u * v)
        out = self.spread(u[self.heads]) * v + self.spread(v[self.heads]) * u
        out[self.heads] = head
        return out

    def divide(self, lam, w):
        """Solve ``lam o x = w`` for ``x``."""
        l0 = lam[self.heads]
        w0 = w[self.heads]
        cross = self.seg(lam * w) - l0 * w0
        x0 = (l0 * w0 - cross) / self.jnorm2(lam)
        x = (w - lam * self.spread(x0)) / self.spread(l0)
        x[self.heads] = x0
        return x

    def max_step(self, u, d):
        """Largest ``t >= 0`` keeping ``u + t d`` in the cone (``inf`` if unbounded)."""
        a = self.seg(d * d * self.J)
        b = self.seg(u * d * self.J)
        c = np.maximum(self.jnorm2(u), 0.0)
        disc = b * b - a * c
        root = np.sqrt(np.maximum(disc, 0.0))
        steps = np.full(a.shape, np.inf)
        # a tangent direction may round to a slightly negative discriminant
        case1 = (b < 0) & (disc >= -1e-12 * b * b)
        steps[case1] = c[case1] / (-b[case1] + root[case1])
        case2 = (a < 0) & (b >= 0)
        steps[case2] = (b[case2] + root[case2]) / (-a[case2])
        # orthant rows: exact ratio test (the discriminant above cancels to zero)
        lone = self.sizes == 1
        u0, d0 = u[self.heads[lone]], d[self.heads[lone]]
        steps[lone] = np.where(d0 < 0, -u0 / np.where(d0 < 0, d0, -1.0), np.inf)
        return steps.min() if steps.size else np.inf


class _Scaling:
    """Nesterov-Todd scaling ``W = beta (2 v v^T - J)`` per cone, held as dense block-diagonal matrices."""

    def __init__(self, cones, s, z):
        self.cones = cones
        sj = cones.jnorm2(s)
        zj = cones.jnorm2(z)
        sb = s / cones.spread(np.sqrt(sj))
        zb = z / cones.spread(np.sqrt(zj))
        gamma = np.sqrt((1.0 + cones.seg(zb * sb)) / 2.0)
        wb = (sb + cones.J * zb) / cones.spread(2.0 * gamma)
        self.beta = (sj / zj) ** 0.25
        v = (wb + cones.e) / cones.spread(np.sqrt(2.0 * (wb[cones.heads] + 1.0)))
        bs = cones.spread(self.beta)
        jv = cones.J * v
        self.W = cones.block_mask * np.outer(2.0 * bs * v, v)
        self.W[cones.diag] -= cones.J * bs
        self.Winv = cones.block_mask * np.outer(2.0 * jv / bs, jv)
        self.Winv[cones.diag] -= cones.J / bs

    def apply(self, d):
        return self.W @ d

    def apply_inv(self, d):
        return self.Winv @ d


class _KKT:
    """Factorization of ``[[0, A^T, G^T], [A, 0, 0], [G, 0, -W^T W]]``.

    Solved through the normal equations of the scaled system, with one step
    of iterative refinement on the full system.
    """

    def __init__(self, G, A, scaling, refine=1):
        self.G, self.A, self.refine = G, A, refine
        n = G.shape[1]
        self.Winv = None if scaling is None else scaling.Winv
        self.W = None if scaling is None else scaling.W
        self.WiG = G if scaling is None else self.Winv @ G
        H = self.WiG.T @ self.WiG
        reg = 1e-13 * max(1.0, float(np.max(np.abs(np.diag(H))))) if n else 0.0
        p = A.shape[0]
        if p == 0:
            try:
                self._chol = sla.cho_factor(H + reg * np.eye(n), check_finite=False)
            except np.linalg.LinAlgError:
                self._chol = sla.cho_factor(H + (1e-8 * max(1.0, np.trace(H) / max(n, 1))) * np.eye(n),
                                            check_finite=False)
            self._lu = None
        else:
            K = np.block([[H + reg * np.eye(n), A.T], [A, -reg * np.eye(p)]])
            self._lu = sla.lu_factor(K, check_finite=False)
            self._chol = None

    def _reduced(self, r1, r2, r3):
        wr3 = r3 if self.Winv is None else self.Winv @ r3
        rhs = r1 + self.WiG.T @ wr3
        if self._lu is None:
            dx = sla.cho_solve(self._chol, rhs, check_finite=False)
            dy = np.zeros(0)
        else:
            sol = sla.lu_solve(self._lu, np.concatenate([rhs, r2]), check_finite=False)
            dx, dy = sol[:rhs.size], sol[rhs.size:]
        dz = self.WiG @ dx - wr3
        if self.Winv is not None:
            dz = self.Winv @ dz
        return dx, dy, dz

    def solve(self, r1, r2, r3):
        G, A = self.G, self.A
        dx, dy, dz = self._reduced(r1, r2, r3)
        for _ in range(self.refine):
            e1 = r1 - A.T @ dy - G.T @ dz
            e2 = r2 - A @ dx
            e3 = r3 - G @ dx + (dz if self.W is None else self.W @ (self.W @ dz))
            cx, cy, cz = self._reduced(e1, e2, e3)
            dx, dy, dz = dx + cx, dy + cy, dz + cz
        return dx, dy, dz


def _interior_shift(cones, u):
    """Shift ``u`` by a multiple of the identity so it lies strictly inside the cone."""
    deficit = -np.min(cones.margin(u)) if cones.m else -1.0
    if deficit >= 0:
        return u + (1.0 + deficit) * cones.e
    return u.copy()


def solve_lowered(c, G, h, A, b, sizes, tol=1e-9, max_iter=100):
    """Solve ``min c@x  s.t.  G x + s = h, A x = b, s in K`` (see module docstring)."""
    c = np.asarray(c, dtype=float)
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    A = np.asarray(A, dtype=float).reshape(-1, c.size)
    b = np.asarray(b, dtype=float).reshape(-1)
    n, m, p = c.size, G.shape[0], A.shape[0]
    if G.shape != (m, n) or h.shape != (m,) or b.shape != (p,):
        raise ValueError("inconsistent lowered program dimensions")
    if m == 0:
        raise ValueError("program has no inequality constraints")
    cones = _Cones(sizes)
    if cones.m != m:
        raise ValueError("cone sizes do not cover the inequality rows")

    reltol = 10.0 * tol
    nc, nh, nb = np.linalg.norm(c), np.linalg.norm(h), np.linalg.norm(b)

    kkt = _KKT(G, A, None)
    xp, _, zp = kkt.solve(np.zeros(n), b, h)
    s = _interior_shift(cones, -zp)
    xd, y, zd = kkt.solve(-c, np.zeros(p), np.zeros(m))
    z = _interior_shift(cones, zd)
    x = xp
    tau = kappa = 1.0

    status = ITERATION_LIMIT
    best = None       # (merit, residuals, iterate) of the most accurate point seen
    it = 0
    for it in range(max_iter + 1):
        rx = A.T @ y + G.T @ z + c * tau
        ry = -A @ x + b * tau
        rz = -G @ x + h * tau - s
        rt = -c @ x - b @ y - h @ z - kappa

        # absolute, so the returned x violates no constraint by more than about tol
        pres = max(np.max(np.abs(rz)), np.max(np.abs(ry)) if p else 0.0) / tau
        dres = np.linalg.norm(rx) / (1.0 + nc) / tau
        pcost = c @ x / tau
        dcost = -(b @ y + h @ z) / tau
        gap = s @ z / tau ** 2
        absgap = max(abs(pcost - dcost), gap)
        relgap = absgap / (1.0 + abs(pcost))
        if not all(np.isfinite((pres, dres, relgap))):
            break
        merit = max(pres / tol, dres / reltol, relgap / reltol)
        if best is None or merit < best[0]:
            best = (merit, (pres, dres, relgap), (x, y, z, s, tau, kappa))

        # gap target is absolute for small objectives, 0.1 * tol relative for large ones
        if pres <= tol and dres <= reltol and absgap <= tol * (1.0 + 0.1 * abs(pcost)):
            status = OPTIMAL
            break
        hz_by = h @ z + b @ y
        if hz_by < 0 and np.linalg.norm(A.T @ y + G.T @ z) <= tol * (-hz_by) * max(1.0, nc):
            status = INFEASIBLE
            break
        cx = c @ x
        if cx < 0 and max(np.linalg.norm(G @ x + s), np.linalg.norm(A @ x)) <= tol * (-cx) * max(1.0, nh):
            status = UNBOUNDED
            break
        if it == max_iter:
            break

        mu = (s @ z + tau * kappa) / (cones.degree + 1)
        with np.errstate(all="ignore"):
            scaling = _Scaling(cones, s, z)
        if not (np.all(np.isfinite(scaling.W)) and np.all(np.isfinite(scaling.Winv))):
            break
        lam = scaling.apply(z)
        try:
            kkt = _KKT(G, A, scaling)
        except (np.linalg.LinAlgError, ValueError):
            break
        u1x, u1y, u1z = kkt.solve(-c, b, h)
        lam_sq = cones.product(lam, lam)

        def direction(eta, ds, dkappa):
            u2x, u2y, u2z = kkt.solve(-eta * rx, eta * ry, eta * rz - scaling.apply(ds))
            num = -eta * rt + dkappa / tau + c @ u2x + b @ u2y + h @ u2z
            den = kappa / tau - c @ u1x - b @ u1y - h @ u1z
            dtau = num / den
            dx = u2x + dtau * u1x
            dy = u2y + dtau * u1y
            dz = u2z + dtau * u1z
            dsv = scaling.apply(ds - scaling.apply(dz))
            dkap = (dkappa - kappa * dtau) / tau
            return dx, dy, dz, dsv, dtau, dkap

        def step_to_boundary(dsv, dz, dtau, dkap):
            step = min(cones.max_step(s, dsv), cones.max_step(z, dz))
            if dtau < 0:
                step = min(step, -tau / dtau)
            if dkap < 0:
                step = min(step, -kappa / dkap)
            return step

        with np.errstate(all="ignore"):
            # predictor
            ds_aff = -lam
            dx, dy, dz, dsv, dtau, dkap = direction(1.0, ds_aff, -tau * kappa)
            alpha_aff = min(1.0, step_to_boundary(dsv, dz, dtau, dkap))
            sigma = min(1.0, max(0.0, (1.0 - alpha_aff) ** 3))

            # corrector
            ws = scaling.apply_inv(dsv)
            wz = scaling.apply(dz)
            target = sigma * mu * cones.e - lam_sq - cones.product(ws, wz)
            ds_cor = cones.divide(lam, target)
            dkappa = sigma * mu - tau * kappa - dtau * dkap
            dx, dy, dz, dsv, dtau, dkap = direction(1.0 - sigma, ds_cor, dkappa)
            alpha = min(1.0, _STEP_FRACTION * step_to_boundary(dsv, dz, dtau, dkap))
        if not np.isfinite(alpha) or alpha < 1e-12:
            break

        x = x + alpha * dx
        y = y + alpha * dy
        z = z + alpha * dz
        s = s + alpha * dsv
        tau = tau + alpha * dtau
        kappa = kappa + alpha * dkap
        if not (np.all(np.isfinite(x)) and np.isfinite(tau)):
            break
        if np.min(cones.margin(s)) <= 0 or np.min(cones.margin(z)) <= 0:
            break

    if status == ITERATION_LIMIT and best is not None:
        # numerical stall: fall back to the most accurate iterate; it counts as
        # optimal when it meets the (looser) contractual accuracy
        _, (pres, dres, relgap), (x, y, z, s, tau, kappa) = best
        if pres <= 10 * tol and dres <= 1e3 * tol and relgap <= 100 * tol:
            status = OPTIMAL
    best = best[1] if best is not None else (np.inf, np.inf, np.inf)

    if status == INFEASIBLE:
        scale = -(h @ z + b @ y)
        return ConicSolution(x=np.full(n, np.nan), objective_value=np.nan, status=status,
                             primal_residual=best[0], dual_residual=best[1], duality_gap=best[2],
                             iterations=it, s=None, z=z / scale, y=y / scale)
    if status == UNBOUNDED:
        scale = -(c @ x)
        return ConicSolution(x=x / scale, objective_value=-np.inf, status=status,
                             primal_residual=best[0], dual_residual=best[1], duality_gap=best[2],
                             iterations=it)
    return ConicSolution(x=x / tau, objective_value=c @ x / tau, status=status,
                         primal_residual=best[0], dual_residual=best[1], duality_gap=best[2],
                         iterations=it, s=s / tau, z=z / tau, y=y / tau)


def rescale(p, var_scale=None, normalize_rows=True, at=None):
    """Equivalent program in ``x_hat`` with ``x = var_scale * x_hat``.

    With ``normalize_rows`` every constraint is also divided by its largest
    coefficient, which leaves the feasible set unchanged but keeps the
    interior-point iterates well conditioned when the model mixes magnitudes.
    A reference point ``at`` (in the original variables) sets each quadratic
    constraint's lowering constant to the size of its quadratic term there.
    The objective is normalized too, so objective values of the rescaled
    program are not comparable with the original's.
    """
    D = np.ones(p.n) if var_scale is None else np.asarray(var_scale, dtype=float)
    if D.shape != (p.n,) or np.any(D <= 0):
        raise ValueError("var_scale must be a positive vector of length n")
    obj = p.objective * D
    if normalize_rows and np.any(obj):
        obj = obj / np.max(np.abs(obj))
    out = ConicProgram(p.n, obj)
    for con in p.constraints:
        if isinstance(con, LinearConstraint):
            a, b = con.a * D, con.b
            sc = max(np.max(np.abs(a)), abs(b)) if normalize_rows else 1.0
            sc = sc if sc > 0 else 1.0
            out.constraints.append(LinearConstraint(a / sc, b / sc, con.equality))
        elif isinstance(con, QuadraticConstraint):
            G, b, c = con.G * D, con.b * D, con.c
            sc = 1.0
            if normalize_rows:
                sc = max(np.max(np.sum(G * G, axis=0)) if G.size else 0.0, np.max(np.abs(b)), abs(c))
                sc = sc if sc > 0 else 1.0
            kappa = con.kappa
            if at is not None and G.size:
                kappa = float(np.clip(np.sum((con.G @ at) ** 2) / sc, 1e-8, 1e4))
            out.constraints.append(QuadraticConstraint(G / np.sqrt(sc), b / sc, c / sc, kappa))
        else:
            A, c = con.A * D, con.c * D
            sc = 1.0
            if normalize_rows:
                sc = max(np.max(np.abs(A)), np.max(np.abs(con.b)) if con.b.size else 0.0,
                         np.max(np.abs(c)), abs(con.d))
                sc = sc if sc > 0 else 1.0
            out.constraints.append(SocConstraint(A / sc, con.b / sc, c / sc, con.d / sc))
    return out


def solve_conic(p, tol=1e-9, max_iter=100):
    """Solve a :class:`ConicProgram`.

    The returned ``objective_value`` is in the program's own (maximization)
    sense.  An iteration cap yields status ``iteration-limit`` with the last
    iterate rather than raising.
    """
    if not isinstance(p, ConicProgram):
        raise ValueError("expected a ConicProgram")
    if tol <= 0:
        raise ValueError("tol must be positive")
    c, G, h, A, b, sizes = p.lower()
    if G.shape[0] == 0:
        raise ValueError("program has no inequality constraints")
    sol = solve_lowered(c, G, h, A, b, sizes, tol=tol, max_iter=max_iter)
    if sol.status == OPTIMAL or sol.status == ITERATION_LIMIT:
        sol.objective_value = float(p.objective @ sol.x)
    elif sol.status == UNBOUNDED:
        sol.objective_value = np.inf
    return sol


def dump_program(p):
    """Plain-text dump of a program for cross-checking with another solver.

    Format: a header ``n <n>``, an ``objective`` row, then one block per
    constraint beginning with its kind (``linear``, ``equality``,
    ``quadratic <rows>``, ``soc <rows>``) followed by whitespace-separated
    numeric rows.
    """
    fmt = lambda v: " ".join(f"{x:.17g}" for x in np.atleast_1d(v))
    lines = [f"n {p.n}", "objective", fmt(p.objective)]
    for con in p.constraints:
        if isinstance(con, LinearConstraint):
            lines += ["equality" if con.equality else "linear", fmt(con.a), fmt(con.b)]
        elif isinstance(con, QuadraticConstraint):
            lines += [f"quadratic {con.G.shape[0]}"] + [fmt(r) for r in con.G] + [fmt(con.b), fmt(con.c)]
        else:
            lines += [f"soc {con.A.shape[0]}"] + [fmt(r) for r in con.A] + [fmt(con.b), fmt(con.c), fmt(con.d)]
    return "\n".join(lines) + "\n"
