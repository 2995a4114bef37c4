"""Independent reference computations used by the tests.

Nothing here imports the solver internals; each function recomputes its
quantity from first principles so a shared bug cannot hide.
"""

import itertools
import math

import numpy as np

from ldmcast.conic import ConicProgram


def direct_sinrs(H_list, W, B, m, selected, sigma2):
    """Per-device SINRs by explicit loops over devices and streams."""
    K = len(H_list)
    mc, uc = [], []
    for k in range(K):
        w = np.asarray(W[k]).reshape(-1)
        H = np.asarray(H_list[k])
        noise = sigma2 * sum(abs(x) ** 2 for x in w)
        interf = 0.0
        for b in B:
            interf += abs(np.conj(w) @ H @ b) ** 2
        if m is not None:
            mc.append(abs(np.conj(w) @ H @ m) ** 2 / (interf + noise))
        if k in selected:
            own = abs(np.conj(w) @ H @ B[list(selected).index(k)]) ** 2
            uc.append(own / (interf - own + noise))
    return (np.array(mc) if m is not None else None), np.array(uc)


def unit_directions_c2(n_theta, n_phi):
    """Grid of unit vectors in C^2 up to a global phase: (cos t, e^{jp} sin t)."""
    t = np.linspace(0.0, np.pi / 2, n_theta)
    p = np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False)
    T, Pp = np.meshgrid(t, p, indexing="ij")
    return np.stack([np.cos(T).ravel(), (np.exp(1j * Pp) * np.sin(T)).ravel()], axis=1)


def grid_single_device(g, noise, p_tx, gamma, n_theta=61, n_phi=96, n_split=4001):
    """Best unicast SINR for one dual-layer device with ``N_tx = 2``.

    Dense grid over the power split and over both beam directions.  The
    multicast beam only enters the QoS constraint, where its gain is
    monotone, so the best multicast direction on the grid is used for every
    (split, unicast direction) pair.
    """
    D = unit_directions_c2(n_theta, n_phi)
    gain = np.abs(D @ np.conj(g)) ** 2            # |g^H u|^2 for every grid direction
    best_mc = gain.max()
    f = np.linspace(0.0, 1.0, n_split)[:, None]   # unicast share of the budget
    snr_u = f * p_tx * gain[None, :] / noise
    ok = (1 - f) * p_tx * best_mc >= gamma * (f * p_tx * gain[None, :] + noise)
    return float(np.max(np.where(ok, snr_u, -np.inf)))


def grid_two_devices(g0, g1, n0, n1, p_tx, gamma, n_theta=41, n_phi=64):
    """Best unicast SINR of device 0 when device 1 only needs the multicast layer.

    Grid over both beam directions; for each pair the largest feasible
    unicast share follows from the two linear QoS inequalities.
    """
    D = unit_directions_c2(n_theta, n_phi)
    cb0 = np.abs(D @ np.conj(g0)) ** 2
    cb1 = np.abs(D @ np.conj(g1)) ** 2
    cm0 = np.abs(D @ np.conj(g0)) ** 2
    cm1 = np.abs(D @ np.conj(g1)) ** 2
    best = -np.inf
    for i in range(D.shape[0]):
        # (1-f) P cm_k >= gamma (f P cb_k + n_k)  <=>  f <= (P cm_k - gamma n_k) / (P cm_k + gamma P cb_k)
        f0 = (p_tx * cm0 - gamma * n0) / (p_tx * cm0 + gamma * p_tx * cb0[i])
        f1 = (p_tx * cm1 - gamma * n1) / (p_tx * cm1 + gamma * p_tx * cb1[i])
        f = np.minimum(np.minimum(f0, f1), 1.0)
        f = np.where(f >= 0, f, np.nan)
        val = np.nanmax(f * p_tx * cb0[i] / n0) if np.any(~np.isnan(f)) else -np.inf
        best = max(best, val)
    return float(best)


def synthesized_socp(rng, n=None):
    """Random SOCP with a known optimum built from chosen KKT conditions.

    Draw ``x*``, then for each cone a primal slack ``s`` and dual ``z`` that
    are complementary (both on the boundary and opposite, or one of them
    zero).  Setting ``h = G x* + s`` and ``c = -G^T z`` makes ``(x*, s, z)``
    a KKT point, so ``c @ x*`` is the optimal value of ``min c @ x``.
    Returns ``(program, x_star, optimal_value_of_the_maximization)``.
    """
    n = int(rng.integers(2, 12)) if n is None else n
    x_star = rng.normal(size=n)
    prog = ConicProgram(n)
    c = np.zeros(n)
    blocks = []
    active = 0
    while active < n or len(blocks) < 3:
        dim = int(rng.choice([1, 1, 2, 3, 4, 5]))
        G = rng.normal(size=(dim, n))
        mode = rng.choice(["active", "active", "slack"])
        if dim == 1:
            if mode == "active":
                s, z = np.zeros(1), rng.uniform(0.5, 2.0, size=1)
                active += 1
            else:
                s, z = rng.uniform(0.5, 2.0, size=1), np.zeros(1)
        else:
            u = rng.normal(size=dim - 1)
            u /= np.linalg.norm(u)
            if mode == "active":
                t, lam = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
                s = np.concatenate([[t], t * u])
                z = lam * np.concatenate([[1.0], -u])
                active += dim - 1
            else:
                s = np.concatenate([[rng.uniform(1.0, 3.0)], 0.5 * rng.uniform(0, 1) * u])
                z = np.zeros(dim)
        h = G @ x_star + s
        c -= G.T @ z
        blocks.append((G, h))
    for G, h in blocks:
        if G.shape[0] == 1:
            prog.add_linear(G[0], h[0])
        else:
            prog.add_soc(-G[1:], h[1:], -G[0], h[0])
    prog.objective = -c
    return prog, x_star, float(-c @ x_star)


def brute_schedule_value(theta, k_prime):
    return min(math.fsum(theta[j, l] for j, l in itertools.combinations(s, 2))
               for s in itertools.combinations(range(theta.shape[0]), k_prime))


def pawn_loop(A, B):
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    total = 0.0
    for a in A:
        for b in B:
            total += abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))
    return total / (A.shape[0] * B.shape[0])
