"""Independent reference computations used by the test suite.

Nothing here calls into the code paths it is used to check.
"""

import itertools

import numpy as np
import scipy.optimize

# C = {x : -x1/2 <= x2 <= x1/2}
EX65_A = np.array([[-0.5, -1.0], [-0.5, 1.0]])
EX65_B = np.zeros(2)


def ex65_inverse(y):
    """Closed-form F^{-1}(y) for F(x) = (x1, -x2) + N_C(x).

    Returns (region, {name: solution}).
    """
    y1, y2 = y
    z1 = np.array([4 / 3 * y1 + 2 / 3 * y2, 2 / 3 * y1 + 1 / 3 * y2])
    z2 = np.array([y1, -y2])
    z3 = np.array([4 / 3 * y1 - 2 / 3 * y2, -2 / 3 * y1 + 1 / 3 * y2])
    z4 = np.zeros(2)
    if -0.5 * y1 + y2 > 0 and 2 * y1 + y2 >= 0:
        return 1, {"z1": z1}
    if -0.5 * y1 + y2 <= 0 and -0.5 * y1 - y2 <= 0:
        return 2, {"z1": z1, "z2": z2, "z3": z3}
    if -0.5 * y1 - y2 > 0 and 2 * y1 - y2 >= 0:
        return 3, {"z3": z3}
    if 2 * y1 + y2 <= 0 and 2 * y1 - y2 <= 0:
        return 4, {"z4": z4}
    raise AssertionError(f"y = {y} is in no region")


def ex65_samples(per_region, rng, rmin=0.5, rmax=2.0):
    """Equal numbers of right-hand sides from each of the four regions."""
    counts = {1: 0, 2: 0, 3: 0, 4: 0}
    out = []
    while min(counts.values()) < per_region:
        th = rng.uniform(0, 2 * np.pi)
        y = rng.uniform(rmin, rmax) * np.array([np.cos(th), np.sin(th)])
        region, _ = ex65_inverse(y)
        if counts[region] < per_region:
            counts[region] += 1
            out.append(y)
    return out


def brute_force_projection(A, b, x):
    """Projection onto {Az <= b} by trying every active set.

    For each subset S of rows, solve the equality-constrained projection
    and keep the feasible candidate with nonnegative multipliers.
    """
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float)
    x = np.asarray(x, float)
    best = None
    for k in range(A.shape[0] + 1):
        for S in itertools.combinations(range(A.shape[0]), k):
            S = list(S)
            if S:
                AS = A[S]
                lam = np.linalg.lstsq(AS @ AS.T, AS @ x - b[S], rcond=None)[0]
                z = x - AS.T @ lam
                if np.any(lam < -1e-12):
                    continue
            else:
                z = x
            if np.all(A @ z <= b + 1e-10):
                d = np.linalg.norm(z - x)
                if best is None or d < best[0] - 1e-12:
                    best = (d, z)
    return best[1]


def brute_force_rays(A_ineq, A_eq=None):
    """Extreme rays of a pointed cone {A_ineq u <= 0, A_eq u = 0}.

    Every extreme ray is the one-dimensional solution set of n-1 linearly
    independent tight rows.
    """
    A_ineq = np.atleast_2d(np.asarray(A_ineq, float))
    n = A_ineq.shape[1]
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float)).reshape(-1, n)
    rays = []
    rows = list(range(A_ineq.shape[0]))
    for S in itertools.combinations(rows, max(n - 1 - A_eq.shape[0], 0)):
        M = np.vstack([A_eq, A_ineq[list(S)]])
        _, s, Vt = np.linalg.svd(M) if M.shape[0] else (None, np.zeros(0), np.eye(n))
        rank = int(np.sum(s > 1e-9))
        if rank != n - 1:
            continue
        d = Vt[-1]
        for r in (d, -d):
            if np.all(A_ineq @ r <= 1e-9) and np.all(np.abs(A_eq @ r) <= 1e-9):
                if all(np.linalg.norm(r - q) > 1e-7 for q in rays):
                    rays.append(r / np.linalg.norm(r))
    return rays


def in_conic_hull(u, generators, lineality):
    """LP test: u = sum c_i g_i + L w with c >= 0."""
    n = len(u)
    G = np.array(generators).reshape(-1, n).T
    Lb = np.asarray(lineality).reshape(n, -1)
    M = np.hstack([G, Lb, -Lb])
    if M.shape[1] == 0:
        return np.linalg.norm(u) <= 1e-9
    res = scipy.optimize.linprog(
        np.zeros(M.shape[1]), A_eq=M, b_eq=u, bounds=[(0, None)] * M.shape[1], method="highs"
    )
    return res.status == 0


def projector_2x2(v):
    v = np.asarray(v, float)
    return np.outer(v, v) / (v @ v)


def central_jacobian(f, x, h=1e-6):
    x = np.asarray(x, float)
    n = x.size
    J = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (f(x + e) - f(x - e)) / (2 * h)
    return J
