"""Self-contact, interpenetration and local admissibility of a tube.

Contact search only considers *far* pairs, ``d*^2 >= tol_far``; near the
diagonal the chord vanishes trivially.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .curve import TWO_PI, frame_at
from .tube import SurfaceCoord, chord_squared_arrays, dstar_squared_arrays, jacobian_det

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)

CLEAR = "clear"
SELF_CONTACT = "self_contact"
INTERPENETRATION = "interpenetration_suspected"
INADMISSIBLE = "locally_inadmissible"


def tol_far(r):
    return (0.1 * r) ** 2


def tol_contact(r):
    return 1e-3 * r


def _grid_shape(n_seed):
    nt = max(int(round(np.sqrt(n_seed / 2.0))), 4)
    return 2 * nt, nt


def far_scan(tube, nu, nt):
    """Closest far partner of every node of a ``nu x nt`` boundary grid.

    Returns ``(u, theta, best_chord2, best_ratio, partners)`` where the ratio
    is ``|X-Y|^2 / d*^2`` and ``partners[i, j]`` holds the node indices of the
    closest partner and of the smallest-ratio partner.
    """
    u = np.arange(nu) * (TWO_PI / nu)
    th = np.arange(nt) * (TWO_PI / nt)
    P = tube.points(u[:, None], th[None, :])
    La, LaT = tube.cumulative_lt(np.cos(th)[:, None], u[None, :])
    T = tube.torsion_integral
    best, ratio, part = kernels.far_pair_scan(P, th, u, np.ascontiguousarray(La),
                                              np.ascontiguousarray(LaT[:, 0]), T(u), T.total,
                                              tube.r, tol_far(tube.r))
    return u, th, best, ratio, part


def _objective(tube, X, far):
    """Chord squared of each row ``(u1, theta1, u2, theta2)``; ``inf`` where
    the pair is too close in ``d*^2``."""
    args = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    d2 = dstar_squared_arrays(tube, *args)
    c2 = chord_squared_arrays(tube, *args)
    return np.where(d2 < far, np.inf, c2)


def _golden(f, lo, hi, iters):
    """Vectorized golden-section search: one independent bracket per row."""
    a, b = lo.copy(), hi.copy()
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        keep = np.where(left, c, d)
        fkeep = np.where(left, fc, fd)
        new = np.where(left, b - GOLDEN * (b - a), a + GOLDEN * (b - a))
        fnew = f(new)
        c, fc = np.where(left, new, keep), np.where(left, fnew, fkeep)
        d, fd = np.where(left, keep, new), np.where(left, fkeep, fnew)
    better = fc <= fd
    return np.where(better, c, d), np.where(better, fc, fd)


def coordinate_descent(tube, X0, step, sweeps=12, iters=24):
    """Cyclic golden-section descent on ``(u1, theta1, u2, theta2)``.

    ``X0`` holds one start per row; all starts advance together.  Infeasible
    points (too close in ``d*^2``) count as infinitely far, so the search
    never slides onto the diagonal.
    """
    far = tol_far(tube.r)
    X = np.array(X0, dtype=float).reshape(-1, 4)
    fx = _objective(tube, X, far)
    step = np.broadcast_to(np.asarray(step, dtype=float), X.shape).copy()
    for _ in range(sweeps):
        f_start = fx.copy()
        for i in range(4):
            def f(t, i=i):
                Y = X.copy()
                Y[:, i] = t
                return _objective(tube, Y, far)

            t, ft = _golden(f, X[:, i] - step[:, i], X[:, i] + step[:, i], iters)
            improve = ft < fx
            X[improve, i] = t[improve]
            fx = np.where(improve, ft, fx)
        step *= 0.5
        if np.all(f_start - fx <= 1e-16 * np.maximum(fx, 1e-300)):
            break
    return X, fx


def strand_candidates(tube, n_center=1024, limit=8):
    """Pairs of centerline points that are far apart along the curve but
    locally closest in space, with the boundary coordinates facing each other."""
    S = tube.arclength
    v = np.arange(n_center) * (TWO_PI / n_center)
    G = tube.curve.jet(v).position
    s = S(v)
    D = np.linalg.norm(G[:, None, :] - G[None, :, :], axis=-1)
    gap = np.abs(s[:, None] - s[None, :])
    gap = np.minimum(gap, S.total - gap)
    D = np.where(gap > np.pi * tube.r, D, np.inf)
    local = np.isfinite(D) & (D < 4.0 * tube.r)
    for di in (-1, 0, 1):
        for dk in (-1, 0, 1):
            if di or dk:
                local &= D <= np.roll(np.roll(D, di, axis=0), dk, axis=1)
    i, k = np.nonzero(np.triu(local, 1))
    order = np.argsort(D[i, k], kind="stable")[:limit]
    i, k = i[order], k[order]
    if len(i) == 0:
        return np.empty((0, 4))
    e = G[k] - G[i]
    fi, fk = frame_at(tube.curve, v[i]), frame_at(tube.curve, v[k])
    th_i = np.arctan2(np.einsum("ij,ij->i", e, fi.b), np.einsum("ij,ij->i", e, fi.n))
    th_k = np.arctan2(np.einsum("ij,ij->i", -e, fk.b), np.einsum("ij,ij->i", -e, fk.n))
    return np.stack([v[i], th_i, v[k], th_k], axis=1)


def min_separation(tube, n_seed=2048, n_starts=6):
    """Smallest chord between far boundary pairs and its witness pair.

    Every far pair has a chord of roughly ``0.1 r`` at the edge of the
    excluded neighbourhood, so that value is a floor for smooth tubes.  Descent
    starts come from the closest grid pairs, the grid pairs with the smallest
    ``|X-Y|^2 / d*^2``, and centerline strands approaching within ``4 r``.
    """
    if n_seed < 100:
        raise ValueError("n_seed must be at least 100")
    nu, nt = _grid_shape(n_seed)
    u, th, best, ratio, part = far_scan(tube, nu, nt)
    starts, f0 = [], []
    for score, col in ((best, 0), (ratio, 2)):
        for flat in np.argsort(score, axis=None, kind="stable")[:n_starts]:
            i, j = np.unravel_index(flat, score.shape)
            if np.isfinite(score[i, j]):
                k, l = part[i, j, col], part[i, j, col + 1]
                starts.append((u[i], th[j], u[k], th[l]))
    if not starts:
        return np.inf, None
    starts = np.vstack([np.array(starts), strand_candidates(tube)])
    scan_f = _objective(tube, starts, tol_far(tube.r))
    step = np.array([TWO_PI / nu, TWO_PI / nt, TWO_PI / nu, TWO_PI / nt])
    X, fx = coordinate_descent(tube, starts, step)
    worse = scan_f < fx
    X[worse], fx[worse] = starts[worse], scan_f[worse]
    m = int(np.argmin(fx))
    if not np.isfinite(fx[m]):
        return np.inf, None
    x = X[m]
    pair = (SurfaceCoord(x[0], x[1]), SurfaceCoord(x[2], x[3]))
    return float(np.sqrt(fx[m])), pair


def penetration_depth(tube, nu=128, nt=32, n_center=1024):
    """How far the boundary reaches into the tube around a distant strand.

    Positive values mean some boundary point lies closer than ``r`` to a part
    of the centerline more than ``pi r`` away in arclength.
    """
    S = tube.arclength
    u = np.arange(nu) * (TWO_PI / nu)
    th = np.arange(nt) * (TWO_PI / nt)
    P = tube.points(u[:, None], th[None, :]).reshape(-1, 3)
    su = np.repeat(S(u), nt)
    v = np.arange(n_center) * (TWO_PI / n_center)
    G = tube.curve.jet(v).position
    gap = np.abs(su[:, None] - S(v)[None, :])
    gap = np.minimum(gap, S.total - gap)
    d = np.linalg.norm(P[:, None, :] - G[None, :, :], axis=-1)
    d = np.where(gap > np.pi * tube.r, d, np.inf)
    return float(tube.r - d.min())


def jacobian_sample(tube, n_rho=8, nu=256, nt=32):
    """Fraction of interior chart samples with negative volume element."""
    rho = tube.r * np.arange(1, n_rho + 1) / n_rho
    u = np.arange(nu) * (TWO_PI / nu)
    th = np.arange(nt) * (TWO_PI / nt)
    kappa = frame_at(tube.curve, u).kappa
    J = rho[:, None, None] * (1.0 - rho[:, None, None] * kappa[None, :, None] * np.cos(th)[None, None, :])
    return float(np.mean(J < 0.0))


@dataclass(frozen=True)
class ContactReport:
    r: float
    kappa_max: float
    locally_admissible: bool
    min_chord: float
    witness: tuple
    dstar_at_witness: float
    negative_jacobian_fraction: float
    penetration_depth: float
    classification: str

    def as_dict(self):
        w = self.witness
        return {
            "classification": self.classification,
            "locally_admissible": self.locally_admissible,
            "r": self.r,
            "kappa_max": self.kappa_max,
            "r_kappa_max": self.r * self.kappa_max,
            "min_chord": self.min_chord,
            "witness_u1": w[0].u if w else None,
            "witness_theta1": w[0].theta if w else None,
            "witness_u2": w[1].u if w else None,
            "witness_theta2": w[1].theta if w else None,
            "dstar_at_witness": self.dstar_at_witness,
            "negative_jacobian_fraction": self.negative_jacobian_fraction,
            "penetration_depth": self.penetration_depth,
        }


def admissibility_report(tube, n_seed=2048):
    r = tube.r
    kmax = tube.kappa_max
    admissible = r * kmax < 1.0
    neg = jacobian_sample(tube)
    depth = penetration_depth(tube)
    if not admissible:
        # the boundary chart folds over itself; far-pair search is meaningless
        return ContactReport(r, kmax, False, np.nan, None, np.nan, neg, depth, INADMISSIBLE)
    dmin, pair = min_separation(tube, n_seed)
    dstar_w = np.nan
    if pair is not None:
        X, Y = pair
        dstar_w = float(dstar_squared_arrays(tube, X.u, X.theta, Y.u, Y.theta))
    touching = dmin <= tol_contact(r)
    if touching and depth > tol_contact(r) and min_separation(tube, 4 * n_seed)[0] <= tol_contact(r):
        cls = INTERPENETRATION
    elif touching:
        cls = SELF_CONTACT
    else:
        cls = CLEAR
    return ContactReport(r, kmax, admissible, dmin, pair, dstar_w, neg, depth, cls)


__all__ = [
    "ContactReport", "admissibility_report", "coordinate_descent", "far_scan",
    "jacobian_det", "jacobian_sample", "min_separation", "penetration_depth",
]
