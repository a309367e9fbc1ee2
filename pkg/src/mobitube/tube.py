"""Tubular neighbourhood geometry: boundary chart, parallel/meridian lengths and
the pseudo-distance ``d*^2`` between boundary points.

Boundary points are addressed by ``(u, theta)`` with
``p(u, theta) = gamma(u) + r cos(theta) n(u) + r sin(theta) b(u)``.
For a circle in the ``z = 0`` plane, ``n`` points to the centre, so
``theta = 0`` is the inner equator of the torus.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .curve import TWO_PI, frame_at, max_curvature

# 16-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def wrap_angle(x):
    return np.mod(x, TWO_PI)


@dataclass(frozen=True)
class SurfaceCoord:
    """Boundary point ``(u, theta)``; both angles normalized to ``[0, 2 pi)``."""

    u: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "u", float(wrap_angle(self.u)))
        object.__setattr__(self, "theta", float(wrap_angle(self.theta)))

    def key(self):
        return (self.u, self.theta)


@dataclass(frozen=True)
class ProjectionLengths:
    l_hat: float
    l_t: float
    l_nb: float
    orientation: str


def find_roots(fun, a, b, n_samples=4096, floor=0.0):
    """Sign changes of ``fun`` on ``[a, b]`` refined by Brent's method.

    Samples with ``|fun| <= floor`` are treated as zero-noise and do not count
    as sign changes.
    """
    x = np.linspace(a, b, n_samples + 1)
    y = fun(x)
    sgn = np.where(np.abs(y) <= floor, 0.0, np.sign(y))
    roots = []
    last_i, last_s = None, 0.0
    for i, s in enumerate(sgn):
        if s == 0.0:
            continue
        if last_s != 0.0 and s != last_s:
            lo, hi = x[last_i], x[i]
            roots.append(brentq(lambda t: float(fun(np.array([t]))[0]), lo, hi, xtol=1e-15))
        last_i, last_s = i, s
    return np.array(sorted(roots))


class CumulativeIntegral:
    """``C(x) = int_0^x f`` on one period, piecewise Gauss-Legendre.

    Breakpoints are a uniform grid plus the supplied ``roots`` (kinks of
    ``f``), so every segment is smooth and the 16-point rule is near machine
    precision.  Queries cost one table lookup plus one partial segment.
    """

    def __init__(self, fun, period, roots=(), n_nodes=512):
        self.fun = fun
        self.period = float(period)
        nodes = np.linspace(0.0, self.period, n_nodes + 1)
        roots = np.asarray(roots, dtype=float)
        roots = roots[(roots > 0.0) & (roots < self.period)]
        self.breaks = np.unique(np.concatenate([nodes, roots]))
        a, b = self.breaks[:-1], self.breaks[1:]
        width = (b - a)[:, None]
        x = a[:, None] + width * _GL_X
        seg = (fun(x) * _GL_W).sum(axis=-1) * width[:, 0]
        self.table = np.concatenate([[0.0], np.cumsum(seg)])
        self.total = float(self.table[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.ravel()
        xr = np.mod(x, self.period)
        # exact period endpoint keeps its full value (open curves)
        xr = np.where((x == self.period), self.period, xr)
        idx = np.clip(np.searchsorted(self.breaks, xr, side="right") - 1, 0, len(self.breaks) - 2)
        a = self.breaks[idx]
        width = (xr - a)[:, None]
        part = (self.fun(a[:, None] + width * _GL_X) * _GL_W).sum(axis=-1) * width[:, 0]
        return (self.table[idx] + part).reshape(shape)


def sweep(c1, c2, total, u1, u2, orientation="forward"):
    """Increment of a cumulative quantity from ``u1`` to ``u2`` going forward
    (increasing parameter, wrapping once) or backward (the complement)."""
    fwd = np.where(u2 >= u1, c2 - c1, total - c1 + c2)
    fwd = np.clip(fwd, 0.0, total)
    if orientation == "forward":
        return fwd
    if orientation == "backward":
        return total - fwd
    raise ValueError(f"orientation must be 'forward' or 'backward', got {orientation!r}")


class Tube:
    """A curve with a tube radius.  Length tables are built lazily and cached."""

    def __init__(self, curve, r, n_nodes=512):
        if not r > 0:
            raise ValueError("tube radius must be positive")
        self.curve = curve
        self.r = float(r)
        self.period = float(curve.period)
        self.n_nodes = n_nodes
        self._kmax = None
        self._base = None
        self._lt_tables = {}
        self._lhat_tables = {}

    def __repr__(self):
        return f"Tube({self.curve!r}, r={self.r})"

    # -- pointwise geometry ---------------------------------------------------

    def _speed(self, u):
        return np.linalg.norm(self.curve.jet(u).d1, axis=-1)

    def _kappa_speed(self, u):
        fr = frame_at(self.curve, u)
        return fr.kappa * fr.speed

    def _abs_tau_speed(self, u):
        fr = frame_at(self.curve, u)
        return np.abs(fr.tau) * fr.speed

    @property
    def kappa_max(self):
        if self._kmax is None:
            self._kmax = max_curvature(self.curve)
        return self._kmax

    @property
    def locally_admissible(self):
        return self.r * self.kappa_max < 1.0

    def points(self, u, theta):
        """Boundary points for broadcastable arrays ``u``, ``theta``."""
        u, theta = np.broadcast_arrays(np.asarray(u, float), np.asarray(theta, float))
        fr = frame_at(self.curve, u)
        pos = self.curve.jet(u).position
        c = np.cos(theta)[..., None]
        s = np.sin(theta)[..., None]
        return pos + self.r * (c * fr.n + s * fr.b)

    # -- cumulative length tables --------------------------------------------

    def _build_base(self):
        u = np.linspace(0.0, self.period, 4097)
        fr = frame_at(self.curve, u)
        floor = 1e-10 * max(float(np.max(fr.kappa)), 1.0)
        if np.max(np.abs(fr.tau)) <= floor:
            tau_roots = np.array([])
        else:
            tau_roots = find_roots(lambda x: frame_at(self.curve, x).tau, 0.0, self.period, floor=floor)
        self._base = (
            CumulativeIntegral(self._speed, self.period, n_nodes=self.n_nodes),
            CumulativeIntegral(self._kappa_speed, self.period, n_nodes=self.n_nodes),
            CumulativeIntegral(self._abs_tau_speed, self.period, tau_roots, self.n_nodes),
        )

    @property
    def arclength(self):
        """Cumulative arclength ``S(u)``."""
        if self._base is None:
            self._build_base()
        return self._base[0]

    @property
    def kappa_integral(self):
        if self._base is None:
            self._build_base()
        return self._base[1]

    @property
    def torsion_integral(self):
        """Cumulative ``int |tau| ds``."""
        if self._base is None:
            self._build_base()
        return self._base[2]

    @property
    def length(self):
        return self.arclength.total

    def _lt_table(self, c):
        c = float(c)
        tab = self._lt_tables.get(c)
        if tab is None:
            r = self.r

            def f(x):
                fr = frame_at(self.curve, x)
                return np.abs(1.0 - r * c * fr.kappa) * fr.speed

            roots = find_roots(lambda x: 1.0 - r * c * frame_at(self.curve, x).kappa, 0.0, self.period)
            tab = CumulativeIntegral(f, self.period, roots, self.n_nodes)
            self._lt_tables[c] = tab
        return tab

    def cumulative_lt(self, c, u):
        """``int_0^u |1 - r c kappa| ds`` for broadcastable cosine values ``c``.

        Returns ``(values, totals)``.
        """
        c, u = np.broadcast_arrays(np.asarray(c, float), np.asarray(u, float))
        if self.locally_admissible:
            vals = self.arclength(u) - self.r * c * self.kappa_integral(u)
            tot = self.arclength.total - self.r * c * self.kappa_integral.total
            return vals, tot
        vals = np.empty(c.shape)
        tot = np.empty(c.shape)
        for cv in np.unique(c):
            m = c == cv
            tab = self._lt_table(cv)
            vals[m] = tab(u[m])
            tot[m] = tab.total
        return vals, tot

    def lhat_table(self, theta):
        """Cumulative full parallel length at meridian angle ``theta``."""
        key = float(wrap_angle(theta))
        tab = self._lhat_tables.get(key)
        if tab is None:
            r, c = self.r, np.cos(key)

            def f(x):
                fr = frame_at(self.curve, x)
                return np.sqrt((1.0 - r * c * fr.kappa) ** 2 + (r * fr.tau) ** 2) * fr.speed

            tab = CumulativeIntegral(f, self.period, n_nodes=self.n_nodes)
            self._lhat_tables[key] = tab
        return tab


# ---------------------------------------------------------------- operations

def boundary_point(tube, c):
    return tube.points(c.u, c.theta)


def jacobian_det(tube, rho, u, theta):
    """Volume element ``rho (1 - rho kappa cos theta)`` of the tube chart, per unit speed."""
    kappa = frame_at(tube.curve, np.asarray(u, float)).kappa
    return rho * (1.0 - rho * kappa * np.cos(theta))


def meridian_distance(theta, phi, r):
    d = np.mod(np.abs(np.asarray(theta, float) - np.asarray(phi, float)), TWO_PI)
    return r * np.minimum(d, TWO_PI - d)


def parallel_lengths(tube, theta, u1, u2, orientation="forward"):
    c = np.cos(theta)
    lt1, ltot = tube.cumulative_lt(c, u1)
    lt2, _ = tube.cumulative_lt(c, u2)
    l_t = sweep(lt1, lt2, ltot, u1, u2, orientation)
    T = tube.torsion_integral
    l_nb = tube.r * sweep(T(u1), T(u2), T.total, u1, u2, orientation)
    H = tube.lhat_table(theta)
    l_hat = sweep(H(u1), H(u2), H.total, u1, u2, orientation)
    return ProjectionLengths(float(l_hat), float(l_t), float(l_nb), orientation)


def minimal_parallel_distance(tube, theta, u1, u2):
    H = tube.lhat_table(theta)
    fwd = sweep(H(u1), H(u2), H.total, u1, u2, "forward")
    return float(min(fwd, H.total - fwd))


def dstar_squared_arrays(tube, u1, th1, u2, th2):
    """Vectorized ``d*^2`` over broadcastable coordinate arrays.

    Both sweep directions around the curve are evaluated and the smaller
    value kept.
    """
    u1, th1, u2, th2 = np.broadcast_arrays(*(np.asarray(a, float) for a in (u1, th1, u2, th2)))
    if tube.period == TWO_PI:
        u1, u2 = wrap_angle(u1), wrap_angle(u2)
    r = tube.r
    lm = meridian_distance(th1, th2, r)
    uu = np.stack([u1, u2])
    T = tube.torsion_integral
    Tu = T(uu)
    nb_f = r * sweep(Tu[0], Tu[1], T.total, u1, u2)
    nb_b = r * T.total - nb_f
    ct, cp = np.cos(th1), np.cos(th2)
    if tube.locally_admissible:
        S, K = tube.arclength, tube.kappa_integral
        Su, Ku = S(uu), K(uu)
        ds = sweep(Su[0], Su[1], S.total, u1, u2)
        dk = sweep(Ku[0], Ku[1], K.total, u1, u2)
        lt_f, lp_f = ds - r * ct * dk, ds - r * cp * dk
        atot, btot = S.total - r * ct * K.total, S.total - r * cp * K.total
    else:
        a, atot = tube.cumulative_lt(ct, uu)
        b, btot = tube.cumulative_lt(cp, uu)
        atot, btot = atot[0], btot[0]
        lt_f = sweep(a[0], a[1], atot, u1, u2)
        lp_f = sweep(b[0], b[1], btot, u1, u2)
    fwd = (lm + nb_f) ** 2 + lt_f * lp_f
    bwd = (lm + nb_b) ** 2 + (atot - lt_f) * (btot - lp_f)
    return np.minimum(fwd, bwd)


def dstar_squared(tube, X, Y):
    """``d*^2`` between two boundary points; exactly symmetric in ``X``, ``Y``."""
    if Y.key() < X.key():
        X, Y = Y, X
    return float(dstar_squared_arrays(tube, X.u, X.theta, Y.u, Y.theta))


def chord_squared_arrays(tube, u1, th1, u2, th2):
    d = tube.points(u1, th1) - tube.points(u2, th2)
    return np.einsum("...i,...i->...", d, d)
