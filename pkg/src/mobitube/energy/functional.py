"""The tube energy ``F = int int (|X-Y|^-alpha - d*^-alpha) dS dS``.

The measure is the coordinate measure ``|g'(u)| |g'(v)| du dtheta dv dphi``
by default; ``measure="area"`` multiplies in the physical surface element
``r (1 - r kappa cos theta)`` on both sides.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..curve import TWO_PI, frame_at
from ..errors import SelfContactSingular
from ..tube import SurfaceCoord, chord_squared_arrays, dstar_squared_arrays
from .taylor import taylor_terms

FLAG_CAPACITY = 1 << 16
N_ZERO_DIRECTIONS = 16


@dataclass(frozen=True)
class EnergyParams:
    alpha: float = 2.0
    grid: tuple = (32, 32)
    eps_d: float = None  # default 1e-8 r^2
    refinement_levels: int = 2
    measure: str = "coordinate"

    def __post_init__(self):
        ns, nt = (int(g) for g in self.grid)
        object.__setattr__(self, "grid", (ns, nt))
        if ns < 4 or nt < 4 or ns % 2 or nt % 2:
            raise ValueError(f"grid sizes must be even and >= 4, got {self.grid}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.eps_d is not None and not self.eps_d > 0:
            raise ValueError("eps_d must be positive")
        if self.refinement_levels < 2:
            raise ValueError("refinement_levels must be at least 2")
        if self.measure not in ("coordinate", "area"):
            raise ValueError("measure must be 'coordinate' or 'area'")

    def diagonal_threshold(self, r):
        return 1e-8 * r * r if self.eps_d is None else self.eps_d


@dataclass(frozen=True)
class EnergyResult:
    value: float
    error_estimate: float
    locally_inadmissible: bool
    near_contact: bool
    min_far_chord: float
    levels: tuple = field(default=())
    n_regularized: int = 0


def _wrap_signed(x, period):
    x = np.mod(x, period)
    return np.where(x > 0.5 * period, x - period, x)


def chord_squared(tube, X, Y):
    return float(chord_squared_arrays(tube, X.u, X.theta, Y.u, Y.theta))


def offsets(tube, X, Y):
    """Signed arclength offset and wrapped angle offset from ``X`` to ``Y``."""
    S = tube.arclength
    eta1 = float(_wrap_signed(S(Y.u) - S(X.u), S.total))
    eta2 = float(_wrap_signed(Y.theta - X.theta, TWO_PI))
    return eta1, eta2


def _regularized(tube, X, eta1, eta2, alpha):
    if eta1 == 0.0 and eta2 == 0.0:
        if alpha > 2.0:
            return math.inf
        if alpha < 2.0:
            return 0.0
        # direction-dependent limit: average over a fan of directions
        vals = []
        for psi in np.arange(N_ZERO_DIRECTIONS) * (TWO_PI / N_ZERO_DIRECTIONS):
            t = taylor_terms(tube, X.u, X.theta, math.cos(psi), math.sin(psi))
            vals.append((t.B4 - t.A4) / t.A2**2)
        return math.fsum(vals) / N_ZERO_DIRECTIONS
    t = taylor_terms(tube, X.u, X.theta, eta1, eta2)
    if alpha == 2.0:
        return (t.B4 - t.A4) / t.A2**2
    return 0.5 * alpha * (t.B4 - t.A4) / t.A2 ** (0.5 * alpha + 1.0)


def integrand(tube, X, Y, alpha=2.0, eps_d=None):
    """``|X-Y|^-alpha - (d*^2)^(-alpha/2)`` with a polynomial fallback near the diagonal."""
    if Y.key() < X.key():
        X, Y = Y, X
    r = tube.r
    eps_d = 1e-8 * r * r if eps_d is None else eps_d
    eta1, eta2 = offsets(tube, X, Y)
    fr = frame_at(tube.curve, np.array([X.u]))
    kappa, tau = float(fr.kappa[0]), float(fr.tau[0])
    a2 = eta1**2 * (1.0 - r * kappa * math.cos(X.theta)) ** 2 + r * r * (eta2 + eta1 * tau) ** 2
    if a2 < eps_d:
        return _regularized(tube, X, eta1, eta2, alpha)
    c2 = chord_squared(tube, X, Y)
    d2 = float(dstar_squared_arrays(tube, X.u, X.theta, Y.u, Y.theta))
    if c2 < kernels.SINGULAR_CHORD2 and d2 > kernels.SINGULAR_DSTAR2:
        raise SelfContactSingular((X, Y), c2, d2)
    if alpha == 2.0:
        return 1.0 / c2 - 1.0 / d2
    return c2 ** (-0.5 * alpha) - d2 ** (-0.5 * alpha)


def grid_nodes(n):
    """Shifted and unshifted periodic midpoint nodes; they never coincide."""
    h = TWO_PI / n
    return (np.arange(n) + 0.5) * h, np.arange(n) * h


def _energy_on_grid(tube, ns, nt, alpha, eps_d, measure):
    r = tube.r
    uX, uY = grid_nodes(ns)
    thX, thY = grid_nodes(nt)
    h, g = TWO_PI / ns, TWO_PI / nt

    frX = frame_at(tube.curve, uX)
    frY = frame_at(tube.curve, uY)
    PX = tube.points(uX[:, None], thX[None, :])
    PY = tube.points(uY[:, None], thY[None, :])
    wX = h * g * np.repeat(frX.speed[:, None], nt, axis=1)
    wY = h * g * np.repeat(frY.speed[:, None], nt, axis=1)
    if measure == "area":
        wX = wX * r * (1.0 - r * frX.kappa[:, None] * np.cos(thX)[None, :])
        wY = wY * r * (1.0 - r * frY.kappa[:, None] * np.cos(thY)[None, :])

    cX = np.cos(thX)[:, None]
    cY = np.cos(thY)[:, None]
    LaU, LaT = tube.cumulative_lt(cX, uX[None, :])
    LaV, _ = tube.cumulative_lt(cX, uY[None, :])
    LbU, LbT = tube.cumulative_lt(cY, uX[None, :])
    LbV, _ = tube.cumulative_lt(cY, uY[None, :])
    T, S = tube.torsion_integral, tube.arclength
    flags = np.zeros((FLAG_CAPACITY, 4), dtype=np.int64)

    rows, nflag, minfar2, sing = kernels.energy_rows(
        PX, PY, wX, wY, thX, thY,
        np.ascontiguousarray(LaU), np.ascontiguousarray(LaV), np.ascontiguousarray(LaT[:, 0]),
        np.ascontiguousarray(LbU), np.ascontiguousarray(LbV), np.ascontiguousarray(LbT[:, 0]),
        T(uX), T(uY), T.total, S(uX), S(uY), S.total, uX, uY, frX.kappa, frX.tau,
        r, float(alpha), float(eps_d), (0.1 * r) ** 2, flags,
    )
    if sing[0] >= 0:
        i, j, k, l = (int(x) for x in sing)
        X, Y = SurfaceCoord(uX[i], thX[j]), SurfaceCoord(uY[k], thY[l])
        raise SelfContactSingular((X, Y), chord_squared(tube, X, Y),
                                  float(dstar_squared_arrays(tube, X.u, X.theta, Y.u, Y.theta)))
    if nflag > FLAG_CAPACITY:
        raise RuntimeError(f"{nflag} near-diagonal samples exceed capacity; raise eps_d resolution")
    parts = list(rows)
    for i, j, k, l in flags[:nflag]:
        X, Y = SurfaceCoord(uX[i], thX[j]), SurfaceCoord(uY[k], thY[l])
        parts.append(wX[i, j] * wY[k, l] * integrand(tube, X, Y, alpha, eps_d))
    return math.fsum(parts), int(nflag), math.sqrt(minfar2)


def energy(tube, params=None):
    """Tensor-product midpoint quadrature with a grid-halving error estimate."""
    params = params or EnergyParams()
    ns, nt = params.grid
    eps_d = params.diagonal_threshold(tube.r)
    levels = []
    first = None
    for lev in range(params.refinement_levels):
        fs, ft = ns >> lev, nt >> lev
        if fs < 2 or ft < 2:
            break
        value, nreg, minfar = _energy_on_grid(tube, fs, ft, params.alpha, eps_d, params.measure)
        levels.append(((fs, ft), value))
        if first is None:
            first = (value, nreg, minfar)
    value, nreg, minfar = first
    err = abs(levels[0][1] - levels[1][1]) if len(levels) > 1 else math.inf
    return EnergyResult(
        value=value,
        error_estimate=err,
        locally_inadmissible=not tube.locally_admissible,
        near_contact=minfar < 1e-3 * tube.r,
        min_far_chord=minfar,
        levels=tuple(levels),
        n_regularized=nreg,
    )
