"""Closed space curves as truncated Fourier series and their Frenet apparatus.

Curves are parametrized on ``[0, period)``; for :class:`ClosedCurve` the period
is ``2*pi`` and the parameter is *not* arclength, so every arclength integral in
the package carries the speed factor ``|gamma'(u)|``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ClosureViolation, DegenerateFrame

TWO_PI = 2.0 * np.pi

#: curvature below which the Frenet frame is treated as undefined
EPS_KAPPA = 1e-8

MAX_DEGREE = 24


@dataclass(frozen=True)
class CurveJet:
    """Position and first three parameter derivatives, each of shape ``(..., 3)``."""

    position: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


@dataclass(frozen=True)
class FrenetData:
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    speed: np.ndarray


class ClosedCurve:
    """Periodic curve ``gamma_i(u) = sum_k a_ik cos(k u) + b_ik sin(k u)``.

    Parameters
    ----------
    cos, sin : array_like, shape (3, N+1)
        Cosine and sine coefficients per coordinate; column ``k`` multiplies
        ``cos(k u)`` / ``sin(k u)``.  ``sin[:, 0]`` is ignored.
    validate : bool
        Check regularity and nonvanishing curvature on a sample grid.
    """

    period = TWO_PI

    def __init__(self, cos, sin, validate=True, name=None):
        cos = np.array(cos, dtype=float)
        sin = np.array(sin, dtype=float)
        if cos.ndim != 2 or cos.shape[0] != 3 or cos.shape != sin.shape:
            raise ValueError("coefficient arrays must both have shape (3, N+1)")
        if cos.shape[1] < 2:
            raise ValueError("degree must be at least 1")
        if cos.shape[1] - 1 > MAX_DEGREE:
            raise ValueError(f"degree {cos.shape[1] - 1} exceeds {MAX_DEGREE}")
        sin[:, 0] = 0.0
        cos.setflags(write=False)
        sin.setflags(write=False)
        self.cos = cos
        self.sin = sin
        self.name = name
        self._k = np.arange(cos.shape[1], dtype=float)
        if validate:
            self._validate()

    @property
    def degree(self):
        return self.cos.shape[1] - 1

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<ClosedCurve{label} degree={self.degree}>"

    def _validate(self, n=1024):
        u = np.linspace(0.0, TWO_PI, n, endpoint=False)
        jet = self.jet(u)
        speed = np.linalg.norm(jet.d1, axis=-1)
        if np.min(speed) <= 0.0:
            raise DegenerateFrame("curve is not regular (zero speed)")
        cross = np.linalg.norm(np.cross(jet.d1, jet.d2), axis=-1)
        if np.min(cross / speed**3) <= EPS_KAPPA:
            raise DegenerateFrame("curvature vanishes on the sample grid")

    def derivative(self, u, order):
        """Exact ``order``-th parameter derivative, shape ``u.shape + (3,)``."""
        u = np.asarray(u, dtype=float)
        ku = np.multiply.outer(u, self._k)
        shift = order * np.pi / 2.0
        kp = self._k**order
        c = np.cos(ku + shift) * kp
        s = np.sin(ku + shift) * kp
        return c @ self.cos.T + s @ self.sin.T

    def jet(self, u):
        u = np.asarray(u, dtype=float)
        ku = np.multiply.outer(u, self._k)
        c, s = np.cos(ku), np.sin(ku)
        k = self._k
        ca, sb = c @ self.cos.T, s @ self.sin.T
        sa, cb = (s * k) @ self.cos.T, (c * k) @ self.sin.T
        k2 = k * k
        ca2, sb2 = (c * k2) @ self.cos.T, (s * k2) @ self.sin.T
        k3 = k2 * k
        sa3, cb3 = (s * k3) @ self.cos.T, (c * k3) @ self.sin.T
        return CurveJet(ca + sb, cb - sa, -(ca2 + sb2), sa3 - cb3)

    def __call__(self, u):
        return self.derivative(u, 0)

    def transformed(self, rotation, translation=(0.0, 0.0, 0.0)):
        """Rigidly moved copy: ``Q gamma + c``."""
        q = np.asarray(rotation, dtype=float)
        cos = q @ self.cos
        sin = q @ self.sin
        cos[:, 0] += np.asarray(translation, dtype=float)
        return ClosedCurve(cos, sin, validate=False, name=self.name)

    def perturbed(self, delta, rng):
        """Copy with every coefficient shifted by uniform noise in ``[-delta, delta]``."""
        cos = self.cos + rng.uniform(-delta, delta, size=self.cos.shape)
        sin = self.sin + rng.uniform(-delta, delta, size=self.sin.shape)
        return ClosedCurve(cos, sin, name=self.name)


class WarpedCurve:
    """``gamma(u + a sin u)``: the same geometric curve under a smooth monotone
    change of parameter (requires ``|a| < 1``).  Derivatives use the chain rule."""

    period = TWO_PI

    def __init__(self, curve, amplitude):
        if not abs(amplitude) < 1.0:
            raise ValueError("warp amplitude must satisfy |a| < 1")
        self.base = curve
        self.amplitude = float(amplitude)

    def jet(self, u):
        u = np.asarray(u, dtype=float)
        a = self.amplitude
        w = u + a * np.sin(u)
        w1 = (1.0 + a * np.cos(u))[..., None]
        w2 = (-a * np.sin(u))[..., None]
        w3 = (-a * np.cos(u))[..., None]
        g = self.base.jet(w)
        return CurveJet(
            g.position,
            w1 * g.d1,
            w2 * g.d1 + w1**2 * g.d2,
            w3 * g.d1 + 3.0 * w1 * w2 * g.d2 + w1**3 * g.d3,
        )

    def __call__(self, u):
        return self.jet(u).position


class HelixArc:
    """Open helix arc ``(R cos(s/l), R sin(s/l), a s/l)``, ``l = sqrt(R^2 + a^2)``,
    parametrized by arclength on ``[0, length]``.  Not closed; useful for
    checking Frenet formulas and for exercising :func:`closure_check`."""

    def __init__(self, R=2.0, a=0.5, length=3.5):
        self.R = float(R)
        self.a = float(a)
        self.lam = float(np.hypot(R, a))
        self.period = float(length)

    def jet(self, s):
        s = np.asarray(s, dtype=float)
        R, a, lam = self.R, self.a, self.lam
        x = s / lam
        c, sn = np.cos(x), np.sin(x)
        zero = np.zeros_like(x)
        pos = np.stack([R * c, R * sn, a * x], axis=-1)
        d1 = np.stack([-R * sn, R * c, zero + a], axis=-1) / lam
        d2 = np.stack([-R * c, -R * sn, zero], axis=-1) / lam**2
        d3 = np.stack([R * sn, -R * c, zero], axis=-1) / lam**3
        return CurveJet(pos, d1, d2, d3)

    def __call__(self, s):
        return self.jet(s).position


# ---------------------------------------------------------------- presets

def circle(R=1.0):
    """Circle of radius ``R`` in the plane ``z = 0``, centred at the origin."""
    cos = np.zeros((3, 2))
    sin = np.zeros((3, 2))
    cos[0, 1] = R
    sin[1, 1] = R
    return ClosedCurve(cos, sin, name="circle")


torus_centerline = circle


def trefoil():
    """``(sin u + 2 sin 2u, cos u - 2 cos 2u, -sin 3u)``; curvature is positive everywhere."""
    cos = np.zeros((3, 4))
    sin = np.zeros((3, 4))
    sin[0, 1], sin[0, 2] = 1.0, 2.0
    cos[1, 1], cos[1, 2] = 1.0, -2.0
    sin[2, 3] = -1.0
    return ClosedCurve(cos, sin, name="trefoil")


def limacon(a=2.0, b=1.0, h=0.5):
    """Looped limacon ``rho = b + a cos u`` (``a > b``) lifted by ``z = h sin u``.

    At ``h = 0`` the curve has a double point at the origin; ``h`` is the pinch
    parameter of a homotopy towards a singular knot.  The two strands cross at
    ``u = +-arccos(-b/a)`` with vertical separation ``2 h sqrt(1 - b^2/a^2)``.
    """
    if not a > b > 0:
        raise ValueError("looped limacon needs a > b > 0")
    cos = np.zeros((3, 3))
    sin = np.zeros((3, 3))
    cos[0, 0], cos[0, 1], cos[0, 2] = a / 2.0, b, a / 2.0
    sin[1, 1], sin[1, 2] = b, a / 2.0
    sin[2, 1] = h
    return ClosedCurve(cos, sin, name="limacon")


PRESETS = {
    "circle": circle,
    "torus_centerline": torus_centerline,
    "trefoil": trefoil,
    "limacon": limacon,
}


# ---------------------------------------------------------------- operations

def eval_jet(curve, u):
    return curve.jet(u)


def frenet(jet, eps_kappa=EPS_KAPPA):
    """Serret-Frenet frame, curvature and torsion from a jet.

    Raises :class:`DegenerateFrame` where ``|g' x g''| <= eps_kappa |g'|^3``.
    """
    d1, d2, d3 = jet.d1, jet.d2, jet.d3
    speed = np.linalg.norm(d1, axis=-1)
    cross = np.cross(d1, d2)
    cnorm = np.linalg.norm(cross, axis=-1)
    if np.any(speed <= 0.0) or np.any(cnorm <= eps_kappa * speed**3):
        raise DegenerateFrame("Frenet frame undefined: curvature vanishes")
    t = d1 / speed[..., None]
    b = cross / cnorm[..., None]
    n = np.cross(b, t)
    kappa = cnorm / speed**3
    tau = np.einsum("...i,...i->...", cross, d3) / cnorm**2
    return FrenetData(t, n, b, kappa, tau, speed)


def frame_at(curve, u):
    return frenet(curve.jet(u))


def total_length(curve, n_quad=256):
    """Length by the periodic trapezoidal rule (spectrally accurate for Fourier curves)."""
    if n_quad < 16:
        raise ValueError("n_quad must be at least 16")
    u = np.arange(n_quad) * (curve.period / n_quad)
    speed = np.linalg.norm(curve.jet(u).d1, axis=-1)
    return float(speed.sum() * (curve.period / n_quad))


def max_curvature(curve, n_samples=2048):
    """Maximum curvature: dense sampling, then a bounded golden-section polish."""
    u = np.arange(n_samples) * (curve.period / n_samples)
    kappa = frame_at(curve, u).kappa
    i = int(np.argmax(kappa))
    h = curve.period / n_samples
    res = minimize_scalar(
        lambda x: -float(frame_at(curve, np.array([x])).kappa[0]),
        bounds=(u[i] - h, u[i] + h),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(max(kappa[i], -res.fun))


@dataclass(frozen=True)
class ClosureReport:
    residuals: dict
    tolerance: float

    @property
    def passed(self):
        return all(v <= self.tolerance for v in self.residuals.values())


def closure_check(curve, tol=1e-10):
    """Compare position and Frenet frame at ``u = 0`` and ``u = period``."""
    ends = np.array([0.0, curve.period])
    jet = curve.jet(ends)
    residuals = {"gamma": float(np.linalg.norm(jet.position[1] - jet.position[0]))}
    fr = frenet(jet)
    for name in ("t", "n", "b"):
        v = getattr(fr, name)
        residuals[name] = float(np.linalg.norm(v[1] - v[0]))
    for name, res in residuals.items():
        if res > tol:
            raise ClosureViolation(name, res)
    return ClosureReport(residuals, tol)


def curvature_derivatives(curve, u, step=1e-3):
    """Curvature, torsion and their first two *arclength* derivatives at ``u``.

    Parameter derivatives come from 4th-order central differences of the exact
    ``kappa(u)``, ``tau(u)`` with the given step, then are converted with
    ``d/ds = (1/|g'|) d/du``.  Returns ``(k, k_s, k_ss, t, t_s, t_ss)``.
    """
    u = np.asarray(u, dtype=float)
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * step
    fr = frame_at(curve, u[..., None] + offs)
    jet = curve.jet(u)
    sigma = np.linalg.norm(jet.d1, axis=-1)
    sigma_u = np.einsum("...i,...i->...", jet.d1, jet.d2) / sigma
    w1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * step)
    w2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * step**2)
    out = []
    for f in (fr.kappa, fr.tau):
        f0 = f[..., 2]
        fu = f @ w1
        fuu = f @ w2
        out += [f0, fu / sigma, (fuu - fu * sigma_u / sigma) / sigma**2]
    return tuple(out)
