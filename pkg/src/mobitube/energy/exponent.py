"""Model integrals for the behaviour of ``|X-Y|^-alpha`` near self-contact.

Two local models, with ``s = alpha / 2``:

point contact
    two tube patches touching at one point; with ``u = xi + sin(phi)``,
    ``v = eta - sin(theta)`` the squared chord is
    ``u^2 + v^2 + (2 - cos(theta) - cos(phi))^2`` over ``[-eps, eps]^4``.
line contact
    two parallel cylinders of length ``2L`` touching along a line; the chord is
    ``B^2 + r^2 (sin(theta) - sin(phi))^2 + r^2 (2 - cos(theta) - cos(phi))^2``
    with ``B = x1 - x2`` and angles in ``[-eps, eps]``.

A neighbourhood of radius ``delta`` around the contact set is removed
(a 4-ball in ``(u, v, theta, phi)`` for point contact, the tube
``B^2 + r^2 (theta^2 + phi^2) < delta^2`` for line contact).  The integral
converges as ``delta -> 0`` iff the energy near the contact is finite.

The innermost integrals are done in closed form.  The remaining 2D integral
uses graded composite Gauss-Legendre; nested adaptive routes are kept for
cross-checking.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import beta, betainc, hyp2f1

GEOMETRIES = ("point_contact", "line_contact")
DEFAULT_DELTAS = (1e-2, 5e-3, 2.5e-3)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_QUAD = dict(epsabs=1e-13, epsrel=1e-11, limit=400)


def _radial_antiderivative(R2, q, s):
    """Antiderivative of ``rho (rho^2 + q)^-s`` in ``rho``, as a function of ``rho^2``."""
    if s == 1.0:
        return 0.5 * np.log(R2 + q)
    return (R2 + q) ** (1.0 - s) / (2.0 * (1.0 - s))


def _rectangle_minus_disk(ulo, uhi, vlo, vhi, rho0, q, s):
    """``int (u^2 + v^2 + q)^-s`` over a rectangle containing the origin minus
    the disk of radius ``rho0`` centred there; polar, split at the corners."""
    corners = np.sort(np.arctan2([vlo, vlo, vhi, vhi], [ulo, uhi, uhi, ulo]))
    edges = np.append(corners, corners[0] + 2.0 * np.pi)
    a, b = edges[:-1, None], edges[1:, None]
    psi = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
    w = 0.5 * (b - a) * _GL_W
    c, sn = np.cos(psi), np.sin(psi)
    with np.errstate(divide="ignore"):
        ru = np.where(c > 0, uhi / c, ulo / c)
        rv = np.where(sn > 0, vhi / sn, vlo / sn)
    ru = np.where(np.abs(c) < 1e-300, np.inf, ru)
    rv = np.where(np.abs(sn) < 1e-300, np.inf, rv)
    rmax = np.minimum(ru, rv)
    inner = _radial_antiderivative(rmax**2, q, s) - _radial_antiderivative(rho0**2, q, s)
    return float((w * inner).sum())


def _point_slice(theta, phi, eps, delta, s):
    q = (2.0 - math.cos(theta) - math.cos(phi)) ** 2
    rho0 = math.sqrt(max(delta * delta - theta * theta - phi * phi, 0.0))
    sp, st = math.sin(phi), math.sin(theta)
    return _rectangle_minus_disk(sp - eps, sp + eps, -st - eps, -st + eps, rho0, q, s)


def _gl_panels(edges, n=16):
    """Gauss-Legendre nodes and weights on consecutive panels ``edges``."""
    x, w = np.polynomial.legendre.leggauss(n)
    a, b = np.asarray(edges[:-1])[:, None], np.asarray(edges[1:])[:, None]
    return (0.5 * (a + b) + 0.5 * (b - a) * x).ravel(), (0.5 * (b - a) * w).ravel()


def _graded_edges(a, b, ratio=0.2, levels=20):
    """Panel edges on ``[a, b]`` shrinking geometrically towards ``b``."""
    gaps = (b - a) * ratio ** np.arange(levels + 1)
    return np.concatenate([[a], b - gaps[1:], [b]])


def _rectangle_minus_disk_batch(ulo, uhi, vlo, vhi, rho0, q, s):
    """Vectorized :func:`_rectangle_minus_disk` over 1D arrays of slices."""
    corners = np.sort(np.arctan2(np.stack([vlo, vlo, vhi, vhi], -1),
                                 np.stack([ulo, uhi, uhi, ulo], -1)), axis=-1)
    edges = np.concatenate([corners, corners[:, :1] + 2.0 * np.pi], axis=-1)
    a, b = edges[:, :-1, None], edges[:, 1:, None]
    psi = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
    w = 0.5 * (b - a) * _GL_W
    c, sn = np.cos(psi), np.sin(psi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ru = np.where(c > 0, uhi[:, None, None] / c, ulo[:, None, None] / c)
        rv = np.where(sn > 0, vhi[:, None, None] / sn, vlo[:, None, None] / sn)
    ru = np.where(np.abs(c) < 1e-300, np.inf, ru)
    rv = np.where(np.abs(sn) < 1e-300, np.inf, rv)
    rmax = np.minimum(ru, rv)
    qq = q[:, None, None]
    inner = (_radial_antiderivative(rmax**2, qq, s)
             - _radial_antiderivative((rho0**2)[:, None, None], qq, s))
    return (w * inner).sum(axis=(1, 2))


def _point_contact(alpha, eps, delta, r, n_psi=32):
    """Composite Gauss-Legendre over polar ``(theta, phi)``.

    Inside the cutoff the slice integral has a near-singularity as the
    removed disk shrinks to nothing at the sphere, so the radial panels are
    graded geometrically towards ``delta``; outside, a logarithmic map handles
    the power-law decay.
    """
    s = 0.5 * alpha
    rin, win = _gl_panels(_graded_edges(0.0, delta))
    t, wt = _gl_panels(np.linspace(0.0, 1.0, 9))
    total = 0.0
    # point symmetry (theta, phi) -> (-theta, -phi): half the plane, doubled
    for k in range(2):
        lo = -0.25 * math.pi + 0.5 * math.pi * k
        psi, wpsi = _gl_panels([lo, lo + 0.5 * math.pi], n_psi)
        for p, wp in zip(psi, wpsi):
            rmax = eps / max(abs(math.cos(p)), abs(math.sin(p)))
            lam = math.log(rmax / delta)
            rout = delta * np.exp(lam * t)
            rho = np.concatenate([rin, rout])
            wr = np.concatenate([win, wt * lam * rout])
            th, ph = rho * math.cos(p), rho * math.sin(p)
            q = (2.0 - np.cos(th) - np.cos(ph)) ** 2
            rho0 = np.sqrt(np.maximum(delta * delta - rho * rho, 0.0))
            sp, st = np.sin(ph), np.sin(th)
            g = _rectangle_minus_disk_batch(sp - eps, sp + eps, -st - eps, -st + eps, rho0, q, s)
            total += wp * float(np.dot(wr, rho * g))
    return 2.0 * total / r**alpha


def _point_contact_adaptive(alpha, eps, delta, r):
    """Nested adaptive quadrature of the same integral (slow reference route)."""
    s = 0.5 * alpha

    def radial(rho, psi):
        return rho * _point_slice(rho * math.cos(psi), rho * math.sin(psi), eps, delta, s)

    def angular(psi):
        # square [-eps, eps]^2 seen from the origin
        rmax = eps / max(abs(math.cos(psi)), abs(math.sin(psi)))
        pts = [delta] if delta < rmax else None
        return quad(radial, 0.0, rmax, args=(psi,), points=pts, **_QUAD)[0]

    total = 0.0
    # point symmetry (theta, phi) -> (-theta, -phi): half the plane, doubled
    for k in range(2):
        lo = -0.25 * math.pi + 0.5 * math.pi * k
        total += quad(angular, lo, lo + 0.5 * math.pi, **_QUAD)[0]
    return 2.0 * total / r**alpha


def _line_b_integrals(b0, X, p, s):
    """``int_{b0}^{X} (B^2 + p)^-s dB`` and ``int_{b0}^{X} B (B^2 + p)^-s dB``.

    Closed forms through the incomplete beta function (``s > 1/2``), ``asinh``
    (``s = 1/2``) or the Gauss hypergeometric function (``s < 1/2``).  Array
    arguments broadcast.
    """
    i1 = _radial_antiderivative(X * X, p, s) - _radial_antiderivative(b0 * b0, p, s)
    if s > 0.5:
        def tail(x):
            return 0.5 * p ** (0.5 - s) * beta(s - 0.5, 0.5) * betainc(s - 0.5, 0.5, p / (x * x + p))
        i0 = tail(b0) - tail(X)
    elif s == 0.5:
        rp = np.sqrt(p)
        i0 = np.arcsinh(X / rp) - np.arcsinh(b0 / rp)
    else:
        def head(x):
            return x * p ** (-s) * hyp2f1(s, 0.5, 1.5, -x * x / p)
        i0 = head(X) - head(b0)
    return i0, i1


def _two_sided_edges(a, b, ratio=0.1, levels=12):
    """Panel edges on ``[a, b]`` shrinking geometrically towards both ends."""
    half = 0.5 * (b - a)
    gaps = half * ratio ** np.arange(1, levels + 1)
    return np.concatenate([[a], a + gaps[::-1], [a + half], b - gaps, [b]])


def _segments(lo, hi, cut):
    """``[lo, hi]`` split at ``cut`` when it falls strictly inside."""
    pts = [lo] + ([cut] if lo < cut < hi else []) + [hi]
    return list(zip(pts[:-1], pts[1:]))


def _graded_rule(lo, hi, cut, n=12):
    nodes, weights = [], []
    for a, b in _segments(lo, hi, cut):
        x, w = _gl_panels(_two_sided_edges(a, b), n)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def _line_slice(w, m, delta, r, span, s):
    """Integral over the axial offset for angle coordinates ``(w, m)``, with the
    weight ``2L - |B|`` from integrating out ``x1 + x2`` and both signs of ``B``."""
    th, ph = m + 0.5 * w, m - 0.5 * w
    p = r * r * ((np.sin(th) - np.sin(ph)) ** 2 + (2.0 - np.cos(th) - np.cos(ph)) ** 2)
    p = np.maximum(p, 1e-300)
    b0 = np.sqrt(np.maximum(delta * delta - r * r * (th * th + ph * ph), 0.0))
    i0, i1 = _line_b_integrals(b0, span, p, s)
    return 2.0 * (span * i0 - i1)


def _line_contact(alpha, eps, delta, r, L):
    """Composite Gauss-Legendre over ``m = (theta + phi) / 2`` and ``w = theta - phi``.

    Near the contact ``p ~ r^2 (w^2 + m^4)`` is strongly anisotropic and the
    cutoff ellipse puts square-root kinks at ``w_c(m)`` and ``m_c``, so every
    segment between those points is graded geometrically towards both ends.
    """
    s = 0.5 * alpha
    span = 2.0 * L
    mc = delta / (r * math.sqrt(2.0))
    m_nodes, m_w = _graded_rule(0.0, eps, mc)
    total = 0.0
    for m, wm in zip(m_nodes, m_w):
        wmax = 2.0 * (eps - m)
        inside = (delta / r) ** 2 - 2.0 * m * m
        wc = math.sqrt(2.0 * inside) if inside > 0.0 else 0.0
        w, ww = _graded_rule(0.0, wmax, wc)
        total += wm * float(np.dot(ww, _line_slice(w, m, delta, r, span, s)))
    # symmetric under w -> -w and m -> -m
    return 4.0 * total


def _line_contact_adaptive(alpha, eps, delta, r, L):
    """Nested adaptive quadrature of the same integral (slow reference route)."""
    s = 0.5 * alpha
    span = 2.0 * L

    def slice_(w, m):
        return float(_line_slice(w, m, delta, r, span, s))

    def over_w(m):
        wmax = 2.0 * (eps - m)
        inside = (delta / r) ** 2 - 2.0 * m * m
        pts = None
        if inside > 0.0:
            wc = math.sqrt(2.0 * inside)
            if wc < wmax:
                pts = [wc]
        return quad(slice_, 0.0, wmax, args=(m,), points=pts, **_QUAD)[0]

    mc = delta / (r * math.sqrt(2.0))
    pts = [mc] if mc < eps else None
    return 4.0 * quad(over_w, 0.0, eps, points=pts, **_QUAD)[0]


def exponent_model_integral(geometry, alpha, eps=0.25, delta=1e-2, r=1.0, L=1.0):
    """Model integral with the contact neighbourhood of radius ``delta`` removed."""
    if not 0.0 < alpha < 3.0:
        raise ValueError(f"alpha must lie in (0, 3), got {alpha}")
    if not 0.0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    if geometry == "point_contact":
        return _point_contact(float(alpha), float(eps), float(delta), float(r))
    if geometry == "line_contact":
        return _line_contact(float(alpha), float(eps), float(delta), float(r), float(L))
    raise ValueError(f"unknown geometry {geometry!r}; expected one of {GEOMETRIES}")


@dataclass(frozen=True)
class ExponentStudy:
    geometry: str
    alpha: float
    deltas: tuple
    values: tuple
    differences: tuple
    verdict: str


def convergence_verdict(values, factor=2.0):
    """``converges`` when every successive difference shrinks by ``factor`` or more."""
    diffs = [abs(b - a) for a, b in zip(values, values[1:])]
    if len(diffs) < 2:
        raise ValueError("need at least three cutoff levels")
    ok = all(d1 == 0.0 or d0 >= factor * d1 for d0, d1 in zip(diffs, diffs[1:]))
    return "converges" if ok else "diverges"


def exponent_study(geometry, alpha, deltas=DEFAULT_DELTAS, eps=0.25, r=1.0, L=1.0, factor=2.0):
    deltas = tuple(float(d) for d in deltas)
    values = tuple(exponent_model_integral(geometry, alpha, eps, d, r, L) for d in deltas)
    diffs = tuple(b - a for a, b in zip(values, values[1:]))
    return ExponentStudy(geometry, float(alpha), deltas, values, diffs,
                         convergence_verdict(values, factor))
