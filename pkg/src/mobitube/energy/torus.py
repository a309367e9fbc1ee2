"""Semi-analytic energy of a round torus.

For a circular centerline both inner integrals over the centerline offset
``x = v - u`` have closed forms, leaving a smooth 2D integral over the two
meridian angles.  Writing ``a = R - r cos(theta)``, ``b = R - r cos(phi)``,
``c = r (sin(theta) - sin(phi))`` and ``m`` for the wrapped angle gap::

    |X - Y|^2 = a^2 + b^2 + c^2 - 2 a b cos(x)
    d*^2      = r^2 m^2 + a b x^2             (|x| <= pi)

Includes the speed factor ``R^2`` so it matches :func:`energy` with the
coordinate measure.
"""
import numpy as np
from scipy.special import hyp2f1


def reduced_integrand(theta, phi, R, r, alpha=2.0):
    """``int_0^pi (|X-Y|^-alpha - d*^-alpha) dx`` for meridian angles ``theta``, ``phi``."""
    a = R - r * np.cos(theta)
    b = R - r * np.cos(phi)
    c = r * (np.sin(theta) - np.sin(phi))
    m = np.mod(np.abs(theta - phi), 2.0 * np.pi)
    m = np.minimum(m, 2.0 * np.pi - m)
    ab = a * b
    if alpha == 2.0:
        chord = np.pi / np.sqrt(((a - b) ** 2 + c**2) * ((a + b) ** 2 + c**2))
        sab = np.sqrt(ab)
        pseudo = np.arctan(sab * np.pi / (r * m)) / (r * m * sab)
        return chord - pseudo
    s = 0.5 * alpha
    P = a * a + b * b + c * c
    Q = 2.0 * ab
    chord = np.pi * (P - Q) ** (-s) * hyp2f1(s, 0.5, 1.0, -2.0 * Q / (P - Q))
    rm2 = (r * m) ** 2
    pseudo = np.pi * rm2 ** (-s) * hyp2f1(s, 0.5, 1.5, -ab * np.pi**2 / rm2)
    return chord - pseudo


def torus_energy_reduced(R, r, alpha=2.0, grid=256):
    """Energy of the torus with centerline radius ``R`` and tube radius ``r``.

    Trapezoidal rule in ``theta`` (periodic) and Gauss-Legendre in the angle
    gap ``y = phi - theta`` on ``(0, pi)``; ``grid`` nodes on each axis.
    """
    if not R > r > 0:
        raise ValueError("need R > r > 0")
    n = int(grid)
    theta = 2.0 * np.pi * np.arange(n) / n
    x, w = np.polynomial.legendre.leggauss(n)
    y = 0.5 * np.pi * (x + 1.0)
    w = 0.5 * np.pi * w
    G = reduced_integrand(theta[:, None], theta[:, None] + y[None, :], R, r, alpha)
    # u-integral (2 pi), x in [-pi, pi] (2), gap y of either sign (2)
    return float(R * R * 8.0 * np.pi * (2.0 * np.pi / n) * (G @ w).sum())
