"""Near-diagonal polynomial expansions of ``|X - Y|^2`` and ``d*^2``.

With base point ``(u, theta)``, arclength offset ``eta1`` and angle offset
``eta2``::

    |X - Y|^2 = A2 + A3 + A4 + O(|eta|^5)
    d*^2      = A2 + A3 + B4 + O(|eta|^5)      (tau > 0, eta1 > 0, eta2 > 0)

The ``d*^2`` expansion uses the signed torsion combination, so it only
describes ``d*^2`` where the torsion term and the angle offset have the same
sign.  Curvature and torsion derivatives are arclength derivatives.
"""
from dataclasses import dataclass

import numpy as np

from ..curve import curvature_derivatives


@dataclass(frozen=True)
class TaylorTerms:
    A2: float
    A3: float
    A4: float
    B4: float


def taylor_coefficients(k, k1, k2, t, t1, t2, r, theta, e1, e2):
    """The four polynomials from local invariants; all arguments broadcast."""
    c, s = np.cos(theta), np.sin(theta)
    rc, r2 = r * c, r * r
    A2 = e1**2 * (1.0 - k * rc) ** 2 + r2 * (e2 + e1 * t) ** 2
    A3 = (e1**2 * e2 * (r * k * s - r2 * k * k * c * s + r2 * t1)
          + e1**3 * (-rc * k1 + r2 * c * c * k * k1 + r2 * t * t1))
    A4 = (
        e1**4 * (k2 * k * r2 * c * c / 3 - k2 * rc / 3 - k**4 * r2 * c * c / 12
                 + k**3 * rc / 6 - k * k * r2 * t * t * s * s / 12
                 - k * k * r2 * t * t * c * c / 6 - k * k * r2 * t1 * s * c / 6
                 - k * k / 12 + k * k1 * r2 * t * s * c / 6 + k * r * t1 * s / 6
                 + k * rc * t * t / 6 + k1 * k1 * r2 * c * c / 4 + r2 * t2 * t / 3
                 - r2 * t**4 / 12 + r2 * t1 * t1 / 4)
        + e1**3 * e2 * (-k * k * r2 * t / 3 - k * k1 * r2 * s * c + k * rc * t / 3
                        + 2 * k1 * r * s / 3 - r2 * t**3 / 3 + r2 * t2 / 3)
        + e1**2 * e2**2 * (-k * k * r2 * c * c / 2 + k * rc / 2 - r2 * t * t / 2)
        - e1 * e2**3 * r2 * t / 3
        - e2**4 * r2 / 12
    )
    B4 = (
        e1**4 * (k2 * k * r2 * c * c / 3 - k2 * rc / 3 + k1 * k1 * r2 * c * c / 4
                 + r2 * t2 * t / 3 + r2 * t1 * t1 / 4)
        + e1**3 * e2 * (-k * k1 * r2 * s * c + k1 * r * s / 2 + r2 * t2 / 3)
        + e1**2 * e2**2 * (k * rc / 2 - k * k * r2 * c * c / 2)
    )
    return A2, A3, A4, B4


def local_invariants(curve, u, step=1e-3):
    return curvature_derivatives(curve, np.atleast_1d(np.asarray(u, float)), step)


def taylor_terms(tube, u, theta, eta1, eta2):
    """Expansion terms at base point ``(u, theta)`` for offsets ``(eta1, eta2)``.

    ``eta1`` is an arclength offset along the centerline, ``eta2`` an angle.
    """
    k, k1, k2, t, t1, t2 = (float(x[0]) for x in local_invariants(tube.curve, u))
    return TaylorTerms(*(float(v) for v in
                         taylor_coefficients(k, k1, k2, t, t1, t2, tube.r, theta, eta1, eta2)))
