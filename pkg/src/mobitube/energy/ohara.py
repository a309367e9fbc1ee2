"""O'Hara's energy of a closed curve, the thin-tube limit of the tube energy."""
import math

import numpy as np

from .. import kernels
from ..errors import SelfContactSingular
from ..tube import CumulativeIntegral
from .functional import grid_nodes


def ohara_energy(curve, alpha=2.0, grid=1024):
    """``int int (|g(s)-g(t)|^-alpha - d(s,t)^-alpha) ds dt`` with ``d`` the
    shorter arc between the two points.  Periodic midpoint rule on offset grids."""
    n = int(grid)
    if n < 4 or n % 2:
        raise ValueError("grid must be even and >= 4")
    speed = lambda u: np.linalg.norm(curve.jet(u).d1, axis=-1)
    S = CumulativeIntegral(speed, curve.period)
    uX, uY = grid_nodes(n)
    h = curve.period / n
    jX, jY = curve.jet(uX), curve.jet(uY)
    wX = h * np.linalg.norm(jX.d1, axis=-1)
    wY = h * np.linalg.norm(jY.d1, axis=-1)
    rows, sing = kernels.ohara_rows(jX.position, jY.position, wX, wY, S(uX), S(uY), S.total, float(alpha))
    if sing[0] >= 0:
        i, k = (int(x) for x in sing)
        d = jX.position[i] - jY.position[k]
        raise SelfContactSingular((uX[i], uY[k]), float(d @ d), float("nan"))
    return math.fsum(rows)
