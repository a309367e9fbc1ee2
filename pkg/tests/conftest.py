import numpy as np
import pytest
from scipy.optimize import brentq

from mobitube.curve import ClosedCurve, circle, trefoil
from mobitube.tube import Tube


def phase_shifted(curve, phi):
    """Same geometric curve traced from ``u = phi``: ``gamma(u + phi)``."""
    k = np.arange(curve.cos.shape[1])
    c, s = np.cos(k * phi), np.sin(k * phi)
    return ClosedCurve(curve.cos * c + curve.sin * s, curve.sin * c - curve.cos * s)


def param_at_arclength(tube, u, ds):
    """Parameter reached from ``u`` after arclength ``ds`` (no wrap; keep ``u`` off the seam)."""
    S = tube.arclength
    target = float(S(u)) + ds
    return brentq(lambda v: float(S(v)) - target, u - 0.4, u + 0.4, xtol=1e-15, rtol=1e-15)


def torus_chart(R, r, u, theta):
    a = R - r * np.cos(theta)
    return np.stack([a * np.cos(u), a * np.sin(u), r * np.sin(theta)], axis=-1)


def random_rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


@pytest.fixture(scope="session")
def torus():
    return Tube(circle(2.0), 1.0)


@pytest.fixture(scope="session")
def trefoil_tube():
    return Tube(trefoil(), 0.2)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records one acceptance line and returns ``ok``."""
    def record(n, ok, detail):
        _CRITERIA[n] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {detail}")
