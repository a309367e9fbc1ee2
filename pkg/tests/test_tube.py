import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mobitube.curve import HelixArc, circle, frame_at, limacon, trefoil
from mobitube.tube import (
    CumulativeIntegral, SurfaceCoord, Tube, boundary_point, chord_squared_arrays,
    dstar_squared, dstar_squared_arrays, find_roots, jacobian_det, meridian_distance,
    minimal_parallel_distance, parallel_lengths, wrap_angle,
)

from conftest import torus_chart

angles = st.floats(0.0, 2 * np.pi, allow_nan=False)


def test_surface_coord_normalizes():
    c = SurfaceCoord(-0.5, 7.0)
    assert 0 <= c.u < 2 * np.pi and 0 <= c.theta < 2 * np.pi
    assert c.theta == pytest.approx(7.0 - 2 * np.pi)
    assert wrap_angle(2 * np.pi) == 0.0


def test_boundary_point_inner_equator(torus):
    np.testing.assert_allclose(boundary_point(torus, SurfaceCoord(0.0, 0.0)), [1, 0, 0], atol=1e-15)


def test_boundary_matches_torus_chart(torus):
    rng = np.random.default_rng(0)
    u, th = rng.uniform(0, 2 * np.pi, (2, 1000))
    np.testing.assert_allclose(torus.points(u, th), torus_chart(2.0, 1.0, u, th), atol=1e-13)


def test_boundary_angle_periodic(trefoil_tube):
    u = np.linspace(0, 6, 13)
    np.testing.assert_allclose(trefoil_tube.points(u, u + 2 * np.pi), trefoil_tube.points(u, u), atol=1e-13)


def test_tube_validation():
    with pytest.raises(ValueError):
        Tube(circle(1.0), 0.0)
    assert Tube(circle(2.0), 1.0).locally_admissible
    assert not Tube(circle(1.0), 1.5).locally_admissible


def test_jacobian(torus):
    assert jacobian_det(torus, 0.0, 0.3, 0.0) == 0.0
    assert jacobian_det(torus, 1.0, 0.0, 0.0) == pytest.approx(0.5)
    assert jacobian_det(Tube(circle(1.0), 2.0), 1.5, 0.0, 0.0) < 0


def test_jacobian_sign_iff_admissible():
    u = np.linspace(0, 2 * np.pi, 256)[None, :, None]
    th = np.linspace(0, 2 * np.pi, 64)[None, None, :]
    for curve, r in ((trefoil(), 0.2), (trefoil(), 1.5), (limacon(), 0.3), (limacon(), 2.0)):
        tube = Tube(curve, r)
        rho = r * np.linspace(0.01, 0.999, 40)[:, None, None]
        positive = bool(np.all(jacobian_det(tube, rho, u, th) > 0))
        assert positive == tube.locally_admissible, (curve.name, r)


def test_meridian_distance():
    assert meridian_distance(0.0, np.pi / 2, 1.0) == pytest.approx(np.pi / 2)
    assert meridian_distance(0.0, 3 * np.pi / 2, 1.0) == pytest.approx(np.pi / 2)
    assert meridian_distance(1.1, 1.1, 2.0) == 0.0


@settings(max_examples=50, deadline=None)
@given(angles, angles, st.floats(0.01, 5.0))
def test_meridian_distance_properties(t, p, r):
    d = meridian_distance(t, p, r)
    assert d == meridian_distance(p, t, r)
    assert 0 <= d <= np.pi * r + 1e-12


def test_parallel_lengths_torus(torus):
    pl = parallel_lengths(torus, 0.0, 0.0, np.pi / 4)
    assert pl.l_t == pytest.approx(np.pi / 4, rel=1e-12)
    assert pl.l_nb == pytest.approx(0.0, abs=1e-14)
    assert pl.l_hat == pytest.approx(np.pi / 4, rel=1e-12)
    back = parallel_lengths(torus, 0.0, 0.0, np.pi / 4, "backward")
    assert back.l_t == pytest.approx(7 * np.pi / 4, rel=1e-12)


def test_parallel_length_at_quarter_angle_is_centerline_arclength(trefoil_tube):
    pl = parallel_lengths(trefoil_tube, np.pi / 2, 0.4, 2.1)
    S = trefoil_tube.arclength
    assert pl.l_t == pytest.approx(float(S(2.1) - S(0.4)), rel=1e-12)


def test_helix_torsion_projection():
    helix = HelixArc(2.0, 0.5, length=3.5)
    tube = Tube(helix, 0.3)
    tau = 0.5 / 4.25
    pl = parallel_lengths(tube, 0.7, 0.5, 2.5)
    assert pl.l_nb == pytest.approx(0.3 * tau * 2.0, rel=1e-12)


def test_lhat_cauchy_schwarz(trefoil_tube):
    rng = np.random.default_rng(3)
    tube = trefoil_tube
    u = np.linspace(0, 2 * np.pi, 4097)
    fr = frame_at(tube.curve, u)
    for _ in range(10):
        th, u1, u2 = rng.uniform(0, 2 * np.pi, 3)
        pl = parallel_lengths(tube, th, u1, u2)
        assert min(pl.l_hat, pl.l_t, pl.l_nb) >= 0
        span = np.mod(u2 - u1, 2 * np.pi)
        mask = np.mod(u - u1, 2 * np.pi) <= span
        f2 = (1 - tube.r * np.cos(th) * fr.kappa) ** 2 + tube.r**2 * fr.tau**2
        du = u[1] - u[0]
        arc = np.sum(fr.speed[mask]) * du
        bound = arc * np.sum(f2[mask] * fr.speed[mask]) * du
        assert pl.l_hat**2 <= bound * (1 + 1e-2)


def test_minimal_parallel_distance():
    tube = Tube(circle(2.0), 1.0)
    assert minimal_parallel_distance(tube, np.pi / 2, 0.0, np.pi / 3) == pytest.approx(2 * np.pi / 3, rel=1e-12)
    assert tube.lhat_table(np.pi / 2).total == pytest.approx(4 * np.pi, rel=1e-12)
    assert minimal_parallel_distance(tube, np.pi / 2, 0.0, np.pi) == pytest.approx(2 * np.pi, rel=1e-12)
    assert minimal_parallel_distance(tube, 0.3, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_dstar_torus_closed_form(torus):
    X, Y = SurfaceCoord(0.0, 0.0), SurfaceCoord(np.pi / 4, np.pi / 2)
    assert dstar_squared(torus, X, Y) == pytest.approx(3 * np.pi**2 / 8, rel=1e-12)
    assert dstar_squared(torus, X, X) == 0.0


def test_dstar_planar_reduction():
    tube = Tube(limacon(h=0.0), 0.1)
    rng = np.random.default_rng(5)
    for _ in range(20):
        u1, th, u2, ph = rng.uniform(0, 2 * np.pi, 4)
        lhat = [minimal_parallel_distance(tube, a, u1, u2) for a in (th, ph)]
        fwd = [parallel_lengths(tube, a, u1, u2).l_hat for a in (th, ph)]
        lm = meridian_distance(th, ph, tube.r)
        d2 = dstar_squared(tube, SurfaceCoord(u1, th), SurfaceCoord(u2, ph))
        # same orientation on both parallels, whichever sweep is shorter
        alt = min(fwd[0] * fwd[1], (tube.lhat_table(th).total - fwd[0]) * (tube.lhat_table(ph).total - fwd[1]))
        assert d2 == pytest.approx(lm**2 + alt, rel=1e-10)
        assert alt >= lhat[0] * lhat[1] - 1e-12


def test_dstar_symmetry_exact(trefoil_tube):
    rng = np.random.default_rng(11)
    for u1, t1, u2, t2 in rng.uniform(0, 2 * np.pi, (10**4, 4))[::50]:
        X, Y = SurfaceCoord(u1, t1), SurfaceCoord(u2, t2)
        assert dstar_squared(trefoil_tube, X, Y) == dstar_squared(trefoil_tube, Y, X)


def test_dstar_vectorized_symmetry_many(trefoil_tube):
    rng = np.random.default_rng(12)
    u1, t1, u2, t2 = rng.uniform(0, 2 * np.pi, (4, 10**4))
    a = dstar_squared_arrays(trefoil_tube, u1, t1, u2, t2)
    b = dstar_squared_arrays(trefoil_tube, u2, t2, u1, t1)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
    assert np.all(a > 0)


@settings(max_examples=60, deadline=None)
@given(angles, angles, angles, angles)
def test_torus_domination(u1, t1, u2, t2):
    for R, r in ((2.0, 0.5), (1.5, 1.0)):
        tube = Tube(circle(R), r)
        d2 = dstar_squared_arrays(tube, u1, t1, u2, t2)
        c2 = chord_squared_arrays(tube, u1, t1, u2, t2)
        assert d2 >= c2 * (1 - 1e-12) - 1e-14


def test_not_a_metric():
    tube = Tube(circle(2.0), 1.0)
    X, Y, Z = SurfaceCoord(0.0, 0.0), SurfaceCoord(np.pi / 2, np.pi / 2), SurfaceCoord(np.pi / 3, np.pi / 6)
    np.testing.assert_allclose(boundary_point(tube, X), [1.0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(boundary_point(tube, Y), [0, 2.0, 1.0], atol=1e-15)
    d = lambda a, b: np.sqrt(dstar_squared(tube, a, b))
    assert d(X, Y) > d(X, Z) + d(Z, Y)


def test_find_roots_and_cumulative_integral():
    roots = find_roots(lambda x: np.cos(x), 0.0, 2 * np.pi)
    np.testing.assert_allclose(roots, [np.pi / 2, 3 * np.pi / 2], atol=1e-12)
    F = CumulativeIntegral(lambda x: np.abs(np.cos(x)), 2 * np.pi, roots)
    assert F.total == pytest.approx(4.0, rel=1e-13)
    assert F(np.pi) == pytest.approx(2.0, rel=1e-13)
    assert F(1.0) == pytest.approx(np.sin(1.0), rel=1e-13)


def test_inadmissible_tube_uses_absolute_lengths():
    tube = Tube(circle(1.0), 1.5)
    pl = parallel_lengths(tube, 0.0, 0.0, 2 * np.pi - 1e-12)
    # |1 - 1.5 cos 0| = 0.5 everywhere on the inner parallel
    assert pl.l_t == pytest.approx(0.5 * 2 * np.pi, rel=1e-9)
    assert dstar_squared(tube, SurfaceCoord(0, 0), SurfaceCoord(1, 0)) > 0
