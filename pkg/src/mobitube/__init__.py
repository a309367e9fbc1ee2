"""Repulsive energy of tubes around closed space curves."""
from ._backend import backend_name
from .curve import (
    ClosedCurve, CurveJet, FrenetData, HelixArc, WarpedCurve, circle, closure_check,
    eval_jet, frenet, limacon, max_curvature, torus_centerline, total_length, trefoil,
)
from .errors import ClosureViolation, DegenerateFrame, SelfContactSingular, SpecError
from .tube import (
    ProjectionLengths, SurfaceCoord, Tube, boundary_point, dstar_squared, jacobian_det,
    meridian_distance, minimal_parallel_distance, parallel_lengths,
)

__version__ = "0.1.0"
