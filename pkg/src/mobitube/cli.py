"""Command-line driver.

    mobitube energy --spec FILE [--grid N_S,N_THETA] [--alpha X]
    mobitube sweep-r --spec FILE [--r-list 0.2,0.1,...]
    mobitube sweep-aspect --spec FILE [--R-list 3,2,1.5,...]
    mobitube exponent-study [--spec FILE] [--geometry G] [--alpha-list ...] [--delta-list ...]
    mobitube report --spec FILE

Common options: ``--out FILE``, ``--format csv|json``.
Exit codes: 0 clear, 2 self-contact or divergent, 3 locally inadmissible,
64 usage error, 65 spec parse error.
"""
import argparse
import csv
import io
import json
import math
import sys

import numba
import numpy as np
import scipy

from . import __version__
from ._backend import backend_name
from .contact import SELF_CONTACT, INTERPENETRATION, INADMISSIBLE, admissibility_report, tol_contact, tol_far
from .curve import circle
from .energy import energy, exponent_study, ohara_energy, torus_energy_reduced
from .energy.functional import EnergyParams
from .errors import SelfContactSingular, SpecError
from .specio import ExponentSpec, RunSpec, load_spec
from .tube import Tube

EXIT_OK = 0
EXIT_CONTACT = 2
EXIT_INADMISSIBLE = 3
EXIT_USAGE = 64
EXIT_PARSE = 65

FOUR_PI2 = 4.0 * math.pi**2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}")
    return vals


def _grid(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected N_S,N_THETA")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid sizes must be integers: {text!r}")


def build_parser():
    p = _Parser(prog="mobitube", description="Tube energy, sweeps and contact reports.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, spec_required=True):
        sp.add_argument("--spec", required=spec_required, metavar="FILE")
        sp.add_argument("--grid", type=_grid, metavar="N_S,N_THETA")
        sp.add_argument("--alpha", type=float, metavar="X")
        sp.add_argument("--out", metavar="FILE")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("energy", help="energy of one tube"))
    sp = sub.add_parser("sweep-r", help="energy over tube radii, compared with the thin limit")
    common(sp)
    sp.add_argument("--r-list", type=_float_list, metavar="R1,R2,...")
    sp.add_argument("--ohara-grid", type=int, default=1024)
    sp = sub.add_parser("sweep-aspect", help="torus energy over centerline radii at fixed r")
    common(sp)
    sp.add_argument("--R-list", dest="R_list", type=_float_list, metavar="R1,R2,...")
    sp.add_argument("--oracle-grid", type=int, default=256)
    sp = sub.add_parser("exponent-study", help="cutoff study of the contact model integrals")
    common(sp, spec_required=False)
    sp.add_argument("--geometry", choices=("point_contact", "line_contact"))
    sp.add_argument("--alpha-list", type=_float_list, metavar="A1,A2,...")
    sp.add_argument("--delta-list", type=_float_list, metavar="D1,D2,...")
    common(sub.add_parser("report", help="self-contact / admissibility report"))
    return p


# ---------------------------------------------------------------- output


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json_value(v):
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(columns, rows, metadata, fmt):
    if fmt == "json":
        doc = {
            "columns": list(columns),
            "rows": [[_json_value(v) for v in row] for row in rows],
            "metadata": {k: _json_value(v) for k, v in metadata.items()},
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    for k, v in metadata.items():
        buf.write(f"# {k}: {_cell(v)}\n")
    return buf.getvalue()


def _metadata(spec=None, params=None, **extra):
    md = {}
    if params is not None:
        md["grid"] = f"{params.grid[0]}x{params.grid[1]}"
        md["alpha"] = params.alpha
        md["measure"] = params.measure
        md["refinement_levels"] = params.refinement_levels
    if spec is not None and spec.r is not None:
        md["eps_d"] = params.diagonal_threshold(spec.r) if params else None
        md["tol_far"] = tol_far(spec.r)
        md["tol_contact"] = tol_contact(spec.r)
    md.update(extra)
    md["mobitube"] = __version__
    md["backend"] = backend_name()
    md["numpy"] = np.__version__
    md["scipy"] = scipy.__version__
    md["numba"] = numba.__version__
    return md


def _params(spec, args):
    p = spec.energy
    kw = dict(alpha=p.alpha, grid=p.grid, eps_d=p.eps_d, refinement_levels=p.refinement_levels,
              measure=p.measure)
    if args.grid is not None:
        kw["grid"] = args.grid
    if args.alpha is not None:
        kw["alpha"] = args.alpha
    try:
        return EnergyParams(**kw)
    except ValueError as exc:
        raise UsageError(str(exc))


def _curve_label(spec):
    c = spec.curve
    if c is None:
        return ""
    if c.preset is None:
        return "fourier"
    args = ",".join(f"{k}={v!r}" for k, v in c.params)
    return f"{c.preset}({args})"


# ---------------------------------------------------------------- commands

ENERGY_COLUMNS = ("curve", "r", "alpha", "value", "error_estimate", "locally_inadmissible",
                  "near_contact", "min_far_chord", "status")


def _energy_row(spec, tube, params):
    try:
        res = energy(tube, params)
    except SelfContactSingular as exc:
        return [_curve_label(spec), tube.r, params.alpha, math.inf, math.nan,
                not tube.locally_admissible, True, 0.0, "divergent"], exc
    status = "clear"
    if res.locally_inadmissible:
        status = "locally_inadmissible"
    elif res.near_contact:
        status = "near_contact"
    return [_curve_label(spec), tube.r, params.alpha, res.value, res.error_estimate,
            res.locally_inadmissible, res.near_contact, res.min_far_chord, status], None


def _row_code(row):
    if row[-1] == "locally_inadmissible":
        return EXIT_INADMISSIBLE
    if row[-1] in ("divergent", "near_contact"):
        return EXIT_CONTACT
    return EXIT_OK


def cmd_energy(spec, args):
    params = _params(spec, args)
    tube = spec.tube()
    row, exc = _energy_row(spec, tube, params)
    extra = {}
    if exc is not None:
        X, Y = exc.pair
        extra["singular_pair"] = f"({X.u!r},{X.theta!r})-({Y.u!r},{Y.theta!r})"
    return ENERGY_COLUMNS, [row], _metadata(spec, params, **extra), _row_code(row)


def cmd_sweep_r(spec, args):
    rs = args.r_list if args.r_list is not None else list(spec.r_values)
    if not rs:
        raise UsageError("sweep-r needs a non-empty --r-list (or sweep.r_values in the spec)")
    if any(not r > 0 for r in rs):
        raise UsageError("tube radii must be positive")
    if spec.curve is None:
        raise UsageError("sweep-r needs a curve in the spec")
    params = _params(spec, args)
    curve = spec.curve.build()
    e0 = ohara_energy(curve, params.alpha, grid=args.ohara_grid)
    rows, code = [], EXIT_OK
    for r in rs:
        row, _ = _energy_row(spec, Tube(curve, r), params)
        F = row[3]
        rows.append([r, F, F / FOUR_PI2, abs(F / FOUR_PI2 - e0), row[4], row[-1]])
        code = max(code, _row_code(row))
    cols = ("r", "F", "F_over_4pi2", "abs_diff_ohara", "error_estimate", "status")
    md = _metadata(RunSpec(curve=spec.curve, r=min(rs)), params, curve=_curve_label(spec),
                   ohara_energy=e0, ohara_grid=args.ohara_grid)
    return cols, rows, md, code


def cmd_sweep_aspect(spec, args):
    Rs = args.R_list if args.R_list is not None else list(spec.R_values)
    if not Rs:
        raise UsageError("sweep-aspect needs a non-empty --R-list (or sweep.R_values in the spec)")
    if spec.r is None:
        raise UsageError("sweep-aspect needs the tube radius 'r' in the spec")
    r = spec.r
    if any(not R > r for R in Rs):
        raise UsageError("every centerline radius must exceed the tube radius")
    params = _params(spec, args)
    rows, code = [], EXIT_OK
    for R in Rs:
        row, _ = _energy_row(spec, Tube(circle(R), r), params)
        oracle = torus_energy_reduced(R, r, params.alpha, args.oracle_grid) if params.measure == "coordinate" else math.nan
        rows.append([R, R / r, row[3], row[4], oracle, abs(row[3] - oracle) / abs(oracle), row[7], row[-1]])
        code = max(code, _row_code(row))
    cols = ("R", "R_over_r", "F", "error_estimate", "torus_oracle", "rel_diff_oracle",
            "min_far_chord", "status")
    return cols, rows, _metadata(spec, params, oracle_grid=args.oracle_grid), code


def cmd_exponent_study(spec, args):
    base = (spec.exponent if spec is not None and spec.exponent is not None else ExponentSpec())
    geometry = args.geometry or base.geometry
    alphas = args.alpha_list if args.alpha_list is not None else list(base.alphas)
    deltas = args.delta_list if args.delta_list is not None else list(base.deltas)
    if args.alpha is not None:
        alphas = [args.alpha]
    if not alphas:
        raise UsageError("no exponents given")
    bad = [a for a in alphas if not 0.0 < a < 3.0]
    if bad:
        raise UsageError(f"alpha must lie in (0, 3): {bad}")
    if len(deltas) < 3:
        raise UsageError("need at least three cutoff radii")
    if any(not 0.0 < d < base.eps for d in deltas):
        raise UsageError(f"cutoff radii must lie in (0, eps={base.eps})")
    rows = []
    for a in alphas:
        st = exponent_study(geometry, a, deltas, eps=base.eps, L=base.L)
        for i, (d, J) in enumerate(zip(st.deltas, st.values)):
            dJ = st.differences[i - 1] if i > 0 else None
            rows.append([geometry, a, d, J, dJ, st.verdict])
    cols = ("geometry", "alpha", "delta", "J", "delta_J", "verdict")
    md = _metadata(eps=base.eps, L=base.L, r=1.0, verdict_rule="converges iff |dJ_k| >= 2 |dJ_k+1|")
    return cols, rows, md, EXIT_OK


def cmd_report(spec, args):
    tube = spec.tube()
    rep = admissibility_report(tube)
    d = rep.as_dict()
    code = {INADMISSIBLE: EXIT_INADMISSIBLE, SELF_CONTACT: EXIT_CONTACT,
            INTERPENETRATION: EXIT_CONTACT}.get(rep.classification, EXIT_OK)
    md = _metadata(spec, None, curve=_curve_label(spec))
    return tuple(d), [list(d.values())], md, code


COMMANDS = {
    "energy": cmd_energy,
    "sweep-r": cmd_sweep_r,
    "sweep-aspect": cmd_sweep_aspect,
    "exponent-study": cmd_exponent_study,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"mobitube: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        spec = load_spec(args.spec) if args.spec else None
    except OSError as exc:
        print(f"mobitube: cannot read spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecError as exc:
        print(f"mobitube: spec error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        cols, rows, md, code = COMMANDS[args.command](spec, args)
    except UsageError as exc:
        print(f"mobitube: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecError as exc:
        print(f"mobitube: spec error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = render(cols, rows, md, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
