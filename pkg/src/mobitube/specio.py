"""JSON run specifications.

A document looks like::

    {
      "curve": {"preset": "circle", "params": {"R": "2"}},
      "r": "0.5",
      "energy": {"alpha": 2, "grid": [32, 32]},
      "sweep": {"r_values": ["0.2", "0.1"]},
      "exponent": {"geometry": "point_contact", "alphas": [1.5], "deltas": [0.01, 0.005, 0.0025]}
    }

or with explicit coefficients, ``"curve": {"fourier": {"cos": [[...], [...], [...]],
"sin": [...]}}``.  Any number may be written as a decimal string; strings
are parsed with ``float`` so they round-trip bit-exactly.  Unknown keys are
errors.
"""
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .curve import PRESETS, ClosedCurve
from .energy.exponent import GEOMETRIES
from .energy.functional import EnergyParams
from .errors import DegenerateFrame, SpecError
from .tube import Tube

PRESET_PARAMS = {
    "circle": {"R"},
    "torus_centerline": {"R"},
    "trefoil": set(),
    "limacon": {"a", "b", "h"},
}


@dataclass(frozen=True)
class CurveSpec:
    preset: str = None
    params: tuple = ()
    cos: tuple = None
    sin: tuple = None

    def build(self):
        if self.preset is not None:
            return PRESETS[self.preset](**dict(self.params))
        return ClosedCurve(np.array(self.cos), np.array(self.sin))


@dataclass(frozen=True)
class ExponentSpec:
    geometry: str = "point_contact"
    alphas: tuple = (1.0, 1.5, 1.9, 2.0, 2.5)
    deltas: tuple = (1e-2, 5e-3, 2.5e-3)
    eps: float = 0.25
    L: float = 1.0


@dataclass(frozen=True)
class RunSpec:
    curve: CurveSpec = None
    r: float = None
    energy: EnergyParams = field(default_factory=EnergyParams)
    r_values: tuple = ()
    R_values: tuple = ()
    exponent: ExponentSpec = None

    def tube(self):
        if self.curve is None or self.r is None:
            raise SpecError("spec needs both 'curve' and 'r'")
        return Tube(self.curve.build(), self.r)


def _line_of(text, key):
    if text is None:
        return None
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


class _Reader:
    def __init__(self, text):
        self.text = text

    def fail(self, msg, key):
        raise SpecError(msg, field=key, line=_line_of(self.text, key.split(".")[-1]))

    def number(self, value, key):
        if isinstance(value, bool):
            self.fail("expected a number, got a boolean", key)
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            try:
                return float(value.strip())
            except ValueError:
                self.fail(f"not a decimal number: {value!r}", key)
        self.fail(f"expected a number, got {type(value).__name__}", key)

    def integer(self, value, key):
        x = self.number(value, key)
        if x != int(x):
            self.fail(f"expected an integer, got {value!r}", key)
        return int(x)

    def numbers(self, value, key):
        if not isinstance(value, list):
            self.fail("expected a list", key)
        return tuple(self.number(v, f"{key}[{i}]") for i, v in enumerate(value))

    def obj(self, value, key, allowed):
        if not isinstance(value, dict):
            self.fail("expected an object", key)
        for k in value:
            if k not in allowed:
                raise SpecError(f"unknown field (allowed: {', '.join(sorted(allowed))})",
                                field=f"{key}.{k}" if key else k, line=_line_of(self.text, k))
        return value


def _curve(rd, doc):
    d = rd.obj(doc, "curve", {"preset", "params", "fourier"})
    if ("preset" in d) == ("fourier" in d):
        rd.fail("give exactly one of 'preset' or 'fourier'", "curve")
    if "preset" in d:
        name = d["preset"]
        if name not in PRESET_PARAMS:
            rd.fail(f"unknown preset {name!r}; choose from {', '.join(PRESET_PARAMS)}", "curve.preset")
        params = rd.obj(d.get("params", {}), "curve.params", PRESET_PARAMS[name])
        items = tuple(sorted((k, rd.number(v, f"curve.params.{k}")) for k, v in params.items()))
        return CurveSpec(preset=name, params=items)
    if "params" in d:
        rd.fail("'params' only applies to presets", "curve.params")
    f = rd.obj(d["fourier"], "curve.fourier", {"cos", "sin"})
    arrays = []
    for part in ("cos", "sin"):
        rows = f.get(part)
        if not isinstance(rows, list) or len(rows) != 3:
            rd.fail("expected three coefficient rows (x, y, z)", f"curve.fourier.{part}")
        arrays.append(tuple(rd.numbers(row, f"curve.fourier.{part}[{i}]") for i, row in enumerate(rows)))
    lens = {len(row) for a in arrays for row in a}
    if len(lens) != 1:
        rd.fail("all coefficient rows must have the same length", "curve.fourier")
    return CurveSpec(cos=arrays[0], sin=arrays[1])


def _energy(rd, doc):
    d = rd.obj(doc, "energy", {"alpha", "grid", "eps_d", "refinement_levels", "measure"})
    kw = {}
    if "alpha" in d:
        kw["alpha"] = rd.number(d["alpha"], "energy.alpha")
    if "grid" in d:
        g = d["grid"]
        if not isinstance(g, list) or len(g) != 2:
            rd.fail("expected [N_S, N_THETA]", "energy.grid")
        kw["grid"] = (rd.integer(g[0], "energy.grid[0]"), rd.integer(g[1], "energy.grid[1]"))
    if d.get("eps_d") is not None:
        kw["eps_d"] = rd.number(d["eps_d"], "energy.eps_d")
    if "refinement_levels" in d:
        kw["refinement_levels"] = rd.integer(d["refinement_levels"], "energy.refinement_levels")
    if "measure" in d:
        kw["measure"] = d["measure"]
    try:
        return EnergyParams(**kw)
    except ValueError as exc:
        rd.fail(str(exc), "energy")


def _exponent(rd, doc):
    d = rd.obj(doc, "exponent", {"geometry", "alphas", "deltas", "eps", "L"})
    kw = {}
    if "geometry" in d:
        if d["geometry"] not in GEOMETRIES:
            rd.fail(f"geometry must be one of {GEOMETRIES}", "exponent.geometry")
        kw["geometry"] = d["geometry"]
    for k in ("alphas", "deltas"):
        if k in d:
            kw[k] = rd.numbers(d[k], f"exponent.{k}")
    for k in ("eps", "L"):
        if k in d:
            kw[k] = rd.number(d[k], f"exponent.{k}")
    return ExponentSpec(**kw)


def parse_spec(text):
    """Parse and validate a JSON spec document into a :class:`RunSpec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from None
    rd = _Reader(text)
    rd.obj(doc, "", {"curve", "r", "energy", "sweep", "exponent"})
    kw = {}
    if "curve" in doc:
        kw["curve"] = _curve(rd, doc["curve"])
    if "r" in doc:
        r = rd.number(doc["r"], "r")
        if not r > 0:
            rd.fail("tube radius must be positive", "r")
        kw["r"] = r
    if "energy" in doc:
        kw["energy"] = _energy(rd, doc["energy"])
    if "sweep" in doc:
        sw = rd.obj(doc["sweep"], "sweep", {"r_values", "R_values"})
        if "r_values" in sw:
            kw["r_values"] = rd.numbers(sw["r_values"], "sweep.r_values")
        if "R_values" in sw:
            kw["R_values"] = rd.numbers(sw["R_values"], "sweep.R_values")
    if "exponent" in doc:
        kw["exponent"] = _exponent(rd, doc["exponent"])
    spec = RunSpec(**kw)
    if spec.curve is not None:
        try:
            spec.curve.build()
        except (DegenerateFrame, ValueError, TypeError) as exc:
            raise SpecError(f"invalid curve: {exc}", field="curve", line=_line_of(text, "curve")) from None
    return spec


def load_spec(path):
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


def _num(x):
    return repr(float(x))


def spec_to_dict(spec):
    """Serializable form; every float is written as its shortest exact decimal string."""
    out = {}
    if spec.curve is not None:
        c = spec.curve
        if c.preset is not None:
            out["curve"] = {"preset": c.preset, "params": {k: _num(v) for k, v in c.params}}
        else:
            out["curve"] = {"fourier": {
                "cos": [[_num(v) for v in row] for row in c.cos],
                "sin": [[_num(v) for v in row] for row in c.sin],
            }}
    if spec.r is not None:
        out["r"] = _num(spec.r)
    e = spec.energy
    out["energy"] = {
        "alpha": _num(e.alpha),
        "grid": list(e.grid),
        "eps_d": None if e.eps_d is None else _num(e.eps_d),
        "refinement_levels": e.refinement_levels,
        "measure": e.measure,
    }
    if spec.r_values or spec.R_values:
        out["sweep"] = {}
        if spec.r_values:
            out["sweep"]["r_values"] = [_num(v) for v in spec.r_values]
        if spec.R_values:
            out["sweep"]["R_values"] = [_num(v) for v in spec.R_values]
    if spec.exponent is not None:
        x = spec.exponent
        out["exponent"] = {
            "geometry": x.geometry,
            "alphas": [_num(v) for v in x.alphas],
            "deltas": [_num(v) for v in x.deltas],
            "eps": _num(x.eps),
            "L": _num(x.L),
        }
    return out


def dump_spec(spec):
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"
