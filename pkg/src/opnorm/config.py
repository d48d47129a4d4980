"""Run configuration: INI files with a fixed schema, plus inline spellings used on the command line."""

from __future__ import annotations

import configparser
import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ConfigInvalid
from .opspace import OperatorHandle
from .spaces import TOL_EXACT, TOL_QUAD, FiniteSpace, SampleSet, ScalarField
from .testfn import FrechetMetricParams

SCHEMA: dict[str, set[str]] = {
    "run": {"seed", "out", "tol_exact", "tol_quad"},
    "space": {"dimension", "field", "norm", "weights"},
    "codomain": {"dimension", "field", "norm", "weights"},
    "operator": {"name", "expr", "kind", "samples", "radius"},
    "family": {"kind", "size", "dimension"},
    "metric": {"a", "b", "N", "I", "variant", "domain_lo", "domain_hi", "grid_density", "step"},
    "probes": {"count", "radius_min", "radius_max"},
    "extend": {"points", "values", "targets", "norm", "scale", "weights", "M1", "M2", "imag_values",
               "dimension", "base", "coefficients", "t_grid", "basis", "k"},
    "bd": {"kind", "algebra", "samples", "terms"},
    "fourier": {"width", "center", "length", "vectors", "k_max", "t_max", "t_count"},
    "kernel": {"expr", "lo", "hi", "breakpoints"},
}


@dataclass
class RunConfig:
    seed: int = 0
    tol_exact: float = TOL_EXACT
    tol_quad: float = TOL_QUAD
    out: str | None = None
    sections: dict[str, dict[str, str]] = field(default_factory=dict)

    def section(self, name: str) -> dict[str, str]:
        return self.sections.get(name, {})

    def get(self, section: str, key: str, default: Any = None, cast=str):
        raw = self.section(section).get(key)
        if raw is None:
            return default
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"[{section}] {key} = {raw!r}: {exc}") from None


def load_config(path: str | None, overrides: dict | None = None) -> RunConfig:
    """Parse and validate; unknown sections or keys raise ConfigInvalid."""
    sections: dict[str, dict[str, str]] = {}
    if path:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigInvalid(f"cannot read {path}: {exc}") from None
        for name in parser.sections():
            if name not in SCHEMA:
                raise ConfigInvalid(f"unknown section [{name}]")
            keys = dict(parser[name])
            bad = set(keys) - SCHEMA[name]
            if bad:
                raise ConfigInvalid(f"unknown keys in [{name}]: {sorted(bad)}")
            sections[name] = keys
    cfg = RunConfig(sections=sections)
    cfg.seed = cfg.get("run", "seed", 0, int)
    cfg.tol_exact = cfg.get("run", "tol_exact", TOL_EXACT, float)
    cfg.tol_quad = cfg.get("run", "tol_quad", TOL_QUAD, float)
    cfg.out = cfg.get("run", "out", None)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    if cfg.tol_exact <= 0 or cfg.tol_quad <= 0:
        raise ConfigInvalid("tolerances must be positive")
    return cfg


def parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([complex(v) if "j" in v else float(v) for v in text.replace(",", " ").split()])
    except ValueError:
        raise ConfigInvalid(f"bad vector {text!r}") from None


def parse_vectors(text: str) -> np.ndarray:
    """``1 0; -1 0`` -> [[1, 0], [-1, 0]]."""
    rows = [parse_vector(r) for r in text.split(";") if r.strip()]
    if rows and len({len(r) for r in rows}) != 1:
        raise ConfigInvalid("vectors must share one length")
    return np.array(rows)


def space_from_section(sec: dict[str, str]) -> FiniteSpace:
    try:
        dim = int(sec.get("dimension", "1"))
        field_ = ScalarField(sec.get("field", "real"))
        weights = tuple(parse_vector(sec["weights"]).real) if "weights" in sec else None
    except (ValueError, KeyError) as exc:
        raise ConfigInvalid(f"bad space description: {exc}") from None
    return FiniteSpace(dim, field_, sec.get("norm", "ell2"), weights)


def parse_space(text: str) -> FiniteSpace:
    """``ell2:3``, ``weighted:1,2,3`` or ``ell1:2:complex``."""
    parts = text.split(":")
    norm = parts[0]
    if norm == "weighted":
        if len(parts) < 2:
            raise ConfigInvalid("weighted needs weights, e.g. weighted:1,2")
        w = parse_vector(parts[1]).real
        field_ = parts[2] if len(parts) > 2 else "real"
        return FiniteSpace(len(w), ScalarField(field_), "weighted", tuple(w))
    try:
        dim = int(parts[1]) if len(parts) > 1 else 1
        field_ = ScalarField(parts[2]) if len(parts) > 2 else ScalarField.REAL
    except ValueError as exc:
        raise ConfigInvalid(f"bad space {text!r}: {exc}") from None
    return FiniteSpace(dim, field_, norm)


def read_csv_vectors(path: str) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    out = []
    for r in rows:
        try:
            out.append([complex(v) if "j" in v else float(v) for v in r])
        except ValueError:
            continue  # header row
    return np.array(out)


def parse_samples(text: str, space: FiniteSpace, seed: int) -> SampleSet:
    """``halton:N[:radius]`` or a CSV file of vectors (0 is always added)."""
    if text.startswith("halton"):
        parts = text.split(":")
        try:
            n = int(parts[1]) if len(parts) > 1 else 256
            radius = float(parts[2]) if len(parts) > 2 else 2.0
        except ValueError:
            raise ConfigInvalid(f"bad sample spec {text!r}") from None
        return SampleSet.generate(space, n, seed, radius)
    if not Path(text).exists():
        raise ConfigInvalid(f"sample file {text} not found")
    return SampleSet(read_csv_vectors(text), space, seed).with_zero()


_SAFE = {name: getattr(np, name) for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sum", "dot", "pi", "linalg", "maximum", "minimum", "where")}


def _expr_evaluator(expr: str):
    try:
        code = compile(expr, "<operator>", "eval")
    except SyntaxError as exc:
        raise ConfigInvalid(f"bad expression {expr!r}: {exc}") from None
    for name in code.co_names:
        if name not in _SAFE and name not in ("x", "np", "norm", "inner"):
            raise ConfigInvalid(f"name {name!r} is not allowed in operator expressions")
    env = {"__builtins__": {}, "np": np, "norm": np.linalg.norm, **_SAFE}
    return lambda x: eval(code, env, {"x": x})


def builtin_operator(name: str, dom: FiniteSpace, cod: FiniteSpace | None = None) -> OperatorHandle:
    """Named operators for the CLI; anything else is read as a numpy expression in ``x``."""
    cod = cod or dom
    n = min(dom.dimension, cod.dimension)

    def fit(v):
        out = np.zeros(cod.dimension, dtype=np.result_type(v, float))
        out[:n] = np.asarray(v).reshape(-1)[:n]
        return out

    table = {
        "identity": (lambda x: fit(x), True),
        "zero": (lambda x: np.zeros(cod.dimension), True),
        "double": (lambda x: fit(2 * x), True),
        "square": (lambda x: fit(x * x), False),
        "cube": (lambda x: fit(x**3), False),
        "abs_plus_one": (lambda x: fit(np.abs(x) + 1), False),
        "norm_times_x": (lambda x: fit(dom.norm(x) * x), False),
        "x_sin_inv_norm": (lambda x: fit(x * abs(np.sin(1 / dom.norm(x)))) if dom.norm(x) > 0 else np.zeros(cod.dimension), False),
    }
    if name in table:
        ev, lin = table[name]
        return OperatorHandle(ev, dom, cod, lin, name)
    ev = _expr_evaluator(name)
    return OperatorHandle(lambda x: fit(ev(x)), dom, cod, None, name)


def metric_params(cfg: RunConfig, anchors=()) -> FrechetMetricParams:
    sec = cfg.section("metric")
    lo = cfg.get("metric", "domain_lo", None, float)
    hi = cfg.get("metric", "domain_hi", None, float)
    domain = ((lo,), (hi,)) if lo is not None and hi is not None else None
    if (lo is None) != (hi is None):
        raise ConfigInvalid("domain_lo and domain_hi go together")
    kw = dict(
        a=cfg.get("metric", "a", 10.0, float),
        b=cfg.get("metric", "b", 1.0, float),
        N=cfg.get("metric", "N", 2, int),
        I=cfg.get("metric", "I", None, int),
        variant=sec.get("variant", "C_inf"),
        domain=domain if sec else ((-3.0,), (3.0,)),
        grid_density=cfg.get("metric", "grid_density", 400.0, float),
        step=cfg.get("metric", "step", 1.0, float),
        anchors=tuple(anchors),
    )
    return FrechetMetricParams(**kw)


def to_jsonable(obj):
    """numpy scalars and arrays to plain JSON values; inf as the string "inf"."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if f != f:
            return "nan"
        if f in (float("inf"), float("-inf")):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
