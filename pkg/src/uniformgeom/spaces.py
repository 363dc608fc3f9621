"""Example spaces, CSV ingestion and JSON report serialization."""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Optional, Union

import numpy as np

from .bornology import BornologyReport, ScaleProfile
from .exceptions import CSVParseError, DomainError, MetricValidationError
from .metric_core import TOL, FiniteMetricSpace, validate_metric

SCHEMA_VERSION = 1

FAMILIES = (
    "discrete01",
    "sqrt_interval",
    "reciprocal_set",
    "atsuji_pairs",
    "orthonormal_rays",
    "lattice",
    "random_cloud",
    "product_sup",
)


@dataclass(frozen=True)
class SpaceSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        params = {}
        for key, value in self.params.items():
            params[key] = value.to_dict() if isinstance(value, SpaceSpec) else value
        out = {"family": self.family, "params": params}
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        params = {}
        for key, value in dict(data.get("params", {})).items():
            params[key] = cls.from_dict(value) if isinstance(value, dict) and "family" in value else value
        return cls(data["family"], params, data.get("seed"))


def _int_param(params: dict, name: str, lo: int, hi: Optional[int] = None, default=None) -> int:
    if name not in params:
        if default is None:
            raise DomainError(f"missing parameter {name!r}")
        return default
    value = params[name]
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    try:
        if isinstance(value, (bool, float)):
            raise TypeError
        ivalue = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"parameter {name!r} must be an integer, got {value!r}")
    if ivalue < lo or (hi is not None and ivalue > hi):
        rng = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
        raise DomainError(f"parameter {name!r} must be {rng}, got {ivalue}")
    return ivalue


def _float_param(params: dict, name: str, default=None, positive: bool = True) -> float:
    if name not in params:
        if default is None:
            raise DomainError(f"missing parameter {name!r}")
        return float(default)
    try:
        value = float(params[name])
    except (TypeError, ValueError):
        raise DomainError(f"parameter {name!r} must be a real number, got {params[name]!r}")
    if not math.isfinite(value) or (positive and value <= 0):
        raise DomainError(f"parameter {name!r} must be a positive finite real, got {value}")
    return value


def _check_keys(params: dict, allowed: set, family: str):
    extra = set(params) - allowed
    if extra:
        raise DomainError(f"unknown parameter(s) for {family}: {', '.join(sorted(extra))}")


def discrete01(k: int) -> FiniteMetricSpace:
    table = 1.0 - np.eye(k)
    return FiniteMetricSpace.from_matrix(table)


def sqrt_interval(R: float, step: float) -> tuple:
    """Grid ``0, step, ..., R`` with the usual metric and with ``|sqrt(x) - sqrt(y)|``."""
    count = int(math.floor(R / step + 1e-9)) + 1
    grid = np.arange(count) * step
    labels = [f"{x:g}" for x in grid]
    usual = FiniteMetricSpace.from_points(grid, labels=labels)
    root = FiniteMetricSpace.from_points(np.sqrt(grid), labels=labels)
    return usual, root


def reciprocal_set(k: int) -> FiniteMetricSpace:
    """Points ``1/1, 1/2, ..., 1/k`` on the line."""
    n = np.arange(1, k + 1)
    return FiniteMetricSpace.from_points(1.0 / n, labels=[f"1/{i}" for i in n])


def atsuji_pairs(k: int) -> FiniteMetricSpace:
    """Points ``1, 1+1/2, 2, 2+1/3, ..., k, k+1/(k+1)``."""
    pts, labels = [], []
    for i in range(1, k + 1):
        pts += [float(i), i + 1.0 / (i + 1)]
        labels += [f"{i}", f"{i}+1/{i + 1}"]
    return FiniteMetricSpace.from_points(pts, labels=labels)


def orthonormal_rays(N: int, steps: int) -> FiniteMetricSpace:
    """Origin plus the points ``(t/steps) e_i`` for ``t = 1..steps`` on ``N`` orthogonal rays.

    Index 0 is the origin; ray ``i`` (0-based) occupies indices
    ``1 + i*steps .. (i+1)*steps`` with the unit vector ``e_i`` last.
    """
    ray = np.repeat(np.arange(N), steps)
    t = np.tile(np.arange(1, steps + 1), N) / steps
    ray = np.concatenate([[-1], ray])
    t = np.concatenate([[0.0], t])
    same = ray[:, None] == ray[None, :]
    table = np.where(same, np.abs(t[:, None] - t[None, :]), np.sqrt(t[:, None] ** 2 + t[None, :] ** 2))
    labels = ["0"] + [f"{tt:g}e{r + 1}" for r, tt in zip(ray[1:], t[1:])]
    return FiniteMetricSpace.from_matrix(table, labels=labels)


def ray_tips(N: int, steps: int) -> list:
    """Indices of the unit vectors ``e_1..e_N`` in :func:`orthonormal_rays`."""
    return [(i + 1) * steps for i in range(N)]


def lattice(dims: int, side: int) -> FiniteMetricSpace:
    axes = [np.arange(side)] * dims
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dims)
    return FiniteMetricSpace.from_points(pts.astype(float))


def random_cloud(n: int, dim: int, seed: Optional[int] = None) -> FiniteMetricSpace:
    rng = np.random.default_rng(seed)
    return FiniteMetricSpace.from_points(rng.random((n, dim)))


def product_sup(a: FiniteMetricSpace, b: FiniteMetricSpace, cap: bool = True) -> FiniteMetricSpace:
    """Cartesian product with the max of the factor distances.

    With ``cap`` the first factor's distance is truncated at 1 first.
    """
    da = np.asarray(a.dist)
    if cap:
        da = np.minimum(da, 1.0)
    db = np.asarray(b.dist)
    table = np.maximum(da[:, None, :, None], db[None, :, None, :]).reshape(a.n * b.n, a.n * b.n)
    labels = [f"({a.label(i)},{b.label(j)})" for i in range(a.n) for j in range(b.n)]
    return FiniteMetricSpace.from_matrix(table, labels=labels)


def generate(spec: Union[SpaceSpec, dict]):
    """Build the space a :class:`SpaceSpec` describes.

    ``sqrt_interval`` returns a pair ``(usual, root)`` on one carrier; every
    other family returns a single space.
    """
    if isinstance(spec, dict):
        spec = SpaceSpec.from_dict(spec)
    family, p = spec.family, dict(spec.params)
    if family == "discrete01":
        _check_keys(p, {"k"}, family)
        return discrete01(_int_param(p, "k", 1))
    if family == "sqrt_interval":
        _check_keys(p, {"R", "step"}, family)
        R = _float_param(p, "R", default=100)
        step = _float_param(p, "step", default=0.25)
        if R / step > 1e6:
            raise DomainError("parameter 'step' too small for R: more than 10^6 grid points")
        return sqrt_interval(R, step)
    if family == "reciprocal_set":
        _check_keys(p, {"k"}, family)
        return reciprocal_set(_int_param(p, "k", 1))
    if family == "atsuji_pairs":
        _check_keys(p, {"k"}, family)
        return atsuji_pairs(_int_param(p, "k", 1))
    if family == "orthonormal_rays":
        _check_keys(p, {"N", "steps"}, family)
        return orthonormal_rays(_int_param(p, "N", 1), _int_param(p, "steps", 1))
    if family == "lattice":
        _check_keys(p, {"dims", "side"}, family)
        return lattice(_int_param(p, "dims", 1, 6), _int_param(p, "side", 1))
    if family == "random_cloud":
        _check_keys(p, {"n", "dim"}, family)
        return random_cloud(_int_param(p, "n", 1), _int_param(p, "dim", 1), spec.seed)
    if family == "product_sup":
        _check_keys(p, {"a", "b", "cap"}, family)
        if "a" not in p or "b" not in p:
            raise DomainError("product_sup needs parameters 'a' and 'b' (factor specs)")
        factors = []
        for name in ("a", "b"):
            sub = p[name]
            if isinstance(sub, dict):
                sub = SpaceSpec.from_dict(sub)
            if not isinstance(sub, SpaceSpec):
                raise DomainError(f"parameter {name!r} must be a space spec")
            if sub.family == "sqrt_interval":
                raise DomainError(f"parameter {name!r}: sqrt_interval yields two metrics and cannot be a factor")
            factors.append(generate(sub))
        cap = p.get("cap", True)
        if isinstance(cap, str):
            cap = cap.strip().lower() not in ("0", "false", "no")
        return product_sup(factors[0], factors[1], cap=bool(cap))
    raise DomainError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


# -- CSV ----------------------------------------------------------------------


def _open_text(src, mode="r"):
    if hasattr(src, "read") or hasattr(src, "write"):
        return src, False
    return open(src, mode, newline="", encoding="utf-8"), True


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _read_rows(src) -> list:
    fh, owned = _open_text(src)
    try:
        return [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row and any(c.strip() for c in row)]
    finally:
        if owned:
            fh.close()


def _parse_numeric(rows: list) -> np.ndarray:
    width = len(rows[0][1])
    data = []
    for lineno, row in rows:
        if len(row) != width:
            raise CSVParseError(f"expected {width} fields, found {len(row)}", line=lineno)
        values = []
        for col, token in enumerate(row, start=1):
            try:
                values.append(float(token))
            except ValueError:
                raise CSVParseError(f"not a number: {token.strip()!r}", line=lineno, column=col)
        data.append(values)
    return np.array(data, dtype=float)


def load_distance_csv(src, tol: float = TOL) -> FiniteMetricSpace:
    """Read a square distance matrix, with an optional header row of labels."""
    rows = _read_rows(src)
    if not rows:
        raise CSVParseError("no data rows")
    labels = None
    if not _is_number(rows[0][1][0].strip()):
        labels = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
        if not rows:
            raise CSVParseError("header row but no data rows")
    table = _parse_numeric(rows)
    if table.shape[0] != table.shape[1]:
        raise CSVParseError(f"distance matrix must be square, got {table.shape[0]}x{table.shape[1]}")
    if labels is not None and len(labels) != table.shape[0]:
        raise CSVParseError(f"{len(labels)} labels for a {table.shape[0]}-point matrix", line=1)
    if not np.all(np.isfinite(table)):
        raise CSVParseError("non-finite distance in matrix")
    report = validate_metric(table, tol)
    if not report.ok:
        raise MetricValidationError(report)
    return FiniteMetricSpace(table, labels=labels)


def load_points_csv(src, metric: str = "euclidean") -> FiniteMetricSpace:
    rows = _read_rows(src)
    if not rows:
        raise CSVParseError("no data rows")
    pts = _parse_numeric(rows)
    if not np.all(np.isfinite(pts)):
        raise CSVParseError("non-finite coordinate")
    return FiniteMetricSpace.from_points(pts, metric=metric)


def save_distance_csv(space: FiniteMetricSpace, dst, labels: bool = True) -> None:
    fh, owned = _open_text(dst, "w")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        if labels and space.labels is not None:
            names = list(space.labels)
            if any(_is_number(s) for s in names[:1]):
                names = [f"p{s}" if _is_number(s) else s for s in names]
            writer.writerow(names)
        for row in np.asarray(space.dist):
            writer.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write distance CSV to {dst}: {exc}") from exc
    finally:
        if owned:
            fh.close()


def load_subset_file(src) -> list:
    """One point index per line; blank lines and ``#`` comments ignored."""
    fh, owned = _open_text(src)
    try:
        out = []
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise CSVParseError(f"not a point index: {line!r}", line=lineno)
        return out
    finally:
        if owned:
            fh.close()


# -- JSON reports -------------------------------------------------------------


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.12g}")


def _m(m):
    return "inf" if isinstance(m, float) and math.isinf(m) else int(m)


def _profile_dict(profile: ScaleProfile) -> list:
    return [
        {
            "components_met": row.components_met,
            "entries": [{"m": _m(e.m), "method": e.method, "size": e.size} for e in row.entries],
            "eps": _num(row.eps),
        }
        for row in profile.grid
    ]


def _subset_dict(indices, diam, profile) -> dict:
    return {"diameter": _num(diam), "indices": list(indices), "profile": _profile_dict(profile)}


def _clean(obj):
    """Recursively convert to JSON-ready values with 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (str, type(None))):
        return obj
    if isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        return _num(obj)
    if hasattr(obj, "to_dict"):
        return _clean(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_to_dict(report, space=None) -> dict:
    """JSON-ready dict for a report, profile or verification outcome."""
    base = {
        "schema_version": SCHEMA_VERSION,
        "space": "external",
        "eps_grid": [],
        "m_grid": [],
        "subsets": [],
        "flags": [],
    }
    if isinstance(report, BornologyReport):
        base["space"] = report.space
        base["eps_grid"] = [_num(e) for e in report.eps_grid]
        base["m_grid"] = [_m(m) for m in report.m_grid]
        base["subsets"] = [
            _subset_dict(s.subset.indices, s.diameter, s.profile) for s in report.subsets
        ]
        base["flags"] = [
            {"chain_size": f.chain_size, "eps": _num(f.eps), "m": _m(f.m), "net_size": f.net_size, "subset": f.subset}
            for f in report.flags
        ]
        base["summary"] = list(report.summary)
        if report.verification is not None:
            base["verification"] = report.verification
    elif isinstance(report, ScaleProfile):
        base["eps_grid"] = [_num(r.eps) for r in report.grid]
        base["m_grid"] = [_m(e.m) for e in report.grid[0].entries] if report.grid else []
        sub = {"indices": list(report.subset.indices), "profile": _profile_dict(report)}
        if space is not None:
            from .metric_core import diameter

            sub["diameter"] = _num(diameter(space, report.subset))
        base["subsets"] = [sub]
        base["anomalies"] = [[_num(a[0]), _m(a[1]), _m(a[2]), a[3], a[4]] for a in report.anomalies]
    elif isinstance(report, list):
        base["verification"] = report
    elif isinstance(report, dict):
        base.update(report)
    else:
        raise TypeError(f"cannot serialize report of type {type(report).__name__}")
    if isinstance(base["space"], SpaceSpec):
        base["space"] = base["space"].to_dict()
    return _clean(base)


def dumps_report(report, space=None) -> str:
    return json.dumps(report_to_dict(report, space), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def save_report_json(report, dst, space=None) -> None:
    text = dumps_report(report, space)
    if hasattr(dst, "write"):
        dst.write(text)
        return
    try:
        with open(dst, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {os.fspath(dst)}: {exc}") from exc


REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "space", "eps_grid", "m_grid", "subsets", "flags"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "space": {"anyOf": [{"const": "external"}, {"type": "object", "required": ["family", "params"]}]},
        "eps_grid": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "m_grid": {
            "type": "array",
            "items": {"anyOf": [{"type": "integer", "minimum": 1}, {"const": "inf"}]},
        },
        "subsets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["indices", "profile"],
                "properties": {
                    "indices": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "diameter": {"type": "number", "minimum": 0},
                    "profile": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["eps", "entries", "components_met"],
                            "properties": {
                                "eps": {"type": "number"},
                                "components_met": {"type": "integer", "minimum": 1},
                                "entries": {
                                    "type": "array",
                                    "items": {
                                        "type": "object",
                                        "required": ["m", "size", "method"],
                                        "properties": {
                                            "m": {"anyOf": [{"type": "integer", "minimum": 1}, {"const": "inf"}]},
                                            "size": {"type": "integer", "minimum": 1},
                                            "method": {"enum": ["greedy", "exact"]},
                                        },
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
        "flags": {"type": "array", "items": {"type": "object"}},
        "verification": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["property", "instances", "failures"],
                "properties": {
                    "property": {"type": "string"},
                    "instances": {"type": "integer", "minimum": 0},
                    "failures": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}
