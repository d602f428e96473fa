"""
Experiment configurations.

A configuration is a TOML file (or a JSON file with the same schema)::

    d = 1

    [[points]]
    w = ["0", "1"]
    c = "0"

    [[points]]
    w = ["1", "0"]
    c = "1/2"

    [sections]
    s = "x0 + x1"

    [params]
    n_max = 20
    target = "3/4,1/4"

Rationals may be written as integers or as strings. A second metric, used
when comparing two metrics, goes under ``[[points2]]``.
"""
from __future__ import annotations

import json
import re
import sys
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Optional

from shilov_eq import defaults
from shilov_eq.errors import Config_Error, Validation_Error
from shilov_eq.hahn import Log_Val, format_log_val, parse_log_val, to_rat
from shilov_eq.metrics import Metric_Spec, metric_spec, monomial_point
from shilov_eq.polys import Hom_Poly, format_poly, parse_poly

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

#: The two serializations of a configuration.
Config_Format = Literal["toml", "json"]

_TOML_ERROR_LINE = re.compile(r"line (\d+)")


@dataclass(frozen=True)
class Params:
    """Command parameters; every one of them may be overridden by a flag."""

    n_max: int = defaults.harness_n_max
    tol: float = defaults.solver_tolerance
    #: Precision cap of the elimination, in val units.
    prec: Log_Val = defaults.precision_cap
    #: Target coefficients of the solver.
    target: Optional[tuple[Fraction, ...]] = None
    #: Subsets of Shilov indices to build separating sections for.
    subsets: tuple[tuple[int, ...], ...] = tuple()
    #: Name of the section used by the harness; the first one by default.
    section: Optional[str] = None
    #: Level of the counting estimator.
    level: int = defaults.counting_degree


@dataclass(frozen=True)
class Experiment_Config:
    spec: Metric_Spec
    #: The metric compared against by the distance command.
    spec2: Optional[Metric_Spec] = None
    sections: Mapping[str, Hom_Poly] = field(default_factory=dict)
    params: Params = field(default_factory=Params)

    def section(self, name: Optional[str] = None) -> Hom_Poly:
        """The named section, or the configured / first one."""
        name = name if name is not None else self.params.section
        if name is None:
            if not self.sections:
                raise Config_Error("the configuration defines no sections")
            return next(iter(self.sections.values()))
        try:
            return self.sections[name]
        except KeyError:
            raise Config_Error(f"no section named {name!r}") from None


def _locate(source: str, key: str, occurrence: int = 0) -> Optional[int]:
    """1-based line of the ``occurrence``-th TOML key or JSON member ``key``."""
    pattern = re.compile(
        rf"^\s*(?:\"?{re.escape(key)}\"?\s*[=:]|\[\[?\s*{re.escape(key)}\s*\]\]?)"
    )
    seen = 0
    for number, line in enumerate(source.splitlines(), start=1):
        if pattern.search(line):
            if seen == occurrence:
                return number
            seen += 1
    return None


def parse_target(text: str) -> tuple[Fraction, ...]:
    """``"3/4,1/4"`` to a point of the standard simplex."""
    try:
        target = tuple(to_rat(part.strip()) for part in text.split(","))
    except Validation_Error as e:
        raise Config_Error(f"malformed target {text!r}: {e}") from e
    if any(value < 0 for value in target) or sum(target) != 1:
        raise Config_Error(f"target {text!r} is not in the standard simplex")
    return target


def format_target(target: Sequence[Fraction]) -> str:
    return ",".join(str(value) for value in target)


def _parse_points(raw: Any, d: int, key: str, source: str) -> Metric_Spec:
    if not isinstance(raw, list):
        raise Config_Error(f"{key!r} has to be a list of points", _locate(source, key))
    points = list()
    for k, entry in enumerate(raw):
        line = _locate(source, key, k)
        if not isinstance(entry, Mapping) or "w" not in entry:
            raise Config_Error(f"point {k} of {key!r} needs a weight 'w'", line)
        try:
            points.append(monomial_point(entry["w"], entry.get("c", 0)))
        except Validation_Error as e:
            raise Config_Error(f"point {k} of {key!r}: {e}", line) from e
    try:
        return metric_spec(d, points)
    except Validation_Error as e:
        raise Config_Error(str(e), _locate(source, key)) from e


def _parse_params(raw: Mapping[str, Any], source: str) -> Params:
    known = {f.name for f in fields(Params)}
    unknown = set(raw) - known
    if unknown:
        key = sorted(unknown)[0]
        raise Config_Error(f"unknown parameter {key!r}", _locate(source, key))

    values: dict[str, Any] = dict()
    for key, value in raw.items():
        try:
            if key in ("n_max", "level"):
                if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                    raise Config_Error(f"{key} has to be a non-negative integer")
                values[key] = value
            elif key == "tol":
                values[key] = float(value)
                if not values[key] > 0:
                    raise Config_Error("tol has to be positive")
            elif key == "prec":
                values[key] = parse_log_val(str(value))
            elif key == "target":
                values[key] = parse_target(
                    value if isinstance(value, str) else ",".join(map(str, value))
                )
            elif key == "subsets":
                values[key] = tuple(tuple(int(i) for i in subset) for subset in value)
            elif key == "section":
                values[key] = str(value)
        except Config_Error as e:
            raise Config_Error(str(e), _locate(source, key)) from e
        except (TypeError, ValueError) as e:
            raise Config_Error(f"invalid {key}: {e}", _locate(source, key)) from e
    return Params(**values)


def config_from_dict(data: Mapping[str, Any], source: str = "") -> Experiment_Config:
    """
    Validate a decoded configuration.

    :param source: The text the data was decoded from, used to report line
      numbers.
    """
    unknown = set(data) - {"d", "points", "points2", "sections", "params"}
    if unknown:
        key = sorted(unknown)[0]
        raise Config_Error(f"unknown key {key!r}", _locate(source, key))
    d = data.get("d")
    if isinstance(d, bool) or not isinstance(d, int) or d < 1:
        raise Config_Error(f"d has to be a positive integer, got {d!r}", _locate(source, "d"))
    if "points" not in data:
        raise Config_Error("no points given")

    spec = _parse_points(data["points"], d, "points", source)
    spec2 = (
        _parse_points(data["points2"], d, "points2", source)
        if "points2" in data
        else None
    )
    for table in ("sections", "params"):
        if not isinstance(data.get(table, dict()), Mapping):
            raise Config_Error(f"{table!r} has to be a table", _locate(source, table))
    sections: dict[str, Hom_Poly] = dict()
    for name, text in data.get("sections", dict()).items():
        try:
            sections[name] = parse_poly(str(text), d)
        except Validation_Error as e:
            raise Config_Error(f"section {name!r}: {e}", _locate(source, name)) from e
    params = _parse_params(data.get("params", dict()), source)
    if params.section is not None and params.section not in sections:
        raise Config_Error(
            f"no section named {params.section!r}", _locate(source, "section")
        )
    return Experiment_Config(spec=spec, spec2=spec2, sections=sections, params=params)


def parse_config(text: str, fmt: Config_Format = "toml") -> Experiment_Config:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise Config_Error(e.msg, e.lineno) from e
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            match = _TOML_ERROR_LINE.search(str(e))
            raise Config_Error(str(e), int(match.group(1)) if match else None) from e
    if not isinstance(data, Mapping):
        raise Config_Error("a configuration has to be a table")
    return config_from_dict(data, text)


def format_of(path: Path) -> Config_Format:
    return "json" if path.suffix.lower() == ".json" else "toml"


def load_config(path: str | Path) -> Experiment_Config:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise Config_Error(f"cannot read {path}: {e}") from e
    return parse_config(text, format_of(path))


def with_overrides(config: Experiment_Config, **overrides: Any) -> Experiment_Config:
    """Replace the given parameters; ``None`` values are ignored."""
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return config
    return replace(config, params=replace(config.params, **overrides))


def _points_to_list(sigma: Metric_Spec) -> list[dict[str, Any]]:
    return [
        {"w": [str(w_j) for w_j in point.w], "c": str(point.c)} for point in sigma.points
    ]


def config_to_dict(config: Experiment_Config) -> dict[str, Any]:
    """The JSON-compatible form that :func:`config_from_dict` reads back."""
    data: dict[str, Any] = {"d": config.spec.d, "points": _points_to_list(config.spec)}
    if config.spec2 is not None:
        data["points2"] = _points_to_list(config.spec2)
    if config.sections:
        data["sections"] = {
            name: format_poly(f) for name, f in config.sections.items()
        }
    params = config.params
    data["params"] = {
        "n_max": params.n_max,
        "tol": params.tol,
        "prec": format_log_val(params.prec),
        "level": params.level,
    }
    if params.target is not None:
        data["params"]["target"] = format_target(params.target)
    if params.subsets:
        data["params"]["subsets"] = [list(subset) for subset in params.subsets]
    if params.section is not None:
        data["params"]["section"] = params.section
    return data


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    # JSON string escapes are valid in TOML basic strings
    return json.dumps(str(value), ensure_ascii=False)


def dump_config(config: Experiment_Config, fmt: Config_Format = "toml") -> str:
    data = config_to_dict(config)
    if fmt == "json":
        return json.dumps(data, indent=2) + "\n"

    lines = [f"d = {data['d']}"]
    for key in ("points", "points2"):
        for point in data.get(key, list()):
            lines += ["", f"[[{key}]]"]
            lines += [f"{name} = {_toml_value(value)}" for name, value in point.items()]
    for table in ("sections", "params"):
        if table in data:
            lines += ["", f"[{table}]"]
            lines += [
                f"{json.dumps(name)} = {_toml_value(value)}"
                if table == "sections"
                else f"{name} = {_toml_value(value)}"
                for name, value in data[table].items()
            ]
    return "\n".join(lines) + "\n"
