"""Tabular and JSON reports of the commands, and reading them back."""
from __future__ import annotations

import json
from collections.abc import Iterator, Mapping, Sequence
from fractions import Fraction
from pathlib import Path
from typing import IO, Any, Optional, Union

import pandas as pd

from shilov_eq.equidistribution import (
    Convergence_Report,
    Eq_Measure,
    Harness_Row,
    chi_a_count,
)
from shilov_eq.errors import Validation_Error
from shilov_eq.geometry import cell_volume
from shilov_eq.linalg import Pivot
from shilov_eq.metrics import Metric_Spec, shilov_set
from shilov_eq.polys import chi

#: Where a report goes: a path, or an open text stream such as ``sys.stdout``.
Target = Union[str, Path, IO[str]]

HARNESS_COLUMNS = ["n", "chi", "lhs", "rhs", "err", "n_err", "certified"]
LAMBDA_COLUMNS = ["index", "w", "c", "shilov", "lambda", "count_ratio", "bound"]


def _harness_dicts(report: Convergence_Report) -> Iterator[dict[str, Any]]:
    for row in report.rows:
        yield {
            "n": row.n,
            "chi": row.chi,
            "lhs": str(row.lhs),
            "rhs": str(row.rhs),
            "err": str(row.err),
            "n_err": str(row.n_err),
            "certified": row.certified,
        }


def harness_frame(report: Convergence_Report) -> pd.DataFrame:
    """One row per degree; rationals are kept exact as ``p/q`` strings."""
    return pd.DataFrame(_harness_dicts(report), columns=HARNESS_COLUMNS)


def write_csv(df: pd.DataFrame, target: Target) -> None:
    if isinstance(target, (str, Path)):
        Path(target).expanduser().parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(Path(target).expanduser(), index=False, lineterminator="\n")
    else:
        df.to_csv(target, index=False, lineterminator="\n")


def write_harness_csv(report: Convergence_Report, target: Target) -> None:
    write_csv(harness_frame(report), target)


def read_harness_csv(path: Union[str, Path, IO[str]]) -> Convergence_Report:
    """Inverse of :func:`write_harness_csv`."""
    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = set(HARNESS_COLUMNS) - set(df.columns)
    if missing:
        raise Validation_Error(f"not a harness report, missing {sorted(missing)}")
    try:
        rows = tuple(
            Harness_Row(
                n=int(entry["n"]),
                chi=int(entry["chi"]),
                lhs=Fraction(entry["lhs"]),
                rhs=Fraction(entry["rhs"]),
                err=Fraction(entry["err"]),
                n_err=Fraction(entry["n_err"]),
                certified=entry["certified"] == "True",
            )
            for entry in df.to_dict(orient="records")
        )
    except ValueError as e:
        raise Validation_Error(f"malformed harness report: {e}") from e
    rhs = rows[0].rhs if rows else Fraction(0)
    return Convergence_Report(rows=rows, rhs=rhs)


def harness_to_json(report: Convergence_Report) -> dict[str, Any]:
    return {
        "rhs": str(report.rhs),
        "certified": report.certified,
        "fitted_constant": str(report.fitted_constant()),
        "rows": list(_harness_dicts(report)),
    }


def lambda_frame(sigma: Metric_Spec, mu: Eq_Measure, n: int) -> pd.DataFrame:
    """
    Per point: whether it is Shilov, its coefficient, and the monomial
    fraction ``chi_a(n) / chi(n)`` next to it.

    ``lambda`` is the exact cell volume for ``d <= 2``; for larger ``d`` it
    is the counting estimate and ``bound`` its error bar.
    """
    shilov = shilov_set(sigma)
    total = chi(sigma.d, n)

    def entries() -> Iterator[dict[str, Any]]:
        for a, point in enumerate(sigma.points):
            if sigma.d <= 2:
                value = cell_volume(sigma.affines, a) if a in shilov else Fraction(0)
            else:
                value = mu.lambdas[a]
            yield {
                "index": a,
                "w": " ".join(str(w_j) for w_j in point.w),
                "c": str(point.c),
                "shilov": a in shilov,
                "lambda": str(value),
                "count_ratio": str(Fraction(chi_a_count(sigma, a, n), total)),
                "bound": "" if mu.bound is None else str(mu.bound),
            }

    return pd.DataFrame(entries(), columns=LAMBDA_COLUMNS)


def pivots_to_json(traces: Mapping[int, Sequence[Pivot]]) -> dict[str, Any]:
    """The pivot sequence of every degree, keyed by the degree."""
    return {str(n): [pivot.to_json() for pivot in trace] for n, trace in traces.items()}


def write_json(data: Any, target: Target) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if isinstance(target, (str, Path)):
        path = Path(target).expanduser()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        target.write(text)


def summary_frame(
    counts: Mapping[str, tuple[int, int]], gating: Optional[Mapping[str, bool]] = None
) -> pd.DataFrame:
    """Pass counts of the property suites, one row per suite."""
    return pd.DataFrame(
        (
            {
                "suite": name,
                "passed": passed,
                "total": total,
                "gating": True if gating is None else gating.get(name, True),
            }
            for name, (passed, total) in counts.items()
        ),
        columns=["suite", "passed", "total", "gating"],
    )
