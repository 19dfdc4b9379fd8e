"""End-to-end heterogeneity analysis and serializable reports.

:func:`analyze` aggregates a dataset, builds the observed interval order and
one or more reference orders, and collects the normalized Hamming distances
together with group tables into a :class:`HeterogeneityReport`.
:func:`whatif_exclusion` sweeps exclusion floors and reports how the
distance to a tier scheme reacts when weak universities are removed.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .data import Dataset, aggregate
from .ideals import ClusteredIdeal, DesiredIdeal, DesiredSpec, GroupRow, UniformIdeal
from .imputation import FORMS
from .orders import (
    IntervalOrder,
    UniversityStats,
    build_interval_order,
    hamming,
    interval_mean_std,
    interval_min_max,
)

__all__ = [
    "IdealOutcome",
    "IdealResult",
    "ExclusionOutcome",
    "ExclusionResult",
    "HeterogeneityReport",
    "WhatIfRow",
    "IdealSpec",
    "analyze",
    "whatif_exclusion",
    "emit",
    "load_report",
    "write_whatif",
    "plot_rows",
    "write_plot",
    "real_order",
]

IdealSpec = ClusteredIdeal | UniformIdeal | DesiredIdeal

INTERVAL_METHODS = ("mean_std", "min_max")


def real_order(stats_list: Sequence[UniversityStats], interval_method: str = "mean_std") -> IntervalOrder:
    """Observed interval order of a university list.

    ``mean_std`` uses [mean - std, mean + std]; ``min_max`` spans the raw
    scores and therefore needs the stats to carry them.
    """
    if interval_method == "mean_std":
        intervals = [(s.label, interval_mean_std(s)) for s in stats_list]
    elif interval_method == "min_max":
        for s in stats_list:
            if s.scores is None:
                raise ValueError(f"{s.label}: min/max intervals need raw scores")
        intervals = [(s.label, interval_min_max(s.scores)) for s in stats_list]
    else:
        raise ValueError(
            f"unknown interval method {interval_method!r}; expected one of {INTERVAL_METHODS}"
        )
    return build_interval_order(intervals)


@dataclass(frozen=True)
class IdealOutcome:
    """Distance to one reference order within one slice, with its group table."""

    hamming: float
    group_table: tuple[GroupRow, ...]

    def __post_init__(self) -> None:
        if not 0.0 <= self.hamming <= 1.0:
            raise ValueError(f"hamming must lie in [0, 1], got {self.hamming}")

    def to_json_dict(self) -> dict:
        return {
            "hamming": self.hamming,
            "group_table": [row.to_json_dict() for row in self.group_table],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "IdealOutcome":
        return cls(
            hamming=data["hamming"],
            group_table=tuple(GroupRow.from_json_dict(r) for r in data["group_table"]),
        )


@dataclass(frozen=True)
class IdealResult:
    """One reference order across all analyzed slices."""

    spec: str
    by_form: dict[str, IdealOutcome]

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec,
            "by_form": {k: v.to_json_dict() for k, v in self.by_form.items()},
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "IdealResult":
        return cls(
            spec=data["spec"],
            by_form={k: IdealOutcome.from_json_dict(v) for k, v in data["by_form"].items()},
        )


@dataclass(frozen=True)
class ExclusionOutcome:
    """Effect of one exclusion floor within one slice."""

    n_removed: int
    n_kept: int
    hamming_after: float

    def to_json_dict(self) -> dict:
        return {
            "n_removed": self.n_removed,
            "n_kept": self.n_kept,
            "hamming_after": self.hamming_after,
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ExclusionOutcome":
        return cls(
            n_removed=data["n_removed"],
            n_kept=data["n_kept"],
            hamming_after=data["hamming_after"],
        )


@dataclass(frozen=True)
class ExclusionResult:
    floor: float
    spec: str
    by_form: dict[str, ExclusionOutcome]

    def to_json_dict(self) -> dict:
        return {
            "floor": self.floor,
            "spec": self.spec,
            "by_form": {k: v.to_json_dict() for k, v in self.by_form.items()},
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ExclusionResult":
        return cls(
            floor=data["floor"],
            spec=data["spec"],
            by_form={k: ExclusionOutcome.from_json_dict(v) for k, v in data["by_form"].items()},
        )


@dataclass(frozen=True)
class HeterogeneityReport:
    """Full outcome of an analysis run.

    Slices are keyed ``"all"`` for a combined run or by study form when the
    analysis was split.  ``n_universities`` counts the universities in each
    slice; every ideal's group table partitions exactly that count.
    """

    group_label: str
    interval_method: str
    split_by_form: bool
    n_universities: dict[str, int]
    per_ideal: tuple[IdealResult, ...]
    exclusion: ExclusionResult | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_ideal", tuple(self.per_ideal))
        if self.interval_method not in INTERVAL_METHODS:
            raise ValueError(f"unknown interval method {self.interval_method!r}")
        for key, n in self.n_universities.items():
            if n < 2:
                raise ValueError(f"slice {key!r} has {n} universities; at least 2 are needed")
        if not self.per_ideal:
            raise ValueError("a report needs at least one reference order")
        for result in self.per_ideal:
            if set(result.by_form) != set(self.n_universities):
                raise ValueError(
                    f"ideal {result.spec!r} covers slices {sorted(result.by_form)}, "
                    f"expected {sorted(self.n_universities)}"
                )
            for key, outcome in result.by_form.items():
                total = sum(row.count for row in outcome.group_table)
                if total != self.n_universities[key]:
                    raise ValueError(
                        f"{result.spec!r}/{key}: group table counts {total} universities, "
                        f"slice has {self.n_universities[key]}"
                    )

    def to_json_dict(self) -> dict:
        return {
            "group_label": self.group_label,
            "interval_method": self.interval_method,
            "split_by_form": self.split_by_form,
            "n_universities": dict(self.n_universities),
            "per_ideal": [r.to_json_dict() for r in self.per_ideal],
            "exclusion": None if self.exclusion is None else self.exclusion.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "HeterogeneityReport":
        return cls(
            group_label=data["group_label"],
            interval_method=data["interval_method"],
            split_by_form=data["split_by_form"],
            n_universities=dict(data["n_universities"]),
            per_ideal=tuple(IdealResult.from_json_dict(r) for r in data["per_ideal"]),
            exclusion=(
                None if data.get("exclusion") is None
                else ExclusionResult.from_json_dict(data["exclusion"])
            ),
        )


def _slices(
    dataset: Dataset, split_by_form: bool, drop_missing: bool
) -> dict[str, list[UniversityStats]]:
    if not split_by_form:
        return {"all": aggregate(dataset, drop_missing=drop_missing)}
    stats = aggregate(dataset, split_by_form=True, drop_missing=drop_missing)
    out: dict[str, list[UniversityStats]] = {}
    for form in FORMS:
        sub = [s for s in stats if s.form == form]
        if len(sub) < 2:
            warnings.warn(
                f"form {form!r} has {len(sub)} universities with scores; slice skipped",
                stacklevel=3,
            )
            continue
        out[form] = sub
    if not out:
        raise ValueError("no form slice has at least 2 universities")
    return out


def analyze(
    dataset: Dataset,
    ideal_specs: Sequence[IdealSpec],
    interval_method: str = "mean_std",
    split_by_form: bool = False,
    floor: float | None = None,
    drop_missing: bool = False,
) -> HeterogeneityReport:
    """Compare a dataset's observed order against reference orders.

    When ``floor`` is given, the report also shows the distance after
    dropping universities whose mean is below it; the comparison target is
    the first tier-scheme ideal in ``ideal_specs``.
    """
    if not ideal_specs:
        raise ValueError("at least one reference order is required")
    slices = _slices(dataset, split_by_form, drop_missing)
    reals = {key: real_order(stats, interval_method) for key, stats in slices.items()}
    per_ideal = []
    for spec in ideal_specs:
        by_form: dict[str, IdealOutcome] = {}
        for key, stats in slices.items():
            ideal, rows = spec.build(stats)
            by_form[key] = IdealOutcome(hamming(reals[key], ideal), rows)
        per_ideal.append(IdealResult(spec.describe(), by_form))
    exclusion = None
    if floor is not None:
        if not math.isfinite(floor):
            raise ValueError("floor must be finite")
        target = next((s for s in ideal_specs if isinstance(s, DesiredIdeal)), None)
        if target is None:
            raise ValueError("exclusion needs a tier-scheme ideal among ideal_specs")
        by_form_ex: dict[str, ExclusionOutcome] = {}
        for key, stats in slices.items():
            kept = [s for s in stats if s.mean >= floor]
            if len(kept) < 2:
                raise ValueError(
                    f"floor {floor} leaves {len(kept)} universities in slice {key!r}; "
                    "at least 2 are needed"
                )
            ideal_kept, _ = target.build(kept)
            by_form_ex[key] = ExclusionOutcome(
                n_removed=len(stats) - len(kept),
                n_kept=len(kept),
                hamming_after=hamming(real_order(kept, interval_method), ideal_kept),
            )
        exclusion = ExclusionResult(floor, target.describe(), by_form_ex)
    return HeterogeneityReport(
        group_label=dataset.group_label,
        interval_method=interval_method,
        split_by_form=split_by_form,
        n_universities={key: len(stats) for key, stats in slices.items()},
        per_ideal=tuple(per_ideal),
        exclusion=exclusion,
    )


@dataclass(frozen=True)
class WhatIfRow:
    """Outcome of one exclusion floor: how many universities go, distance after.

    ``hamming`` is None when the floor is infeasible (fewer than 2
    universities survive).
    """

    floor: float
    n_removed: int
    hamming: float | None
    feasible: bool

    def to_json_dict(self) -> dict:
        return {
            "floor": self.floor,
            "n_removed": self.n_removed,
            "hamming": self.hamming,
            "feasible": self.feasible,
        }


def whatif_exclusion(
    dataset: Dataset,
    spec: DesiredIdeal | DesiredSpec,
    floors: Sequence[float],
    interval_method: str = "mean_std",
    drop_missing: bool = False,
) -> tuple[WhatIfRow, ...]:
    """Sweep exclusion floors and recompute the distance to a tier scheme.

    Rows come back ordered by floor.  A floor that leaves fewer than two
    universities is reported infeasible rather than raising, so a sweep can
    cross the top of the score range safely.
    """
    if isinstance(spec, DesiredSpec):
        spec = DesiredIdeal(spec)
    if not floors:
        raise ValueError("at least one floor is required")
    for f in floors:
        if not math.isfinite(f):
            raise ValueError(f"floors must be finite, got {f}")
    stats = aggregate(dataset, drop_missing=drop_missing)
    rows = []
    for floor in sorted(floors):
        kept = [s for s in stats if s.mean >= floor]
        if len(kept) < 2:
            rows.append(WhatIfRow(floor, len(stats) - len(kept), None, False))
            continue
        ideal, _ = spec.build(kept)
        h = hamming(real_order(kept, interval_method), ideal)
        rows.append(WhatIfRow(floor, len(stats) - len(kept), h, True))
    return tuple(rows)


def emit(report: HeterogeneityReport, format: str, path: str) -> None:
    """Write a report as JSON (full detail) or CSV (flat distance rows).

    The CSV has one row per (section, spec, form): columns ``section, spec,
    form, n_universities, hamming, floor, n_removed, n_kept``, where the
    exclusion columns are empty on ideal rows.
    """
    if format == "json":
        with open(path, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["section", "spec", "form", "n_universities", "hamming", "floor", "n_removed", "n_kept"]
            )
            for result in report.per_ideal:
                for key, outcome in result.by_form.items():
                    writer.writerow(
                        ["ideal", result.spec, key, report.n_universities[key],
                         repr(outcome.hamming), "", "", ""]
                    )
            if report.exclusion is not None:
                ex = report.exclusion
                for key, outcome in ex.by_form.items():
                    writer.writerow(
                        ["exclusion", ex.spec, key, report.n_universities[key],
                         repr(outcome.hamming_after), repr(ex.floor),
                         outcome.n_removed, outcome.n_kept]
                    )
    else:
        raise ValueError(f"unknown format {format!r}; expected 'json' or 'csv'")


def load_report(path: str) -> HeterogeneityReport:
    """Read back a report written by :func:`emit` in JSON format."""
    with open(path) as fh:
        return HeterogeneityReport.from_json_dict(json.load(fh))


def write_whatif(
    rows: Sequence[WhatIfRow], spec_desc: str, format: str, path: str
) -> None:
    """Write a floor sweep as JSON or CSV."""
    if format == "json":
        payload = {"spec": spec_desc, "rows": [r.to_json_dict() for r in rows]}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["floor", "n_removed", "hamming", "feasible"])
            for r in rows:
                writer.writerow(
                    [repr(r.floor), r.n_removed,
                     "" if r.hamming is None else repr(r.hamming),
                     int(r.feasible)]
                )
    else:
        raise ValueError(f"unknown format {format!r}; expected 'json' or 'csv'")


def plot_rows(
    dataset: Dataset,
    interval_method: str = "mean_std",
    split_by_form: bool = False,
    drop_missing: bool = False,
) -> list[dict]:
    """Per-university rows ready for plotting score intervals.

    Each row carries the label, form, mean, std, count and interval bounds
    under the chosen method.
    """
    if split_by_form:
        stats = [
            s for s in aggregate(dataset, split_by_form=True, drop_missing=drop_missing)
        ]
    else:
        stats = aggregate(dataset, drop_missing=drop_missing)
    rows = []
    for s in stats:
        if interval_method == "mean_std":
            iv = interval_mean_std(s)
        elif interval_method == "min_max":
            if s.scores is None:
                raise ValueError(f"{s.label}: min/max intervals need raw scores")
            iv = interval_min_max(s.scores)
        else:
            raise ValueError(f"unknown interval method {interval_method!r}")
        rows.append(
            {
                "university_id": s.label,
                "form": s.form or "all",
                "mean": s.mean,
                "std": s.std,
                "count": s.count,
                "interval_lo": iv.lo,
                "interval_hi": iv.hi,
            }
        )
    return rows


def write_plot(rows: Sequence[Mapping], format: str, path: str) -> None:
    """Write plotting rows as JSON or CSV."""
    if format == "json":
        with open(path, "w") as fh:
            json.dump(list(rows), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        fields = ["university_id", "form", "mean", "std", "count", "interval_lo", "interval_hi"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(fields)
            for r in rows:
                writer.writerow(
                    [r["university_id"], r["form"], repr(r["mean"]), repr(r["std"]),
                     r["count"], repr(r["interval_lo"]), repr(r["interval_hi"])]
                )
    else:
        raise ValueError(f"unknown format {format!r}; expected 'json' or 'csv'")
