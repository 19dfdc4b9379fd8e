"""Interval orders over score intervals and distances between them.

A university's entrance scores are summarised by an interval on the score
axis.  One university dominates another exactly when its whole interval lies
to the right of the other's, which yields a strict partial order of a special
kind (an interval order).  Two such orders over the same universities are
compared cell by cell through a normalized Hamming distance.

Everything here is pure and deterministic; incidence matrices are stored as
read-only numpy boolean arrays.
"""

from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ScoreInterval",
    "UniversityStats",
    "IntervalOrder",
    "interval_mean_std",
    "interval_min_max",
    "build_interval_order",
    "hamming",
    "exclude_below",
]

_STATS_TOL = 1e-9


@dataclass(frozen=True)
class ScoreInterval:
    """Closed interval [lo, hi] on the score axis."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval bounds must be finite, got [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class UniversityStats:
    """Aggregate of one university's admitted-student scores.

    ``std`` is the population standard deviation (divide by the student
    count, not count - 1).  ``scores`` may keep the raw values; when present
    they must reproduce ``mean`` and ``std``.
    """

    label: str
    mean: float
    std: float
    count: int
    scores: tuple[float, ...] | None = None
    form: str | None = None

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("university label must be non-empty")
        if not math.isfinite(self.mean):
            raise ValueError(f"{self.label}: mean must be finite")
        if not (math.isfinite(self.std) and self.std >= 0):
            raise ValueError(f"{self.label}: std must be finite and non-negative")
        if self.count < 1:
            raise ValueError(f"{self.label}: count must be at least 1")
        if self.scores is not None:
            object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
            if len(self.scores) != self.count:
                raise ValueError(f"{self.label}: {len(self.scores)} scores but count={self.count}")
            m = statistics.fmean(self.scores)
            s = statistics.pstdev(self.scores)
            if abs(m - self.mean) > _STATS_TOL or abs(s - self.std) > _STATS_TOL:
                raise ValueError(
                    f"{self.label}: scores give mean={m}, std={s}, "
                    f"which disagree with the declared mean={self.mean}, std={self.std}"
                )

    @classmethod
    def from_scores(
        cls, label: str, scores: Iterable[float], form: str | None = None
    ) -> "UniversityStats":
        vals = tuple(float(s) for s in scores)
        if not vals:
            raise ValueError(f"{label}: cannot aggregate an empty score list")
        return cls(
            label=label,
            mean=statistics.fmean(vals),
            std=statistics.pstdev(vals),
            count=len(vals),
            scores=vals,
            form=form,
        )


def interval_mean_std(stats: UniversityStats) -> ScoreInterval:
    """Interval [mean - std, mean + std].  Bounds are not clipped to [0, 100]."""
    return ScoreInterval(stats.mean - stats.std, stats.mean + stats.std)


def interval_min_max(scores: Sequence[float]) -> ScoreInterval:
    """Interval spanning the observed scores exactly."""
    if not scores:
        raise ValueError("cannot build a min/max interval from an empty score list")
    return ScoreInterval(min(scores), max(scores))


class IntervalOrder:
    """A strict partial order with the interval-order structure.

    Stored as an n x n boolean incidence matrix: ``incidence[i, j]`` is True
    when university i is ranked strictly above university j.  Construction
    validates irreflexivity, asymmetry, transitivity and the defining
    condition that no two incomparable pairs form a 2+2 (equivalently, the
    successor sets are nested).
    """

    __slots__ = ("labels", "incidence")

    def __init__(self, labels: Sequence[str], incidence: np.ndarray) -> None:
        labels = tuple(str(x) for x in labels)
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        mat = np.asarray(incidence, dtype=bool).copy()
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"incidence must be square, got shape {mat.shape}")
        if mat.shape[0] != len(labels):
            raise ValueError(f"{len(labels)} labels but incidence is {mat.shape[0]}x{mat.shape[0]}")
        mat.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "incidence", mat)
        self._validate()

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("IntervalOrder is immutable")

    def _validate(self) -> None:
        p = self.incidence
        if p.diagonal().any():
            raise ValueError("relation is not irreflexive")
        if (p & p.T).any():
            raise ValueError("relation is not asymmetric")
        pi = p.astype(np.int64)
        two_step = (pi @ pi) > 0
        if (two_step & ~p).any():
            raise ValueError("relation is not transitive")
        # Ferrers condition: successor sets must be pairwise nested.
        # gap[i, k] counts j with i above j but k not above j; nesting fails
        # exactly when some pair has gaps in both directions.
        gap = pi @ (1 - pi).T
        if ((gap > 0) & (gap.T > 0)).any():
            raise ValueError("relation is not an interval order (2+2 found)")

    @property
    def n(self) -> int:
        return len(self.labels)

    def pairs(self) -> set[tuple[str, str]]:
        """All (above, below) label pairs in the relation."""
        rows, cols = np.nonzero(self.incidence)
        return {(self.labels[i], self.labels[j]) for i, j in zip(rows, cols)}

    def above(self, label: str) -> set[str]:
        """Labels ranked strictly above ``label``."""
        j = self.labels.index(label)
        return {self.labels[i] for i in np.nonzero(self.incidence[:, j])[0]}

    def below(self, label: str) -> set[str]:
        """Labels ranked strictly below ``label``."""
        i = self.labels.index(label)
        return {self.labels[j] for j in np.nonzero(self.incidence[i, :])[0]}

    @classmethod
    def from_pairs(
        cls, labels: Sequence[str], pairs: Iterable[tuple[str, str]]
    ) -> "IntervalOrder":
        labels = tuple(labels)
        index = {lbl: i for i, lbl in enumerate(labels)}
        mat = np.zeros((len(labels), len(labels)), dtype=bool)
        for hi, lo in pairs:
            if hi not in index or lo not in index:
                raise ValueError(f"pair ({hi}, {lo}) mentions an unknown label")
            mat[index[hi], index[lo]] = True
        return cls(labels, mat)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalOrder):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.incidence, other.incidence)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"IntervalOrder(n={self.n}, pairs={len(self.pairs())})"

    def to_csv(self, path: str) -> None:
        """Write the incidence matrix with labels as header row and column."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + list(self.labels))
            for i, lbl in enumerate(self.labels):
                writer.writerow([lbl] + [int(v) for v in self.incidence[i]])

    @classmethod
    def from_csv(cls, path: str) -> "IntervalOrder":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise ValueError(f"{path}: empty incidence file")
        labels = tuple(rows[0][1:])
        n = len(labels)
        if len(rows) != n + 1:
            raise ValueError(f"{path}: expected {n} data rows, found {len(rows) - 1}")
        mat = np.zeros((n, n), dtype=bool)
        for i, row in enumerate(rows[1:]):
            if len(row) != n + 1 or row[0] != labels[i]:
                raise ValueError(f"{path}: malformed row {i + 2}")
            for j, cell in enumerate(row[1:]):
                if cell not in ("0", "1"):
                    raise ValueError(f"{path}: cell ({i + 2}, {j + 2}) must be 0 or 1, got {cell!r}")
                mat[i, j] = cell == "1"
        return cls(labels, mat)


def build_interval_order(
    intervals: Sequence[tuple[str, ScoreInterval]]
) -> IntervalOrder:
    """Order the labelled intervals: i above j exactly when lo_i > hi_j.

    The comparison is strict; touching endpoints leave the pair incomparable.
    """
    if not intervals:
        raise ValueError("at least one interval is required")
    labels = tuple(lbl for lbl, _ in intervals)
    los = np.array([iv.lo for _, iv in intervals], dtype=float)
    his = np.array([iv.hi for _, iv in intervals], dtype=float)
    return IntervalOrder(labels, los[:, None] > his[None, :])


def hamming(order1: IntervalOrder, order2: IntervalOrder) -> float:
    """Normalized Hamming distance between two orders over the same universities.

    Counts the off-diagonal cells where the incidence matrices disagree and
    divides by n(n-1).  Correspondence is positional: row i of one matrix is
    compared with row i of the other, whatever the labels say.
    """
    n = order1.n
    if order2.n != n:
        raise ValueError(f"orders have different sizes: {n} and {order2.n}")
    if n < 2:
        raise ValueError("the distance is undefined for fewer than 2 universities")
    diff = int(np.count_nonzero(order1.incidence != order2.incidence))
    return diff / (n * (n - 1))


def exclude_below(
    stats_list: Sequence[UniversityStats], floor: float
) -> list[UniversityStats]:
    """Drop universities whose mean score is strictly below ``floor``."""
    if not math.isfinite(floor):
        raise ValueError("floor must be finite")
    kept = [s for s in stats_list if s.mean >= floor]
    if not kept:
        raise ValueError(f"floor {floor} removes every university")
    return kept
