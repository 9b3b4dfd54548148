"""Usage statistics and recommendations over the run history.

All functions are pure: they take immutable snapshots of runs/tours and a
``now`` instant, and bucket by calendar month in UTC. "Popularity" is the
count of completed runs inside the statistics window.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional

from .errors import NotFoundError, ValidationError
from .model import Tour, TourRun, to_timestamp

DEFAULT_WINDOW_MONTHS = 6
DEFAULT_TOP_K = 5

DELETED_TYPE = "(deleted)"


def _month_of(dt: datetime) -> tuple[int, int]:
    dt = dt.astimezone(timezone.utc) if dt.tzinfo else dt.replace(tzinfo=timezone.utc)
    return (dt.year, dt.month)


def _month_back(year: int, month: int, steps: int) -> tuple[int, int]:
    index = year * 12 + (month - 1) - steps
    return index // 12, index % 12 + 1


def _month_label(ym: tuple[int, int]) -> str:
    return f"{ym[0]:04d}-{ym[1]:02d}"


def window_months_of(now: datetime, window_months: int) -> list[tuple[int, int]]:
    """The month containing ``now`` and the preceding ``window_months - 1``."""
    if not isinstance(window_months, int) or isinstance(window_months, bool) or window_months < 1:
        raise ValidationError("window_months must be an integer >= 1")
    last = _month_of(now)
    return [_month_back(*last, steps) for steps in range(window_months - 1, -1, -1)]


def runs_in_window(runs: Iterable[TourRun], now: datetime, window_months: int) -> list[TourRun]:
    months = set(window_months_of(now, window_months))
    return [run for run in runs if _month_of(run.started_at) in months]


@dataclass(frozen=True)
class MonthlyStats:
    """Run counts per calendar month, oldest first, gaps included as zeros."""

    months: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(count for _, count in self.months)

    def to_json(self) -> dict:
        return {
            "months": [{"month": m, "run_count": c} for m, c in self.months],
            "total": self.total,
        }


@dataclass(frozen=True)
class TypeDistribution:
    counts: dict[str, int]
    total: int

    def to_json(self) -> dict:
        return {"counts": dict(sorted(self.counts.items())), "total": self.total}


@dataclass(frozen=True)
class TourDetail:
    tour_id: str
    total_runs: int
    completed: int
    aborted: int
    failed: int
    mean_duration_seconds: Optional[float]
    last_run_at: Optional[datetime]

    def to_json(self) -> dict:
        return {
            "tour_id": self.tour_id,
            "total_runs": self.total_runs,
            "completed": self.completed,
            "aborted": self.aborted,
            "failed": self.failed,
            "mean_duration_seconds": self.mean_duration_seconds,
            "last_run_at": to_timestamp(self.last_run_at) if self.last_run_at else None,
        }


@dataclass(frozen=True)
class RecommendationParams:
    tour_type: Optional[str] = None
    max_duration: Optional[int] = None  # minutes
    window_months: int = DEFAULT_WINDOW_MONTHS
    top_k: int = DEFAULT_TOP_K

    def __post_init__(self):
        if not isinstance(self.window_months, int) or self.window_months < 1:
            raise ValidationError("window_months must be an integer >= 1")
        if not isinstance(self.top_k, int) or self.top_k < 1:
            raise ValidationError("top_k must be an integer >= 1")
        if self.max_duration is not None:
            if not isinstance(self.max_duration, int) or self.max_duration < 1:
                raise ValidationError("max_duration must be an integer >= 1 (minutes)")


def monthly_counts(runs: Iterable[TourRun], now: datetime, window_months: int = DEFAULT_WINDOW_MONTHS) -> MonthlyStats:
    """Bucket runs by the calendar month (UTC) of started_at."""
    months = window_months_of(now, window_months)
    counts = {ym: 0 for ym in months}
    for run in runs:
        ym = _month_of(run.started_at)
        if ym in counts:
            counts[ym] += 1
    return MonthlyStats(months=tuple((_month_label(ym), counts[ym]) for ym in months))


def type_distribution(
    runs: Iterable[TourRun],
    tours: Iterable[Tour],
    now: datetime,
    window_months: int = DEFAULT_WINDOW_MONTHS,
) -> TypeDistribution:
    """Count in-window runs by their tour's current type.

    Runs whose tour no longer exists are grouped under "(deleted)".
    """
    types_by_id = {tour.id: tour.tour_type for tour in tours}
    counts: dict[str, int] = {}
    total = 0
    for run in runs_in_window(runs, now, window_months):
        tour_type = types_by_id.get(run.tour_id, DELETED_TYPE)
        counts[tour_type] = counts.get(tour_type, 0) + 1
        total += 1
    return TypeDistribution(counts=counts, total=total)


def tour_detail(tour_id: str, runs: Iterable[TourRun], tour_exists: bool = True) -> TourDetail:
    """Outcome counts and mean completed-run duration for one tour."""
    mine = [run for run in runs if run.tour_id == tour_id]
    if not mine and not tour_exists:
        raise NotFoundError(f"no such tour: {tour_id}")
    completed = [run for run in mine if run.outcome == "completed"]
    aborted = sum(1 for run in mine if run.outcome == "aborted")
    failed = sum(1 for run in mine if run.outcome == "failed")
    mean = (
        sum(run.duration_seconds for run in completed) / len(completed) if completed else None
    )
    last = max((run.started_at for run in mine), default=None)
    return TourDetail(
        tour_id=tour_id,
        total_runs=len(mine),
        completed=len(completed),
        aborted=aborted,
        failed=failed,
        mean_duration_seconds=mean,
        last_run_at=last,
    )


def recommend(
    tours: Iterable[Tour],
    runs: Iterable[TourRun],
    now: datetime,
    params: RecommendationParams = RecommendationParams(),
) -> list[tuple[Tour, int]]:
    """Popularity-ranked tours: completed in-window runs, ties by name.

    Tours are filtered by the optional type/duration params first; zero-run
    tours stay eligible and sort after anything with runs.
    """
    eligible = []
    for tour in tours:
        if params.tour_type is not None and tour.tour_type != params.tour_type:
            continue
        if params.max_duration is not None and tour.expected_duration > params.max_duration:
            continue
        eligible.append(tour)
    completed = [
        run
        for run in runs_in_window(runs, now, params.window_months)
        if run.outcome == "completed"
    ]
    counts: dict[str, int] = {}
    for run in completed:
        counts[run.tour_id] = counts.get(run.tour_id, 0) + 1
    ranked = sorted(
        eligible,
        key=lambda tour: (-counts.get(tour.id, 0), tour.name.lower(), tour.name, tour.id),
    )
    return [(tour, counts.get(tour.id, 0)) for tour in ranked[: params.top_k]]
