"""Reactive knob switching: classify current content, follow the plan, never overflow the buffer."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .core import Placement, ProvisioningError

# ---------------------------------------------------------------------------
# classification and configuration choice


def classify_category(qual_star: float, k_cur: int, centers) -> int:
    """Category whose mean quality for ``k_cur`` is closest to the reported quality (lowest id on ties)."""
    q = np.asarray(getattr(centers, "centers", centers))
    col = q[:, k_cur]
    return int(np.argmin(np.abs(col - qual_star)))


def pick_config(alpha_c, realized_c) -> int:
    """Config with the largest shortfall of realized share against planned share.

    Ties go to the larger planned share, then the lowest id; when usage matches
    the plan exactly, this keeps the choice inside the plan's support.
    """
    alpha = np.asarray(alpha_c, dtype=np.float64)
    deficit = alpha - np.asarray(realized_c, dtype=np.float64)
    tied = np.flatnonzero(deficit >= deficit.max() - 1e-12)
    return int(tied[np.argmax(alpha[tied])])


@dataclass(frozen=True)
class SwitcherState:
    """Realized usage counts per (category, config) plus the decision log.

    Updates return a new state. ``log`` entries are ``(t, category, config)``.
    """

    counts: tuple[tuple[int, ...], ...]
    k_cur: int = 0
    qual_star: float | None = None
    log: tuple[tuple[float, int, int], ...] = ()

    @classmethod
    def initial(cls, n_categories: int, n_configs: int, k_cur: int = 0) -> "SwitcherState":
        return cls(tuple((0,) * n_configs for _ in range(n_categories)), k_cur)

    def realized(self, c: int) -> np.ndarray:
        row = np.asarray(self.counts[c], dtype=np.float64)
        total = row.sum()
        return row / total if total > 0 else row


def record_outcome(state: SwitcherState, t: float, category: int, config: int, reported_quality: float) -> SwitcherState:
    counts = list(state.counts)
    row = list(counts[category])
    row[config] += 1
    counts[category] = tuple(row)
    return replace(
        state,
        counts=tuple(counts),
        k_cur=config,
        qual_star=reported_quality,
        log=state.log + ((t, category, config),),
    )


def category_histogram(log, t0: float, t1: float, n_categories: int) -> np.ndarray:
    """Normalized category frequencies of log entries with ``t0 <= t < t1``."""
    h = np.zeros(n_categories)
    for t, c, _ in log:
        if t0 <= t < t1:
            h[c] += 1
    return h / h.sum() if h.sum() > 0 else h


class Realized:
    """Mutable realized-usage counters for the simulation hot loop."""

    def __init__(self, n_categories: int, n_configs: int):
        self.counts = np.zeros((n_categories, n_configs), dtype=np.int64)

    def realized(self, c: int) -> np.ndarray:
        row = self.counts[c]
        total = row.sum()
        return row / total if total > 0 else row.astype(np.float64)

    def add(self, c: int, k: int, n: int = 1) -> None:
        self.counts[c, k] += n

    def reset(self) -> None:
        self.counts[:] = 0


# ---------------------------------------------------------------------------
# buffer-safe placement choice


@dataclass(frozen=True)
class ArrivalModel:
    """Segment i arrives whole at ``(i + 1) * segment_duration_s`` and occupies ``segment_bytes``."""

    segment_duration_s: float
    segment_bytes: float
    n_segments: int
    arrivals: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if not self.arrivals:
            d = self.segment_duration_s
            object.__setattr__(self, "arrivals", tuple((i + 1) * d for i in range(self.n_segments)))

    def arrived_before(self, t: float) -> int:
        """Number of segments that arrive strictly before ``t``."""
        return bisect.bisect_left(self.arrivals, t)


def completion_times(arrivals: ArrivalModel, first: int, start: float, runtime_s: float, n_segments: int = 1) -> list[float]:
    """Finish times of segments ``first..first+n-1`` run one after another, each no earlier than its arrival."""
    out = []
    t = start
    for m in range(n_segments):
        t = max(t, arrivals.arrivals[first + m]) + runtime_s
        out.append(t)
    return out


def peak_backlog(
    arrivals: ArrivalModel, first: int, start: float, runtime_s: float, n_segments: int = 1, held_elsewhere=0
) -> int:
    """Most segments held at once while segments ``first..first+n-1`` are processed from ``start``.

    Segment j is in the buffer from its arrival until its processing finishes, so
    occupancy peaks just before each completion; a completion and an arrival at
    the same instant free first. ``held_elsewhere`` is a count, or a function of
    time, for segments other streams keep in a shared buffer.
    """
    peak = 0
    for m, t in enumerate(completion_times(arrivals, first, start, runtime_s, n_segments)):
        held = arrivals.arrived_before(t) - (first + m)
        held += held_elsewhere(t) if callable(held_elsewhere) else held_elsewhere
        peak = max(peak, held)
    return peak


@dataclass(frozen=True)
class Decision:
    config: int
    placement: Placement
    fallbacks: int
    checked: int


def fallback_order(k_next: int, centers, c_cur: int, global_quality=None) -> list[int]:
    """``k_next`` followed by configs of strictly lower quality for ``c_cur``, best first."""
    q = np.asarray(getattr(centers, "centers", centers))[c_cur]
    gq = np.asarray(global_quality) if global_quality is not None else np.zeros(len(q))
    below = [k for k in range(len(q)) if k != k_next and (q[k], gq[k]) < (q[k_next], gq[k_next])]
    below.sort(key=lambda k: (-q[k], -gq[k], k))
    return [k_next, *below]


def pick_placement(
    k_next: int,
    buffer_capacity_segments: int,
    arrivals: ArrivalModel,
    first_segment: int,
    start: float,
    placements: Sequence[Sequence[Placement]],
    credits_remaining: float,
    centers,
    c_cur: int,
    n_segments: int = 1,
    global_quality=None,
    held_elsewhere=0,
    last_resort: int | None = None,
) -> Decision:
    """Cheapest admissible placement of ``k_next``, else of the next less qualitative config, recursively.

    A placement is admissible when running the next ``n_segments`` with it keeps
    the buffer within capacity at every completion (counting segments other
    streams keep in a shared buffer, see :func:`peak_backlog`) and its cloud cost fits
    the remaining credits. ``placements[k]`` must be sorted by ascending cost.
    """
    order = fallback_order(k_next, centers, c_cur, global_quality)
    if last_resort is not None and last_resort not in order:
        order.append(last_resort)
    checked = 0
    for depth, k in enumerate(order):
        for p in placements[k]:
            checked += 1
            if p.cloud_cost_credits * n_segments > credits_remaining + 1e-9:
                # sorted by cost: nothing further along is affordable
                break
            peak = peak_backlog(arrivals, first_segment, start, p.estimated_runtime_s, n_segments, held_elsewhere)
            if peak <= buffer_capacity_segments:
                return Decision(k, p, depth, checked)
    # startup validation makes this unreachable for a single stream
    raise ProvisioningError(f"no admissible placement at t={start:.3f}s (checked {checked})")


def buffer_capacity_segments(buffer_bytes: float, segment_bytes: float) -> int:
    return int(math.floor(buffer_bytes / segment_bytes + 1e-12))
