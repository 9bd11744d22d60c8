"""Trace-driven ingestion: planning per interval, switching per decision, simulated buffer and credit ledgers.

Time is simulated. Segment i arrives whole at ``(i + 1) * d`` and stays in the
buffer until its processing finishes. Each stream processes its segments one
at a time, in order, each taking its placement's estimated runtime. A decision
covers ``switch_period_s / d`` consecutive segments.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    ConfigError,
    InfeasiblePlanError,
    KnobConfiguration,
    Placement,
    PlanningHorizon,
    ProvisioningError,
    ResourceProvision,
)
from .forecaster import fine_tune, predict
from .modelfile import FittedModel, PlacementContext
from .offline import WindowSpec, placements_for
from .placement import estimate_runtime
from .planner import KnobPlan, compute_budget, solve_knob_plan, solve_multi_stream_plan, upper_hull
from .switcher import ArrivalModel, Realized, buffer_capacity_segments, classify_category, pick_config, pick_placement
from .workload import Trace, quality_matrix

log = logging.getLogger(__name__)

MODES = ("none", "buffer_only", "cloud_only", "both")


@dataclass(frozen=True)
class RunOptions:
    """``mode`` selects the ablation; ``type_b=False`` classifies each upcoming segment from its own quality."""

    mode: str = "both"
    type_b: bool = True
    fine_tune: bool = False
    normalize: bool = True
    unlimited_budget: bool = False
    timeline_bin_s: float = 3600.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}; got {self.mode!r}")
        if not self.timeline_bin_s > 0:
            raise ConfigError("timeline_bin_s must be > 0")


@dataclass(eq=False)
class StreamResult:
    """Per-segment outcome arrays of one stream."""

    arrivals: np.ndarray
    finish: np.ndarray
    config: np.ndarray
    placement: np.ndarray
    category: np.ndarray
    quality: np.ndarray
    work_core_s: np.ndarray
    credits: np.ndarray
    segment_bytes: int
    segment_duration_s: float


@dataclass(eq=False)
class MetricsReport:
    summary: dict
    timeline: list[dict] = field(default_factory=list)
    decisions: list[dict] = field(default_factory=list)
    decision_counts: dict = field(default_factory=dict)
    plans: list[KnobPlan] = field(default_factory=list)
    streams: list[StreamResult] = field(default_factory=list)

    def summary_line(self) -> str:
        return " ".join(f"{k}={_fmt(v)}" for k, v in self.summary.items())


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# buffer accounting


def occupancy_at_arrivals(arrivals: np.ndarray, finish: np.ndarray) -> np.ndarray:
    """Segments held right after each arrival; finishes at the same instant are freed first."""
    a = np.sort(np.asarray(arrivals, dtype=np.float64))
    f = np.sort(np.asarray(finish, dtype=np.float64))
    return np.arange(1, len(a) + 1) - np.searchsorted(f, a, side="right")


def static_finish_times(arrivals: np.ndarray, runtime_s: float) -> np.ndarray:
    """Finish times when every segment takes ``runtime_s`` and runs after its predecessor."""
    idx = np.arange(len(arrivals))
    return (idx + 1) * runtime_s + np.maximum.accumulate(arrivals - idx * runtime_s)


# ---------------------------------------------------------------------------
# streams


class _Stream:
    def __init__(self, sid: int, trace: Trace, fitted: FittedModel, qualities: np.ndarray, placements, cores: int):
        n = len(trace)
        self.sid = sid
        self.trace = trace
        self.q = qualities
        self.placements = placements
        self.cores = cores
        self.arrivals = ArrivalModel(trace.segment_duration_s, trace.segment_bytes, n)
        self.arr = np.asarray(self.arrivals.arrivals)
        self.next = 0
        self.busy_until = 0.0
        self.finish = np.zeros(n)
        self.finish_list: list[float] = []
        self.config = np.full(n, -1, dtype=np.int64)
        self.mask = np.zeros(n, dtype=np.int64)
        self.category = np.full(n, -1, dtype=np.int64)
        self.credits = np.zeros(n)
        self.realized = Realized(fitted.n_categories, len(fitted.config_indices))
        self.qual_star: float | None = None
        self.k_cur: int | None = None
        self.forecast: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.trace)

    def decision_time(self) -> float:
        return max(self.arr[self.next], self.busy_until)

    def held_at(self, t: float) -> int:
        """Upper bound on this stream's buffered segments at ``t`` given its committed schedule."""
        return self.arrivals.arrived_before(t) - bisect.bisect_right(self.finish_list, t)


def _placements_for_cores(fitted: FittedModel, provision: ResourceProvision, cores: int) -> list[list[Placement]]:
    ctx = PlacementContext(
        cores,
        provision.uplink_bytes_per_s,
        provision.downlink_bytes_per_s,
        provision.cloud_price_per_invocation_credits,
        provision.egress_price_per_byte,
    )
    if ctx == fitted.placement_context:
        return fitted.placements
    return [placements_for(fitted.workload, k, ctx) for k in fitted.configs]


def _validate_inputs(traces: Sequence[Trace], fitted: FittedModel, horizon: PlanningHorizon) -> None:
    wl = fitted.workload
    for tr in traces:
        if len(tr) == 0:
            raise ConfigError("trace has no segments")
        if tr.segment_duration_s != wl.segment_duration_s or tr.segment_bytes != wl.segment_bytes:
            raise ConfigError("trace segment duration/size does not match the model file's workload")
        if tr.model_id and tr.model_id != wl.model_id:
            log.warning("trace model_id %r differs from model file workload %r", tr.model_id, wl.model_id)
    mh = fitted.horizon
    if (horizon.input_window_s, horizon.input_splits) != (mh.input_window_s, mh.input_splits):
        raise ConfigError("horizon input window/splits differ from those the forecaster was trained with")
    if fitted.forecaster.n_inputs != mh.input_splits * fitted.n_categories:
        raise ConfigError("forecaster input width does not match input_splits x categories")


def _window_counts(stream: _Stream, lo: int, hi: int, bootstrap: np.ndarray, spec: WindowSpec) -> np.ndarray:
    """Category counts over segment positions ``[lo, hi)``; negative positions use the stored history."""
    c = bootstrap.shape[1]
    counts = np.zeros(c)
    if lo < 0:
        bounds = spec.split_bounds(0)  # bootstrap split j covers [bounds[j], bounds[j+1])
        for j in range(spec.n_split):
            overlap = min(hi, 0, bounds[j + 1]) - max(lo, bounds[j])
            if overlap > 0:
                counts += bootstrap[j] * overlap
    if hi > 0:
        labels = stream.category[max(lo, 0) : hi]
        labels = labels[labels >= 0]
        counts += np.bincount(labels, minlength=c)[:c]
    return counts


def _forecast_input(stream: _Stream, t0: int, fitted: FittedModel, spec: WindowSpec) -> np.ndarray:
    bounds = spec.split_bounds(t0)
    hist = []
    for j in range(spec.n_split):
        counts = _window_counts(stream, int(bounds[j]), int(bounds[j + 1]), fitted.bootstrap_histograms, spec)
        total = counts.sum()
        hist.append(counts / total if total > 0 else np.full(len(counts), 1.0 / len(counts)))
    return np.array(hist)


def _cheapest_plan(fitted: FittedModel) -> KnobPlan:
    alpha = np.zeros((fitted.n_categories, len(fitted.config_indices)))
    alpha[:, fitted.cheapest] = 1.0
    return KnobPlan(alpha)


def _best_realtime_onprem(fitted: FittedModel, placements, d: float) -> int:
    ok = [k for k, ps in enumerate(placements) if ps[0].bitmask == 0 and ps[0].estimated_runtime_s <= d]
    if not ok:
        raise ProvisioningError("no configuration runs in real time on-premises")
    gq, costs = fitted.global_quality, fitted.costs
    return max(ok, key=lambda k: (gq[k], -costs[k], -k))


def run_streams(
    traces: Sequence[Trace],
    fitted: FittedModel,
    provision: ResourceProvision,
    horizon: PlanningHorizon | None = None,
    options: RunOptions = RunOptions(),
) -> MetricsReport:
    """Ingest one or more streams sharing cores (split evenly), buffer and cloud credits."""
    horizon = horizon or fitted.horizon
    _validate_inputs(traces, fitted, horizon)
    wl = fitted.workload
    d = wl.segment_duration_s
    seg_bytes = wl.segment_bytes
    n_streams = len(traces)
    cores = provision.onprem_cores // n_streams
    if cores < 1:
        raise ProvisioningError(f"{provision.onprem_cores} cores cannot be split across {n_streams} streams")
    buffer_bytes = float(seg_bytes) if options.mode == "cloud_only" else provision.buffer_bytes
    cap = buffer_capacity_segments(buffer_bytes, seg_bytes)
    placements = _placements_for_cores(fitted, provision, cores)
    if options.mode == "buffer_only":
        placements = [[p for p in ps if p.bitmask == 0] for ps in placements]
    cheapest = fitted.cheapest
    k_min_runtime = placements[cheapest][0].estimated_runtime_s
    if placements[cheapest][0].bitmask != 0 or k_min_runtime > d:
        raise ProvisioningError(
            f"cheapest configuration needs {k_min_runtime:.3f}s per {d}s segment on {cores} core(s); "
            "it must keep up in real time"
        )
    if cap < n_streams:
        raise ProvisioningError(f"buffer holds {cap} segment(s); need at least {n_streams}")

    cfg_idx = fitted.config_indices
    streams = [
        _Stream(v, tr, fitted, quality_matrix(wl, tr.categories, tr.noise_seeds, cfg_idx), placements, cores)
        for v, tr in enumerate(traces)
    ]
    spec = WindowSpec.from_horizon(horizon, d, horizon.planned_interval_s)
    n_out = spec.n_out
    n_seg = max(1, int(round(horizon.switch_period_s / d)))
    costs = fitted.costs
    centers = fitted.centers
    gq = fitted.global_quality
    static_k = _best_realtime_onprem(fitted, placements, d) if options.mode == "none" else None

    forecaster = fitted.forecaster
    plans: list[KnobPlan] = []
    stream_plans: list[KnobPlan] = []
    plan_index = -1
    credits_left = 0.0
    spent_interval = 0.0
    credit_budget = math.inf if options.unlimited_budget else provision.cloud_budget_credits

    def replan(p: int) -> None:
        nonlocal stream_plans, credits_left, spent_interval, forecaster
        t0 = p * n_out
        if options.fine_tune and p > 0:
            recent = []
            for st in streams:
                if t0 <= len(st):
                    x = _forecast_input(st, t0 - n_out, fitted, spec)
                    y = _window_counts(st, t0 - n_out, t0, fitted.bootstrap_histograms, spec)
                    if y.sum() > 0:
                        recent.append((x, y / y.sum()))
            forecaster = fine_tune(forecaster, recent, epochs=1, seed=options.seed + p)
        for st in streams:
            st.forecast = predict(forecaster, _forecast_input(st, t0, fitted, spec))
            st.realized.reset()
        seg_counts = [max(0, min(n_out, len(st) - t0)) for st in streams]
        budget = math.inf if options.unlimited_budget else compute_budget(provision, max(seg_counts) * d)
        try:
            if n_streams == 1:
                stream_plans = [
                    solve_knob_plan(streams[0].forecast, centers, costs * seg_counts[0], budget, (t0 * d, (t0 + n_out) * d))
                ]
            else:
                stream_plans = solve_multi_stream_plan(
                    [st.forecast for st in streams], [centers] * n_streams,
                    [costs * max(n, 1) for n in seg_counts], budget,
                )
        except InfeasiblePlanError as e:
            log.warning("interval %d: %s; planning the cheapest configuration everywhere", p, e)
            stream_plans = [_cheapest_plan(fitted)] * n_streams
        plans.extend(stream_plans)
        credits_left = credit_budget
        spent_interval = 0.0

    decisions: list[dict] = []
    fallbacks = forced = 0
    drift_gaps: list[float] = []
    heap = [(st.decision_time(), st.sid) for st in streams]
    heapq.heapify(heap)

    while heap:
        now, sid = heapq.heappop(heap)
        st = streams[sid]
        i = st.next
        p = i // n_out
        if p > plan_index:
            plan_index = p
            replan(p)
        n = min(n_seg, len(st) - i)
        plan = stream_plans[sid]

        if st.qual_star is None:
            c = int(np.argmax(st.forecast))
        elif options.type_b:
            c = classify_category(st.qual_star, st.k_cur, centers)
        else:
            c = classify_category(float(st.q[i, st.k_cur]), st.k_cur, centers)
        if st.qual_star is not None:
            drift_gaps.append(abs(centers.centers[c, st.k_cur] - st.qual_star))

        if static_k is not None:
            k, placement = static_k, placements[static_k][0]
        else:
            k_next = pick_config(plan.alpha[c], st.realized.realized(c))
            others = [o for o in streams if o.sid != sid]
            held = (lambda t: sum(o.held_at(t) for o in others)) if others else 0
            try:
                dec = pick_placement(
                    k_next, cap, st.arrivals, i, now, placements, credits_left, centers, c,
                    n_segments=n, global_quality=gq, held_elsewhere=held, last_resort=cheapest,
                )
                k, placement = dec.config, dec.placement
                fallbacks += dec.fallbacks > 0
            except ProvisioningError:
                if n_streams == 1:
                    raise
                # other streams hold the shared buffer; fall back to the cheapest real-time choice
                k, placement = cheapest, placements[cheapest][0]
                forced += 1

        t = now
        spent = placement.cloud_cost_credits
        for m in range(n):
            j = i + m
            t = max(t, st.arr[j]) + placement.estimated_runtime_s
            st.finish[j] = t
            st.finish_list.append(t)
            st.credits[j] = spent
        credits_left -= spent * n
        spent_interval += spent * n
        st.config[i : i + n] = k
        st.mask[i : i + n] = placement.bitmask
        st.category[i : i + n] = c
        st.realized.add(c, k, n)
        st.qual_star = float(st.q[i + n - 1, k])
        st.k_cur = k
        # everything before segment i has finished by now
        held_now = bisect.bisect_right(st.arrivals.arrivals, now) - i
        decisions.append(
            {
                "stream": sid,
                "t": float(now),
                "segment": i,
                "category": c,
                "config": fitted.config_ids[k],
                "placement": placement.bitmask,
                "buffer_bytes": held_now * seg_bytes,
                "credits_spent": spent_interval,
                "quality": st.qual_star,
            }
        )
        st.busy_until = t
        st.next = i + n
        if st.next < len(st):
            heapq.heappush(heap, (st.decision_time(), sid))

    results = []
    for st in streams:
        results.append(
            StreamResult(
                arrivals=st.arr.copy(),
                finish=st.finish.copy(),
                config=st.config.copy(),
                placement=st.mask.copy(),
                category=st.category.copy(),
                quality=st.q[np.arange(len(st)), st.config],
                work_core_s=costs[st.config],
                credits=st.credits.copy(),
                segment_bytes=seg_bytes,
                segment_duration_s=d,
            )
        )
    occ = occupancy_at_arrivals(
        np.concatenate([r.arrivals for r in results]), np.concatenate([r.finish for r in results])
    )
    high_water = int(occ.max()) * seg_bytes
    violations = int(np.sum(occ * seg_bytes > buffer_bytes))
    if violations:
        raise AssertionError(f"buffer bound violated at {violations} arrival event(s)")

    quality = float(sum(r.quality.sum() for r in results))
    work = float(sum(r.work_core_s.sum() for r in results))
    summary = {
        "mode": options.mode,
        "streams": n_streams,
        "segments": int(sum(len(st) for st in streams)),
        "decisions": len(decisions),
        "plans": plan_index + 1,
        "quality_total": quality,
        "quality_mean": quality / sum(len(st) for st in streams),
    }
    if options.normalize:
        opt = sum(optimum_quality(st.q, costs, float(r.work_core_s.sum())) for st, r in zip(streams, results))
        summary["optimum_quality"] = opt
        summary["quality_normalized"] = quality / opt if opt > 0 else 1.0
    summary.update(
        {
            "work_core_s": work,
            "onprem_core_s": float(sum(onprem_work(fitted, r) for r in results)),
            "cloud_credits": float(sum(r.credits.sum() for r in results)),
            "buffer_bytes": buffer_bytes,
            "buffer_high_water_bytes": high_water,
            "eq1_violations": violations,
            "fallback_decisions": fallbacks,
            "forced_decisions": forced,
            "cloud_decisions": sum(1 for row in decisions if row["placement"]),
            "drift_mean_gap": float(np.mean(drift_gaps)) if drift_gaps else 0.0,
        }
    )
    counts = Counter(row["config"] for row in decisions)
    return MetricsReport(
        summary=summary,
        timeline=timeline(results, options.timeline_bin_s, n_out, provision.cloud_budget_credits),
        decisions=decisions,
        decision_counts={cid: counts.get(cid, 0) for cid in fitted.config_ids},
        plans=plans,
        streams=results,
    )


def onprem_work(fitted: FittedModel, r: StreamResult) -> float:
    """Core-seconds executed on-prem: nodes a placement sends to the cloud do not count."""
    total = 0.0
    pairs, counts = np.unique(np.stack([r.config, r.placement]), axis=1, return_counts=True)
    for (k, mask), n in zip(pairs.T, counts):
        g = fitted.workload.graph_for(fitted.configs[k])
        total += n * sum(node.onprem_runtime_s for i, node in enumerate(g.nodes) if not (mask >> i) & 1)
    return total


def run_ingestion(
    trace: Trace,
    fitted: FittedModel,
    provision: ResourceProvision,
    horizon: PlanningHorizon | None = None,
    options: RunOptions = RunOptions(),
) -> MetricsReport:
    return run_streams([trace], fitted, provision, horizon, options)


def run_ablation(
    trace: Trace,
    fitted: FittedModel,
    provision: ResourceProvision,
    mode: str,
    horizon: PlanningHorizon | None = None,
    options: RunOptions = RunOptions(),
) -> MetricsReport:
    return run_streams([trace], fitted, provision, horizon, replace(options, mode=mode))


# ---------------------------------------------------------------------------
# timelines


def timeline(results: Sequence[StreamResult], bin_s: float, n_out: int, interval_credits: float) -> list[dict]:
    """Per-bin work, peak buffer bytes, share of the interval's credits spent so far, and mean quality."""
    rows = []
    d = results[0].segment_duration_s
    n_max = max(len(r.arrivals) for r in results)
    n_bins = int(math.ceil(n_max * d / bin_s - 1e-12))
    all_arr = np.concatenate([r.arrivals for r in results])
    occ = occupancy_at_arrivals(all_arr, np.concatenate([r.finish for r in results]))
    order = np.argsort(all_arr, kind="stable")
    arr_sorted = all_arr[order]
    for b in range(n_bins):
        lo, hi = b * bin_s, (b + 1) * bin_s
        work = quality = credits = 0.0
        count = 0
        for r in results:
            start = np.arange(len(r.arrivals)) * d
            sel = (start >= lo) & (start < hi)
            work += float(r.work_core_s[sel].sum())
            quality += float(r.quality[sel].sum())
            count += int(sel.sum())
            # credits spent in the current planned interval up to the end of this bin
            last = int(min(len(r.arrivals), math.ceil(hi / d - 1e-9)))
            first = (max(last - 1, 0) // n_out) * n_out
            credits += float(r.credits[first:last].sum())
        in_bin = (arr_sorted >= lo) & (arr_sorted < hi)
        buf = int(occ[in_bin].max()) * results[0].segment_bytes if in_bin.any() else 0
        rows.append(
            {
                "t": lo,
                "workload_tflops_proxy": work,
                "buffer_bytes": buf,
                "credits_fraction": credits / interval_credits if interval_credits > 0 else 0.0,
                "quality": quality / count if count else 0.0,
            }
        )
    return rows


# ---------------------------------------------------------------------------
# baselines


def _resolve_config(fitted: FittedModel, config) -> int:
    """Workload-model index of ``config`` (a filtered-set position, a configuration, or an id)."""
    wl = fitted.workload
    if isinstance(config, KnobConfiguration):
        return wl.config_index(config)
    if isinstance(config, str):
        return wl.config_index(wl.config_by_id(config))
    return fitted.config_indices[int(config)]


def run_static_baseline(
    trace: Trace,
    fitted: FittedModel,
    config,
    provision: ResourceProvision,
    timeline_bin_s: float = 3600.0,
) -> MetricsReport:
    """Process every segment with one configuration, all on-prem. Falling behind beyond the buffer is
    reported (``infeasible=true``), not raised."""
    wl = fitted.workload
    ki = _resolve_config(fitted, config)
    k = wl.configs[ki]
    g = wl.graph_for(k)
    runtime = estimate_runtime(
        g, Placement.all_onprem(len(g)), provision.onprem_cores, provision.uplink_bytes_per_s,
        provision.downlink_bytes_per_s,
    )
    d = trace.segment_duration_s
    arrivals = (np.arange(len(trace)) + 1) * d
    finish = static_finish_times(arrivals, runtime)
    occ = occupancy_at_arrivals(arrivals, finish)
    q = quality_matrix(wl, trace.categories, trace.noise_seeds, [ki])[:, 0]
    cost = float(wl.costs[ki])
    high = int(occ.max()) * trace.segment_bytes
    infeasible = bool(high > provision.buffer_bytes)
    result = StreamResult(
        arrivals, finish, np.full(len(trace), ki), np.zeros(len(trace), dtype=np.int64), np.full(len(trace), -1), q, np.full(len(trace), cost),
        np.zeros(len(trace)), trace.segment_bytes, d,
    )
    summary = {
        "mode": "static",
        "config": k.id,
        "segments": len(trace),
        "quality_total": float(q.sum()),
        "quality_mean": float(q.mean()),
        "work_core_s": cost * len(trace),
        "runtime_s": runtime,
        "buffer_bytes": provision.buffer_bytes,
        "buffer_high_water_bytes": high,
        "infeasible": infeasible,
    }
    return MetricsReport(
        summary=summary,
        timeline=timeline([result], timeline_bin_s, max(1, len(trace)), 0.0),
        decision_counts={k.id: len(trace)},
        streams=[result],
    )


def best_feasible_static(
    trace: Trace, fitted: FittedModel, provision: ResourceProvision, work_budget_core_s: float = math.inf
) -> MetricsReport | None:
    """Highest-quality static run over the filtered set that keeps up and stays within the work budget."""
    best = None
    for k in range(len(fitted.config_indices)):
        if fitted.costs[k] * len(trace) > work_budget_core_s * (1 + 1e-12):
            continue
        rep = run_static_baseline(trace, fitted, k, provision)
        if rep.summary["infeasible"]:
            continue
        if best is None or rep.summary["quality_total"] > best.summary["quality_total"]:
            best = rep
    return best


def optimum_assignment(qualities: np.ndarray, costs: np.ndarray, budget_core_s: float) -> np.ndarray:
    """Greedy 0-1 knapsack over per-segment upgrades; returns the chosen config per segment.

    Every segment starts at the cheapest configuration. Upgrades along each
    segment's upper hull are taken in descending quality-per-cost order;
    an upgrade that does not fit is skipped, and so are later upgrades of the
    same segment.
    """
    q = np.asarray(qualities, dtype=np.float64)
    costs = np.asarray(costs, dtype=np.float64)
    n = len(q)
    hulls = [upper_hull(costs, row) for row in q]
    choice = np.array([h[0] for h in hulls], dtype=np.int64)
    remaining = budget_core_s - float(costs[choice].sum())
    if remaining < 0:
        return choice
    items = []
    for s, h in enumerate(hulls):
        for j in range(len(h) - 1):
            dc = costs[h[j + 1]] - costs[h[j]]
            items.append(((q[s, h[j + 1]] - q[s, h[j]]) / dc, s, j, dc))
    items.sort(key=lambda it: (-it[0], it[1], it[2]))
    step = np.zeros(n, dtype=np.int64)
    blocked = np.zeros(n, dtype=bool)
    for _, s, j, dc in items:
        if blocked[s] or step[s] != j:
            continue
        if dc <= remaining + 1e-9:
            remaining -= dc
            step[s] = j + 1
            choice[s] = hulls[s][j + 1]
        else:
            blocked[s] = True
    return choice


def optimum_quality(qualities: np.ndarray, costs: np.ndarray, budget_core_s: float) -> float:
    choice = optimum_assignment(qualities, costs, budget_core_s)
    return float(np.asarray(qualities)[np.arange(len(choice)), choice].sum())


def run_optimum_baseline(
    trace: Trace,
    fitted: FittedModel,
    provision: ResourceProvision | None = None,
    budget_core_s: float | None = None,
    planned_interval_s: float | None = None,
) -> MetricsReport:
    """Oracle scheduler with ground-truth qualities. The work budget defaults to what the provision
    buys over the trace (core time plus converted credits for each planned interval)."""
    wl = fitted.workload
    if budget_core_s is None:
        if provision is None:
            raise ConfigError("need a provision or an explicit budget")
        interval = planned_interval_s or fitted.horizon.planned_interval_s
        n_intervals = max(1, math.ceil(trace.duration_s / interval - 1e-12))
        budget_core_s = compute_budget(provision, trace.duration_s) + (n_intervals - 1) * (
            provision.cloud_budget_credits / (provision.cloud_cost_ratio * provision.onprem_price_credits_per_core_s)
        )
    q = quality_matrix(wl, trace.categories, trace.noise_seeds, fitted.config_indices)
    costs = fitted.costs
    choice = optimum_assignment(q, costs, budget_core_s)
    quality = q[np.arange(len(q)), choice]
    summary = {
        "mode": "optimum",
        "segments": len(trace),
        "quality_total": float(quality.sum()),
        "quality_mean": float(quality.mean()),
        "work_core_s": float(costs[choice].sum()),
        "budget_core_s": float(budget_core_s),
    }
    counts = Counter(fitted.config_ids[k] for k in choice)
    return MetricsReport(summary=summary, decision_counts={cid: counts.get(cid, 0) for cid in fitted.config_ids})


# ---------------------------------------------------------------------------
# output files


def write_summary(report: MetricsReport, path: str | Path) -> None:
    Path(path).write_text(report.summary_line() + "\n")


def write_timeline(report: MetricsReport, path: str | Path) -> None:
    cols = ["t", "workload_tflops_proxy", "buffer_bytes", "credits_fraction", "quality"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in report.timeline:
            w.writerow([_fmt(row[c]) for c in cols])


def write_decision_log(report: MetricsReport, path: str | Path) -> None:
    with open(path, "w") as fh:
        for row in report.decisions:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def write_report(report: MetricsReport, out_dir: str | Path, stem: str) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "summary": out / f"{stem}_summary.txt",
        "timeline": out / f"{stem}_timeline.csv",
    }
    write_summary(report, paths["summary"])
    write_timeline(report, paths["timeline"])
    if report.decisions:
        paths["decisions"] = out / f"{stem}_decisions.jsonl"
        write_decision_log(report, paths["decisions"])
    return paths
