"""Offline preparation: diverse sampling, configuration filtering, content categories, forecast data."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    ConfigError,
    ContentCategorySet,
    KnobConfiguration,
    OfflineParams,
    PlanningHorizon,
    ResourceProvision,
    Segment,
    TrainingParams,
)
from .forecaster import init_model, train
from .modelfile import FittedModel, PlacementContext
from .placement import enumerate_pareto_placements
from .workload import Trace, WorkloadModel, quality_matrix

log = logging.getLogger(__name__)


def _segment_arrays(segments: Sequence[Segment]):
    cats = np.array([s.true_category for s in segments], dtype=np.int64)
    seeds = np.array([s.noise_seed for s in segments], dtype=np.uint64)
    return cats, seeds


# ---------------------------------------------------------------------------
# diverse sampling


def greedy_max_min(vectors: np.ndarray, n: int, tiebreak=None) -> list[int]:
    """Farthest-point selection: start at the smallest-norm vector, then repeatedly add the
    vector whose distance to its nearest selected vector is largest.

    Ties go to the smallest ``tiebreak`` key (default: position). Returns positions.
    """
    v = np.asarray(vectors, dtype=np.float64)
    m = len(v)
    if n > m:
        raise ConfigError(f"cannot pick {n} of {m} candidates")
    keys = np.arange(m) if tiebreak is None else np.asarray(tiebreak)
    rank = np.empty(m, dtype=np.int64)
    rank[np.argsort(keys, kind="stable")] = np.arange(m)

    def best(score):
        # maximize score, then smallest key
        top = np.flatnonzero(score == score.max())
        return int(top[np.argmin(rank[top])])

    if n == 0:
        return []
    picked = [best(-np.linalg.norm(v, axis=1))]
    nearest = np.linalg.norm(v - v[picked[0]], axis=1)
    taken = np.zeros(m, dtype=bool)
    taken[picked[0]] = True
    while len(picked) < n:
        score = np.where(taken, -np.inf, nearest)
        j = best(score)
        picked.append(j)
        taken[j] = True
        nearest = np.minimum(nearest, np.linalg.norm(v - v[j], axis=1))
    return picked


def sample_diverse_segments(
    candidates: Sequence[Segment],
    n_search: int,
    model: WorkloadModel,
    k_minus: KnobConfiguration,
    k_plus: KnobConfiguration,
) -> list[Segment]:
    """Pick ``n_search`` segments whose (k_minus, k_plus) quality pairs are spread apart."""
    if n_search > len(candidates):
        raise ConfigError(f"n_search={n_search} exceeds the {len(candidates)} candidates")
    cats, seeds = _segment_arrays(candidates)
    ks = [model.config_index(k_minus), model.config_index(k_plus)]
    vectors = quality_matrix(model, cats, seeds, ks)
    order = greedy_max_min(vectors, n_search, tiebreak=[s.index for s in candidates])
    return [candidates[i] for i in order]


# ---------------------------------------------------------------------------
# configuration filtering


def nondominated(costs: np.ndarray, quality: np.ndarray, members: Sequence[int]) -> list[int]:
    """Members not dominated by another member (cost no higher, quality no lower, one strict)."""
    keep = []
    for a in members:
        dominated = any(
            costs[b] <= costs[a] and quality[b] >= quality[a] and (costs[b] < costs[a] or quality[b] > quality[a])
            for b in members
            if b != a
        )
        if not dominated:
            keep.append(a)
    return keep


def hill_climb(model: WorkloadModel, quality: np.ndarray) -> list[int]:
    """Greedy lattice walk from the all-cheapest configuration; returns visited config indices.

    Each step raises one knob by one rank, choosing the move with the best quality
    gain per unit of added cost. Moves that add no cost but gain quality win outright.
    The walk stops when no single-knob raise improves quality.
    """
    costs = model.costs
    sizes = [len(ks.values) for ks in model.knob_specs]
    index = {k.ranks: i for i, k in enumerate(model.configs)}
    ranks = tuple(0 for _ in sizes)
    cur = index[ranks]
    visited = [cur]
    while True:
        best_score, best_nb = None, None
        for d in range(len(sizes)):
            if ranks[d] + 1 >= sizes[d]:
                continue
            nb_ranks = ranks[:d] + (ranks[d] + 1,) + ranks[d + 1 :]
            nb = index[nb_ranks]
            dq = quality[nb] - quality[cur]
            if dq <= 0:
                continue
            dc = costs[nb] - costs[cur]
            score = dq / dc if dc > 0 else np.inf
            if best_score is None or score > best_score or (score == best_score and nb < best_nb):
                best_score, best_nb = score, nb
        if best_nb is None:
            return visited
        cur = best_nb
        ranks = model.configs[cur].ranks
        visited.append(cur)


def filter_knob_configs(
    sampled: Sequence[Segment], model: WorkloadModel, k_plus: KnobConfiguration | None = None
) -> list[KnobConfiguration]:
    """Union of per-segment hill-climbing frontiers, pruned by mean sampled quality, cheapest first."""
    if not sampled:
        raise ConfigError("need at least one sampled segment")
    cats, seeds = _segment_arrays(sampled)
    q = quality_matrix(model, cats, seeds, range(model.n_configs))
    costs = model.costs
    union: set[int] = set()
    for row in q:
        visited = hill_climb(model, row)
        union.update(nondominated(costs, row, visited))
    mean_q = q.mean(axis=0)
    k_minus = int(np.argmin(costs))
    union.add(k_minus)
    union.add(model.config_index(k_plus) if k_plus is not None else int(np.argmax(mean_q)))
    members = nondominated(costs, mean_q, sorted(union))
    members.sort(key=lambda k: (costs[k], k))
    return [model.configs[k] for k in members]


# ---------------------------------------------------------------------------
# content categories


def kmeans(
    x: np.ndarray, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-6
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd's algorithm with k-means++ seeding. Returns (centers, labels, inertia).

    Converges when no center moves more than ``tol`` (Euclidean).
    """
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC1A5]))
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            raise ConfigError("degenerate sample: fewer distinct quality vectors than categories")
        idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
        centers[j] = x[min(idx, n - 1)]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))

    for _ in range(max_iter):
        dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dist, axis=1)
        new = centers.copy()
        for j in range(k):
            members = x[labels == j]
            if len(members):
                new[j] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the worst-served point
                far = int(np.argmax(dist[np.arange(n), labels]))
                new[j] = x[far]
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break
    dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(dist, axis=1)
    inertia = float(dist[np.arange(n), labels].sum())
    return centers, labels, inertia


def canonical_order(centers: np.ndarray) -> np.ndarray:
    """Row permutation that sorts centers by mean quality (ascending), then lexicographically."""
    keys = [centers[:, j] for j in range(centers.shape[1] - 1, -1, -1)] + [centers.mean(axis=1)]
    return np.lexsort(keys)


def sample_indices(n_total: int, fraction: float, minimum: int, seed: int) -> np.ndarray:
    n = min(n_total, max(minimum, int(round(fraction * n_total))))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5A3B]))
    return np.sort(rng.choice(n_total, size=n, replace=False))


def quality_vectors(trace: Trace, configs: Sequence[KnobConfiguration], model: WorkloadModel, idx=None) -> np.ndarray:
    ks = [model.config_index(k) for k in configs]
    if idx is None:
        return quality_matrix(model, trace.categories, trace.noise_seeds, ks)
    return quality_matrix(model, trace.categories[idx], trace.noise_seeds[idx], ks)


def compute_content_categories(
    unlabeled: Trace,
    configs: Sequence[KnobConfiguration],
    model: WorkloadModel,
    k_count: int,
    sample_fraction: float = 0.05,
    seed: int = 0,
) -> ContentCategorySet:
    """Cluster sampled quality vectors; centers are returned sorted by mean quality."""
    if k_count < 1:
        raise ConfigError("k_count must be >= 1")
    idx = sample_indices(len(unlabeled), sample_fraction, k_count, seed)
    q = quality_vectors(unlabeled, configs, model, idx)
    if len(np.unique(q, axis=0)) < k_count:
        raise ConfigError(f"degenerate sample: fewer than {k_count} distinct quality vectors")
    centers, _, _ = kmeans(q, k_count, seed=seed)
    return ContentCategorySet(centers[canonical_order(centers)])


def within_cluster_variance(x: np.ndarray, centers: np.ndarray) -> float:
    dist = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return float(dist.min(axis=1).mean())


def pick_discriminating_config(centers: ContentCategorySet, costs: Sequence[float], noise_stddev: float) -> int:
    """Cheapest config whose category means are pairwise at least 2*noise apart.

    Falls back to the config with the widest minimum gap when none qualifies.
    """
    q = centers.centers
    if q.shape[0] == 1:
        return int(np.argmin(costs))
    gaps = []
    for k in range(q.shape[1]):
        col = np.sort(q[:, k])
        gaps.append(float(np.diff(col).min()))
    for k in sorted(range(len(costs)), key=lambda k: (costs[k], k)):
        if gaps[k] >= 2.0 * noise_stddev:
            return k
    return int(np.argmax(gaps))


def classify_qualities(quality: np.ndarray, centers: ContentCategorySet, k: int) -> np.ndarray:
    """Vectorized one-dimensional classification against column ``k`` of the centers."""
    col = centers.centers[:, k]
    return np.argmin(np.abs(np.asarray(quality)[:, None] - col[None, :]), axis=1)


# ---------------------------------------------------------------------------
# forecast training data


def cumulative_counts(labels: np.ndarray, n_categories: int) -> np.ndarray:
    """Row i holds per-category counts of ``labels[:i]``."""
    onehot = np.zeros((len(labels) + 1, n_categories))
    onehot[np.arange(len(labels)) + 1, labels] = 1.0
    return np.cumsum(onehot, axis=0)


def histograms_from_cumulative(cum: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    counts = cum[bounds[..., 1:]] - cum[bounds[..., :-1]]
    totals = counts.sum(axis=-1, keepdims=True)
    return np.divide(counts, totals, out=np.full_like(counts, 1.0 / cum.shape[1]), where=totals > 0)


def window_histograms(labels: np.ndarray, n_categories: int, bounds: np.ndarray) -> np.ndarray:
    """Normalized category histograms of ``labels[bounds[i]:bounds[i+1]]`` for each window."""
    return histograms_from_cumulative(cumulative_counts(labels, n_categories), np.asarray(bounds))


@dataclass(frozen=True)
class WindowSpec:
    n_in: int
    n_split: int
    n_out: int
    stride: int

    @classmethod
    def from_horizon(cls, horizon: PlanningHorizon, segment_duration_s: float, stride_s: float) -> "WindowSpec":
        d = segment_duration_s
        return cls(
            max(horizon.input_splits, int(round(horizon.input_window_s / d))),
            horizon.input_splits,
            max(1, int(round(horizon.planned_interval_s / d))),
            max(1, int(round(stride_s / d))),
        )

    def split_bounds(self, t0: int) -> np.ndarray:
        return t0 - self.n_in + np.round(np.arange(self.n_split + 1) * self.n_in / self.n_split).astype(np.int64)


def forecast_samples(labels: np.ndarray, n_categories: int, spec: WindowSpec) -> tuple[np.ndarray, np.ndarray]:
    """Inputs ``(N, n_split, C)`` and labels ``(N, C)`` from a per-segment category sequence."""
    n = len(labels)
    if n < spec.n_in + spec.n_out:
        raise ConfigError(
            f"trace has {n} segments; need at least {spec.n_in + spec.n_out} for one input window plus one planned interval"
        )
    starts = np.arange(spec.n_in, n - spec.n_out + 1, spec.stride)
    cum = cumulative_counts(labels, n_categories)
    x = histograms_from_cumulative(cum, np.stack([spec.split_bounds(t0) for t0 in starts]))
    y = histograms_from_cumulative(cum, np.stack([starts, starts + spec.n_out], axis=1))[:, 0]
    return x, y


def build_forecast_training_set(
    unlabeled: Trace,
    categories: ContentCategorySet,
    horizon: PlanningHorizon,
    model: WorkloadModel,
    configs: Sequence[KnobConfiguration],
    classify_with: int = 0,
    stride_s: float = 900.0,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(input, label) pairs: ``n_split`` histograms over the past window, one over the next interval.

    Segments are categorized from the quality of ``configs[classify_with]`` alone,
    the same way the online switcher does it.
    """
    labels = classify_trace(unlabeled, categories, model, configs, classify_with)
    spec = WindowSpec.from_horizon(horizon, unlabeled.segment_duration_s, stride_s)
    x, y = forecast_samples(labels, categories.k_count, spec)
    return list(zip(x, y))


def classify_trace(
    trace: Trace, categories: ContentCategorySet, model: WorkloadModel, configs: Sequence[KnobConfiguration], k: int
) -> np.ndarray:
    q = quality_vectors(trace, [configs[k]], model)[:, 0]
    return classify_qualities(q, categories, k)


# ---------------------------------------------------------------------------
# the whole offline phase


@dataclass
class FitReport:
    timings_s: dict[str, float] = field(default_factory=dict)
    n_training_samples: int = 0
    best_epoch: int = -1
    val_mae: float = float("nan")


class _Timer:
    def __init__(self, report: FitReport, stage: str):
        self.report, self.stage = report, stage

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings_s[self.stage] = time.perf_counter() - self.t0
        log.info("%s: %.3fs", self.stage, self.report.timings_s[self.stage])


def fit(
    trace: Trace,
    model: WorkloadModel,
    provision: ResourceProvision,
    horizon: PlanningHorizon,
    offline_params: OfflineParams | None = None,
    training_params: TrainingParams | None = None,
    seed: int = 0,
) -> tuple[FittedModel, FitReport]:
    """Run the whole offline phase on ``trace`` and return ``(FittedModel, FitReport)``.

    The first ``labeled_fraction`` of the trace stands in for the labeled data
    used to find the best configuration; the rest is the unlabeled pool.
    """
    op = offline_params or OfflineParams(segment_duration_s=trace.segment_duration_s)
    tp = training_params or TrainingParams()
    report = FitReport()
    if trace.segment_duration_s != model.segment_duration_s:
        raise ConfigError("trace and workload model disagree on segment duration")
    spec = WindowSpec.from_horizon(horizon, trace.segment_duration_s, op.stride_s)
    n_labeled = max(1, int(round(op.labeled_fraction * len(trace))))
    unlabeled = trace.slice(n_labeled, len(trace)) if n_labeled < len(trace) else trace
    if len(unlabeled) < spec.n_in + spec.n_out:
        raise ConfigError(
            f"trace too short: {len(unlabeled)} unlabeled segments, need {spec.n_in + spec.n_out} "
            "(input window plus planned interval)"
        )

    with _Timer(report, "sample"):
        k_minus = model.cheapest_config()
        labeled = trace.slice(0, n_labeled)
        lab_q = quality_matrix(model, labeled.categories, labeled.noise_seeds, range(model.n_configs)).mean(axis=0)
        k_plus = model.configs[int(np.argmax(lab_q))]
        pre = sample_indices(len(unlabeled), op.n_pre / len(unlabeled), min(op.n_pre, len(unlabeled)), seed)
        candidates = [unlabeled[int(i)] for i in pre]
        sampled = sample_diverse_segments(candidates, min(op.n_search, len(candidates)), model, k_minus, k_plus)

    with _Timer(report, "filter_configs"):
        configs = filter_knob_configs(sampled, model)
        indices = [model.config_index(k) for k in configs]

    with _Timer(report, "enumerate_placements"):
        ctx = PlacementContext(
            provision.onprem_cores,
            provision.uplink_bytes_per_s,
            provision.downlink_bytes_per_s,
            provision.cloud_price_per_invocation_credits,
            provision.egress_price_per_byte,
        )
        placements = [placements_for(model, k, ctx) for k in configs]

    with _Timer(report, "categorize"):
        categories = compute_content_categories(unlabeled, configs, model, op.k_count, op.sample_fraction, seed)
        idx = sample_indices(len(unlabeled), op.sample_fraction, op.k_count, seed)
        global_quality = quality_vectors(unlabeled, configs, model, idx).mean(axis=0)
        costs = model.costs[indices]
        sigma = float(model.noise_stddevs.max())
        k_disc = pick_discriminating_config(categories, costs, sigma)

    with _Timer(report, "build_dataset"):
        labels = classify_trace(unlabeled, categories, model, configs, k_disc)
        x, y = forecast_samples(labels, categories.k_count, spec)
        bootstrap = window_histograms(labels, categories.k_count, spec.split_bounds(len(labels)))
        report.n_training_samples = len(x)

    with _Timer(report, "train_forecaster"):
        net = init_model(x.shape[1] * x.shape[2], categories.k_count, seed=seed)
        net, history = train(
            net, (x.reshape(len(x), -1), y), epochs=tp.epochs, val_fraction=tp.val_fraction, seed=seed,
            batch_size=tp.batch_size, learning_rate=tp.learning_rate, momentum=tp.momentum,
        )
        report.best_epoch = history.best_epoch
        report.val_mae = history.val_mae[history.best_epoch]

    fitted = FittedModel(
        workload=model,
        config_indices=indices,
        placements=placements,
        placement_context=ctx,
        centers=categories,
        forecaster=net,
        horizon=horizon,
        bootstrap_histograms=bootstrap,
        global_quality=global_quality,
        classify_config=k_disc,
        seed=seed,
        fit_info={
            "n_training_samples": report.n_training_samples,
            "best_epoch": report.best_epoch,
            "val_mae": report.val_mae,
            "sampled_segments": [s.index + n_labeled for s in sampled],
        },
    )
    return fitted, report


def placements_for(model: WorkloadModel, k: KnobConfiguration, ctx: PlacementContext) -> list:
    return enumerate_pareto_placements(
        model.graph_for(k), ctx.cores, ctx.uplink_bytes_per_s, ctx.downlink_bytes_per_s,
        ctx.price_per_invocation, ctx.egress_price_per_byte,
    )
