"""Synthetic stand-in for real video: content categories, per-config qualities, task graphs, traces.

A trace is a sequence of equal-length segments whose hidden category follows a
Markov dwell process with a time-of-day mixing curve, optionally overridden by
spike windows. Quality of (config, segment) is the category mean plus a
Gaussian perturbation derived by hashing ``(segment.noise_seed, config index)``,
so it is reproducible without storing anything per segment.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
import yaml

from .core import (
    SCHEMA_VERSION,
    UDF,
    ConfigError,
    Knob,
    KnobConfiguration,
    Segment,
    TaskGraph,
    cost_of_config,
)

DAY_S = 86400.0

# ---------------------------------------------------------------------------
# counter-based noise


_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    z = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def standard_normal_hash(seeds, streams) -> np.ndarray:
    """Deterministic N(0, 1) draw for each (seed, stream) pair, broadcast elementwise."""
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    key = _splitmix64(seeds ^ _splitmix64(streams * np.uint64(2) + np.uint64(1)))
    h1 = _splitmix64(key)
    h2 = _splitmix64(h1 ^ np.uint64(0xD1B54A32D192ED03))
    u1 = 1.0 - (h1 >> np.uint64(11)).astype(np.float64) * 2.0**-53  # (0, 1]
    u2 = (h2 >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


# ---------------------------------------------------------------------------
# model description


@dataclass(frozen=True)
class KnobSpec:
    """A knob plus how each of its values scales work, upload payload and detector fan-out."""

    name: str
    values: tuple
    work: tuple[float, ...]
    payload: tuple[float, ...] | None = None
    fanout: tuple[int, ...] | None = None

    def __post_init__(self):
        n = len(self.values)
        for attr in ("work", "payload", "fanout"):
            v = getattr(self, attr)
            if v is not None and len(v) != n:
                raise ConfigError(f"knob {self.name!r}: {attr} needs {n} entries")
        if any(w <= 0 for w in self.work):
            raise ConfigError(f"knob {self.name!r}: work multipliers must be > 0")

    @property
    def knob(self) -> Knob:
        return Knob(self.name, tuple(self.values))


@dataclass(frozen=True)
class GraphSpec:
    """decode -> ``branches`` parallel detectors -> merge, sized by the configuration's work."""

    base_work_s: float = 1.0
    decode_fraction: float = 0.05
    merge_fraction: float = 0.05
    branches: int = 4
    cloud_latency_s: float = 0.15
    cloud_time_factor: float = 0.1
    payload_bytes: float = 1_000_000.0
    detection_bytes: float = 20_000.0

    def __post_init__(self):
        if self.decode_fraction + self.merge_fraction >= 1:
            raise ConfigError("decode_fraction + merge_fraction must be < 1")
        if self.branches < 1:
            raise ConfigError("branches must be >= 1")


@dataclass(frozen=True)
class CategorySpec:
    name: str
    mean_quality: tuple[float, ...]
    noise_stddev: float = 0.0


@dataclass(frozen=True)
class SpikeSpec:
    """Force ``category`` during [start, start+duration), repeated every ``period_s`` if > 0."""

    start_s: float
    duration_s: float
    category: int
    period_s: float = 0.0


@dataclass(frozen=True)
class ScheduleSpec:
    night_weights: tuple[float, ...]
    day_weights: tuple[float, ...]
    dwell_s: tuple[float, ...]
    spikes: tuple[SpikeSpec, ...] = ()

    def mixture(self, t_s) -> np.ndarray:
        """Per-category jump probabilities at time ``t_s`` (seconds since midnight of day 0)."""
        night = np.asarray(self.night_weights, float)
        day = np.asarray(self.day_weights, float)
        w = 0.5 * (1.0 - np.cos(2.0 * np.pi * (np.asarray(t_s, float) % DAY_S) / DAY_S))
        p = (1.0 - w)[..., None] * night + w[..., None] * day
        return p / p.sum(axis=-1, keepdims=True)


@dataclass(frozen=True, eq=False)
class WorkloadModel:
    model_id: str
    knob_specs: tuple[KnobSpec, ...]
    categories: tuple[CategorySpec, ...]
    schedule: ScheduleSpec
    graph: GraphSpec = field(default_factory=GraphSpec)
    segment_duration_s: float = 2.0
    segment_bytes: int = 1_000_000
    check_monotone: bool = True

    def __post_init__(self):
        object.__setattr__(self, "knob_specs", tuple(self.knob_specs))
        object.__setattr__(self, "categories", tuple(self.categories))
        n_cat = len(self.categories)
        if n_cat < 1:
            raise ConfigError("workload needs at least one category")
        for attr in ("night_weights", "day_weights", "dwell_s"):
            if len(getattr(self.schedule, attr)) != n_cat:
                raise ConfigError(f"schedule.{attr} needs {n_cat} entries")
        for sp in self.schedule.spikes:
            if not 0 <= sp.category < n_cat:
                raise ConfigError(f"spike category {sp.category} out of range")
        if self.segment_duration_s <= 0 or self.segment_bytes <= 0:
            raise ConfigError("segment duration and size must be > 0")
        means = self.mean_qualities
        if means.shape != (n_cat, self.n_configs):
            raise ConfigError(f"each category needs {self.n_configs} mean qualities")
        if np.any(means < 0) or np.any(means > 1):
            raise ConfigError("mean qualities must lie in [0, 1]")
        for c in self.categories:
            if c.noise_stddev < 0:
                raise ConfigError("noise_stddev must be >= 0")
        if self.check_monotone:
            self._check_monotone()

    def _check_monotone(self):
        costs = self.costs
        order = np.argsort(costs, kind="stable")
        for c, spec in enumerate(self.categories):
            q = self.mean_qualities[c, order]
            # running max of cheaper configs; a pricier one may trail it by at most sigma
            best = np.maximum.accumulate(q)
            cheaper_best = np.concatenate(([-np.inf], best[:-1]))
            strictly_pricier = np.concatenate(([False], np.diff(costs[order]) > 0))
            bad = strictly_pricier & (q < cheaper_best - spec.noise_stddev - 1e-12)
            if np.any(bad):
                k = int(order[np.argmax(bad)])
                raise ConfigError(
                    f"category {spec.name!r}: config {self.configs[k].id} costs more but is "
                    "worse than a cheaper one by more than noise_stddev"
                )

    # -- configuration space

    @cached_property
    def knobs(self) -> tuple[Knob, ...]:
        return tuple(ks.knob for ks in self.knob_specs)

    @cached_property
    def configs(self) -> tuple[KnobConfiguration, ...]:
        ranges = [range(len(ks.values)) for ks in self.knob_specs]
        return tuple(KnobConfiguration.from_ranks(self.knobs, r) for r in itertools.product(*ranges))

    @property
    def n_configs(self) -> int:
        return math.prod(len(ks.values) for ks in self.knob_specs)

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {k.ranks: i for i, k in enumerate(self.configs)}

    def config_index(self, k: KnobConfiguration) -> int:
        try:
            return self._index[k.ranks]
        except KeyError:
            raise ConfigError(f"{k.id} is not in this model's configuration space") from None

    def config_by_id(self, config_id: str) -> KnobConfiguration:
        for k in self.configs:
            if k.id == config_id:
                return k
        raise ConfigError(f"unknown configuration id {config_id!r}")

    @cached_property
    def mean_qualities(self) -> np.ndarray:
        m = np.array([c.mean_quality for c in self.categories], dtype=np.float64)
        m.setflags(write=False)
        return m

    @cached_property
    def noise_stddevs(self) -> np.ndarray:
        return np.array([c.noise_stddev for c in self.categories], dtype=np.float64)

    @property
    def n_categories(self) -> int:
        return len(self.categories)

    # -- task graphs

    def graph_for(self, k: KnobConfiguration) -> TaskGraph:
        g = self.graph
        work = g.base_work_s
        payload = g.payload_bytes
        branches = g.branches
        for ks, r in zip(self.knob_specs, k.ranks):
            work *= ks.work[r]
            if ks.payload is not None:
                payload *= ks.payload[r]
            if ks.fanout is not None:
                branches *= ks.fanout[r]
        detect_s = work * (1.0 - g.decode_fraction - g.merge_fraction) / branches

        def cloud_rtt(onprem_s):
            return g.cloud_latency_s + g.cloud_time_factor * onprem_s

        decode_s = work * g.decode_fraction
        merge_s = work * g.merge_fraction
        nodes = [UDF(0, decode_s, cloud_rtt(decode_s), float(self.segment_bytes), payload, "decode")]
        for b in range(branches):
            nodes.append(
                UDF(b + 1, detect_s, cloud_rtt(detect_s), payload / branches, g.detection_bytes, f"detect{b}")
            )
        nodes.append(
            UDF(branches + 1, merge_s, cloud_rtt(merge_s), g.detection_bytes * branches, g.detection_bytes, "merge")
        )
        edges = [(0, b + 1) for b in range(branches)] + [(b + 1, branches + 1) for b in range(branches)]
        return TaskGraph(tuple(nodes), tuple(edges))

    @cached_property
    def costs(self) -> np.ndarray:
        c = np.array([cost_of_config(k, self.graph_for(k)) for k in self.configs])
        c.setflags(write=False)
        return c

    def cheapest_config(self) -> KnobConfiguration:
        return self.configs[int(np.argmin(self.costs))]

    # -- serialization

    def to_dict(self) -> dict:
        g = self.graph
        return {
            "schema_version": SCHEMA_VERSION,
            "model_id": self.model_id,
            "segment_duration_s": self.segment_duration_s,
            "segment_bytes": self.segment_bytes,
            **({} if self.check_monotone else {"check_monotone": False}),
            "knobs": [
                {
                    "name": ks.name,
                    "values": list(ks.values),
                    "work": list(ks.work),
                    **({"payload": list(ks.payload)} if ks.payload is not None else {}),
                    **({"fanout": list(ks.fanout)} if ks.fanout is not None else {}),
                }
                for ks in self.knob_specs
            ],
            "graph": {
                "base_work_s": g.base_work_s,
                "decode_fraction": g.decode_fraction,
                "merge_fraction": g.merge_fraction,
                "branches": g.branches,
                "cloud_latency_s": g.cloud_latency_s,
                "cloud_time_factor": g.cloud_time_factor,
                "payload_bytes": g.payload_bytes,
                "detection_bytes": g.detection_bytes,
            },
            "categories": [
                {"name": c.name, "noise_stddev": c.noise_stddev, "mean_quality": [float(q) for q in c.mean_quality]}
                for c in self.categories
            ],
            "schedule": {
                "night_weights": list(self.schedule.night_weights),
                "day_weights": list(self.schedule.day_weights),
                "dwell_s": list(self.schedule.dwell_s),
                "spikes": [
                    {"start_s": s.start_s, "duration_s": s.duration_s, "category": s.category, "period_s": s.period_s}
                    for s in self.schedule.spikes
                ],
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "WorkloadModel":
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported workload schema_version {doc.get('schema_version')!r}")
        try:
            knobs = tuple(
                KnobSpec(
                    k["name"],
                    tuple(k["values"]),
                    tuple(float(w) for w in k["work"]),
                    tuple(float(p) for p in k["payload"]) if "payload" in k else None,
                    tuple(int(f) for f in k["fanout"]) if "fanout" in k else None,
                )
                for k in doc["knobs"]
            )
            sched = doc["schedule"]
            schedule = ScheduleSpec(
                tuple(float(w) for w in sched["night_weights"]),
                tuple(float(w) for w in sched["day_weights"]),
                tuple(float(w) for w in sched["dwell_s"]),
                tuple(SpikeSpec(**s) for s in sched.get("spikes", [])),
            )
            cats = tuple(
                CategorySpec(c["name"], tuple(float(q) for q in c["mean_quality"]), float(c.get("noise_stddev", 0.0)))
                for c in doc["categories"]
            )
            return cls(
                model_id=str(doc["model_id"]),
                knob_specs=knobs,
                categories=cats,
                schedule=schedule,
                graph=GraphSpec(**doc.get("graph", {})),
                segment_duration_s=float(doc.get("segment_duration_s", 2.0)),
                segment_bytes=int(doc.get("segment_bytes", 1_000_000)),
                check_monotone=bool(doc.get("check_monotone", True)),
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"malformed workload model: {e!r}") from None


def load_workload(path: str | Path) -> WorkloadModel:
    name = str(path)
    if name in BUILTIN_MODELS:
        return BUILTIN_MODELS[name]()
    try:
        doc = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: parse error: {e}") from None
    return WorkloadModel.from_dict(doc)


def save_workload(model: WorkloadModel, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(model.to_dict(), sort_keys=False))


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True, eq=False)
class Trace:
    """Time-ordered segments, stored column-wise. Iterating yields :class:`Segment` objects."""

    categories: np.ndarray
    noise_seeds: np.ndarray
    segment_duration_s: float
    segment_bytes: int
    seed: int = 0
    model_id: str = ""

    def __post_init__(self):
        cats = np.asarray(self.categories, dtype=np.int64)
        seeds = np.asarray(self.noise_seeds, dtype=np.uint64)
        if cats.shape != seeds.shape or cats.ndim != 1:
            raise ConfigError("categories and noise_seeds must be equal-length vectors")
        cats.setflags(write=False)
        seeds.setflags(write=False)
        object.__setattr__(self, "categories", cats)
        object.__setattr__(self, "noise_seeds", seeds)

    def __len__(self) -> int:
        return len(self.categories)

    def __getitem__(self, i: int) -> Segment:
        if i < 0:
            i += len(self)
        return Segment(
            int(i), self.segment_duration_s, self.segment_bytes, int(self.categories[i]), int(self.noise_seeds[i])
        )

    def __iter__(self) -> Iterator[Segment]:
        return (self[i] for i in range(len(self)))

    @property
    def segments(self) -> list[Segment]:
        return list(self)

    @property
    def duration_s(self) -> float:
        return len(self) * self.segment_duration_s

    def slice(self, start: int, stop: int) -> "Trace":
        # re-indexes from 0; keeps the original noise seeds so qualities are unchanged
        return Trace(
            self.categories[start:stop],
            self.noise_seeds[start:stop],
            self.segment_duration_s,
            self.segment_bytes,
            self.seed,
            self.model_id,
        )

    def __eq__(self, other):
        return (
            isinstance(other, Trace)
            and np.array_equal(self.categories, other.categories)
            and np.array_equal(self.noise_seeds, other.noise_seeds)
            and self.segment_duration_s == other.segment_duration_s
            and self.segment_bytes == other.segment_bytes
        )


def spike_mask(schedule: ScheduleSpec, n_segments: int, segment_duration_s: float) -> np.ndarray:
    """Category forced by a spike at each segment, or -1 where no spike is active."""
    forced = np.full(n_segments, -1, dtype=np.int64)
    starts = np.arange(n_segments) * segment_duration_s
    for sp in schedule.spikes:
        if sp.period_s > 0:
            phase = (starts - sp.start_s) % sp.period_s
            active = (starts >= sp.start_s) & (phase < sp.duration_s)
        else:
            active = (starts >= sp.start_s) & (starts < sp.start_s + sp.duration_s)
        forced[active] = sp.category
    return forced


def generate_trace(model: WorkloadModel, duration_s: float, seed: int) -> Trace:
    """Draw a trace of ``floor(duration_s / segment_duration)`` segments. Pure in (model, duration, seed)."""
    d = model.segment_duration_s
    n = int(math.floor(duration_s / d + 1e-9))
    if n < 1:
        raise ConfigError(f"duration {duration_s} s is shorter than one segment ({d} s)")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EC7]))
    sched = model.schedule
    p_leave = np.minimum(1.0, d / np.asarray(sched.dwell_s, dtype=np.float64))
    cats = np.empty(n, dtype=np.int64)
    i = 0
    while i < n:
        p = sched.mixture(i * d)
        c = int(rng.choice(len(p), p=p))
        # geometric run length: mean dwell_s / d segments
        run = int(rng.geometric(p_leave[c]))
        cats[i : i + run] = c
        i += run
    forced = spike_mask(sched, n, d)
    cats = np.where(forced >= 0, forced, cats)
    noise_seeds = rng.integers(0, 2**63, size=n, dtype=np.uint64)
    return Trace(cats, noise_seeds, d, model.segment_bytes, seed, model.model_id)


def stationary_distribution(model: WorkloadModel, t_s: float = 0.0) -> np.ndarray:
    """Long-run fraction of time in each category when the mixture is frozen at ``t_s``."""
    p = model.schedule.mixture(t_s)
    w = p * np.asarray(model.schedule.dwell_s, float)
    return w / w.sum()


def save_trace(trace: Trace, path: str | Path) -> None:
    d = trace.segment_duration_s
    with open(path, "w") as fh:
        fh.write(
            json.dumps(
                {"header": {"schema_version": SCHEMA_VERSION, "seed": trace.seed, "model_id": trace.model_id}},
                sort_keys=True,
            )
            + "\n"
        )
        for i, (c, s) in enumerate(zip(trace.categories.tolist(), trace.noise_seeds.tolist())):
            rec = {
                "index": i,
                "start_s": i * d,
                "duration_s": d,
                "size_bytes": trace.segment_bytes,
                "true_category": c,
                "noise_seed": s,
            }
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_trace(path: str | Path) -> Trace:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    header = {}
    cats, seeds = [], []
    duration = size = None
    try:
        for n, line in enumerate(lines):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "header" in rec:
                header = rec["header"]
                continue
            if rec["index"] != len(cats):
                raise ConfigError(f"{path}:{n + 1}: segment indices must be contiguous from 0")
            if duration is None:
                duration, size = float(rec["duration_s"]), int(rec["size_bytes"])
            elif float(rec["duration_s"]) != duration or int(rec["size_bytes"]) != size:
                raise ConfigError(f"{path}:{n + 1}: segment duration and size must be uniform")
            cats.append(int(rec["true_category"]))
            seeds.append(int(rec["noise_seed"]))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{path}: malformed trace record: {e}") from None
    if not cats:
        raise ConfigError(f"{path}: trace has no segments")
    return Trace(
        np.array(cats), np.array(seeds, dtype=np.uint64), duration, size, int(header.get("seed", 0)),
        str(header.get("model_id", "")),
    )


# ---------------------------------------------------------------------------
# quality oracle


def quality_matrix(model: WorkloadModel, categories, noise_seeds, config_indices) -> np.ndarray:
    """Oracle qualities, shape ``(len(categories), len(config_indices))``."""
    cats = np.asarray(categories, dtype=np.int64)
    seeds = np.asarray(noise_seeds, dtype=np.uint64)
    ks = np.asarray(config_indices, dtype=np.int64)
    mean = model.mean_qualities[cats[:, None], ks[None, :]]
    sigma = model.noise_stddevs[cats][:, None]
    z = standard_normal_hash(seeds[:, None], ks[None, :].astype(np.uint64))
    return np.clip(mean + sigma * z, 0.0, 1.0)


def trace_qualities(model: WorkloadModel, trace: Trace, config_indices: Sequence[int] | None = None) -> np.ndarray:
    if config_indices is None:
        config_indices = range(model.n_configs)
    return quality_matrix(model, trace.categories, trace.noise_seeds, list(config_indices))


def oracle_quality(k: KnobConfiguration, s: Segment, model: WorkloadModel) -> float:
    """Quality ``k`` achieves on ``s``: category mean plus seeded noise, clamped to [0, 1]."""
    ki = model.config_index(k)
    return float(quality_matrix(model, [s.true_category], [s.noise_seed], [ki])[0, 0])


# ---------------------------------------------------------------------------
# built-in models


def default_model() -> WorkloadModel:
    """Three categories, one knob with five values; work doubles per step."""
    return WorkloadModel(
        model_id="default",
        knob_specs=(
            KnobSpec(
                "frame_rate",
                (2, 4, 8, 15, 30),
                work=(1.0, 2.0, 4.0, 8.0, 16.0),
                payload=(1.0, 2.0, 4.0, 8.0, 16.0),
            ),
        ),
        categories=(
            CategorySpec("busy", (0.20, 0.35, 0.50, 0.65, 0.76), 0.015),
            CategorySpec("moderate", (0.55, 0.68, 0.78, 0.85, 0.88), 0.015),
            CategorySpec("quiet", (0.90, 0.94, 0.97, 0.99, 1.00), 0.015),
        ),
        schedule=ScheduleSpec(
            night_weights=(0.05, 0.25, 0.70),
            day_weights=(0.45, 0.35, 0.20),
            dwell_s=(40.0, 40.0, 40.0),
        ),
    )


def covid_model() -> WorkloadModel:
    """Three knobs, 5*4*2 = 40 configurations, with a small per-config inefficiency."""
    frame_rate = KnobSpec("frame_rate", (1, 5, 10, 15, 30), work=(1.0, 4.0, 7.0, 10.0, 18.0), payload=(1, 5, 10, 15, 30))
    detect_every = KnobSpec("detect_every", (60, 30, 5, 1), work=(1.0, 1.3, 2.2, 4.0))
    tiles = KnobSpec("tiles", ("1x1", "2x2"), work=(1.0, 2.5), fanout=(1, 4))
    knobs = (frame_rate, detect_every, tiles)
    ranges = [range(len(k.values)) for k in knobs]
    works = np.array([math.prod(k.work[r] for k, r in zip(knobs, rr)) for rr in itertools.product(*ranges)])
    effort = np.log(works / works.min()) / np.log(works.max() / works.min())
    sigma = 0.02
    jitter = 0.5 * (1.0 + standard_normal_hash(np.arange(len(works)), 7).clip(-1, 1)) / 2.0  # in [0, 0.5]
    cats = []
    for name, floor, ceil, curv in (("busy", 0.15, 0.80, 2.0), ("moderate", 0.50, 0.90, 3.0), ("quiet", 0.88, 0.99, 5.0)):
        q = floor + (ceil - floor) * (1.0 - np.exp(-curv * effort)) / (1.0 - np.exp(-curv))
        q = q - sigma * jitter
        cats.append(CategorySpec(name, tuple(float(round(v, 6)) for v in q), sigma))
    return WorkloadModel(
        model_id="covid",
        knob_specs=knobs,
        categories=tuple(cats),
        schedule=ScheduleSpec((0.05, 0.25, 0.70), (0.45, 0.35, 0.20), (42.0, 42.0, 42.0)),
        graph=GraphSpec(base_work_s=0.3, branches=2, payload_bytes=100_000.0),
    )


def _spiky(model_id: str, spikes: tuple[SpikeSpec, ...]) -> WorkloadModel:
    base = default_model()
    return WorkloadModel(
        model_id=model_id,
        knob_specs=base.knob_specs,
        categories=base.categories,
        schedule=ScheduleSpec((0.0, 0.3, 0.7), (0.0, 0.3, 0.7), (40.0, 40.0, 40.0), spikes),
        graph=base.graph,
    )


def high_spike_model() -> WorkloadModel:
    """Short, intense peaks of busy content: 10 minutes out of every 30."""
    return _spiky("high", (SpikeSpec(start_s=600.0, duration_s=600.0, category=0, period_s=1800.0),))


def long_spike_model() -> WorkloadModel:
    """One sustained peak of busy content covering most of a 6 h run."""
    return _spiky("long", (SpikeSpec(start_s=1800.0, duration_s=5.0 * 3600.0, category=0),))


BUILTIN_MODELS = {
    "default": default_model,
    "covid": covid_model,
    "high": high_spike_model,
    "long": long_spike_model,
}
