"""Domain types shared by every module, plus config loading and validation."""

from __future__ import annotations

import enum
import graphlib
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, NamedTuple, Sequence

import numpy as np
import yaml

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """A configuration or input file is malformed or violates an invariant."""


class ProvisioningError(RuntimeError):
    """The provisioned resources cannot run the cheapest configuration in real time."""


class InfeasiblePlanError(ValueError):
    """The planning budget is below the cost of the all-cheapest plan."""

    def __init__(self, deficit: float):
        super().__init__(f"budget is {deficit:.6g} core*s short of the all-cheapest plan")
        self.deficit = deficit


# ---------------------------------------------------------------------------
# Knobs and configurations


@dataclass(frozen=True)
class Knob:
    """A tunable parameter with an ordered domain; position in the domain is the cost rank."""

    name: str
    domain: tuple

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.domain:
            raise ConfigError(f"knob {self.name!r} has an empty domain")
        if len(set(map(str, self.domain))) != len(self.domain):
            raise ConfigError(f"knob {self.name!r} has duplicate values")

    def rank(self, value) -> int:
        return self.domain.index(value)


@dataclass(frozen=True)
class KnobConfiguration:
    """One value per registered knob. ``ranks`` holds each value's cost-rank index."""

    assignment: tuple[tuple[str, Any], ...]
    ranks: tuple[int, ...]

    @property
    def id(self) -> str:
        return "|".join(f"{name}={value}" for name, value in self.assignment)

    def __getitem__(self, knob_name: str):
        for name, value in self.assignment:
            if name == knob_name:
                return value
        raise KeyError(knob_name)

    @classmethod
    def from_ranks(cls, knobs: Sequence[Knob], ranks: Sequence[int]) -> "KnobConfiguration":
        if len(ranks) != len(knobs):
            raise ConfigError("configuration must assign exactly one value per knob")
        assignment = tuple((kn.name, kn.domain[r]) for kn, r in zip(knobs, ranks))
        return cls(assignment, tuple(int(r) for r in ranks))


# ---------------------------------------------------------------------------
# Task graphs and placements


class Location(enum.IntEnum):
    ONPREM = 0
    CLOUD = 1


@dataclass(frozen=True)
class UDF:
    id: int
    onprem_runtime_s: float
    cloud_roundtrip_s: float
    input_bytes: float
    output_bytes: float
    name: str = ""

    def __post_init__(self):
        for f in ("onprem_runtime_s", "cloud_roundtrip_s", "input_bytes", "output_bytes"):
            v = getattr(self, f)
            if not (v >= 0 and math.isfinite(v)):
                raise ConfigError(f"UDF {self.id}: {f} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class TaskGraph:
    """A DAG of UDFs. Node ids are 0..n-1 and match their position in ``nodes``."""

    nodes: tuple[UDF, ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise ConfigError(f"node at position {i} has id {node.id}")
        n = len(self.nodes)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ConfigError(f"edge ({a}, {b}) references a missing node")
        self.topological_order()

    def __len__(self) -> int:
        return len(self.nodes)

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in self.nodes]
        for a, b in self.edges:
            preds[b].append(a)
        return preds

    def topological_order(self) -> list[int]:
        ts = graphlib.TopologicalSorter({i: p for i, p in enumerate(self.predecessors())})
        try:
            return list(ts.static_order())
        except graphlib.CycleError as e:
            raise ConfigError(f"task graph has a cycle: {e.args[1]}") from None


@dataclass(frozen=True)
class Placement:
    """Cloud/on-prem label per node, plus the simulator's runtime and cost estimates."""

    labels: tuple[Location, ...]
    estimated_runtime_s: float = float("nan")
    cloud_cost_credits: float = float("nan")

    @property
    def bitmask(self) -> int:
        return sum(1 << i for i, lab in enumerate(self.labels) if lab == Location.CLOUD)

    @property
    def n_cloud(self) -> int:
        return sum(1 for lab in self.labels if lab == Location.CLOUD)

    @classmethod
    def from_bitmask(cls, mask: int, n: int, **kw) -> "Placement":
        return cls(tuple(Location((mask >> i) & 1) for i in range(n)), **kw)

    @classmethod
    def all_onprem(cls, n: int, **kw) -> "Placement":
        return cls((Location.ONPREM,) * n, **kw)


# ---------------------------------------------------------------------------
# Stream content


@dataclass(frozen=True)
class Segment:
    index: int
    duration_s: float
    size_bytes: int
    true_category: int
    noise_seed: int

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ConfigError("segment duration must be > 0")
        if not self.size_bytes > 0:
            raise ConfigError("segment size must be > 0")

    @property
    def start_s(self) -> float:
        return self.index * self.duration_s


@dataclass(frozen=True, eq=False)
class ContentCategorySet:
    """KMeans centers in quality-vector space: ``centers[c, k]`` is the mean quality of config k on category c."""

    centers: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] < 1:
            raise ConfigError("centers must be a non-empty 2-d array")
        if not np.all(np.isfinite(c)):
            raise ConfigError("centers must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)

    @property
    def k_count(self) -> int:
        return self.centers.shape[0]

    @property
    def n_configs(self) -> int:
        return self.centers.shape[1]

    def __eq__(self, other):
        return isinstance(other, ContentCategorySet) and np.array_equal(self.centers, other.centers)


# ---------------------------------------------------------------------------
# Resources and horizon


def _check_positive(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise ConfigError(f"{type(obj).__name__}.{name} must be > 0, got {v!r}")


@dataclass(frozen=True)
class ResourceProvision:
    onprem_cores: int
    buffer_bytes: float
    cloud_budget_credits: float
    uplink_bytes_per_s: float
    downlink_bytes_per_s: float
    cloud_cost_ratio: float = 1.8
    onprem_price_credits_per_core_s: float = 1.0
    cloud_price_per_invocation_credits: float = 1.0
    egress_price_per_byte: float = 0.0

    def __post_init__(self):
        if isinstance(self.onprem_cores, bool) or not isinstance(self.onprem_cores, int):
            raise ConfigError("ResourceProvision.onprem_cores must be an integer")
        _check_positive(
            self,
            (
                "onprem_cores",
                "buffer_bytes",
                "uplink_bytes_per_s",
                "downlink_bytes_per_s",
                "cloud_cost_ratio",
                "onprem_price_credits_per_core_s",
            ),
        )
        # a zero cloud budget (or free invocations) is a legitimate setting
        for name in ("cloud_budget_credits", "cloud_price_per_invocation_credits", "egress_price_per_byte"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"ResourceProvision.{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class PlanningHorizon:
    planned_interval_s: float = 172800.0
    input_window_s: float = 172800.0
    input_splits: int = 8
    switch_period_s: float = 2.0

    def __post_init__(self):
        _check_positive(self, ("planned_interval_s", "input_window_s", "input_splits", "switch_period_s"))
        if self.planned_interval_s <= self.switch_period_s:
            raise ConfigError("planned_interval_s must exceed switch_period_s")

    @property
    def split_s(self) -> float:
        return self.input_window_s / self.input_splits

    def validate_segment(self, segment_duration_s: float) -> None:
        # the window must split into chunks that are whole segments, give or take one
        chunk = self.input_window_s / self.input_splits
        if abs(chunk - round(chunk / segment_duration_s) * segment_duration_s) > segment_duration_s:
            raise ConfigError("input_window_s is not divisible by input_splits")


@dataclass(frozen=True)
class OfflineParams:
    segment_duration_s: float = 2.0
    k_count: int = 4
    sample_fraction: float = 0.05
    n_pre: int = 200
    n_search: int = 5
    stride_s: float = 900.0
    labeled_fraction: float = 0.01

    def __post_init__(self):
        _check_positive(self, ("segment_duration_s", "k_count", "sample_fraction", "n_pre", "n_search", "stride_s"))
        if not 0 < self.sample_fraction <= 1:
            raise ConfigError("sample_fraction must be in (0, 1]")
        if not 0 < self.labeled_fraction <= 1:
            raise ConfigError("labeled_fraction must be in (0, 1]")


@dataclass(frozen=True)
class TrainingParams:
    epochs: int = 40
    batch_size: int = 32
    learning_rate: float = 1e-3
    momentum: float = 0.9
    val_fraction: float = 0.2
    fine_tune: bool = False

    def __post_init__(self):
        _check_positive(self, ("epochs", "batch_size", "learning_rate"))
        if not 0 <= self.momentum < 1:
            raise ConfigError("momentum must be in [0, 1)")
        if not 0 < self.val_fraction < 1:
            raise ConfigError("val_fraction must be in (0, 1)")


@dataclass(frozen=True)
class Config:
    provision: ResourceProvision
    horizon: PlanningHorizon = field(default_factory=PlanningHorizon)
    offline: OfflineParams = field(default_factory=OfflineParams)
    training: TrainingParams = field(default_factory=TrainingParams)
    seed: int = 0
    timeline_bin_s: float = 3600.0


class LoadedConfig(NamedTuple):
    provision: ResourceProvision
    horizon: PlanningHorizon
    params: Config


_SECTIONS = {
    "provision": ResourceProvision,
    "horizon": PlanningHorizon,
    "offline": OfflineParams,
    "training": TrainingParams,
}


def _build(cls, raw: Mapping[str, Any] | None, section: str):
    raw = dict(raw or {})
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(unknown)}")
    kwargs = {}
    for name, value in raw.items():
        ftype = known[name].type
        if ftype == "float" and isinstance(value, str):
            # YAML 1.1 reads exponents without a sign ("1e8") as strings
            try:
                value = float(value)
            except ValueError:
                raise ConfigError(f"[{section}] {name}: expected a number, got {value!r}") from None
        if ftype in ("int",) and isinstance(value, float) and value.is_integer():
            value = int(value)
        elif ftype in ("float",) and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        kwargs[name] = value
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"[{section}]: {e}") from None


def config_from_dict(doc: Mapping[str, Any]) -> Config:
    if not isinstance(doc, Mapping):
        raise ConfigError("configuration root must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    extra = sorted(set(doc) - set(_SECTIONS) - {"schema_version", "seed", "timeline_bin_s"})
    if extra:
        raise ConfigError(f"unknown top-level key(s): {', '.join(extra)}")
    if "provision" not in doc:
        raise ConfigError("missing required section [provision]")
    parts = {name: _build(cls, doc.get(name), name) for name, cls in _SECTIONS.items()}
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    bin_s = float(doc.get("timeline_bin_s", 3600.0))
    if not bin_s > 0:
        raise ConfigError("timeline_bin_s must be > 0")
    cfg = Config(seed=seed, timeline_bin_s=bin_s, **parts)
    cfg.horizon.validate_segment(cfg.offline.segment_duration_s)
    return cfg


def config_to_dict(cfg: Config) -> dict:
    doc: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    for name in _SECTIONS:
        doc[name] = asdict(getattr(cfg, name))
    doc["seed"] = cfg.seed
    doc["timeline_bin_s"] = cfg.timeline_bin_s
    return doc


def load_config(path: str | Path) -> LoadedConfig:
    """Read a YAML config file, validate it and fill in defaults for absent keys."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: parse error: {e}") from None
    cfg = config_from_dict(doc)
    return LoadedConfig(cfg.provision, cfg.horizon, cfg)


def save_config(cfg: Config, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))


def cost_of_config(k: KnobConfiguration | None, graph: TaskGraph) -> float:
    """Core-seconds of on-prem work to process one segment with the graph induced by ``k``."""
    return float(sum(node.onprem_runtime_s for node in graph.nodes))
