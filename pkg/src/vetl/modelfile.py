"""The fitted-model file: everything the online phase needs, in one versioned JSON document."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import SCHEMA_VERSION, ConfigError, ContentCategorySet, KnobConfiguration, Placement, PlanningHorizon
from .forecaster import ForecastModel
from .workload import WorkloadModel

MODEL_KIND = "vetl-fitted-model"


@dataclass(frozen=True)
class PlacementContext:
    """Provision parameters the stored placement estimates were computed under."""

    cores: int
    uplink_bytes_per_s: float
    downlink_bytes_per_s: float
    price_per_invocation: float
    egress_price_per_byte: float = 0.0


@dataclass(eq=False)
class FittedModel:
    """Offline artifacts. Configurations are referred to by position in ``config_indices`` (the filtered set)."""

    workload: WorkloadModel
    config_indices: list[int]
    placements: list[list[Placement]]
    placement_context: PlacementContext
    centers: ContentCategorySet
    forecaster: ForecastModel
    horizon: PlanningHorizon
    bootstrap_histograms: np.ndarray
    global_quality: np.ndarray
    classify_config: int = 0
    seed: int = 0
    fit_info: dict = field(default_factory=dict)

    @property
    def configs(self) -> list[KnobConfiguration]:
        return [self.workload.configs[i] for i in self.config_indices]

    @property
    def config_ids(self) -> list[str]:
        return [k.id for k in self.configs]

    @property
    def costs(self) -> np.ndarray:
        return np.asarray(self.workload.costs)[self.config_indices]

    @property
    def n_categories(self) -> int:
        return self.centers.k_count

    @property
    def cheapest(self) -> int:
        costs = self.costs
        return min(range(len(costs)), key=lambda k: (costs[k], k))

    def to_dict(self) -> dict:
        return {
            "kind": MODEL_KIND,
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "workload": self.workload.to_dict(),
            "configs": [
                {"id": k.id, "model_index": i, "cost_core_s": float(c)}
                for k, i, c in zip(self.configs, self.config_indices, self.costs)
            ],
            "placements": [
                [
                    {"bitmask": p.bitmask, "runtime_s": p.estimated_runtime_s, "cost_credits": p.cloud_cost_credits}
                    for p in ps
                ]
                for ps in self.placements
            ],
            "placement_context": vars(self.placement_context).copy(),
            "centers": self.centers.centers.tolist(),
            "forecaster": self.forecaster.to_dict(),
            "horizon": {
                "planned_interval_s": self.horizon.planned_interval_s,
                "input_window_s": self.horizon.input_window_s,
                "input_splits": self.horizon.input_splits,
                "switch_period_s": self.horizon.switch_period_s,
            },
            "bootstrap_histograms": np.asarray(self.bootstrap_histograms).tolist(),
            "global_quality": np.asarray(self.global_quality).tolist(),
            "classify_config": self.classify_config,
            "fit_info": self.fit_info,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FittedModel":
        if doc.get("kind") != MODEL_KIND:
            raise ConfigError("not a fitted-model file")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(f"model file schema_version {doc.get('schema_version')!r} is not {SCHEMA_VERSION}")
        try:
            workload = WorkloadModel.from_dict(doc["workload"])
            indices = [int(c["model_index"]) for c in doc["configs"]]
            for c, i in zip(doc["configs"], indices):
                if workload.configs[i].id != c["id"]:
                    raise ConfigError(f"config {c['id']!r} does not match the embedded workload")
            graphs = [workload.graph_for(workload.configs[i]) for i in indices]
            placements = [
                [
                    Placement.from_bitmask(
                        int(p["bitmask"]), len(g), estimated_runtime_s=float(p["runtime_s"]),
                        cloud_cost_credits=float(p["cost_credits"]),
                    )
                    for p in ps
                ]
                for ps, g in zip(doc["placements"], graphs)
            ]
            h = doc["horizon"]
            model = cls(
                workload=workload,
                config_indices=indices,
                placements=placements,
                placement_context=PlacementContext(**doc["placement_context"]),
                centers=ContentCategorySet(np.array(doc["centers"], dtype=np.float64)),
                forecaster=ForecastModel.from_dict(doc["forecaster"]),
                horizon=PlanningHorizon(
                    float(h["planned_interval_s"]), float(h["input_window_s"]), int(h["input_splits"]),
                    float(h["switch_period_s"]),
                ),
                bootstrap_histograms=np.array(doc["bootstrap_histograms"], dtype=np.float64),
                global_quality=np.array(doc["global_quality"], dtype=np.float64),
                classify_config=int(doc.get("classify_config", 0)),
                seed=int(doc.get("seed", 0)),
                fit_info=dict(doc.get("fit_info", {})),
            )
        except (KeyError, TypeError, IndexError) as e:
            raise ConfigError(f"malformed model file: {e!r}") from None
        if model.centers.n_configs != len(indices) or len(model.placements) != len(indices):
            raise ConfigError("model file sections disagree on the number of configurations")
        if model.forecaster.n_outputs != model.n_categories:
            raise ConfigError("forecaster output width does not match the number of categories")
        return model


def dumps(model: FittedModel) -> str:
    return json.dumps(model.to_dict(), sort_keys=True, indent=1) + "\n"


def save_model(model: FittedModel, path: str | Path) -> None:
    Path(path).write_text(dumps(model))


def load_model(path: str | Path) -> FittedModel:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: parse error: {e}") from None
    return FittedModel.from_dict(doc)
