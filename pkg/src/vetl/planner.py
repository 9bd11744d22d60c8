"""Knob planning: per-category configuration histograms that maximize expected quality under a budget.

The planning LP is the relaxation of a multiple-choice knapsack: one simplex per
category plus a single budget row. Its optimum is reached greedily. Each category
keeps only the upper concave hull of its (cost, quality) points, starts at its
cheapest hull point, and upgrades are bought in decreasing marginal
quality-per-cost until the budget runs out. The last purchase may be fractional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import ConfigError, InfeasiblePlanError, ResourceProvision

BUDGET_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KnobPlan:
    """``alpha[c, k]``: planned share of category-c content processed with config k."""

    alpha: np.ndarray
    budget_used: float = 0.0
    objective: float = 0.0
    interval: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.float64)
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def n_categories(self) -> int:
        return self.alpha.shape[0]

    def to_rows(self, config_ids: Sequence[str] | None = None) -> list[dict]:
        ids = list(config_ids) if config_ids is not None else [str(k) for k in range(self.alpha.shape[1])]
        return [
            {"category": c, "alpha": {ids[k]: float(a) for k, a in enumerate(row) if a > 0}}
            for c, row in enumerate(self.alpha)
        ]


def compute_budget(provision: ResourceProvision, interval_s: float, trace_segment_rate: float | None = None) -> float:
    """Planning budget in core*s: on-prem capacity plus cloud credits converted at the cloud/on-prem price ratio.

    ``trace_segment_rate`` is accepted for interface symmetry; the budget is per interval, not per segment.
    """
    if not interval_s > 0:
        raise ConfigError("interval_s must be > 0")
    price = provision.onprem_price_credits_per_core_s * provision.cloud_cost_ratio
    if not price > 0:
        raise ConfigError("prices must be positive")
    return provision.onprem_cores * interval_s + provision.cloud_budget_credits / price


def upper_hull(costs: np.ndarray, quality: np.ndarray) -> list[int]:
    """Indices on the upper concave hull of (cost, quality), cheapest first.

    Drops points that are Pareto-dominated or lie on/below the segment joining
    their neighbours. Equal points resolve to the lower index.
    """
    order = sorted(range(len(costs)), key=lambda k: (costs[k], -quality[k], k))
    pareto: list[int] = []
    for k in order:
        if not pareto or quality[k] > quality[pareto[-1]]:
            if pareto and costs[k] == costs[pareto[-1]]:
                continue
            pareto.append(k)
    hull: list[int] = []
    for k in pareto:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # b is kept only if the slope strictly drops after it
            lhs = (quality[b] - quality[a]) * (costs[k] - costs[b])
            rhs = (quality[k] - quality[b]) * (costs[b] - costs[a])
            if lhs > rhs:
                break
            hull.pop()
        hull.append(k)
    return hull


@dataclass
class _Group:
    weight: float
    costs: np.ndarray
    quality: np.ndarray
    hull: list[int] = field(default_factory=list)


def _solve_groups(groups: list[_Group], budget: float) -> tuple[list[np.ndarray], float, float]:
    alphas = []
    used = 0.0
    for g in groups:
        a = np.zeros(len(g.costs))
        if g.weight > 0:
            g.hull = upper_hull(g.costs, g.quality)
        else:
            # weightless categories cost nothing either way; plan them conservatively
            g.hull = [min(range(len(g.costs)), key=lambda k: (g.costs[k], -g.quality[k], k))]
        a[g.hull[0]] = 1.0
        alphas.append(a)
        used += g.weight * g.costs[g.hull[0]]
    if used > budget * (1 + BUDGET_TOL) + BUDGET_TOL:
        raise InfeasiblePlanError(used - budget)

    # (ratio, group, step): step j upgrades hull[j] -> hull[j+1]
    upgrades = []
    for gi, g in enumerate(groups):
        if g.weight <= 0:
            continue
        for j in range(len(g.hull) - 1):
            lo, hi = g.hull[j], g.hull[j + 1]
            ratio = (g.quality[hi] - g.quality[lo]) / (g.costs[hi] - g.costs[lo])
            upgrades.append((ratio, gi, j))
    upgrades.sort(key=lambda u: (-u[0], u[1], groups[u[1]].hull[u[2] + 1]))

    remaining = budget - used
    i = 0
    while i < len(upgrades) and remaining > 0:
        # exact-ratio ties are bought together so symmetric inputs get symmetric plans
        j = i
        while j < len(upgrades) and upgrades[j][0] == upgrades[i][0]:
            j += 1
        batch = upgrades[i:j]
        dcosts = [
            groups[gi].weight * (groups[gi].costs[groups[gi].hull[s + 1]] - groups[gi].costs[groups[gi].hull[s]])
            for _, gi, s in batch
        ]
        total = sum(dcosts)
        frac = 1.0 if total <= remaining else remaining / total
        for (_, gi, s), dc in zip(batch, dcosts):
            lo, hi = groups[gi].hull[s], groups[gi].hull[s + 1]
            a = alphas[gi]
            if frac >= 1.0:
                a[lo], a[hi] = 0.0, 1.0
            else:
                a[lo], a[hi] = 1.0 - frac, frac
        remaining -= total * frac
        if frac < 1.0:
            break
        i = j
    spent = sum(float(np.dot(a, g.costs)) * g.weight for a, g in zip(alphas, groups))
    value = sum(float(np.dot(a, g.quality)) * g.weight for a, g in zip(alphas, groups))
    return alphas, spent, value


def solve_knob_plan(r, centers, costs, budget: float, interval: tuple[float, float] = (0.0, 0.0)) -> KnobPlan:
    """LP-optimal plan for forecast ``r``.

    ``centers`` is a :class:`ContentCategorySet` or a (categories x configs)
    quality array; ``costs`` are per-config costs already scaled to the planned
    interval (cost per segment times expected segments).
    """
    q = np.asarray(getattr(centers, "centers", centers), dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    costs = np.asarray(costs, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != len(r) or q.shape[1] != len(costs):
        raise ConfigError("forecast, centers and costs disagree in shape")
    if np.any(costs <= 0):
        raise ConfigError("configuration costs must be > 0")
    if np.any(r < 0) or abs(r.sum() - 1.0) > 1e-6:
        raise ConfigError("forecast must be a histogram")
    groups = [_Group(float(r[c]), costs, q[c]) for c in range(len(r))]
    alphas, spent, value = _solve_groups(groups, float(budget))
    return KnobPlan(np.array(alphas), spent, value, interval)


def solve_multi_stream_plan(forecasts, centers_list, costs_list, budget: float) -> list[KnobPlan]:
    """Joint plan for several streams sharing one budget; returns one plan per stream."""
    if not forecasts:
        raise ConfigError("need at least one stream")
    groups, owner = [], []
    for v, (r, centers, costs) in enumerate(zip(forecasts, centers_list, costs_list)):
        q = np.asarray(getattr(centers, "centers", centers), dtype=np.float64)
        r = np.asarray(r, dtype=np.float64)
        costs = np.asarray(costs, dtype=np.float64)
        if q.shape != (len(r), len(costs)):
            raise ConfigError(f"stream {v}: forecast, centers and costs disagree in shape")
        if np.any(costs <= 0):
            raise ConfigError(f"stream {v}: configuration costs must be > 0")
        for c in range(len(r)):
            groups.append(_Group(float(r[c]), costs, q[c]))
            owner.append(v)
    alphas, _, _ = _solve_groups(groups, float(budget))
    plans = []
    for v in range(len(forecasts)):
        idx = [i for i, o in enumerate(owner) if o == v]
        a = np.array([alphas[i] for i in idx])
        spent = sum(groups[i].weight * float(np.dot(alphas[i], groups[i].costs)) for i in idx)
        value = sum(groups[i].weight * float(np.dot(alphas[i], groups[i].quality)) for i in idx)
        plans.append(KnobPlan(a, spent, value))
    return plans


def plan_objective(plan: KnobPlan, r, centers) -> float:
    q = np.asarray(getattr(centers, "centers", centers), dtype=np.float64)
    return float(np.sum(plan.alpha * np.asarray(r)[:, None] * q))


def write_plan(plan: KnobPlan, path: str | Path, config_ids: Sequence[str] | None = None) -> None:
    with open(path, "w") as fh:
        for row in plan.to_rows(config_ids):
            fh.write(json.dumps(row, sort_keys=True) + "\n")
