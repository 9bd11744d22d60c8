"""Runtime and cost estimates for cloud/on-prem placements of a task graph."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .core import ConfigError, Location, Placement, TaskGraph

MAX_ENUMERATION_NODES = 20


@dataclass
class SimClock:
    t_max_core: list[float]
    t_max_cloud: float = 0.0
    uplink_free_at: float = 0.0
    downlink_free_at: float = 0.0
    finish: dict[int, float] = field(default_factory=dict)

    @property
    def t_max(self) -> float:
        return max([self.t_max_cloud, *self.t_max_core])


def schedule(
    graph: TaskGraph,
    placement: Placement,
    cores: int,
    uplink_Bps: float,
    downlink_Bps: float,
) -> SimClock:
    """Run the list scheduler and return the final clock (per-node finish times included).

    Tasks are taken in order of the time their dependencies resolve (ties by node
    id). On-prem tasks go to the core that frees up first. A cloud task uploads
    its input once both the task is ready and the uplink is free, waits
    ``cloud_roundtrip_s``, then downloads its output once the downlink is free.
    Links are held exclusively and reserved in dispatch order.
    """
    n = len(graph)
    if len(placement.labels) != n:
        raise ConfigError(f"placement labels {len(placement.labels)} nodes, graph has {n}")
    if cores < 1:
        raise ConfigError("need at least one core")
    preds = graph.predecessors()
    succs: list[list[int]] = [[] for _ in range(n)]
    for a, b in graph.edges:
        succs[a].append(b)
    missing = [len(p) for p in preds]
    ready_at = [0.0] * n
    clock = SimClock([0.0] * cores)
    frontier = [(0.0, i) for i in range(n) if missing[i] == 0]
    heapq.heapify(frontier)
    core_heap = [(0.0, c) for c in range(cores)]
    done = 0
    while frontier:
        ready, i = heapq.heappop(frontier)
        node = graph.nodes[i]
        if placement.labels[i] == Location.ONPREM:
            free_at, c = heapq.heappop(core_heap)
            end = max(free_at, ready) + node.onprem_runtime_s
            heapq.heappush(core_heap, (end, c))
            clock.t_max_core[c] = end
        else:
            dispatch = max(ready, clock.uplink_free_at)
            uploaded = dispatch + node.input_bytes / uplink_Bps
            clock.uplink_free_at = uploaded
            dl_start = max(uploaded + node.cloud_roundtrip_s, clock.downlink_free_at)
            end = dl_start + node.output_bytes / downlink_Bps
            clock.downlink_free_at = end
            clock.t_max_cloud = max(clock.t_max_cloud, end)
        clock.finish[i] = end
        done += 1
        for j in succs[i]:
            missing[j] -= 1
            ready_at[j] = max(ready_at[j], end)
            if missing[j] == 0:
                heapq.heappush(frontier, (ready_at[j], j))
    if done != n:
        raise ConfigError("task graph has a cycle")
    return clock


def estimate_runtime(
    graph: TaskGraph,
    placement: Placement,
    cores: int,
    uplink_Bps: float,
    downlink_Bps: float,
) -> float:
    """Estimated completion time of one run of ``graph`` under ``placement``."""
    if len(graph) == 0:
        return 0.0
    return schedule(graph, placement, cores, uplink_Bps, downlink_Bps).t_max


def cloud_cost(
    graph: TaskGraph,
    placement: Placement,
    price_per_invocation: float,
    egress_price_per_byte: float = 0.0,
) -> float:
    """Credits for one run: invocations times price, plus per-byte transfer price."""
    total = 0.0
    for node, label in zip(graph.nodes, placement.labels):
        if label == Location.CLOUD:
            total += price_per_invocation + egress_price_per_byte * (node.input_bytes + node.output_bytes)
    return total


def critical_path(graph: TaskGraph, placement: Placement, uplink_Bps: float, downlink_Bps: float) -> float:
    """Longest dependency chain using each node's stand-alone duration under its label."""
    preds = graph.predecessors()
    finish: dict[int, float] = {}
    for i in graph.topological_order():
        node = graph.nodes[i]
        if placement.labels[i] == Location.ONPREM:
            dur = node.onprem_runtime_s
        else:
            dur = node.input_bytes / uplink_Bps + node.cloud_roundtrip_s + node.output_bytes / downlink_Bps
        finish[i] = max((finish[p] for p in preds[i]), default=0.0) + dur
    return max(finish.values(), default=0.0)


def evaluate_placement(
    graph: TaskGraph,
    mask: int,
    cores: int,
    uplink_Bps: float,
    downlink_Bps: float,
    price: float,
    egress_price_per_byte: float = 0.0,
) -> Placement:
    p = Placement.from_bitmask(mask, len(graph))
    return replace(
        p,
        estimated_runtime_s=estimate_runtime(graph, p, cores, uplink_Bps, downlink_Bps),
        cloud_cost_credits=cloud_cost(graph, p, price, egress_price_per_byte),
    )


def pareto_front(placements: Iterable[Placement]) -> list[Placement]:
    """Non-dominated (cost, runtime) points; exact duplicates keep the lowest bitmask."""
    ordered = sorted(placements, key=lambda p: (p.cloud_cost_credits, p.estimated_runtime_s, p.bitmask))
    front: list[Placement] = []
    best_runtime = float("inf")
    for p in ordered:
        if p.estimated_runtime_s < best_runtime:
            front.append(p)
            best_runtime = p.estimated_runtime_s
    return front


def enumerate_pareto_placements(
    graph: TaskGraph,
    cores: int,
    uplink_Bps: float,
    downlink_Bps: float,
    price: float,
    egress_price_per_byte: float = 0.0,
) -> list[Placement]:
    """All cost/runtime-optimal labelings by exhaustive search, sorted by ascending cost."""
    n = len(graph)
    if n > MAX_ENUMERATION_NODES:
        raise ConfigError(f"graph has {n} nodes; exhaustive enumeration is limited to {MAX_ENUMERATION_NODES}")
    every = (
        evaluate_placement(graph, mask, cores, uplink_Bps, downlink_Bps, price, egress_price_per_byte)
        for mask in range(1 << n)
    )
    return pareto_front(every)


def write_placements(placements: Iterable[Placement], path: str | Path) -> None:
    with open(path, "w") as fh:
        for p in placements:
            fh.write(
                json.dumps(
                    {"bitmask": p.bitmask, "runtime_s": p.estimated_runtime_s, "cost_credits": p.cloud_cost_credits},
                    sort_keys=True,
                )
                + "\n"
            )
