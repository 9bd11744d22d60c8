"""Independent reference implementations used to cross-check the package."""

from __future__ import annotations

import heapq
import itertools

import numpy as np

# ---------------------------------------------------------------------------
# placement: event-list simulation


def event_list_runtime(graph, labels, cores: int, uplink: float, downlink: float) -> float:
    """Discrete-event replay: finish events resolve dependencies, ready events claim resources.

    At equal timestamps finish events go first; ready events go in node-id order.
    Cores are claimed earliest-free-first (lowest id on ties); each link serves
    transfers one at a time in the order tasks became ready.
    """
    n = len(graph.nodes)
    if n == 0:
        return 0.0
    indeg = [0] * n
    out = [[] for _ in range(n)]
    for a, b in graph.edges:
        indeg[b] += 1
        out[a].append(b)
    core_free = [0.0] * cores
    up_free = down_free = 0.0
    events = []  # (time, kind, node) with kind 0 = finish, 1 = ready
    for i in range(n):
        if indeg[i] == 0:
            events.append((0.0, 1, i))
    heapq.heapify(events)
    makespan = 0.0
    while events:
        t, kind, i = heapq.heappop(events)
        if kind == 0:
            makespan = max(makespan, t)
            for j in out[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    heapq.heappush(events, (t, 1, j))
            continue
        node = graph.nodes[i]
        if labels[i] == 0:
            c = min(range(cores), key=lambda c: (core_free[c], c))
            end = max(core_free[c], t) + node.onprem_runtime_s
            core_free[c] = end
        else:
            up_start = max(t, up_free)
            up_free = up_start + node.input_bytes / uplink
            down_start = max(up_free + node.cloud_roundtrip_s, down_free)
            down_free = down_start + node.output_bytes / downlink
            end = down_free
        heapq.heappush(events, (end, 0, i))
    return makespan


# ---------------------------------------------------------------------------
# buffer: event replay


def buffer_peak(arrivals, finishes) -> int:
    """Maximum number of segments held, replaying arrivals and completions in time order.

    A completion at the same instant as an arrival is applied first.
    """
    events = sorted([(float(t), 0) for t in finishes] + [(float(t), 1) for t in arrivals])
    held = peak = 0
    for _, kind in events:
        held += 1 if kind == 1 else -1
        peak = max(peak, held)
    return peak


# ---------------------------------------------------------------------------
# LP: dense two-phase simplex with Bland's rule


def simplex_max(c, a_ub, b_ub, a_eq, b_eq, tol=1e-11):
    """maximize c.x  s.t.  a_ub x <= b_ub, a_eq x = b_eq, x >= 0 (all b >= 0). Returns (value, x)."""
    c = np.asarray(c, float)
    a_ub = np.atleast_2d(np.asarray(a_ub, float)) if len(a_ub) else np.zeros((0, len(c)))
    a_eq = np.atleast_2d(np.asarray(a_eq, float)) if len(a_eq) else np.zeros((0, len(c)))
    b_ub, b_eq = np.asarray(b_ub, float), np.asarray(b_eq, float)
    n = len(c)
    m_ub, m_eq = len(a_ub), len(a_eq)
    m = m_ub + m_eq
    # columns: x (n) | slacks (m_ub) | artificials (m_eq) | rhs
    width = n + m_ub + m_eq + 1
    t = np.zeros((m, width))
    t[:m_ub, :n] = a_ub
    t[:m_ub, n : n + m_ub] = np.eye(m_ub)
    t[:m_ub, -1] = b_ub
    t[m_ub:, :n] = a_eq
    t[m_ub:, n + m_ub : n + m_ub + m_eq] = np.eye(m_eq)
    t[m_ub:, -1] = b_eq
    basis = list(range(n, n + m))

    def pivot(r, col):
        t[r] /= t[r, col]
        for i in range(m):
            if i != r and abs(t[i, col]) > 0:
                t[i] -= t[i, col] * t[r]
        basis[r] = col

    def run(cost, allowed):
        # cost: objective to maximize over all columns (len width - 1)
        while True:
            cb = cost[basis]
            reduced = cost - cb @ t[:, :-1]
            enter = next((j for j in range(width - 1) if allowed[j] and reduced[j] > tol), None)
            if enter is None:
                return
            rows = [i for i in range(m) if t[i, enter] > tol]
            if not rows:
                raise ValueError("unbounded")
            ratios = [(t[i, -1] / t[i, enter], basis[i], i) for i in rows]
            best = min(r[0] for r in ratios)
            # Bland: among ties, leave the smallest basic variable index
            r = min((rr for rr in ratios if rr[0] <= best + tol), key=lambda rr: rr[1])[2]
            pivot(r, enter)

    allowed = np.ones(width - 1, dtype=bool)
    if m_eq:
        phase1 = np.zeros(width - 1)
        phase1[n + m_ub :] = -1.0
        run(phase1, allowed)
        if t[:, -1][[i for i in range(m) if basis[i] >= n + m_ub]].sum() > 1e-8:
            raise ValueError("infeasible")
        # drive remaining (zero-level) artificials out of the basis where possible
        for r in range(m):
            if basis[r] >= n + m_ub:
                col = next((j for j in range(n + m_ub) if abs(t[r, j]) > tol), None)
                if col is not None:
                    pivot(r, col)
        allowed[n + m_ub :] = False
    cost = np.zeros(width - 1)
    cost[:n] = c
    run(cost, allowed)
    x = np.zeros(width - 1)
    for i, b in enumerate(basis):
        x[b] = t[i, -1]
    return float(c @ x[:n]), x[:n]


def plan_lp_oracle(r, q, costs, budget):
    """Planner LP via the simplex above; variables alpha[c, k] flattened row-major."""
    n_c, n_k = q.shape
    obj = (np.asarray(r)[:, None] * q).ravel()
    a_ub = [(np.asarray(r)[:, None] * np.asarray(costs)[None, :]).ravel()]
    a_eq = []
    for c in range(n_c):
        row = np.zeros(n_c * n_k)
        row[c * n_k : (c + 1) * n_k] = 1.0
        a_eq.append(row)
    value, x = simplex_max(obj, a_ub, [budget], a_eq, np.ones(n_c))
    return value, x.reshape(n_c, n_k)


def plan_grid_oracle(r, q, costs, budget, step=1e-3):
    """Best plan over one-hot assignments plus every single-category two-config mix on an alpha grid.

    The LP has n_categories + 1 constraints, so some optimal vertex has at most one
    category split between two configurations; this search covers all such
    vertices up to the grid resolution.
    """
    r = np.asarray(r, float)
    q = np.asarray(q, float)
    costs = np.asarray(costs, float)
    n_c, n_k = q.shape
    combos = np.array(list(itertools.product(range(n_k), repeat=n_c)))  # (M, C)
    base_val = (r[None, :] * q[np.arange(n_c)[None, :], combos]).sum(axis=1)
    base_cost = (r[None, :] * costs[combos]).sum(axis=1)
    best = -np.inf
    ok = base_cost <= budget + 1e-12
    if ok.any():
        best = base_val[ok].max()
    grid = np.arange(0.0, 1.0 + step / 2, step)
    for c in range(n_c):
        for k2 in range(n_k):
            # category c mixes its combo config k1 with k2 at share a
            k1 = combos[:, c]
            dv = r[c] * (q[c, k2] - q[c, k1])
            dc = r[c] * (costs[k2] - costs[k1])
            vals = base_val[:, None] + grid[None, :] * dv[:, None]
            cost = base_cost[:, None] + grid[None, :] * dc[:, None]
            feas = cost <= budget + 1e-12
            if feas.any():
                best = max(best, vals[feas].max())
    return float(best)


# ---------------------------------------------------------------------------
# knapsack: exhaustive


def exhaustive_assignment_quality(q, costs, budget):
    """Best total quality over every per-segment configuration choice within the budget."""
    q = np.asarray(q, float)
    n, k = q.shape
    best = -np.inf
    for choice in itertools.product(range(k), repeat=n):
        if sum(costs[c] for c in choice) <= budget + 1e-9:
            best = max(best, sum(q[i, c] for i, c in enumerate(choice)))
    return best
