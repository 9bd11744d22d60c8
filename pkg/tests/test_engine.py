from dataclasses import replace

import numpy as np
import pytest
from oracles import buffer_peak, exhaustive_assignment_quality

from vetl.core import ProvisioningError, ResourceProvision
from vetl.engine import (
    RunOptions,
    occupancy_at_arrivals,
    optimum_assignment,
    optimum_quality,
    run_ablation,
    run_ingestion,
    run_optimum_baseline,
    run_static_baseline,
    run_streams,
    static_finish_times,
    write_report,
)
from vetl.workload import generate_trace, quality_matrix


def test_static_finish_times_match_sequential_replay():
    rng = np.random.default_rng(0)
    arrivals = np.cumsum(rng.uniform(0.5, 3.0, size=200))
    runtime = 1.7
    expected, t = [], 0.0
    for a in arrivals:
        t = max(t, a) + runtime
        expected.append(t)
    assert np.allclose(static_finish_times(arrivals, runtime), expected)
    occ = occupancy_at_arrivals(arrivals, expected)
    assert occ.max() == buffer_peak(arrivals, expected)


def test_one_segment_trace(fitted, horizon, provision, workload):
    trace = generate_trace(workload, 2.0, seed=1)
    rep = run_ingestion(trace, fitted, provision, horizon, RunOptions(normalize=False))
    assert rep.summary["decisions"] == 1
    k = rep.streams[0].config[0]
    expected = quality_matrix(workload, trace.categories, trace.noise_seeds, [fitted.config_indices[k]])[0, 0]
    assert rep.summary["quality_total"] == pytest.approx(expected)


def test_unlimited_budget_matches_best_static(fitted, horizon, provision, workload):
    trace = generate_trace(workload, 3600.0, seed=2)
    roomy = replace(provision, onprem_cores=64, buffer_bytes=1e12)
    rep = run_ingestion(trace, fitted, roomy, horizon, RunOptions(unlimited_budget=True, normalize=False))
    best = int(np.argmax(fitted.centers.centers.max(axis=0)))
    top = int(np.argmax(fitted.costs))
    assert best == top
    assert np.all(rep.streams[0].config == top)
    static = run_static_baseline(trace, fitted, top, roomy)
    assert rep.summary["quality_total"] == pytest.approx(static.summary["quality_total"])


def test_none_never_beats_both(fitted, horizon, provision, workload):
    for seed in range(3):
        trace = generate_trace(workload, 4 * 3600.0, seed=50 + seed)
        none = run_ablation(trace, fitted, provision, "none", horizon, RunOptions(normalize=False))
        both = run_ablation(trace, fitted, provision, "both", horizon, RunOptions(normalize=False))
        assert none.summary["quality_total"] <= both.summary["quality_total"]


def test_ablation_modes_respect_their_limits(fitted, horizon, provision, workload):
    trace = generate_trace(workload, 2 * 3600.0, seed=3)
    buffer_only = run_ablation(trace, fitted, provision, "buffer_only", horizon)
    assert buffer_only.summary["cloud_credits"] == 0 and np.all(buffer_only.streams[0].placement == 0)
    cloud_only = run_ablation(trace, fitted, provision, "cloud_only", horizon)
    st = cloud_only.streams[0]
    assert buffer_peak(st.arrivals, st.finish) <= 1
    none = run_ablation(trace, fitted, provision, "none", horizon)
    assert len(set(none.streams[0].config.tolist())) == 1


def test_run_is_deterministic(fitted, horizon, provision, workload, tmp_path):
    trace = generate_trace(workload, 3 * 3600.0, seed=4)
    for name in ("a", "b"):
        write_report(run_ingestion(trace, fitted, provision, horizon), tmp_path / name, "run")
    for f in ("run_summary.txt", "run_timeline.csv", "run_decisions.jsonl"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_multi_stream_shares_buffer_and_credits(fitted, horizon, provision, workload):
    traces = [generate_trace(workload, 2 * 3600.0, seed=s) for s in (5, 6)]
    prov = replace(provision, buffer_bytes=40e6)
    rep = run_streams(traces, fitted, prov, horizon, RunOptions(normalize=False))
    arrivals = np.concatenate([s.arrivals for s in rep.streams])
    finish = np.concatenate([s.finish for s in rep.streams])
    assert buffer_peak(arrivals, finish) * traces[0].segment_bytes <= prov.buffer_bytes
    assert rep.summary["cloud_credits"] <= prov.cloud_budget_credits * rep.summary["plans"] + 1e-9
    assert rep.summary["streams"] == 2


def test_under_provisioned_cores_are_rejected(fitted, horizon, provision, workload):
    trace = generate_trace(workload, 600.0, seed=7)
    with pytest.raises(ProvisioningError):
        run_streams([trace] * 8, fitted, provision, horizon)


def test_static_baseline_feasibility(fitted, provision, workload):
    trace = generate_trace(workload, 3600.0, seed=8)
    cheap = run_static_baseline(trace, fitted, 0, provision)
    assert not cheap.summary["infeasible"]
    q = quality_matrix(workload, trace.categories, trace.noise_seeds, [fitted.config_indices[0]])[:, 0]
    assert cheap.summary["quality_total"] == pytest.approx(q.sum())
    tight = replace(provision, onprem_cores=1, buffer_bytes=5e6)
    top = len(fitted.config_indices) - 1
    assert run_static_baseline(trace, fitted, top, tight).summary["infeasible"]


def test_optimum_extremes():
    q = np.array([[0.1, 0.5, 0.9], [0.2, 0.3, 0.4], [0.0, 0.9, 1.0]])
    costs = np.array([1.0, 2.0, 4.0])
    assert optimum_assignment(q, costs, 12.0).tolist() == [2, 2, 2]
    assert optimum_assignment(q, costs, 3.0).tolist() == [0, 0, 0]


def test_optimum_near_exhaustive():
    rng = np.random.default_rng(9)
    for _ in range(20):
        q = np.sort(rng.uniform(size=(10, 2)), axis=1)
        costs = np.array([1.0, rng.uniform(1.5, 4.0)])
        budget = float(rng.uniform(10.0, 10 * costs[1]))
        exact = exhaustive_assignment_quality(q, costs, budget)
        ours = optimum_quality(q, costs, budget)
        choice = optimum_assignment(q, costs, budget)
        assert costs[choice].sum() <= budget + 1e-9
        assert exact * 0.95 <= ours <= exact + 1e-12


def test_optimum_baseline_default_budget(fitted, provision, workload):
    trace = generate_trace(workload, 3600.0, seed=10)
    rep = run_optimum_baseline(trace, fitted, provision)
    assert rep.summary["work_core_s"] <= rep.summary["budget_core_s"] + 1e-9


def test_diurnal_day_shape(fitted, horizon, workload):
    # one core: core-seconds of planned work equal seconds of wall time
    prov = ResourceProvision(1, 400e6, 300.0, 10e6, 10e6)
    trace = generate_trace(workload, 86400.0, seed=11)
    rep = run_ingestion(trace, fitted, prov, horizon, RunOptions(timeline_bin_s=3600.0))
    buf = np.array([row["buffer_bytes"] for row in rep.timeline]) / prov.buffer_bytes
    spent = np.array([row["credits_fraction"] for row in rep.timeline])
    assert buf[10:16].mean() > 2 * buf[0:4].mean()
    assert buf[20:24].mean() < 0.5 * buf[10:16].mean()
    first_spend = int(np.flatnonzero(spent > 0)[0])
    assert buf[: first_spend + 1].max() >= 0.8
    assert rep.summary["eq1_violations"] == 0
