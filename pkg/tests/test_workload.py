import numpy as np
import pytest

from vetl.core import ConfigError, Segment
from vetl.workload import (
    BUILTIN_MODELS,
    CategorySpec,
    KnobSpec,
    ScheduleSpec,
    SpikeSpec,
    WorkloadModel,
    covid_model,
    default_model,
    generate_trace,
    load_trace,
    load_workload,
    oracle_quality,
    save_trace,
    save_workload,
    spike_mask,
    standard_normal_hash,
    trace_qualities,
)


def one_category(sigma=0.0):
    return WorkloadModel(
        model_id="solo",
        knob_specs=(KnobSpec("fps", (1, 2), work=(1.0, 2.0)),),
        categories=(CategorySpec("only", (0.4, 0.7), sigma),),
        schedule=ScheduleSpec((1.0,), (1.0,), (30.0,)),
    )


def test_one_hour_is_1800_segments():
    assert len(generate_trace(default_model(), 3600.0, seed=0)) == 1800


def test_same_seed_same_file(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_trace(generate_trace(default_model(), 600.0, 3), a)
    save_trace(generate_trace(default_model(), 600.0, 3), b)
    assert a.read_bytes() == b.read_bytes()


def test_zero_duration_is_an_error():
    with pytest.raises(ConfigError):
        generate_trace(default_model(), 0.0, 0)


def test_single_category_model():
    t = generate_trace(one_category(), 3600.0, seed=9)
    assert set(t.categories.tolist()) == {0}


def test_different_seeds_differ():
    a = generate_trace(default_model(), 3600.0, 1)
    b = generate_trace(default_model(), 3600.0, 2)
    assert np.any(a.categories != b.categories)


def test_diurnal_daytime_is_busier():
    t = generate_trace(default_model(), 86400.0, 4)
    n = len(t)
    hour = np.arange(n) * t.segment_duration_s / 3600.0
    day = (hour >= 6) & (hour < 18)
    assert np.mean(t.categories[day] == 0) > np.mean(t.categories[~day] == 0) + 0.1


def test_noise_free_quality_is_the_mean():
    m = one_category(0.0)
    s = Segment(0, 2.0, 1000, 0, 12345)
    assert oracle_quality(m.configs[1], s, m) == 0.7
    assert oracle_quality(m.configs[1], s, m) == oracle_quality(m.configs[1], s, m)


def test_monte_carlo_mean_within_three_sigma():
    m = one_category(0.05)
    t = generate_trace(m, 2.0 * 10_000, seed=5)
    q = trace_qualities(m, t, [0])[:, 0]
    assert abs(q.mean() - 0.4) <= 3 * 0.05 / np.sqrt(len(q))


def test_hash_normal_moments():
    z = standard_normal_hash(np.arange(200_000, dtype=np.uint64), 3)
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01
    assert not np.array_equal(z[:100], standard_normal_hash(np.arange(100, dtype=np.uint64), 4))


def test_qualities_are_clamped():
    m = WorkloadModel(
        model_id="edge",
        knob_specs=(KnobSpec("fps", (1,), work=(1.0,)),),
        categories=(CategorySpec("hi", (1.0,), 0.5),),
        schedule=ScheduleSpec((1.0,), (1.0,), (30.0,)),
    )
    q = trace_qualities(m, generate_trace(m, 2000.0, 1))
    assert q.min() >= 0.0 and q.max() <= 1.0


def test_trace_round_trip(tmp_path):
    t = generate_trace(covid_model(), 1200.0, 8)
    save_trace(t, tmp_path / "t.jsonl")
    back = load_trace(tmp_path / "t.jsonl")
    assert back == t and back.seed == 8 and back.model_id == "covid"


def test_malformed_trace(tmp_path):
    p = tmp_path / "bad.jsonl"
    p.write_text('{"index": 1, "duration_s": 2, "size_bytes": 1, "true_category": 0, "noise_seed": 0}\n')
    with pytest.raises(ConfigError, match="contiguous"):
        load_trace(p)
    with pytest.raises(ConfigError):
        load_trace(tmp_path / "missing.jsonl")


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_workload_round_trip(tmp_path, name):
    m = BUILTIN_MODELS[name]()
    save_workload(m, tmp_path / "m.yaml")
    back = load_workload(tmp_path / "m.yaml")
    assert back.to_dict() == m.to_dict()
    assert load_workload(name).to_dict() == m.to_dict()


def test_covid_configuration_space():
    m = covid_model()
    assert m.n_configs == 40
    assert len({k.id for k in m.configs}) == 40


def test_costs_scale_with_work():
    m = default_model()
    assert np.allclose(m.costs / m.costs[0], [1, 2, 4, 8, 16])


def test_monotonicity_check_and_opt_out():
    cats = (CategorySpec("c", (0.9, 0.2), 0.01),)
    kw = dict(
        model_id="bad",
        knob_specs=(KnobSpec("fps", (1, 2), work=(1.0, 2.0)),),
        categories=cats,
        schedule=ScheduleSpec((1.0,), (1.0,), (30.0,)),
    )
    with pytest.raises(ConfigError, match="worse"):
        WorkloadModel(**kw)
    m = WorkloadModel(**kw, check_monotone=False)
    assert WorkloadModel.from_dict(m.to_dict()).check_monotone is False


def test_spike_mask_periodic():
    assert np.all(spike_mask(ScheduleSpec((1.0,), (1.0,), (1.0,)), 10, 2.0) == -1)
    sched = ScheduleSpec((1.0, 0.0), (1.0, 0.0), (1.0, 1.0), (SpikeSpec(2.0, 4.0, 1, period_s=10.0),))
    m = spike_mask(sched, 10, 2.0)
    assert m.tolist() == [-1, 1, 1, -1, -1, -1, 1, 1, -1, -1]
