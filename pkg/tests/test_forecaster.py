import numpy as np
import pytest

from vetl.core import ConfigError
from vetl.forecaster import (
    ForecastModel,
    TrainingError,
    fine_tune,
    gradient_check,
    init_model,
    mae,
    predict,
    train,
)


def test_predict_is_a_histogram():
    net = init_model(24, 3, seed=1)
    p = predict(net, np.random.default_rng(0).dirichlet(np.ones(3), size=8))
    assert p.shape == (3,) and p.sum() == pytest.approx(1.0) and np.all(p >= 0)
    with pytest.raises(ConfigError):
        predict(net, np.zeros(5))


def test_zero_weights_give_uniform():
    net = init_model(6, 4, seed=0)
    for w, b in zip(net.weights, net.biases):
        w[:] = 0
        b[:] = 0
    assert np.allclose(predict(net, np.ones(6)), 0.25)


def test_local_lipschitz_probe():
    net = init_model(12, 3, seed=2)
    x = np.random.default_rng(1).dirichlet(np.ones(3), size=4).ravel()
    eps = 1e-6
    base = predict(net, x)
    slopes = []
    for j in range(len(x)):
        bumped = x.copy()
        bumped[j] += eps
        slopes.append(np.abs(predict(net, bumped) - base).max() / eps)
    lip = max(slopes) * 1.01 + 1e-9
    y = x.copy()
    y[3] += 1e-4
    assert np.abs(predict(net, y) - base).max() <= lip * 1e-4 * 1.05


def test_gradient_checks():
    rng = np.random.default_rng(3)
    net = init_model(8, 3, seed=0)
    assert gradient_check(net, (rng.uniform(size=8), rng.dirichlet(np.ones(3)))) <= 1e-4
    toy = init_model(1, 1, seed=0, hidden=(1,))
    assert gradient_check(toy, (np.array([0.7]), np.array([1.0]))) <= 1e-6
    saturated = init_model(4, 3, seed=0)
    saturated.biases[-1][:] = [30.0, -30.0, 0.0]
    assert gradient_check(saturated, (np.ones(4), np.array([0.0, 1.0, 0.0]))) <= 1e-3


def test_constant_one_hot_target_is_learned():
    rng = np.random.default_rng(4)
    x = rng.dirichlet(np.ones(3), size=(200, 4)).reshape(200, -1)
    y = np.tile([0.0, 1.0, 0.0], (200, 1))
    net, hist = train(init_model(12, 3, seed=0), list(zip(x, y)), epochs=40, learning_rate=0.05)
    assert min(hist.val_mae) < 0.01 and mae(net, x, y) < 0.01


def test_shuffled_labels_are_no_better_than_uniform():
    rng = np.random.default_rng(5)
    n = 600
    x = rng.dirichlet(np.ones(3), size=(n, 4)).reshape(n, -1)
    y = rng.dirichlet(np.ones(3), size=n)
    net, _ = train(init_model(12, 3, seed=0), list(zip(x, y)), epochs=20, learning_rate=0.01)
    uniform = np.abs(y - y.mean(axis=0)).mean()
    assert mae(net, x, y) == pytest.approx(uniform, rel=0.2)


def test_train_is_deterministic_and_does_not_mutate():
    rng = np.random.default_rng(6)
    data = list(zip(rng.dirichlet(np.ones(2), size=(50, 3)).reshape(50, -1), rng.dirichlet(np.ones(2), size=50)))
    start = init_model(6, 2, seed=0)
    before = start.to_bytes()
    a, _ = train(start, data, epochs=3, seed=9)
    b, _ = train(start, data, epochs=3, seed=9)
    assert start.to_bytes() == before
    assert a.to_bytes() == b.to_bytes()


def test_training_errors():
    with pytest.raises(TrainingError):
        train(init_model(2, 2), [])
    with pytest.raises(TrainingError):
        train(init_model(2, 2), [(np.ones(2), np.array([1.0, 0.0]))] * 3)


def test_fine_tune_behaviour():
    net = init_model(6, 2, seed=0)
    assert fine_tune(net, []) is net
    rng = np.random.default_rng(7)
    x = rng.dirichlet(np.ones(2), size=(300, 3)).reshape(300, -1)
    shifted = np.tile([0.9, 0.1], (300, 1))
    data = list(zip(x, shifted))
    pre = mae(net, x, shifted)
    a = fine_tune(net, data, epochs=3, seed=1, learning_rate=0.05)
    b = fine_tune(net, data, epochs=3, seed=1, learning_rate=0.05)
    assert mae(a, x, shifted) < pre
    assert a.to_bytes() == b.to_bytes()


def test_serialization_round_trip():
    net = init_model(10, 3, seed=4)
    back = ForecastModel.from_dict(net.to_dict())
    assert back.to_bytes() == net.to_bytes() and back.layer_sizes == net.layer_sizes
