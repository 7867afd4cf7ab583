import math

import numpy as np
import pytest

from bosonloss.lossy import (
    KBudgetError,
    UnbalancedPipeline,
    apply_loss_distribution,
    default_strategy,
    loss_vector,
    partial_loss_vector,
    sample_survivors,
    simulate_unbalanced,
    tv_bound,
    tv_bound_network,
)
from bosonloss.network import build_reck
from bosonloss.oracle import DeskLimits


def test_loss_vector_scalar_and_sequence():
    assert loss_vector(0.5, 3) == (0.5, 0.5, 0.5)
    assert loss_vector([0.1, 1.0], 2) == (0.1, 1.0)
    with pytest.raises(ValueError):
        loss_vector([0.5], 2)
    with pytest.raises(ValueError):
        loss_vector(1.5, 2)


def test_partial_loss_vector():
    assert partial_loss_vector(4, 2, 0.3) == (1.0, 1.0, 0.3, 0.3)


def test_uniform_loss_survivors_are_binomial():
    eta = 0.7
    for S in [(3,), (2, 1), (1, 1, 1, 1)]:
        n = sum(S)
        dist = apply_loss_distribution(S, eta)
        assert sum(dist.values()) == pytest.approx(1.0)
        by_count: dict = {}
        for occ, p in dist.items():
            by_count[sum(occ)] = by_count.get(sum(occ), 0.0) + p
        for l in range(n + 1):
            expected = math.comb(n, l) * eta**l * (1 - eta) ** (n - l)
            assert by_count.get(l, 0.0) == pytest.approx(expected)


def test_sequential_loss_composition():
    S = (2, 1)
    once = apply_loss_distribution(S, [0.9 * 0.6, 0.8 * 0.5])
    stage1 = apply_loss_distribution(S, [0.9, 0.8])
    twice: dict = {}
    for mid, p in stage1.items():
        for out, q in apply_loss_distribution(mid, [0.6, 0.5]).items():
            twice[out] = twice.get(out, 0.0) + p * q
    for key in set(once) | set(twice):
        assert once.get(key, 0.0) == pytest.approx(twice.get(key, 0.0))


def test_sample_survivors_within_bounds():
    rng = np.random.default_rng(0)
    for _ in range(50):
        surv = sample_survivors((3, 0, 2), 0.5, rng)
        assert all(0 <= k <= s for k, s in zip(surv, (3, 0, 2)))


def test_tv_bound_closed_form():
    b = tv_bound(100, 0, 0.05)
    assert b.value == pytest.approx(0.14875, abs=1e-12)
    assert b.leading == pytest.approx(0.05**2 * 100 / 2)
    assert b.tail == pytest.approx(0.05 * 0.95 / 2)
    with pytest.raises(ValueError):
        tv_bound(3, 4, 0.5)


def test_tv_bound_network_threshold():
    eta = 0.5
    threshold = 1.0 / (2.0 * math.log(1.0 / eta))
    above = [tv_bound_network(n, 0, eta, threshold * 1.5).value
             for n in (8, 16, 32, 64, 128)]
    assert all(a > b for a, b in zip(above, above[1:]))
    below = [tv_bound_network(n, 0, eta, threshold * 0.5).value
             for n in (8, 16, 32, 64, 128)]
    assert all(a < b for a, b in zip(below, below[1:]))
    bound = tv_bound_network(16, 0, eta, 1.0)
    assert bound.effective_eta == pytest.approx(16.0 ** (-math.log(2.0)))
    assert bound.c_threshold == pytest.approx(threshold)
    assert bound.vanishing


def test_pipeline_k_budget():
    net = build_reck(6, 0.8, seed=1)
    with pytest.raises(KBudgetError):
        UnbalancedPipeline(net, (1, 1, 1, 1, 0, 0), c=50.0, kappa=0.1)


def test_pipeline_sample_and_certificate():
    net = build_reck(6, 0.8, seed=2)
    S = (1, 1, 1, 1, 0, 0)
    rng = np.random.default_rng(3)
    limits = DeskLimits(max_photons=6, max_modes=16, max_total_modes=40)
    outcome, cert = simulate_unbalanced(
        net, S, default_strategy(), c=2.5, rng=rng, limits=limits
    )
    assert sum(outcome.outcome) <= 4
    assert cert.n == 4
    assert cert.k >= 1
    assert cert.strategy == "default"
    assert cert.delta > 0.0
    assert 0.0 < cert.eta_eff < 1.0


def test_pipeline_deterministic():
    net = build_reck(5, 0.9, seed=4)
    S = (1, 1, 1, 0, 0)
    pipe = UnbalancedPipeline(net, S, c=1.0)
    outs1 = [pipe.sample(default_strategy(),
                         np.random.default_rng(np.random.SeedSequence(9, spawn_key=(i,))))
             for i in range(20)]
    outs2 = [pipe.sample(default_strategy(),
                         np.random.default_rng(np.random.SeedSequence(9, spawn_key=(i,))))
             for i in range(20)]
    assert [o.outcome for o in outs1] == [o.outcome for o in outs2]


def test_pipeline_rejects_collision_inputs_by_default():
    net = build_reck(4, 0.9, seed=5)
    with pytest.raises(ValueError):
        UnbalancedPipeline(net, (2, 1, 0, 0), c=1.0)
    UnbalancedPipeline(net, (2, 1, 0, 0), c=1.0, allow_any_input=True)
