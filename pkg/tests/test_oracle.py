import math

import numpy as np
import pytest

from bosonloss.complexmat import random_unitary
from bosonloss.network import BeamSplitterElement, LossyNetwork, StandaloneLoss
from bosonloss.oracle import (
    ChiSquareResult,
    DeskLimitError,
    DeskLimits,
    chi_square_test,
    dilate_network,
    dilated_lossy_distribution,
    exact_distribution,
    partial_trace_weights,
    tv_distance,
)


def test_exact_distribution_normalizes():
    U = random_unitary(4, 1)
    for S in [(1, 1, 0, 0), (2, 1, 0, 0), (3, 0, 0, 0)]:
        dist = exact_distribution(U, S)
        probs = [p for _, p in dist.items()]
        assert min(probs) >= -1e-15
        assert sum(probs) == pytest.approx(1.0)
        assert all(sum(T) == sum(S) for T, _ in dist.items())


def test_exact_distribution_identity_matrix():
    dist = exact_distribution(np.eye(3), (2, 1, 0))
    assert dist[(2, 1, 0)] == pytest.approx(1.0)


def test_desk_limits_guard():
    U = random_unitary(4, 1)
    with pytest.raises(DeskLimitError):
        exact_distribution(U, (7, 0, 0, 0), limits=DeskLimits(max_photons=6))


def test_desk_limits_env_override(monkeypatch):
    monkeypatch.setenv("LOSSY_BOSON_DESK_LIMITS", '{"max_photons": 2}')
    limits = DeskLimits.from_env()
    assert limits.max_photons == 2
    assert limits.max_modes == 8


def test_dilate_network_builds_unitary_with_env_modes():
    el = BeamSplitterElement(1, (1, 2), 0.5, 0.3, (0.8, 1.0))
    net = LossyNetwork(2, [el], [StandaloneLoss(1, 2, 0.9)])
    U, total = dilate_network(net)
    assert total == 4  # 2 system + 1 arm loss + 1 standalone loss
    assert np.allclose(U @ U.conj().T, np.eye(total))


def test_dilated_distribution_single_loss_element_is_binomial():
    # bare loss on one mode: photon number decays as Binomial(n, eta)
    net = LossyNetwork(1, [], [StandaloneLoss(1, 1, 0.6)])
    dist = dilated_lossy_distribution(net, (3,))
    for k in range(4):
        expected = math.comb(3, k) * 0.6**k * 0.4 ** (3 - k)
        assert dist[(k,)] == pytest.approx(expected)


def test_dilated_distribution_lossless_matches_exact():
    el = BeamSplitterElement(1, (1, 2), 0.6, 1.2, (1.0, 1.0))
    net = LossyNetwork(2, [el])
    S = (1, 1)
    dist = dilated_lossy_distribution(net, S)
    U = el.block()
    exact = exact_distribution(U, S)
    assert tv_distance(dist, dict(exact.items())) < 1e-12


def test_partial_trace_weights_single_mode():
    weights = partial_trace_weights((3, 0), 2)
    assert weights == {(1, 0): pytest.approx(1.0)}


def test_partial_trace_weights_hypergeometric_case():
    # S = (2, 2), remove two photons: the mixed removal has weight 4/6
    weights = partial_trace_weights((2, 2), 2)
    assert weights[(1, 1)] == pytest.approx(4 / 6)
    assert weights[(2, 0)] == pytest.approx(1 / 6)
    assert weights[(0, 2)] == pytest.approx(1 / 6)


def test_tv_distance():
    p = {(0,): 0.5, (1,): 0.5}
    q = {(0,): 0.25, (1,): 0.5, (2,): 0.25}
    assert tv_distance(p, q) == pytest.approx(0.25)
    assert tv_distance(p, p) == 0.0


def test_chi_square_accepts_true_distribution():
    rng = np.random.default_rng(0)
    expected = {(0,): 0.25, (1,): 0.5, (2,): 0.25}
    keys = list(expected)
    draws = [keys[i] for i in rng.choice(3, size=5000, p=[0.25, 0.5, 0.25])]
    result = chi_square_test(draws, expected, significance=1e-3)
    assert isinstance(result, ChiSquareResult)
    assert result.passed


def test_chi_square_rejects_wrong_distribution():
    rng = np.random.default_rng(0)
    expected = {(0,): 0.25, (1,): 0.5, (2,): 0.25}
    keys = list(expected)
    draws = [keys[i] for i in rng.choice(3, size=5000, p=[0.5, 0.25, 0.25])]
    assert not chi_square_test(draws, expected, significance=1e-3).passed


def test_chi_square_guards_undersized_samples():
    expected = {(0,): 0.5, (1,): 0.5}
    with pytest.raises(ValueError):
        chi_square_test([(0,)] * 5, expected, significance=1e-3)
