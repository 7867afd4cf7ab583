import math

import numpy as np
import pytest

from bosonloss.fock import (
    classify_input,
    count_subconfigurations,
    multinomial,
    multinomial_log,
    occupation_vectors,
    subconfigurations,
    to_assignment,
    to_occupation,
    validate_occupation,
)


def test_assignment_roundtrip():
    T = (2, 0, 1, 0)
    assert to_assignment(T) == (1, 1, 3)
    assert to_occupation((1, 1, 3), 4) == T
    assert to_occupation((3, 1, 1), 4) == T  # order-insensitive


def test_validate_occupation_rejects_negative():
    with pytest.raises(ValueError):
        validate_occupation((1, -1))
    with pytest.raises(ValueError):
        to_occupation((0,), 2)


def test_occupation_vectors_count_and_order():
    vecs = list(occupation_vectors(3, 3))
    assert len(vecs) == math.comb(3 + 3 - 1, 3)
    assert vecs == sorted(vecs, reverse=True)
    assert all(sum(v) == 3 for v in vecs)


def test_subconfiguration_weights_normalize():
    for S in [(2, 1), (3, 1, 0), (2, 2), (1, 1, 1, 1)]:
        n = sum(S)
        for l in range(1, n + 1):
            subs = subconfigurations(S, l)
            assert sum(sub.weight for sub in subs) == pytest.approx(1.0)
            for sub in subs:
                assert sum(sub.removed) == n - l
                assert sum(sub.remaining) == l
                assert all(k <= s for k, s in zip(sub.removed, S))


def test_subconfiguration_weights_are_hypergeometric():
    # removing one photon from (2, 2): each mode in proportion to its count
    subs = subconfigurations((2, 2), 3)
    weights = {sub.removed: sub.weight for sub in subs}
    assert weights[(1, 0)] == pytest.approx(0.5)
    assert weights[(0, 1)] == pytest.approx(0.5)
    # removing two from (2, 2): (1,1) removal dominates 4:1:1
    subs = subconfigurations((2, 2), 2)
    weights = {sub.removed: sub.weight for sub in subs}
    assert weights[(1, 1)] == pytest.approx(4 / 6)
    assert weights[(2, 0)] == pytest.approx(1 / 6)


def test_count_subconfigurations_identity():
    rng = np.random.default_rng(3)
    for _ in range(30):
        m = int(rng.integers(1, 6))
        S = tuple(int(x) for x in rng.integers(0, 5, size=m))
        if sum(S) == 0:
            continue
        counts = count_subconfigurations(S)
        assert len(counts) == sum(S)
        assert sum(counts) == math.prod(s + 1 for s in S) - 1
        assert counts == [len(subconfigurations(S, l)) for l in range(1, sum(S) + 1)]


def test_multinomial_against_log():
    assert multinomial(4, (2, 1, 1)) == 12
    assert multinomial(10, (5, 5)) == math.comb(10, 5)
    got = multinomial_log(60, (20, 20, 20))
    assert got == pytest.approx(math.log(multinomial(60, (20, 20, 20))))
    with pytest.raises(ValueError):
        multinomial(3, (1, 1))


def test_classify_input_labels():
    # two bins: class A
    info = classify_input((3, 3, 0, 0), c=1.0)
    assert info.label == "A"
    assert info.k == 2
    n = 6
    assert info.predicted_runtime == pytest.approx(2 * 4 * n * (n + 1) ** 4)
    # one big bin plus several singles (too many bins for class A): class B
    info = classify_input((6,) + (1,) * 4 + (0,) * 5, c=4.0)
    assert info.label == "B"
    # all singles, too many for class A bins: general
    info = classify_input((1,) * 8 + (0,) * 2, c=0.5)
    assert info.label == "general"
    assert info.chain_bound == 8 * 10 * 4**8 * 8
