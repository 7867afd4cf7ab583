"""Self-check batteries behind the ``validate`` CLI command.

Each suite runs a reduced version of the oracle-equivalence invariants and
returns one (name, passed) line per check.  These are smoke batteries for
scripting; the full acceptance settings live in the test suite.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import fock, lossy, network, oracle, sampler
from .complexmat import (
    build_submatrix,
    permanent_exact,
    permanent_naive,
    permanent_repeated,
    random_unitary,
)


def _rel_err(a, b):
    denom = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / denom


def _suite_permanents():
    checks = []
    rng = np.random.default_rng(7)
    ok = True
    for trial in range(40):
        m = int(rng.integers(2, 6))
        U = random_unitary(m, 100 + trial)
        n = int(rng.integers(1, 5))
        S = fock.to_occupation(tuple(rng.integers(1, m + 1, size=n)), m)
        T = fock.to_occupation(tuple(rng.integers(1, m + 1, size=n)), m)
        sub = build_submatrix(U, S, T=T)
        exact = permanent_exact(sub)
        ok &= _rel_err(permanent_repeated(U, S, T), exact) < 1e-9
        ok &= _rel_err(permanent_naive(sub), exact) < 1e-9
    checks.append(("repeated/ryser/naive agreement (40 seeded draws)", ok))
    H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    checks.append(
        ("Hong-Ou-Mandel suppression",
         abs(permanent_repeated(H, (1, 1), (1, 1))) < 1e-12)
    )
    return checks


def _suite_marginals():
    checks = []
    U = random_unitary(4, 11)
    S = (2, 1, 0, 0)
    norm = sum(sampler.marginal_pmf(U, S, (x,)) for x in range(1, 5))
    checks.append(("level-1 marginals normalize", abs(norm - 1.0) < 1e-10))
    ok = True
    for prefix in itertools.product(range(1, 5), repeat=2):
        total = sum(
            sampler.marginal_pmf(U, S, prefix + (x,)) for x in range(1, 5)
        )
        ok &= abs(total - sampler.marginal_pmf(U, S, prefix)) < 1e-10
    checks.append(("chain-rule consistency at l=2", ok))
    ok = True
    for S_small in [(2, 1), (2, 2), (3, 1)]:
        n = sum(S_small)
        for l in range(1, n + 1):
            ref = oracle.partial_trace_weights(S_small, l)
            for sub in fock.subconfigurations(S_small, l):
                ok &= abs(sub.weight - ref[sub.removed]) < 1e-10
    checks.append(("sub-configuration weights match partial trace", ok))
    return checks


def _random_network(m, n_elements, rng, mixed=False):
    elements = []
    for layer in range(1, n_elements + 1):
        i = int(rng.integers(1, m))
        theta = float(rng.random()) * math.pi / 2
        phi = float(rng.random()) * 2 * math.pi
        if mixed:
            eta = (0.7 + 0.3 * float(rng.random()), 0.7 + 0.3 * float(rng.random()))
        else:
            eta = (0.9, 0.9)
        elements.append(
            network.BeamSplitterElement(layer, (i, i + 1), theta, phi, eta)
        )
    return network.LossyNetwork(m, elements)


def _extraction_equivalent(net, S):
    ext = network.extract_losses_heterogeneous(net)
    original = oracle.dilated_lossy_distribution(net, S)
    approx = _front_then_residual(ext, S)
    return oracle.tv_distance(original, approx) < 1e-9


def _front_then_residual(ext, S):
    combined = {}
    for survivors, p in lossy.apply_loss_distribution(S, ext.front).items():
        if sum(survivors) == 0:
            combined[survivors] = combined.get(survivors, 0.0) + p
            continue
        for T, q in oracle.dilated_lossy_distribution(
            ext.residual, survivors
        ).items():
            combined[T] = combined.get(T, 0.0) + p * q
    return combined


def _suite_extraction():
    checks = []
    rng = np.random.default_rng(23)
    ok = True
    for trial in range(10):
        net = _random_network(3, 3, rng, mixed=(trial % 2 == 0))
        ok &= _extraction_equivalent(net, (1, 1, 0))
    checks.append(("channel equivalence on seeded m=3 networks", ok))
    net = network.build_reck(5, 0.9, seed=5)
    ext = network.extract_losses(net)
    checks.append(
        ("uniform Reck exponents equal shortest paths",
         ext.pulled_exponents == network.shortest_paths(net))
    )
    return checks


def _suite_sampler():
    checks = []
    U = random_unitary(4, 3)
    S = (2, 1, 0, 0)
    dist = oracle.exact_distribution(U, S)
    outcomes, report = sampler.sample_batch(U, S, shots=20000, seed=99)
    result = oracle.chi_square_test(
        [o.outcome for o in outcomes], dist, significance=1e-3
    )
    checks.append(("chi-square fit against exact distribution", result.passed))
    ok = all(
        abs(o.probability - dist[o.outcome]) < 1e-9 * max(dist[o.outcome], 1e-300)
        for o in outcomes[:100]
    )
    checks.append(("reported probabilities match the exact pmf", ok))
    _, raw = sampler.sample_batch(U, S, shots=5, seed=1, use_cache=False)
    checks.append(
        ("permanent evaluations within the counting bound",
         raw.permanent_evaluations <= 5 * raw.bound_per_sample)
    )
    return checks


def _suite_lossy():
    checks = []
    dist = lossy.apply_loss_distribution((2, 2), 0.6)
    by_count = {}
    for occ, p in dist.items():
        by_count[sum(occ)] = by_count.get(sum(occ), 0.0) + p
    ok = all(
        abs(by_count.get(l, 0.0) - math.comb(4, l) * 0.6**l * 0.4 ** (4 - l)) < 1e-12
        for l in range(5)
    )
    checks.append(("uniform-loss survivor counts are binomial", ok))
    spot = lossy.tv_bound(100, 0, 0.05)
    checks.append(("tv_bound spot value", abs(spot.value - 0.14875) < 1e-12))
    seq = [lossy.tv_bound_network(n, 0, 0.5, 1.0).value for n in (8, 16, 32, 64)]
    checks.append(
        ("network bound decreases above threshold",
         all(a > b for a, b in zip(seq, seq[1:])))
    )
    return checks


SUITES = {
    "permanents": _suite_permanents,
    "marginals": _suite_marginals,
    "extraction": _suite_extraction,
    "sampler": _suite_sampler,
    "lossy": _suite_lossy,
}


def run_suite(name: str):
    """Run one battery; returns (all_passed, [(check name, passed), ...])."""
    if name not in SUITES:
        raise KeyError(name)
    checks = SUITES[name]()
    return all(p for _, p in checks), checks
