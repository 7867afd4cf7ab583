"""Sequential chain-rule sampler for arbitrary (collision) Fock inputs.

Outcomes are built one photon at a time over the expanded sample space of
mode-assignment tuples r in [m]^n: at step l the m unnormalized marginal
weights p(r_1..r_{l-1}, x) are computed and x is drawn categorically.  The
marginals are mixtures over the l-photon sub-configurations of the input,
with one permanent per (sub-configuration, candidate) pair; permanent
evaluations are instrumented against the proof's counting bound
m * (prod(s_i + 1) - 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexmat import _glynn_tables, check_unitary, permanent_repeated
from .fock import subconfigurations, to_occupation, validate_occupation

# Relative tolerance below which a negative marginal weight is treated as
# roundoff and clamped to zero; anything worse is a hard error.
NEGATIVE_WEIGHT_TOL = 1e-12


class SamplingError(RuntimeError):
    """Numerical breakdown while drawing a sample."""


@dataclass(frozen=True)
class SampleOutcome:
    outcome: tuple  # occupation vector T
    probability: float  # exact p_U(S -> T)
    assignment: tuple  # the sampled tuple r (1-based, in draw order)
    permanent_evaluations: int


@dataclass(frozen=True)
class BatchReport:
    shots: int
    permanent_evaluations: int
    bound_per_sample: int  # m * (prod(s_i+1) - 1)
    chain_bound: int  # n * m * prod(s_j+1)^2 * alpha_S


def evaluation_bound(S, m: int) -> int:
    """Permanent evaluations needed per sample: m * (prod(s_i+1) - 1)."""
    return m * (math.prod(s + 1 for s in S) - 1)


def chain_runtime_bound(S, m: int) -> int:
    """The overall unit-cost runtime bound n m prod(s_j+1)^2 alpha_S."""
    n = sum(S)
    alpha = sum(1 for s in S if s > 0)
    return n * m * math.prod((s + 1) ** 2 for s in S) * alpha


def marginal_pmf(U, S, prefix) -> float:
    """Marginal probability p(r_1..r_l) of a leading subsequence.

    Mixture over sub-configurations K of S at l photons:
    sum_K w(K) / (l! prod (s_i - K_i)!) |Per(U_{S-K, prefix})|^2.
    Depends on the prefix only through its multiset of modes.  For l = n this
    is the full expanded-sample-space pmf.
    """
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    S = validate_occupation(S)
    if len(S) != m:
        raise ValueError("occupation length must equal matrix dimension")
    l = len(prefix)
    content = to_occupation(prefix, m)
    total = 0.0
    for sub in subconfigurations(S, l):
        per = permanent_repeated(U, sub.remaining, content)
        norm = math.factorial(l) * math.prod(
            math.factorial(s) for s in sub.remaining
        )
        total += sub.weight * abs(per) ** 2 / norm
    return total


def _candidate_marginals(U, S, content, l, subconfigs):
    """p(prefix + x) for every candidate x, sharing the v-sums across x.

    ``content`` is the occupation vector of the current prefix (length-(l-1)
    multiset); returns (weights array of length m, permanents evaluated).
    """
    m = U.shape[0]
    weights = np.zeros(m)
    rows_t = [k for k, t in enumerate(content) if t > 0]
    t_sub = np.array([content[k] for k in rows_t], dtype=np.int64)
    for sub in subconfigs:
        Sp = sub.remaining
        cols = [i for i, s in enumerate(Sp) if s > 0]
        s_sub = np.array([Sp[i] for i in cols], dtype=np.int64)
        V, coeff = _glynn_tables(Sp)
        A = (s_sub - 2 * V).astype(float)
        W = A @ U[:, cols].T  # (nv, m): row values for every output mode
        base = coeff
        if rows_t:
            base = coeff * np.prod(W[:, rows_t] ** t_sub, axis=1)
        pers = (base @ W) / 2**l  # Per(U_{S-K, prefix+x}) for all x at once
        norm = math.factorial(l) * math.prod(math.factorial(s) for s in Sp)
        weights += sub.weight / norm * np.abs(pers) ** 2
    return weights, m * len(subconfigs)


def _check_weights(weights: np.ndarray):
    scale = float(np.max(np.abs(weights))) if weights.size else 0.0
    if np.any(weights < -NEGATIVE_WEIGHT_TOL * max(scale, 1e-300)):
        raise SamplingError(f"negative marginal weight beyond tolerance: {weights}")


def _draw(weights: np.ndarray, rng) -> int:
    _check_weights(weights)
    w = np.clip(weights, 0.0, None)
    cum = np.cumsum(w)
    if cum[-1] <= 0.0:
        raise SamplingError("all marginal weights vanished")
    u = rng.random() * cum[-1]
    return int(np.searchsorted(cum, u, side="right"))


class MarginalCache:
    """Memo of marginal weight vectors keyed by prefix content.

    Marginals depend on the prefix only through its occupation vector, so
    shots drawn from the same (U, S) can share one cache; each entry holds
    the validated weights over candidate modes plus their cumulative sums,
    and evaluations are only counted when a permanent is actually computed.
    """

    def __init__(self):
        self.values: dict = {}  # content tuple -> (weights, cumsum)
        self.evaluations = 0


def sample(U, S, rng, cache: MarginalCache | None = None) -> SampleOutcome:
    """Draw one outcome from p_U(S -> T), reporting its exact probability."""
    U = check_unitary(np.asarray(U, dtype=complex))
    m = U.shape[0]
    S = validate_occupation(S)
    if len(S) != m:
        raise ValueError("occupation length must equal matrix dimension")
    n = sum(S)
    if n < 1:
        raise ValueError("need at least one photon")
    evaluations = 0
    prefix = []
    content = [0] * m
    last_weight = 0.0
    for l in range(1, n + 1):
        if cache is None:
            subconfigs = subconfigurations(S, l)
            weights, evs = _candidate_marginals(U, S, tuple(content), l, subconfigs)
            evaluations += evs
            x = _draw(weights, rng)
            last_weight = float(max(weights[x], 0.0))
        else:
            key = tuple(content)
            entry = cache.values.get(key)
            if entry is None:
                subconfigs = subconfigurations(S, l)
                weights, evs = _candidate_marginals(U, S, key, l, subconfigs)
                cache.evaluations += evs
                evaluations += evs
                _check_weights(weights)
                weights = np.clip(weights, 0.0, None)
                entry = (weights, np.cumsum(weights))
                cache.values[key] = entry
            weights, cum = entry
            if cum[-1] <= 0.0:
                raise SamplingError("all marginal weights vanished")
            u = rng.random() * cum[-1]
            x = int(np.searchsorted(cum, u, side="right"))
            last_weight = float(weights[x])
        prefix.append(x + 1)
        content[x] += 1
    T = tuple(content)
    probability = last_weight * math.factorial(n) / math.prod(
        math.factorial(t) for t in T
    )
    return SampleOutcome(T, probability, tuple(prefix), evaluations)


def sample_batch(U, S, shots: int, seed: int, use_cache: bool = True):
    """Independent samples from per-shot derived RNG substreams.

    Returns (outcomes, report).  With ``use_cache`` the marginal memo is
    shared across shots (the distribution is fixed), so the instrumented
    total counts only actual permanent evaluations.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    U = np.asarray(U, dtype=complex)
    m = U.shape[0]
    S = validate_occupation(S)
    cache = MarginalCache() if use_cache else None
    outcomes = []
    total_evals = 0
    for shot in range(shots):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(shot,)))
        out = sample(U, S, rng, cache=cache)
        outcomes.append(out)
        total_evals += out.permanent_evaluations
    report = BatchReport(
        shots=shots,
        permanent_evaluations=total_evals,
        bound_per_sample=evaluation_bound(S, m),
        chain_bound=chain_runtime_bound(S, m),
    )
    return outcomes, report
