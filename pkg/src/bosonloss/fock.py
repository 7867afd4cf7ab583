"""Fock-state bookkeeping: second/first quantization conversions and the
sub-configuration combinatorics behind the marginal pmfs.

Occupation vectors are tuples of nonnegative ints ``(s_1, ..., s_m)``; mode
assignments are tuples of 1-based mode indices.  Both serialize to JSON as
plain integer arrays.
"""

from __future__ import annotations


import math
from dataclasses import dataclass


def validate_occupation(S) -> tuple:
    S = tuple(int(s) for s in S)
    if len(S) < 1:
        raise ValueError("occupation vector needs at least one mode")
    if any(s < 0 for s in S):
        raise ValueError("occupations must be nonnegative")
    return S


def to_assignment(T) -> tuple:
    """Nondecreasing mode-assignment tuple z with mode i appearing t_i times."""
    T = validate_occupation(T)
    return tuple(i + 1 for i, t in enumerate(T) for _ in range(t))


def to_occupation(r, m: int) -> tuple:
    """Occupation vector whose i-th entry is the multiplicity of i in r."""
    occ = [0] * m
    for entry in r:
        if not (1 <= entry <= m):
            raise ValueError(f"mode-assignment entry {entry} out of range 1..{m}")
        occ[entry - 1] += 1
    return tuple(occ)


def occupation_vectors(n: int, m: int):
    """All occupation vectors on m modes with exactly n photons (lexicographic)."""
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in occupation_vectors(n - first, m - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class SubConfiguration:
    """A way of removing n-l photons from S, with its partial-trace weight."""

    removed: tuple  # K, with |K| = n - l and K_i <= s_i
    remaining: tuple  # S - K
    weight: float


def subconfigurations(S, l: int) -> list[SubConfiguration]:
    """All l-photon sub-configurations of S with their removal weights.

    The weight of removing K is the multivariate hypergeometric probability
    prod_i binom(s_i, K_i) / binom(n, n-l), i.e. the diagonal weight of the
    partial trace of the symmetrized n-particle state over n-l particles.
    Enumeration of K is lexicographic.
    """
    S = validate_occupation(S)
    n = sum(S)
    if not (1 <= l <= n):
        raise ValueError(f"l={l} out of range 1..{n}")
    drop = n - l
    denom = math.comb(n, drop)
    out = []
    for K in _bounded_compositions(drop, S):
        w = math.prod(math.comb(s, k) for s, k in zip(S, K)) / denom
        remaining = tuple(s - k for s, k in zip(S, K))
        out.append(SubConfiguration(removed=K, remaining=remaining, weight=w))
    return out


def _bounded_compositions(total: int, bounds):
    """Vectors K with sum(K) = total and 0 <= K_i <= bounds_i, lexicographic."""
    m = len(bounds)

    def rec(i, left):
        if i == m - 1:
            if left <= bounds[i]:
                yield (left,)
            return
        for k in range(min(left, bounds[i]) + 1):
            for rest in rec(i + 1, left - k):
                yield (k,) + rest

    if total > sum(bounds):
        return
    yield from rec(0, total)


def count_subconfigurations(S) -> list[int]:
    """N_l for l = 1..n: the number of K with |K| = n-l, K <= S componentwise.

    Satisfies sum_l N_l = prod(s_i + 1) - 1.
    """
    S = validate_occupation(S)
    n = sum(S)
    if n < 1:
        raise ValueError("need at least one photon")
    # counts[d] = number of K <= S with |K| = d, by polynomial multiplication
    counts = [1]
    for s in S:
        new = [0] * (len(counts) + s)
        for d, c in enumerate(counts):
            for k in range(s + 1):
                new[d + k] += c
        counts = new
    return [counts[n - l] for l in range(1, n + 1)]


def multinomial(n: int, parts) -> int:
    """Exact multinomial coefficient n! / prod(parts_i!).

    Python integers are arbitrary precision, so the result is always exact;
    :func:`multinomial_log` is the log-domain companion for callers that need
    a float of bounded magnitude.
    """
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def multinomial_log(n: int, parts) -> float:
    """log of the multinomial coefficient, via lgamma."""
    parts = [int(p) for p in parts]
    if any(p < 0 for p in parts):
        raise ValueError("parts must be nonnegative")
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    return math.lgamma(n + 1) - sum(math.lgamma(p + 1) for p in parts)


@dataclass(frozen=True)
class InputClass:
    """Classification of an input state per the easy families A/B/C."""

    label: str  # "A", "B", "C" or "general"
    predicted_runtime: float | None  # T_A or T_B where applicable
    chain_bound: int  # n * m * prod(s_i+1)^2 * alpha_S
    k: int  # occupied bins


# Bins allowed for a "constant number of bins" classification.
DEFAULT_CLASS_A_BINS = 3


def classify_input(S, c: float, k_max: int = DEFAULT_CLASS_A_BINS) -> InputClass:
    """Label S as class A, B, C or general, with the predicted runtime.

    A: photons in at most ``k_max`` bins, T_A = k m n (n+1)^{2k}.
    B: exactly one bin with more than one photon plus at most c log(n)
       singly-occupied modes, T_B = c m n^{2c+3} log(n).
    C: at most ``k_max`` multiply-occupied bins plus at most c log(n) singles.
    """
    S = validate_occupation(S)
    m = len(S)
    n = sum(S)
    if n < 1:
        raise ValueError("need at least one photon")
    alpha = sum(1 for s in S if s > 0)
    multi = sum(1 for s in S if s > 1)
    singles = sum(1 for s in S if s == 1)
    chain = n * m * math.prod((s + 1) ** 2 for s in S) * alpha
    logn = math.log(n)
    if alpha <= k_max:
        k = alpha
        return InputClass("A", float(k * m * n * (n + 1) ** (2 * k)), chain, alpha)
    if multi == 1 and singles <= c * logn:
        return InputClass("B", float(c * m * n ** (2 * c + 3) * logn), chain, alpha)
    if multi <= k_max and singles <= c * logn:
        return InputClass("C", None, chain, alpha)
    return InputClass("general", None, chain, alpha)
