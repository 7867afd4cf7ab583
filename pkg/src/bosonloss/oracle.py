"""Brute-force ground truth at desk scale.

Exact lossless output distributions, exact lossy distributions via unitary
dilation into environment modes, dense partial-trace verification of
sub-configuration weights, and statistical distance tooling.  Everything here
is for verification, not production; limits are deliberately tight and can be
overridden through the ``LOSSY_BOSON_DESK_LIMITS`` environment variable (a
JSON object with any of ``max_photons``, ``max_modes``, ``max_total_modes``).
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .complexmat import build_submatrix, check_unitary, permanent_exact
from .fock import occupation_vectors, subconfigurations, validate_occupation
from .network import LossyNetwork, StandaloneLoss, _propagation_order


@dataclass
class DeskLimits:
    max_photons: int = 6
    max_modes: int = 8
    max_total_modes: int = 12  # system + environment, for dilations

    @classmethod
    def from_env(cls) -> "DeskLimits":
        limits = cls()
        raw = os.environ.get("LOSSY_BOSON_DESK_LIMITS")
        if raw:
            for key, value in json.loads(raw).items():
                if not hasattr(limits, key):
                    raise ValueError(f"unknown desk limit {key!r}")
                setattr(limits, key, int(value))
        return limits


class DeskLimitError(ValueError):
    """Requested instance exceeds the configured brute-force limits."""


@dataclass(frozen=True)
class ExactDistribution:
    """Map from occupation vector to probability, at fixed photon number."""

    entries: dict
    total_photons: int

    def __getitem__(self, key):
        return self.entries[key]

    def items(self):
        return self.entries.items()


def _entries(dist) -> dict:
    return dist.entries if isinstance(dist, ExactDistribution) else dist


def exact_distribution(U, S, limits: DeskLimits | None = None) -> ExactDistribution:
    """Full output distribution p(T) = |Per(U_{S,T})|^2 / (prod s! prod t!)."""
    limits = limits or DeskLimits.from_env()
    U = check_unitary(U)
    S = validate_occupation(S)
    m = U.shape[0]
    n = sum(S)
    if len(S) != m:
        raise ValueError("occupation length must equal matrix dimension")
    if n > limits.max_photons or m > limits.max_modes:
        raise DeskLimitError(
            f"instance n={n}, m={m} exceeds desk limits "
            f"({limits.max_photons}, {limits.max_modes})"
        )
    s_fact = math.prod(math.factorial(s) for s in S)
    entries = {}
    for T in occupation_vectors(n, m):
        per = permanent_exact(build_submatrix(U, S, T=T))
        t_fact = math.prod(math.factorial(t) for t in T)
        entries[T] = abs(per) ** 2 / (s_fact * t_fact)
    return ExactDistribution(entries, n)


def _loss_block(eta: float) -> np.ndarray:
    t, r = math.sqrt(eta), math.sqrt(1.0 - eta)
    return np.array([[t, -r], [r, t]], dtype=complex)


def dilate_network(net: LossyNetwork):
    """Unitary dilation: each lossy element feeds a fresh environment mode.

    Returns (U_total, total_modes); the first ``net.modes`` rows/columns are
    the system modes.
    """
    m = net.modes
    items = _propagation_order(net)
    n_env = sum(
        (1 if isinstance(it, StandaloneLoss) and it.eta < 1.0 else 0)
        + (0 if isinstance(it, StandaloneLoss) else sum(1 for e in it.eta if e < 1.0))
        for it in items
    )
    total = m + n_env
    U = np.eye(total, dtype=complex)
    env = m  # next free environment mode (0-based)

    def apply_two_mode(block, a, b):
        nonlocal U
        B = np.eye(total, dtype=complex)
        B[np.ix_([a, b], [a, b])] = block
        U = B @ U

    for it in items:
        if isinstance(it, StandaloneLoss):
            if it.eta < 1.0:
                apply_two_mode(_loss_block(it.eta), it.mode - 1, env)
                env += 1
        else:
            for arm, mode in zip(it.eta, it.modes):
                if arm < 1.0:
                    apply_two_mode(_loss_block(arm), mode - 1, env)
                    env += 1
            i, j = it.modes[0] - 1, it.modes[1] - 1
            apply_two_mode(it.block(), i, j)
    return U, total


def dilated_lossy_distribution(
    net: LossyNetwork, S, limits: DeskLimits | None = None
) -> dict:
    """Exact lossy output distribution, by dilation and marginalization.

    Returns a plain dict over system occupation vectors of any surviving
    photon number <= n.
    """
    limits = limits or DeskLimits.from_env()
    S = validate_occupation(S)
    m = net.modes
    if len(S) != m:
        raise ValueError("occupation length must equal network mode count")
    n = sum(S)
    U, total = dilate_network(net)
    if n > limits.max_photons or total > limits.max_total_modes:
        raise DeskLimitError(
            f"dilated instance n={n}, modes={total} exceeds desk limits "
            f"({limits.max_photons}, {limits.max_total_modes})"
        )
    S_full = S + (0,) * (total - m)
    s_fact = math.prod(math.factorial(s) for s in S)
    out: dict = {}
    for T in occupation_vectors(n, total):
        per = permanent_exact(build_submatrix(U, S_full, T=T))
        t_fact = math.prod(math.factorial(t) for t in T)
        p = abs(per) ** 2 / (s_fact * t_fact)
        key = T[:m]
        out[key] = out.get(key, 0.0) + p
    return out


def partial_trace_weights(S, l: int, limits: DeskLimits | None = None) -> dict:
    """Diagonal weights of tr_{n-l} |S><S| per remaining Dicke content.

    Builds the symmetrized n-particle state densely in first quantization,
    traces out the last n-l particles and reads off the weight of each
    compatible remaining content S-K.  This is the arbiter for
    ``fock.subconfigurations``.
    """
    S = validate_occupation(S)
    m = len(S)
    n = sum(S)
    if not (1 <= l <= n):
        raise ValueError(f"l={l} out of range 1..{n}")
    if m**n > 1024:
        raise DeskLimitError(f"dense first-quantization size m^n={m**n} > 1024")
    psi = _dicke_vector(S, n, m)
    A = psi.reshape(m**l, m ** (n - l))
    rho = A @ A.conj().T
    weights = {}
    for sub in subconfigurations(S, l):
        v = _dicke_vector(sub.remaining, l, m)
        weights[sub.removed] = float(np.real(v.conj() @ rho @ v))
    return weights


def _dicke_vector(T, n: int, m: int) -> np.ndarray:
    """Dense first-quantization vector of the Dicke state |T> on n particles."""
    amp = math.sqrt(math.prod(math.factorial(t) for t in T) / math.factorial(n))
    psi = np.zeros(m**n, dtype=complex)
    modes = [i for i, t in enumerate(T) for _ in range(t)]
    for perm in set(itertools.permutations(modes)):
        idx = 0
        for p in perm:
            idx = idx * m + p
        psi[idx] = amp
    return psi


def tv_distance(p, q) -> float:
    """Total variation distance: half the L1 distance over the union support."""
    p, q = _entries(p), _entries(q)
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


@dataclass(frozen=True)
class ChiSquareResult:
    passed: bool
    statistic: float
    pvalue: float
    pooled_bins: int


def chi_square_test(samples, expected, significance: float) -> ChiSquareResult:
    """Pearson goodness-of-fit of observed outcomes against ``expected``.

    Bins with expected count below 5 are pooled into a single bin.  Fails
    when the p-value drops below ``significance``.
    """
    expected_entries = _entries(expected)
    n_samples = len(samples)
    if n_samples < 10 * len(expected_entries):
        raise ValueError(
            f"undersized sample: {n_samples} draws for "
            f"{len(expected_entries)} outcomes"
        )
    counts: dict = {}
    for s in samples:
        counts[tuple(s)] = counts.get(tuple(s), 0) + 1
    unknown = set(counts) - set(expected_entries)
    if unknown:
        raise ValueError(f"samples outside expected support: {sorted(unknown)[:3]}")
    obs, exp = [], []
    pooled_obs = pooled_exp = 0.0
    for key, prob in expected_entries.items():
        e = prob * n_samples
        o = counts.get(key, 0)
        if e < 5.0:
            pooled_obs += o
            pooled_exp += e
        else:
            obs.append(o)
            exp.append(e)
    pooled = 0
    if pooled_exp > 0.0:
        obs.append(pooled_obs)
        exp.append(pooled_exp)
        pooled = 1
    if len(obs) < 2:
        return ChiSquareResult(True, 0.0, 1.0, pooled)
    exp = np.asarray(exp, dtype=float)
    exp *= n_samples / exp.sum()  # remove truncation drift
    stat, pvalue = stats.chisquare(np.asarray(obs, dtype=float), exp)
    return ChiSquareResult(bool(pvalue >= significance), float(stat), float(pvalue), pooled)
