"""Loss channels, survivor sampling, total-variation bound calculators, and
the end-to-end approximate simulation pipeline for unbalanced lossy networks.

The particle-separable approximation used by the pipeline is pluggable; the
default places every surviving photon in a single bin, which always yields a
classically-easy type-B input but carries no optimality guarantee, so the
pipeline reports measured accuracy against the dilation oracle instead of
asserting the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle as oracle_mod
from .fock import validate_occupation
from .network import (
    LossyNetwork,
    compose_unitary,
    extract_losses_heterogeneous,
    shortest_paths,
)
from .sampler import SampleOutcome, sample as draw_sample


class KBudgetError(RuntimeError):
    """More short-path input modes than the O(log n) hypothesis allows."""


def loss_vector(spec, m: int) -> tuple:
    """Normalize a loss-channel spec to a per-mode transmissivity tuple.

    ``spec`` may be a scalar (uniform loss) or a length-m sequence.
    """
    if np.isscalar(spec):
        eta = (float(spec),) * m
    else:
        eta = tuple(float(e) for e in spec)
        if len(eta) != m:
            raise ValueError("loss vector dimension mismatch")
    if any(not (0.0 <= e <= 1.0) for e in eta):
        raise ValueError("transmissivities must lie in [0, 1]")
    return eta


def partial_loss_vector(m: int, k: int, eta: float) -> tuple:
    """The (1,...,1, eta,...,eta) pattern with k lossless leading modes."""
    if not (0 <= k <= m):
        raise ValueError("k out of range")
    return (1.0,) * k + (float(eta),) * (m - k)


def apply_loss_distribution(S, spec) -> dict:
    """Exact distribution of surviving occupations under independent loss.

    Each photon in mode i survives with probability eta_i; the result is the
    product-binomial distribution over occupation vectors <= S.
    """
    S = validate_occupation(S)
    eta = loss_vector(spec, len(S))
    dist = {(): 1.0}
    for s, e in zip(S, eta):
        new = {}
        for prefix, p in dist.items():
            for k in range(s + 1):
                pk = math.comb(s, k) * e**k * (1.0 - e) ** (s - k)
                if pk == 0.0:
                    continue
                key = prefix + (k,)
                new[key] = new.get(key, 0.0) + p * pk
        dist = new
    return dist


def sample_survivors(S, spec, rng) -> tuple:
    """One draw from :func:`apply_loss_distribution`."""
    S = validate_occupation(S)
    eta = loss_vector(spec, len(S))
    return tuple(int(rng.binomial(s, e)) for s, e in zip(S, eta))


@dataclass(frozen=True)
class TVBound:
    value: float
    leading: float  # eta^2 (n-k) / 2
    tail: float  # eta (1-eta) / 2
    effective_eta: float | None = None
    c_threshold: float | None = None  # 1 / (2 log(1/eta)); vanishing iff c above

    @property
    def vanishing(self) -> bool | None:
        return None if self.c_threshold is None else self._c > self.c_threshold

    _c: float | None = None


def tv_bound(n: int, k: int, eta: float) -> TVBound:
    """Closed-form simulation accuracy eta^2 (n-k)/2 + eta(1-eta)/2."""
    if not (0 <= k <= n):
        raise ValueError("need 0 <= k <= n")
    if not (0.0 <= eta <= 1.0):
        raise ValueError("eta must lie in [0, 1]")
    leading = eta**2 * (n - k) / 2.0
    tail = eta * (1.0 - eta) / 2.0
    return TVBound(leading + tail, leading, tail)


def tv_bound_network(n: int, k: int, eta: float, c: float) -> TVBound:
    """Accuracy after c log(n) extracted loss rounds: eta_eff = eta^{c log n}.

    Also reports the threshold 1/(2 log(1/eta)) above which c makes the bound
    vanish as n grows.
    """
    if not (0.0 < eta < 1.0):
        raise ValueError("eta must lie strictly inside (0, 1)")
    if c < 0.0:
        raise ValueError("c must be nonnegative")
    eta_eff = float(n) ** (-c * math.log(1.0 / eta))
    base = tv_bound(n, k, eta_eff)
    threshold = 1.0 / (2.0 * math.log(1.0 / eta))
    return TVBound(
        base.value, base.leading, base.tail,
        effective_eta=eta_eff, c_threshold=threshold, _c=c,
    )


@dataclass(frozen=True)
class ApproximationStrategy:
    """Maps survivor counts to a type-B input plus an optional pre-unitary.

    ``build(n_alpha, lossless_modes, bin_mode, m)`` returns an occupation
    vector with single photons on ``lossless_modes`` and ``n_alpha`` photons
    in ``bin_mode``, together with a unitary acting as the identity on the
    lossless modes (or None for the identity).
    """

    name: str
    build: callable


def default_strategy() -> ApproximationStrategy:
    """All survivors into the designated bin, no pre-rotation."""

    def build(n_alpha, lossless_modes, bin_mode, m):
        occ = [0] * m
        for mode in lossless_modes:
            occ[mode - 1] = 1
        occ[bin_mode - 1] += n_alpha
        return tuple(occ), None

    return ApproximationStrategy("default", build)


@dataclass(frozen=True)
class Certificate:
    n: int
    k: int
    eta: float
    eta_eff: float
    c: float
    c_threshold: float | None
    delta: float
    strategy: str

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "eta": self.eta,
            "eta_eff": self.eta_eff,
            "c": self.c,
            "c_threshold": self.c_threshold,
            "delta": self.delta,
            "strategy": self.strategy,
        }


DEFAULT_K_BUDGET_MULTIPLIER = 3.0


class UnbalancedPipeline:
    """Prepared state for repeated pipeline shots on one (network, input).

    Performs the loss extraction and the short-path/lossy mode split once;
    each :meth:`sample` call then draws survivors, builds the approximating
    type-B input via the strategy, and propagates it through the residual
    network (directly when it is lossless, through the dilation oracle at
    desk scale otherwise).
    """

    def __init__(self, net: LossyNetwork, S, c: float,
                 kappa: float = DEFAULT_K_BUDGET_MULTIPLIER,
                 allow_any_input: bool = False,
                 limits: oracle_mod.DeskLimits | None = None):
        S = validate_occupation(S)
        if len(S) != net.modes:
            raise ValueError("input length must equal network mode count")
        n = sum(S)
        if n < 1:
            raise ValueError("need at least one photon")
        if not allow_any_input and any(s > 1 for s in S):
            raise ValueError(
                "pipeline expects a standard |1...1 0...0> style input; "
                "pass allow_any_input=True to relax"
            )
        self.net = net
        self.S = S
        self.n = n
        self.c = c
        self.limits = limits
        self.extraction = extract_losses_heterogeneous(net)
        self.paths = shortest_paths(net)
        occupied = [i for i, s in enumerate(S) if s > 0]
        logn = math.log(n) if n > 1 else 0.0
        cutoff = c * logn
        self.short_modes = [i + 1 for i in occupied if self.paths[i] < cutoff]
        k = len(self.short_modes)
        budget = kappa * logn
        if k > budget:
            raise KBudgetError(
                f"{k} short-path input modes exceed the budget {budget:.2f}"
            )
        self.k = k
        self.lossy_modes = [i + 1 for i in occupied
                            if i + 1 not in self.short_modes]
        self.bin_mode = self.lossy_modes[0] if self.lossy_modes else occupied[0] + 1
        self.lossy_etas = tuple(
            self.extraction.front[i - 1] for i in self.lossy_modes
        )
        self.eta = self._network_eta()
        self.certificate = self._certificate()
        self._residual_unitary = None
        self._residual_dists: dict = {}
        if self.extraction.residual.is_lossless():
            self._residual_unitary = compose_unitary(self.extraction.residual)

    def _network_eta(self) -> float:
        lossy = [e for el in self.net.elements for e in el.eta if e < 1.0]
        lossy += [sl.eta for sl in self.net.standalone_losses if sl.eta < 1.0]
        return max(lossy) if lossy else 1.0

    def _certificate(self) -> Certificate:
        if 0.0 < self.eta < 1.0:
            bound = tv_bound_network(self.n, self.k, self.eta, self.c)
            return Certificate(
                self.n, self.k, self.eta, bound.effective_eta, self.c,
                bound.c_threshold, bound.value, "",
            )
        # Lossless network: the pipeline degenerates to exact sampling.
        return Certificate(self.n, self.k, self.eta, 1.0, self.c, None, 0.0, "")

    def sample(self, strategy: ApproximationStrategy, rng) -> SampleOutcome:
        survivors = [int(rng.binomial(self.S[i - 1], e))
                     for i, e in zip(self.lossy_modes, self.lossy_etas)]
        n_alpha = sum(survivors)
        occ, U_alpha = strategy.build(
            n_alpha, self.short_modes, self.bin_mode, self.net.modes
        )
        if sum(occ) == 0:
            return SampleOutcome((0,) * self.net.modes, 1.0, (), 0)
        if self._residual_unitary is not None:
            U = self._residual_unitary
            if U_alpha is not None:
                U = U @ np.asarray(U_alpha, dtype=complex)
            return draw_sample(U, occ, rng)
        if U_alpha is not None:
            raise NotImplementedError(
                "pre-rotation strategies need a lossless residual network"
            )
        dist = self._residual_dists.get(occ)
        if dist is None:
            dist = oracle_mod.dilated_lossy_distribution(
                self.extraction.residual, occ, limits=self.limits
            )
            self._residual_dists[occ] = dist
        keys = list(dist)
        probs = np.array([dist[k] for k in keys])
        idx = int(rng.choice(len(keys), p=probs / probs.sum()))
        return SampleOutcome(keys[idx], float(dist[keys[idx]]), (), 0)

    def certificate_for(self, strategy: ApproximationStrategy) -> Certificate:
        cert = self.certificate
        return Certificate(
            cert.n, cert.k, cert.eta, cert.eta_eff, cert.c,
            cert.c_threshold, cert.delta, strategy.name,
        )


def simulate_unbalanced(
    net: LossyNetwork,
    S,
    strategy: ApproximationStrategy,
    c: float,
    rng,
    kappa: float = DEFAULT_K_BUDGET_MULTIPLIER,
    allow_any_input: bool = False,
    limits: oracle_mod.DeskLimits | None = None,
):
    """One shot of the approximate pipeline plus its accuracy certificate."""
    pipeline = UnbalancedPipeline(
        net, S, c, kappa=kappa, allow_any_input=allow_any_input, limits=limits
    )
    outcome = pipeline.sample(strategy, rng)
    return outcome, pipeline.certificate_for(strategy)
