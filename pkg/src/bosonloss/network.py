"""Lossy interferometer meshes: Reck/Clements builders, shortest-path
analysis, and extraction of a nonuniform front loss layer.

A network is a layered list of two-mode elements, each carrying a loss
element on each input arm, plus optional standalone per-mode losses
interleaved between layers (these are what extraction deposits).  The JSON
schema in :func:`network_to_json` / :func:`network_from_json` is the single
source of truth; builders emit it and analyzers consume it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .complexmat import check_unitary


@dataclass(frozen=True)
class BeamSplitterElement:
    layer: int
    modes: tuple  # (i, j), 1-based, i < j
    theta: float
    phi: float
    eta: tuple  # arm transmissivities (on input i, on input j)

    def __post_init__(self):
        i, j = self.modes
        if i == j:
            raise ValueError("beam splitter must act on two distinct modes")
        if i > j:
            object.__setattr__(self, "modes", (j, i))
            object.__setattr__(self, "eta", (self.eta[1], self.eta[0]))
        for e in self.eta:
            if not (0.0 < e <= 1.0):
                raise ValueError("arm transmissivity must be in (0, 1]")

    def block(self) -> np.ndarray:
        """The 2x2 unitary of the splitter (without its arm losses)."""
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array(
            [[c, -np.exp(1j * self.phi) * s],
             [np.exp(-1j * self.phi) * s, c]],
            dtype=complex,
        )


@dataclass(frozen=True)
class StandaloneLoss:
    after_layer: int
    mode: int  # 1-based
    eta: float

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise ValueError("transmissivity must be in (0, 1]")


@dataclass(frozen=True)
class LossyNetwork:
    modes: int
    elements: tuple = ()
    standalone_losses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "standalone_losses", tuple(self.standalone_losses))
        if self.modes < 1:
            raise ValueError("network needs at least one mode")
        seen: dict[int, set] = {}
        for el in self.elements:
            i, j = el.modes
            if not (1 <= i <= self.modes and 1 <= j <= self.modes):
                raise ValueError("element mode out of range")
            used = seen.setdefault(el.layer, set())
            if i in used or j in used:
                raise ValueError(f"layer {el.layer} has overlapping mode pairs")
            used.update((i, j))
        for sl in self.standalone_losses:
            if not (1 <= sl.mode <= self.modes):
                raise ValueError("standalone loss mode out of range")

    def layer_indices(self) -> list[int]:
        return sorted({el.layer for el in self.elements})

    def layers(self) -> list[list[BeamSplitterElement]]:
        return [
            [el for el in self.elements if el.layer == d]
            for d in self.layer_indices()
        ]

    def is_lossless(self) -> bool:
        return not self.standalone_losses and all(
            e == 1.0 for el in self.elements for e in el.eta
        )


@dataclass(frozen=True)
class ExtractionResult:
    front: tuple  # per-mode transmissivities pulled to the input
    residual: LossyNetwork
    pulled_exponents: tuple | None  # s_i for uniform-eta networks, else None


def _haar_angles(rng):
    theta = math.asin(math.sqrt(rng.random()))
    phi = rng.random() * 2.0 * math.pi
    return theta, phi


def build_reck(m: int, eta: float, seed: int) -> LossyNetwork:
    """Triangular Reck mesh of m(m-1)/2 elements with seeded Haar angles.

    The triangle has its hypotenuse at the input side: mode m (the bottom)
    meets a single beam splitter, and the shortest input-output path grows
    linearly counting from the bottom.
    """
    if m < 2:
        raise ValueError("need at least two modes")
    rng = np.random.default_rng(seed)
    elements = []
    for i in range(1, m):  # pair (i, i+1) appears m-i times
        for layer in range(i, i + 2 * (m - i) - 1, 2):
            theta, phi = _haar_angles(rng)
            elements.append(
                BeamSplitterElement(layer, (i, i + 1), theta, phi, (eta, eta))
            )
    elements.sort(key=lambda el: (el.layer, el.modes))
    return LossyNetwork(m, elements)


def build_clements(m: int, eta: float, seed: int) -> LossyNetwork:
    """Rectangular Clements mesh: m layers of alternating nearest neighbours."""
    if m < 2:
        raise ValueError("need at least two modes")
    rng = np.random.default_rng(seed)
    elements = []
    for layer in range(1, m + 1):
        start = 1 if layer % 2 == 1 else 2
        for i in range(start, m, 2):
            theta, phi = _haar_angles(rng)
            elements.append(
                BeamSplitterElement(layer, (i, i + 1), theta, phi, (eta, eta))
            )
    return LossyNetwork(m, elements)


def shortest_paths(net: LossyNetwork) -> tuple:
    """s_i: minimum number of beam splitters from input i to any output.

    Backward dynamic programming: start with 0 at the outputs, sweep layers
    in reverse and set e_i, e_j <- min(e_i, e_j) + 1 at each element.
    """
    e = [0] * net.modes
    for layer in reversed(net.layers()):
        for el in layer:
            i, j = el.modes[0] - 1, el.modes[1] - 1
            e[i] = e[j] = min(e[i], e[j]) + 1
    return tuple(e)


def enumerate_path_products(net: LossyNetwork) -> tuple:
    """Brute-force per-input best path transmissivity and fewest splitters.

    Exhaustively walks every input-output path, tracking (max product of arm
    transmissivities incl. standalone losses, min splitter count) per input.
    Exponential; test/verification use only.
    """
    best_prod = [0.0] * net.modes
    best_len = [math.inf] * net.modes

    order = _propagation_order(net)

    def walk(start):
        # states: (mode index 0-based, product, count, position in order)
        stack = [(start, 1.0, 0, 0)]
        while stack:
            mode, prod, cnt, pos = stack.pop()
            if pos == len(order):
                if prod > best_prod[start]:
                    best_prod[start] = prod
                if cnt < best_len[start]:
                    best_len[start] = cnt
                continue
            item = order[pos]
            if isinstance(item, StandaloneLoss):
                if item.mode - 1 == mode:
                    prod *= item.eta
                stack.append((mode, prod, cnt, pos + 1))
            else:
                i, j = item.modes[0] - 1, item.modes[1] - 1
                if mode == i:
                    stack.append((i, prod * item.eta[0], cnt + 1, pos + 1))
                    stack.append((j, prod * item.eta[0], cnt + 1, pos + 1))
                elif mode == j:
                    stack.append((i, prod * item.eta[1], cnt + 1, pos + 1))
                    stack.append((j, prod * item.eta[1], cnt + 1, pos + 1))
                else:
                    stack.append((mode, prod, cnt, pos + 1))

    for start in range(net.modes):
        walk(start)
    return tuple(best_prod), tuple(0 if math.isinf(b) else b for b in best_len)


def _propagation_order(net: LossyNetwork):
    """Elements and standalone losses in the order a photon meets them."""
    layer_ids = net.layer_indices()
    if not layer_ids:
        return list(net.standalone_losses)
    out = [sl for sl in net.standalone_losses if sl.after_layer < layer_ids[0]]
    for idx, d in enumerate(layer_ids):
        upper = layer_ids[idx + 1] if idx + 1 < len(layer_ids) else math.inf
        out.extend(el for el in net.elements if el.layer == d)
        out.extend(
            sl for sl in net.standalone_losses if d <= sl.after_layer < upper
        )
    return out


def extract_losses_heterogeneous(net: LossyNetwork) -> ExtractionResult:
    """Commute the largest possible loss layer to the input of the network.

    Rebuilds the network from the last layer backward.  When prepending an
    element on (i, j), the larger of the two pulled transmissivities commutes
    through both arms; the ratio min/max stays behind as a standalone loss on
    the lossier mode, placed right after the element.  The resulting front is
    the per-input maximum over paths of the product of traversed arm
    transmissivities, and the residual keeps one completely lossless path
    from every input.
    """
    m = net.modes
    front = [1.0] * m
    residual_elements = []
    deposits = []

    for item in reversed(_propagation_order(net)):
        if isinstance(item, StandaloneLoss):
            # A pure loss ahead of everything built so far folds into the
            # front directly; later prepends will commute it as needed.
            front[item.mode - 1] *= item.eta
            continue
        el = item
        i, j = el.modes[0] - 1, el.modes[1] - 1
        commuted = max(front[i], front[j])
        if front[i] < commuted:
            deposits.append(StandaloneLoss(el.layer, i + 1, front[i] / commuted))
        elif front[j] < commuted:
            deposits.append(StandaloneLoss(el.layer, j + 1, front[j] / commuted))
        front[i] = commuted * el.eta[0]
        front[j] = commuted * el.eta[1]
        residual_elements.append(replace(el, eta=(1.0, 1.0)))

    residual_elements.sort(key=lambda el: (el.layer, el.modes))
    residual = LossyNetwork(m, residual_elements, tuple(deposits))
    exponents = _uniform_exponents(net)
    return ExtractionResult(tuple(front), residual, exponents)


def extract_losses(net: LossyNetwork) -> ExtractionResult:
    """Thm-1 extraction; on uniform-eta networks front_i = eta^{s_i} with s_i
    from :func:`shortest_paths`."""
    return extract_losses_heterogeneous(net)


def _uniform_exponents(net: LossyNetwork):
    etas = {e for el in net.elements for e in el.eta}
    if net.standalone_losses or len(etas) > 1:
        return None
    return shortest_paths(net)


def compose_io_losses(result: ExtractionResult, eta_in, eta_out) -> ExtractionResult:
    """Fold preparation losses into the front and readout losses into the
    residual (as trailing standalone losses)."""
    m = result.residual.modes
    eta_in = tuple(float(e) for e in eta_in)
    eta_out = tuple(float(e) for e in eta_out)
    if len(eta_in) != m or len(eta_out) != m:
        raise ValueError("loss vector dimension mismatch")
    front = tuple(a * b for a, b in zip(eta_in, result.front))
    layer_ids = result.residual.layer_indices()
    tail = (layer_ids[-1] if layer_ids else 0) + 1
    extra = tuple(
        StandaloneLoss(tail, i + 1, e) for i, e in enumerate(eta_out) if e < 1.0
    )
    residual = replace(
        result.residual,
        standalone_losses=result.residual.standalone_losses + extra,
    )
    exponents = result.pulled_exponents
    if any(e < 1.0 for e in eta_in):
        exponents = None
    return ExtractionResult(front, residual, exponents)


def compose_unitary(net: LossyNetwork) -> np.ndarray:
    """Product of the embedded 2x2 blocks in layer order.

    Only valid for lossless networks (all arm transmissivities 1 and no
    standalone losses).
    """
    if not net.is_lossless():
        raise ValueError("compose_unitary called on a lossy network")
    m = net.modes
    U = np.eye(m, dtype=complex)
    for layer in net.layers():
        for el in layer:
            i, j = el.modes[0] - 1, el.modes[1] - 1
            B = np.eye(m, dtype=complex)
            B[np.ix_([i, j], [i, j])] = el.block()
            U = B @ U
    return check_unitary(U)


def network_to_json(net: LossyNetwork) -> dict:
    return {
        "modes": net.modes,
        "elements": [
            {
                "layer": el.layer,
                "modes": [el.modes[0], el.modes[1]],
                "theta": el.theta,
                "phi": el.phi,
                "eta": [el.eta[0], el.eta[1]],
            }
            for el in net.elements
        ],
        "standalone_losses": [
            {"after_layer": sl.after_layer, "mode": sl.mode, "eta": sl.eta}
            for sl in net.standalone_losses
        ],
    }


def network_from_json(data: dict) -> LossyNetwork:
    elements = [
        BeamSplitterElement(
            layer=int(e["layer"]),
            modes=(int(e["modes"][0]), int(e["modes"][1])),
            theta=float(e["theta"]),
            phi=float(e["phi"]),
            eta=(float(e["eta"][0]), float(e["eta"][1])),
        )
        for e in data.get("elements", [])
    ]
    losses = [
        StandaloneLoss(int(s["after_layer"]), int(s["mode"]), float(s["eta"]))
        for s in data.get("standalone_losses", [])
    ]
    return LossyNetwork(int(data["modes"]), elements, losses)
