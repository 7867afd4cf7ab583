"""Classical simulation of linear optics with path-dependent photonic losses."""

from .complexmat import (
    CostModel,
    build_submatrix,
    cost_estimate,
    permanent_exact,
    permanent_repeated,
    random_unitary,
)
from .fock import (
    classify_input,
    count_subconfigurations,
    multinomial,
    occupation_vectors,
    subconfigurations,
    to_assignment,
    to_occupation,
)
from .network import (
    BeamSplitterElement,
    LossyNetwork,
    StandaloneLoss,
    build_clements,
    build_reck,
    compose_io_losses,
    compose_unitary,
    extract_losses,
    extract_losses_heterogeneous,
    network_from_json,
    network_to_json,
    shortest_paths,
)
from .lossy import (
    apply_loss_distribution,
    default_strategy,
    sample_survivors,
    simulate_unbalanced,
    tv_bound,
    tv_bound_network,
)
from .oracle import (
    chi_square_test,
    dilated_lossy_distribution,
    exact_distribution,
    partial_trace_weights,
    tv_distance,
)
from .sampler import marginal_pmf, sample, sample_batch

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
