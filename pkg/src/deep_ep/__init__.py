"""Directed equilibrium propagation (DEEP) on complete directed graphs."""
from .analysis import (
    ProbeResult,
    StabilityReport,
    conservation_residual,
    empirical_stability_probe,
    free_jacobian,
    gershgorin_check,
    random_certified_network,
    stability_certificate,
)
from .dynamics import (
    DivergenceError,
    PhaseTrajectory,
    cost_gradient,
    free_equilibrium,
    hard_sigmoid,
    initial_state,
    mse_cost,
    relax,
    vector_field,
)
from .learning import ParameterUpdate, apply_update, asym_ep_update, deep_update
from .network import (
    Hyperparams,
    Network,
    NeuronRole,
    SPARSITY_L1_COEFF,
    new_complete_network,
    reference_parameter_count,
    sparsity_fraction,
    trainable_parameter_count,
)
from .sparsity import PruneEvent, incoming_parameters, prune_probabilities, prune_step
from .training import (
    Comparison,
    Dataset,
    RunRecord,
    batch_statistics,
    compare_rules,
    evaluate,
    logic_dataset,
    run_batch,
    train,
)

__version__ = "0.1.0"
