"""Quantum divergences, their optimal extensions, and randomized property suites."""

from .divergence import (
    RandomProjective,
    classical_divergence,
    d_h_epsilon,
    d_max,
    d_min,
    d_min_epsilon_lower,
    d_s_epsilon,
    fidelity,
    measured_divergence,
    renyi,
    trace_distance,
    umegaki,
)
from .entangle import (
    BipartiteCut,
    convex_roof_search,
    entanglement_entropy,
    schmidt_decompose,
    schmidt_number_ppt,
    smoothed_extension,
)
from .extension import (
    ExtensionBound,
    RegularizationTrace,
    extend_subnormalized,
    extended_d_max,
    extended_umegaki,
    generalized_fidelity,
    generalized_trace_distance,
    maximal_classical_extension_ansatz,
    maximal_classical_extension_pure,
    maximal_classical_extension_search,
    minimal_classical_extension_lower,
    purified_distance,
    regularized_rate,
)
from .qstate import (
    ClassicalDistribution,
    DensityState,
    Povm,
    PureState,
    QuantumChannel,
    apply_channel,
    eigh,
    purify,
    random_channel,
    random_density,
    random_povm,
    random_pure,
    tensor,
    tensor_power,
    validate_state,
)
from .suites import PropertyReport, SuiteConfig, run_suite

__version__ = "0.1.0"
