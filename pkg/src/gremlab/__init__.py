"""Numerical laboratory for the generalized random energy model in a uniform field.

Exact finite-size enumeration of the hierarchical Gaussian Hamiltonian,
closed-form limiting free energy and ground state, the level coarse-graining
algorithm, samplers for the limiting Poisson cascade objects, and a small
goodness-of-fit harness tying the two sides together.
"""

from gremlab.scalars import (
    EntropyPoint,
    RemScaling,
    cramer_entropy,
    rho,
    t_star,
    ground_state_constant,
    rem_scaling,
    rem_rescale,
    log_binomial_asymptotic,
)
from gremlab.hierarchy import (
    OrderParameter,
    CoarseGraining,
    GremScaling,
    validate_order_parameter,
    slope,
    modified_slope,
    coarse_grain,
    temperature_threshold,
    grem_scaling,
    grem_rescale,
)
from gremlab.limits import (
    FreeEnergyCurve,
    TabulatedFunction,
    TransformValue,
    grem_free_energy,
    grem_ground_state,
    rem_free_energy_closed,
    rem_free_energy_variational,
    free_energy_curve,
    legendre_restrict,
    global_from_restricted,
)
from gremlab.disorder import DisorderAddress, disorder_gaussian
from gremlab.simulate import (
    SimulationSpec,
    ObservableRecord,
    exact_observables,
    restricted_partition,
    gauge_transform,
    gauge_invariance_check,
    rescaled_energy_points,
    run_replicas,
)
from gremlab.cascade import (
    PointSample,
    CascadeSample,
    sample_ppp_exp,
    sample_cascade,
    cascade_energy,
    cascade_partition_integral,
)
from gremlab.gof import (
    GofReport,
    ks_test,
    ks_two_sample,
    poisson_interval_counts,
    hill_tail_index,
)

__version__ = "0.1.0"
