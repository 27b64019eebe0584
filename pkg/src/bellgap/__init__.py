"""Bell functional values over local, bilocal, non-signalling and quantum behaviour classes."""

from .checks import Check
from .errors import (
    BellgapError,
    BudgetExceeded,
    DimensionError,
    DomainError,
    LPError,
    UnsupportedScenario,
    ValidationError,
)
from .games import (
    KVParams,
    chsh_correlation_functional,
    chsh_game,
    check_normalization,
    correlation_embedding,
    hadamard_correlation_functional,
    hat_construction,
    khot_vishnoi,
    tensor_product,
    tilde_construction,
    xor_form,
)
from .model import (
    PARTITIONS,
    Behaviour,
    BellFunctional,
    Correlation,
    DeterministicStrategy,
    Partition,
    Scenario,
    behaviour_from_correlation,
    correlation_from_behaviour,
    evaluate,
    is_non_signalling,
)
from .quantum import (
    QuantumStrategy,
    behaviour_of,
    check_dimension_bound,
    check_output_bound,
    chsh_strategy,
    correlation_seesaw,
    hat_strategy,
    kv_strategy,
    quantum_lower_value,
)
from .solvers import (
    CLASSES,
    ValueReport,
    bilocal_correlation_value,
    bilocal_value_general,
    bilocal_value_ns,
    compute_value,
    local_correlation_value,
    local_value,
    lv_ratio,
    ns_correlation_value,
    ns_value,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
