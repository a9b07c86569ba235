"""Mixed orthogonal arrays, k-uniform heterogeneous states and AME shadow bounds."""

from .arrays import (
    LevelSignature,
    MixedArray,
    StrengthVerdict,
    certify,
    delete_columns,
    hamming_distance,
    is_irredundant,
    is_irredundant_direct,
    is_simple,
    min_hamming_distance,
    split_column,
    trivial_oa,
    verify_strength,
)
from .constructions import (
    DifferenceScheme,
    expansive_replace,
    generalized_hadamard,
    ghm_from_prime,
    hadamard,
    kron_extend,
    kron_sum,
    linear_oa,
    strength3_extend,
    verify_difference_scheme,
)
from .errors import ConstructionError, ContractError, FormatError, ForgeError, InputError
from .shadow import ame_excluded, krawtchouk, scan_nonexistence, shadow_coefficients, shadow_values
from .states import (
    DensityMatrix,
    PauliWord,
    PureState,
    apply_pauli,
    coarse_grain,
    generate_basis,
    opm_solution_space,
    partial_trace,
    project_reduce,
    state_from_irmoa,
    support,
    tensor_parties,
    verify_k_uniform,
)

__version__ = "0.1.0"
