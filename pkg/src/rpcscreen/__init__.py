"""Ridge partial correlation screening for ultrahigh-dimensional regression."""

__version__ = "0.1.0"

from ._backend import available_backends, backend_name, get_num_threads, set_backend, set_num_threads
from .datagen import Design, ErrorLaw, GeneratedDataset, SimSetting, generate
from .errors import (
    DataValidationError,
    DegenerateInputError,
    FactorizationError,
    InvalidArgumentError,
    NumericalError,
    RpcScreenError,
)
from .linalg import CholeskyFactor, cholesky, gram_ridge, invert_spd, solve_transposed_triangular
from .screening import (
    Method,
    RpcComponents,
    ScreenResult,
    StandardizedData,
    fr_screen,
    holp_scores,
    lambda_presets,
    rpc_fast,
    rpc_oracle,
    screen,
    select_top_k,
    sis_scores,
    standardize,
    union_submodels,
)
