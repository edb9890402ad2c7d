"""Testing for common jumps of two asynchronously observed processes."""

from .bootstrap import (
    BootstrapConfig,
    TestReport,
    quantile_hat,
    run_test,
    sample_d_hat,
    sample_eta_hat,
    sample_shift_index,
)
from .errors import DomainError, ParameterError
from .harness import (
    RejectionCurve,
    Scenario,
    Tuning,
    curves_to_csv,
    get_scenario,
    run_scenario,
    scenario_registry,
)
from .model import (
    JumpDriverSpec,
    JumpEvent,
    ModelParams,
    PathRecord,
    jump_correlation,
    simulate_jumps,
    simulate_path,
)
from .sampling import (
    IntervalIndex,
    MergedGrid,
    ObservationScheme,
    eta_direct_poisson,
    eta_n,
    gen_equidistant_scheme,
    gen_poisson_scheme,
    gn_hn,
    merge,
    overlap_pairs,
)
from .statistics import (
    SpotVolConfig,
    TestInputs,
    TruncationConfig,
    a_trunc,
    detect_jumps,
    phi_tilde,
    spot_vol,
    v_cross,
    v_fourth,
)

__version__ = "0.1.0"
