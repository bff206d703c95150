"""2D compressible MHD perturbation simulator and verification suite."""

from .spectral import (
    Grid,
    ScalarField,
    VectorField,
    aniso_norm,
    derivative,
    divergence,
    exact_product,
    gradient,
    hdot_norm,
    laplacian,
    perp_div,
    perp_grad,
    product,
    random_smooth_field,
    refine,
    sobolev_norm,
    vector_sobolev_norm,
)
from .dynamics import (
    LedgerSample,
    PhysParams,
    PressureLaw,
    SmallnessAnsatzError,
    State,
    Tendency,
    l2_ledger,
    omega,
    omega_rhs,
    reconstruct_physical,
    rhs,
    rhs_terms,
    u1_equation_residual,
)
from .linear import (
    DampingRow,
    ModeMatrix,
    ModeSpectrum,
    damping_map,
    fourth_order_symbol_check,
    mode_matrix,
    mode_spectrum,
    symbol_check_lattice,
    wave_pair_check,
)
from .stepping import CFLViolation, StepConfig, Stepper, advance, step, viscous_semigroup
from .diagnostics import (
    DecayFit,
    DiagnosticsConfig,
    EnergyLedger,
    decay_fit,
    theorem_monitor,
    time_weight,
    total_energy,
)
from .lemmas import (
    LemmaTrial,
    commutator_trial,
    pressure_remainder_trial,
    run_ensemble,
    triple_product_trial,
)
from .config import ConfigError, RunConfig, parse_config
from .initial import make_initial_data, reflection_defect
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint

__version__ = "0.1.0"
