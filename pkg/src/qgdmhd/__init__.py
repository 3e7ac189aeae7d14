"""Quasi-gas-dynamic regularized compressible MHD with entropy verification."""

from .eos import EquationOfState, IdealGas, ThermoPoint, make_eos
from .errors import (
    ConfigurationError,
    NonPhysicalStateError,
    QgdMhdError,
    ShapeError,
    ThermoDomainError,
)
from .grid import Grid, div, div_tensor, dot, grad, grad_vec, outer
from .manufactured import ManufacturedState, TrigScalar, random_manufactured_state
from .regularization import (
    CoefficientLaw,
    GradientBundle,
    RegParams,
    RegTerms,
    compute_regterms,
    compute_tau,
    fd_gradients,
)
from .system import (
    ConservedState,
    FieldState,
    Sources,
    cfl_dt,
    rhs_classical,
    rhs_regularized,
    step,
    to_conserved,
    to_primitive,
)
from .diagnostics import (
    EntropyAudit,
    entropy_audit,
    identity_suite,
    residual_convergence,
    residual_entropy_balance,
    residual_internal_energy,
    totals,
    xi_form_a,
    xi_form_b,
)

__version__ = "0.1.0"
