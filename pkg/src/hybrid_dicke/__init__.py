"""Dicke model with a photon-number-dependent quadratic field coupling.

Thermodynamic-limit solution, finite-N exact diagonalization and phase-diagram
sweeps for a Dicke model whose field mode is quadratically coupled to an
ancillary cavity in a Fock state.
"""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    CriticalityReport,
    DressedFrame,
    ModelParams,
    PhaseLabel,
    StabilityBounds,
    chi_for_dressed_coupling,
    classify_phase,
    critical_couplings,
    dressed_frame,
    stability_bounds,
)
from .thermo import (  # noqa: E402
    BogoliubovSet,
    ExcitationSpectrum,
    GroundObservables,
    PhasePoint,
    bogoliubov_coefficients,
    ground_observables,
    normal_spectrum,
    solve_point,
    superradiant_spectrum,
)
from .ed import (  # noqa: E402
    EDConfig,
    EDResult,
    OperatorMatrix,
    build_hamiltonian,
    compute_observables,
    converge_cutoff,
    ground_eigenpair,
    parity_matrix,
)

__all__ = [
    "__version__",
    "CriticalityReport",
    "DressedFrame",
    "ModelParams",
    "PhaseLabel",
    "StabilityBounds",
    "chi_for_dressed_coupling",
    "classify_phase",
    "critical_couplings",
    "dressed_frame",
    "stability_bounds",
    "BogoliubovSet",
    "ExcitationSpectrum",
    "GroundObservables",
    "PhasePoint",
    "bogoliubov_coefficients",
    "ground_observables",
    "normal_spectrum",
    "solve_point",
    "superradiant_spectrum",
    "EDConfig",
    "EDResult",
    "OperatorMatrix",
    "build_hamiltonian",
    "compute_observables",
    "converge_cutoff",
    "ground_eigenpair",
    "parity_matrix",
]
