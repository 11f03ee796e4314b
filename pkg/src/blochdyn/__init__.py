"""Nonlinear Lindblad dynamics of a qubit on the Bloch ball.

The package simulates master equations whose dissipative coefficient
matrix depends on the state itself, which turns the linear semigroup flow
into a genuinely nonlinear dynamical system on the unit ball. A small
catalog of coefficient-matrix families realizes the classic bifurcations
(pitchfork, saddle-node, transcritical, Hopf) and an embedded chaotic
attractor; analysis tools locate fixed points, track branches over
parameter sweeps, measure limit cycles and Lyapunov spectra, and certify
that the generator stays completely positive along trajectories.
"""

from .core import (
    ADMISSIBILITY_TOL,
    BlochVector,
    CoeffMatrix,
    DensityMatrix2,
    Hamiltonian2,
    PsdReport,
    bloch_to_density,
    density_to_bloch,
    occupation_probability,
    psd_check,
)
from .errors import (
    AdmissibilityViolation,
    BlochDynError,
    DomainError,
    InvalidParams,
    NoCycleDetected,
    StepLimitExceeded,
    TraceViolation,
    UnsupportedKind,
)

__version__ = "0.1.0"

__all__ = [
    "ADMISSIBILITY_TOL",
    "AdmissibilityViolation",
    "BlochDynError",
    "BlochVector",
    "CoeffMatrix",
    "DensityMatrix2",
    "DomainError",
    "Hamiltonian2",
    "InvalidParams",
    "NoCycleDetected",
    "PsdReport",
    "StepLimitExceeded",
    "TraceViolation",
    "UnsupportedKind",
    "bloch_to_density",
    "density_to_bloch",
    "occupation_probability",
    "psd_check",
    "__version__",
]
