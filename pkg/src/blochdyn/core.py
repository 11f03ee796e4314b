"""State and coefficient containers for a dissipative two-level system.

A qubit density matrix is parametrized by the Bloch vector v = (x, y, z):

    rho = (1/2) (I + x sigma_x + y sigma_y + z sigma_z)
        = (1/2) [[1 + z, x - iy], [x + iy, 1 - z]]

rho is a physical state iff v lies in the closed unit ball. The dissipative
part of the master equation is generated by a Hermitian 3x3 coefficient
matrix h over the operator basis (sigma_-, sigma_+, sigma_z); the generator
is completely positive iff h is positive semidefinite. ``psd_check``
certifies this through the seven principal minors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import AdmissibilityViolation, TraceViolation

# slack used everywhere a state is required to lie in the closed unit ball
ADMISSIBILITY_TOL = 1e-9

# diagonal of a density matrix must sum to one within this bound
TRACE_TOL = 1e-12


class BlochVector(NamedTuple):
    """Point in Bloch coordinates. Admissible states satisfy |v| <= 1.

    The container itself does not enforce admissibility: finite-difference
    stencils and field plots legitimately probe points slightly outside the
    ball. Operations that require a physical state check explicitly.
    """

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_admissible(self, tol: float = ADMISSIBILITY_TOL) -> bool:
        return self.norm() <= 1.0 + tol


@dataclass(frozen=True)
class DensityMatrix2:
    """Hermitian 2x2 density matrix stored as (rho00, rho11, rho01).

    The lower off-diagonal entry is implied: rho10 = conj(rho01).
    Construction rejects diagonals that do not sum to one within 1e-12.
    """

    rho00: float
    rho11: float
    rho01: complex

    def __post_init__(self) -> None:
        trace = self.rho00 + self.rho11
        if abs(trace - 1.0) > TRACE_TOL:
            raise TraceViolation(f"trace(rho) = {trace!r}, expected 1")


class CoeffMatrix(NamedTuple):
    """Hermitian 3x3 coefficient matrix of the dissipator.

    Diagonal entries are real; only the upper triangle is stored,
    the lower one being the conjugate.
    """

    h11: float
    h22: float
    h33: float
    h12: complex
    h13: complex
    h23: complex

    def gamma(self) -> float:
        """Transverse relaxation rate (h11 + h22 + 4 h33) / 2."""
        return 0.5 * (self.h11 + self.h22 + 4.0 * self.h33)


class Hamiltonian2(NamedTuple):
    """2x2 Hermitian Hamiltonian: real diagonal (h00, h11), complex h10."""

    h00: float
    h11: float
    h10: complex


@dataclass(frozen=True)
class PsdReport:
    """Positive-semidefiniteness certificate for a coefficient matrix.

    ``minors`` lists, in order: h11, h22, h33, the three 2x2 principal
    minors h11 h22 - |h12|^2, h11 h33 - |h13|^2, h22 h33 - |h23|^2, and the
    determinant in the restricted expansion
    h11 h22 h33 - h22 |h13|^2 - h11 |h23|^2. That expansion drops the
    h12 cross terms, so ``det_full`` additionally reports the complete
    3x3 determinant; the two agree whenever h12 = 0.
    """

    minors: tuple[float, float, float, float, float, float, float]
    ok: bool
    det_full: float


def bloch_to_density(v: BlochVector) -> DensityMatrix2:
    """Map Bloch coordinates to the density matrix.

    Admissibility is not required here; callers may probe out-of-ball
    points (the result is then not a physical state).
    """
    x, y, z = v
    return DensityMatrix2(
        rho00=(1.0 + z) / 2.0,
        rho11=(1.0 - z) / 2.0,
        rho01=complex(x / 2.0, -y / 2.0),
    )


def density_to_bloch(rho: DensityMatrix2) -> BlochVector:
    """Invert the Bloch parametrization. Raises TraceViolation off-trace."""
    trace = rho.rho00 + rho.rho11
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceViolation(f"trace(rho) = {trace!r}, expected 1")
    return BlochVector(
        x=2.0 * rho.rho01.real,
        y=-2.0 * rho.rho01.imag,
        z=rho.rho00 - rho.rho11,
    )


def occupation_probability(v: BlochVector, level: int = 0) -> float:
    """Occupation of basis level 0 or 1: (1 + z)/2 resp. (1 - z)/2.

    Requires an admissible state; the result is clamped to [0, 1] so that
    states sitting on the ball boundary up to roundoff stay physical.
    """
    if level not in (0, 1):
        raise ValueError(f"level must be 0 or 1, got {level}")
    vec = BlochVector(*v)
    if not vec.is_admissible():
        raise AdmissibilityViolation(f"|v| = {vec.norm()!r} exceeds 1")
    sign = 1.0 if level == 0 else -1.0
    p = (1.0 + sign * vec.z) / 2.0
    return min(1.0, max(0.0, p))


def psd_check(h: CoeffMatrix, tol: float = 1e-9) -> PsdReport:
    """Certify positive semidefiniteness via the seven principal minors.

    ``ok`` is true when every listed quantity is >= -tol. The determinant
    entry uses the restricted expansion described in PsdReport; the full
    determinant is computed alongside so a discrepancy (possible only for
    h12 != 0) is always visible to the caller.
    """
    a12 = abs(h.h12)
    a13 = abs(h.h13)
    a23 = abs(h.h23)
    det_restricted = (
        h.h11 * h.h22 * h.h33 - h.h22 * a13 * a13 - h.h11 * a23 * a23
    )
    cross = 2.0 * (h.h12 * h.h23 * h.h13.conjugate()).real
    det_full = det_restricted - h.h33 * a12 * a12 + cross
    minors = (
        h.h11,
        h.h22,
        h.h33,
        h.h11 * h.h22 - a12 * a12,
        h.h11 * h.h33 - a13 * a13,
        h.h22 * h.h33 - a23 * a23,
        det_restricted,
    )
    return PsdReport(minors=minors, ok=min(minors) >= -tol, det_full=det_full)
