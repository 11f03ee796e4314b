"""Catalog of state-dependent coefficient matrices.

Each model maps a Bloch vector to the pair (h, H): the Hermitian 3x3
dissipator coefficient matrix and the 2x2 Hamiltonian. Making the rates
polynomial in the state embeds textbook normal forms into the master
equation:

* ``Pitchfork``     dz/dt = -z (t + z^2)
* ``SaddleNode``    dz/dt = -z (t + z^2) + b
* ``Transcritical`` dq/dt = -q (q - c)      with q = (z + 1)/2
* ``Hopf``          planar spiral/limit cycle in (z, x), radius sqrt(eps)
* ``Roessler``      a rescaled copy of the Roessler system inside the ball

``ConstantH`` keeps state-independent rates and serves as the linear
reference with a closed-form solution.

Parameter regions guarantee the diagonal rate functions stay nonnegative
on the relevant z interval (see ``nonneg_scan`` for a direct check).
Models with invalid parameters can be constructed and inspected, but
``evaluate`` refuses to produce coefficients for them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterator

from .core import BlochVector, CoeffMatrix, Hamiltonian2
from .errors import InvalidParams, UnsupportedKind

_ZERO_H = Hamiltonian2(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


@dataclass(frozen=True)
class Model:
    """Common behavior for catalog entries. Subclasses define the rates."""

    kind = "abstract"

    def __post_init__(self) -> None:
        object.__setattr__(self, "_report", self._check_params())

    def _check_params(self) -> ValidationReport:
        raise NotImplementedError

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        raise NotImplementedError

    def hamiltonian(self, v: BlochVector) -> Hamiltonian2:
        return _ZERO_H

    def validate(self) -> ValidationReport:
        return self._report  # type: ignore[attr-defined]

    def evaluate(self, v: BlochVector) -> tuple[CoeffMatrix, Hamiltonian2]:
        report: ValidationReport = self._report  # type: ignore[attr-defined]
        if not report.ok:
            raise InvalidParams("; ".join(report.violations))
        return self.coefficients(v), self.hamiltonian(v)

    def params(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def _finite(self) -> Iterator[str]:
        for name, value in self.params().items():
            if not math.isfinite(value):
                yield f"{name} must be finite, got {value!r}"


@dataclass(frozen=True)
class ConstantH(Model):
    """State-independent diagonal rates; the linear reference model."""

    h11: float
    h22: float
    h33: float = 0.0

    kind = "constant"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite())
        for name in ("h11", "h22", "h33"):
            if getattr(self, name) < 0.0:
                bad.append(f"{name} must be nonnegative")
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        return CoeffMatrix(self.h11, self.h22, self.h33, 0.0, 0.0, 0.0)


def _cubic_region(alpha: float, t: float) -> list[str]:
    # nonnegativity of alpha +- (alpha - t/2) z + z^2/2 on the real line
    bad = []
    if not 0.0 < alpha < 2.0:
        bad.append(f"alpha must lie in (0, 2), got {alpha!r}")
    elif abs(t - 2.0 * alpha) > math.sqrt(8.0 * alpha):
        bad.append(f"|t - 2 alpha| must not exceed sqrt(8 alpha), got t={t!r}")
    return bad


@dataclass(frozen=True)
class Pitchfork(Model):
    """Cubic rates producing dz/dt = -z (t + z^2); symmetric under z -> -z."""

    alpha: float
    t: float

    kind = "pitchfork"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite()) or _cubic_region(self.alpha, self.t)
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        z = v[2]
        slope = (self.alpha - 0.5 * self.t) * z
        curve = self.alpha + 0.5 * z * z
        return CoeffMatrix(curve + slope, curve - slope, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class SaddleNode(Model):
    """Pitchfork rates with a constant diagonal tilt b breaking the symmetry:
    dz/dt = -z (t + z^2) + b."""

    alpha: float
    t: float
    b: float

    kind = "saddle_node"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite()) or _cubic_region(self.alpha, self.t)
        if not bad and abs(self.b) > 2.0 * self.alpha:
            bad.append(f"|b| must not exceed 2 alpha, got b={self.b!r}")
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        z = v[2]
        slope = (self.alpha - 0.5 * self.t) * z
        curve = self.alpha + 0.5 * z * z
        half_b = 0.5 * self.b
        return CoeffMatrix(
            curve + slope + half_b, curve - slope - half_b, 0.0, 0.0, 0.0, 0.0
        )


@dataclass(frozen=True)
class Transcritical(Model):
    """Rates linear in the ground-state population q = (z + 1)/2, giving
    dq/dt = -q (q - c). The exchange of stability happens at c = 0."""

    alpha: float
    c: float

    kind = "transcritical"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite())
        if not bad:
            if self.alpha <= 0.0:
                bad.append(f"alpha must be positive, got {self.alpha!r}")
            elif not -self.alpha < self.c < 1.0:
                bad.append(f"c must lie in (-alpha, 1), got {self.c!r}")
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        q = 0.5 * (v[2] + 1.0)
        h11 = (self.c + self.alpha) * q
        h22 = self.alpha + (1.0 - self.c - self.alpha) * q
        return CoeffMatrix(h11, h22, 0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class Hopf(Model):
    """Planar rotation with radial gain eps: spiral decay for eps < 0 and a
    limit cycle of radius sqrt(eps) in the (z, x) plane for eps > 0. The
    rotation at rate b comes from a Hamiltonian about the y axis."""

    delta: float
    eps: float
    b: float

    kind = "hopf"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite())
        if not bad:
            if not 0.0 < self.delta < 1.0:
                bad.append(f"delta must lie in (0, 1), got {self.delta!r}")
            else:
                cap = min(0.5 * self.delta, 0.5 * self.delta * (2.0 - self.delta))
                if self.eps >= cap:
                    bad.append(f"eps must stay below {cap!r}, got {self.eps!r}")
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        x, _, z = v[0], v[1], v[2]
        r2 = x * x + z * z
        base = 0.5 * (self.delta - self.eps) + 0.5 * r2
        tilt = 0.5 * self.delta * z
        w = self.delta * x / 8.0
        return CoeffMatrix(base + tilt, base - tilt, 0.25 * r2, 0.5 * self.eps, -w, w)

    def hamiltonian(self, v: BlochVector) -> Hamiltonian2:
        # sign fixed so that the assembled field rotates (z, x) at rate +b:
        # dz gains -b x and dx gains +b z
        return Hamiltonian2(0.0, 0.0, complex(0.0, 0.5 * self.b))


@dataclass(frozen=True)
class Roessler(Model):
    """Roessler system embedded in the ball via x -> eps + X/m, y -> Y/m,
    z -> Z/m and a time rescale by m. Rates grow like m^2, so h33 is padded
    to keep the matrix positive semidefinite along the attractor; rescaling
    h33 (``h33_scale``) changes the rate gamma inside the off-diagonal
    entries consistently and leaves the assembled field unchanged."""

    a: float
    b: float
    c: float
    m: float
    eps: float
    h33_scale: float = 1.0

    kind = "roessler"

    def _check_params(self) -> ValidationReport:
        bad = list(self._finite())
        if not bad:
            if self.m <= 0.0:
                bad.append(f"m must be positive, got {self.m!r}")
            if self.c <= 0.0:
                bad.append(f"c must be positive, got {self.c!r}")
            if self.h33_scale <= 0.0:
                bad.append(f"h33_scale must be positive, got {self.h33_scale!r}")
        return ValidationReport(not bad, tuple(bad))

    def coefficients(self, v: BlochVector) -> CoeffMatrix:
        x, y, z = v[0], v[1], v[2]
        m = self.m
        scale = m * (self.c + m * self.eps)
        tilt = self.b + (m * x) * (m * z)
        h33 = self.h33_scale * 0.375 * scale
        gamma = 0.5 * scale + 2.0 * h33
        re = (-m * y - m * z + gamma * x) / 4.0
        im = (m * (x - self.eps) + (self.a * m + gamma) * y) / 4.0
        return CoeffMatrix(
            0.5 * (scale + tilt),
            0.5 * (scale - tilt),
            h33,
            0.0,
            complex(-re, im),
            complex(re, im),
        )


MODEL_KINDS: dict[str, type[Model]] = {
    cls.kind: cls
    for cls in (ConstantH, Pitchfork, SaddleNode, Transcritical, Hopf, Roessler)
}

ONE_DIMENSIONAL_KINDS = ("pitchfork", "saddle_node", "transcritical")


def evaluate(model: Model, v: BlochVector) -> tuple[CoeffMatrix, Hamiltonian2]:
    """Coefficient matrix and Hamiltonian of ``model`` at state ``v``."""
    return model.evaluate(v)


def validate_params(model: Model) -> ValidationReport:
    """Report whether the parameters lie in the model's admissible region."""
    return model.validate()


def nonneg_scan(model: Model, grid_n: int = 1001) -> float:
    """Minimum of min(h11(z), h22(z)) over a uniform z grid on [-1, 1].

    Only defined for the kinds whose rates depend on z alone; a result
    >= 0 certifies the diagonal rate functions directly on the grid.
    """
    if model.kind not in ONE_DIMENSIONAL_KINDS:
        raise UnsupportedKind(f"nonneg_scan needs a 1-d kind, got {model.kind!r}")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    worst = math.inf
    for i in range(grid_n):
        z = -1.0 + 2.0 * i / (grid_n - 1)
        h = model.coefficients(BlochVector(0.0, 0.0, z))
        worst = min(worst, h.h11, h.h22)
    return worst


def model_from_config(kind: str, params: dict[str, float]) -> Model:
    """Build a model from its kind name and parameter mapping."""
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise UnsupportedKind(
            f"unknown model kind {kind!r}; expected one of {sorted(MODEL_KINDS)}"
        ) from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for {kind!r}: {exc}") from None
