"""Assembly of the Bloch-coordinate equations of motion.

For a two-level system with Hamiltonian H and dissipator coefficients h
(basis sigma_-, sigma_+, sigma_z, hbar = 1) the master equation reads, in
Bloch coordinates with gamma = (h11 + h22 + 4 h33)/2:

    dz = (h11 - h22) - (h11 + h22) z + Re[h23 + h13] x + Im[h23 - h13] y
         - 2 Im[H10] x + 2 Re[H10] y
    dx = 2 Re[h23 - h13] + Re[h23 + h13] z + (Re[h12] - gamma) x
         - Im[h12] y + 2 Im[H10] z - (H00 - H11) y
    dy = 2 Im[h23 + h13] + Im[h23 - h13] z - Im[h12] x
         - (Re[h12] + gamma) y - 2 Re[H10] z + (H00 - H11) x

State dependence of h and H makes the flow nonlinear. ``normal_form_rhs``
provides an independent, hand-reduced expression of the same field for
each catalog model; ``consistency_check`` measures the deviation between
the two routes and is the primary guard against transcription mistakes in
either one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import BlochVector, CoeffMatrix, Hamiltonian2
from .errors import InvalidParams, UnsupportedKind
from .models import (
    Hopf,
    Model,
    Pitchfork,
    Roessler,
    SaddleNode,
    Transcritical,
)

Vec3 = tuple[float, float, float]


def assemble_rhs(h: CoeffMatrix, ham: Hamiltonian2, v: BlochVector) -> Vec3:
    """Time derivative (dx, dy, dz) of the Bloch vector."""
    x, y, z = v[0], v[1], v[2]
    gamma = 0.5 * (h.h11 + h.h22 + 4.0 * h.h33)
    p = h.h23 + h.h13
    q = h.h23 - h.h13
    re12 = h.h12.real
    im12 = h.h12.imag
    split = ham.h00 - ham.h11
    re10 = ham.h10.real
    im10 = ham.h10.imag
    dz = (
        (h.h11 - h.h22)
        - (h.h11 + h.h22) * z
        + p.real * x
        + q.imag * y
        - 2.0 * im10 * x
        + 2.0 * re10 * y
    )
    dx = (
        2.0 * q.real
        + p.real * z
        + (re12 - gamma) * x
        - im12 * y
        + 2.0 * im10 * z
        - split * y
    )
    dy = (
        2.0 * p.imag
        + q.imag * z
        - im12 * x
        - (re12 + gamma) * y
        - 2.0 * re10 * z
        + split * x
    )
    return (dx, dy, dz)


def field(model: Model) -> Callable[[BlochVector], Vec3]:
    """Vector field closure for a validated model."""
    report = model.validate()
    if not report.ok:
        raise InvalidParams("; ".join(report.violations))
    coefficients = model.coefficients
    hamiltonian = model.hamiltonian
    return lambda v: assemble_rhs(coefficients(v), hamiltonian(v), v)


def normal_form_rhs(model: Model, v: BlochVector) -> Vec3:
    """Hand-reduced field for catalog models; independent of the assembler.

    The 1-d kinds carry their transverse relaxation -gamma(z) (x, y)
    explicitly so the comparison covers all three components.
    """
    x, y, z = v[0], v[1], v[2]
    if isinstance(model, SaddleNode):
        # ordering matters: SaddleNode subclasses nothing but shares fields
        gamma = model.alpha + 0.5 * z * z
        return (-gamma * x, -gamma * y, -z * (model.t + z * z) + model.b)
    if isinstance(model, Pitchfork):
        gamma = model.alpha + 0.5 * z * z
        return (-gamma * x, -gamma * y, -z * (model.t + z * z))
    if isinstance(model, Transcritical):
        q = 0.5 * (z + 1.0)
        gamma = 0.5 * (model.alpha + q)
        return (-gamma * x, -gamma * y, 2.0 * model.c * q - 2.0 * q * q)
    if isinstance(model, Hopf):
        r2 = x * x + z * z
        return (
            model.eps * x + model.b * z - x * r2,
            -(0.5 * model.delta + r2) * y,
            model.eps * z - model.b * x - z * r2,
        )
    if isinstance(model, Roessler):
        m = model.m
        return (
            -m * (y + z),
            m * (x - model.eps + model.a * y),
            model.b - (model.c - m * (x - model.eps)) * m * z,
        )
    raise UnsupportedKind(f"no normal form for kind {model.kind!r}")


@dataclass(frozen=True)
class ConsistencyReport:
    max_dev: float
    n_samples: int
    seed: int


def sample_ball(n: int, seed: int) -> np.ndarray:
    """n points uniform over the closed unit ball, by rejection from the cube."""
    rng = np.random.default_rng(seed)
    out = np.empty((n, 3))
    k = 0
    while k < n:
        cand = rng.uniform(-1.0, 1.0, size=(max(64, 2 * (n - k)), 3))
        good = cand[(cand * cand).sum(axis=1) <= 1.0]
        take = min(len(good), n - k)
        out[k : k + take] = good[:take]
        k += take
    return out


def sample_disk_y0(n: int, seed: int) -> np.ndarray:
    """n points uniform over the unit disk in the y = 0 plane."""
    rng = np.random.default_rng(seed)
    out = np.zeros((n, 3))
    k = 0
    while k < n:
        cand = rng.uniform(-1.0, 1.0, size=(max(64, 2 * (n - k)), 2))
        good = cand[(cand * cand).sum(axis=1) <= 1.0]
        take = min(len(good), n - k)
        out[k : k + take, 0] = good[:take, 0]
        out[k : k + take, 2] = good[:take, 1]
        k += take
    return out


def consistency_check(
    model: Model, n_samples: int = 10_000, seed: int = 0
) -> ConsistencyReport:
    """Largest componentwise gap between assembled and normal-form fields.

    Samples the unit ball, except for the planar limit-cycle model whose
    reduction lives in the y = 0 plane. ConstantH has no normal form.
    """
    normal_form_rhs(model, BlochVector(0.0, 0.0, 0.0))  # raises UnsupportedKind
    f = field(model)
    if isinstance(model, Hopf):
        pts = sample_disk_y0(n_samples, seed)
    else:
        pts = sample_ball(n_samples, seed)
    worst = 0.0
    for p in pts:
        v = BlochVector(p[0], p[1], p[2])
        a = f(v)
        b = normal_form_rhs(model, v)
        dev = max(abs(a[0] - b[0]), abs(a[1] - b[1]), abs(a[2] - b[2]))
        if dev > worst:
            worst = dev
    return ConsistencyReport(max_dev=worst, n_samples=n_samples, seed=seed)
