"""Time integration on the Bloch ball.

Two schemes are provided: a classical fixed-step RK4 and an embedded
Dormand-Prince 4(5) pair with proportional-integral step control
(safety 0.9, growth clamped to [0.2, 5]). Both record the state at every
accepted step. Accepted states are required to stay inside the closed
unit ball up to a small slack; the integrator never projects a state back
in, so an escaping trajectory is an error, not a silent repair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .core import ADMISSIBILITY_TOL, BlochVector
from .dynamics import Vec3, field
from .errors import AdmissibilityViolation, StepLimitExceeded
from .models import Model

# accepted states may overshoot the ball by this much before we abort
ESCAPE_TOL = 10.0 * ADMISSIBILITY_TOL

_METHODS = ("rk4", "rk45")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk45"
    dt: float = 1e-3
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    max_steps: int = 10_000_000
    t_end: float = 10.0

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")


@dataclass(frozen=True)
class Trajectory:
    """Accepted integration steps: times (n,) and states (n, 3) as (x, y, z)."""

    times: np.ndarray
    states: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def final_state(self) -> BlochVector:
        return BlochVector(*self.states[-1])

    def max_norm(self) -> float:
        return float(np.sqrt((self.states * self.states).sum(axis=1).max()))


@dataclass(frozen=True)
class FluxReport:
    max_flux: float
    n_samples: int
    seed: int


def _check_inside(v: Vec3, t: float) -> None:
    n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
    limit = 1.0 + ESCAPE_TOL
    if n2 > limit * limit:
        raise AdmissibilityViolation(
            f"state left the unit ball at t={t!r}: |v| = {math.sqrt(n2)!r}"
        )


def _run_rk4(f, v, cfg, check):
    times = [0.0]
    states = [v]
    t = 0.0
    steps = 0
    while t < cfg.t_end:
        if steps >= cfg.max_steps:
            raise StepLimitExceeded(f"needed more than {cfg.max_steps} steps")
        h = cfg.dt
        last = t + h >= cfg.t_end
        if last:
            h = cfg.t_end - t
        x, y, z = v
        k1 = f(v)
        k2 = f((x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2]))
        k3 = f((x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2]))
        k4 = f((x + h * k3[0], y + h * k3[1], z + h * k3[2]))
        v = (
            x + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            z + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        )
        t = cfg.t_end if last else t + h
        if check:
            _check_inside(v, t)
        times.append(t)
        states.append(v)
        steps += 1
    return times, states


# Dormand-Prince 4(5) tableau
_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
# difference between the 5th and the embedded 4th order weights
_E = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


def _error_norm(err, v_old, v_new, cfg):
    acc = 0.0
    for i in range(3):
        scale = cfg.abs_tol + cfg.rel_tol * max(abs(v_old[i]), abs(v_new[i]))
        r = err[i] / scale
        acc += r * r
    return math.sqrt(acc / 3.0)


def _initial_step(f, v, cfg):
    f0 = f(v)
    d0 = _error_norm(v, v, v, cfg) or 1.0
    d1 = _error_norm(f0, v, v, cfg)
    h0 = 0.01 * d0 / d1 if d1 > 1e-10 else 1e-6
    h0 = min(h0, cfg.t_end)
    probe = (v[0] + h0 * f0[0], v[1] + h0 * f0[1], v[2] + h0 * f0[2])
    f1 = f(probe)
    diff = (f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2])
    d2 = _error_norm(diff, v, v, cfg) / h0
    d_max = max(d1, d2)
    h1 = (0.01 / d_max) ** 0.2 if d_max > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, cfg.t_end)


def _run_rk45(f, v, cfg, check):
    times = [0.0]
    states = [v]
    t = 0.0
    h = _initial_step(f, v, cfg)
    k1 = f(v)
    err_prev = 1e-4
    attempts = 0
    while t < cfg.t_end:
        if attempts >= cfg.max_steps:
            raise StepLimitExceeded(f"needed more than {cfg.max_steps} step attempts")
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepLimitExceeded(f"step size collapsed to {h!r} at t={t!r}")
        last = t + h >= cfg.t_end
        if last:
            h = cfg.t_end - t
        attempts += 1
        ks = [k1]
        for row in _A[:-1]:
            vi = list(v)
            for j, a in enumerate(row):
                ha = h * a
                vi[0] += ha * ks[j][0]
                vi[1] += ha * ks[j][1]
                vi[2] += ha * ks[j][2]
            ks.append(f((vi[0], vi[1], vi[2])))
        v_new = list(v)
        for j, b in enumerate(_A[-1]):
            hb = h * b
            v_new[0] += hb * ks[j][0]
            v_new[1] += hb * ks[j][1]
            v_new[2] += hb * ks[j][2]
        v_new = (v_new[0], v_new[1], v_new[2])
        k_new = f(v_new)
        ks.append(k_new)
        err = [0.0, 0.0, 0.0]
        for j, e in enumerate(_E):
            he = h * e
            err[0] += he * ks[j][0]
            err[1] += he * ks[j][1]
            err[2] += he * ks[j][2]
        err_norm = _error_norm(err, v, v_new, cfg)
        if err_norm <= 1.0:
            t = cfg.t_end if last else t + h
            v = v_new
            k1 = k_new  # first-same-as-last
            if check:
                _check_inside(v, t)
            times.append(t)
            states.append(v)
            if err_norm == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = _SAFETY * err_norm**-_PI_ALPHA * err_prev**_PI_BETA
            err_prev = max(err_norm, 1e-10)
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
        else:
            h *= min(1.0, max(_MIN_FACTOR, _SAFETY * err_norm**-0.2))
    return times, states


def integrate_field(
    f: Callable[[Vec3], Vec3],
    v0: BlochVector,
    cfg: IntegratorConfig,
    check_admissible: bool = True,
) -> Trajectory:
    """Integrate an arbitrary field on Bloch coordinates from t = 0."""
    v = (float(v0[0]), float(v0[1]), float(v0[2]))
    if check_admissible:
        _check_inside(v, 0.0)
    runner = _run_rk4 if cfg.method == "rk4" else _run_rk45
    times, states = runner(f, v, cfg, check_admissible)
    return Trajectory(times=np.array(times), states=np.array(states))


def integrate(model: Model, v0: BlochVector, cfg: IntegratorConfig) -> Trajectory:
    """Integrate a catalog model; validates parameters and the initial state."""
    return integrate_field(field(model), v0, cfg, check_admissible=True)


def closed_form_1d(
    h11: float,
    h22: float,
    h33: float,
    z0: float,
    s0: complex,
    times: Iterable[float],
) -> tuple[np.ndarray, np.ndarray]:
    """Exact solution for constant diagonal rates.

    Returns (z(t), s(t)) with s = x + iy. The population relaxes toward
    (h11 - h22)/(h11 + h22) at rate h11 + h22 and the coherence decays at
    gamma = (h11 + h22 + 4 h33)/2; with h11 + h22 = 0 the population is
    frozen at z0.
    """
    t = np.asarray(list(times) if not isinstance(times, np.ndarray) else times, float)
    total = h11 + h22
    gamma = 0.5 * (total + 4.0 * h33)
    if total == 0.0:
        z = np.full_like(t, z0)
    else:
        zeq = (h11 - h22) / total
        z = zeq + (z0 - zeq) * np.exp(-total * t)
    s = s0 * np.exp(-gamma * t)
    return z, s


def sample_boundary_flux(model: Model, n_samples: int = 1000, seed: int = 0) -> FluxReport:
    """Largest outward flux v . F(v) over random points of the unit sphere.

    A strictly negative maximum certifies, sample-wise, that the field
    points into the ball everywhere on the boundary.
    """
    f = field(model)
    rng = np.random.default_rng(seed)
    worst = -math.inf
    count = 0
    while count < n_samples:
        g = rng.normal(size=3)
        norm = math.sqrt(g @ g)
        if norm < 1e-12:
            continue
        count += 1
        v = BlochVector(g[0] / norm, g[1] / norm, g[2] / norm)
        dx, dy, dz = f(v)
        worst = max(worst, v.x * dx + v.y * dy + v.z * dz)
    return FluxReport(max_flux=worst, n_samples=n_samples, seed=seed)
