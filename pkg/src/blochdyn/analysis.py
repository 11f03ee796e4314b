"""Phase-space diagnostics on the Bloch ball.

The catalog models are low-dimensional enough that direct methods work
well: fixed points come from damped-free Newton iteration seeded on a
lattice, stability from the eigenvalues of a central-difference Jacobian,
bifurcations from tracking those points across a parameter sweep, periodic
orbits from a Poincare section, and Lyapunov exponents from the classical
tangent-space renormalization procedure.

A practical wrinkle: at a parameter value that sits exactly on a
bifurcation, Newton converges only linearly into the multiple root and
stalls at a distance of roughly sqrt(newton_tol), so the computed
eigenvalue there is zero only to about that same scale. Fixed-point
classification therefore uses a marginal band wide enough (1e-5 by
default) to absorb that stall, and sweeps treat values carrying a
Marginal point as degenerate: the event is attached to the step entering
the degenerate run and classified from the two flanking regular values.
Branches that appear or vanish within 1e-3 of the unit sphere are ignored
by the event classifier, since those enter or leave through the boundary
of the admissible region rather than through a local bifurcation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .core import ADMISSIBILITY_TOL, BlochVector
from .dynamics import Vec3, field
from .errors import DomainError, NoCycleDetected
from .models import Model, model_from_config
from .solver import IntegratorConfig, integrate_field

# died/born branches this close to the unit sphere are boundary crossings
BOUNDARY_EXIT_TOL = 1e-3

ATTRACTING = ("StableNode", "StableSpiral")

_EVENT_KINDS = ("Pitchfork", "SaddleNode", "Transcritical", "Hopf", "Unclassified")


@dataclass(frozen=True)
class FixedPoint:
    location: BlochVector
    eigenvalues: tuple[complex, complex, complex]
    classification: str
    residual: float


@dataclass(frozen=True)
class BifurcationEvent:
    kind: str
    param_bracket: tuple[float, float]
    n_before: int
    n_after: int
    stability_exchange: bool
    detail: str


@dataclass(frozen=True)
class SweepResult:
    param_name: str
    values: tuple[float, ...]
    points: tuple[tuple[FixedPoint, ...], ...]
    branch_ids: tuple[tuple[int, ...], ...]
    events: tuple[BifurcationEvent, ...]


@dataclass(frozen=True)
class LimitCycleResult:
    period: float
    radius_mean: float
    radius_std: float
    n_crossings: int
    crossing_times: tuple[float, ...]


@dataclass(frozen=True)
class LyapunovSpectrum:
    exponents: tuple[float, ...]
    total_time: float
    transient_discard: float
    renorm_interval: float
    mean_divergence: float


@dataclass(frozen=True)
class FieldGrid:
    plane: str
    offset: float
    axes: tuple[str, str]
    a: np.ndarray
    b: np.ndarray
    fa: np.ndarray
    fb: np.ndarray
    inside: np.ndarray


def jacobian(
    f: Callable[[Vec3], Vec3], v: Sequence[float], rel_step: float = 1e-6
) -> np.ndarray:
    """Central-difference Jacobian of a field at v, columns in (x, y, z)."""
    base = (float(v[0]), float(v[1]), float(v[2]))
    J = np.empty((3, 3))
    for j in range(3):
        h = rel_step * max(1.0, abs(base[j]))
        up = list(base)
        up[j] += h
        dn = list(base)
        dn[j] -= h
        fu = f((up[0], up[1], up[2]))
        fd = f((dn[0], dn[1], dn[2]))
        for i in range(3):
            J[i, j] = (fu[i] - fd[i]) / (2.0 * h)
    return J


def classify_eigenvalues(
    eigenvalues: Sequence[complex], tol: float | None = None
) -> str:
    """Label a linearization by the signs of the eigenvalue real parts."""
    eigs = [complex(e) for e in eigenvalues]
    radius = max((abs(e) for e in eigs), default=0.0)
    if tol is None:
        tol = 1e-8 * max(1.0, radius)
    reals = [e.real for e in eigs]
    if any(abs(r) <= tol for r in reals):
        return "Marginal"
    spiral = any(abs(e.imag) > tol for e in eigs)
    if all(r < 0.0 for r in reals):
        return "StableSpiral" if spiral else "StableNode"
    if all(r > 0.0 for r in reals):
        return "UnstableSpiral" if spiral else "UnstableNode"
    if any(abs(e.imag) > tol and e.real > 0.0 for e in eigs):
        return "UnstableSpiral"
    return "Saddle"


def _sorted_eigs(J: np.ndarray) -> tuple[complex, complex, complex]:
    eigs = sorted(np.linalg.eigvals(J), key=lambda e: (-e.real, e.imag))
    return (complex(eigs[0]), complex(eigs[1]), complex(eigs[2]))


def _norm3(v: Sequence[float]) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def find_fixed_points(
    model: Model,
    grid_n: int = 5,
    newton_tol: float = 1e-12,
    max_iter: int = 50,
    dedup_tol: float = 1e-6,
    marginal_tol: float = 1e-5,
) -> list[FixedPoint]:
    """Newton search for admissible zeros of the model field.

    Seeds a grid_n^3 lattice restricted to the unit ball, iterates Newton
    with a finite-difference Jacobian, keeps converged interior points,
    and classifies each by its eigenvalues. ``marginal_tol`` sets the
    width of the Marginal band relative to the spectral radius; keep it
    no smaller than sqrt(newton_tol), which is where Newton stalls on a
    multiple root.
    """
    f = field(model)
    axis = np.linspace(-1.0, 1.0, grid_n)
    candidates: list[tuple[float, float, float, float]] = []
    for sx in axis:
        for sy in axis:
            for sz in axis:
                if sx * sx + sy * sy + sz * sz > 1.0 + 1e-12:
                    continue
                v = (float(sx), float(sy), float(sz))
                ok = False
                res = _norm3(f(v))
                for _ in range(max_iter):
                    if res < newton_tol:
                        ok = True
                        break
                    try:
                        step = np.linalg.solve(jacobian(f, v), f(v))
                    except np.linalg.LinAlgError:
                        break
                    v = (v[0] - step[0], v[1] - step[1], v[2] - step[2])
                    if not all(math.isfinite(c) for c in v) or _norm3(v) > 4.0:
                        break
                    res = _norm3(f(v))
                else:
                    ok = res < newton_tol
                if ok and _norm3(v) <= 1.0 + ADMISSIBILITY_TOL:
                    candidates.append((v[2], v[0], v[1], res))

    points: list[FixedPoint] = []
    for z, x, y, res in sorted(candidates):
        if any(
            _norm3((x - p.location.x, y - p.location.y, z - p.location.z)) <= dedup_tol
            for p in points
        ):
            continue
        loc = BlochVector(x, y, z)
        eigs = _sorted_eigs(jacobian(f, loc))
        radius = max(abs(e) for e in eigs)
        label = classify_eigenvalues(eigs, tol=marginal_tol * max(1.0, radius))
        points.append(FixedPoint(loc, eigs, label, res))
    return points


def _match(
    before: Sequence[FixedPoint], after: Sequence[FixedPoint]
) -> tuple[list[tuple[FixedPoint, FixedPoint]], list[FixedPoint], list[FixedPoint]]:
    """Greedy nearest-neighbor pairing between two fixed-point sets."""
    ranked = sorted(
        (
            (
                _norm3(
                    (
                        p.location.x - q.location.x,
                        p.location.y - q.location.y,
                        p.location.z - q.location.z,
                    )
                ),
                i,
                j,
            )
            for i, p in enumerate(before)
            for j, q in enumerate(after)
        )
    )
    used_b: set[int] = set()
    used_a: set[int] = set()
    pairs = []
    for _, i, j in ranked:
        if i in used_b or j in used_a:
            continue
        used_b.add(i)
        used_a.add(j)
        pairs.append((before[i], after[j]))
    died = [p for i, p in enumerate(before) if i not in used_b]
    born = [q for j, q in enumerate(after) if j not in used_a]
    return pairs, died, born


def _interior(points: Sequence[FixedPoint]) -> list[FixedPoint]:
    return [p for p in points if abs(1.0 - p.location.norm()) > BOUNDARY_EXIT_TOL]


def _is_attracting(fp: FixedPoint) -> bool:
    return fp.classification in ATTRACTING


def _complex_pair_real(fp: FixedPoint) -> float | None:
    reals = [e.real for e in fp.eigenvalues if abs(e.imag) > 1e-9]
    return max(reals) if reals else None


def _symmetric_pair(
    pair: Sequence[FixedPoint], anchors: Sequence[FixedPoint]
) -> bool:
    p, q = pair
    sep = _norm3(
        (
            p.location.x - q.location.x,
            p.location.y - q.location.y,
            p.location.z - q.location.z,
        )
    )
    mid = (
        0.5 * (p.location.x + q.location.x),
        0.5 * (p.location.y + q.location.y),
        0.5 * (p.location.z + q.location.z),
    )
    return any(
        _norm3((mid[0] - a.location.x, mid[1] - a.location.y, mid[2] - a.location.z))
        <= max(0.25 * sep, 1e-6)
        for a in anchors
    )


def _classify_event(
    before: Sequence[FixedPoint],
    after: Sequence[FixedPoint],
    bracket: tuple[float, float],
) -> BifurcationEvent | None:
    pairs, died, born = _match(before, after)
    flipped = [(a, b) for a, b in pairs if a.classification != b.classification]
    died_in = _interior(died)
    born_in = _interior(born)
    if not died_in and not born_in and not flipped:
        return None  # only boundary traffic; not a local bifurcation

    kind = "Unclassified"
    detail = (
        f"{len(died)} branch(es) vanished, {len(born)} appeared, "
        f"{len(flipped)} changed stability"
    )
    same_pair_died = len(died_in) == 2 and died_in[0].classification == died_in[1].classification
    same_pair_born = len(born_in) == 2 and born_in[0].classification == born_in[1].classification
    if same_pair_died and flipped and _symmetric_pair(died_in, [a for a, _ in flipped]):
        kind = "Pitchfork"
        detail = "symmetric branch pair vanished around a branch that changed stability"
    elif same_pair_born and flipped and _symmetric_pair(born_in, [b for _, b in flipped]):
        kind = "Pitchfork"
        detail = "symmetric branch pair appeared around a branch that changed stability"
    elif (
        len(died_in) == 2
        and not born_in
        and sum(map(_is_attracting, died_in)) == 1
    ):
        kind = "SaddleNode"
        detail = "a stable and an unstable branch collided and vanished"
    elif (
        len(born_in) == 2
        and not died_in
        and sum(map(_is_attracting, born_in)) == 1
    ):
        kind = "SaddleNode"
        detail = "a stable and an unstable branch pair appeared"
    elif len(died_in) + len(born_in) == 1 and flipped:
        kind = "Transcritical"
        detail = "branch count changed by one while another branch swapped stability"
    elif (
        not died_in
        and not born_in
        and len(flipped) >= 2
        and any(_is_attracting(a) != _is_attracting(b) for a, b in flipped)
        and any(
            _is_attracting(a2) != _is_attracting(b2)
            and _is_attracting(a2) != _is_attracting(flipped[0][0])
            for a2, b2 in flipped[1:]
        )
    ):
        kind = "Transcritical"
        detail = "two branches exchanged stability"
    elif not died_in and not born_in:
        for a, b in pairs:
            ra, rb = _complex_pair_real(a), _complex_pair_real(b)
            if ra is not None and rb is not None and (ra < 0.0 < rb or rb < 0.0 < ra):
                kind = "Hopf"
                detail = "a complex eigenvalue pair crossed the imaginary axis"
                break
    return BifurcationEvent(
        kind=kind,
        param_bracket=bracket,
        n_before=len(before),
        n_after=len(after),
        stability_exchange=bool(flipped),
        detail=detail,
    )


def sweep(
    kind: str,
    base_params: dict[str, float],
    param_name: str,
    values: Sequence[float],
    grid_n: int = 5,
) -> SweepResult:
    """Track fixed-point branches while one parameter varies.

    Bifurcation events are reported between consecutive sweep values.
    When a value lands exactly on a bifurcation (a Marginal point shows
    up), the event bracket is the single step entering that value and
    the classification compares the nearest regular values on each side.
    """
    vals = [float(v) for v in values]
    per_value: list[list[FixedPoint]] = []
    for v in vals:
        model = model_from_config(kind, {**base_params, param_name: v})
        per_value.append(find_fixed_points(model, grid_n=grid_n))

    # branch continuation ids via greedy matching between adjacent values
    next_id = 0
    branch_ids: list[tuple[int, ...]] = []
    prev_ids: dict[int, int] = {}
    for step, pts in enumerate(per_value):
        ids = [-1] * len(pts)
        if step > 0:
            prev = per_value[step - 1]
            pairs, _, _ = _match(prev, pts)
            for a, b in pairs:
                ids[pts.index(b)] = prev_ids[prev.index(a)]
        for i in range(len(ids)):
            if ids[i] < 0:
                ids[i] = next_id
                next_id += 1
        prev_ids = dict(enumerate(ids))
        branch_ids.append(tuple(ids))

    degenerate = [
        any(fp.classification == "Marginal" for fp in pts) for pts in per_value
    ]
    events: list[BifurcationEvent] = []
    regular = [i for i in range(len(vals)) if not degenerate[i]]
    for a, b in zip(regular, regular[1:]):
        ev = _classify_event(
            per_value[a], per_value[b], (vals[a], vals[a + 1])
        )
        if ev is not None:
            events.append(ev)

    return SweepResult(
        param_name=param_name,
        values=tuple(vals),
        points=tuple(tuple(pts) for pts in per_value),
        branch_ids=tuple(branch_ids),
        events=tuple(events),
    )


def saddle_node_critical_b(t: float) -> float:
    """Tilt at which the stable/unstable pair of -z (t + z^2) + b collides.

    Requires t < 0; for t >= 0 the cubic is monotone and never folds.
    """
    if t >= 0.0:
        raise DomainError(f"the fold exists only for t < 0, got t={t!r}")
    return 2.0 * (abs(t) / 3.0) ** 1.5


def _hermite(p0: float, m0: float, p1: float, m1: float, h: float, s: float) -> float:
    s2 = s * s
    s3 = s2 * s
    return (
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
        + (s3 - 2.0 * s2 + s) * h * m0
        + (-2.0 * s3 + 3.0 * s2) * p1
        + (s3 - s2) * h * m1
    )


def limit_cycle(
    model: Model,
    v0: BlochVector,
    transient: float = 100.0,
    duration: float = 100.0,
    cfg: IntegratorConfig | None = None,
    radius_floor: float = 1e-6,
) -> LimitCycleResult:
    """Measure a periodic orbit from Poincare crossings of the x = 0 plane.

    Counts upward (x: negative to positive) crossings with z > 0, locating
    each by cubic Hermite interpolation between accepted steps. Raises
    NoCycleDetected when fewer than three crossings remain after the
    transient, or when the orbit has collapsed below ``radius_floor``.
    """
    if cfg is None:
        cfg = IntegratorConfig(method="rk45", abs_tol=1e-11, rel_tol=1e-11)
    f = field(model)
    warm = integrate_field(f, v0, replace(cfg, t_end=transient))
    traj = integrate_field(f, warm.final_state(), replace(cfg, t_end=duration))
    times, states = traj.times, traj.states
    derivs = np.array([f((s[0], s[1], s[2])) for s in states])

    crossings: list[tuple[float, float]] = []
    for i in range(len(times) - 1):
        x0, x1 = states[i, 0], states[i + 1, 0]
        if not (x0 < 0.0 <= x1):
            continue
        h = times[i + 1] - times[i]
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _hermite(x0, derivs[i, 0], x1, derivs[i + 1, 0], h, mid) < 0.0:
                lo = mid
            else:
                hi = mid
        s = 0.5 * (lo + hi)
        point = [
            _hermite(states[i, k], derivs[i, k], states[i + 1, k], derivs[i + 1, k], h, s)
            for k in range(3)
        ]
        if point[2] <= 0.0:
            continue
        radius = _norm3(point)
        if radius < radius_floor:
            continue
        crossings.append((float(times[i] + s * h), radius))

    if len(crossings) < 3:
        raise NoCycleDetected(
            f"only {len(crossings)} usable section crossings in {duration!r} time units"
        )
    ts = np.array([c[0] for c in crossings])
    rs = np.array([c[1] for c in crossings])
    return LimitCycleResult(
        period=float(np.diff(ts).mean()),
        radius_mean=float(rs.mean()),
        radius_std=float(rs.std()),
        n_crossings=len(crossings),
        crossing_times=tuple(float(t) for t in ts),
    )


def _tangent_rk4_step(
    f: Callable[[Vec3], Vec3], v: Vec3, U: np.ndarray, dt: float
) -> tuple[Vec3, np.ndarray, float]:
    k1 = f(v)
    J1 = jacobian(f, v)
    K1 = J1 @ U
    v2 = (v[0] + 0.5 * dt * k1[0], v[1] + 0.5 * dt * k1[1], v[2] + 0.5 * dt * k1[2])
    k2 = f(v2)
    K2 = jacobian(f, v2) @ (U + 0.5 * dt * K1)
    v3 = (v[0] + 0.5 * dt * k2[0], v[1] + 0.5 * dt * k2[1], v[2] + 0.5 * dt * k2[2])
    k3 = f(v3)
    K3 = jacobian(f, v3) @ (U + 0.5 * dt * K2)
    v4 = (v[0] + dt * k3[0], v[1] + dt * k3[1], v[2] + dt * k3[2])
    k4 = f(v4)
    K4 = jacobian(f, v4) @ (U + dt * K3)
    v_new = (
        v[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        v[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        v[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    )
    U_new = U + dt / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
    return v_new, U_new, float(np.trace(J1))


def lyapunov_spectrum(
    model: Model,
    v0: BlochVector,
    total_time: float = 100.0,
    transient: float = 10.0,
    dt: float = 1e-3,
    renorm_interval: float = 1.0,
) -> LyapunovSpectrum:
    """Benettin tangent-space exponents with periodic reorthonormalization.

    The reference orbit and the tangent frame advance together under a
    fixed-step fourth-order scheme; every ``renorm_interval`` the frame is
    re-orthonormalized (modified Gram-Schmidt) and the log norms are
    accumulated. ``mean_divergence`` is the time average of the Jacobian
    trace along the measured stretch, which the exponent sum must track.
    """
    f = field(model)
    v: Vec3 = (float(v0[0]), float(v0[1]), float(v0[2]))
    n_tr = max(0, int(round(transient / dt)))
    for _ in range(n_tr):
        x, y, z = v
        k1 = f(v)
        k2 = f((x + 0.5 * dt * k1[0], y + 0.5 * dt * k1[1], z + 0.5 * dt * k1[2]))
        k3 = f((x + 0.5 * dt * k2[0], y + 0.5 * dt * k2[1], z + 0.5 * dt * k2[2]))
        k4 = f((x + dt * k3[0], y + dt * k3[1], z + dt * k3[2]))
        v = (
            x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            z + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        )

    n_inner = max(1, int(round(renorm_interval / dt)))
    n_blocks = max(1, int(round(total_time / (n_inner * dt))))
    U = np.eye(3)
    sums = np.zeros(3)
    div_acc = 0.0
    for _ in range(n_blocks):
        for _ in range(n_inner):
            v, U, div = _tangent_rk4_step(f, v, U, dt)
            div_acc += div
        for i in range(3):
            for j in range(i):
                U[:, i] -= (U[:, j] @ U[:, i]) * U[:, j]
            r = math.sqrt(U[:, i] @ U[:, i])
            sums[i] += math.log(r)
            U[:, i] /= r
    measured = n_blocks * n_inner * dt
    exponents = tuple(sorted((s / measured for s in sums), reverse=True))
    return LyapunovSpectrum(
        exponents=exponents,
        total_time=measured,
        transient_discard=n_tr * dt,
        renorm_interval=n_inner * dt,
        mean_divergence=div_acc / (n_blocks * n_inner),
    )


_PLANES = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}
_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


def vector_field_grid(
    model: Model, plane: str = "y", offset: float = 0.0, n: int = 21
) -> FieldGrid:
    """Sample the field on an axis-aligned plane for a quiver portrait.

    The in-plane axes follow the cyclic order (x -> yz, y -> zx, z -> xy).
    All n^2 grid points are returned; ``inside`` flags the admissible ones.
    """
    if plane not in _PLANES:
        raise ValueError(f"plane must be one of {sorted(_PLANES)}, got {plane!r}")
    f = field(model)
    axis_a, axis_b = _PLANES[plane]
    ia, ib, ip = _AXIS_INDEX[axis_a], _AXIS_INDEX[axis_b], _AXIS_INDEX[plane]
    coords = np.linspace(-1.0, 1.0, n)
    a = np.empty(n * n)
    b = np.empty(n * n)
    fa = np.empty(n * n)
    fb = np.empty(n * n)
    inside = np.empty(n * n, dtype=bool)
    k = 0
    for ca in coords:
        for cb in coords:
            v = [0.0, 0.0, 0.0]
            v[ip] = offset
            v[ia] = float(ca)
            v[ib] = float(cb)
            F = f((v[0], v[1], v[2]))
            a[k] = ca
            b[k] = cb
            fa[k] = F[ia]
            fb[k] = F[ib]
            inside[k] = _norm3(v) <= 1.0 + ADMISSIBILITY_TOL
            k += 1
    return FieldGrid(
        plane=plane, offset=offset, axes=(axis_a, axis_b), a=a, b=b, fa=fa, fb=fb, inside=inside
    )
