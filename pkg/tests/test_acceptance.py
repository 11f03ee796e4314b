"""Acceptance suite: one test per headline behavior, at full scale.

Every test prints exactly one PASS/FAIL line (run with ``-s`` to see
them all) and carries its tolerance and runtime budget inline. The
chaotic-exponent check is scored against a brute-force tangent-space
run on the unscaled three-variable oscillator, written out here with
its analytic Jacobian so the two computations share no code.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np

from blochdyn.analysis import (
    find_fixed_points,
    limit_cycle,
    lyapunov_spectrum,
    saddle_node_critical_b,
    sweep,
)
from blochdyn.core import BlochVector, psd_check
from blochdyn.dynamics import consistency_check, field
from blochdyn.errors import NoCycleDetected
from blochdyn.models import (
    ConstantH,
    Hopf,
    Pitchfork,
    Roessler,
    SaddleNode,
    Transcritical,
)
from blochdyn.solver import (
    IntegratorConfig,
    closed_form_1d,
    integrate,
    sample_boundary_flux,
)

ATTRACTING = {"StableNode", "StableSpiral"}


def _gate(name, checks):
    """Print one verdict line for a criterion and fail on any subcheck."""
    failed = [label for label, ok in checks if not ok]
    if failed:
        print(f"FAIL {name}: {'; '.join(failed)}")
    else:
        print(f"PASS {name}")
    assert not failed, f"{name}: {failed}"


def test_ansatz_consistency():
    start = time.perf_counter()
    checks = []
    cases = [
        (Pitchfork(0.5, -0.25), 1e-12),
        (SaddleNode(0.5, -0.75, 0.2), 1e-12),
        (Transcritical(1.0, 0.5), 1e-12),
        (Hopf(0.9, 0.25, 0.2), 1e-12),
        (Roessler(0.1, 0.1, 14.0, 50.0, 0.35), 1e-9),
    ]
    for model, tol in cases:
        rep = consistency_check(model, n_samples=10_000, seed=2024)
        checks.append((f"{model.kind} deviation {rep.max_dev:.2e} >= {tol}", rep.max_dev < tol))
    elapsed = time.perf_counter() - start
    checks.append((f"runtime {elapsed:.1f}s >= 5s", elapsed < 5.0))
    _gate("ansatz consistency (5 models, 1e4 states each)", checks)


def test_closed_form_oracle():
    start = time.perf_counter()
    model = ConstantH(2.0, 1.0)
    v0 = BlochVector(0.6, -0.3, 0.2)
    s0 = math.hypot(v0.x, v0.y)
    traj = integrate(
        model, v0, IntegratorConfig(method="rk45", abs_tol=1e-11, rel_tol=1e-11, t_end=10.0)
    )
    z_ref, s_ref = closed_form_1d(2.0, 1.0, 0.0, v0.z, s0, traj.times)
    s_num = np.hypot(traj.states[:, 0], traj.states[:, 1])
    sup = max(
        float(np.abs(traj.states[:, 2] - z_ref).max()),
        float(np.abs(s_num - s_ref).max()),
    )
    late = integrate(
        model, v0, IntegratorConfig(method="rk45", abs_tol=1e-12, rel_tol=1e-12, t_end=40.0)
    )
    z_gap = abs(late.final_state().z - 1.0 / 3.0)
    elapsed = time.perf_counter() - start
    checks = [
        (f"sup error {sup:.2e} >= 1e-8 on [0, 10]", sup < 1e-8),
        (f"|z(40) - 1/3| = {z_gap:.2e} >= 1e-9", z_gap < 1e-9),
        (f"runtime {elapsed:.1f}s >= 1s", elapsed < 1.0),
    ]
    _gate("closed-form relaxation oracle", checks)


def test_pitchfork_points_and_sweep():
    checks = []
    pts = find_fixed_points(Pitchfork(0.5, -0.25))
    checks.append((f"expected 3 points below threshold, got {len(pts)}", len(pts) == 3))
    if len(pts) == 3:
        for fp, target in zip(pts, (-0.5, 0.0, 0.5)):
            checks.append(
                (f"z = {fp.location.z!r} not within 1e-10 of {target}",
                 abs(fp.location.z - target) <= 1e-10)
            )
        checks.append(("outer branches not stable",
                       pts[0].classification in ATTRACTING
                       and pts[2].classification in ATTRACTING))
        checks.append(("middle branch not unstable",
                       pts[1].classification not in ATTRACTING
                       and pts[1].classification != "Marginal"))
    single = find_fixed_points(Pitchfork(0.5, 0.25))
    checks.append((f"expected 1 point above threshold, got {len(single)}", len(single) == 1))
    if single:
        checks.append((f"z = {single[0].location.z!r} not within 1e-10 of 0",
                       abs(single[0].location.z) <= 1e-10))
        checks.append(("surviving point not stable", single[0].classification in ATTRACTING))
    res = sweep("pitchfork", {"alpha": 0.5}, "t", np.linspace(-0.5, 0.5, 201))
    kinds = [e.kind for e in res.events]
    checks.append((f"expected exactly one Pitchfork event, got {kinds}", kinds == ["Pitchfork"]))
    if len(res.events) == 1:
        lo, hi = res.events[0].param_bracket
        checks.append((f"bracket ({lo}, {hi}) misses 0", lo <= 0.0 <= hi))
    _gate("pitchfork: points at 1e-10, one sweep event bracketing 0", checks)


def test_saddle_node_sweep():
    checks = []
    b_crit = saddle_node_critical_b(-0.75)
    checks.append((f"critical field {b_crit!r} != 0.25", abs(b_crit - 0.25) <= 1e-15))
    res = sweep("saddle_node", {"alpha": 0.5, "t": -0.75}, "b", np.linspace(0.0, 0.5, 501))
    kinds = [e.kind for e in res.events]
    checks.append((f"expected exactly one SaddleNode event, got {kinds}", kinds == ["SaddleNode"]))
    if len(res.events) == 1:
        lo, hi = res.events[0].param_bracket
        checks.append((f"bracket ({lo}, {hi}) misses 0.25", lo <= 0.25 <= hi))
        checks.append((f"bracket width {hi - lo!r} > 0.001", hi - lo <= 0.001 + 1e-12))
    _gate("saddle-node: one fold event in a 0.001-wide bracket at 0.25", checks)


def test_transcritical_exchange():
    checks = []
    pts = find_fixed_points(Transcritical(1.0, 0.5))
    checks.append((f"expected 2 points, got {len(pts)}", len(pts) == 2))
    if len(pts) == 2:
        q0 = 0.5 * (pts[0].location.z + 1.0)
        q1 = 0.5 * (pts[1].location.z + 1.0)
        checks.append((f"q = {q0!r} not within 1e-10 of 0", abs(q0) <= 1e-10))
        checks.append(("population branch q=0 not unstable",
                       pts[0].classification not in ATTRACTING
                       and pts[0].classification != "Marginal"))
        checks.append((f"q = {q1!r} not within 1e-10 of 0.5", abs(q1 - 0.5) <= 1e-10))
        checks.append(("population branch q=0.5 not stable",
                       pts[1].classification in ATTRACTING))
    res = sweep("transcritical", {"alpha": 1.0}, "c", np.linspace(-0.2, 0.2, 21))
    kinds = [e.kind for e in res.events]
    checks.append(
        (f"expected exactly one Transcritical event, got {kinds}", kinds == ["Transcritical"])
    )
    if len(res.events) == 1:
        ev = res.events[0]
        lo, hi = ev.param_bracket
        checks.append((f"bracket ({lo}, {hi}) misses 0", lo <= 0.0 <= hi))
        checks.append(("no stability exchange flagged", ev.stability_exchange))
    _gate("transcritical: branch values at 1e-10, exchange event through 0", checks)


def test_hopf_cycle_and_sweep():
    start = time.perf_counter()
    checks = []
    cyc = limit_cycle(Hopf(0.9, 0.25, 0.2), BlochVector(0.1, 0.0, 0.1))
    checks.append((f"radius {cyc.radius_mean:.6f} not 0.500 +- 1e-3",
                   abs(cyc.radius_mean - 0.5) <= 1e-3))
    checks.append((f"period {cyc.period:.4f} not 31.416 +- 0.03",
                   abs(cyc.period - 31.416) <= 0.03))
    spiral = Hopf(0.9, -0.25, 0.2)
    pts = find_fixed_points(spiral)
    origin = min(pts, key=lambda fp: math.hypot(*fp.location)) if pts else None
    checks.append(("no fixed point at origin below onset",
                   origin is not None and math.hypot(*origin.location) <= 1e-8))
    checks.append(("origin below onset is not a stable spiral",
                   origin is not None and origin.classification == "StableSpiral"))
    raised = False
    try:
        limit_cycle(spiral, BlochVector(0.1, 0.0, 0.1))
    except NoCycleDetected:
        raised = True
    checks.append(("cycle search below onset did not report NoCycleDetected", raised))
    res = sweep("hopf", {"delta": 0.9, "b": 0.2}, "eps", np.linspace(-0.2, 0.2, 21))
    kinds = [e.kind for e in res.events]
    checks.append((f"expected exactly one Hopf event, got {kinds}", kinds == ["Hopf"]))
    if len(res.events) == 1:
        lo, hi = res.events[0].param_bracket
        checks.append((f"bracket ({lo}, {hi}) misses 0", lo <= 0.0 <= hi))
    elapsed = time.perf_counter() - start
    checks.append((f"runtime {elapsed:.1f}s >= 10s", elapsed < 10.0))
    _gate("hopf: cycle radius/period, spiral below onset, one sweep event", checks)


def _brute_force_lambda1(a, b, c, dt, transient, total, renorm):
    """Largest exponent of the unscaled oscillator, with analytic Jacobian.

    Fixed-step fourth-order integration of state and one tangent vector,
    renormalizing every ``renorm`` time units. Step, windows, and cadence
    are chosen by the caller to mirror the embedded run exactly.
    """

    def f(w):
        x, y, z = w
        return np.array([-y - z, x + a * y, b + z * (x - c)])

    def jac(w):
        x, _, z = w
        return np.array([[0.0, -1.0, -1.0], [1.0, a, 0.0], [z, 0.0, x - c]])

    def rk4(w):
        k1 = f(w)
        k2 = f(w + 0.5 * dt * k1)
        k3 = f(w + 0.5 * dt * k2)
        k4 = f(w + dt * k3)
        return w + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    def rk4_pair(w, u):
        k1 = f(w)
        j1 = jac(w) @ u
        w2 = w + 0.5 * dt * k1
        k2 = f(w2)
        j2 = jac(w2) @ (u + 0.5 * dt * j1)
        w3 = w + 0.5 * dt * k2
        k3 = f(w3)
        j3 = jac(w3) @ (u + 0.5 * dt * j2)
        w4 = w + dt * k3
        k4 = f(w4)
        j4 = jac(w4) @ (u + dt * j3)
        return (
            w + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4),
            u + (dt / 6.0) * (j1 + 2 * j2 + 2 * j3 + j4),
        )

    w = np.array([1.0, 1.0, 0.0])
    for _ in range(round(transient / dt)):
        w = rk4(w)
    u = np.array([1.0, 0.0, 0.0])
    n_inner = round(renorm / dt)
    n_blocks = round(total / (n_inner * dt))
    acc = 0.0
    for _ in range(n_blocks):
        for _ in range(n_inner):
            w, u = rk4_pair(w, u)
        growth = math.sqrt(float(u @ u))
        acc += math.log(growth)
        u /= growth
    return acc / (n_blocks * n_inner * dt)


def test_embedded_chaos():
    start = time.perf_counter()
    checks = []
    m = 50.0
    model = Roessler(0.1, 0.1, 14.0, m, 0.35)
    # Bloch-side start mirroring (1, 1, 0) in the unscaled variables
    v0 = BlochVector(1.0 / m + 0.35, 1.0 / m, 0.0)

    traj = integrate(
        model, v0, IntegratorConfig(method="rk45", abs_tol=1e-9, rel_tol=1e-9, t_end=20.0)
    )
    top = traj.max_norm()
    checks.append((f"max |v| = {top!r} escapes 1 + 1e-8", top <= 1.0 + 1e-8))

    worst = min(
        min(psd_check(model.coefficients(BlochVector(*s))).minors) for s in traj.states
    )
    checks.append((f"worst principal minor {worst:.2e} < -1e-9 on trajectory", worst >= -1e-9))

    doubled = field(Roessler(0.1, 0.1, 14.0, m, 0.35, h33_scale=2.0))
    base = field(model)
    gap = 0.0
    for s in traj.states[::10]:
        v = BlochVector(*s)
        fb, fd = base(v), doubled(v)
        gap = max(gap, max(abs(fb[i] - fd[i]) for i in range(3)))
    checks.append((f"doubling the dephasing rate moved the field by {gap:.2e}", gap < 1e-12))

    spectrum = lyapunov_spectrum(
        model, v0, total_time=200.0, transient=2.0, dt=1e-3, renorm_interval=0.02
    )
    lam1 = spectrum.exponents[0]
    checks.append((f"largest exponent {lam1:.4f} not positive", lam1 > 0.0))
    lam_ref = m * _brute_force_lambda1(
        0.1, 0.1, 14.0, dt=m * 1e-3, transient=100.0, total=m * 200.0, renorm=1.0
    )
    rel = abs(lam1 - lam_ref) / abs(lam_ref)
    checks.append(
        (f"exponent {lam1:.4f} vs scaled oracle {lam_ref:.4f}: gap {rel * 100:.2f}% > 3%",
         rel <= 0.03)
    )
    elapsed = time.perf_counter() - start
    checks.append((f"runtime {elapsed:.1f}s >= 60s", elapsed < 60.0))
    _gate("embedded chaos: containment, PSD, rate-shift invariance, exponent", checks)


def test_trapping_region():
    checks = []
    for model in (Hopf(0.9, 0.25, 0.2), ConstantH(2.0, 1.0, 0.25)):
        rep = sample_boundary_flux(model, n_samples=1000, seed=11)
        checks.append(
            (f"{model.kind}: max boundary flux {rep.max_flux:.3e} not negative",
             rep.max_flux < 0.0)
        )
    _gate("trapping region: inward flux at 1e3 sphere samples", checks)


def test_cli_determinism(tmp_path):
    cfg = {
        "model": {"kind": "hopf", "params": {"delta": 0.9, "eps": 0.25, "b": 0.2}},
        "initial_state": [0.1, 0.0, 0.1],
        "integrator": {"method": "rk45", "t_end": 2.0},
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    produced = {}
    for run in ("first", "second"):
        outdir = tmp_path / run
        outdir.mkdir()
        for command, stem in (("simulate", "sim"), ("validate", "val")):
            proc = subprocess.run(
                [
                    sys.executable, "-m", "blochdyn", command,
                    "--config", str(cfg_path),
                    "--out-prefix", str(outdir / stem),
                    "--seed", "3",
                ],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
        produced[run] = {
            p.name: p.read_bytes() for p in sorted(outdir.iterdir())
        }
    names = sorted(produced["first"])
    checks = [("no output files produced", bool(names))]
    checks.append(("runs produced different file sets",
                   names == sorted(produced["second"])))
    for name in names:
        checks.append(
            (f"{name} differs between runs",
             produced["first"][name] == produced["second"][name])
        )
    _gate("determinism: byte-identical CSV/JSON across repeat runs", checks)
