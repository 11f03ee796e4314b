"""Figure renderers over the dynamics CLI's CSV/JSON outputs.

Five figure kinds cover the repertoire: a 1-d phase portrait (rate vs
population with stable roots filled and unstable roots open), a planar
portrait with quiver arrows and an optional trajectory overlay, shaded
parameter regions with the critical-bias curve dashed in, a bifurcation
diagram from a sweep, and the 3-d attractor inside the unit ball.

Rendering is deterministic: the Agg backend, a fixed SVG hash salt, and
no date metadata in the output, so rerunning a job reproduces the file
byte for byte. Each renderer returns a small summary dict so tests can
assert on what was drawn without parsing the image.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import FigureInputError, load_json, load_table, model_block
from .regions import critical_field, cubic_band, inside_pitchfork, inside_saddle_node

plt.rcParams["svg.hashsalt"] = "blochfigs"

KINDS = ("portrait1d", "portrait2d", "parameter_region", "bifurcation_diagram", "attractor3d")

STABLE = {"StableNode", "StableSpiral"}

_GRAY = "0.82"


@dataclass(frozen=True)
class Style:
    width: float = 6.4
    height: float = 4.8
    dpi: int = 150
    title: str | None = None
    # coordinate names used when overlaying trajectory/fixed-point files
    axes: tuple[str, str] = ("z", "x")
    boundary_radius: float | None = 1.0


@dataclass(frozen=True)
class FigureJob:
    kind: str
    inputs: tuple[str, ...]
    output: str
    style: Style = field(default_factory=Style)


def _expect_inputs(job: FigureJob, lo: int, hi: int) -> None:
    n = len(job.inputs)
    if not lo <= n <= hi:
        want = str(lo) if lo == hi else f"{lo}..{hi}"
        raise FigureInputError(f"{job.kind} takes {want} input file(s), got {n}")


def _markers(ax, positions, classes, summary) -> None:
    stable = [p for p, c in zip(positions, classes) if c in STABLE]
    unstable = [p for p, c in zip(positions, classes) if c not in STABLE]
    if stable:
        xs, ys = zip(*stable)
        ax.scatter(xs, ys, s=45, c="black", zorder=5)
    if unstable:
        xs, ys = zip(*unstable)
        ax.scatter(xs, ys, s=45, facecolors="white", edgecolors="black", zorder=5)
    summary["n_stable"] = len(stable)
    summary["n_unstable"] = len(unstable)


def _save(fig, job: FigureJob) -> None:
    suffix = os.path.splitext(job.output)[1].lower()
    parent = os.path.dirname(job.output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    if suffix == ".svg":
        fig.savefig(job.output, format="svg", metadata={"Date": None})
    elif suffix == ".png":
        fig.savefig(job.output, format="png", dpi=job.style.dpi)
    else:
        raise FigureInputError(f"unsupported output format {suffix!r} (use .svg or .png)")
    plt.close(fig)


def _portrait1d(job: FigureJob) -> dict:
    _expect_inputs(job, 1, 2)
    table = load_table(job.inputs[0])
    a = table.floats("a")
    b = table.floats("b")
    fa = table.floats("fa")
    on_axis = np.abs(b) <= np.abs(b).min() + 1e-12
    order = np.argsort(a[on_axis])
    line_a = a[on_axis][order]
    line_f = fa[on_axis][order]
    name = job.style.axes[0]
    fig, ax = plt.subplots(figsize=(job.style.width, job.style.height))
    ax.axhline(0.0, color="0.6", lw=0.8)
    ax.plot(line_a, line_f, color="tab:blue", lw=1.6)
    ax.set_xlabel(name)
    ax.set_ylabel(f"d{name}/dt")
    summary = {"kind": job.kind, "n_line_points": int(on_axis.sum()),
               "n_stable": 0, "n_unstable": 0}
    if len(job.inputs) == 2:
        points = load_table(job.inputs[1])
        roots = points.floats(name)
        classes = points.column("classification")
        _markers(ax, [(r, 0.0) for r in roots], classes, summary)
    if job.style.title:
        ax.set_title(job.style.title)
    _save(fig, job)
    return summary


def _portrait2d(job: FigureJob) -> dict:
    _expect_inputs(job, 1, 3)
    table = load_table(job.inputs[0])
    a = table.floats("a")
    b = table.floats("b")
    fa = table.floats("fa")
    fb = table.floats("fb")
    inside = np.array([cell == "true" for cell in table.column("inside")])
    na, nb = job.style.axes
    fig, ax = plt.subplots(figsize=(job.style.width, job.style.height))
    ax.quiver(a[inside], b[inside], fa[inside], fb[inside],
              angles="xy", color="0.45", width=0.003)
    if job.style.boundary_radius is not None:
        theta = np.linspace(0.0, 2.0 * np.pi, 256)
        r = job.style.boundary_radius
        ax.plot(r * np.cos(theta), r * np.sin(theta), color="black", lw=1.0)
    summary = {"kind": job.kind, "n_quiver": int(inside.sum()),
               "has_trajectory": False, "n_stable": 0, "n_unstable": 0}
    if len(job.inputs) >= 2:
        traj = load_table(job.inputs[1])
        ax.plot(traj.floats(na), traj.floats(nb), color="tab:red", lw=0.9)
        summary["has_trajectory"] = True
        summary["n_trajectory_points"] = len(traj)
    if len(job.inputs) == 3:
        points = load_table(job.inputs[2])
        pos = list(zip(points.floats(na), points.floats(nb)))
        _markers(ax, pos, points.column("classification"), summary)
    ax.set_xlabel(na)
    ax.set_ylabel(nb)
    ax.set_aspect("equal")
    if job.style.title:
        ax.set_title(job.style.title)
    _save(fig, job)
    return summary


def _parameter_region(job: FigureJob) -> dict:
    _expect_inputs(job, 1, 1)
    doc = load_json(job.inputs[0])
    kind, params = model_block(doc, job.inputs[0])
    fig, ax = plt.subplots(figsize=(job.style.width, job.style.height))
    summary: dict = {"kind": job.kind, "model_kind": kind,
                     "curve_t": None, "curve_b": None}
    if kind == "pitchfork":
        alpha_g = np.linspace(0.0, 2.0, 401)
        t_g = np.linspace(-1.5, 8.5, 401)
        A, T = np.meshgrid(alpha_g, t_g)
        mask = inside_pitchfork(A, T)
        ax.contourf(A, T, mask.astype(float), levels=[0.5, 1.5], colors=[_GRAY])
        ax.plot([params["alpha"]], [params["t"]], marker="x", color="black", ms=8)
        ax.set_xlabel("alpha")
        ax.set_ylabel("t")
    elif kind == "saddle_node":
        alpha = float(params["alpha"])
        lo, hi = cubic_band(alpha)
        t_g = np.linspace(lo - 0.2, hi + 0.2, 401)
        b_g = np.linspace(-2.4 * alpha, 2.4 * alpha, 401)
        T, B = np.meshgrid(t_g, b_g)
        mask = inside_saddle_node(alpha, T, B)
        ax.contourf(T, B, mask.astype(float), levels=[0.5, 1.5], colors=[_GRAY])
        curve_t = np.linspace(lo, 0.0, 100)
        curve_b = critical_field(curve_t)
        ax.plot(curve_t, curve_b, "k--", lw=1.2)
        ax.plot(curve_t, -curve_b, "k--", lw=1.2)
        ax.plot([params["t"]], [params["b"]], marker="x", color="black", ms=8)
        ax.set_xlabel("t")
        ax.set_ylabel("b")
        summary["curve_t"] = [float(v) for v in curve_t]
        summary["curve_b"] = [float(v) for v in curve_b]
    else:
        plt.close(fig)
        raise FigureInputError(f"no parameter-region figure for model kind {kind!r}")
    if job.style.title:
        ax.set_title(job.style.title)
    _save(fig, job)
    return summary


def _bifurcation_diagram(job: FigureJob) -> dict:
    _expect_inputs(job, 1, 2)
    table = load_table(job.inputs[0])
    values = table.floats("param_value")
    z = table.floats("z")
    classes = table.column("classification")
    stable = np.array([c in STABLE for c in classes])
    fig, ax = plt.subplots(figsize=(job.style.width, job.style.height))
    ax.scatter(values[stable], z[stable], s=12, c="black", label="stable")
    ax.scatter(values[~stable], z[~stable], s=14, facecolors="white",
               edgecolors="black", linewidths=0.7, label="unstable")
    summary = {"kind": job.kind, "n_stable": int(stable.sum()),
               "n_unstable": int((~stable).sum()), "n_events": 0, "event_kinds": []}
    if len(job.inputs) == 2:
        events = load_table(job.inputs[1])
        kinds = events.column("kind")
        los = events.floats("param_lo")
        his = events.floats("param_hi")
        for name, lo, hi in zip(kinds, los, his):
            ax.axvspan(lo, hi, color="tab:orange", alpha=0.35)
            ax.annotate(name, ((lo + hi) / 2.0, ax.get_ylim()[1]),
                        ha="center", va="top", fontsize=8)
        summary["n_events"] = len(kinds)
        summary["event_kinds"] = kinds
    ax.set_xlabel("parameter")
    ax.set_ylabel("z")
    ax.legend(loc="best", fontsize=8)
    if job.style.title:
        ax.set_title(job.style.title)
    _save(fig, job)
    return summary


def _attractor3d(job: FigureJob) -> dict:
    _expect_inputs(job, 1, 1)
    table = load_table(job.inputs[0])
    x = table.floats("x")
    y = table.floats("y")
    z = table.floats("z")
    fig = plt.figure(figsize=(job.style.width, job.style.height))
    ax = fig.add_subplot(projection="3d")
    u = np.linspace(0.0, 2.0 * np.pi, 24)
    v = np.linspace(0.0, np.pi, 13)
    ax.plot_wireframe(
        np.outer(np.cos(u), np.sin(v)),
        np.outer(np.sin(u), np.sin(v)),
        np.outer(np.ones_like(u), np.cos(v)),
        color="0.85", lw=0.4,
    )
    ax.plot(x, y, z, color="tab:blue", lw=0.5)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.set_box_aspect((1.0, 1.0, 1.0))
    if job.style.title:
        ax.set_title(job.style.title)
    _save(fig, job)
    radius = np.sqrt(x * x + y * y + z * z)
    return {"kind": job.kind, "n_points": len(table), "max_radius": float(radius.max())}


_RENDERERS = {
    "portrait1d": _portrait1d,
    "portrait2d": _portrait2d,
    "parameter_region": _parameter_region,
    "bifurcation_diagram": _bifurcation_diagram,
    "attractor3d": _attractor3d,
}


def render(job: FigureJob) -> dict:
    """Render one figure job; returns a summary of what was drawn."""
    try:
        renderer = _RENDERERS[job.kind]
    except KeyError:
        raise FigureInputError(f"unknown figure kind {job.kind!r}; expected one of {KINDS}") from None
    return renderer(job)
