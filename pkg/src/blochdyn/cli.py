"""Command line front end.

Subcommands: simulate, fixed-points, sweep, lyapunov, validate, portrait.
Each reads a JSON config (``--config``), applies dotted-path overrides
(``--set model.params.eps=0.1``), and writes CSV/JSON files under
``--out-prefix``. Outputs are deterministic byte for byte: floats use a
fixed 16-digit exponential format, JSON keys are sorted, nothing records
a timestamp, and files land atomically via a temp file and rename.

Exit codes: 0 on success, 2 for configuration or usage problems, 3 when
the requested computation fails (inadmissible states, step limits, no
cycle found, domain errors).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, fields

import numpy as np

from .analysis import (
    find_fixed_points,
    lyapunov_spectrum,
    sweep,
    vector_field_grid,
)
from .core import BlochVector, psd_check
from .dynamics import consistency_check, sample_ball
from .errors import (
    AdmissibilityViolation,
    DomainError,
    InvalidParams,
    NoCycleDetected,
    StepLimitExceeded,
    TraceViolation,
    UnsupportedKind,
)
from .models import Model, model_from_config, nonneg_scan
from .solver import IntegratorConfig, integrate, sample_boundary_flux


class ConfigError(Exception):
    """Raised for malformed configs, overrides, or missing sections."""


def _fmt(x: float) -> str:
    return f"{float(x):.16e}"


def _bool(x: bool) -> str:
    return "true" if x else "false"


def _atomic_write(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buf.getvalue())


def _write_json(path: str, obj: object) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _apply_override(cfg: dict, spec: str) -> None:
    path, sep, raw = spec.partition("=")
    keys = [k for k in path.strip().split(".")]
    if not sep or not all(keys):
        raise ConfigError(f"--set expects dotted.path=value, got {spec!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    for key in keys[:-1]:
        nxt = node.setdefault(key, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"--set cannot descend through non-object key {key!r}")
        node = nxt
    node[keys[-1]] = value


def _load_config(config_path: str | None, overrides: list[str]) -> dict:
    cfg: dict = {}
    if config_path is not None:
        if not os.path.isfile(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        with open(config_path) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config root must be a JSON object")
    for spec in overrides:
        _apply_override(cfg, spec)
    return cfg


def _require_model(cfg: dict) -> Model:
    node = cfg.get("model")
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("config needs model.kind and model.params")
    params = node.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("model.params must be a JSON object")
    return model_from_config(node["kind"], params)


def _initial_state(cfg: dict) -> BlochVector:
    raw = cfg.get("initial_state")
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ConfigError("config needs initial_state = [x, y, z]")
    return BlochVector(float(raw[0]), float(raw[1]), float(raw[2]))


def _section(cfg: dict, name: str, defaults: dict) -> dict:
    sect = cfg.get(name, {})
    if not isinstance(sect, dict):
        raise ConfigError(f"config section {name!r} must be a JSON object")
    unknown = set(sect) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return {**defaults, **sect}


def _integrator(cfg: dict) -> IntegratorConfig:
    sect = cfg.get("integrator", {})
    if not isinstance(sect, dict):
        raise ConfigError("config section 'integrator' must be a JSON object")
    known = {f.name for f in fields(IntegratorConfig)}
    unknown = set(sect) - known
    if unknown:
        raise ConfigError(f"unknown keys in 'integrator': {sorted(unknown)}")
    try:
        return IntegratorConfig(**sect)
    except ValueError as exc:
        raise ConfigError(f"bad integrator settings: {exc}") from exc


def _model_block(model: Model) -> dict:
    return {"kind": model.kind, "params": model.params()}


def _emit(prefix: str, command: str, config: dict, outputs: dict, summary: dict) -> None:
    meta = {
        "command": command,
        "config": config,
        "outputs": {k: os.path.basename(v) for k, v in outputs.items()},
        "summary": summary,
    }
    path = f"{prefix}_meta.json"
    _write_json(path, meta)
    print(f"wrote {os.path.basename(path)}")


def _cmd_simulate(cfg: dict, args: argparse.Namespace) -> int:
    model = _require_model(cfg)
    v0 = _initial_state(cfg)
    icfg = _integrator(cfg)
    traj = integrate(model, v0, icfg)
    rows = [
        [_fmt(t), _fmt(s[0]), _fmt(s[1]), _fmt(s[2])]
        for t, s in zip(traj.times, traj.states)
    ]
    out = f"{args.out_prefix}_trajectory.csv"
    _write_csv(out, ["t", "x", "y", "z"], rows)
    print(f"wrote {os.path.basename(out)} ({len(rows)} rows)")
    _emit(
        args.out_prefix,
        "simulate",
        {
            "model": _model_block(model),
            "initial_state": [v0.x, v0.y, v0.z],
            "integrator": asdict(icfg),
        },
        {"trajectory": out},
        {
            "n_steps": len(rows) - 1,
            "final_state": [float(c) for c in traj.final_state()],
            "max_norm": traj.max_norm(),
        },
    )
    return 0


def _cmd_fixed_points(cfg: dict, args: argparse.Namespace) -> int:
    model = _require_model(cfg)
    sect = _section(
        cfg,
        "fixed_points",
        {
            "grid_n": 5,
            "newton_tol": 1e-12,
            "max_iter": 50,
            "dedup_tol": 1e-6,
            "marginal_tol": 1e-5,
        },
    )
    points = find_fixed_points(
        model,
        grid_n=int(sect["grid_n"]),
        newton_tol=float(sect["newton_tol"]),
        max_iter=int(sect["max_iter"]),
        dedup_tol=float(sect["dedup_tol"]),
        marginal_tol=float(sect["marginal_tol"]),
    )
    rows = []
    for fp in points:
        e1, e2, e3 = fp.eigenvalues
        rows.append(
            [
                _fmt(fp.location.x),
                _fmt(fp.location.y),
                _fmt(fp.location.z),
                fp.classification,
                _fmt(e1.real),
                _fmt(e1.imag),
                _fmt(e2.real),
                _fmt(e2.imag),
                _fmt(e3.real),
                _fmt(e3.imag),
                _fmt(fp.residual),
            ]
        )
    out = f"{args.out_prefix}_fixed_points.csv"
    header = ["x", "y", "z", "classification"]
    header += ["re1", "im1", "re2", "im2", "re3", "im3", "residual"]
    _write_csv(out, header, rows)
    print(f"wrote {os.path.basename(out)} ({len(rows)} rows)")
    _emit(
        args.out_prefix,
        "fixed-points",
        {"model": _model_block(model), "fixed_points": sect},
        {"fixed_points": out},
        {
            "n_points": len(points),
            "classifications": [fp.classification for fp in points],
        },
    )
    return 0


def _cmd_sweep(cfg: dict, args: argparse.Namespace) -> int:
    node = cfg.get("model")
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("config needs model.kind and model.params")
    sect = _section(
        cfg,
        "sweep",
        {"param": None, "start": None, "stop": None, "n": None, "values": None, "grid_n": 5},
    )
    if not sect["param"]:
        raise ConfigError("sweep needs sweep.param")
    if sect["values"] is not None:
        values = [float(v) for v in sect["values"]]
    else:
        if sect["start"] is None or sect["stop"] is None or sect["n"] is None:
            raise ConfigError("sweep needs either sweep.values or start/stop/n")
        values = [float(v) for v in np.linspace(sect["start"], sect["stop"], int(sect["n"]))]
    result = sweep(
        node["kind"],
        dict(node.get("params", {})),
        sect["param"],
        values,
        grid_n=int(sect["grid_n"]),
    )
    rows = []
    for value, pts, ids in zip(result.values, result.points, result.branch_ids):
        for fp, bid in zip(pts, ids):
            e1, e2, e3 = fp.eigenvalues
            rows.append(
                [
                    _fmt(value),
                    str(bid),
                    _fmt(fp.location.x),
                    _fmt(fp.location.y),
                    _fmt(fp.location.z),
                    fp.classification,
                    _fmt(e1.real),
                    _fmt(e1.imag),
                    _fmt(e2.real),
                    _fmt(e2.imag),
                    _fmt(e3.real),
                    _fmt(e3.imag),
                ]
            )
    branches_out = f"{args.out_prefix}_sweep.csv"
    header = ["param_value", "branch_id", "x", "y", "z", "classification"]
    header += ["re1", "im1", "re2", "im2", "re3", "im3"]
    _write_csv(branches_out, header, rows)
    print(f"wrote {os.path.basename(branches_out)} ({len(rows)} rows)")
    event_rows = [
        [
            ev.kind,
            _fmt(ev.param_bracket[0]),
            _fmt(ev.param_bracket[1]),
            str(ev.n_before),
            str(ev.n_after),
            _bool(ev.stability_exchange),
            ev.detail,
        ]
        for ev in result.events
    ]
    events_out = f"{args.out_prefix}_events.csv"
    _write_csv(
        events_out,
        ["kind", "param_lo", "param_hi", "n_before", "n_after", "stability_exchange", "detail"],
        event_rows,
    )
    print(f"wrote {os.path.basename(events_out)} ({len(event_rows)} rows)")
    _emit(
        args.out_prefix,
        "sweep",
        {"model": {"kind": node["kind"], "params": dict(node.get("params", {}))}, "sweep": sect},
        {"branches": branches_out, "events": events_out},
        {
            "n_values": len(result.values),
            "n_events": len(result.events),
            "event_kinds": [ev.kind for ev in result.events],
        },
    )
    return 0


def _cmd_lyapunov(cfg: dict, args: argparse.Namespace) -> int:
    model = _require_model(cfg)
    v0 = _initial_state(cfg)
    sect = _section(
        cfg,
        "lyapunov",
        {"total_time": 100.0, "transient": 10.0, "dt": 1e-3, "renorm_interval": 1.0},
    )
    spec = lyapunov_spectrum(
        model,
        v0,
        total_time=float(sect["total_time"]),
        transient=float(sect["transient"]),
        dt=float(sect["dt"]),
        renorm_interval=float(sect["renorm_interval"]),
    )
    out = f"{args.out_prefix}_lyapunov.json"
    _write_json(
        out,
        {
            "model": _model_block(model),
            "initial_state": [v0.x, v0.y, v0.z],
            "exponents": list(spec.exponents),
            "total_time": spec.total_time,
            "transient_discard": spec.transient_discard,
            "renorm_interval": spec.renorm_interval,
            "mean_divergence": spec.mean_divergence,
        },
    )
    print(f"wrote {os.path.basename(out)}")
    _emit(
        args.out_prefix,
        "lyapunov",
        {"model": _model_block(model), "initial_state": [v0.x, v0.y, v0.z], "lyapunov": sect},
        {"spectrum": out},
        {"exponents": list(spec.exponents), "mean_divergence": spec.mean_divergence},
    )
    return 0


def _cmd_validate(cfg: dict, args: argparse.Namespace) -> int:
    model = _require_model(cfg)
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        raise ConfigError("validate needs a seed (--seed N or config key 'seed')")
    seed = int(seed)
    sect = _section(
        cfg,
        "validate",
        {"flux_samples": 1000, "psd_samples": 2000, "consistency_samples": 500},
    )
    report: dict = {
        "kind": model.kind,
        "params": model.params(),
        "seed": seed,
    }
    check = model.validate()
    report["param_region_ok"] = bool(check.ok)
    report["violations"] = list(check.violations)
    try:
        report["nonneg_min"] = nonneg_scan(model)
    except UnsupportedKind:
        report["nonneg_min"] = None
    if not check.ok:
        report["boundary_flux"] = None
        report["psd"] = None
        report["consistency"] = None
    else:
        flux = sample_boundary_flux(model, n_samples=int(sect["flux_samples"]), seed=seed)
        report["boundary_flux"] = {
            "max_flux": flux.max_flux,
            "n_samples": flux.n_samples,
            "seed": flux.seed,
        }
        if model.kind == "roessler":
            # positivity of the rates only holds near the attractor, so
            # sample along a settled trajectory instead of the whole ball
            v0 = (
                _initial_state(cfg)
                if "initial_state" in cfg
                else BlochVector(0.35, -0.12, 0.0)
            )
            icfg = IntegratorConfig(method="rk45", abs_tol=1e-9, rel_tol=1e-9, t_end=1.0)
            warm = integrate(model, v0, icfg)
            traj = integrate(model, warm.final_state(), IntegratorConfig(
                method="rk45", abs_tol=1e-9, rel_tol=1e-9, t_end=2.0))
            states = traj.states
            scope = "trajectory"
        else:
            states = sample_ball(int(sect["psd_samples"]), seed)
            scope = "ball"
        worst_minor = float("inf")
        worst_det = float("inf")
        for s in states:
            psd = psd_check(model.coefficients(BlochVector(s[0], s[1], s[2])))
            worst_minor = min(worst_minor, min(psd.minors))
            worst_det = min(worst_det, psd.det_full)
        report["psd"] = {
            "scope": scope,
            "n_states": int(len(states)),
            "min_minor": float(worst_minor),
            "min_det_full": float(worst_det),
            "ok": bool(worst_minor >= -1e-9 and worst_det >= -1e-9),
        }
        try:
            con = consistency_check(model, n_samples=int(sect["consistency_samples"]), seed=seed)
            report["consistency"] = {"max_dev": con.max_dev, "n_samples": con.n_samples}
        except UnsupportedKind:
            report["consistency"] = None
    out = f"{args.out_prefix}_validate.json"
    _write_json(out, report)
    print(f"wrote {os.path.basename(out)}")
    _emit(
        args.out_prefix,
        "validate",
        {"model": _model_block(model), "validate": sect, "seed": seed},
        {"report": out},
        {"param_region_ok": report["param_region_ok"]},
    )
    return 0


def _cmd_portrait(cfg: dict, args: argparse.Namespace) -> int:
    model = _require_model(cfg)
    sect = _section(cfg, "portrait", {"plane": "y", "offset": 0.0, "n": 21})
    try:
        grid = vector_field_grid(
            model, plane=str(sect["plane"]), offset=float(sect["offset"]), n=int(sect["n"])
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [
        [_fmt(grid.a[k]), _fmt(grid.b[k]), _fmt(grid.fa[k]), _fmt(grid.fb[k]), _bool(grid.inside[k])]
        for k in range(len(grid.a))
    ]
    out = f"{args.out_prefix}_portrait.csv"
    _write_csv(out, ["a", "b", "fa", "fb", "inside"], rows)
    print(f"wrote {os.path.basename(out)} ({len(rows)} rows)")
    _emit(
        args.out_prefix,
        "portrait",
        {"model": _model_block(model), "portrait": sect},
        {"portrait": out},
        {"axes": list(grid.axes), "n_points": len(rows)},
    )
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "fixed-points": _cmd_fixed_points,
    "sweep": _cmd_sweep,
    "lyapunov": _cmd_lyapunov,
    "validate": _cmd_validate,
    "portrait": _cmd_portrait,
}

_HELP = {
    "simulate": "integrate a model and write the trajectory",
    "fixed-points": "locate and classify admissible fixed points",
    "sweep": "track fixed-point branches across a parameter range",
    "lyapunov": "tangent-space Lyapunov spectrum along one orbit",
    "validate": "parameter region, rate positivity, PSD and flux checks",
    "portrait": "sample the field on a plane for quiver plots",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blochdyn",
        description="Nonlinear qubit dynamics on the Bloch ball.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in _HANDLERS.items():
        cmd = sub.add_parser(name, help=_HELP[name])
        cmd.add_argument("--config", default=None, help="JSON config file")
        cmd.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="PATH=VALUE",
            help="override a config entry, e.g. model.params.eps=0.1",
        )
        cmd.add_argument(
            "--out-prefix",
            default=name.replace("-", "_"),
            help="prefix for all output files",
        )
        cmd.add_argument("--seed", type=int, default=None, help="seed for sampled checks")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config, args.overrides)
        return _HANDLERS[args.command](cfg, args)
    except (ConfigError, UnsupportedKind, InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        AdmissibilityViolation,
        StepLimitExceeded,
        NoCycleDetected,
        DomainError,
        TraceViolation,
    ) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
