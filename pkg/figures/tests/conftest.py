"""Shared fixture: real CLI outputs to draw from.

The figure package's contract is to consume only what the ``blochdyn``
command line writes, so the test inputs are produced by running it in a
subprocess, never by importing the dynamics library.
"""

import json
import subprocess
import sys

import pytest


def _blochdyn(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "blochdyn", *args],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, f"blochdyn {args[0]} failed: {proc.stderr}"


@pytest.fixture(scope="session")
def cli_data(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_outputs")

    def cfg(name, payload):
        path = root / name
        path.write_text(json.dumps(payload))
        return str(path)

    pitchfork = cfg(
        "pitchfork.json",
        {
            "model": {"kind": "pitchfork", "params": {"alpha": 0.5, "t": -0.25}},
            "portrait": {"plane": "y", "offset": 0.0, "n": 41},
            "sweep": {"param": "t", "start": -0.5, "stop": 0.5, "n": 51},
        },
    )
    hopf = cfg(
        "hopf.json",
        {
            "model": {"kind": "hopf", "params": {"delta": 0.9, "eps": 0.25, "b": 0.2}},
            "initial_state": [0.1, 0.0, 0.1],
            "integrator": {"method": "rk45", "t_end": 60.0},
            "portrait": {"plane": "y", "offset": 0.0, "n": 21},
        },
    )
    roessler = cfg(
        "roessler.json",
        {
            "model": {
                "kind": "roessler",
                "params": {"a": 0.1, "b": 0.1, "c": 14.0, "m": 50.0, "eps": 0.35},
            },
            "initial_state": [0.37, 0.02, 0.0],
            "integrator": {"method": "rk45", "t_end": 10.0},
        },
    )
    saddle = cfg(
        "saddle.json",
        {"model": {"kind": "saddle_node", "params": {"alpha": 0.5, "t": -0.75, "b": 0.2}}},
    )

    _blochdyn("portrait", "--config", pitchfork, "--out-prefix", str(root / "pf"))
    _blochdyn("fixed-points", "--config", pitchfork, "--out-prefix", str(root / "pf"))
    _blochdyn("sweep", "--config", pitchfork, "--out-prefix", str(root / "pf"))
    _blochdyn("validate", "--config", pitchfork, "--seed", "1", "--out-prefix", str(root / "pf"))
    _blochdyn("portrait", "--config", hopf, "--out-prefix", str(root / "hp"))
    _blochdyn("simulate", "--config", hopf, "--out-prefix", str(root / "hp"))
    _blochdyn("fixed-points", "--config", hopf, "--out-prefix", str(root / "hp"))
    _blochdyn("simulate", "--config", roessler, "--out-prefix", str(root / "ro"))
    _blochdyn("validate", "--config", saddle, "--seed", "1", "--out-prefix", str(root / "sn"))

    return {
        "portrait_pitchfork": root / "pf_portrait.csv",
        "fixed_points_pitchfork": root / "pf_fixed_points.csv",
        "sweep_pitchfork": root / "pf_sweep.csv",
        "events_pitchfork": root / "pf_events.csv",
        "validate_pitchfork": root / "pf_validate.json",
        "portrait_hopf": root / "hp_portrait.csv",
        "trajectory_hopf": root / "hp_trajectory.csv",
        "fixed_points_hopf": root / "hp_fixed_points.csv",
        "trajectory_roessler": root / "ro_trajectory.csv",
        "validate_saddle": root / "sn_validate.json",
        "root": root,
    }
