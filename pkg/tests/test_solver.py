"""Tests for the integrators, the linear-model closed form, and trapping.

Closed-form oracle for constant diagonal rates (h11, h22, h33):
    z(t)  ->  zeq + (z0 - zeq) exp(-(h11 + h22) t),  zeq = (h11-h22)/(h11+h22)
    s(t)  =   s0 exp(-gamma t),  s = x + iy,  gamma = (h11 + h22 + 4 h33)/2
For h11 = 2, h22 = 1 the stationary point is z = 1/3.
"""

import math

import numpy as np
import pytest

from blochdyn.core import BlochVector
from blochdyn.dynamics import field
from blochdyn.errors import (
    AdmissibilityViolation,
    InvalidParams,
    StepLimitExceeded,
)
from blochdyn.models import ConstantH, Hopf, Pitchfork, SaddleNode
from blochdyn.solver import (
    IntegratorConfig,
    Trajectory,
    closed_form_1d,
    integrate,
    integrate_field,
    sample_boundary_flux,
)


def test_closed_form_limit_value():
    times = np.array([0.0, 1.0, 40.0])
    z, s = closed_form_1d(2.0, 1.0, 0.0, z0=0.0, s0=0.4 + 0.1j, times=times)
    assert z[0] == 0.0
    assert z[1] == pytest.approx(1.0 / 3.0 * (1.0 - math.exp(-3.0)), rel=1e-14)
    assert z[2] == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert s[1] == pytest.approx((0.4 + 0.1j) * math.exp(-1.5), rel=1e-14)


def test_closed_form_degenerate_rates():
    times = np.linspace(0.0, 3.0, 7)
    z, s = closed_form_1d(0.0, 0.0, 0.5, z0=0.3, s0=1.0, times=times)
    assert (z == 0.3).all()
    # gamma = 2 h33 = 1 even with no population exchange
    assert s[-1] == pytest.approx(math.exp(-3.0), rel=1e-13)


def test_rk45_tracks_closed_form():
    model = ConstantH(2.0, 1.0)
    cfg = IntegratorConfig(method="rk45", t_end=10.0)
    traj = integrate(model, BlochVector(0.4, 0.1, 0.0), cfg)
    z_exact, s_exact = closed_form_1d(
        2.0, 1.0, 0.0, z0=0.0, s0=0.4 + 0.1j, times=traj.times
    )
    err = np.abs(traj.states[:, 2] - z_exact)
    err_x = np.abs(traj.states[:, 0] - s_exact.real)
    err_y = np.abs(traj.states[:, 1] - s_exact.imag)
    assert max(err.max(), err_x.max(), err_y.max()) < 1e-8
    assert traj.times[0] == 0.0
    assert traj.times[-1] == 10.0
    assert (np.diff(traj.times) > 0.0).all()


def test_rk4_fourth_order_convergence():
    model = ConstantH(2.0, 1.0)
    errs = []
    for dt in (0.05, 0.025):
        cfg = IntegratorConfig(method="rk4", dt=dt, t_end=5.0)
        traj = integrate(model, BlochVector(0.0, 0.0, -0.8), cfg)
        z_exact, _ = closed_form_1d(
            2.0, 1.0, 0.0, z0=-0.8, s0=0.0, times=np.array([5.0])
        )
        errs.append(abs(traj.states[-1, 2] - z_exact[0]))
    ratio = errs[0] / errs[1]
    assert 12.0 <= ratio <= 20.0


def test_rk4_lands_exactly_on_t_end():
    cfg = IntegratorConfig(method="rk4", dt=0.3, t_end=1.0)
    traj = integrate(ConstantH(1.0, 1.0), BlochVector(0.0, 0.0, 0.5), cfg)
    assert traj.times[-1] == 1.0


def test_trajectory_stays_inside_ball():
    cfg = IntegratorConfig(method="rk45", t_end=50.0)
    traj = integrate(Hopf(0.9, 0.25, 0.2), BlochVector(0.1, 0.4, 0.1), cfg)
    assert traj.max_norm() <= 1.0 + 1e-8
    assert isinstance(traj, Trajectory)
    assert traj.final_state().norm() < 1.0


def test_integration_is_deterministic():
    cfg = IntegratorConfig(method="rk45", t_end=30.0)
    a = integrate(Hopf(0.9, 0.25, 0.2), BlochVector(0.1, 0.0, 0.1), cfg)
    b = integrate(Hopf(0.9, 0.25, 0.2), BlochVector(0.1, 0.0, 0.1), cfg)
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)


def test_purity_conserved_under_pure_hamiltonian():
    from blochdyn.core import CoeffMatrix, Hamiltonian2
    from blochdyn.dynamics import assemble_rhs

    h = CoeffMatrix(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    ham = Hamiltonian2(0.7, -0.2, 0.3 - 0.4j)
    f = lambda v: assemble_rhs(h, ham, v)
    cfg = IntegratorConfig(method="rk45", t_end=20.0, abs_tol=1e-12, rel_tol=1e-12)
    traj = integrate_field(f, BlochVector(0.3, 0.2, -0.5), cfg)
    norms = np.sqrt((traj.states**2).sum(axis=1))
    assert np.abs(norms - norms[0]).max() < 1e-9


def test_outward_field_trips_admissibility_guard():
    cfg = IntegratorConfig(method="rk45", t_end=5.0)
    with pytest.raises(AdmissibilityViolation):
        integrate_field(lambda v: (v[0], v[1], v[2]), BlochVector(0.5, 0.0, 0.0), cfg)


def test_step_limit_raises():
    cfg = IntegratorConfig(method="rk4", dt=1e-3, t_end=10.0, max_steps=5)
    with pytest.raises(StepLimitExceeded):
        integrate(ConstantH(1.0, 1.0), BlochVector(0.0, 0.0, 0.5), cfg)


def test_initial_state_must_be_admissible():
    cfg = IntegratorConfig()
    with pytest.raises(AdmissibilityViolation):
        integrate(ConstantH(1.0, 1.0), BlochVector(0.0, 0.0, 1.5), cfg)


def test_invalid_model_params_rejected():
    with pytest.raises(InvalidParams):
        integrate(Pitchfork(0.5, 9.0), BlochVector(0.0, 0.0, 0.1), IntegratorConfig())


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=-1.0)
    with pytest.raises(ValueError):
        IntegratorConfig(max_steps=0)
    with pytest.raises(ValueError):
        IntegratorConfig(abs_tol=0.0)


def test_boundary_flux_is_inward_for_trapping_models():
    for model in (Hopf(0.9, 0.25, 0.2), ConstantH(1.0, 1.0), Pitchfork(0.5, -0.25)):
        report = sample_boundary_flux(model, n_samples=1000, seed=21)
        assert report.max_flux < 0.0
        assert report.n_samples == 1000


def test_boundary_flux_detects_outward_leak():
    # with b beyond the fold value the field points outward near the north pole
    report = sample_boundary_flux(SaddleNode(0.5, -0.75, 0.5), n_samples=4000, seed=3)
    assert report.max_flux > 0.0
