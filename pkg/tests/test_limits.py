import math

import numpy as np
import pytest

from calabi_kee.core import DomainError, ManifoldParams
from calabi_kee.geometry import einstein_residual, evaluate_metric, fiber_length, _complex_hessian
from calabi_kee.limits import (
    CylinderLimit,
    EhModel,
    FsCollapse,
    OrbModel,
    convergence_report,
    cylinder_report,
    eh_model_potential,
    eh_model_potential_n2,
    make_model,
    model_profile,
)
from calabi_kee.profiles import kee_residual, solve_t


def test_model_profile_values():
    tau, phi = model_profile(EhModel(2, 2), 0.0)
    assert tau == pytest.approx(math.sqrt(2), abs=1e-15)
    assert phi == pytest.approx(1 / (2 * math.sqrt(2)), abs=1e-15)
    for k in (1, 2, 5):
        assert model_profile(OrbModel(3, k), 0.0) == pytest.approx((0.5, 1 / (4 * k)))
    tau, phi = model_profile(OrbModel(3, 2), 80.0)
    assert tau == pytest.approx(1.0) and phi < 1e-15
    assert model_profile(CylinderLimit(3, 2), 1.0)[1] == pytest.approx(2 / 3)
    assert model_profile(FsCollapse(3, 2), 1.0) == (1.0, 0.0)
    assert FsCollapse(3, 2).base_coeff == 2.0


@pytest.mark.parametrize("n,k", [(2, 2), (3, 1), (4, 3)])
def test_models_solve_the_ode(n, k):
    p = ManifoldParams(n, k)
    s = np.linspace(-8, 8, 161)
    for model in (EhModel(n, k), OrbModel(n, k)):
        tp = np.array([model.tau_phi(x) for x in s])
        tau, phi = tp[:, 0], tp[:, 1]
        if isinstance(model, EhModel):
            closed = (tau**n - 1) / (k * tau ** (n - 1))
            # tau^n - 1 cancels near tau = 1, hence the absolute floor
            assert np.allclose(phi, closed, rtol=1e-12, atol=1e-14)
            assert np.allclose(phi, np.exp(n * s / k) / k / (np.exp(n * s / k) + 1) ** ((n - 1) / n), rtol=1e-12)
            dphi = (1 + (n - 1) / tau**n) / k
        else:
            assert np.allclose(phi, (tau - tau * tau) / k, rtol=1e-12, atol=1e-300)
            dphi = (1 - 2 * tau) / k
        res = kee_residual(p, model.ricci, tau, phi, dphi)
        assert np.max(np.abs(res)) < 1e-12


def test_make_model():
    assert isinstance(make_model("EH", ManifoldParams(2, 2)), EhModel)
    with pytest.raises(DomainError):
        make_model("flat", ManifoldParams(2, 2))


def test_eh_potential_closed_form_n2():
    for lam in (1.001, 1.5, 2.0, 7.0, 100.0):
        assert eh_model_potential(2, 2, lam) == pytest.approx(eh_model_potential_n2(2, lam), abs=1e-11)
    d = eh_model_potential(2, 2, 3.0) - eh_model_potential(2, 2, 2.0)
    assert d == pytest.approx(2 * (3 - 2) + math.log(2 / 4) - math.log(1 / 3), abs=1e-12)


@pytest.mark.parametrize("n,k", [(2, 1), (3, 1), (4, 2), (5, 3)])
def test_eh_potential_derivative(n, k):
    h = 1e-5
    for lam in (1.2, 2.5, 6.0):
        fd = (eh_model_potential(n, k, lam + h) - eh_model_potential(n, k, lam - h)) / (2 * h)
        assert fd == pytest.approx(k * lam**n / (lam**n - 1), abs=1e-8)
    with pytest.raises(DomainError):
        eh_model_potential(n, k, 1.0)


def test_lambda_is_eh_tau():
    for s in np.linspace(-4, 4, 9):
        assert EhModel(3, 2).tau_phi(s)[0] == pytest.approx((math.exp(1.5 * s) + 1) ** (1 / 3), rel=1e-14)


def test_eh_potential_generates_tau():
    # d f(Lambda(s)) / ds = tau
    n, k, h = 3, 2, 1e-5
    m = EhModel(n, k)
    for s in (-1.0, 0.5, 2.0):
        f = lambda x: eh_model_potential(n, k, m.tau_phi(x)[0])  # noqa: E731
        assert (f(s + h) - f(s - h)) / (2 * h) == pytest.approx(m.tau_phi(s)[0], abs=1e-8)


def test_eta_to_eh_report():
    rep = convergence_report(ManifoldParams(2, 2), "eta", "eh", [1 - 10.0**-m for m in range(1, 6)])
    assert rep.monotone_decreasing
    assert rep.sup_tau_dev[-1] < 1e-3 and rep.sup_phi_dev[-1] < 1e-3
    assert all(rep.gauge_matched)


def test_xi_to_orb_report_monotone():
    for n, k in [(2, 2), (3, 1), (2, 1)]:
        rep = convergence_report(ManifoldParams(n, k), "xi", "orb", [1 / k - 10.0**-m for m in range(1, 6)])
        assert rep.monotone_decreasing


def test_xi_to_orb_floor_from_t():
    # deviation at the window edge cannot beat the gap between t and the model value
    p = ManifoldParams(3, 1)
    beta = 1 - 1e-5
    rep = convergence_report(p, "xi", "orb", [beta])
    t = solve_t(p, beta).t
    assert rep.sup_tau_dev[0] >= t - OrbModel(3, 1).tau_phi(-5.0)[0] - 1e-12


def test_fs_collapse_report():
    rep = convergence_report(ManifoldParams(2, 2), "eta", "fs", [10.0**-m for m in range(1, 6)])
    assert rep.monotone_decreasing
    assert rep.sup_tau_dev[-1] < 1e-4 and rep.sup_phi_dev[-1] < 1e-9


@pytest.mark.parametrize("family", ["eta", "xi"])
@pytest.mark.parametrize("n,k", [(2, 2), (3, 1), (4, 3)])
def test_cylinder_report(n, k, family):
    rep = cylinder_report(ManifoldParams(n, k), family, [10.0**-m for m in range(2, 6)])
    d = rep.sup_phi_dev
    assert all(a / b >= 10 for a, b in zip(d, d[1:]))
    assert rep.monotone_decreasing


def test_cylinder_x0_centre():
    p = ManifoldParams(3, 1)
    rep = cylinder_report(p, "eta", [1e-3], x_window=(0.0, 0.0), samples=1)
    assert rep.sup_tau_dev[0] == pytest.approx(1 * 1e-3 / 3, rel=1e-12)


def test_cylinder_window_too_wide():
    with pytest.raises(DomainError):
        cylinder_report(ManifoldParams(2, 2), "eta", [0.1], x_window=(-100.0, 100.0))


def test_einstein_models():
    rng = np.random.default_rng(3)
    for n, k in [(2, 2), (3, 1)]:
        p = ManifoldParams(n, k)
        for model in (EhModel(n, k), OrbModel(n, k)):
            for _ in range(5):
                z = 0.5 * (rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1))
                w = math.exp(rng.uniform(-1, 1))
                assert einstein_residual(p, model, model.ricci, z, w) < 1e-3


def test_orb_n2k1_is_fubini_study():
    p = ManifoldParams(2, 1)
    model = OrbModel(2, 1)
    rng = np.random.default_rng(11)

    def pot(x):
        return math.log(1 + x[0] ** 2 + x[1] ** 2 + x[2] ** 2 + x[3] ** 2)

    for _ in range(50):
        z = complex(*rng.normal(size=2))
        u = complex(*rng.normal(size=2))
        g = evaluate_metric(p, model, [z], u).matrix
        fs = _complex_hessian(pot, np.array([z, u]), 1e-4)
        assert np.max(np.abs(g - fs)) < 1e-6
        # exact form of the Hessian of log(1 + |v|^2)
        v = np.array([z, u])
        rho = 1 + np.vdot(v, v).real
        exact = (np.eye(2) * rho - np.outer(v.conj(), v)) / rho**2
        assert np.max(np.abs(g - exact)) < 1e-8


def test_xi_length_approaches_orb_length():
    # the orbifold fiber has length pi sqrt(k/2); approach is slow (rate ~ t)
    for n, k in [(2, 1), (3, 1)]:
        p = ManifoldParams(n, k)
        limit = math.pi * math.sqrt(k / 2)
        errs = [limit - fiber_length(solve_t(p, 1 / k - 10.0**-m)) for m in range(3, 7)]
        assert all(0 < b < a for a, b in zip(errs, errs[1:]))
