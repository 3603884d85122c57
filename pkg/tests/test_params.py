import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_h

from necrobifurc.errors import DomainError
from necrobifurc.params import (
    DimensionalParams,
    ModelParams,
    nondimensionalize,
)


def base_dimensional(**over):
    kw = dict(D=1.0, lam=1.0, lam_M=0.05, lam_A=0.02, mu=1.0, gamma=0.5,
              chi_sigma_dim=0.02, chi_bar=0.02, sigma_inf=1.0, sigma_N=0.3,
              beta_dim=1.5, R0_dim=0.5, R_dim=2.0)
    kw.update(over)
    return DimensionalParams(**kw)


def test_unit_diffusion_length():
    p, d = nondimensionalize(base_dimensional(D=3.7, lam=3.7))
    assert d.L == pytest.approx(1.0, rel=1e-15)
    # with L = 1 the supply rate passes through unchanged
    assert p.beta == pytest.approx(1.5, rel=1e-15)
    assert p.R0 == pytest.approx(0.5, rel=1e-15)
    assert p.R == pytest.approx(2.0, rel=1e-15)


def test_physiological_scales_eps():
    # diffusion on the minute scale, taxis on the hour scale:
    # lam = 1/min, chi_bar*sigma_inf chosen so 1/lam_chi = 60 min
    d = base_dimensional(D=1.0, lam=1.0, chi_bar=1.0 / 60.0, sigma_inf=1.0,
                         chi_sigma_dim=1.0 / 60.0)
    p, diag = nondimensionalize(d)
    assert diag.eps == pytest.approx(1.0 / 60.0, rel=1e-12)
    assert diag.eps == pytest.approx(0.017, abs=2e-3)
    assert diag.t_diffusion == pytest.approx(1.0)
    assert diag.t_taxis == pytest.approx(60.0)
    assert not diag.quasi_steady_warning


def test_quasi_steady_warning_flag():
    d = base_dimensional(chi_bar=0.5, sigma_inf=1.0)
    _, diag = nondimensionalize(d)
    assert diag.eps >= 0.1
    assert diag.quasi_steady_warning


def test_derived_bundle_values():
    d = base_dimensional()
    p, diag = nondimensionalize(d)
    L = math.sqrt(d.D / d.lam)
    lam_chi = d.chi_bar * d.sigma_inf / L ** 2
    assert diag.p_scale == pytest.approx(lam_chi * L * L / d.mu, rel=1e-15)
    assert p.sigma_ul == pytest.approx(0.3, rel=1e-15)
    assert p.chi == pytest.approx(1.0, rel=1e-15)
    assert p.prolif == pytest.approx(d.lam_M / lam_chi, rel=1e-15)
    assert p.apopt == pytest.approx(d.lam_A / d.lam_M, rel=1e-15)
    assert p.apopt_source == "prescribed"
    assert p.g_inv == pytest.approx(d.mu * d.gamma / (lam_chi * L ** 3),
                                    rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(st_h.floats(min_value=0.1, max_value=10.0))
def test_joint_diffusion_consumption_scaling(c):
    """Scaling D and lam together leaves every dimensionless output fixed
    and rescales only the quasi-steady ratio."""
    d1 = base_dimensional()
    d2 = base_dimensional(D=c * d1.D, lam=c * d1.lam)
    p1, g1 = nondimensionalize(d1)
    p2, g2 = nondimensionalize(d2)
    for attr in ("beta", "sigma_ul", "R0", "R", "chi", "g_inv", "prolif",
                 "apopt"):
        assert getattr(p1, attr) == pytest.approx(getattr(p2, attr),
                                                  rel=1e-12)
    assert g2.eps == pytest.approx(g1.eps / c, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st_h.floats(min_value=0.1, max_value=10.0))
def test_mobility_adhesion_tradeoff(c):
    """g_inv depends on mobility and adhesion only through their product,
    so a reciprocal rescaling leaves it unchanged."""
    d1 = base_dimensional()
    d2 = base_dimensional(mu=c * d1.mu, gamma=d1.gamma / c)
    p1, _ = nondimensionalize(d1)
    p2, _ = nondimensionalize(d2)
    assert p2.g_inv == pytest.approx(p1.g_inv, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st_h.floats(min_value=0.1, max_value=10.0))
def test_nutrient_and_taxis_unit_rescaling(c):
    """Rescaling the nutrient unit with a compensating taxis unit keeps
    the whole bundle fixed (lam_chi is unchanged)."""
    d1 = base_dimensional()
    d2 = base_dimensional(sigma_inf=c * d1.sigma_inf,
                          sigma_N=c * d1.sigma_N,
                          chi_bar=d1.chi_bar / c,
                          chi_sigma_dim=d1.chi_sigma_dim / c)
    p1, g1 = nondimensionalize(d1)
    p2, g2 = nondimensionalize(d2)
    for attr in ("beta", "sigma_ul", "chi", "g_inv", "prolif", "apopt"):
        assert getattr(p1, attr) == pytest.approx(getattr(p2, attr),
                                                  rel=1e-12)
    assert g2.eps == pytest.approx(g1.eps, rel=1e-12)


@pytest.mark.parametrize("field,value", [
    ("D", 0.0), ("lam", -1.0), ("mu", 0.0), ("gamma", 0.0),
    ("sigma_inf", 0.0), ("beta_dim", 0.0), ("R0_dim", 0.0),
])
def test_dimensional_domain_errors(field, value):
    with pytest.raises(DomainError):
        base_dimensional(**{field: value})


def test_dimensional_ordering_errors():
    with pytest.raises(DomainError):
        base_dimensional(sigma_N=1.5)  # above sigma_inf
    with pytest.raises(DomainError):
        base_dimensional(R0_dim=3.0)  # above R_dim


def test_model_params_invariants():
    with pytest.raises(DomainError):
        ModelParams(beta=1.0, sigma_ul=0.5, R0=2.0, R=1.0)
    with pytest.raises(DomainError):
        ModelParams(beta=-0.5, sigma_ul=0.5, R0=0.5, R=2.0)
    with pytest.raises(DomainError):
        ModelParams(beta=1.0, sigma_ul=1.0, R0=0.5, R=2.0)
    with pytest.raises(DomainError):
        ModelParams(beta=1.0, sigma_ul=0.5, R0=0.5, R=2.0, chi=-1.0)
    with pytest.raises(DomainError):
        ModelParams(beta=1.0, sigma_ul=0.5, R0=0.5, R=2.0, g_inv=-0.1)
    # beta = 0 is a legitimate no-supply limit
    p = ModelParams(beta=0.0, sigma_ul=0.5, R0=0.5, R=2.0)
    assert p.beta == 0.0
    q = p.with_(chi=2.0)
    assert q.chi == 2.0 and p.chi == 0.0
