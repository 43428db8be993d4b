import math

import pytest
from hypothesis import given, strategies as st

from hestonmc.params import (
    ModelParams,
    ParameterError,
    closest_explicit,
    derive_constants,
    substep_coefficients,
    validate,
)


def make(**kw):
    base = dict(mu=0.0319, nu=8.1 * 0.2**2 / 4, rho=-0.7, varrho=6.21,
                kappa=0.2, s0=100.0, v0=0.102)
    base.update(kw)
    return ModelParams(**base)


class TestValidate:
    def test_benchmark_params_valid(self):
        p = make()
        assert validate(p) is p

    def test_rho_boundary_allowed(self):
        validate(make(rho=1.0))
        validate(make(rho=-1.0))

    def test_kappa_zero_rejected(self):
        with pytest.raises(ParameterError, match="kappa must be positive"):
            validate(make(kappa=0.0))

    @pytest.mark.parametrize("field,value", [
        ("rho", 1.5), ("rho", -1.01), ("varrho", 0.0), ("nu", -0.1),
        ("s0", 0.0), ("v0", -1e-9), ("mu", float("nan")),
    ])
    def test_bad_fields_rejected(self, field, value):
        with pytest.raises(ParameterError):
            validate(make(**{field: value}))


class TestClosestExplicit:
    def test_exact_half(self):
        p = make(kappa=0.61, nu=0.61**2 / 2)
        ce = closest_explicit(p)
        assert ce.n == 2
        assert ce.nu_k == p.nu
        assert ce.mu_k == p.mu
        assert ce.exact

    def test_weighted_family(self):
        p = make()  # nu = 8.1 kappa^2/4
        ce = closest_explicit(p)
        assert ce.n == 8
        assert ce.nu_k == pytest.approx(2 * 0.2**2, abs=0)
        assert not ce.exact

    def test_lower_clamp(self):
        p = make(nu=0.01 * 0.2**2)
        assert closest_explicit(p).n == 1

    @given(st.floats(0.01, 20.0), st.floats(0.05, 2.0), st.floats(-1, 1),
           st.floats(0.1, 10.0))
    def test_idempotent(self, nu, kappa, rho, varrho):
        p = make(nu=nu, kappa=kappa, rho=rho, varrho=varrho)
        ce = closest_explicit(p)
        p2 = make(nu=ce.nu_k, kappa=kappa, rho=rho, varrho=varrho, mu=ce.mu_k)
        ce2 = closest_explicit(p2)
        assert ce2.n == ce.n
        assert ce2.nu_k == ce.nu_k
        assert ce2.mu_k == ce.mu_k
        assert ce2.exact

    @given(st.floats(0.01, 20.0), st.floats(0.05, 2.0),
           st.floats(-1, 1), st.floats(0.1, 10.0))
    def test_drift_identity(self, nu, kappa, rho, varrho):
        p = make(nu=nu, kappa=kappa, rho=rho, varrho=varrho)
        ce = closest_explicit(p)
        lhs = p.mu - p.nu * p.rho / p.kappa
        rhs = ce.mu_k - ce.nu_k * p.rho / p.kappa
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(lhs)))


class TestDeriveConstants:
    def test_a_from_rho(self):
        p = make(kappa=0.61, nu=0.61**2 / 2)
        c = derive_constants(p, closest_explicit(p))
        # oracle: high-precision sqrt(1 - 0.7^2)
        assert c.a == pytest.approx(0.7141428428542850, abs=1e-12)

    def test_decay_constant(self):
        p = make(kappa=0.61, nu=0.61**2 / 2)
        c = derive_constants(p, closest_explicit(p))
        # oracle: exp(-6.21/4) evaluated at high precision
        assert c.alpha_h == pytest.approx(0.21171801661471059, abs=1e-12)
        assert c.sigma_h == pytest.approx(0.11961774810620988, abs=1e-12)
        assert 0.0 < c.alpha_h < 1.0
        assert c.sigma_h > 0.0

    def test_exact_case_no_weights(self):
        p = make(kappa=0.61, nu=0.61**2 / 2)
        c = derive_constants(p, closest_explicit(p))
        assert c.e == 0.0
        assert c.f == 0.0

    def test_weighted_constants(self):
        p = make()
        c = derive_constants(p, closest_explicit(p))
        assert c.e == pytest.approx(0.025, rel=1e-12)
        assert c.f == pytest.approx(0.025 * (0.04 - 0.081 - 0.08) / 2, rel=1e-12)
        assert c.n2 == 4
        assert c.b == pytest.approx(0.0319 - 0.081 * (-0.7) / 0.2, rel=1e-12)

    def test_substep_coefficients_recover_half_step(self):
        decay, noise = substep_coefficients(6.21, 0.61, 2)
        assert decay == pytest.approx(math.exp(-6.21 / 4), rel=1e-15)
        assert noise == pytest.approx(
            0.61 * math.sqrt((1 - math.exp(-6.21 / 2)) / (4 * 6.21)), rel=1e-15
        )
