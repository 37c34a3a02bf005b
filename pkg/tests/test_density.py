import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from asiadens.contour import ContourSpec
from asiadens.density import (
    ModelParams,
    bulk_grid,
    conditional_density,
    density,
    density_hermite,
    density_saddle,
    density_yor,
    f_function,
    hankel_kernel,
    is_negative_integer,
    kernel_table,
    mean_a,
    mixing_density,
    p_function,
    prefactor,
    psi,
    psi_theta_pi,
)
from asiadens.errors import InvalidParams, NegativeIntegerDegree, Overflow
from asiadens.quadrature import QuadratureConfig
from asiadens.specialfn import gamma_complex

from conftest import rel

Q = QuadratureConfig(rtol=1e-10)


def _oracle_params(d):
    return ModelParams(d["nu"], d["eps"], d["t"], d["w"])


def test_hermite_route_against_oracles(oracles):
    for d in oracles["density"]:
        assert rel(density_hermite(_oracle_params(d), q=Q).value, d["value"]) <= 1e-8, d


def test_yor_route_against_oracles(oracles):
    for d in oracles["density"]:
        assert rel(density_saddle(_oracle_params(d), Q).value, d["value"]) <= 1e-8, d


def test_reference_value_d0(oracles):
    d0 = next(d for d in oracles["density"] if (d["nu"], d["eps"], d["t"], d["w"]) == (0, 1, 1, 1))
    p = ModelParams(0.0, 1.0, 1.0, 1.0)
    for r in (density(p, Q), density_yor(p, "theta-pi", q=Q), density_yor(p, "theta-half", q=Q)):
        assert rel(r.value, d0["value"]) <= 1e-7, r.route


def test_prefactor_transcription():
    c = prefactor(ModelParams(0.0, 1.0, 1.0, 1.0))
    assert c.c == pytest.approx(math.exp(-0.5) / math.sqrt(math.pi), rel=1e-15)
    assert c.log_c == pytest.approx(math.log(c.c), rel=1e-15)


@pytest.mark.parametrize("nu, eps, t, w", [(0.3, 2.0, 1.0, 0.7), (-1.5, -0.5, 0.25, 3.0), (2.5, -1.0, 2.0, 0.2)])
def test_prefactor_change_of_variables(nu, eps, t, w):
    # the w-powers cancel down to the Jacobian of w -> w^(1/eps)
    W = w ** (1 / eps)
    lhs = prefactor(ModelParams(nu, eps, t, w)).c / prefactor(ModelParams(nu, 1.0, t, W)).c
    assert lhs == pytest.approx(w ** (1 / eps - 1) / abs(eps), rel=1e-13)


def test_prefactor_positive_and_overflow():
    w = np.logspace(-3, 3, 20)
    assert np.all(prefactor(ModelParams(-2.0, -1.0, 0.5, w)).c > 0)
    with pytest.raises(Overflow):
        prefactor(ModelParams(0.0, 1.0, 1.0, 1e-305))


@pytest.mark.parametrize("nu", [-1.5, -0.5, 0.0, 0.3, 1.0, 2.5])
@pytest.mark.parametrize("eps", [-1.0, 2.0, -0.5])
def test_power_law_consistency(nu, eps):
    t = 1.0
    w = np.array([0.3, 0.9, 2.5])
    lhs = density_hermite(ModelParams(nu, eps, t, w), q=Q).value
    W = w ** (1 / eps)
    base = density_hermite(ModelParams(nu, 1.0, t, W), q=Q).value
    rhs = 1 / abs(eps) * w ** (1 / eps - 1) * base
    assert np.max(np.abs(lhs / rhs - 1)) <= 1e-8


def test_params_validation():
    for kw in (dict(eps=0.0), dict(t=0.0), dict(w=-1.0), dict(nu=math.nan)):
        args = dict(nu=0.0, eps=1.0, t=1.0, w=1.0) | kw
        with pytest.raises(InvalidParams):
            ModelParams(**args)


def test_psi_small_x_vanishes():
    p = ModelParams(0.0, 1.0, 1.0, 1.0)
    v = psi(1e-6, p)
    for nu in (-0.5, 0.0, 1.0):
        assert abs(1e-6**nu * v) <= 1e-8


def test_psi_real_form_and_contour_change():
    p = ModelParams(0.0, 1.0, 1.0, 1.0)
    x = np.array([0.2, 1.0, 3.0])
    ref = psi(x, p, q=QuadratureConfig(rtol=1e-12))
    assert np.allclose(psi_theta_pi(x, p), ref, rtol=1e-8)
    assert np.allclose(psi(x, p, ContourSpec(2.5, 1.2)), ref, rtol=1e-8)


def test_kernel_positive_and_table():
    eta = np.logspace(-3, 2, 40)
    k, _ = hankel_kernel(eta, 0.5)
    assert np.all(k > 0)
    tab = kernel_table(0.5)
    m, ls, _ = tab(eta)
    assert np.allclose(m * np.exp(ls), k, rtol=1e-10)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.5, -1.5])
def test_p_equals_gamma_f(mu):
    p = ModelParams(0.0, 1.0, 1.0, 1.2)
    P = p_function(mu, p)
    F, _ = f_function(mu, p)
    assert rel(complex(gamma_complex(mu + 1)) * F, P) <= 1e-7
    assert abs(np.imag(P)) == 0.0


def test_f_vanishes_at_minus_one_and_contour_invariance():
    p = ModelParams(0.0, 1.0, 1.0, 1.2)
    F0, _ = f_function(0.0, p)
    assert abs(f_function(-1.0, p)[0]) <= 1e-12 * abs(F0)
    Fa, ea = f_function(0.7, p)
    Fb, eb = f_function(0.7, p, ContourSpec(2.4, 1.5))
    assert abs(Fa - Fb) <= 1e-9 * abs(Fa)


def test_zero_cancellation_near_minus_two():
    p = ModelParams(0.0, 1.0, 1.0, 0.8)
    vals = []
    for d in (1e-2, 1e-3, 1e-4):
        mu = -2 + d
        F, _ = f_function(mu, p)
        assert abs(F) < 10 * d * abs(f_function(-1.5, p)[0])
        vals.append((complex(gamma_complex(mu + 1)) * F).real)
    assert abs(vals[2] - vals[1]) < abs(vals[1] - vals[0])


def test_yor_variants_agree():
    p = ModelParams(0.5, 1.0, 1.0, 0.8)
    half = density_yor(p, "theta-half", q=Q).value
    full = density_yor(p, "theta-pi", q=Q).value
    assert rel(half, full) <= 1e-6


@pytest.mark.parametrize("nu, eps, t, w", [(0.5, 1.0, 1.0, 1.0), (-0.5, -1.0, 1.0, 2.0), (1.0, 1.0, 0.5, 0.6)])
def test_routes_agree(nu, eps, t, w):
    p = ModelParams(nu, eps, t, w)
    h = density_hermite(p, q=Q)
    y = density_yor(p, "general", q=Q)
    assert abs(h.value - y.value) <= 1e-6 * abs(h.value) + h.abs_error + y.abs_error
    assert h.value >= -h.abs_error


def test_hermite_variants_agree():
    p = ModelParams(2.0, 1.0, 1.0, np.array([0.5, 2.0, 6.0]))
    vals = [density_hermite(p, v, q=Q).value for v in ("theta-half", "theta-pi", "general")]
    assert np.allclose(vals[1], vals[0], rtol=1e-6)
    assert np.allclose(vals[2], vals[0], rtol=1e-8)
    # Gamma(3) = 2 multiplies F
    F, _ = f_function(2.0, p.with_w(0.5))
    assert rel(2 * prefactor(p.with_w(0.5)).c * F.real, vals[0][0]) <= 1e-8


def test_dispatch():
    assert density(ModelParams(-2.0, 1.0, 1.0, 0.5)).route == "yor-general"
    assert density(ModelParams(-1.0 + 1e-7, 1.0, 1.0, 0.5)).route == "yor-general"
    assert density(ModelParams(1.3, 1.0, 1.0, 0.5)).route == "hermite-theta-half"
    assert density(ModelParams(-2 + 1e-3, 1.0, 1.0, 0.5)).route == "hermite-theta-half"
    assert is_negative_integer(-3.0) and not is_negative_integer(0.0)
    with pytest.raises(NegativeIntegerDegree):
        density_hermite(ModelParams(-1.0, 1.0, 1.0, 1.0))
    assert "slow-convergence" in density_yor(ModelParams(-1.5, 1.0, 1.0, 1.0), q=Q).flags


def test_continuity_across_guard():
    w = np.array([0.1, 0.5, 2.0])
    for nu in (-2 + 1e-3, -2 - 1e-3, -1 + 1e-3):
        p = ModelParams(nu, 1.0, 1.0, w)
        h = density_hermite(p, q=Q).value
        y = density_yor(p, "general", q=Q, tabulate=True).value
        assert np.max(np.abs(h / y - 1)) <= 1e-5


def test_bad_variants():
    p = ModelParams(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        density_yor(p, "theta-quarter")
    with pytest.raises(ValueError):
        density_hermite(p, "nope")
    with pytest.raises(ValueError):
        density_yor(p, "theta-pi", tabulate=True)


def test_wide_w_array_matches_pointwise():
    w = np.array([1e-6, 1e-2, 1.0, 40.0])
    p = ModelParams(0.3, -1.0, 1.0, w)
    arr = density_hermite(p, q=Q).value
    one = [density_hermite(p.with_w(x), q=Q).value for x in w]
    assert np.allclose(arr, one, rtol=1e-9, atol=0)


def test_conditional_normalization():
    p = ModelParams(0.0, 1.0, 1.0, 1.0)
    u = np.linspace(-12, 6, 3001)
    a = conditional_density(0.3, p.with_w(np.exp(u)))
    assert abs(trapezoid(a * np.exp(u), u) - 1) <= 1e-3


def test_conditional_change_of_variables():
    x = np.array([-0.7, 0.0, 0.3, 1.2])
    w = 0.6
    for eps in (-1.0, 2.0, -0.5):
        lhs = conditional_density(x, ModelParams(0.0, eps, 1.0, w))
        rhs = 1 / abs(eps) * w ** (1 / eps - 1) * conditional_density(x, ModelParams(0.0, 1.0, 1.0, w ** (1 / eps)))
        assert np.allclose(lhs, rhs, rtol=1e-12)


@pytest.mark.parametrize("nu, eps, t, w", [(0.0, 1.0, 1.0, 1.0), (-0.5, -1.0, 1.0, 2.0), (1.0, 2.0, 0.5, 1.3)])
def test_mixing_identity(nu, eps, t, w):
    p = ModelParams(nu, eps, t, w)
    assert rel(mixing_density(p), density(p).value) <= 1e-4


def test_bulk_grid_and_mean():
    g = bulk_grid(0.0, -1.0, 1.0)
    assert len(g) == 12 and np.all(np.diff(g) > 0)
    assert mean_a(-1.0, 0.7) == 0.7
    assert mean_a(0.0, 1.0) == pytest.approx((math.e**2 - 1) / 2)

