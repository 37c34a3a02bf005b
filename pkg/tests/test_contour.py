import math

import numpy as np
import pytest

from asiadens.contour import (
    ContourSpec,
    auto_truncation,
    integrate,
    parameterize,
    truncation_from_envelope,
)
from asiadens.errors import InvalidContour, TailNotNegligible
from asiadens.quadrature import QuadratureConfig
from asiadens.specialfn import bessel_i_series

Q = QuadratureConfig(rtol=1e-12)


def test_parameterize_theta_pi():
    lower, vert, upper = parameterize(ContourSpec(math.pi, 1.0, truncation=5.0))
    assert (lower.start, lower.end) == (complex(5, -math.pi), complex(0, -math.pi))
    assert (vert.start, vert.end) == (complex(0, -math.pi), complex(0, math.pi))
    assert (upper.start, upper.end) == (complex(0, math.pi), complex(5, math.pi))


def test_parameterize_theta_half():
    _, vert, upper = parameterize(ContourSpec(math.pi / 2, 1.0, truncation=5.0))
    assert vert.start == pytest.approx(-0.5j * math.pi)
    assert upper.point(2.0) == pytest.approx(2 + 0.5j * math.pi)


def test_parameterize_shifted_segment():
    _, vert, _ = parameterize(ContourSpec(2.0, math.e, truncation=5.0))
    assert vert.start == pytest.approx(1 - 2j)
    assert vert.end == pytest.approx(1 + 2j)


@pytest.mark.parametrize("kw", [dict(theta=1.0), dict(theta=3.2), dict(radius=0.5),
                                dict(radius=2.0, truncation=0.5), dict(nodes=0)])
def test_invalid_contours(kw):
    with pytest.raises(InvalidContour):
        ContourSpec(**kw)


def test_oscillatory_flag():
    assert ContourSpec(math.pi / 2).oscillatory
    assert not ContourSpec(2.0).oscillatory


def _bessel_integrand(xi):
    return np.exp(-xi + 2 * np.cosh(xi))


def test_bessel_example():
    r = integrate(_bessel_integrand, ContourSpec(math.pi, 1.0, truncation=6.0), Q)
    assert abs(r.value - complex(bessel_i_series(1, 2))) <= 1e-9


def _yor(t=1.0, eta=0.5):
    return lambda xi: np.exp(-xi * xi / (2 * t) + eta * np.cosh(xi)) * np.sinh(xi)


def test_odd_integrand_vertical_vanishes():
    r = integrate(_yor(), ContourSpec(math.pi, 1.0, truncation=9.0), Q)
    assert abs(r.segments["vertical"]) <= 1e-15


def test_segments_add_up_and_orientation():
    c = ContourSpec(2.6, 1.2, truncation=9.0)
    r = integrate(_yor(), c, Q)
    assert abs(r.value - sum(r.segments.values())) <= 1e-15 * r.abs_integral
    back = integrate(_yor(), c, Q, reverse=True)
    assert back.value == -r.value


def test_symmetric_mode_matches_full():
    c = ContourSpec(2.6, 1.2, truncation=9.0)
    full = integrate(_yor(), c, Q)
    half = integrate(_yor(), c, Q, symmetric=True)
    assert abs(full.value.imag) <= 1e-14
    assert half.value == pytest.approx(full.value.real, rel=1e-12)


@pytest.mark.parametrize("t, eta", [(1.0, 0.5), (0.25, 2.0), (2.0, 0.1)])
def test_contour_independence(t, eta):
    vals, errs = [], []
    for th, R in [(math.pi, 1.0), (2.9, 1.0), (2.2, 1.5), (math.pi / 2 + 0.05, 1.0), (2.8, 1.3)]:
        c = ContourSpec(th, R)
        c = c.with_truncation(auto_truncation(t, eta, c, 1e-16))
        r = integrate(_yor(t, eta), c, Q)
        vals.append(r.value)
        errs.append(r.abs_error_estimate + 1e-15 * r.abs_integral)
    ref = vals[0]
    for v, e in zip(vals[1:], errs[1:]):
        assert abs(v - ref) <= 2 * (e + errs[0])


def test_doubling_nodes_error_estimate():
    f = _yor(1.0, 0.5)
    c = ContourSpec(2.5, 1.0, truncation=9.0, nodes=4)
    e1 = integrate(f, c, Q).abs_error_estimate
    e2 = integrate(f, ContourSpec(2.5, 1.0, truncation=9.0, nodes=8), Q).abs_error_estimate
    assert e2 <= 1.1 * e1


def test_auto_truncation_examples():
    c = ContourSpec(math.pi, 1.0)
    T1 = auto_truncation(1.0, 0.0, c, 1e-12)
    assert T1 == pytest.approx(math.sqrt(math.pi**2 + 2 * math.log(1e12)), abs=2e-3)
    assert T1 == pytest.approx(8.1, abs=0.05)
    assert auto_truncation(0.25, 0.0, c, 1e-12) < T1
    # cos(pi) = -1: the Yor-form bound is 1 on the theta = pi ray
    T2 = auto_truncation(2.0, 1.0, c, 1e-10)
    assert T2 == pytest.approx(math.sqrt(math.pi**2 + 4 * math.log(1e10)), abs=2e-3)


def test_auto_truncation_growth_on_steep_rays():
    c = ContourSpec(2.0, 1.0)
    base = auto_truncation(1.0, 3.0, c, 1e-12)
    assert auto_truncation(1.0, 3.0, c, 1e-12, log_growth=lambda u: 3 * u) > base
    # cosh growth with coupling * cos(theta) > 0 outruns the Gaussian
    with pytest.raises(TailNotNegligible):
        auto_truncation(1.0, -3.0, c, 1e-12)


def test_tail_check():
    with pytest.raises(TailNotNegligible):
        integrate(_yor(1.0, 0.5), ContourSpec(math.pi, 1.0, truncation=3.0), Q)
    with pytest.raises(InvalidContour):
        integrate(_yor(), ContourSpec(math.pi), Q)


def test_envelope_must_decay():
    with pytest.raises(TailNotNegligible):
        truncation_from_envelope(lambda u: u, ContourSpec(), 1e-10)
