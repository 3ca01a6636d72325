import math

import numpy as np
import pytest

from dualcas.quadrature import IntegrationError, integrate_2d_halfline, integrate_halfline

ANALYTIC_1D = [
    ("exp", lambda x: np.exp(-x), 1.0, 1.0),
    ("lorentzian", lambda x: 1 / (1 + x**2), 1.0, math.pi / 2),
    ("gamma4", lambda x: x**3 * np.exp(-2 * x), 0.5, 0.375),
    ("inv_sqrt", lambda x: 1 / (np.sqrt(x) * (1 + x)), 1.0, math.pi),
    ("log", lambda x: np.log(x) * np.exp(-x), 1.0, -0.5772156649015329),
    ("rational4", lambda x: 1 / (1 + x) ** 4, 1.0, 1 / 3),
]

ANALYTIC_2D = [
    ("exp", lambda x, y: np.exp(-x - y), 1.0),
    ("gamma2", lambda x, y: x * y * np.exp(-x - y), 1.0),
    ("gauss", lambda x, y: np.exp(-x**2 - y**2), math.pi / 4),
    ("coupled", lambda x, y: np.exp(-(x + 1) * (y + 1)), 0.21938393439552029),
]


@pytest.mark.parametrize("name,f,scale,exact", ANALYTIC_1D[:3])
def test_halfline_examples(name, f, scale, exact):
    res = integrate_halfline(f, scale, rel_tol=1e-12)
    assert abs(res.value - exact) <= 1e-10 * abs(exact)


@pytest.mark.parametrize("name,f,exact", ANALYTIC_2D[:3])
def test_2d_examples(name, f, exact):
    res = integrate_2d_halfline(f, (1.0, 1.0), rel_tol=1e-10)
    assert abs(res.value - exact) <= 1e-8 * exact


@pytest.mark.parametrize("name,f,scale,exact", ANALYTIC_1D)
@pytest.mark.parametrize("rel_tol", [1e-6, 1e-8, 1e-10])
def test_error_estimate_honest_1d(name, f, scale, exact, rel_tol):
    res = integrate_halfline(f, scale, rel_tol=rel_tol)
    assert abs(res.value - exact) <= 10 * res.error_estimate
    assert res.error_estimate <= rel_tol * abs(res.value)


@pytest.mark.parametrize("name,f,exact", ANALYTIC_2D)
@pytest.mark.parametrize("rel_tol", [1e-6, 1e-9])
def test_error_estimate_honest_2d(name, f, exact, rel_tol):
    res = integrate_2d_halfline(f, (1.0, 1.0), rel_tol=rel_tol)
    assert abs(res.value - exact) <= 10 * res.error_estimate


@pytest.mark.parametrize("s", [1e-3, 1.0, 1e3])
def test_scale_invariance(s):
    base = integrate_halfline(lambda x: x**3 * np.exp(-2 * x), 0.5, rel_tol=1e-10).value
    res = integrate_halfline(lambda x: (x / s) ** 3 * np.exp(-2 * x / s) / s, 0.5 * s, rel_tol=1e-10)
    assert res.value == pytest.approx(base, rel=1e-10, abs=0)


def test_vector_valued_components():
    res = integrate_halfline(lambda x: np.stack([np.exp(-x), np.exp(-2 * x)], axis=-1), 1.0, rel_tol=1e-12)
    np.testing.assert_allclose(res.value, [1.0, 0.5], rtol=1e-11)
    assert res.error_estimate.shape == (2,)


def test_non_convergence_reports_best_estimate():
    with pytest.raises(IntegrationError) as info:
        integrate_halfline(lambda x: 1 / (1 + x), 1.0, rel_tol=1e-10, max_evals=20_000)
    assert info.value.result.evaluations <= 20_000
    assert np.isfinite(info.value.result.value)


def test_non_finite_integrand_rejected():
    with pytest.raises(IntegrationError):
        integrate_halfline(lambda x: np.where(x > 1, np.nan, 1.0), 1.0)


def test_bad_scale():
    with pytest.raises(ValueError):
        integrate_halfline(np.exp, 0.0)
    with pytest.raises(ValueError):
        integrate_2d_halfline(lambda x, y: x * y, (1.0, -1.0))


def test_deterministic():
    f = ANALYTIC_1D[4][1]
    a, b = integrate_halfline(f, 1.0), integrate_halfline(f, 1.0)
    assert a.value == b.value and a.error_estimate == b.error_estimate
