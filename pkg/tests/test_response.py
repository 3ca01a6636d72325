import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualcas.constants import C
from dualcas.duality import ResponsePair
from dualcas.response import (
    VACUUM,
    AtomModel,
    MaterialModel,
    Oscillator,
    clausius_mosotti_delta,
    constant_material,
    dilute_material,
    dual_atom,
    eval_atom,
    eval_material,
    local_field_factors,
)

W0 = 3e15


def test_eval_material_examples():
    m = MaterialModel([(W0, W0, 0.0)])
    assert eval_material(m, 0.0).epsilon == 2.0
    assert eval_material(m, W0).epsilon == pytest.approx(1.5, rel=1e-15, abs=0)
    assert eval_material(m, 1e6 * W0).epsilon == pytest.approx(1.0, abs=1e-6)
    assert eval_material(m, 0.0).mu == 1.0


def test_negative_xi_rejected():
    with pytest.raises(ValueError):
        eval_material(VACUUM, -1.0)
    with pytest.raises(ValueError):
        eval_atom(AtomModel([(1e-40, W0)]), -1.0)


def test_oscillator_parameters_validated():
    with pytest.raises(ValueError):
        Oscillator(-1.0, 1.0)
    with pytest.raises(ValueError):
        MaterialModel([(1.0, -1.0, 0.0)])
    with pytest.raises(ValueError):
        AtomModel([(1e-40, 0.0)])


def test_drude_term_allowed():
    gold = MaterialModel([(1.37e16, 0.0, 5.32e13)])
    xi = np.geomspace(1e12, 1e18, 50)
    eps = gold.epsilon(xi)
    assert np.all(np.diff(eps) < 0) and np.all(eps > 1)


oscillator = st.tuples(st.floats(1e13, 1e17), st.floats(0, 1e17), st.floats(0, 1e16))


@settings(max_examples=50)
@given(st.lists(oscillator, min_size=1, max_size=3), st.lists(oscillator, max_size=2))
def test_material_monotone_and_real(eps_osc, mu_osc):
    osc = [o for o in eps_osc if o[1] > 0 or o[2] > 0]
    if not osc:
        return
    m = MaterialModel(osc, [o for o in mu_osc if o[1] > 0 or o[2] > 0])
    xi = np.geomspace(1e10, 1e20, 40)
    eps, mu = m.epsilon(xi), m.mu(xi)
    assert np.all(eps >= 1) and np.all(mu >= 1)
    assert np.all(np.diff(m.chi_e(xi)) < 0)
    assert eps.dtype.kind == "f"


def test_eval_atom_examples():
    a = AtomModel([(2e-40, W0)])
    assert eval_atom(a, 0.0) == (2e-40, 0.0)
    assert eval_atom(a, W0)[0] == pytest.approx(1e-40, rel=1e-15, abs=0)
    lines = AtomModel([(2e-40, W0), (3e-40, 2 * W0), (0.5e-40, 9 * W0)])
    assert eval_atom(lines, 0.0)[0] == 2e-40 + 3e-40 + 0.5e-40
    xi = np.geomspace(1e12, 1e18, 30)
    assert np.all(np.diff(lines.alpha(xi)) < 0)


def test_dual_atom():
    electric = AtomModel([(2e-40, W0)], name="a")
    d = dual_atom(electric)
    xi = np.geomspace(1e12, 1e18, 20)
    assert not d.alpha_lines
    np.testing.assert_allclose(d.beta(xi) / C**2, electric.alpha(xi), rtol=1e-15)
    np.testing.assert_allclose(d.alpha_m(xi), electric.alpha_e(xi), rtol=1e-15)
    dd = dual_atom(d)
    np.testing.assert_allclose(dd.alpha(xi), electric.alpha(xi), rtol=1e-15)
    assert dd.name == "a"


def test_self_dual_atom_is_fixed_point():
    a = AtomModel([(2e-40, W0)], [(2e-40 * C**2, W0)])
    d = dual_atom(a)
    xi = np.geomspace(1e12, 1e18, 20)
    np.testing.assert_allclose(d.alpha(xi), a.alpha(xi), rtol=1e-15)
    np.testing.assert_allclose(d.beta(xi), a.beta(xi), rtol=1e-15)


def test_clausius_mosotti_examples():
    atom = AtomModel([(1e-40, W0)])
    assert clausius_mosotti_delta(0.0, atom, 0.0) == (0.0, 0.0)
    de, dk = clausius_mosotti_delta(1e20, atom, 0.0)
    assert de == pytest.approx(1.1294e-9, rel=1e-4, abs=0)
    assert de == pytest.approx(1e20 * 1e-40 / 8.8541878128e-12, rel=1e-15, abs=0)
    assert dk == 0.0
    with pytest.raises(ValueError):
        clausius_mosotti_delta(-1.0, atom, 0.0)


def test_dilute_material_matches_linearised_response():
    atom = AtomModel([(1e-40, W0), (3e-40, 2 * W0)], [(2e-40 * C**2, W0)])
    gas = dilute_material(1e22, atom)
    xi = np.geomspace(1e12, 1e18, 10)
    de, dk = clausius_mosotti_delta(1e22, atom, xi)
    np.testing.assert_allclose(gas.chi_e(xi), de, rtol=1e-14)
    np.testing.assert_allclose(gas.chi_m(xi), -dk, rtol=1e-14)


def test_constant_material():
    m = constant_material(1e8, 1.0)
    assert eval_material(m, 1e15).epsilon == pytest.approx(1e8, rel=1e-12, abs=0)
    assert eval_material(m, 1e15).mu == 1.0
    with pytest.raises(ValueError):
        constant_material(0.5)


def test_local_field_examples():
    f = local_field_factors(ResponsePair(1.0, 1.0))
    assert (f.c_e, f.c_m) == (1.0, 1.0)
    assert local_field_factors(ResponsePair(2.0, 1.0)).c_e == pytest.approx(1.44, rel=1e-15, abs=0)
    assert local_field_factors(ResponsePair(1.0, 2.0)).c_m == pytest.approx(0.36, rel=1e-15, abs=0)
    with pytest.raises(ZeroDivisionError):
        local_field_factors(ResponsePair(-0.5, 1.0))


@given(st.floats(1, 100), st.floats(1, 100))
def test_local_field_duality_pairing(eps, mu):
    f, fd = local_field_factors(ResponsePair(eps, mu)), local_field_factors(ResponsePair(mu, eps))
    assert fd.c_e == pytest.approx((3 * mu / (2 * mu + 1)) ** 2, rel=1e-14)
    assert fd.c_m == pytest.approx((3 / (2 * eps + 1)) ** 2, rel=1e-14)
    # the combination entering potentials swaps exactly
    assert fd.c_e / mu**2 == pytest.approx(f.c_m, rel=1e-14, abs=0)
    assert fd.c_m == pytest.approx(f.c_e / eps**2, rel=1e-14, abs=0)


def test_material_dual_is_involution():
    m = MaterialModel([(1e16, 2e15, 1e13)], [(3e15, 1e15)], "x")
    assert m.dual().dual() == m
    assert m.dual().oscillators_eps == m.oscillators_mu
