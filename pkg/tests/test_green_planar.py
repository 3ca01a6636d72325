import numpy as np
import pytest

from dualcas.constants import C
from dualcas.duality import ResponsePair
from dualcas.green.blocks import SCATTERING, dual_transform_green, max_relative_deviation
from dualcas.green.bulk import bulk_green
from dualcas.green.planar import (
    Layer,
    PlanarStack,
    coincident_traces,
    fresnel,
    halfspace_scattering_green,
    layer_reflection,
    planar_blocks,
    planar_scattering_blocks,
)
from dualcas.quadrature import integrate_halfline
from dualcas.response import VACUUM, MaterialModel, constant_material

from conftest import random_material

XI = 1.5e15
MIRROR = np.diag([1.0, 1.0, -1.0])


def image_green(z, zp, rho, xi, sign):
    """Scattering tensor of an ideal mirror at z = 0: sign=-1 electric, +1 magnetic wall."""
    sep = np.array([rho[0], rho[1], z + zp])
    return sign * bulk_green(ResponsePair(1.0, 1.0), sep, xi) @ MIRROR


def richardson(fn):
    # error of the large-eps limit falls like eps^-1/2
    return 2 * fn(4e8) - fn(1e8)


def test_vacuum_stack_gives_zero():
    stack = PlanarStack((Layer(VACUUM), Layer(VACUUM, 1e-8), Layer(VACUUM)))
    assert np.array_equal(halfspace_scattering_green(stack, 1e-7, 2e-7, 1e-8, XI), np.zeros((3, 3)))


def test_impedance_matched_normal_incidence():
    m = MaterialModel([(2e16, 1e16, 0)], [(2e16, 1e16, 0)])
    xi = np.array([1e14, 1e15, 1e16])
    _, r_p, _, _ = fresnel((0.0, 0.0), (m.chi_e(xi), m.chi_m(xi)), 0.0, (xi / C) ** 2)
    assert np.all(np.abs(r_p) < 1e-15)
    # scalar oracle (sqrt(eps/mu) - 1) / (sqrt(eps/mu) + 1) for a mismatched case
    eps, mu = 4.0, 1.0
    _, r_p, _, _ = fresnel((0.0, 0.0), (eps - 1, mu - 1), 0.0, 1.0)
    assert r_p == pytest.approx((np.sqrt(eps / mu) - 1) / (np.sqrt(eps / mu) + 1), rel=1e-15)


def test_fresnel_matches_textbook_form():
    rng = np.random.default_rng(0)
    for _ in range(20):
        ea, ma, eb, mb = rng.uniform(1, 5, 4)
        k2, k0sq = rng.uniform(0, 4), 1.0
        qa, qb = np.sqrt(k2 + ea * ma * k0sq), np.sqrt(k2 + eb * mb * k0sq)
        rs, rp, _, _ = fresnel((ea - 1, ma - 1), (eb - 1, mb - 1), k2, k0sq)
        assert rs == pytest.approx((mb * qa - ma * qb) / (mb * qa + ma * qb), rel=1e-12, abs=1e-15)
        assert rp == pytest.approx((eb * qa - ea * qb) / (eb * qa + ea * qb), rel=1e-12, abs=1e-15)


def test_fresnel_weak_contrast_accuracy():
    # first order in d = chi_b at k = k0 = 1: r_p = 3d/8, r_s = -d/8 (rounding through 1 + d would lose 4 digits)
    d = 1e-12
    rs, rp, _, _ = fresnel((0.0, 0.0), (d, 0.0), 1.0, 1.0)
    assert rp == pytest.approx(3 * d / 8, rel=1e-10, abs=0)
    assert rs == pytest.approx(-d / 8, rel=1e-10, abs=0)


def test_fresnel_duality_swaps_polarisations():
    rng = np.random.default_rng(3)
    k2 = np.geomspace(1e8, 1e18, 25)
    for _ in range(10):
        a, b = rng.uniform(0, 10, 2), rng.uniform(0, 10, 2)
        k0sq = rng.uniform(1e10, 1e16)
        rs, rp, _, _ = fresnel(tuple(a), tuple(b), k2, k0sq)
        rs_d, rp_d, _, _ = fresnel(tuple(a[::-1]), tuple(b[::-1]), k2, k0sq)
        assert np.array_equal(rs, rp_d) and np.array_equal(rp, rs_d)


def test_multilayer_reflection_duality():
    rng = np.random.default_rng(8)
    stack = PlanarStack.on_substrate([(random_material(rng), 2e-8), (random_material(rng), 5e-8)],
                                     random_material(rng))
    k2 = np.geomspace(1e10, 1e17, 30)
    a, b = layer_reflection(stack, 0, XI, k2), layer_reflection(stack.dual(), 0, XI, k2)
    np.testing.assert_array_equal(a[0], b[1])
    np.testing.assert_array_equal(a[1], b[0])


@pytest.mark.parametrize("sign,which", [(-1, "eps"), (1, "mu")])
def test_perfect_mirror_image_oracle(sign, which):
    z, zp, rho = 1e-7, 2.5e-7, np.array([0.7e-7, -0.4e-7])

    def compute(big):
        mat = constant_material(big, 1.0) if which == "eps" else constant_material(1.0, big)
        return halfspace_scattering_green(PlanarStack.halfspace(mat), z, zp, rho, XI)

    ref = image_green(z, zp, rho, XI, sign)
    single = compute(1e8)
    assert np.max(np.abs(single - ref)) < 1e-3 * np.max(np.abs(ref))
    assert np.max(np.abs(richardson(compute) - ref)) < 1e-6 * np.max(np.abs(ref))


def test_mirror_magnetic_block_is_dual_image():
    # G_mm of an electric wall equals G_ee of a magnetic wall (vacuum side)
    r, rp = np.array([0.3e-7, 0.0, 1e-7]), np.array([0.0, 0.2e-7, 2e-7])

    def gmm(big):
        return planar_scattering_blocks(PlanarStack.halfspace(constant_material(big, 1.0)), r, rp, XI).Gmm

    ref = (XI / C) ** 2 * image_green(r[2], rp[2], (r - rp)[:2], XI, +1)
    assert np.max(np.abs(richardson(gmm) - ref)) < 1e-6 * np.max(np.abs(ref))


def test_reciprocity_in_a_film():
    rng = np.random.default_rng(12)
    stack = PlanarStack((Layer(random_material(rng)), Layer(random_material(rng), 3e-7),
                         Layer(random_material(rng), 1e-7), Layer(random_material(rng))))
    r, rp = np.array([2e-8, -1e-8, -0.8e-7]), np.array([-3e-8, 4e-8, -2.1e-7])
    a, b = planar_blocks(stack, r, rp, XI), planar_blocks(stack, rp, r, XI)
    scale = np.max(np.abs(a.as_array()))
    for x, y in ((a.Gee, b.Gee.T), (a.Gmm, b.Gmm.T), (a.Gem, -b.Gme.T)):
        assert np.max(np.abs(x - y)) < 1e-10 * scale


def test_halfspace_duality_law():
    rng = np.random.default_rng(21)
    stack = PlanarStack.halfspace(random_material(rng))
    for _ in range(10):
        r, rp = rng.normal(size=3) * 5e-8, rng.normal(size=3) * 5e-8
        r[2], rp[2] = abs(r[2]) + 1e-8, abs(rp[2]) + 1e-8
        xi = rng.uniform(1e14, 1e16)
        blocks = planar_blocks(stack, r, rp, xi)
        direct = planar_blocks(stack.dual(), r, rp, xi)
        vac = ResponsePair(1.0, 1.0)
        assert max_relative_deviation(dual_transform_green(blocks, vac, vac), direct) < 1e-10


def test_scattering_blocks_at_coincidence_transform():
    rng = np.random.default_rng(22)
    stack = PlanarStack.halfspace(random_material(rng), host=random_material(rng))
    r = np.array([0.0, 0.0, 4e-8])
    b = planar_scattering_blocks(stack, r, r, XI)
    assert b.part == SCATTERING
    resp = stack.response(0, XI)
    direct = planar_scattering_blocks(stack.dual(), r, r, XI)
    assert max_relative_deviation(dual_transform_green(b, resp, resp), direct) < 1e-10


def test_real_blocks_and_decay():
    stack = PlanarStack.halfspace(MaterialModel([(1.4e16, 0.0, 5e13)]))
    r = np.array([0.0, 0.0, 5e-8])
    prev = None
    for xi in np.geomspace(1e14, 1e17, 12):
        b = planar_scattering_blocks(stack, r, r, xi)
        assert np.isrealobj(b.as_array())
        val = np.max(np.abs(b.G))
        if prev is not None:
            assert val < prev
        prev = val


def test_coincident_fast_path_matches_general_route():
    rng = np.random.default_rng(30)
    stack = PlanarStack((Layer(VACUUM), Layer(random_material(rng), 6e-8), Layer(random_material(rng))))
    z, j = 3e-8, 0
    b = planar_scattering_blocks(stack, [0, 0, z], [0, 0, z], XI)
    mu = stack.layers[j].material.mu(XI)
    parts = integrate_halfline(lambda t: np.stack(coincident_traces(stack, j, XI, z, t), axis=-1),
                               1 / (2 * z), rel_tol=1e-12).value * mu / (4 * np.pi)
    ee_par, ee_zz, mm_par, mm_zz = parts
    np.testing.assert_allclose([b.Gee[0, 0], b.Gee[2, 2], b.Gmm[0, 0], b.Gmm[2, 2]],
                               [ee_par, ee_zz, mm_par, mm_zz], rtol=1e-9)


def test_stack_validation_and_geometry():
    with pytest.raises(ValueError):
        PlanarStack((Layer(VACUUM),))
    with pytest.raises(ValueError):
        PlanarStack((Layer(VACUUM, 1e-8), Layer(VACUUM)))
    with pytest.raises(ValueError):
        PlanarStack((Layer(VACUUM), Layer(VACUUM, -1.0), Layer(VACUUM)))
    s = PlanarStack((Layer(VACUUM), Layer(VACUUM, 1e-8), Layer(constant_material(2.0))))
    np.testing.assert_allclose(s.interfaces, [0.0, -1e-8])
    assert s.layer_index(1e-9) == 0 and s.layer_index(-5e-9) == 1 and s.layer_index(-2e-8) == 2
    merged = s.merged()
    assert len(merged.layers) == 2 and merged.top == pytest.approx(-1e-8, rel=1e-12, abs=0)
    with pytest.raises(ValueError):
        s.layer_index(0.0)
