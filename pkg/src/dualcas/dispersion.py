"""Ground-state dispersion potentials and the planar Casimir pressure.

All quantities are imaginary-frequency integrals over Green-tensor blocks.
Each function returns its electric and magnetic parts separately, so that the
duality swap of the parts can be checked.  The frequency integrals are scaled
to the relevant distance ``d`` (``xi ~ c / 2d``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import C, EPS0, HBAR
from .green.born import DILUTE_LIMIT, BlockProvider, DensityGrid, born_delta_estimates, bulk_provider
from .green.bulk import bulk_blocks_array
from .green.planar import PlanarStack, coincident_traces
from .quadrature import DEFAULT_REL_TOL, integrate_2d_halfline, integrate_halfline
from .response import VACUUM, AtomModel, MaterialModel, eval_material, local_field_factors

CP_LABELS = ("e", "m")
VDW_LABELS = ("ee", "em", "me", "mm")


@dataclass(frozen=True)
class PotentialBreakdown:
    """Potential split into electric/magnetic parts [J]."""

    components: dict[str, float]
    distance: float
    error_estimate: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", float(sum(self.components[k] for k in self.components)))


@dataclass(frozen=True)
class ForceBreakdown:
    """Planar pressure [N/m^2] split into the parts from the e and m blocks.

    Positive values are repulsive.
    """

    components: dict[str, float]
    distance: float
    error_estimate: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", float(sum(self.components[k] for k in self.components)))


def _breakdown(cls, labels, result, distance):
    values = np.atleast_1d(result.value)
    errors = np.atleast_1d(result.error_estimate)
    comps = {lab: float(v) for lab, v in zip(labels, values)}
    return cls(comps, distance, float(np.sum(errors)))


def _lf(host: MaterialModel, xi, with_local_field: bool):
    if not with_local_field:
        return 1.0, 1.0
    f = local_field_factors(eval_material(host, xi))
    return f.c_e, f.c_m


def _atom_responses(atom: AtomModel, xi):
    """alpha_e and alpha_m = beta / c^2."""
    return atom.alpha(xi), atom.beta(xi) / C**2


def cp_potential(atom: AtomModel, stack: PlanarStack, z_A: float, with_local_field: bool = False,
                 rel_tol: float = DEFAULT_REL_TOL) -> PotentialBreakdown:
    """Casimir-Polder potential of ``atom`` at height ``z_A`` in a planar stack.

    ``U_l = hbar / (2 pi eps0) int dxi [c_l] a_l Tr G^(1)_ll(r_A, r_A, i xi)``
    for ``l`` in (e, m), with ``a_e = alpha``, ``a_m = beta / c^2`` and the
    real-cavity factors ``c_l`` of the medium around the atom if
    ``with_local_field``.  ``z_A`` may lie in any layer except the lowest.

    Raises
    ------
    IntegrationError
        If the double integral does not converge.
    """
    j = stack.layer_index(z_A)
    if j == len(stack.layers) - 1:
        raise ValueError("the atom must lie above the lowest interface")
    z = z_A - stack.interfaces[j]
    d = stack.layers[j].thickness
    dist = float(z if d is None else min(z, d - z))
    if not (atom.alpha_lines or atom.beta_lines) or stack.is_trivial():
        return PotentialBreakdown({"e": 0.0, "m": 0.0}, dist)
    host = stack.layers[j].material

    def f(xi, t):
        ee_par, ee_zz, mm_par, mm_zz = coincident_traces(stack, j, xi, z, t)
        pref = HBAR / (2 * np.pi * EPS0) * host.mu(xi) / (4 * np.pi)
        a_e, a_m = _atom_responses(atom, xi)
        c_e, c_m = _lf(host, xi, with_local_field)
        u_e = pref * c_e * a_e * (2 * ee_par + ee_zz)
        u_m = pref * c_m * a_m * (2 * mm_par + mm_zz)
        return np.stack(np.broadcast_arrays(u_e, u_m), axis=-1)

    res = integrate_2d_halfline(f, (C / (2 * dist), 1 / (2 * dist)), rel_tol=rel_tol)
    return _breakdown(PotentialBreakdown, CP_LABELS, res, dist)


def _separation_vector(separation):
    sep = np.asarray(separation, dtype=float)
    if sep.ndim == 0:
        sep = np.array([0.0, 0.0, float(sep)])
    dist = float(np.linalg.norm(sep))
    if not dist > 0:
        raise ValueError("separation must be nonzero")
    return sep, dist


def vdw_potential(atom_a: AtomModel, atom_b: AtomModel, separation, with_local_field: bool = False,
                  host: MaterialModel | None = None, rel_tol: float = DEFAULT_REL_TOL) -> PotentialBreakdown:
    """van der Waals potential of two atoms in free space or a bulk host.

    ``U_ll' = -hbar / (2 pi eps0^2) int dxi [c_l^A c_l'^B] a_l^A a_l'^B
    Tr[G_ll'(r_A, r_B) G_l'l(r_B, r_A)]`` for the four (l, l') pairs, labelled
    ee, em, me, mm.  ``separation`` is ``r_A - r_B`` as a 3-vector or a
    distance.
    """
    sep, dist = _separation_vector(separation)
    host = VACUUM if host is None else host
    idx = {"e": 0, "m": 1}
    # block index in (ee, mm, em, me) order for G_ll'
    slot = {("e", "e"): 0, ("m", "m"): 1, ("e", "m"): 2, ("m", "e"): 3}

    def f(xi):
        n = len(xi)
        eps, mu = host.epsilon(xi), host.mu(xi)
        ab = bulk_blocks_array(eps, mu, np.broadcast_to(sep, (n, 3)), xi)  # G(r_A, r_B)
        ba = bulk_blocks_array(eps, mu, np.broadcast_to(-sep, (n, 3)), xi)  # G(r_B, r_A)
        resp_a = _atom_responses(atom_a, xi)
        resp_b = _atom_responses(atom_b, xi)
        c_e, c_m = _lf(host, xi, with_local_field)
        lf = (c_e, c_m)
        out = []
        for lab in VDW_LABELS:
            la, lb = lab[0], lab[1]
            tr = np.einsum("nij,nji->n", ab[:, slot[(la, lb)]], ba[:, slot[(lb, la)]])
            out.append(-HBAR / (2 * np.pi * EPS0**2) * lf[idx[la]] * lf[idx[lb]]
                       * resp_a[idx[la]] * resp_b[idx[lb]] * tr)
        return np.stack(np.broadcast_arrays(*out), axis=-1)

    res = integrate_halfline(f, C / (2 * dist), rel_tol=rel_tol)
    return _breakdown(PotentialBreakdown, VDW_LABELS, res, dist)


def casimir_pressure_planar(left: MaterialModel, right: MaterialModel, gap: float,
                            medium: MaterialModel = VACUUM, rel_tol: float = DEFAULT_REL_TOL) -> ForceBreakdown:
    """Casimir pressure between two half-spaces across a planar gap.

    The stress-tensor surface integral is evaluated on the mid-plane of the
    gap: ``P = hbar / pi int dxi [eps (G_zz - Tr G / 2)^(1)_ee
    + mu^-1 (G_zz - Tr G / 2)^(1)_mm]`` (per unit area).  The two terms are
    returned as the components ``e`` and ``m``; their sum is independent of
    the plane, the split is not.  Positive pressure pushes the bodies apart.
    """
    if not gap > 0:
        raise ValueError("gap must be > 0")
    stack = PlanarStack.cavity(left, gap, right, medium)
    z = 0.5 * gap
    if stack.is_trivial():
        return ForceBreakdown({"e": 0.0, "m": 0.0}, gap)

    def f(xi, t):
        ee_par, ee_zz, mm_par, mm_zz = coincident_traces(stack, 1, xi, z, t)
        eps, mu = medium.epsilon(xi), medium.mu(xi)
        pref = HBAR / np.pi * mu / (4 * np.pi)
        p_e = pref * eps * (0.5 * ee_zz - ee_par)
        p_m = pref / mu * (0.5 * mm_zz - mm_par)
        return np.stack(np.broadcast_arrays(p_e, p_m), axis=-1)

    res = integrate_2d_halfline(f, (C / (2 * gap), 1 / (2 * gap)), rel_tol=rel_tol)
    return _breakdown(ForceBreakdown, CP_LABELS, res, gap)


def cp_from_born(grid: DensityGrid, cloud_atom: AtomModel, probe: AtomModel, positions,
                 provider: BlockProvider | None = None, rel_tol: float = DEFAULT_REL_TOL) -> list[PotentialBreakdown]:
    """CP potential of ``probe`` due to a dilute gas, from the Born correction.

    ``U_l(r) = hbar / (2 pi eps0) int dxi a_l Tr dG_ll(r, r, i xi)`` with
    ``dG`` the first-order change caused by ``cloud_atom`` atoms distributed
    on ``grid``, on top of the background ``provider`` (free space by
    default).  To first order in the density this equals the CP potential of
    the corresponding dilute body, or the sum of two-atom potentials.  The
    error estimate includes the grid error from the embedded coarse rule.

    Raises
    ------
    ValueError
        If the gas is not dilute (linearised response above 1e-4).
    """
    if grid.max_delta(cloud_atom) > DILUTE_LIMIT:
        raise ValueError(f"gas is not dilute: linearised response {grid.max_delta(cloud_atom):.3e} > {DILUTE_LIMIT:g}")
    provider = bulk_provider(VACUUM) if provider is None else provider
    out = []
    for r in np.atleast_2d(np.asarray(positions, dtype=float)):
        dist = float(np.min(np.linalg.norm(grid.nodes - r, axis=1))) if len(grid) else 1.0
        if grid.atom_count == 0 or not (probe.alpha_lines or probe.beta_lines):
            out.append(PotentialBreakdown({"e": 0.0, "m": 0.0}, dist))
            continue

        def f(xis, r=r):
            rows = []
            for xi in xis:
                fine, coarse = born_delta_estimates(grid, cloud_atom, provider, r, r, xi)
                coarse = fine if coarse is None else coarse
                a_e, a_m = _atom_responses(probe, xi)
                rows.append([a_e * np.trace(fine.Gee), a_m * np.trace(fine.Gmm),
                             a_e * np.trace(coarse.Gee), a_m * np.trace(coarse.Gmm)])
            return HBAR / (2 * np.pi * EPS0) * np.array(rows)

        res = integrate_halfline(f, C / (2 * dist), rel_tol=rel_tol)
        v, e = res.value, res.error_estimate
        comps = {"e": float(v[0]), "m": float(v[1])}
        err = float(e[0] + e[1] + abs(v[0] - v[2]) + abs(v[1] - v[3]))
        out.append(PotentialBreakdown(comps, dist, err))
    return out
