"""First-order (Born) change of the Green tensor due to a dilute atomic gas.

A gas of atoms with number density ``eta`` changes the medium by the
linearised Clausius-Mosotti amounts ``delta eps = eta alpha / eps0`` and
``delta(1/mu) = -eta beta mu0``.  To first order the duality blocks change by

    dG_ll'(r, r') = -sum_n w_n eta_n / eps0 * sum_m a_m G_lm(r, s_n) G_ml'(s_n, r')

with ``a_e = alpha`` and ``a_m = beta / c^2``; the Green tensor itself changes
by ``(c / xi)^2 dG_ee``.  The volume integral runs over the nodes ``s_n`` and
weights ``w_n`` of a :class:`DensityGrid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..constants import C, EPS0, MU0
from ..quadrature import exp_sinh_nodes
from ..response import AtomModel, MaterialModel, eval_atom
from .blocks import SCATTERING, GreenBlocks
from .bulk import bulk_blocks_array
from .planar import PlanarStack, scattering_blocks_array

BORN_GRID_TOL = 1e-3
DILUTE_LIMIT = 1e-4

# provider(points (N, 3), source (3,), xi) -> blocks G(points, source), (N, 4, 3, 3)
BlockProvider = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


class UnresolvedGridError(RuntimeError):
    """The grid estimate of the volume integral misses the requested tolerance."""

    def __init__(self, message, value, error_estimate):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class DensityGrid:
    """Quadrature representation of a density profile.

    Attributes
    ----------
    nodes : (N, 3) array
        Node positions [m].
    weights : (N,) array
        Volume weights [m^3].
    eta : (N,) array
        Number density at the nodes [1/m^3].
    coarse_weights : (N,) array or None
        Weights of an embedded coarser rule on the same nodes (zero where a
        node is not part of it), used for the error estimate.
    """

    nodes: np.ndarray
    weights: np.ndarray
    eta: np.ndarray
    coarse_weights: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        n = len(nodes)
        weights = np.broadcast_to(np.asarray(self.weights, dtype=float), (n,)).copy()
        eta = np.broadcast_to(np.asarray(self.eta, dtype=float), (n,)).copy()
        if np.any(eta < 0):
            raise ValueError("number density must be >= 0")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "eta", eta)
        if self.coarse_weights is not None:
            object.__setattr__(self, "coarse_weights", np.asarray(self.coarse_weights, dtype=float))

    def __len__(self):
        return len(self.nodes)

    @property
    def atom_count(self) -> float:
        return float(np.sum(self.weights * self.eta))

    def max_delta(self, atom: AtomModel) -> float:
        """Largest linearised change of eps or 1/mu over the grid (static limit)."""
        a, b = eval_atom(atom, 0.0)
        return float(np.max(self.eta, initial=0.0) * max(a / EPS0, b * MU0))


def point_cloud(position, volume: float, eta: float) -> DensityGrid:
    """Single-node grid: a small cloud of ``volume`` at ``position``."""
    return DensityGrid(np.asarray(position, dtype=float)[None, :], [volume], [eta])


def _radial_rule(scale, level, extent, t_lo=-3.0):
    """exp-sinh nodes on (0, extent * scale) with the embedded coarser rule."""
    t_hi = math.asinh(math.log(extent) / (0.5 * math.pi))
    _, x, w = exp_sinh_nodes(level, t_lo, t_hi, False)
    k_lo = math.ceil(t_lo * 2**level)
    idx = np.arange(k_lo, k_lo + len(x))
    coarse = np.where(idx % 2 == 0, 2 * w, 0.0)
    return scale * x, scale * w, scale * coarse


def _assemble(center, rho, w_rho, wc_rho, z, w_z, n_phi, eta):
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    R, P, Z = np.meshgrid(rho, phi, z, indexing="ij")
    nodes = np.stack([center[0] + R * np.cos(P), center[1] + R * np.sin(P), Z], axis=-1).reshape(-1, 3)
    dphi = 2 * np.pi / n_phi
    w = (w_rho * rho)[:, None, None] * dphi * np.broadcast_to(w_z, (len(rho), n_phi, len(z)))
    wc = (wc_rho * rho)[:, None, None] * dphi * np.broadcast_to(w_z, (len(rho), n_phi, len(z)))
    return DensityGrid(nodes, w.ravel(), eta, wc.ravel())


def slab_grid(z_lo: float, z_hi: float, eta: float, center=(0.0, 0.0), lateral_scale: float | None = None,
              level: int = 4, n_phi: int = 8, n_z: int = 4, extent: float = 50.0) -> DensityGrid:
    """Laterally infinite slab ``z_lo < z < z_hi`` of uniform density.

    Cylindrical grid about ``center``: ``n_phi`` equispaced angles (exact for
    the trigonometric polynomials met when field points lie on the axis),
    an exp-sinh rule in the radius with characteristic ``lateral_scale`` cut
    at ``extent * lateral_scale`` and ``n_z`` Gauss-Legendre nodes across the
    thickness.  The embedded coarse rule halves the radial resolution.

    The lateral scale should be the distance of the field points from the
    slab; the neglected radial tail then falls off like ``extent**-4``.
    """
    if not z_hi > z_lo:
        raise ValueError("slab needs z_hi > z_lo")
    if lateral_scale is None:
        lateral_scale = z_hi - z_lo
    rho, w_rho, wc_rho = _radial_rule(lateral_scale, level, extent)
    xg, wg = np.polynomial.legendre.leggauss(n_z)
    z = 0.5 * (z_hi + z_lo) + 0.5 * (z_hi - z_lo) * xg
    w_z = 0.5 * (z_hi - z_lo) * wg
    return _assemble(np.asarray(center, dtype=float), rho, w_rho, wc_rho, z, w_z, n_phi, eta)


def halfspace_grid(z_top: float, eta: float, center=(0.0, 0.0), scale: float = 1e-7,
                   level: int = 4, n_phi: int = 8, extent: float = 1e4) -> DensityGrid:
    """Uniform density filling ``z < z_top``; exp-sinh rules in radius and depth.

    ``scale`` should be the distance of the field points from the surface.
    """
    rho, w_rho, wc_rho = _radial_rule(scale, level, extent)
    depth, w_d, _ = _radial_rule(scale, level, extent, -4.0)
    return _assemble(np.asarray(center, dtype=float), rho, w_rho, wc_rho, z_top - depth, w_d, n_phi, eta)


def bulk_provider(host: MaterialModel) -> BlockProvider:
    """Blocks of an unbounded homogeneous ``host``."""

    def provide(points, source, xi):
        return bulk_blocks_array(host.epsilon(xi), host.mu(xi), points - source, xi)

    return provide


def stack_provider(stack: PlanarStack, rel_tol: float = 1e-11, max_evals: int = 200_000) -> BlockProvider:
    """Full blocks (bulk of the layer plus scattering) of a planar stack.

    All points must lie in the layer of ``source``.  Nodes sharing a height
    share one transverse integral.
    """

    def provide(points, source, xi):
        j = stack.layer_index(source[2])
        out = bulk_blocks_array(stack.layers[j].material.epsilon(xi), stack.layers[j].material.mu(xi),
                                points - source, xi)
        heights, inverse = np.unique(points[:, 2], return_inverse=True)
        for i, z in enumerate(heights):
            sel = np.nonzero(inverse == i)[0]
            rho = points[sel, :2] - source[:2]
            out[sel] += scattering_blocks_array(stack, z, source[2], rho, xi, rel_tol, max_evals)
        return out

    return provide


def _reverse(blocks):
    """Blocks at swapped arguments by reciprocity; (N, 4, 3, 3) in and out."""
    out = np.swapaxes(blocks, -1, -2).copy()
    out[:, 2], out[:, 3] = -np.swapaxes(blocks[:, 3], -1, -2), -np.swapaxes(blocks[:, 2], -1, -2)
    return out


def _as_matrix(blocks):
    """(N, 4, 3, 3) in ee, mm, em, me order -> (N, 2, 2, 3, 3) indexed [l, m]."""
    return np.stack([np.stack([blocks[:, 0], blocks[:, 2]], 1), np.stack([blocks[:, 3], blocks[:, 1]], 1)], 1)


def _born_sums(grid: DensityGrid, atom: AtomModel, provider: BlockProvider, r, r_prime, xi):
    a, b = eval_atom(atom, xi)
    resp = np.array([a, b / C**2])
    at_r = provider(grid.nodes, r, xi)  # G(s, r)
    at_rp = at_r if np.array_equal(r, r_prime) else provider(grid.nodes, r_prime, xi)
    left = _as_matrix(_reverse(at_r))  # G_lm(r, s)
    right = _as_matrix(at_rp)  # G_ml'(s, r')
    terms = np.einsum("m,nlmij,nmkjp->nlkip", resp, left, right)
    coef = -grid.eta / EPS0
    fine = np.einsum("n,nlkip->lkip", coef * grid.weights, terms)
    coarse = None
    if grid.coarse_weights is not None:
        coarse = np.einsum("n,nlkip->lkip", coef * grid.coarse_weights, terms)
    return fine, coarse


def _to_blocks(mat, r, r_prime, xi):
    return GreenBlocks(mat[0, 0], mat[1, 1], mat[0, 1], mat[1, 0], SCATTERING, r, r_prime, xi)


def born_delta_estimates(grid: DensityGrid, atom: AtomModel, provider: BlockProvider, r, r_prime, xi: float):
    """Block changes from the full grid rule and from its embedded coarse rule.

    Returns ``(fine, coarse)``; ``coarse`` is None when the grid has no
    embedded rule.
    """
    r, r_prime = np.asarray(r, dtype=float), np.asarray(r_prime, dtype=float)
    fine, coarse = _born_sums(grid, atom, provider, r, r_prime, xi)
    return _to_blocks(fine, r, r_prime, xi), None if coarse is None else _to_blocks(coarse, r, r_prime, xi)


def born_delta_blocks(grid: DensityGrid, atom: AtomModel, provider: BlockProvider, r, r_prime, xi: float,
                      tol: float | None = BORN_GRID_TOL) -> tuple[GreenBlocks, float]:
    """First-order change of all four blocks and its grid error estimate.

    Returns ``(blocks, error)`` where ``error`` is the largest absolute
    difference to the embedded coarse rule (0 when the grid has none).

    Raises
    ------
    UnresolvedGridError
        If ``tol`` is given and the error exceeds ``tol`` times the largest
        block entry.
    """
    r, r_prime = np.asarray(r, dtype=float), np.asarray(r_prime, dtype=float)
    fine, coarse = _born_sums(grid, atom, provider, r, r_prime, xi)
    err = 0.0 if coarse is None else float(np.max(np.abs(fine - coarse)))
    blocks = _to_blocks(fine, r, r_prime, xi)
    scale = float(np.max(np.abs(fine)))
    if tol is not None and err > tol * scale:
        raise UnresolvedGridError(
            f"Born grid unresolved: error estimate {err:.3e} exceeds {tol:g} x {scale:.3e}", blocks, err
        )
    return blocks, err


def born_delta_green(grid: DensityGrid, atom: AtomModel, provider: BlockProvider, r, r_prime, xi: float,
                     tol: float | None = BORN_GRID_TOL) -> np.ndarray:
    """First-order change ``delta G(r, r', i xi)`` of the Green tensor [1/m]."""
    blocks, _ = born_delta_blocks(grid, atom, provider, r, r_prime, xi, tol)
    return (C / xi) ** 2 * blocks.Gee
