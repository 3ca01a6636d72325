"""Scattering Green tensor of planar multilayers in the angular spectrum.

Geometry: ``layers[0]`` is the upper semi-infinite medium, ``layers[-1]`` the
lower one, interfaces are horizontal and the first one sits at ``z = top``
(default 0); the z axis points upwards.  Points are given in global coordinates and must lie in
the same layer, which may be any layer with a lower interface.

For a transverse wave vector ``k`` the normal wave number in layer ``j`` on the
imaginary axis is ``q_j = sqrt(k^2 + eps_j mu_j xi^2 / c^2)``.  The transverse
integral ``int d^2k / (2 pi)^2 ... / (2 q)`` is carried out in the variable
``t = q - n xi / c`` of the source layer, for which ``k dk / q = dt`` and the
integrand is smooth at ``k = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from ..constants import C
from ..duality import ResponsePair
from ..quadrature import MAX_EVALS, integrate_halfline
from ..response import VACUUM, MaterialModel, eval_material
from .blocks import SCATTERING, GreenBlocks, component_tensors
from .bulk import bulk_blocks

GREEN_REL_TOL = 1e-11
_CHUNK = 16  # lateral separations per transverse integral (memory bound)

_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])  # z-hat cross, in plane


@dataclass(frozen=True)
class Layer:
    material: MaterialModel
    thickness: float | None = None  # None for the two outer media


@dataclass(frozen=True)
class PlanarStack:
    """Planar layers listed from top to bottom."""

    layers: tuple[Layer, ...]
    top: float = 0.0

    def __post_init__(self):
        layers = tuple(lay if isinstance(lay, Layer) else Layer(*lay) for lay in self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 2:
            raise ValueError("a stack needs at least the two outer media")
        if layers[0].thickness is not None or layers[-1].thickness is not None:
            raise ValueError("the outermost layers must be semi-infinite (thickness None)")
        for lay in layers[1:-1]:
            if lay.thickness is None or not lay.thickness > 0:
                raise ValueError("interior layers need a positive thickness")

    @classmethod
    def halfspace(cls, substrate: MaterialModel, host: MaterialModel = VACUUM) -> "PlanarStack":
        return cls((Layer(host), Layer(substrate)))

    @classmethod
    def on_substrate(cls, films, substrate: MaterialModel, host: MaterialModel = VACUUM) -> "PlanarStack":
        """Host above, then ``films`` as (material, thickness) pairs, then substrate."""
        return cls((Layer(host), *(Layer(m, d) for m, d in films), Layer(substrate)))

    @classmethod
    def cavity(cls, lower: MaterialModel, gap: float, upper: MaterialModel, medium: MaterialModel = VACUUM):
        return cls((Layer(upper), Layer(medium, gap), Layer(lower)))

    @property
    def host(self) -> MaterialModel:
        return self.layers[0].material

    @property
    def interfaces(self) -> np.ndarray:
        """z coordinates of the interfaces, top to bottom."""
        depths = [float(self.top)]
        for lay in self.layers[1:-1]:
            depths.append(depths[-1] - lay.thickness)
        return np.array(depths)

    def dual(self) -> "PlanarStack":
        return PlanarStack(tuple(Layer(lay.material.dual(), lay.thickness) for lay in self.layers), self.top)

    def merged(self) -> "PlanarStack":
        """Equivalent stack with interfaces between identical media removed."""
        out = [self.layers[0]]
        top = self.top
        for lay in self.layers[1:]:
            prev = out[-1]
            if not _same_medium(prev.material, lay.material):
                out.append(lay)
            elif len(out) == 1 and lay.thickness is not None:
                top -= lay.thickness  # absorbed into the upper medium
            elif lay.thickness is None or prev.thickness is None:
                out[-1] = Layer(prev.material)  # absorbed into the lower medium
            else:
                out[-1] = Layer(prev.material, prev.thickness + lay.thickness)
        if len(out) == 1:
            out.append(Layer(out[0].material))
        return PlanarStack(tuple(out), top)

    def layer_index(self, z: float) -> int:
        zi = self.interfaces
        if z > zi[0]:
            return 0
        below = np.nonzero(zi >= z)[0]
        idx = int(below[-1]) + 1
        if np.any(np.isclose(z, zi, rtol=0, atol=1e-15)):
            raise ValueError(f"z={z} lies on an interface")
        return idx

    def is_trivial(self) -> bool:
        """True if all layers share the same (eps, mu) oscillator content."""
        first = self.layers[0].material
        return all(_same_medium(lay.material, first) for lay in self.layers)

    def response(self, index: int, xi) -> ResponsePair:
        return eval_material(self.layers[index].material, xi)


def _same_medium(a: MaterialModel, b: MaterialModel) -> bool:
    return a.oscillators_eps == b.oscillators_eps and a.oscillators_mu == b.oscillators_mu


def fresnel(chi_a, chi_b, k2, k0sq):
    """Reflection coefficients for a wave in medium a hitting medium b.

    Parameters
    ----------
    chi_a, chi_b : tuple
        Susceptibilities ``(eps - 1, mu - 1)`` of the two media on the
        imaginary axis (scalars or arrays).
    k2 : array
        Squared transverse wave number [1/m^2].
    k0sq : array
        ``(xi / c)^2``.

    Returns
    -------
    r_s, r_p, q_a, q_b
        ``r_s = (mu_b q_a - mu_a q_b) / (mu_b q_a + mu_a q_b)``, ``r_p`` the
        same with eps, and the normal wave numbers.  The numerators are formed
        from susceptibility differences so that weakly contrasting media keep
        full relative accuracy.  Exchanging eps and mu exchanges r_s and r_p.
    """
    xe_a, xm_a = chi_a
    xe_b, xm_b = chi_b
    eps_a, mu_a, eps_b, mu_b = 1 + xe_a, 1 + xm_a, 1 + xe_b, 1 + xm_b
    q_a = np.sqrt(k2 + eps_a * mu_a * k0sq)
    q_b = np.sqrt(k2 + eps_b * mu_b * k0sq)
    def coeff(x_a, x_b, y_a, y_b):
        # response w = 1 + x, partner v = 1 + y; with n^2 = w v,
        # (w_b q_a)^2 - (w_a q_b)^2 = k2 (w_b^2 - w_a^2) + k0^2 w_a w_b (w_b v_a - w_a v_b)
        w_a, w_b = 1 + x_a, 1 + x_b
        bracket = (x_b - x_a) + (y_a - y_b) + (x_b * y_a - x_a * y_b)
        num = k2 * (x_b - x_a) * (w_b + w_a) + k0sq * w_a * w_b * bracket
        return num / (w_b * q_a + w_a * q_b) ** 2

    r_s = coeff(xm_a, xm_b, xe_a, xe_b)
    r_p = coeff(xe_a, xe_b, xm_a, xm_b)
    return r_s, r_p, q_a, q_b


def _layer_params(stack: PlanarStack, xi):
    return [(lay.material.chi_e(xi), lay.material.chi_m(xi)) for lay in stack.layers]


def layer_reflection(stack: PlanarStack, j: int, xi, k2):
    """Effective reflection coefficients seen from inside layer ``j``.

    Returns ``(lower_s, lower_p, upper_s, upper_p, q_j)``; each coefficient is
    referenced to the respective interface of layer ``j``.  ``xi`` and ``k2``
    (squared transverse wave number) broadcast against each other.
    """
    chis = _layer_params(stack, xi)
    k0sq = (np.asarray(xi) / C) ** 2
    n = len(stack.layers)
    q = [np.sqrt(k2 + (1 + xe) * (1 + xm) * k0sq) for xe, xm in chis]
    zero = np.zeros(np.broadcast(np.asarray(xi), np.asarray(k2)).shape)

    def recurse(order):
        # order: layer indices from the far outer medium towards j
        rs = rp = None
        for a, b in zip(order[1:], order[:-1]):
            fs, fp, _, _ = fresnel(chis[a], chis[b], k2, k0sq)
            if rs is None:
                rs, rp = fs, fp
                continue
            ph = np.exp(-2 * q[b] * stack.layers[b].thickness)
            rs = (fs + rs * ph) / (1 + fs * rs * ph)
            rp = (fp + rp * ph) / (1 + fp * rp * ph)
        return rs + zero, rp + zero

    lower = recurse(list(range(n - 1, j - 1, -1))) if j < n - 1 else (zero, zero)
    upper = recurse(list(range(0, j + 1))) if j > 0 else (zero, zero)
    return lower[0], lower[1], upper[0], upper[1], q[j]


def _term_coefficients(Rl, Ru, q, d, z, zp):
    """Amplitudes of the four multiple-reflection terms for one polarisation.

    Returns a list of ``(coef, dir_field, dir_source)`` with direction +1 for
    upward and -1 for downward travelling partial waves.
    """
    if d is None:
        return [(Rl * np.exp(-q * (z + zp)), +1, -1)]
    den = 1.0 - Rl * Ru * np.exp(-2 * q * d)
    return [
        (Rl * np.exp(-q * (z + zp)) / den, +1, -1),
        (Ru * np.exp(-q * (2 * d - z - zp)) / den, -1, +1),
        (Rl * Ru * np.exp(-q * (2 * d + z - zp)) / den, +1, +1),
        (Rl * Ru * np.exp(-q * (2 * d - z + zp)) / den, -1, -1),
    ]


def _dyads(k, q, u, rho_vecs):
    """Azimuthal averages of the polarisation dyads weighted by ``exp(i k . rho)``.

    ``k``, ``q``, ``u`` have shape (N,) and ``rho_vecs`` shape (M, 2).  Returns
    ``ss`` and callables ``sp(ds)``, ``ps(df)``, ``pp(df, ds)`` giving (N, M, 3, 3)
    arrays for the dyads s s, s p^ds, p^df s and p^df p^ds, where
    ``p^dir = u (-i k z-hat - dir q k-hat)``; the imaginary units of odd
    terms are absorbed by the Bessel-function averages.
    """
    rho = np.hypot(rho_vecs[:, 0], rho_vecs[:, 1])
    safe = np.where(rho > 0, rho, 1.0)
    rhat = np.where((rho > 0)[:, None], rho_vecs / safe[:, None], np.array([1.0, 0.0]))
    x = k[:, None] * rho[None, :]
    J0, J1, J2 = special.j0(x), special.j1(x), special.jv(2, x)
    Q = 2 * rhat[:, :, None] * rhat[:, None, :] - np.eye(2)
    M = 0.5 * J0[..., None, None] * np.eye(2) - 0.5 * J2[..., None, None] * Q  # <k k>
    kJ1 = (k[:, None] * J1)[..., None]
    Rr = rhat @ _ROT.T
    shape = x.shape + (3, 3)

    def embed(inplane=None, zz=None, z_row=None, z_col=None):
        out = np.zeros(shape)
        if inplane is not None:
            out[..., :2, :2] = inplane
        if zz is not None:
            out[..., 2, 2] = zz
        if z_row is not None:
            out[..., 2, :2] = z_row
        if z_col is not None:
            out[..., :2, 2] = z_col
        return out

    ss = embed(inplane=_ROT @ M @ _ROT.T)
    sk = embed(inplane=_ROT @ M)
    ks = embed(inplane=M @ _ROT.T)
    s_z = embed(z_col=kJ1 * Rr)
    z_s = embed(z_row=kJ1 * Rr)
    kk = embed(inplane=M)
    zz = embed(zz=-(k**2)[:, None] * J0)
    z_k = embed(z_row=kJ1 * rhat)
    k_z = embed(z_col=kJ1 * rhat)
    u4 = u[:, None, None, None]
    q4 = q[:, None, None, None]

    def b(direction):
        return -direction * q4

    def pp(df, ds):
        return u4**2 * (zz + b(ds) * z_k + b(df) * k_z + b(df) * b(ds) * kk)

    def sp(ds):
        return u4 * (s_z + b(ds) * sk)

    def ps(df):
        return u4 * (z_s + b(df) * ks)

    return ss, sp, ps, pp


def planar_integrand(stack: PlanarStack, j: int, xi: float, z: float, zp: float, rho_vecs, t):
    """Integrand in ``t`` of the four scattering blocks, shape (N, M, 4, 3, 3).

    ``z``, ``zp`` are heights above the lower interface of layer ``j`` and
    ``rho_vecs`` (M, 2) the lateral separations ``r - r'``.
    """
    resp = stack.response(j, xi)
    eps_j, mu_j = resp.epsilon, resp.mu
    nj = np.sqrt(eps_j * mu_j)
    kj = nj * xi / C
    q = kj + t
    k2 = t * (t + 2 * kj)
    k = np.sqrt(k2)
    Rls, Rlp, Rus, Rup, _ = layer_reflection(stack, j, xi, k2)
    d = stack.layers[j].thickness
    u = np.full_like(t, C / (nj * xi))
    ss, sp, ps, pp = _dyads(k, q, u, np.atleast_2d(rho_vecs))

    G = np.zeros_like(ss)
    cl = np.zeros_like(ss)
    cr = np.zeros_like(ss)
    cb = np.zeros_like(ss)
    # i K x s = -kj p^dir ; i K x p^dir = kj s
    for coef, df, ds in _term_coefficients(Rls, Rus, q, d, z, zp):
        c = coef[:, None, None, None]
        G += c * ss
        cl += c * (-kj) * ps(df)
        cr += c * (-kj) * sp(ds)
        cb += c * kj**2 * pp(df, ds)
    for coef, df, ds in _term_coefficients(Rlp, Rup, q, d, z, zp):
        c = coef[:, None, None, None]
        G += c * pp(df, ds)
        cl += c * kj * sp(ds)
        cr += c * kj * ps(df)
        cb += c * kj**2 * ss
    pref = mu_j / (4 * np.pi)
    k0 = xi / C
    # integrate the blocks directly so all components share units
    return pref * np.stack([k0**2 * G, cb, -k0 * cr, -k0 * cl], axis=2)


def _layer_of_pair(stack: PlanarStack, z, z_prime):
    j = stack.layer_index(z)
    if stack.layer_index(z_prime) != j:
        raise ValueError("both points must lie in the same layer")
    if j == len(stack.layers) - 1:
        raise ValueError("points in the lowest medium are not supported")
    return j


def scattering_blocks_array(stack: PlanarStack, z: float, z_prime: float, rho_vecs, xi: float,
                            rel_tol: float = GREEN_REL_TOL, max_evals: int = MAX_EVALS) -> np.ndarray:
    """Scattering blocks for many lateral separations at fixed heights.

    Returns an (M, 4, 3, 3) array (order ee, mm, em, me) for the point pairs
    ``r = (rho, z)``, ``r' = (0, z')`` with ``rho`` the rows of ``rho_vecs``.

    Raises
    ------
    IntegrationError
        If the transverse integral does not converge; the exception carries
        the achieved error estimate.
    """
    if not xi > 0:
        raise ValueError("xi must be > 0")
    rho_vecs = np.atleast_2d(np.asarray(rho_vecs, dtype=float))
    j = _layer_of_pair(stack, z, z_prime)
    if stack.is_trivial():
        return np.zeros((len(rho_vecs), 4, 3, 3))
    bottom = stack.interfaces[j]
    zl, zpl = z - bottom, z_prime - bottom
    d = stack.layers[j].thickness
    depth = zl + zpl if d is None else min(zl + zpl, 2 * d - zl - zpl, 2 * d - abs(zl - zpl))
    scale = 1.0 / max(depth, 1e-30)

    # nearest separations first; their magnitude sets the absolute tolerance of
    # the far ones, whose small values come out of strong cancellation
    order = np.argsort(np.hypot(rho_vecs[:, 0], rho_vecs[:, 1]), kind="stable")
    out = np.empty((len(rho_vecs), 4, 3, 3))
    abs_tol = 0.0
    for start in range(0, len(order), _CHUNK):
        sel = order[start:start + _CHUNK]
        chunk = rho_vecs[sel]

        def f(t, chunk=chunk):
            return planar_integrand(stack, j, xi, zl, zpl, chunk, t).reshape(len(t), -1)

        res = integrate_halfline(f, scale, rel_tol=rel_tol, abs_tol=abs_tol, max_evals=max_evals)
        out[sel] = res.value.reshape(len(chunk), 4, 3, 3)
        if start == 0:
            abs_tol = rel_tol * float(np.max(np.abs(res.value)))
    return out


def planar_scattering_blocks(stack: PlanarStack, r, r_prime, xi: float, rel_tol: float = GREEN_REL_TOL) -> GreenBlocks:
    """Scattering part of the duality blocks for two points in one layer."""
    r, r_prime = np.asarray(r, dtype=float), np.asarray(r_prime, dtype=float)
    blocks = scattering_blocks_array(stack, r[2], r_prime[2], (r - r_prime)[None, :2], xi, rel_tol)[0]
    return GreenBlocks(blocks[0], blocks[1], blocks[2], blocks[3], SCATTERING, r, r_prime, xi)


def halfspace_scattering_green(stack: PlanarStack, z: float, z_prime: float, rho, xi: float, rel_tol: float = GREEN_REL_TOL) -> np.ndarray:
    """Scattering Green tensor ``G^(1)`` for points in the upper medium [1/m].

    ``rho`` is the lateral separation, a scalar (taken along x) or 2-vector.
    """
    rho_vec = np.array([rho, 0.0]) if np.ndim(rho) == 0 else np.asarray(rho, dtype=float)
    r = np.array([rho_vec[0], rho_vec[1], z])
    rp = np.array([0.0, 0.0, z_prime])
    if stack.layer_index(z) != 0 or stack.layer_index(z_prime) != 0:
        raise ValueError("points must lie in the upper medium")
    return planar_scattering_blocks(stack, r, rp, xi, rel_tol).G


def planar_blocks(stack: PlanarStack, r, r_prime, xi: float, rel_tol: float = GREEN_REL_TOL) -> GreenBlocks:
    """Full blocks (bulk part of the layer plus scattering part)."""
    r, r_prime = np.asarray(r, dtype=float), np.asarray(r_prime, dtype=float)
    j = stack.layer_index(r[2])
    bulk = bulk_blocks(stack.response(j, xi), r, r_prime, xi)
    return bulk + planar_scattering_blocks(stack, r, r_prime, xi, rel_tol)


def coincident_traces(stack: PlanarStack, j: int, xi, z, t):
    """Fast path: diagonal parts of the scattering ``G_ee`` and ``G_mm`` at coincidence.

    ``xi`` and ``t`` broadcast.  Returns ``(ee_par, ee_zz, mm_par, mm_zz)`` where
    ``*_par`` is the common xx = yy element; each still needs the prefactor
    ``mu_j / (4 pi)`` and the ``t`` integration.
    """
    eps_j, mu_j = stack.layers[j].material.epsilon(xi), stack.layers[j].material.mu(xi)
    n2 = eps_j * mu_j
    kj = np.sqrt(n2) * xi / C
    q = kj + t
    k2 = t * (t + 2 * kj)
    Rls, Rlp, Rus, Rup, _ = layer_reflection(stack, j, xi, k2)
    d = stack.layers[j].thickness

    def sums(Rl, Ru):
        a = 0.0
        b = 0.0
        for coef, df, ds in _term_coefficients(Rl, Ru, q, d, z, z):
            if df == ds:
                b = b + coef
            else:
                a = a + coef
        return a, b

    As, Bs = sums(Rls, Rus)
    Ap, Bp = sums(Rlp, Rup)
    k0sq = (xi / C) ** 2
    # s waves: ss -> I_par / 2 ; p waves: p^f p^s -> u^2 (-k^2 zz + dir q^2 I_par / 2)
    ee_par = k0sq * 0.5 * (As + Bs) + 0.5 * q**2 * (Bp - Ap) / n2
    ee_zz = -k2 * (Ap + Bp) / n2
    mm_par = k0sq * n2 * 0.5 * (Ap + Bp) + 0.5 * q**2 * (Bs - As)
    mm_zz = -k2 * (As + Bs)
    return ee_par, ee_zz, mm_par, mm_zz
