"""Green tensor of an unbounded homogeneous medium on the imaginary axis."""

from __future__ import annotations

import numpy as np

from ..constants import C
from ..duality import ResponsePair
from .blocks import DELTA_MIN, FULL, CoincidentPointsError, GreenBlocks, component_tensors

_LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI_CIVITA[_i, _j, _k] = 1.0
    _LEVI_CIVITA[_i, _k, _j] = -1.0


def _check_resp(resp: ResponsePair):
    eps, mu = resp.epsilon, resp.mu
    if np.iscomplexobj(eps) or np.iscomplexobj(mu) or not (eps > 0 and mu > 0):
        raise ValueError("bulk Green tensor needs real positive eps and mu on the imaginary axis")
    return float(eps), float(mu)


def _geometry(separation):
    d = np.asarray(separation, dtype=float)
    dist = float(np.linalg.norm(d))
    if dist < DELTA_MIN:
        raise CoincidentPointsError("bulk Green tensor is singular at coincidence")
    return d / dist, dist


def _scalar_parts(resp, separation, xi):
    eps, mu = _check_resp(resp)
    rhat, dist = _geometry(separation)
    kappa = np.sqrt(eps * mu) * xi / C
    x = kappa * dist
    g = np.exp(-x) / (4 * np.pi * dist)
    a = 1.0 + (1.0 + x) / x**2
    b = (3.0 + 3.0 * x + x**2) / x**2
    return eps, mu, rhat, dist, kappa, x, g, a, b


def bulk_green(resp: ResponsePair, separation, xi: float) -> np.ndarray:
    """Green tensor ``G(r, r', i xi)`` for ``separation = r - r'`` [1/m].

    ``mu * (I - grad grad / kappa^2) exp(-kappa R) / (4 pi R)`` with
    ``kappa = sqrt(eps mu) xi / c``; real and exponentially decaying.
    """
    _, mu, rhat, _, _, _, g, a, b = _scalar_parts(resp, separation, xi)
    return mu * g * (a * np.eye(3) - b * np.outer(rhat, rhat))


def bulk_curls(resp: ResponsePair, separation, xi: float):
    """``(G, curl G, G x <-curl', curl G x <-curl')`` in closed form."""
    _, mu, rhat, dist, kappa, x, g, a, b = _scalar_parts(resp, separation, xi)
    G = mu * g * (a * np.eye(3) - b * np.outer(rhat, rhat))
    grad_g = -g * (1.0 + x) / dist * rhat
    # A_ij = eps_ijl d_l g ; curl G = -mu A, G x <-curl' = mu A
    A = np.einsum("ijl,l->ij", _LEVI_CIVITA, grad_g)
    return G, -mu * A, mu * A, kappa**2 * G


def bulk_blocks(resp: ResponsePair, r, r_prime, xi: float) -> GreenBlocks:
    """Duality blocks of the homogeneous-medium Green tensor."""
    r, r_prime = np.asarray(r, dtype=float), np.asarray(r_prime, dtype=float)
    G, cl, cr, cb = bulk_curls(resp, r - r_prime, xi)
    return component_tensors(G, cl, cr, cb, xi, part=FULL, r=r, r_prime=r_prime)


def bulk_blocks_array(eps, mu, separations, xi) -> np.ndarray:
    """Vectorised :func:`bulk_blocks` for many separations and/or frequencies.

    ``separations`` has shape (N, 3); ``eps``, ``mu`` and ``xi`` are scalars or
    shape (N,).  Returns an (N, 4, 3, 3) array in the order ee, mm, em, me.
    """
    d = np.atleast_2d(np.asarray(separations, dtype=float))
    dist = np.linalg.norm(d, axis=1)
    if np.any(dist < DELTA_MIN):
        raise CoincidentPointsError("bulk Green tensor is singular at coincidence")
    n = len(d)
    eps, mu, xi = (np.broadcast_to(np.asarray(v, dtype=float), (n,)) for v in (eps, mu, xi))
    rhat = d / dist[:, None]
    k0 = xi / C
    kappa = np.sqrt(eps * mu) * k0
    x = kappa * dist
    g = np.exp(-x) / (4 * np.pi * dist)
    a = 1.0 + (1.0 + x) / x**2
    b = (3.0 + 3.0 * x + x**2) / x**2
    G = (mu * g)[:, None, None] * (a[:, None, None] * np.eye(3) - b[:, None, None] * rhat[:, :, None] * rhat[:, None, :])
    grad_g = (-g * (1.0 + x) / dist)[:, None] * rhat
    A = np.einsum("ijl,nl->nij", _LEVI_CIVITA, grad_g) * mu[:, None, None]
    out = np.empty((n, 4, 3, 3))
    out[:, 0] = (k0**2)[:, None, None] * G
    out[:, 1] = (kappa**2)[:, None, None] * G
    out[:, 2] = -k0[:, None, None] * A  # -(xi/c) G x <-curl'
    out[:, 3] = k0[:, None, None] * A  # -(xi/c) curl G
    return out


def _fd_curl_left(func, r, h):
    """Central-difference curl with respect to r of a tensor field func(r)."""
    grads = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        grads.append((func(r + e) - func(r - e)) / (2 * h))
    d = np.stack(grads)  # d[k] = d_k T
    return np.einsum("ikl,klj->ij", _LEVI_CIVITA, d)


def verify_green_residual(resp: ResponsePair, samples, xi: float, rel_step: float = 1e-6) -> float:
    """Largest relative residual of the Helmholtz operator applied to the bulk tensor.

    For each pair ``(r, r')`` the closed-form ``curl G`` is differentiated once
    more by central differences (step ``rel_step * |r - r'|``) to form
    ``curl (1/mu) curl G + (xi/c)^2 eps G``, which vanishes away from
    coincidence.  The residual is measured against ``(xi/c)^2 eps |G|``.
    """
    eps, mu = _check_resp(resp)
    worst = 0.0
    for r, rp in samples:
        r, rp = np.asarray(r, dtype=float), np.asarray(rp, dtype=float)
        h = rel_step * float(np.linalg.norm(r - rp))
        curl = lambda x: bulk_curls(resp, x - rp, xi)[1] / mu  # noqa: E731
        G = bulk_green(resp, r - rp, xi)
        mass = (xi / C) ** 2 * eps * G
        residual = _fd_curl_left(curl, r, h) + mass
        worst = max(worst, float(np.max(np.abs(residual)) / np.max(np.abs(mass))))
    return worst
