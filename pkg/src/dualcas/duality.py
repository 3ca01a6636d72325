"""Electric-magnetic duality group and its action on fields and responses.

A duality element is a rotation by ``theta`` in the space of dual pairs
combined with a rescaling by ``r``.  Media with non-unit relative impedance
only admit the discrete subgroup ``theta = n*pi/2`` (the Z4 members).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TAU_ALG = 1e-12
"""Relative tolerance for algebraic identities."""

SYMPLECTIC = np.array([[0.0, 1.0], [-1.0, 0.0]])

# Physical dimension of each entry after impedance / c rescaling.  Used only for
# bookkeeping checks on DualPair labels.
_LABEL_DIMENSIONS = {
    "E": "V/m",
    "Z0H": "V/m",
    "Z0D": "T",
    "B": "T",
    "Z0P": "T",
    "mu0M": "T",
    "P": "C/m^2",
    "M/c": "C/m^2",
    "P_A": "C/m^2",
    "M_A/c": "C/m^2",
    "P_N": "C/m^2",
    "M_N/c": "C/m^2",
    "f_e": "f",
    "f_m": "f",
}


class DualityError(ValueError):
    """A transformation is not admissible for the given response functions."""


class SingularResponseError(DualityError):
    """A response function vanishes where its inverse or phase is required."""


@dataclass(frozen=True)
class DualityElement:
    """Element ``D(r, theta)`` of R+ x SO(2).

    ``theta`` is stored in radians and reduced modulo ``2*pi``.
    """

    r: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"scale factor must be positive, got r={self.r}")
        object.__setattr__(self, "theta", math.fmod(self.theta, 2 * math.pi) % (2 * math.pi))

    @property
    def matrix(self) -> np.ndarray:
        return duality_matrix(self)

    def quarter_turns(self) -> int | None:
        """Return n if theta is (numerically) n*pi/2, else None."""
        n = round(self.theta / (math.pi / 2))
        if abs(self.theta - n * math.pi / 2) <= TAU_ALG * 2 * math.pi:
            return n % 4
        return None


@dataclass(frozen=True)
class DualPair:
    """Ordered pair of quantities that transform together under duality."""

    first: np.ndarray | complex | float
    second: np.ndarray | complex | float
    labels: tuple[str, str] = ("x", "y")

    def __post_init__(self):
        first = np.asarray(self.first)
        second = np.asarray(self.second)
        if first.shape != second.shape:
            raise ValueError(f"pair entries have different shapes {first.shape} and {second.shape}")
        a, b = (lbl.rstrip("*") for lbl in self.labels)
        da, db = _LABEL_DIMENSIONS.get(a), _LABEL_DIMENSIONS.get(b)
        if da is not None and db is not None and da != db:
            raise ValueError(f"labels {a!r} [{da}] and {b!r} [{db}] do not form a dual pair")


@dataclass(frozen=True)
class ResponsePair:
    """Relative permittivity and permeability at one frequency."""

    epsilon: complex
    mu: complex

    def swapped(self) -> "ResponsePair":
        return ResponsePair(self.mu, self.epsilon)


def duality_matrix(elem: DualityElement) -> np.ndarray:
    """Real 2x2 matrix ``[[r cos, r sin], [-r sin, r cos]]``."""
    r, th = elem.r, elem.theta
    c, s = math.cos(th), math.sin(th)
    # exact zeros at quarter turns keep the Z4 members integer-valued
    n = elem.quarter_turns()
    if n is not None:
        c, s = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[n]
    return np.array([[r * c, r * s], [-r * s, r * c]])


def z4_member(n: int) -> np.ndarray:
    """Member ``D_n`` of the discrete duality group (n taken mod 4)."""
    return duality_matrix(DualityElement(1.0, (n % 4) * math.pi / 2))


def transform_pair(pair: DualPair, elem: DualityElement) -> DualPair:
    """Apply ``D(r, theta)`` to a dual pair; labels are starred."""
    m = duality_matrix(elem)
    x, y = np.asarray(pair.first), np.asarray(pair.second)
    first = m[0, 0] * x + m[0, 1] * y
    second = m[1, 0] * x + m[1, 1] * y
    if first.ndim == 0:
        first, second = first.item(), second.item()
    labels = tuple(lbl + "*" for lbl in pair.labels)
    return DualPair(first, second, labels)


def check_invariance_condition(resp: ResponsePair, theta: float, tol: float = TAU_ALG) -> bool:
    """True when the rotated constitutive matrix stays diagonal.

    The off-diagonal element ``(mu - eps) sin(theta) cos(theta)`` must vanish,
    which happens for unit impedance or for quarter turns.
    """
    off = (resp.mu - resp.epsilon) * math.sin(theta) * math.cos(theta)
    scale = max(abs(resp.epsilon), abs(resp.mu), 1.0)
    return abs(off) <= tol * scale


def transform_response(resp: ResponsePair, theta: float) -> ResponsePair:
    """Transformed ``(eps, mu)``: ``(eps cos^2 + mu sin^2, eps sin^2 + mu cos^2)``."""
    if not check_invariance_condition(resp, theta):
        raise DualityError(
            f"theta={theta} is not a multiple of pi/2 and eps={resp.epsilon} != mu={resp.mu}"
        )
    n = DualityElement(1.0, theta).quarter_turns()
    if n is not None:
        # quarter turns are exact permutations
        return resp if n % 2 == 0 else resp.swapped()
    c2, s2 = math.cos(theta) ** 2, math.sin(theta) ** 2
    return ResponsePair(resp.epsilon * c2 + resp.mu * s2, resp.epsilon * s2 + resp.mu * c2)


def excitation_transform_matrix(resp: ResponsePair, elem: DualityElement) -> np.ndarray:
    """Complex 2x2 matrix mixing the electric and magnetic bosonic excitations.

    Raises
    ------
    SingularResponseError
        If eps or mu is zero.
    DualityError
        If ``elem`` is not admissible for ``resp``.
    """
    eps, mu = complex(resp.epsilon), complex(resp.mu)
    if eps == 0 or mu == 0:
        raise SingularResponseError("excitation transform needs nonzero eps and mu")
    if not check_invariance_condition(resp, elem.theta):
        raise DualityError(f"theta={elem.theta} not admissible for eps={eps}, mu={mu}")
    m = duality_matrix(elem)
    rc, rs = m[0, 0], m[0, 1]
    return np.array(
        [
            [rc, -1j * (mu / abs(mu)) * rs],
            [-1j * (abs(eps) / eps) * rs, rc],
        ]
    )
