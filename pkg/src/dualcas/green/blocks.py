"""The four duality blocks of the Green tensor and their transformation law."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..constants import C
from ..duality import ResponsePair

DELTA_MIN = 1e-12
"""Coincidence guard [m]."""

FULL = "full"
SCATTERING = "scattering_only"


class CoincidentPointsError(ValueError):
    """Raised where a formula is only valid for distinct points."""


@dataclass(frozen=True)
class GreenBlocks:
    """``G_ee, G_mm, G_em, G_me`` at a point pair on the imaginary axis.

    All four blocks are real 3x3 matrices with units 1/m^3.  ``G`` is the
    Green tensor itself (units 1/m), kept for callers that need it.
    """

    Gee: np.ndarray
    Gmm: np.ndarray
    Gem: np.ndarray
    Gme: np.ndarray
    part: str = FULL
    r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    r_prime: np.ndarray = field(default_factory=lambda: np.zeros(3))
    xi: float = 0.0

    @property
    def G(self) -> np.ndarray:
        return (C / self.xi) ** 2 * self.Gee

    def as_array(self) -> np.ndarray:
        """Blocks stacked in the order ee, mm, em, me; shape (4, 3, 3)."""
        return np.stack([self.Gee, self.Gmm, self.Gem, self.Gme])

    def __add__(self, other: "GreenBlocks") -> "GreenBlocks":
        part = SCATTERING if self.part == other.part == SCATTERING else FULL
        return replace(
            self,
            Gee=self.Gee + other.Gee,
            Gmm=self.Gmm + other.Gmm,
            Gem=self.Gem + other.Gem,
            Gme=self.Gme + other.Gme,
            part=part,
        )

    @property
    def coincident(self) -> bool:
        return float(np.linalg.norm(np.asarray(self.r) - np.asarray(self.r_prime))) < DELTA_MIN


def component_tensors(G, curl_left, curl_right, curl_both, xi, **meta) -> GreenBlocks:
    """Assemble the duality blocks from the Green tensor and its curls.

    Parameters
    ----------
    G : (3, 3) array
        Green tensor ``G(r, r', i xi)``.
    curl_left : (3, 3) array
        ``curl G`` acting on the first argument.
    curl_right : (3, 3) array
        ``G x <-curl'`` acting on the second argument.
    curl_both : (3, 3) array
        ``curl G x <-curl'``.
    xi : float
        Imaginary frequency [rad/s].

    Notes
    -----
    With ``omega = i xi``: ``G_ee = (xi/c)^2 G``, ``G_mm = curl G curl'``,
    ``G_em = -(xi/c) G curl'`` and ``G_me = -(xi/c) curl G``.
    """
    k0 = xi / C
    return GreenBlocks(
        Gee=k0**2 * np.asarray(G),
        Gmm=np.asarray(curl_both),
        Gem=-k0 * np.asarray(curl_right),
        Gme=-k0 * np.asarray(curl_left),
        xi=xi,
        **meta,
    )


def dual_transform_green(blocks: GreenBlocks, resp_r: ResponsePair, resp_r_prime: ResponsePair) -> GreenBlocks:
    """Blocks of the dual medium (eps <-> mu) from the original blocks.

    Valid for distinct points, or for scattering parts at coincidence, where
    the contact terms vanish.
    """
    if blocks.coincident and blocks.part != SCATTERING:
        raise CoincidentPointsError("full Green tensor transform is undefined at coincidence")
    eps_r, mu_r = resp_r.epsilon, resp_r.mu
    eps_p, mu_p = resp_r_prime.epsilon, resp_r_prime.mu
    return replace(
        blocks,
        Gee=blocks.Gmm / (mu_r * mu_p),
        Gmm=eps_r * blocks.Gee * eps_p,
        Gem=-blocks.Gme * (eps_p / mu_r),
        Gme=-blocks.Gem * (eps_r / mu_p),
    )


def max_relative_deviation(a: GreenBlocks, b: GreenBlocks) -> float:
    """Largest blockwise deviation relative to the block's own magnitude.

    Blocks far smaller than the largest one are measured against
    ``1e-8`` of the overall magnitude so that rounding noise on a vanishing
    block does not count as a deviation.
    """
    xa, xb = a.as_array(), b.as_array()
    floor = 1e-8 * max(np.max(np.abs(xa)), np.max(np.abs(xb)), 1e-300)
    worst = 0.0
    for x, y in zip(xa, xb):
        scale = max(np.max(np.abs(x)), np.max(np.abs(y)), floor)
        worst = max(worst, float(np.max(np.abs(x - y)) / scale))
    return worst
