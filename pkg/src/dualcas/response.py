"""Material and atomic response functions on the imaginary frequency axis.

Materials are Drude-Lorentz oscillator sums and atoms are two-level sums, so
every response is real, positive and monotonically decreasing in ``xi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C, EPS0, MU0
from .duality import ResponsePair


@dataclass(frozen=True)
class Oscillator:
    """Lorentz oscillator: plasma weight, resonance and damping [rad/s]."""

    plasma: float
    resonance: float
    damping: float = 0.0

    def __post_init__(self):
        for name in ("plasma", "resonance", "damping"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"oscillator {name} must be >= 0, got {getattr(self, name)}")
        if self.resonance == 0 and self.damping == 0 and self.plasma > 0:
            raise ValueError("a free-carrier oscillator needs nonzero damping")


@dataclass(frozen=True)
class Line:
    """Atomic transition: static strength and transition frequency [rad/s]."""

    strength: float
    frequency: float

    def __post_init__(self):
        if not self.strength >= 0:
            raise ValueError(f"line strength must be >= 0, got {self.strength}")
        if not self.frequency > 0:
            raise ValueError(f"transition frequency must be > 0, got {self.frequency}")


def _as_oscillators(items) -> tuple[Oscillator, ...]:
    return tuple(o if isinstance(o, Oscillator) else Oscillator(*o) for o in items)


def _as_lines(items) -> tuple[Line, ...]:
    return tuple(ln if isinstance(ln, Line) else Line(*ln) for ln in items)


def _lorentz_sum(oscillators, xi):
    out = np.zeros_like(xi, dtype=float)
    for osc in oscillators:
        out = out + osc.plasma**2 / (osc.resonance**2 + xi**2 + osc.damping * xi)
    return out


def _line_sum(lines, xi):
    out = np.zeros_like(xi, dtype=float)
    for ln in lines:
        out = out + ln.strength * ln.frequency**2 / (ln.frequency**2 + xi**2)
    return out


def _check_xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("imaginary frequency xi must be >= 0")
    return xi


@dataclass(frozen=True)
class MaterialModel:
    """Oscillator models for the relative permittivity and permeability."""

    oscillators_eps: tuple[Oscillator, ...] = ()
    oscillators_mu: tuple[Oscillator, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "oscillators_eps", _as_oscillators(self.oscillators_eps))
        object.__setattr__(self, "oscillators_mu", _as_oscillators(self.oscillators_mu))

    def chi_e(self, xi):
        """Electric susceptibility eps(i xi) - 1, without rounding through 1."""
        return _lorentz_sum(self.oscillators_eps, _check_xi(xi))

    def chi_m(self, xi):
        """Magnetic susceptibility mu(i xi) - 1."""
        return _lorentz_sum(self.oscillators_mu, _check_xi(xi))

    def epsilon(self, xi):
        """eps(i xi); accepts scalars or arrays."""
        return 1.0 + self.chi_e(xi)

    def mu(self, xi):
        """mu(i xi); accepts scalars or arrays."""
        return 1.0 + self.chi_m(xi)

    def dual(self) -> "MaterialModel":
        """Exchange the electric and magnetic oscillator lists."""
        name = self.name[:-1] if self.name.endswith("*") else (self.name + "*" if self.name else "")
        return MaterialModel(self.oscillators_mu, self.oscillators_eps, name)

    @property
    def is_vacuum(self) -> bool:
        return not any(o.plasma for o in self.oscillators_eps + self.oscillators_mu)


VACUUM = MaterialModel(name="vacuum")


def constant_material(eps: float = 1.0, mu: float = 1.0, cutoff: float = 1e22, name: str = "") -> MaterialModel:
    """Material whose response is flat (eps, mu) well below ``cutoff`` [rad/s].

    Realised as a single undamped oscillator at ``cutoff`` so that causality and
    the high-frequency limit are kept.
    """
    if eps < 1 or mu < 1:
        raise ValueError("oscillator models give eps, mu >= 1 on the imaginary axis")
    osc_e = (Oscillator(float(np.sqrt(eps - 1.0)) * cutoff, cutoff),) if eps > 1 else ()
    osc_m = (Oscillator(float(np.sqrt(mu - 1.0)) * cutoff, cutoff),) if mu > 1 else ()
    return MaterialModel(osc_e, osc_m, name)


def eval_material(model: MaterialModel, xi) -> ResponsePair:
    """Response pair (eps(i xi), mu(i xi))."""
    xi = _check_xi(xi)
    eps, mu = model.epsilon(xi), model.mu(xi)
    if eps.ndim == 0:
        eps, mu = float(eps), float(mu)
    return ResponsePair(eps, mu)


@dataclass(frozen=True)
class AtomModel:
    """Polarizability [C^2 m^2 / J] and magnetizability [J / T^2] line sums.

    ``alpha(i xi) = sum a_k w_k^2 / (w_k^2 + xi^2)``, likewise for ``beta``.
    """

    alpha_lines: tuple[Line, ...] = ()
    beta_lines: tuple[Line, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "alpha_lines", _as_lines(self.alpha_lines))
        object.__setattr__(self, "beta_lines", _as_lines(self.beta_lines))

    def alpha(self, xi):
        return _line_sum(self.alpha_lines, _check_xi(xi))

    def beta(self, xi):
        return _line_sum(self.beta_lines, _check_xi(xi))

    def alpha_e(self, xi):
        """Electric response entering the potentials (= alpha)."""
        return self.alpha(xi)

    def alpha_m(self, xi):
        """Magnetic response entering the potentials (= beta / c^2)."""
        return self.beta(xi) / C**2

    @property
    def frequencies(self) -> tuple[float, ...]:
        return tuple(ln.frequency for ln in self.alpha_lines + self.beta_lines)


def eval_atom(model: AtomModel, xi):
    """(alpha(i xi), beta(i xi))."""
    xi = _check_xi(xi)
    a, b = model.alpha(xi), model.beta(xi)
    if a.ndim == 0:
        return float(a), float(b)
    return a, b


def dual_atom(model: AtomModel) -> AtomModel:
    """Dual atom with ``alpha* = beta / c^2`` and ``beta* = c^2 alpha``.

    This exchanges the electric and magnetic responses ``alpha_e`` and
    ``alpha_m`` that enter the potentials, mirroring eps <-> mu through the
    linearised Clausius-Mosotti relations.  Applying it twice returns the
    original responses.
    """
    alpha = tuple(Line(ln.strength / C**2, ln.frequency) for ln in model.beta_lines)
    beta = tuple(Line(ln.strength * C**2, ln.frequency) for ln in model.alpha_lines)
    name = model.name[:-1] if model.name.endswith("*") else (model.name + "*" if model.name else "")
    return AtomModel(alpha, beta, name)


def clausius_mosotti_delta(eta: float, atom: AtomModel, xi):
    """Linearised medium response of a dilute gas.

    Returns ``(delta_eps, delta_kappa)`` with ``delta_eps = eta alpha / eps0``
    and ``delta_kappa = -eta beta mu0`` (kappa is the inverse permeability).
    """
    if eta < 0:
        raise ValueError("number density must be >= 0")
    a, b = eval_atom(atom, xi)
    return eta * a / EPS0, -eta * b * MU0


def dilute_material(eta: float, atom: AtomModel, name: str = "") -> MaterialModel:
    """Oscillator model of a dilute gas of ``atom`` at density ``eta``.

    ``eps - 1`` equals ``eta alpha / eps0`` exactly; ``mu - 1`` equals
    ``eta beta mu0``, i.e. ``-delta_kappa`` to first order in ``eta``.
    """
    if eta < 0:
        raise ValueError("number density must be >= 0")
    osc_e = tuple(
        Oscillator(np.sqrt(eta * ln.strength / EPS0) * ln.frequency, ln.frequency)
        for ln in atom.alpha_lines
    )
    osc_m = tuple(
        Oscillator(np.sqrt(eta * ln.strength * MU0) * ln.frequency, ln.frequency)
        for ln in atom.beta_lines
    )
    return MaterialModel(osc_e, osc_m, name)


@dataclass(frozen=True)
class LocalFieldFactors:
    c_e: float
    c_m: float


def local_field_factors(resp: ResponsePair) -> LocalFieldFactors:
    """Real-cavity local-field factors ``[3 eps/(2 eps+1)]^2`` and ``[3/(2 mu+1)]^2``."""
    eps, mu = resp.epsilon, resp.mu
    de, dm = 2 * eps + 1, 2 * mu + 1
    if np.any(de == 0) or np.any(dm == 0):
        raise ZeroDivisionError("local-field factors are singular at eps or mu = -1/2")
    return LocalFieldFactors((3 * eps / de) ** 2, (3 / dm) ** 2)
