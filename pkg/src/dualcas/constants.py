"""Physical constants (SI), fixed so results do not drift with CODATA updates."""

import math

HBAR = 1.054571817e-34
"""Reduced Planck constant [J s]."""

C = 2.99792458e8
"""Speed of light in vacuum [m/s]."""

EPS0 = 8.8541878128e-12
"""Vacuum permittivity [F/m]."""

MU0 = 1.0 / (EPS0 * C**2)
"""Vacuum permeability [H/m], derived so that eps0 * mu0 * c**2 == 1."""

Z0 = math.sqrt(MU0 / EPS0)
"""Vacuum impedance [Ohm]."""
