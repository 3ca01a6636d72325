"""Built-in invariant suite run by ``dualcas check``.

Each check is fast (well under a second) and returns ``(ok, detail)``.
"""

from __future__ import annotations

import math

import numpy as np

from .audit import CPScenario, GreenScenario, VdWScenario, audit_cp, audit_green, audit_vdw
from .constants import C
from .duality import (
    SYMPLECTIC,
    TAU_ALG,
    DualityElement,
    ResponsePair,
    duality_matrix,
    excitation_transform_matrix,
    transform_response,
    z4_member,
)
from .green.bulk import verify_green_residual
from .green.planar import PlanarStack, fresnel
from .quadrature import integrate_halfline
from .response import AtomModel, MaterialModel, local_field_factors

_ATOM = AtomModel([(1e-39, 2e15)], [(3e-40 * C**2, 1.5e15)], "probe")
_MEDIUM = MaterialModel([(1e16, 4e15, 1e13)], [(3e15, 2e15)], "medium")


def check_z4():
    d1 = z4_member(1)
    ok = np.array_equal(np.linalg.matrix_power(d1, 4), np.eye(2))
    return ok, "D1^4 = I exactly" if ok else "D1^4 != I"


def check_commutation():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        m = duality_matrix(DualityElement(rng.uniform(0.1, 5), rng.uniform(0, 2 * math.pi)))
        worst = max(worst, float(np.max(np.abs(m @ SYMPLECTIC - SYMPLECTIC @ m)) / np.max(np.abs(m))))
    return worst <= TAU_ALG, f"max commutator {worst:.2e}"


def check_response_involution():
    resp = ResponsePair(2.5, 1.3)
    twice = transform_response(transform_response(resp, math.pi / 2), math.pi / 2)
    return twice == resp, f"{twice}"


def check_hamiltonian_rescaling():
    m = excitation_transform_matrix(ResponsePair(2.0, 3.0), DualityElement(2.0, math.pi / 2))
    dev = float(np.max(np.abs(m.conj().T @ m - 4 * np.eye(2))))
    return dev <= 4 * TAU_ALG, f"|M^H M - r^2 I| = {dev:.2e}"


def check_local_field_vacuum():
    f = local_field_factors(ResponsePair(1.0, 1.0))
    return (f.c_e, f.c_m) == (1.0, 1.0), f"c_e={f.c_e}, c_m={f.c_m}"


def check_green_residual():
    rng = np.random.default_rng(3)
    samples = [(rng.normal(size=3) * 1e-7, rng.normal(size=3) * 1e-7) for _ in range(5)]
    worst = max(verify_green_residual(ResponsePair(e, m), samples, 3e15) for e, m in ((1, 1), (4, 1), (2, 3)))
    return worst < 1e-8, f"max residual {worst:.2e}"


def check_fresnel_duality():
    k2 = np.geomspace(1e10, 1e16, 7)
    rs, rp, _, _ = fresnel((0.5, 0.0), (3.0, 1.5), k2, 1e13)
    rs_d, rp_d, _, _ = fresnel((0.0, 0.5), (1.5, 3.0), k2, 1e13)
    ok = np.array_equal(rs, rp_d) and np.array_equal(rp, rs_d)
    return ok, "r_s <-> r_p exactly" if ok else "swap mismatch"


def check_quadrature():
    cases = ((lambda x: np.exp(-x), 1.0, 1.0), (lambda x: 1 / (1 + x**2), 1.0, math.pi / 2),
             (lambda x: x**3 * np.exp(-2 * x), 0.5, 0.375))
    worst = 0.0
    for f, s, exact in cases:
        res = integrate_halfline(f, s, rel_tol=1e-12)
        worst = max(worst, abs(res.value - exact) / exact)
    return worst < 1e-10, f"max relative error {worst:.2e}"


def check_green_audit():
    rng = np.random.default_rng(11)
    samples = [(rng.normal(size=3) * 5e-8 + [0, 0, 2e-7], rng.normal(size=3) * 5e-8 + [0, 0, 2e-7],
                rng.uniform(1e14, 1e16)) for _ in range(4)]
    rep = audit_green(GreenScenario(samples, stack=PlanarStack.halfspace(_MEDIUM)), tol=1e-10)
    return rep.overall_pass and not rep.errors, f"max deviation {rep.max_deviation:.2e}"


def check_cp_audit():
    rep = audit_cp(CPScenario(_ATOM, PlanarStack.halfspace(_MEDIUM), [1e-8, 1e-7]))
    return rep.overall_pass and not rep.errors, f"max deviation {rep.max_deviation:.2e}"


def check_vdw_audit():
    rep = audit_vdw(VdWScenario(_ATOM, _ATOM, [1e-8, 1e-6], _MEDIUM, with_local_field=True))
    return rep.overall_pass and not rep.errors, f"max deviation {rep.max_deviation:.2e}"


CHECKS = {
    "z4-closure": check_z4,
    "symplectic-commutation": check_commutation,
    "response-involution": check_response_involution,
    "hamiltonian-rescaling": check_hamiltonian_rescaling,
    "local-field-vacuum": check_local_field_vacuum,
    "green-residual": check_green_residual,
    "fresnel-duality": check_fresnel_duality,
    "quadrature-analytic": check_quadrature,
    "green-duality-audit": check_green_audit,
    "cp-duality-audit": check_cp_audit,
    "vdw-local-field-audit": check_vdw_audit,
}


def run_checks():
    """Yield ``(name, ok, detail)`` for every built-in check."""
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
