"""Dispersion forces between magnetoelectric bodies and atoms, with duality audits.

Modules
-------
duality
    Duality group, transformation of field pairs and response functions.
response
    Oscillator models of media and atoms, local-field factors.
green
    Dyadic Green tensor of bulk media and planar stacks, Born corrections.
dispersion
    Casimir-Polder and van der Waals potentials, planar Casimir pressure.
quadrature
    Adaptive double-exponential integration on the half line.
audit
    Scenario duality audits.
"""

from .audit import (
    AuditReport,
    CasimirScenario,
    CPScenario,
    GreenScenario,
    VdWScenario,
    audit_casimir,
    audit_cp,
    audit_green,
    audit_vdw,
)
from .dispersion import casimir_pressure_planar, cp_from_born, cp_potential, vdw_potential
from .duality import DualityElement, DualPair, ResponsePair, duality_matrix, transform_pair, transform_response
from .green.blocks import GreenBlocks, dual_transform_green
from .green.bulk import bulk_blocks, bulk_green
from .green.planar import Layer, PlanarStack, planar_blocks
from .response import VACUUM, AtomModel, MaterialModel, constant_material, dual_atom, eval_material

__version__ = "0.1.0"

__all__ = [
    "AtomModel", "AuditReport", "CPScenario", "CasimirScenario", "DualPair", "DualityElement",
    "GreenBlocks", "GreenScenario", "Layer", "MaterialModel", "PlanarStack", "ResponsePair", "VACUUM",
    "VdWScenario", "audit_casimir", "audit_cp", "audit_green", "audit_vdw", "bulk_blocks", "bulk_green",
    "casimir_pressure_planar", "constant_material", "cp_from_born", "cp_potential", "dual_atom",
    "dual_transform_green", "duality_matrix", "eval_material", "planar_blocks", "transform_pair",
    "transform_response", "vdw_potential",
]
