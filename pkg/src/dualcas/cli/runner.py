"""Execute a parsed scenario: compute tables, run audits, write outputs.

Exit statuses: 0 success, 1 computation or I/O error, 2 audit failure.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import audit as aud
from ..dispersion import casimir_pressure_planar, cp_potential, vdw_potential
from ..green.bulk import bulk_blocks
from ..green.planar import Layer, PlanarStack, planar_blocks
from ..quadrature import IntegrationError
from ..response import dual_atom, eval_material
from .config import ScenarioConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_AUDIT_FAILED = 2

COLUMNS = {
    "cp": ("e", "m"),
    "vdw": ("ee", "em", "me", "mm"),
    "casimir": ("e", "m"),
    "green": ("ee", "mm", "em", "me"),
}
"""Component columns per scenario kind.  Every table starts with ``distance``
and, except for green tables, ends with ``total`` and ``error_estimate``."""

UNITS = {"cp": "J", "vdw": "J", "casimir": "N/m^2", "green": "1/m^3"}


def fmt(x: float) -> str:
    """Scientific notation with 12 significant digits."""
    return f"{x:.11e}"


@dataclass
class Row:
    distance: float
    components: dict
    total: float | None = None
    error: float | None = None


def build_stack(cfg: ScenarioConfig, materials=None) -> PlanarStack:
    get = materials or cfg.material
    return PlanarStack(tuple(Layer(get(name), t) for name, t in cfg.geometry["layers"]))


def _green_points(cfg: ScenarioConfig, d: float):
    direction = np.asarray(cfg.geometry.get("direction", (1.0, 1.0, 1.0)), dtype=float)
    direction /= np.linalg.norm(direction)
    height = cfg.geometry.get("height", 0.0 if "bulk" in cfg.geometry else None)
    if height is None:
        raise ValueError("green scenarios over a stack need [geometry] height")
    rp = np.array([0.0, 0.0, height])
    return rp + d * direction, rp


def compute_row(cfg: ScenarioConfig, d: float) -> Row:
    kind = cfg.base_kind
    if kind == "cp":
        res = cp_potential(cfg.atoms[cfg.geometry["atom"]], build_stack(cfg), d, cfg.local_field, cfg.rel_tol)
    elif kind == "vdw":
        host = cfg.material(cfg.geometry.get("host", "vacuum"))
        res = vdw_potential(cfg.atoms[cfg.geometry["atom_a"]], cfg.atoms[cfg.geometry["atom_b"]], d,
                            cfg.local_field, host, cfg.rel_tol)
    elif kind == "casimir":
        res = casimir_pressure_planar(cfg.material(cfg.geometry["left"]), cfg.material(cfg.geometry["right"]), d,
                                      cfg.material(cfg.geometry.get("medium", "vacuum")), cfg.rel_tol)
    else:
        r, rp = _green_points(cfg, d)
        if "bulk" in cfg.geometry:
            blocks = bulk_blocks(eval_material(cfg.material(cfg.geometry["bulk"]), cfg.xi), r, rp, cfg.xi)
        else:
            blocks = planar_blocks(build_stack(cfg), r, rp, cfg.xi)
        comps = {lab: float(np.trace(getattr(blocks, "G" + lab))) for lab in COLUMNS["green"]}
        return Row(d, comps)
    return Row(d, dict(res.components), res.total, res.error_estimate)


def compute_table(cfg: ScenarioConfig, threads: int = 1) -> list[Row]:
    """One row per grid distance, in grid order regardless of ``threads``."""
    distances = [float(d) for d in cfg.grid.values()]
    if threads <= 1:
        return [compute_row(cfg, d) for d in distances]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda d: compute_row(cfg, d), distances))


def header(kind: str) -> list[str]:
    cols = ["distance", *COLUMNS[kind]]
    if kind != "green":
        cols += ["total", "error_estimate"]
    return cols


def write_csv(path, kind: str, rows: list[Row]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header(kind))
        for row in rows:
            vals = [row.distance, *(row.components[c] for c in COLUMNS[kind])]
            if kind != "green":
                vals += [row.total, row.error]
            writer.writerow([fmt(v) for v in vals])


def write_plot_data(out_dir, stem: str, kind: str, rows: list[Row]):
    """Two-column (distance, value) files per component."""
    cols = list(COLUMNS[kind]) + ([] if kind == "green" else ["total"])
    for col in cols:
        with open(os.path.join(out_dir, f"{stem}_{col}.dat"), "w", encoding="utf-8") as fh:
            fh.write(f"# distance[m] {col}[{UNITS[kind]}]\n")
            for row in rows:
                val = row.total if col == "total" else row.components[col]
                fh.write(f"{fmt(row.distance)} {fmt(val)}\n")


def _tampered_dual(cfg: ScenarioConfig):
    """Dual scenario where material ``cfg.tamper`` is left undualised."""

    def material(name):
        m = cfg.material(name)
        return m if name == cfg.tamper else m.dual()

    return material


def build_audit(cfg: ScenarioConfig):
    """Return ``(callable, scenario, dual_override)`` for an audit config."""
    kind = cfg.base_kind
    grid = [float(d) for d in cfg.grid.values()]
    tampered = _tampered_dual(cfg) if cfg.tamper else None
    if kind == "cp":
        atom = cfg.atoms[cfg.geometry["atom"]]
        scen = aud.CPScenario(atom, build_stack(cfg), grid, cfg.local_field, cfg.scenario_id)
        dual = None
        if tampered:
            dual = aud.CPScenario(dual_atom(atom), build_stack(cfg, tampered), grid, cfg.local_field)
        return aud.audit_cp, scen, dual
    if kind == "vdw":
        a, b = cfg.atoms[cfg.geometry["atom_a"]], cfg.atoms[cfg.geometry["atom_b"]]
        host_name = cfg.geometry.get("host", "vacuum")
        scen = aud.VdWScenario(a, b, grid, cfg.material(host_name), cfg.local_field, cfg.scenario_id)
        dual = None
        if tampered:
            dual = aud.VdWScenario(dual_atom(a), dual_atom(b), grid, tampered(host_name), cfg.local_field)
        return aud.audit_vdw, scen, dual
    if kind == "casimir":
        names = (cfg.geometry["left"], cfg.geometry["right"], cfg.geometry.get("medium", "vacuum"))
        scen = aud.CasimirScenario(cfg.material(names[0]), cfg.material(names[1]), grid,
                                   cfg.material(names[2]), cfg.scenario_id)
        dual = None
        if tampered:
            dual = aud.CasimirScenario(tampered(names[0]), tampered(names[1]), grid, tampered(names[2]))
        return aud.audit_casimir, scen, dual
    samples = [(*_green_points(cfg, d), cfg.xi) for d in grid]
    if "bulk" in cfg.geometry:
        scen = aud.GreenScenario(samples, bulk=cfg.material(cfg.geometry["bulk"]), scenario_id=cfg.scenario_id)
        dual = aud.GreenScenario(samples, bulk=tampered(cfg.geometry["bulk"])) if tampered else None
    else:
        scen = aud.GreenScenario(samples, stack=build_stack(cfg), scenario_id=cfg.scenario_id)
        dual = aud.GreenScenario(samples, stack=build_stack(cfg, tampered)) if tampered else None
    return aud.audit_green, scen, dual


def run_audit(cfg: ScenarioConfig, tol: float | None = None) -> aud.AuditReport:
    fn, scen, dual = build_audit(cfg)
    tol = cfg.tol if tol is None else tol
    if fn is aud.audit_green:
        return fn(scen, tol, dual=dual)
    return fn(scen, tol, cfg.rel_tol, dual=dual)


def run(cfg: ScenarioConfig, out_dir: str = ".", tol: float | None = None, emit_plot_data: bool = False,
        threads: int = 1, audit: bool | None = None) -> int:
    """Run a scenario and write ``<id>.csv`` (and ``<id>_audit.json`` for audits).

    ``audit`` forces (True) or suppresses (False) the audit; by default it
    follows the scenario kind.
    """
    do_audit = cfg.is_audit if audit is None else audit
    try:
        os.makedirs(out_dir, exist_ok=True)
        rows = compute_table(cfg, threads)
        stem = cfg.scenario_id
        kind = cfg.base_kind
        write_csv(os.path.join(out_dir, f"{stem}.csv"), kind, rows)
        if emit_plot_data:
            write_plot_data(out_dir, stem, kind, rows)
        if not do_audit:
            return EXIT_OK
        report = run_audit(cfg, tol)
        with open(os.path.join(out_dir, f"{stem}_audit.json"), "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        print(f"dualcas: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (IntegrationError, ValueError, ArithmeticError) as exc:
        print(f"dualcas: computation failed: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if report.errors:
        for err in report.errors:
            print(f"dualcas: audit computation failed: {err}", file=sys.stderr)
        return EXIT_ERROR
    if not report.overall_pass:
        failed = [i for i in report.identities if not i.passed]
        print(f"dualcas: audit {stem}: {len(failed)} identities failed "
              f"(worst deviation {max(i.deviation for i in failed):.3e})", file=sys.stderr)
        return EXIT_AUDIT_FAILED
    log.info("audit %s passed, max deviation %.3e", stem, report.max_deviation)
    return EXIT_OK
