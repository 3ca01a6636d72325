"""Scenario configuration files.

The format is line oriented: ``[section]`` headers and ``key = value`` lines,
``#`` starts a comment.  Four sections are recognised::

    [materials]
    gold.eps = 1.37e16 0 5.3e13        # plasma resonance damping [rad/s]; ';' separates oscillators
    ferrite.mu = 2e15 1e15 0
    mirror.constant = 1e8 1            # flat eps, mu (single high-lying oscillator)

    [atoms]
    rb.alpha = 5.3e-39 2.4e15          # strength [C^2 m^2/J] frequency [rad/s]; ';' separates lines
    rb.beta = 1e-23 2e15               # strength [J/T^2] frequency [rad/s]

    [geometry]
    layers = vacuum, film 2e-8, gold   # top to bottom; interior layers carry a thickness [m]
    atom = rb

    [run]
    kind = cp
    distances = 1e-9 1e-6 20 log       # min max count spacing [m]

Which geometry keys are needed depends on ``kind`` (see :data:`GEOMETRY_KEYS`).
The material ``vacuum`` is predefined.  Parsing never raises on bad input;
it returns diagnostics with a code and a line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..response import VACUUM, AtomModel, Line, MaterialModel, Oscillator, constant_material

KINDS = ("cp", "vdw", "casimir", "green", "audit-cp", "audit-vdw", "audit-casimir", "audit-green")

GEOMETRY_KEYS = {
    "cp": {"required": ("layers", "atom"), "optional": ()},
    "vdw": {"required": ("atom_a", "atom_b"), "optional": ("host",)},
    "casimir": {"required": ("left", "right"), "optional": ("medium",)},
    "green": {"required": (), "optional": ("layers", "bulk", "height", "direction")},
}

RUN_KEYS = ("kind", "id", "distances", "local_field", "rel_tol", "tol", "xi", "tamper")

# diagnostic codes
E_SYNTAX = "E_SYNTAX"
E_UNKNOWN_SECTION = "E_UNKNOWN_SECTION"
E_UNKNOWN_KEY = "E_UNKNOWN_KEY"
E_DUPLICATE_KEY = "E_DUPLICATE_KEY"
E_BAD_VALUE = "E_BAD_VALUE"
E_NONPHYSICAL = "E_NONPHYSICAL"
E_UNDEF_MATERIAL = "E_UNDEF_MATERIAL"
E_UNDEF_ATOM = "E_UNDEF_ATOM"
E_BAD_GRID = "E_BAD_GRID"
E_MISSING_KEY = "E_MISSING_KEY"
E_BAD_KIND = "E_BAD_KIND"
E_GEOMETRY = "E_GEOMETRY"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    line: int  # 1-based; 0 when not tied to a line
    message: str

    def __str__(self):
        where = f"line {self.line}" if self.line else "config"
        return f"{where}: {self.code}: {self.message}"


class ConfigError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class DistanceGrid:
    start: float
    stop: float
    count: int
    spacing: str = "log"

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    grid: DistanceGrid
    materials: dict = field(default_factory=dict)
    atoms: dict = field(default_factory=dict)
    geometry: dict = field(default_factory=dict)
    scenario_id: str = "scenario"
    local_field: bool = False
    rel_tol: float = 1e-8
    tol: float = 1e-6
    xi: float | None = None
    tamper: str | None = None

    @property
    def base_kind(self) -> str:
        return self.kind.removeprefix("audit-")

    @property
    def is_audit(self) -> bool:
        return self.kind.startswith("audit-")

    def material(self, name: str) -> MaterialModel:
        return VACUUM if name == "vacuum" else self.materials[name]


def _floats(text):
    return [float(x) for x in text.split()]


def _groups(text, size, what):
    items = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = _floats(chunk)
        if len(vals) != size:
            raise ValueError(f"each {what} needs {size} numbers, got {len(vals)}")
        items.append(vals)
    return items


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_layers(text):
    layers = []
    for item in text.split(","):
        parts = item.split()
        if not parts:
            raise ValueError("empty layer entry")
        if len(parts) > 2:
            raise ValueError(f"layer entry {item.strip()!r} has too many fields")
        layers.append((parts[0], float(parts[1]) if len(parts) == 2 else None))
    return tuple(layers)


class _Parser:
    def __init__(self):
        self.diags: list[Diagnostic] = []
        self.mat_fields: dict[str, dict] = {}
        self.atom_fields: dict[str, dict] = {}
        self.geometry: dict[str, tuple[str, int]] = {}
        self.run: dict[str, tuple[str, int]] = {}

    def error(self, code, line, msg):
        self.diags.append(Diagnostic(code, line, msg))

    def feed(self, text: str):
        section = None
        seen = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                if not line.endswith("]"):
                    self.error(E_SYNTAX, lineno, f"malformed section header {raw.strip()!r}")
                    continue
                section = line[1:-1].strip().lower()
                if section not in ("materials", "atoms", "geometry", "run"):
                    self.error(E_UNKNOWN_SECTION, lineno, f"unknown section [{section}]")
                    section = "?"
                continue
            if "=" not in line:
                self.error(E_SYNTAX, lineno, f"expected 'key = value', got {raw.strip()!r}")
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            if section is None:
                self.error(E_SYNTAX, lineno, "key outside of any section")
                continue
            if section == "?":
                continue
            if (section, key) in seen:
                self.error(E_DUPLICATE_KEY, lineno, f"duplicate key {key!r} in [{section}]")
                continue
            seen.add((section, key))
            getattr(self, f"_{section}")(key, value, lineno)

    def _named(self, key, value, lineno, store, allowed, section):
        if "." not in key:
            self.error(E_UNKNOWN_KEY, lineno, f"[{section}] keys look like name.field, got {key!r}")
            return
        name, fld = key.rsplit(".", 1)
        if fld not in allowed:
            self.error(E_UNKNOWN_KEY, lineno, f"unknown field {fld!r} (allowed: {', '.join(allowed)})")
            return
        if name == "vacuum":
            self.error(E_BAD_VALUE, lineno, "'vacuum' is predefined and cannot be redefined")
            return
        store.setdefault(name, {})[fld] = (value, lineno)

    def _materials(self, key, value, lineno):
        self._named(key, value, lineno, self.mat_fields, ("eps", "mu", "constant"), "materials")

    def _atoms(self, key, value, lineno):
        self._named(key, value, lineno, self.atom_fields, ("alpha", "beta"), "atoms")

    def _geometry(self, key, value, lineno):
        known = {k for rule in GEOMETRY_KEYS.values() for k in rule["required"] + rule["optional"]}
        if key not in known:
            self.error(E_UNKNOWN_KEY, lineno, f"unknown geometry key {key!r}")
            return
        self.geometry[key] = (value, lineno)

    def _run(self, key, value, lineno):
        if key not in RUN_KEYS:
            self.error(E_UNKNOWN_KEY, lineno, f"unknown run key {key!r}")
            return
        self.run[key] = (value, lineno)

    # ---- typed construction -------------------------------------------------

    def material(self, name, fields):
        eps, mu = [], []
        try:
            if "constant" in fields:
                value, lineno = fields["constant"]
                vals = _floats(value)
                if len(vals) != 2:
                    raise ValueError("constant needs 'eps mu'")
                if min(vals) < 1:
                    self.error(E_NONPHYSICAL, lineno, f"constant response of {name!r} must be >= 1")
                    return None
                if "eps" in fields or "mu" in fields:
                    self.error(E_BAD_VALUE, lineno, f"{name!r}: 'constant' excludes 'eps'/'mu'")
                    return None
                base = constant_material(vals[0], vals[1])
                return MaterialModel(base.oscillators_eps, base.oscillators_mu, name)
            for fld, target in (("eps", eps), ("mu", mu)):
                if fld not in fields:
                    continue
                value, lineno = fields[fld]
                try:
                    for p, w0, g in _groups(value, 3, "oscillator"):
                        target.append(Oscillator(p, w0, g))
                except ValueError as exc:
                    code = E_NONPHYSICAL if "must be" in str(exc) or "needs nonzero" in str(exc) else E_BAD_VALUE
                    self.error(code, lineno, f"{name}.{fld}: {exc}")
                    return None
        except ValueError as exc:
            self.error(E_BAD_VALUE, lineno, f"{name}: {exc}")
            return None
        return MaterialModel(tuple(eps), tuple(mu), name)

    def atom(self, name, fields):
        lines = {"alpha": [], "beta": []}
        for fld in ("alpha", "beta"):
            if fld not in fields:
                continue
            value, lineno = fields[fld]
            try:
                for a, w in _groups(value, 2, "line"):
                    lines[fld].append(Line(a, w))
            except ValueError as exc:
                code = E_NONPHYSICAL if "must be" in str(exc) else E_BAD_VALUE
                self.error(code, lineno, f"{name}.{fld}: {exc}")
                return None
        return AtomModel(tuple(lines["alpha"]), tuple(lines["beta"]), name)


def _run_value(p, key, conv, default):
    if key not in p.run:
        return default
    value, lineno = p.run[key]
    try:
        return conv(value)
    except ValueError as exc:
        p.error(E_BAD_VALUE, lineno, f"{key}: {exc}")
        return default


def _parse_grid(p):
    if "distances" not in p.run:
        p.error(E_MISSING_KEY, 0, "[run] distances = min max count [log|linear] is required")
        return None
    value, lineno = p.run["distances"]
    parts = value.split()
    try:
        if len(parts) not in (3, 4):
            raise ValueError("expected 'min max count [log|linear]'")
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
        spacing = parts[3].lower() if len(parts) == 4 else "log"
    except ValueError as exc:
        p.error(E_BAD_GRID, lineno, f"distances: {exc}")
        return None
    if spacing not in ("log", "linear"):
        p.error(E_BAD_GRID, lineno, f"spacing must be log or linear, got {spacing!r}")
        return None
    if count < 1:
        p.error(E_BAD_GRID, lineno, "count must be >= 1")
        return None
    if not (start > 0 and math.isfinite(stop)):
        p.error(E_BAD_GRID, lineno, "distances must be positive and finite")
        return None
    if count > 1 and not stop > start:
        p.error(E_BAD_GRID, lineno, f"grid must be strictly increasing (max {stop:g} <= min {start:g})")
        return None
    if count == 1 and stop < start:
        p.error(E_BAD_GRID, lineno, f"max {stop:g} < min {start:g}")
        return None
    return DistanceGrid(start, stop, count, spacing)


def _check_geometry(p, kind, materials, atoms):
    rule = GEOMETRY_KEYS[kind]
    geo = {}
    for key, (value, lineno) in p.geometry.items():
        if key not in rule["required"] + rule["optional"]:
            p.error(E_UNKNOWN_KEY, lineno, f"geometry key {key!r} is not used by kind {kind!r}")
    for key in rule["required"]:
        if key not in p.geometry:
            p.error(E_MISSING_KEY, 0, f"[geometry] {key} is required for kind {kind!r}")

    def need_material(name, lineno):
        if name != "vacuum" and name not in materials:
            p.error(E_UNDEF_MATERIAL, lineno, f"material {name!r} is not defined")

    for key, (value, lineno) in p.geometry.items():
        if key == "layers":
            try:
                layers = _parse_layers(value)
            except ValueError as exc:
                p.error(E_BAD_VALUE, lineno, f"layers: {exc}")
                continue
            if len(layers) < 2:
                p.error(E_GEOMETRY, lineno, "a stack needs at least two layers")
            for i, (name, thick) in enumerate(layers):
                need_material(name, lineno)
                outer = i in (0, len(layers) - 1)
                if outer and thick is not None:
                    p.error(E_GEOMETRY, lineno, f"outer layer {name!r} must not have a thickness")
                if not outer and (thick is None or not thick > 0):
                    p.error(E_GEOMETRY, lineno, f"interior layer {name!r} needs a positive thickness")
            geo[key] = layers
        elif key in ("atom", "atom_a", "atom_b"):
            if value not in atoms:
                p.error(E_UNDEF_ATOM, lineno, f"atom {value!r} is not defined")
            geo[key] = value
        elif key in ("host", "left", "right", "medium", "bulk"):
            need_material(value, lineno)
            geo[key] = value
        elif key == "height":
            try:
                geo[key] = float(value)
            except ValueError as exc:
                p.error(E_BAD_VALUE, lineno, f"height: {exc}")
        elif key == "direction":
            try:
                vec = tuple(_floats(value))
                if len(vec) != 3 or not any(vec):
                    raise ValueError("direction needs three numbers, not all zero")
                geo[key] = vec
            except ValueError as exc:
                p.error(E_BAD_VALUE, lineno, f"direction: {exc}")
    if kind == "green" and ("layers" in p.geometry) == ("bulk" in p.geometry):
        p.error(E_GEOMETRY, 0, "green scenarios need exactly one of 'layers' or 'bulk'")
    return geo


def parse_config(text: str) -> tuple[ScenarioConfig | None, list[Diagnostic]]:
    """Parse and validate a scenario file.

    Returns ``(config, diagnostics)``; ``config`` is None whenever any
    diagnostic was produced.
    """
    p = _Parser()
    p.feed(text)
    materials = {}
    for name, fields in p.mat_fields.items():
        model = p.material(name, fields)
        if model is not None:
            materials[name] = model
    atoms = {}
    for name, fields in p.atom_fields.items():
        model = p.atom(name, fields)
        if model is not None:
            atoms[name] = model

    kind = None
    if "kind" not in p.run:
        p.error(E_MISSING_KEY, 0, "[run] kind is required")
    else:
        value, lineno = p.run["kind"]
        if value not in KINDS:
            p.error(E_BAD_KIND, lineno, f"unknown kind {value!r} (allowed: {', '.join(KINDS)})")
        else:
            kind = value
    grid = _parse_grid(p)
    geometry = _check_geometry(p, kind.removeprefix("audit-"), materials, atoms) if kind else {}

    rel_tol = _run_value(p, "rel_tol", float, 1e-8)
    tol = _run_value(p, "tol", float, 1e-6)
    for key, val in (("rel_tol", rel_tol), ("tol", tol)):
        if not val > 0:
            p.error(E_BAD_VALUE, p.run[key][1], f"{key} must be > 0")
    xi = _run_value(p, "xi", float, None)
    if kind and kind.endswith("green") and xi is None:
        p.error(E_MISSING_KEY, 0, "[run] xi (imaginary frequency, rad/s) is required for green scenarios")
    if xi is not None and not xi > 0:
        p.error(E_BAD_VALUE, p.run["xi"][1], "xi must be > 0")
    tamper = _run_value(p, "tamper", str, None)
    if tamper is not None and tamper not in materials:
        p.error(E_UNDEF_MATERIAL, p.run["tamper"][1], f"material {tamper!r} is not defined")
    cfg = None
    if not p.diags:
        cfg = ScenarioConfig(
            kind=kind,
            grid=grid,
            materials=materials,
            atoms=atoms,
            geometry=geometry,
            scenario_id=_run_value(p, "id", str, "scenario"),
            local_field=_run_value(p, "local_field", _bool, False),
            rel_tol=rel_tol,
            tol=tol,
            xi=xi,
            tamper=tamper,
        )
    return cfg, sorted(p.diags, key=lambda d: (d.line, d.code))


def load_config(path) -> ScenarioConfig:
    """Read and parse a file; raise :class:`ConfigError` on diagnostics."""
    with open(path, encoding="utf-8") as fh:
        cfg, diags = parse_config(fh.read())
    if diags:
        raise ConfigError(diags)
    return cfg


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config` (up to comments and formatting)."""
    out = ["[materials]"]
    for name, m in cfg.materials.items():
        if m.oscillators_eps:
            out.append(f"{name}.eps = " + "; ".join(f"{_fmt(o.plasma)} {_fmt(o.resonance)} {_fmt(o.damping)}"
                                                    for o in m.oscillators_eps))
        if m.oscillators_mu:
            out.append(f"{name}.mu = " + "; ".join(f"{_fmt(o.plasma)} {_fmt(o.resonance)} {_fmt(o.damping)}"
                                                   for o in m.oscillators_mu))
        if not (m.oscillators_eps or m.oscillators_mu):
            out.append(f"{name}.eps = ")
    out += ["", "[atoms]"]
    for name, a in cfg.atoms.items():
        if a.alpha_lines:
            out.append(f"{name}.alpha = " + "; ".join(f"{_fmt(ln.strength)} {_fmt(ln.frequency)}" for ln in a.alpha_lines))
        if a.beta_lines:
            out.append(f"{name}.beta = " + "; ".join(f"{_fmt(ln.strength)} {_fmt(ln.frequency)}" for ln in a.beta_lines))
        if not (a.alpha_lines or a.beta_lines):
            out.append(f"{name}.alpha = ")
    out += ["", "[geometry]"]
    for key, value in cfg.geometry.items():
        if key == "layers":
            value = ", ".join(name if t is None else f"{name} {_fmt(t)}" for name, t in value)
        elif key == "direction":
            value = " ".join(_fmt(v) for v in value)
        elif key == "height":
            value = _fmt(value)
        out.append(f"{key} = {value}")
    g = cfg.grid
    out += ["", "[run]", f"kind = {cfg.kind}", f"id = {cfg.scenario_id}",
            f"distances = {_fmt(g.start)} {_fmt(g.stop)} {g.count} {g.spacing}",
            f"local_field = {'true' if cfg.local_field else 'false'}",
            f"rel_tol = {_fmt(cfg.rel_tol)}", f"tol = {_fmt(cfg.tol)}"]
    if cfg.xi is not None:
        out.append(f"xi = {_fmt(cfg.xi)}")
    if cfg.tamper is not None:
        out.append(f"tamper = {cfg.tamper}")
    return "\n".join(out) + "\n"
