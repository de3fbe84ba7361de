"""Experiment configuration: schema, validation, overrides.

Configs are plain nested mappings (read from YAML). Validation happens
before any computation and reports the offending field by dotted path.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from .lattice import CouplingNode, DisorderSpec, GiantAtomSpec, WaveguideParams

KINDS = ("spectrum", "boundstate", "sw-couplings", "markov-scan", "evolve",
         "photon-map", "transfer")


class ConfigError(Exception):
    """Invalid configuration; `field` is the dotted path of the bad entry."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


def _require(mapping, key, path, types=None):
    if key not in mapping or mapping[key] is None:
        raise ConfigError(f"{path}.{key}", "required field is missing")
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        raise ConfigError(f"{path}.{key}", f"expected {types}, got {type(value).__name__}")
    return value


def _number(mapping, key, path, default=None, required=False):
    if key not in mapping or mapping[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}", "required field is missing")
        return default
    value = mapping[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {value!r}")
    return float(value)


def parse_waveguide(raw: dict, path: str = "waveguide") -> WaveguideParams:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a mapping with delta and cells")
    delta = _number(raw, "delta", path, required=True)
    cells = raw.get("cells")
    if not isinstance(cells, int) or isinstance(cells, bool):
        raise ConfigError(f"{path}.cells", f"expected an integer, got {cells!r}")
    try:
        return WaveguideParams(delta, cells)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_atom(raw: dict, path: str) -> GiantAtomSpec:
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a mapping")
    detuning = _number(raw, "detuning", path, default=0.0)
    if "form" in raw and raw["form"] is not None:
        form = raw["form"]
        first = str(_require(form, "first", f"{path}.form")).upper()
        second = str(_require(form, "second", f"{path}.form")).upper()
        sep = _require(form, "separation", f"{path}.form", types=int)
        cell = raw.get("cell", 0)
        strength = _number(raw, "strength", path, default=0.1)
        if first not in ("A", "B") or second not in ("A", "B"):
            raise ConfigError(f"{path}.form", "sublattices must be A or B")
        nodes = (CouplingNode(cell, first, strength),
                 CouplingNode(cell + sep, second, strength))
    else:
        raw_nodes = _require(raw, "nodes", path, types=list)
        nodes = []
        for i, n in enumerate(raw_nodes):
            npath = f"{path}.nodes[{i}]"
            if not isinstance(n, dict):
                raise ConfigError(npath, "expected a mapping")
            cell = n.get("cell")
            if not isinstance(cell, int) or isinstance(cell, bool):
                raise ConfigError(f"{npath}.cell", f"expected an integer, got {cell!r}")
            subl = str(_require(n, "sublattice", npath))
            if subl.upper() not in ("A", "B"):
                raise ConfigError(f"{npath}.sublattice", f"must be A or B, got {subl!r}")
            strength = _number(n, "strength", npath, required=True)
            try:
                nodes.append(CouplingNode(cell, subl, strength))
            except ValueError as exc:
                raise ConfigError(npath, str(exc)) from exc
        nodes = tuple(nodes)
    try:
        return GiantAtomSpec(detuning, tuple(nodes))
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_disorder(raw, path: str = "disorder") -> Optional[DisorderSpec]:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a mapping with strength and seed")
    strength = _number(raw, "strength", path, required=True)
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError(f"{path}.seed", f"expected an integer, got {seed!r}")
    try:
        return DisorderSpec(strength, seed)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def resolve_grid(raw, path: str, params: Optional[WaveguideParams] = None) -> np.ndarray:
    """Grid spec: explicit list, {start, stop, points}, or the symbolic
    band-interior form {band: upper|lower, margin, points} (needs delta)."""
    if isinstance(raw, list):
        if not raw:
            raise ConfigError(path, "grid list must be non-empty")
        return np.asarray([float(v) for v in raw])
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a list or a mapping")
    if "band" in raw:
        if params is None:
            raise ConfigError(path, "band grid needs resolved waveguide parameters")
        band = raw["band"]
        if band not in ("upper", "lower"):
            raise ConfigError(f"{path}.band", "must be 'upper' or 'lower'")
        margin = _number(raw, "margin", path, default=0.02)
        points = raw.get("points")
        if not isinstance(points, int) or points < 2:
            raise ConfigError(f"{path}.points", "need an integer >= 2")
        lo, hi = 2.0 * abs(params.delta), 2.0
        width = hi - lo
        a, b = lo + margin * width, hi - margin * width
        grid = np.linspace(a, b, points)
        return grid if band == "upper" else -grid[::-1]
    start = _number(raw, "start", path, required=True)
    stop = _number(raw, "stop", path, required=True)
    points = raw.get("points")
    if not isinstance(points, int) or points < 1:
        raise ConfigError(f"{path}.points", "need an integer >= 1")
    return np.linspace(start, stop, points)


@dataclass
class ExperimentConfig:
    """Validated experiment description plus the raw mapping it came from."""

    kind: str
    waveguide: WaveguideParams
    atoms: List[GiantAtomSpec]
    disorder: Optional[DisorderSpec]
    raw: Dict[str, Any] = field(repr=False, default_factory=dict)

    def grid(self, name: str, default=None) -> np.ndarray:
        grids = self.raw.get("grids", {}) or {}
        if name not in grids or grids[name] is None:
            if default is not None:
                return np.asarray(default, dtype=float)
            raise ConfigError(f"grids.{name}", "required grid is missing")
        return resolve_grid(grids[name], f"grids.{name}", self.waveguide)

    def section(self, name: str) -> dict:
        value = self.raw.get(name, {}) or {}
        if not isinstance(value, dict):
            raise ConfigError(name, "expected a mapping")
        return value

    def scenarios(self) -> List[dict]:
        raw = self.raw.get("scenarios")
        if raw is None:
            return [{"label": "", "set": {}}]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("scenarios", "expected a non-empty list")
        out = []
        for i, sc in enumerate(raw):
            if not isinstance(sc, dict) or "label" not in sc:
                raise ConfigError(f"scenarios[{i}]", "each scenario needs a label")
            out.append({"label": str(sc["label"]), "set": sc.get("set", {}) or {}})
        return out


def set_by_path(tree: dict, dotted: str, value):
    """Write a leaf into a nested mapping; integer components index lists."""
    parts = dotted.split(".")
    node = tree
    for i, part in enumerate(parts[:-1]):
        key = int(part) if part.lstrip("-").isdigit() else part
        nxt = parts[i + 1]
        if isinstance(node, list):
            node = node[key]
            continue
        if key not in node or node[key] is None:
            node[key] = [] if nxt.lstrip("-").isdigit() else {}
        node = node[key]
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply key=value overrides (values parsed as YAML scalars)."""
    tree = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError("--set", f"expected key=value, got {item!r}")
        key, _, text = item.partition("=")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError:
            value = text
        try:
            set_by_path(tree, key.strip(), value)
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ConfigError(key.strip(), f"cannot apply override: {exc}") from exc
    return tree


def validate_config(raw: dict, kind_hint: Optional[str] = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a mapping")
    kind = raw.get("experiment", kind_hint)
    if kind is None:
        raise ConfigError("experiment", "required field is missing")
    if kind not in KINDS:
        raise ConfigError("experiment", f"unknown kind {kind!r}; one of {KINDS}")
    if kind_hint is not None and kind != kind_hint:
        raise ConfigError("experiment", f"config says {kind!r} but the subcommand is {kind_hint!r}")
    params = parse_waveguide(_require(raw, "waveguide", "", types=dict))
    atoms_raw = raw.get("atoms", [])
    if not isinstance(atoms_raw, list):
        raise ConfigError("atoms", "expected a list")
    atoms = [parse_atom(a, f"atoms[{i}]") for i, a in enumerate(atoms_raw)]
    for i, atom in enumerate(atoms):
        for node in atom.nodes:
            if not 0 <= node.cell < params.cells:
                raise ConfigError(f"atoms[{i}]",
                                  f"node cell {node.cell} outside lattice of {params.cells} cells")
    disorder = parse_disorder(raw.get("disorder"))
    cfg = ExperimentConfig(kind, params, atoms, disorder, raw)
    # eagerly validate grids and scenario syntax so failures precede any output
    cfg.scenarios()
    grids = raw.get("grids", {}) or {}
    if not isinstance(grids, dict):
        raise ConfigError("grids", "expected a mapping")
    for name in grids:
        if grids[name] is not None:
            resolve_grid(grids[name], f"grids.{name}", params)
    return cfg


def load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(path, f"not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(path, "config file must hold a mapping")
    return raw
