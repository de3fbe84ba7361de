"""Built-in experiment recipes.

Each preset is a complete config mapping; fields set to None are required
overrides (the dimerization for the band-regime recipes is deliberately not
baked in and must be supplied, e.g. --set waveguide.delta=0.2).
"""

from __future__ import annotations

import copy
from typing import Dict, List


def _dimer_atom(cell, strength=0.1, detuning=0.0):
    return {"detuning": detuning, "cell": cell, "strength": strength,
            "form": {"first": "a", "second": "b", "separation": 0}}


def _form_atom(first, second, separation, cell, strength=0.1, detuning=0.0):
    return {"detuning": detuning, "cell": cell, "strength": strength,
            "form": {"first": first, "second": second, "separation": separation}}


def _scan_scenarios() -> List[dict]:
    out = [{"label": "small-a", "set": {"atoms": [
        {"detuning": 0.0, "nodes": [{"cell": 10, "sublattice": "A", "strength": 0.1}]}]}},
        {"label": "ab-l0", "set": {"atoms": [_form_atom("a", "b", 0, 10)]}}]
    for l in (1, 2, 3):
        for first, second in (("a", "a"), ("a", "b"), ("b", "a")):
            out.append({"label": f"{first}0-{second}{l}",
                        "set": {"atoms": [_form_atom(first, second, l, 10)]}})
    return out


def _two_atom_scenarios() -> List[dict]:
    out = []
    for l, (first, second) in ((1, ("b", "a")), (2, ("a", "a")), (3, ("a", "b"))):
        for lp in (0, 1, 2, 3):
            out.append({"label": f"{first}0-{second}{l}-sep{lp}",
                        "set": {"atoms": [_form_atom(first, second, l, 14),
                                          _form_atom(first, second, l, 14 + lp)]}})
    return out


PRESETS: Dict[str, dict] = {
    "fig2b": {
        "description": "single-excitation spectrum against emitter detuning; "
                       "one dimer-form emitter, topological lattice",
        "config": {
            "experiment": "spectrum",
            "waveguide": {"delta": 0.3, "cells": 20},
            "atoms": [_dimer_atom(10)],
            "grids": {"detuning": {"start": -3.0, "stop": 3.0, "points": 61}},
            "output": {"prefix": "fig2b"},
        },
    },
    "fig3": {
        "description": "gap-state amplitude profiles at three detunings, "
                       "both phases plus an off-diagonal-disorder run",
        "config": {
            "experiment": "boundstate",
            "waveguide": {"delta": 0.3, "cells": 20},
            "atoms": [_dimer_atom(10)],
            "grids": {"detuning": [2.2, 0.0, -2.2]},
            "scenarios": [
                {"label": "topological", "set": {}},
                {"label": "trivial", "set": {"waveguide.delta": -0.3}},
                {"label": "disordered", "set": {"disorder": {"strength": 0.2, "seed": 7}}},
            ],
            "output": {"prefix": "fig3"},
        },
    },
    "fig3b": {
        "description": "two dimer-form emitters two cells apart at zero detuning: "
                       "transfer fidelity under exact evolution, both phases",
        "config": {
            "experiment": "evolve",
            "waveguide": {"delta": 0.2, "cells": 40},
            "atoms": [_dimer_atom(19), _dimer_atom(21)],
            "grids": {"time": {"start": 0.0, "stop": 500.0, "points": 1001}},
            "evolve": {"model": "full", "initial": "atom:0", "target": "atom:1"},
            "scenarios": [
                {"label": "topological", "set": {}},
                {"label": "trivial", "set": {"waveguide.delta": -0.2}},
            ],
            "output": {"prefix": "fig3b"},
        },
    },
    "fig3cd": {
        "description": "point-emitter pair versus giant pairs at matched coupling: "
                       "dimer-form pair (equal curves) and staggered pair (half period)",
        "config": {
            "experiment": "transfer",
            "waveguide": {"delta": 0.3333333333333333, "cells": 40},
            "atoms": [_dimer_atom(19, 0.015), _dimer_atom(21, 0.015)],
            "grids": {"time": {"start": 0.0, "stop": 60000.0, "points": 2401}},
            "transfer": {"source": 0, "destination": 1},
            "scenarios": [
                {"label": "giant-dimer", "set": {}},
                {"label": "small-pair", "set": {"atoms": [
                    {"detuning": 0.0, "nodes": [{"cell": 19, "sublattice": "B", "strength": 0.015}]},
                    {"detuning": 0.0, "nodes": [{"cell": 21, "sublattice": "A", "strength": 0.015}]}]}},
                {"label": "giant-staggered", "set": {"atoms": [
                    _form_atom("a", "b", 1, 19, 0.015), _form_atom("a", "b", 1, 21, 0.015)]}},
            ],
            "output": {"prefix": "fig3cd"},
        },
    },
    "fig4": {
        "description": "band-regime decay rate against detuning for the point emitter "
                       "and every two-node coupling form (dimerization must be supplied)",
        "config": {
            "experiment": "markov-scan",
            "waveguide": {"delta": None, "cells": 40},
            "atoms": [_dimer_atom(10, detuning=1.5)],
            "grids": {"detuning": {"band": "upper", "margin": 0.02, "points": 120}},
            "scenarios": _scan_scenarios(),
            "output": {"prefix": "fig4"},
        },
    },
    "fig5": {
        "description": "space-time photon map for the same-sublattice two-node emitter "
                       "at its interference zero (dimerization must be supplied)",
        "config": {
            "experiment": "photon-map",
            "waveguide": {"delta": None, "cells": 201},
            "atoms": [_form_atom("a", "a", 2, 100, 0.1, 1.445)],
            "grids": {"time": {"start": 0.0, "stop": 200.0, "points": 201}},
            "evolve": {"model": "full", "initial": "atom:0"},
            "output": {"prefix": "fig5"},
        },
    },
    "fig6": {
        "description": "two-emitter coherent and dissipative couplings against detuning "
                       "for bridge separations 0..3 (dimerization must be supplied)",
        "config": {
            "experiment": "markov-scan",
            "waveguide": {"delta": None, "cells": 40},
            "atoms": [_form_atom("b", "a", 1, 14), _form_atom("b", "a", 1, 16)],
            "grids": {"detuning": {"band": "upper", "margin": 0.02, "points": 80}},
            "scenarios": _two_atom_scenarios(),
            "output": {"prefix": "fig6"},
        },
    },
    "fig7": {
        "description": "excitation transfer between two bridge-coupled two-node emitters "
                       "(node separation 3, emitter separation 2; dimerization must be "
                       "supplied, and the detuning can be overridden to sit exactly on "
                       "the coupling form's interference zero)",
        "config": {
            "experiment": "transfer",
            "waveguide": {"delta": None, "cells": 40},
            "atoms": [_form_atom("b", "a", 3, 18, 0.1, 1.745),
                      _form_atom("b", "a", 3, 20, 0.1, 1.745)],
            "grids": {"time": {"start": 0.0, "stop": 900.0, "points": 2001}},
            "transfer": {"source": 0, "destination": 1},
            "output": {"prefix": "fig7"},
        },
    },
}


def preset_names() -> List[str]:
    return sorted(PRESETS)


def preset_config(name: str) -> dict:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return copy.deepcopy(PRESETS[name]["config"])


def preset_description(name: str) -> str:
    return PRESETS[name]["description"]


def required_overrides(name: str) -> List[str]:
    """Dotted paths of fields a preset leaves unset on purpose."""
    out = []

    def walk(node, path):
        if isinstance(node, dict):
            for k, v in node.items():
                walk(v, f"{path}.{k}" if path else str(k))
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, f"{path}.{i}")
        elif node is None:
            out.append(path)

    walk(PRESETS[name]["config"], "")
    return out
