"""Scenario files: the declarative JSON schema the CLI consumes.

A scenario bundles a system definition, an initial condition (explicit
state or a seed for the deterministic sampler), integration settings and
the list of requested analyses. JSON is used as the key-value tree
dialect: exact decimal floating-point parsing, machine-diffable output,
stdlib round-tripping.

Schema (all matrices row-major):

    {
      "system": {"n": 4, "m": 3, "D": [[...], ...], "B": [[[...], ...], ...]},
      "initial_condition": {"seed": 7} | {"state": [[...], ...]},
      "t_end": 10000.0,
      "integrator": {"rel_tol": ..., "abs_tol": ..., "max_step": ...,
                     "invariance_tol": ...},
      "analyses": ["dfe", "boundary", "line", "plane", "monotonicity"],
      "line": {"C": [[...], ...]},
      "tolerance": 1e-9
    }

integrator, line and tolerance are optional; "line" analyses require the
C matrix that generates the equilibrium line.

Four built-in presets reproduce the canonical 4-node benchmark: the same
weighted-cycle contact layers with small per-preset offsets that flip
which attractor (a boundary point or a line of coexistence equilibria)
the dynamics settle on.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import model
from .errors import ScenarioError, TriVirusError
from .model import MultiVirusSystem, SystemState
from .simulate import IntegratorOptions

KNOWN_ANALYSES = ("dfe", "boundary", "line", "plane", "monotonicity")

DEFAULT_T_END = 1e4
DEFAULT_VERDICT_TOL = 1e-9


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario: system, initial condition, integration and analyses."""

    system: MultiVirusSystem
    seed: int | None
    initial_state: SystemState | None
    t_end: float
    integrator: IntegratorOptions
    analyses: tuple[str, ...]
    line_C: np.ndarray | None
    tolerance: float


def parse_scenario_dict(doc) -> Scenario:
    """Validate a scenario document (already JSON-decoded) into a Scenario.

    Raises:
        ScenarioError: any schema violation, with a path-ish message.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("scenario root must be an object")
    try:
        sysdoc = doc["system"]
        D = sysdoc["D"]
        B = sysdoc["B"]
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"missing system definition field: {exc}") from exc
    try:
        system = model.build_system(D, B)
    except TriVirusError as exc:
        raise ScenarioError(f"invalid system definition: {exc}") from exc
    if "n" in sysdoc and int(sysdoc["n"]) != system.n:
        raise ScenarioError(f"declared n={sysdoc['n']} but matrices have n={system.n}")
    if "m" in sysdoc and int(sysdoc["m"]) != system.m:
        raise ScenarioError(f"declared m={sysdoc['m']} but {system.m} viruses were given")

    seed = None
    initial_state = None
    ic = doc.get("initial_condition")
    if ic is not None:
        if not isinstance(ic, dict) or not ({"seed", "state"} & ic.keys()):
            raise ScenarioError("initial_condition must carry 'seed' or 'state'")
        if "seed" in ic:
            seed = int(ic["seed"])
        else:
            state = np.asarray(ic["state"], dtype=float)
            if state.shape != (system.m, system.n):
                raise ScenarioError(
                    f"initial state shape {state.shape} does not match ({system.m}, {system.n})"
                )
            initial_state = SystemState.from_blocks(state)

    t_end = float(doc.get("t_end", DEFAULT_T_END))
    if t_end <= 0.0:
        raise ScenarioError(f"t_end must be positive, got {t_end}")

    integrator = IntegratorOptions()
    intdoc = doc.get("integrator", {})
    if not isinstance(intdoc, dict):
        raise ScenarioError("integrator must be an object")
    for key in ("rel_tol", "abs_tol", "max_step", "invariance_tol", "max_samples"):
        if key in intdoc:
            value = intdoc[key]
            integrator = replace(
                integrator, **{key: int(value) if key == "max_samples" else float(value)}
            )

    analyses = tuple(doc.get("analyses", ("dfe", "boundary", "monotonicity")))
    unknown = [a for a in analyses if a not in KNOWN_ANALYSES]
    if unknown:
        raise ScenarioError(f"unknown analyses requested: {unknown}")

    line_C = None
    if "line" in doc:
        linedoc = doc["line"]
        if not isinstance(linedoc, dict) or "C" not in linedoc:
            raise ScenarioError("line section must carry the generator matrix C")
        line_C = np.asarray(linedoc["C"], dtype=float)
        if line_C.shape != (system.n, system.n):
            raise ScenarioError(f"line C has shape {line_C.shape}, expected ({system.n}, {system.n})")
    if "line" in analyses and line_C is None:
        raise ScenarioError("line analysis requested but no line.C matrix given")

    tolerance = float(doc.get("tolerance", DEFAULT_VERDICT_TOL))
    return Scenario(
        system=system,
        seed=seed,
        initial_state=initial_state,
        t_end=t_end,
        integrator=integrator,
        analyses=analyses,
        line_C=line_C,
        tolerance=tolerance,
    )


def serialize_scenario(scn: Scenario) -> dict:
    """Scenario back to its document form; parse(serialize(s)) == s semantically."""
    doc: dict = {
        "system": {
            "n": scn.system.n,
            "m": scn.system.m,
            "D": scn.system.D.tolist(),
            "B": scn.system.B.tolist(),
        },
        "t_end": scn.t_end,
        "integrator": {
            "rel_tol": scn.integrator.rel_tol,
            "abs_tol": scn.integrator.abs_tol,
            "max_step": scn.integrator.max_step,
            "invariance_tol": scn.integrator.invariance_tol,
            "max_samples": scn.integrator.max_samples,
        },
        "analyses": list(scn.analyses),
        "tolerance": scn.tolerance,
    }
    if scn.seed is not None:
        doc["initial_condition"] = {"seed": scn.seed}
    elif scn.initial_state is not None:
        doc["initial_condition"] = {"state": scn.initial_state.x.tolist()}
    if scn.line_C is not None:
        doc["line"] = {"C": scn.line_C.tolist()}
    return doc


# -- built-in benchmark presets ---------------------------------------------

_CYCLE_SHIFT_DOWN = np.array(
    [
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
_CYCLE_SHIFT_UP = _CYCLE_SHIFT_DOWN.T

# per-preset offsets: (b2_12, b3_13, b3_22, b3_31)
_PRESET_OFFSETS = {
    1: (-0.1, 0.0, -0.1, 0.10),
    2: (-0.1, 0.0, -0.1, 0.15),
    3: (0.0, 0.05, 0.0, 0.0),
    4: (0.0, -0.1, 0.0, 0.0),
}


def benchmark_matrices(example_id: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Infection matrices (B1, B2, B3) of built-in preset 1..4."""
    if example_id not in _PRESET_OFFSETS:
        raise ScenarioError(f"example id must be in 1..4, got {example_id}")
    b2_12, b3_13, b3_22, b3_31 = _PRESET_OFFSETS[example_id]
    B1 = 1.5 * _CYCLE_SHIFT_DOWN
    B2 = 1.5 * _CYCLE_SHIFT_UP
    B2[0, 1] += b2_12
    B3 = np.array(
        [
            [1.0, 0.0, 0.5 + b3_13, 0.0],
            [0.0, 1.0 + b3_22, 0.5, 0.0],
            [0.0, 0.5, 0.0, 1.0],
            [0.3 + b3_31, 0.0, 1.2, 0.0],
        ]
    )
    return B1, B2, B3


def builtin_example(example_id: int, seed: int = 0) -> Scenario:
    """Built-in preset scenario: 4 nodes, unit healing rates, full analyses.

    Presets 3 and 4 carry an exact line of coexistence equilibria, so the
    line-generator matrix C = (I - Z)B2 (a plain cyclic permutation for
    this family) is included and line analysis is requested.
    """
    B1, B2, B3 = benchmark_matrices(example_id)
    ones = np.ones(4)
    system = model.build_system([ones, ones, ones], [B1, B2, B3])
    analyses = ["dfe", "boundary", "monotonicity", "plane"]
    line_C = None
    if example_id in (3, 4):
        line_C = _CYCLE_SHIFT_UP.copy()
        analyses.insert(2, "line")
    return Scenario(
        system=system,
        seed=seed,
        initial_state=None,
        t_end=DEFAULT_T_END,
        integrator=IntegratorOptions(),
        analyses=tuple(analyses),
        line_C=line_C,
        tolerance=DEFAULT_VERDICT_TOL,
    )


__all__ = [
    "DEFAULT_T_END",
    "DEFAULT_VERDICT_TOL",
    "KNOWN_ANALYSES",
    "Scenario",
    "benchmark_matrices",
    "builtin_example",
    "parse_scenario_dict",
    "serialize_scenario",
]
