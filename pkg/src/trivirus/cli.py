"""Command-line front end.

Subcommands:

    analyze <scenario> [--out FILE] [--tol X]
    simulate <scenario> [--seed N] [--t-end T] [--out DIR]
    example <1-4> [--seed N] [--out DIR]
    monotonicity <scenario> [--out FILE]
    sweep <dir> [--out DIR] [--jobs N]

Scenario and report files are JSON (see scenarios module). Reports are
written atomically (temp file + rename), so failures never leave partial
output. TRIVIRUS_OUT_DIR sets the default output directory.

Exit codes: 0 success, 2 scenario/schema error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from dataclasses import replace

from . import __version__, model, monotonicity, scenarios
from .equilibria import (
    KIND_BOUNDARY,
    KIND_DFE,
    EquilibriumDescriptor,
    construct_line_system,
    line_descriptor,
    plane_descriptor,
)
from .errors import (
    NumericalError,
    ScenarioError,
    StructuralError,
    SubThresholdSystem,
)
from .model import SystemState
from .scenarios import Scenario
from .simulate import (
    detect_convergence,
    integrate,
    random_initial_condition,
    write_trajectory_csv,
)
from .stability import (
    LOCALLY_EXPONENTIALLY_ATTRACTIVE,
    LOCALLY_EXPONENTIALLY_STABLE,
    boundary_stability,
    check_identical_viruses,
    dfe_report,
    line_stability,
    lyapunov_certificate,
)

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3

CONVERGENCE_TOL = 1e-6


def _jsonable(value):
    """Recursively convert to JSON-safe types; non-finite floats become strings."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.floating, float)):
        f = float(value)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_json(path: Path, doc) -> None:
    _atomic_write_text(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


def _load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario {path} is not valid JSON: {exc}") from exc
    return scenarios.parse_scenario_dict(doc)


def _out_dir(explicit) -> Path:
    if explicit:
        return Path(explicit)
    return Path(os.environ.get("TRIVIRUS_OUT_DIR", "."))


# -- analysis pipeline -------------------------------------------------------


def run_analyses(scn: Scenario, tol: float | None = None) -> dict:
    """Run every requested analysis and return the report document."""
    tol = scn.tolerance if tol is None else tol
    system = scn.system
    start = time.perf_counter()
    results: dict = {}

    if "dfe" in scn.analyses:
        rep = dfe_report(system, tol)
        results["dfe"] = {
            "abscissas": rep.abscissas,
            "verdict": rep.verdict,
            "tolerance": rep.tolerance,
        }

    if "boundary" in scn.analyses:
        entries = []
        for k in range(system.m):
            try:
                verdict = boundary_stability(system, k, tol)
            except SubThresholdSystem:
                entries.append({"virus": k, "sub_threshold": True})
                continue
            entries.append(
                {
                    "virus": k,
                    "sub_threshold": False,
                    "rho_values": {str(l): rho for l, rho in verdict.rho_values},
                    "verdict": verdict.verdict,
                    "x_tilde": verdict.x_tilde,
                    "tolerance": verdict.tolerance,
                }
            )
        results["boundary"] = entries

    if "line" in scn.analyses:
        _, construction = construct_line_system(system.B[0], system.B[2], scn.line_C)
        verdict = line_stability(system, construction, tol)
        results["line"] = {
            "verdict": verdict.verdict,
            "s_value": verdict.s_value,
            "rho_value": verdict.rho_value,
            "z": verdict.z,
            "tolerance": verdict.tolerance,
        }

    if "plane" in scn.analyses:
        identical = check_identical_viruses(system)
        entry: dict = {"identical_viruses": identical}
        if identical:
            try:
                cert = lyapunov_certificate(system.D[0], system.B[0], tol)
            except SubThresholdSystem:
                entry["sub_threshold"] = True
            else:
                entry["sub_threshold"] = False
                entry["certificate"] = {
                    "x_tilde": cert.x_tilde,
                    "u_tilde": cert.u_tilde,
                    "lambda2": cert.lambda2,
                    "lambda_bar": cert.lambda_bar,
                    "p_max": cert.p_max,
                    "p_min": cert.p_min,
                    "tolerance": tol,
                }
        results["plane"] = entry

    if "monotonicity" in scn.analyses:
        results["monotonicity"] = _monotonicity_doc(system)

    return {
        "scenario": scenarios.serialize_scenario(scn),
        "analyses": results,
        "tolerance": tol,
        "version": __version__,
        "duration_seconds": time.perf_counter() - start,
    }


def _monotonicity_doc(system) -> dict:
    graph = monotonicity.signed_jacobian_graph(system)
    verdict = monotonicity.is_consistent(graph)
    doc = {
        "node_count": graph.node_count,
        "edge_count": len(graph.edges),
        "consistent": verdict.consistent,
    }
    if verdict.consistent:
        doc["gauge"] = list(verdict.gauge)
    else:
        doc["witness_cycle"] = list(verdict.witness_cycle)
        doc["witness_sign_product"] = monotonicity.cycle_sign_product(
            graph, verdict.witness_cycle
        )
    return doc


def select_convergence_target(scn: Scenario, analysis: dict):
    """Pick the attractor a simulation should be measured against.

    Preference order: attractive line, stable boundary point, plane of
    coexistence equilibria, disease-free equilibrium.
    """
    system = scn.system
    results = analysis["analyses"]
    line = results.get("line")
    if line is not None and line["verdict"] == LOCALLY_EXPONENTIALLY_ATTRACTIVE:
        return line_descriptor(system, np.asarray(line["z"], dtype=float))
    for entry in results.get("boundary", []):
        if entry.get("verdict") == LOCALLY_EXPONENTIALLY_STABLE:
            k = entry["virus"]
            x = np.zeros((system.m, system.n))
            x[k] = np.asarray(entry["x_tilde"], dtype=float)
            point = SystemState.from_blocks(x)
            residual = float(np.max(np.abs(model.vector_field(system, point))))
            return EquilibriumDescriptor(
                kind=KIND_BOUNDARY, base_point=point, residual=residual, virus=k
            )
    plane = results.get("plane")
    if plane is not None and plane.get("identical_viruses") and not plane.get("sub_threshold", True):
        return plane_descriptor(system, np.asarray(plane["certificate"]["x_tilde"], dtype=float))
    zero = SystemState.from_blocks(np.zeros((system.m, system.n)))
    return EquilibriumDescriptor(kind=KIND_DFE, base_point=zero, residual=0.0)


def run_simulation(scn: Scenario, out_dir: Path, stem: str = "trajectory") -> dict:
    """Integrate the scenario, write the CSV, and assess convergence."""
    system = scn.system
    if scn.initial_state is not None:
        x0 = scn.initial_state
    else:
        seed = scn.seed if scn.seed is not None else 0
        x0 = random_initial_condition(system.n, system.m, seed)
    traj = integrate(system, x0, scn.t_end, scn.integrator)
    analysis = run_analyses(scn)
    target = select_convergence_target(scn, analysis)
    report = detect_convergence(traj, target, CONVERGENCE_TOL)

    csv_path = out_dir / f"{stem}.csv"
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp = csv_path.with_suffix(".csv.tmp")
    write_trajectory_csv(traj, tmp)
    os.replace(tmp, csv_path)

    target_levels = _target_levels(target, report)
    return {
        "scenario": scenarios.serialize_scenario(scn),
        "trajectory_csv": csv_path.name,
        "samples": len(traj),
        "domain_violation_max": traj.domain_violation_max,
        "terminated_reason": traj.terminated_reason,
        "convergence": {
            "target_kind": target.kind,
            "target_virus": target.virus,
            "target_levels": target_levels,
            "final_distance": report.final_distance,
            "fitted_rate": report.fitted_rate,
            "fitted_amplitude": report.fitted_amplitude,
            "converged": report.converged,
            "tolerance": report.tolerance,
            "line_parameter": report.line_parameter,
        },
        "version": __version__,
    }


def _target_levels(target, report):
    """Per-virus per-node levels the trajectory settles at (for overlays)."""
    if target.kind == "LineSegment":
        if report.line_parameter is None:
            return None
        beta = report.line_parameter
        z = target.line_z
        levels = np.vstack([beta * z, (1.0 - beta) * z, np.zeros_like(z)])
        return levels
    return target.base_point.x


# -- subcommands -------------------------------------------------------------


def cmd_analyze(args) -> int:
    scn = _load_scenario(args.scenario)
    report = run_analyses(scn, args.tol)
    out = Path(args.out) if args.out else _out_dir(None) / (Path(args.scenario).stem + ".report.json")
    _atomic_write_json(out, report)
    print(f"analysis report written to {out}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    scn = _load_scenario(args.scenario)
    if args.seed is not None:
        scn = replace(scn, seed=int(args.seed), initial_state=None)
    if args.t_end is not None:
        if args.t_end <= 0:
            raise ScenarioError("t-end must be positive")
        scn = replace(scn, t_end=float(args.t_end))
    if scn.seed is None and scn.initial_state is None:
        raise ScenarioError("scenario has no initial condition; give one or pass --seed")
    out_dir = _out_dir(args.out)
    stem = Path(args.scenario).stem
    report = run_simulation(scn, out_dir, stem=stem)
    _atomic_write_json(out_dir / f"{stem}.simulation.json", report)
    print(f"trajectory and simulation report written to {out_dir}")
    return EXIT_OK


def cmd_example(args) -> int:
    if args.id not in (1, 2, 3, 4):
        raise ScenarioError(f"example id must be 1..4, got {args.id}")
    scn = scenarios.builtin_example(args.id, seed=args.seed)
    out_dir = _out_dir(args.out) / f"example{args.id}"
    _atomic_write_json(out_dir / "scenario.json", scenarios.serialize_scenario(scn))
    analysis = run_analyses(scn)
    _atomic_write_json(out_dir / "analysis.json", analysis)
    sim = run_simulation(scn, out_dir, stem="trajectory")
    _atomic_write_json(out_dir / "simulation.json", sim)
    print(f"example {args.id} artifacts written to {out_dir}")
    return EXIT_OK


def cmd_monotonicity(args) -> int:
    scn = _load_scenario(args.scenario)
    doc = _monotonicity_doc(scn.system)
    doc["version"] = __version__
    if args.out:
        _atomic_write_json(Path(args.out), doc)
        print(f"monotonicity verdict written to {args.out}")
    else:
        print(json.dumps(_jsonable(doc), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sweep(args) -> int:
    root = Path(args.directory)
    paths = sorted(root.glob("*.json"))
    if not paths:
        raise ScenarioError(f"no scenario files (*.json) found in {root}")
    out_dir = _out_dir(args.out)

    def one(path: Path) -> tuple[str, int, str]:
        try:
            scn = _load_scenario(path)
            report = run_analyses(scn)
            _atomic_write_json(out_dir / (path.stem + ".report.json"), report)
            return path.name, EXIT_OK, "ok"
        except ScenarioError as exc:
            return path.name, EXIT_SCHEMA, str(exc)
        except (NumericalError, StructuralError) as exc:
            return path.name, EXIT_NUMERICAL, str(exc)

    worst = EXIT_OK
    with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
        for name, code, msg in pool.map(one, paths):
            status = "ok" if code == EXIT_OK else f"failed ({msg})"
            print(f"{name}: {status}")
            worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trivirus",
        description="Analyze and simulate competitive multi-virus SIS dynamics on networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the requested equilibrium/stability analyses")
    p.add_argument("scenario")
    p.add_argument("--out", help="report file (default: <scenario>.report.json)")
    p.add_argument("--tol", type=float, default=None, help="verdict tolerance override")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="integrate a scenario and assess convergence")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None, help="initial-condition seed override")
    p.add_argument("--t-end", type=float, default=None, dest="t_end")
    p.add_argument("--out", help="output directory (default: TRIVIRUS_OUT_DIR or .)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", help="run a built-in benchmark preset end to end")
    p.add_argument("id", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output directory (default: TRIVIRUS_OUT_DIR or .)")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("monotonicity", help="signed-graph consistency verdict")
    p.add_argument("scenario")
    p.add_argument("--out", help="verdict file (default: print to stdout)")
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("sweep", help="analyze every scenario JSON in a directory")
    p.add_argument("directory")
    p.add_argument("--out", help="output directory (default: TRIVIRUS_OUT_DIR or .)")
    p.add_argument("--jobs", type=int, default=None, help="worker threads")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
