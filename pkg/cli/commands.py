"""
Command-line commands: coeffs, expand, simulate and examples.

Each command returns an exit code; exceptions are mapped to exit codes by
app.main.
"""
import argparse
import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from core.cli_strings import EXIT_OK, MANIFEST_SUFFIX, RECORD_SUFFIX, TOOL_VERSION, render_csv
from core.config import GausstailConfig, worker_threads
from core.models import RunManifest
from expansion.terms import expansion_3d, sfh_expansion_2d
from geometry.loader import Geometry, load_geometry
from geometry.planar import GeometryError, PlanarSet, steiner_coefficients_2d
from geometry.polytope import BoxUnion, PolytopeSummary, box_union, polytope_coefficients
from oracle.grid import oracle_fit
from simulation.montecarlo import estimate_exceedance, refinement_check


logger = logging.getLogger(__name__)


class UsageError(ValueError):
    """Exception raised for invalid command-line arguments."""
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gausstail",
        description="Steiner coefficients, tail expansions and Monte Carlo checks for Gaussian field maxima",
    )
    parser.add_argument("--config", type=Path, help="JSON configuration file")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    coeffs = sub.add_parser("coeffs", help="exact Steiner coefficients of a geometry")
    coeffs.add_argument("--geometry", type=Path, required=True)
    coeffs.add_argument("--oracle", action="store_true", help="add coefficients fitted on a grid")
    coeffs.add_argument("--out", type=Path)

    expand = sub.add_parser("expand", help="tail expansion on a grid of levels")
    expand.add_argument("--geometry", type=Path, required=True)
    expand.add_argument("--u-min", type=float, required=True)
    expand.add_argument("--u-max", type=float, required=True)
    expand.add_argument("--u-step", type=float, required=True)
    expand.add_argument("--out", type=Path)

    simulate = sub.add_parser("simulate", help="Monte Carlo exceedance probabilities")
    simulate.add_argument("--geometry", type=Path, required=True)
    simulate.add_argument("--levels", required=True, help='comma-separated levels, e.g. "1.5,2,2.5"')
    simulate.add_argument("--replicates", type=int, default=100_000)
    simulate.add_argument("--grid-h", type=float)
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--diagnostics", action="store_true", help="run excursion diagnostics")
    simulate.add_argument("--no-refine", action="store_true", help="skip the h/2 sensitivity rerun")
    simulate.add_argument("--out", type=Path)

    examples = sub.add_parser("examples", help="reproduce the closed-form examples")
    examples.add_argument("--oracle-off", action="store_true", help="skip grid rows")
    examples.add_argument("--out", type=Path)
    return parser


def make_manifest(command: str, started: float, input_hash: Optional[str] = None, seed: Optional[int] = None,
                  parameters: Optional[Dict[str, Any]] = None) -> RunManifest:
    return RunManifest(command=command, input_hash=input_hash, seed=seed, parameters=parameters or {},
                       tool_version=TOOL_VERSION, wall_time=time.perf_counter() - started)


def write_text(text: str, out: Optional[Path]):
    """Write to `out` with LF line endings, or to stdout."""
    if out is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    out.write_text(text, encoding="utf-8", newline="\n")
    logger.info(f"Wrote {out}")


def write_csv(header: Sequence[str], rows: List[Sequence], out: Optional[Path], manifest: RunManifest):
    """CSV to `out` plus a manifest sidecar, so the CSV bytes depend only on the inputs."""
    write_text(render_csv(header, rows), out)
    if out is not None:
        sidecar = out.with_name(out.name + MANIFEST_SUFFIX)
        sidecar.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")


def write_json(record: Dict[str, Any], out: Optional[Path], manifest: RunManifest):
    record = {"manifest": manifest.model_dump(mode="json"), **record}
    write_text(json.dumps(record, indent=2) + "\n", out)


def _exact_coefficients(geometry: Geometry):
    if isinstance(geometry, PlanarSet):
        return steiner_coefficients_2d(geometry)
    summary = box_union(geometry) if isinstance(geometry, BoxUnion) else geometry
    return polytope_coefficients(summary)


def cmd_coeffs(args: argparse.Namespace, config: GausstailConfig) -> int:
    started = time.perf_counter()
    geometry, digest = load_geometry(args.geometry)
    exact = _exact_coefficients(geometry)
    record: Dict[str, Any] = {"exact": exact.model_dump(mode="json")}

    if isinstance(geometry, PlanarSet):
        record["irregular_points"] = [
            {"location": list(p.location), "kind": p.kind.value, "angles": list(p.angles)}
            for p in geometry.irregular_points
        ]

    if args.oracle:
        if isinstance(geometry, PolytopeSummary):
            logger.warning("explicit polytope summaries carry no geometry; skipping the oracle")
        else:
            pin = exact.L3 if isinstance(geometry, BoxUnion) else None
            fit = oracle_fit(geometry, config, threads=worker_threads(config), pin_constant=pin)
            fitted = fit.as_coeffs_2d() if isinstance(geometry, PlanarSet) else fit.as_coeffs_3d()
            record["fitted"] = fitted.model_dump(mode="json")
            record["fit"] = {"coefficients": list(fit.coefficients), "residual": fit.residual, "eps": fit.eps}

    manifest = make_manifest("coeffs", started, digest, parameters={"geometry": str(args.geometry),
                                                                    "oracle": bool(args.oracle)})
    write_json(record, args.out, manifest)
    return EXIT_OK


def level_grid(u_min: float, u_max: float, u_step: float) -> List[float]:
    """Levels u_min, u_min + step, ... up to u_max inclusive."""
    if not u_step > 0:
        raise UsageError(f"--u-step must be positive, got {u_step}")
    if not 0 < u_min <= u_max:
        raise UsageError(f"need 0 < u-min <= u-max, got {u_min}, {u_max}")
    count = int(np.floor((u_max - u_min) / u_step + 1e-9)) + 1
    return [u_min + i * u_step for i in range(count)]


def parse_levels(text: str) -> List[float]:
    try:
        levels = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise UsageError(f"invalid --levels {text!r}") from e
    if not levels:
        raise UsageError("--levels is empty")
    return levels


def cmd_expand(args: argparse.Namespace, config: GausstailConfig) -> int:
    started = time.perf_counter()
    levels = level_grid(args.u_min, args.u_max, args.u_step)
    geometry, digest = load_geometry(args.geometry)
    coefficients = _exact_coefficients(geometry)

    if isinstance(geometry, PlanarSet):
        header = ["u", "term_L0", "term_L1", "term_sigma2", "total"]
        names = ["L0", "L1", "sigma2"]
        expand = sfh_expansion_2d
    else:
        header = ["u", "term_L1", "term_L2", "term_L3", "total"]
        names = ["L1", "L2", "L3"]
        expand = expansion_3d

    rows = []
    for u in levels:
        result = expand(coefficients, u)
        rows.append([u, *(result.term(name).product for name in names), result.total])

    manifest = make_manifest("expand", started, digest, parameters={
        "geometry": str(args.geometry), "u_min": args.u_min, "u_max": args.u_max, "u_step": args.u_step})
    write_csv(header, rows, args.out, manifest)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, config: GausstailConfig) -> int:
    started = time.perf_counter()
    levels = parse_levels(args.levels)
    if args.replicates < 1:
        raise UsageError(f"--replicates must be positive, got {args.replicates}")
    geometry, digest = load_geometry(args.geometry)
    if not isinstance(geometry, PlanarSet):
        raise GeometryError("simulation needs a planar geometry")

    coefficients = steiner_coefficients_2d(geometry)
    threads = worker_threads(config)
    estimates = estimate_exceedance(geometry, levels, args.replicates, h=args.grid_h, seed=args.seed,
                                    config=config, threads=threads, diagnostics=args.diagnostics)

    header = ["u", "p_hat", "standard_error", "expansion", "ratio", "replicates", "hits",
              "a1", "a2", "a3", "a4", "sandwich_failures"]
    rows = []
    for estimate in estimates:
        expansion = sfh_expansion_2d(coefficients, estimate.u).total
        d = estimate.diagnostics
        rows.append([estimate.u, estimate.p_hat, estimate.standard_error, expansion,
                     estimate.p_hat / expansion if expansion else float("nan"),
                     estimate.replicates, estimate.hits, d.a1, d.a2, d.a3, d.a4, d.sandwich_failures])

    refinement = [] if args.no_refine else refinement_check(
        geometry, estimates, h=args.grid_h, seed=args.seed, config=config, threads=threads)
    parameters = {"geometry": str(args.geometry), "levels": levels, "replicates": args.replicates,
                  "grid_h": estimates[0].grid_h, "waves": config.simulation.waves}
    manifest = make_manifest("simulate", started, digest, seed=args.seed, parameters=parameters)
    write_csv(header, rows, args.out, manifest)

    record = {
        "estimates": [e.model_dump(mode="json") for e in estimates],
        "refinement": [r.model_dump(mode="json") for r in refinement],
    }
    write_json(record, None if args.out is None else args.out.with_name(args.out.stem + RECORD_SUFFIX), manifest)
    return EXIT_OK

