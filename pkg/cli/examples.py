"""
Report that reproduces the closed-form examples and checks them against the
grid oracle.
"""
import argparse
import logging
import math
import time
import warnings
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from cli.commands import make_manifest, write_json
from core.cli_strings import EXIT_ACCEPTANCE_FAILURE, EXIT_OK
from core.config import GausstailConfig, worker_threads
from expansion.kernels import gaussian_kernels
from expansion.terms import joint_exceedance_asymptotic, sfh_expansion_2d, tangent_pair_coefficient
from geometry.loader import load_geometry
from geometry.planar import (
    Edge, IrregularKind, PlanarSet, concave_summand, euler_characteristic, glued_coefficients,
    split_at_concave_vertex, steiner_coefficients_2d, tangent_pair_intersection_area, tube_constants, validate_set,
)
from geometry.polytope import box_union, dihedral_subtraction_constant, polytope_coefficients
from oracle.grid import MixedOrderWarning, estimate_intersection_constant, intersection_volumes, oracle_fit


logger = logging.getLogger(__name__)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

PLANAR_FIXTURES = ["disk", "unit_square", "angle", "multi_angle", "empty_square", "whisker_square",
                   "l_hexagon", "square_with_hole"]
SOLID_FIXTURES = ["cube", "box_1x1x2", "l_shape_3d"]


class ExampleRow(BaseModel):
    """One checked quantity of the report."""
    name: str
    quantity: str
    source: str
    expected: float
    value: float
    tolerance: float
    relative: bool = True
    passed: bool


def check(name: str, quantity: str, expected: float, value: float, tolerance: float,
          relative: bool = True, source: str = "exact") -> ExampleRow:
    scale = abs(expected) if relative and expected != 0 else 1.0
    passed = bool(abs(value - expected) <= tolerance * scale)
    return ExampleRow(name=name, quantity=quantity, source=source, expected=expected, value=value,
                      tolerance=tolerance, relative=relative, passed=passed)


def fixture(name: str):
    geometry, _ = load_geometry(FIXTURES / f"{name}.json")
    return geometry


def tangent_pair(R: float = 1.0, length: float = 1.5) -> Tuple[PlanarSet, PlanarSet]:
    """An arc of radius R leaving the origin along +x and a segment along +x from the origin."""
    arc = Edge.arc((0.0, R), R, -0.5 * math.pi, 0.0)
    segment = Edge.segment((0.0, 0.0), (length, 0.0))
    sets = []
    for edge in (arc, segment):
        raw = edge.model_dump(mode="json", by_alias=True, exclude_none=True)
        sets.append(validate_set({"dimension": 2, "components": [{"curve": [raw]}]}))
    return sets[0], sets[1]


def crossing_pair() -> Tuple[PlanarSet, PlanarSet]:
    return fixture("crossing_a"), fixture("crossing_b")


def concave_vertex_pieces() -> Tuple[Tuple[PlanarSet, PlanarSet, PlanarSet], float, Tuple[float, float]]:
    """Pieces of the L-shaped hexagon at its concave vertex, with that vertex's angle and location."""
    hexagon = fixture("l_hexagon")
    vertex = hexagon.points_of(IrregularKind.CONCAVE_BINARY)[0]
    return split_at_concave_vertex(hexagon, vertex), vertex.angles[0], vertex.location


def exact_rows(config: GausstailConfig) -> List[ExampleRow]:
    tol = config.acceptance.exact_rel
    quarter = concave_summand(math.pi / 2.0) / math.pi
    rows = []

    angle = steiner_coefficients_2d(fixture("angle"))
    rows.append(check("angle", "L0", 1.0 + quarter, angle.L0, tol))
    rows.append(check("angle", "L1", 4.0, angle.L1, tol))
    rows.append(check("multi_angle", "L0", 1.0 + 2.0 * quarter, steiner_coefficients_2d(fixture("multi_angle")).L0, tol))

    empty = steiner_coefficients_2d(fixture("empty_square"))
    rows.append(check("empty_square", "L0", (math.pi - 4.0) / math.pi, empty.L0, tol))
    rows.append(check("empty_square", "L1", 8.0, empty.L1, tol))

    whisker = steiner_coefficients_2d(fixture("whisker_square"))
    rows.append(check("whisker_square", "L0", (2.0 * math.pi - 4.0) / math.pi, whisker.L0, tol))
    rows.append(check("whisker_square", "L1", 6.0, whisker.L1, tol))

    disk = steiner_coefficients_2d(fixture("disk"))
    for quantity, expected, value in zip(("sigma2", "L1", "L0"), (math.pi, 2.0 * math.pi, 1.0), disk.as_tuple()):
        rows.append(check("disk", quantity, expected, value, tol))
    holed = fixture("square_with_hole")
    rows.append(check("square_with_hole", "chi", 0.0, float(euler_characteristic(holed)), tol, relative=False))
    rows.append(check("square_with_hole", "L0", (math.pi - 4.0) / math.pi, steiner_coefficients_2d(holed).L0, tol))

    hexagon = fixture("l_hexagon")
    direct = steiner_coefficients_2d(hexagon)
    glued = glued_coefficients(hexagon, hexagon.points_of(IrregularKind.CONCAVE_BINARY)[0])
    rows.append(check("l_hexagon", "L0", 1.0 + quarter, direct.L0, tol))
    rows.append(check("l_hexagon glued", "L0", direct.L0, glued.L0, tol))
    rows.append(check("l_hexagon glued", "L1", direct.L1, glued.L1, tol))

    u = 2.5
    rows.append(check("angle expansion u=2.5", "total", 0.019772, sfh_expansion_2d(angle, u).total, 1e-3))

    k = tangent_pair_coefficient(1.0)
    _, density = gaussian_kernels(3.0)
    via_joint = joint_exceedance_asymptotic(8.0 / 3.0, 0.5, 2, 3.0) / (density / math.sqrt(3.0))
    rows.append(check("tangent pair", "u^-1/2 coefficient", 0.656004, k, 1e-5))
    rows.append(check("tangent pair", "joint asymptotic d=1/2", k, via_joint, tol))

    rows.append(check("dihedral", "constant alpha=pi/2", 1.068310, dihedral_subtraction_constant(math.pi / 2.0), 1e-6))

    for name, expected in (("cube", (3.0, 3.0, 1.0)), ("box_1x1x2", (4.0, 5.0, 2.0)),
                           ("l_shape_3d", (21.0 / 4.0 - 1.0 / math.pi, 7.0, 3.0))):
        coefficients = polytope_coefficients(box_union(fixture(name)))
        for quantity, e, v in zip(("L1", "L2", "L3"), expected, coefficients.as_tuple()):
            rows.append(check(name, quantity, e, v, tol))
    summary = polytope_coefficients(fixture("l_shape_summary"))
    rows.append(check("l_shape summary", "L1", 21.0 / 4.0 - 1.0 / math.pi, summary.L1, tol))
    return rows


def planar_oracle_rows(config: GausstailConfig, threads: int) -> List[ExampleRow]:
    acceptance = config.acceptance
    rows = []
    for name in PLANAR_FIXTURES:
        geometry = fixture(name)
        exact = steiner_coefficients_2d(geometry)
        fitted = oracle_fit(geometry, config, threads=threads).as_coeffs_2d()
        if exact.sigma2 == 0:
            rows.append(check(name, "sigma2", 0.0, fitted.sigma2, acceptance.sigma2_abs, False, "oracle"))
        else:
            rows.append(check(name, "sigma2", exact.sigma2, fitted.sigma2, acceptance.sigma2_rel, True, "oracle"))
        rows.append(check(name, "L1", exact.L1, fitted.L1, acceptance.L1_rel, True, "oracle"))
        rows.append(check(name, "L0", exact.L0, fitted.L0, acceptance.L0_abs, False, "oracle"))
    return rows


def solid_oracle_rows(config: GausstailConfig, threads: int) -> List[ExampleRow]:
    tol = config.acceptance.polytope_rel
    rows = []
    for name in SOLID_FIXTURES:
        union = fixture(name)
        summary = box_union(union)
        exact = polytope_coefficients(summary)
        fit = oracle_fit(union, config, threads=threads, pin_constant=summary.volume)
        rows.append(check(name, "surface area", summary.surface_area, fit.coefficients[1], tol, True, "oracle"))
        rows.append(check(name, "pi*L1", math.pi * exact.L1, fit.coefficients[2], tol, True, "oracle"))
    return rows


def intersection_rows(config: GausstailConfig, threads: int) -> List[ExampleRow]:
    acceptance = config.acceptance
    rows = []

    (s1, s2, s3), beta, vertex = concave_vertex_pieces()
    c13, c123 = tube_constants(beta)
    h = 5e-4
    eps = [h * c for c in np.unique(np.round(np.geomspace(40, 200, 10)))]
    at_vertex = (vertex, vertex)
    for label, sets, expected in (("C13", (s1, s3), c13), ("C123", (s1, s2, s3), c123)):
        volumes = intersection_volumes(sets, at_vertex, eps, h, config, threads)
        constant = estimate_intersection_constant(eps, volumes, n=2, d=0).constant
        rows.append(check("concave vertex", label, expected, constant, acceptance.intersection_rel, True, "oracle"))

    origin = (0.0, 0.0)
    volumes = intersection_volumes(crossing_pair(), (origin, origin), eps, h, config, threads)
    constant = estimate_intersection_constant(eps, volumes, n=2, d=0).constant
    rows.append(check("crossing", "C", 4.0, constant, acceptance.intersection_rel, True, "oracle"))

    # the sliver between arc and segment reaches x ~ 2 sqrt(R eps)
    R, h = 1.0, 1e-3
    eps = [h * c for c in np.unique(np.round(np.geomspace(10, 100, 10)))]
    sliver = ((0.0, 0.0), (2.0 * math.sqrt(R * max(eps)) + 0.05, 0.0))
    volumes = intersection_volumes(tangent_pair(R), sliver, eps, h, config, threads)
    worst = max(abs(v / tangent_pair_intersection_area(R, e)[0] - 1.0) for e, v in zip(eps, volumes))
    rows.append(check("tangent pair", "area rel. error", 0.0, worst, acceptance.tangent_rel, False, "oracle"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MixedOrderWarning)
        mixed = estimate_intersection_constant(eps, volumes, n=2, d=0).mixed_order
    rows.append(check("tangent pair", "mixed-order flag", 1.0, float(mixed), 0.0, False, "oracle"))
    return rows


def render_table(rows: List[ExampleRow], console: Optional[Console] = None):
    table = Table(title="gausstail examples")
    for column in ("example", "quantity", "source", "expected", "value", "tolerance", "status"):
        table.add_column(column)
    for row in rows:
        status = "[green]ok[/green]" if row.passed else "[red]FAIL[/red]"
        tolerance = f"{row.tolerance:.0e} {'rel' if row.relative else 'abs'}"
        table.add_row(row.name, row.quantity, row.source, f"{row.expected:.10g}", f"{row.value:.10g}",
                      tolerance, status)
    (console or Console()).print(table)


def cmd_examples(args: argparse.Namespace, config: GausstailConfig) -> int:
    started = time.perf_counter()
    threads = worker_threads(config)
    rows = exact_rows(config)
    if not args.oracle_off:
        rows += planar_oracle_rows(config, threads)
        rows += solid_oracle_rows(config, threads)
        rows += intersection_rows(config, threads)

    render_table(rows)
    failed = [row for row in rows if not row.passed]
    for row in failed:
        logger.error(f"{row.name} {row.quantity}: expected {row.expected:.10g}, got {row.value:.10g}")

    if args.out is not None:
        manifest = make_manifest("examples", started, parameters={"oracle_off": bool(args.oracle_off)})
        write_json({"rows": [row.model_dump() for row in rows]}, args.out, manifest)

    logger.info(f"{len(rows) - len(failed)}/{len(rows)} example checks passed")
    return EXIT_ACCEPTANCE_FAILURE if failed else EXIT_OK
