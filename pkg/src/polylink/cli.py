"""Command-line interface.

Subcommands: ``analyze`` (length-vector diagnostics), ``check`` (polygon
classification), ``convexify`` (energy descent with trace/SVG output),
``atlas`` (convex-prefix interval sampling), and ``demo-figure-eight``
(the (6,4,2,4) sweep whose configuration space is a figure eight).

Exit codes: 0 success, 1 I/O or parse error, 2 infeasible or non-generic
lengths, 3 non-embedded polygon, 4 flow non-convergence (also used when
the demo's expected findings fail).  All output is deterministic: floats
print with 17 significant digits and fields appear in fixed order.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from .chain_geometry import (
    PolygonChain,
    SideLengths,
    TurnAngles,
    turn_angles_from_vertices,
    vertices_from_turn_angles,
)
from .config_space import (
    classify,
    enumerate_configurations,
    is_feasible,
    straight_line_sign_vectors,
)
from .convex_atlas import sample_atlas
from .flow import CONVERGED, FlowParams, convexify as run_convexify
from .svg_frames import write_frame_set

TAU = 2.0 * math.pi

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_LENGTHS = 2
EXIT_NONEMBEDDED = 3
EXIT_NOCONVERGE = 4


def render_json(obj) -> str:
    """Deterministic JSON: insertion order, floats at 17 significant
    digits, non-finite floats as strings."""
    if isinstance(obj, dict):
        inner = ", ".join(
            f"{json.dumps(str(k))}: {render_json(v)}" for k, v in obj.items()
        )
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        return "[" + ", ".join(render_json(v) for v in seq) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if obj is None:
        return "null"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _fail(message: str, code: int):
    click.echo(render_json({"error": message}), err=True)
    sys.exit(code)


def _load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read {path}: {exc}", EXIT_PARSE)


def _load_lengths(path: str) -> SideLengths:
    data = _load_json_file(path)
    if not isinstance(data, dict) or "lengths" not in data:
        _fail("lengths file must be a JSON object with a 'lengths' array", EXIT_PARSE)
    try:
        return SideLengths(np.asarray(data["lengths"], dtype=float))
    except (TypeError, ValueError) as exc:
        _fail(f"bad lengths: {exc}", EXIT_PARSE)


def _load_polygon(path: str) -> tuple[PolygonChain, float]:
    """Load a polygon file; returns the chain and its closure defect."""
    data = _load_json_file(path)
    if not isinstance(data, dict):
        _fail("polygon file must be a JSON object", EXIT_PARSE)
    has_verts = "vertices" in data
    has_angles = "lengths" in data or "turn_angles" in data
    if has_verts and has_angles:
        _fail("polygon file must use exactly one representation", EXIT_PARSE)
    if has_verts:
        try:
            chain = PolygonChain(np.asarray(data["vertices"], dtype=float))
        except (TypeError, ValueError) as exc:
            _fail(f"bad vertices: {exc}", EXIT_PARSE)
        return chain, 0.0
    if "lengths" not in data or "turn_angles" not in data:
        _fail(
            "polygon file needs 'vertices' or both 'lengths' and 'turn_angles'",
            EXIT_PARSE,
        )
    try:
        lengths = SideLengths(np.asarray(data["lengths"], dtype=float))
        angles = TurnAngles(np.asarray(data["turn_angles"], dtype=float))
        chain, defect = vertices_from_turn_angles(lengths, angles)
    except (TypeError, ValueError) as exc:
        _fail(f"bad polygon data: {exc}", EXIT_PARSE)
    if defect > 1e-6 * lengths.perimeter:
        _fail(f"polygon data does not close (defect {defect:.3e})", EXIT_PARSE)
    return chain, defect


def _sign_strings(report) -> list[list[str]]:
    return [["+" if s > 0 else "-" for s in vec] for vec in report.sign_vectors]


@click.group()
def main():
    """Planar polygon linkages: analysis, convexification, atlases."""


@main.command()
@click.argument("lengths_file")
def analyze(lengths_file):
    """Report dimension, feasibility, and genericity of a length vector."""
    lengths = _load_lengths(lengths_file)
    feasible = is_feasible(lengths)
    report = straight_line_sign_vectors(lengths)
    out = {
        "n": lengths.n,
        "dimension": lengths.n - 3,
        "feasible": feasible,
        "generic": len(report) == 0,
        "straight_line": _sign_strings(report),
    }
    click.echo(render_json(out))
    sys.exit(EXIT_OK if feasible else EXIT_LENGTHS)


@main.command()
@click.argument("polygon_file")
def check(polygon_file):
    """Classify a polygon: turn angles, winding, embeddedness, convexity."""
    chain, defect = _load_polygon(polygon_file)
    try:
        angles = turn_angles_from_vertices(chain)
        cls = classify(chain)
    except ValueError as exc:
        _fail(f"degenerate polygon: {exc}", EXIT_PARSE)
    out = {
        "n": chain.n,
        "closure_defect": defect,
        "turn_angles": list(angles.angles),
        "winding": cls.winding,
        "embedded": cls.embedded,
        "convex_ccw": cls.convex_ccw,
    }
    click.echo(render_json(out))
    sys.exit(EXIT_OK if cls.embedded else EXIT_NONEMBEDDED)


def _trace_json(trace) -> dict:
    return {
        "status": trace.status,
        "reflected": trace.reflected,
        "generic": trace.generic,
        "lengths": list(trace.lengths.lengths),
        "records": [
            {
                "iteration": r.iteration,
                "energy": r.energy,
                "log_energy": r.log_energy,
                "min_turn_angle": r.min_turn_angle,
                "step_size": r.step_size,
            }
            for r in trace.records
        ],
        "snapshots": [
            {"step": s.step, "vertices": [list(v) for v in s.vertices]}
            for s in trace.snapshots
        ],
    }


@main.command()
@click.argument("polygon_file")
@click.option("--step", type=float, default=1e-2, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--max-iter", type=int, default=100_000, show_default=True)
@click.option("--trace", "trace_path", type=str, default=None)
@click.option("--svg", "svg_dir", type=str, default=None)
@click.option("--stride", type=int, default=10, show_default=True)
def convexify(polygon_file, step, tol, max_iter, trace_path, svg_dir, stride):
    """Convexify an embedded polygon by energy descent."""
    chain, _ = _load_polygon(polygon_file)
    params = FlowParams(
        initial_step=step,
        convexity_tol=tol,
        max_iterations=max_iter,
        snapshot_stride=stride,
    )
    try:
        trace = run_convexify(chain, params)
    except ValueError as exc:
        _fail(str(exc), EXIT_NONEMBEDDED)

    if trace_path:
        Path(trace_path).write_text(render_json(_trace_json(trace)) + "\n")
    if svg_dir:
        frames = [s.vertices for s in trace.snapshots]
        rows = [
            (r.iteration, r.energy, r.log_energy, r.min_turn_angle)
            for r in trace.records
        ]
        write_frame_set(svg_dir, frames, rows)

    last = trace.records[-1]
    click.echo(
        render_json(
            {
                "status": trace.status,
                "accepted_steps": trace.accepted_steps,
                "reflected": trace.reflected,
                "generic": trace.generic,
                "final_energy": last.energy,
                "final_log_energy": last.log_energy,
                "final_min_turn_angle": last.min_turn_angle,
            }
        )
    )
    sys.exit(EXIT_OK if trace.status == CONVERGED else EXIT_NOCONVERGE)


@main.command()
@click.argument("lengths_file")
@click.option("--k", type=int, required=True)
@click.option("--grid", type=int, default=100, show_default=True)
@click.option("--out", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--output", type=str, default="-", show_default=True)
def atlas(lengths_file, k, grid, fmt, output):
    """Sample the level-k atlas of convex turn-angle prefixes."""
    lengths = _load_lengths(lengths_file)
    if not is_feasible(lengths):
        click.echo(render_json({"feasible": False}))
        sys.exit(EXIT_LENGTHS)
    report = straight_line_sign_vectors(lengths)
    if len(report):
        click.echo(
            render_json({"generic": False, "straight_line": _sign_strings(report)})
        )
        sys.exit(EXIT_LENGTHS)
    if not 1 <= k <= lengths.n - 3:
        raise click.UsageError(f"--k must lie in 1..{lengths.n - 3} for n = {lengths.n}")

    sample = sample_atlas(lengths, k, grid)
    if fmt == "csv":
        header = [f"alpha_{i}" for i in range(k - 1)] + [
            "nu",
            "mu",
            "witness_kind_min",
            "witness_kind_max",
            "witness_j",
        ]
        lines = [",".join(header)]
        for row in sample.rows:
            cells = [format(a, ".17g") for a in row.prefix]
            cells += [
                format(row.nu, ".17g"),
                format(row.mu, ".17g"),
                row.witness_min.kind,
                row.witness_max.kind,
                str(row.witness_max.j),
            ]
            lines.append(",".join(cells))
        text = "\n".join(lines) + "\n"
    else:
        text = (
            render_json(
                {
                    "lengths": list(lengths.lengths),
                    "k": k,
                    "grid": grid,
                    "rows": [
                        {
                            "prefix": list(row.prefix),
                            "nu": row.nu,
                            "mu": row.mu,
                            "witness_kind_min": row.witness_min.kind,
                            "witness_kind_max": row.witness_max.kind,
                            "witness_j": row.witness_max.j,
                        }
                        for row in sample.rows
                    ],
                }
            )
            + "\n"
        )
    if output == "-":
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)
    sys.exit(EXIT_OK)


@main.command("demo-figure-eight")
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--svg", "svg_dir", type=str, default=None)
def demo_figure_eight(samples, svg_dir):
    """Sweep the (6,4,2,4) linkage whose configuration space is a figure
    eight: one folded-line configuration, everything else embedded."""
    lengths = SideLengths(np.array([6.0, 4.0, 2.0, 4.0]))
    sweep = enumerate_configurations(lengths, samples)

    bad = np.nonzero(~sweep.embedded)[0]
    if bad.size:
        rounded = np.round(sweep.angles[bad], 6)
        classes = np.unique(rounded, axis=0).shape[0]
    else:
        classes = 0

    ccw = np.nonzero(sweep.embedded & (np.abs(sweep.winding - TAU) <= 1e-6))[0]
    contiguous = bool(
        ccw.size > 0 and (ccw.max() - ccw.min() + 1 == ccw.size)
    )

    if svg_dir and ccw.size:
        take = np.linspace(0, ccw.size - 1, min(12, ccw.size)).astype(int)
        frames = [sweep.chain(int(ccw[i])).vertices for i in take]
        write_frame_set(svg_dir, frames)

    out = {
        "samples": samples,
        "configurations": len(sweep),
        "nonembedded_count": int(classes),
        "nonembedded_samples": int(bad.size),
        "ccw_count": int(ccw.size),
        "ccw_arc_contiguous": contiguous,
    }
    click.echo(render_json(out))
    sys.exit(EXIT_OK if classes == 1 and contiguous else EXIT_NOCONVERGE)


if __name__ == "__main__":
    main()
