"""Command-line front end: reproducible experiments over weighted complexes.

All randomness flows from numpy's default generator (PCG64), so one --seed
fixes point sampling and initial flow signals bit-reproducibly. The pipeline
subcommand chains generation, weight optimization under both objectives, and
paired flow simulations, writing a JSON report plus plot-ready CSV files and
rendered figures.

Exit codes: 0 success, 2 validation or usage error, 3 solver finished
non-optimal (or failed its accuracy cross-check), 4 I/O error.
"""

from __future__ import annotations

from pathlib import Path

import click
import numpy as np

from . import io
from .complexes import PointCloud, build_vietoris_rips
from .decomposition import ChainSignal, hodge_decompose, verify_decomposition
from .errors import SolverAccuracyError, ValidationError
from .flows import (
    FlowComponentTrace,
    default_time_grid,
    flow_component_trace,
    simulate_flow,
)
from .laplacians import WeightAssignment, assemble_laplacian, lambda_min_nonzero
from .optimize import LAMBDA_OBJECTIVE, TRACE_OBJECTIVE, optimize_weights

# instance statistics for this seed (n=30, eps=0.5) are pinned in the tests:
# 30 vertices, 165 edges, 422 triangles
REFERENCE_SEED = 9

OBJECTIVE_NAMES = {"trace": TRACE_OBJECTIVE, "lambda": LAMBDA_OBJECTIVE}


class SolverNotOptimal(RuntimeError):
    """Raised after outputs are written when a solve ended non-optimal."""


@click.group()
@click.option("--seed", type=int, default=REFERENCE_SEED, show_default=True,
              help="Seed for every random draw in the invocation.")
@click.option("--out", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Output directory, created if missing.")
@click.option("--format", "fmt", type=click.Choice(("json", "csv")),
              default="json", show_default=True,
              help="Matrix output format for the laplacian subcommand.")
@click.pass_context
def cli(ctx, seed: int, out: str, fmt: str) -> None:
    """Weighted Hodge Laplacian experiments on Vietoris-Rips complexes."""
    ctx.obj = {"seed": seed, "out": Path(out), "fmt": fmt}


def _outdir(obj) -> Path:
    path = obj["out"]
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_inputs(complex_path, weights_path):
    cx = io.load_complex(complex_path)
    if weights_path is None:
        return cx, WeightAssignment.unit(cx)
    return cx, WeightAssignment.for_complex(cx, io.load_weights(weights_path))


def _nonharmonic_norms(result, w_k: np.ndarray) -> np.ndarray:
    if isinstance(result, FlowComponentTrace):
        norms = result.component_norms()
        return np.sqrt(norms["gradient"] ** 2 + norms["curl"] ** 2)
    resid = result.states - result.harmonic_limit[None, :]
    return np.sqrt((resid * resid * w_k[None, :]).sum(axis=1))


@cli.command()
@click.option("--n-points", "-n", type=int, required=True,
              help="Number of points sampled uniformly on the unit square.")
@click.option("--epsilon", "-e", type=float, required=True,
              help="Distance threshold for the Vietoris-Rips construction.")
@click.option("--max-order", type=int, default=2, show_default=True)
@click.pass_obj
def generate(obj, n_points: int, epsilon: float, max_order: int) -> None:
    """Sample a point cloud and write its Vietoris-Rips complex."""
    if n_points < 1:
        raise ValidationError("need at least one point")
    if not epsilon > 0:
        raise ValidationError("epsilon must be positive")
    out = _outdir(obj)
    rng = np.random.default_rng(obj["seed"])
    pts = rng.random((n_points, 2))
    cx = build_vietoris_rips(PointCloud(pts), epsilon=epsilon, max_order=max_order)
    io.save_points(pts, out / "points.csv")
    io.save_complex(cx, out / "complex.json")
    counts = " ".join(
        f"D_{k}={cx.num_simplices(k)}" for k in range(max_order + 1)
    )
    click.echo(f"seed={obj['seed']} {counts}")


@cli.command()
@click.option("--complex", "complex_path", "-c", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", "weights_path", "-w",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "-k", type=int, required=True)
@click.pass_obj
def laplacian(obj, complex_path, weights_path, order: int) -> None:
    """Assemble one weighted Hodge Laplacian and write matrix plus envelope."""
    cx, weights = _load_inputs(complex_path, weights_path)
    lap = assemble_laplacian(cx, weights, order)
    out = _outdir(obj)
    if obj["fmt"] == "csv":
        io.save_matrix(lap.full, out / "laplacian.csv")
        envelope = io.laplacian_envelope(lap, matrix_file="laplacian.csv")
        io.write_json(envelope, out / "laplacian.json")
    else:
        doc = io.laplacian_envelope(lap)
        doc["matrix"] = lap.full
        io.write_json(doc, out / "laplacian.json")
    click.echo(f"order={order} dim={lap.dim}")


@cli.command()
@click.option("--complex", "complex_path", "-c", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", "weights_path", "-w",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "-k", type=int, required=True)
@click.option("--signal", "signal_path", "-s", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Chain signal CSV, one value per line.")
@click.option("--method", type=click.Choice(("normal", "least_squares")),
              default="normal", show_default=True)
@click.pass_obj
def decompose(obj, complex_path, weights_path, order, signal_path, method):
    """Split a chain signal into gradient, harmonic, and curl parts."""
    cx, weights = _load_inputs(complex_path, weights_path)
    sig = ChainSignal(order, io.load_signal(signal_path))
    parts = hodge_decompose(cx, weights, sig, method=method)
    report = verify_decomposition(parts, cx, weights, sig)
    doc = {
        "order": order,
        "method": method,
        "gradient": parts.gradient_part,
        "harmonic": parts.harmonic_part,
        "curl": parts.curl_part,
        "lower_potential": parts.lower_potential,
        "upper_potential": parts.upper_potential,
        "verification": report.as_dict(),
    }
    out = _outdir(obj)
    io.write_json(doc, out / "decomposition.json")
    click.echo(
        f"order={order} max_normalized_inner={report.max_normalized_inner:.3e}"
    )


@cli.command()
@click.option("--complex", "complex_path", "-c", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--weights", "weights_path", "-w",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "-k", type=int, required=True)
@click.option("--signal", "signal_path", "-s",
              type=click.Path(exists=True, dir_okay=False),
              help="Initial condition; a seeded standard normal when omitted.")
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--horizon", type=float, default=None,
              help="Final time; 10 / lambda_min_nonzero when omitted.")
@click.option("--components", is_flag=True,
              help="Add gradient/harmonic/curl norm columns.")
@click.option("--figures", is_flag=True, help="Render a decay figure too.")
@click.pass_obj
def flow(obj, complex_path, weights_path, order, signal_path, samples,
         horizon, components, figures):
    """Simulate the heat flow of an initial chain signal."""
    cx, weights = _load_inputs(complex_path, weights_path)
    lap = assemble_laplacian(cx, weights, order)
    if signal_path is None:
        rng = np.random.default_rng(obj["seed"])
        x0 = rng.standard_normal(lap.dim)
    else:
        x0 = io.load_signal(signal_path)
    times = default_time_grid(lap, samples=samples, horizon=horizon)
    if components:
        result = flow_component_trace(cx, weights, lap, x0, times)
    else:
        result = simulate_flow(lap, x0, times)
    out = _outdir(obj)
    io.save_flow_csv(result, out / "flow.csv")
    if figures:
        from . import plotting

        fig = plotting.flow_comparison_figure(
            {"flow": (times, _nonharmonic_norms(result, lap.w_k))}
        )
        plotting.save_figure(fig, out / "flow.png")
    click.echo(f"order={order} samples={times.size} horizon={times[-1]:.6g}")


def _optimization_document(res) -> dict:
    sol = res.solution
    return {
        "order": res.order,
        "objective": res.objective,
        "weights": {str(k): v for k, v in res.weights.items()},
        "objective_at_optimum": res.objective_at_optimum,
        "objective_at_uniform": res.objective_at_uniform,
        "improvement_percent": 100.0 * res.improvement_ratio,
        "floored_counts": {str(k): v for k, v in res.floored_counts.items()},
        "certificate": {
            "status": sol.status,
            "primal_objective": sol.primal_objective,
            "dual_objective": sol.dual_objective,
            "duality_gap": sol.duality_gap,
            "psd_violation": sol.psd_violation,
            "iterations": sol.iterations,
        },
    }


@cli.command()
@click.option("--complex", "complex_path", "-c", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "-k", type=int, required=True)
@click.option("--objective", type=click.Choice(("trace", "lambda")),
              default="trace", show_default=True)
@click.option("--optimize", "levels", multiple=True,
              type=click.Choice(("lower", "upper")), default=("upper",),
              show_default=True, help="Weight levels to optimize over.")
@click.option("--gap-tol", type=float, default=1e-8, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.pass_obj
def optimize(obj, complex_path, order, objective, levels, gap_tol, max_iter):
    """Optimize weights for one spectral objective and certify the result."""
    cx = io.load_complex(complex_path)
    res = optimize_weights(
        cx,
        order,
        OBJECTIVE_NAMES[objective],
        optimize_lower="lower" in levels,
        optimize_upper="upper" in levels,
        gap_tol=gap_tol,
        max_iter=max_iter,
    )
    out = _outdir(obj)
    io.write_json(_optimization_document(res), out / "optimization.json")
    click.echo(
        f"objective={objective} status={res.solution.status} "
        f"improvement={100.0 * res.improvement_ratio:.2f}%"
    )
    if res.solution.status != "optimal":
        raise SolverNotOptimal(res.solution.status)


@cli.command()
@click.option("--n-points", "-n", type=int, default=30, show_default=True)
@click.option("--epsilon", "-e", type=float, default=0.5, show_default=True)
@click.option("--max-order", type=int, default=2, show_default=True)
@click.option("--order", "-k", type=int, default=1, show_default=True)
@click.option("--samples", type=int, default=200, show_default=True)
@click.option("--gap-tol", type=float, default=1e-8, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.pass_obj
def pipeline(obj, n_points, epsilon, max_order, order, samples, gap_tol,
             max_iter, figures):
    """Generate, optimize both objectives, and compare paired flows.

    Writes a report with per-stage status, the two optimization documents,
    paired trajectory CSVs on a common time grid, and rendered figures.
    """
    if order < 0 or order >= max_order:
        raise ValidationError("pipeline needs 0 <= order < max-order")
    out = _outdir(obj)
    seed = obj["seed"]
    stage_names = (
        "generate", "optimize_trace", "optimize_lambda",
        "flow_uniform", "flow_optimal", "comparison",
    )
    report = {
        "seed": seed,
        "config": {
            "n_points": n_points, "epsilon": epsilon, "max_order": max_order,
            "order": order, "samples": samples, "gap_tol": gap_tol,
            "max_iter": max_iter,
        },
        "stages": {name: {"status": "pending"} for name in stage_names},
        "improvements": {"trace_percent": None, "lambda_percent": None},
        "comparison": {
            "time": None,
            "uniform_nonharmonic_norm": None,
            "optimal_nonharmonic_norm": None,
            "ratio": None,
        },
    }
    stages = report["stages"]
    current = "generate"
    non_optimal: list[str] = []
    try:
        rng = np.random.default_rng(seed)
        pts = rng.random((n_points, 2))
        cx = build_vietoris_rips(
            PointCloud(pts), epsilon=epsilon, max_order=max_order
        )
        io.save_points(pts, out / "points.csv")
        io.save_complex(cx, out / "complex.json")
        counts = [cx.num_simplices(k) for k in range(max_order + 1)]
        stages["generate"] = {"status": "done", "counts": counts}
        click.echo("generate: " + " ".join(
            f"D_{k}={c}" for k, c in enumerate(counts)
        ))

        upper_count = cx.num_simplices(order + 1)
        if upper_count == 0:
            for name in stage_names[1:]:
                stages[name] = {
                    "status": "skipped",
                    "reason": "no upper weights to optimize",
                }
            io.write_json(report, out / "report.json")
            click.echo("no upper weights to optimize; skipping")
            return

        results = {}
        for current, objective in (
            ("optimize_trace", TRACE_OBJECTIVE),
            ("optimize_lambda", LAMBDA_OBJECTIVE),
        ):
            res = optimize_weights(
                cx, order, objective, optimize_upper=True,
                gap_tol=gap_tol, max_iter=max_iter,
            )
            results[objective] = res
            doc = _optimization_document(res)
            io.write_json(doc, out / f"{current}.json")
            stages[current] = {
                "status": "done",
                "solver_status": res.solution.status,
                "improvement_percent": 100.0 * res.improvement_ratio,
            }
            if res.solution.status != "optimal":
                non_optimal.append(current)
            click.echo(
                f"{current}: status={res.solution.status} "
                f"improvement={100.0 * res.improvement_ratio:.2f}%"
            )
        report["improvements"] = {
            "trace_percent": 100.0 * results[TRACE_OBJECTIVE].improvement_ratio,
            "lambda_percent": 100.0 * results[LAMBDA_OBJECTIVE].improvement_ratio,
        }

        # both flows start from the same seeded signal and share the
        # uniform-weight time grid so the CSV rows pair up
        uniform = WeightAssignment.for_complex(
            cx, {order + 1: np.full(upper_count, 1.0 / upper_count)}
        )
        optimal = WeightAssignment.for_complex(
            cx, {order + 1: results[LAMBDA_OBJECTIVE].weights[order + 1]}
        )
        lap_uniform = assemble_laplacian(cx, uniform, order)
        lap_optimal = assemble_laplacian(cx, optimal, order)
        x0 = rng.standard_normal(lap_uniform.dim)
        times = default_time_grid(lap_uniform, samples=samples)
        flows = {}
        for current, name, weights, lap in (
            ("flow_uniform", "uniform", uniform, lap_uniform),
            ("flow_optimal", "optimal", optimal, lap_optimal),
        ):
            trace = flow_component_trace(cx, weights, lap, x0, times)
            io.save_flow_csv(trace, out / f"{current}.csv")
            flows[name] = trace
            stages[current] = {"status": "done", "samples": int(times.size)}
            click.echo(f"{current}: samples={times.size}")

        current = "comparison"
        lam_uniform = lambda_min_nonzero(lap_uniform)
        t_star = 5.0 / lam_uniform
        norm_at = {}
        for name, lap in (("uniform", lap_uniform), ("optimal", lap_optimal)):
            probe = simulate_flow(lap, x0, np.array([0.0, t_star]))
            norm_at[name] = float(_nonharmonic_norms(probe, lap.w_k)[-1])
        report["comparison"] = {
            "time": t_star,
            "uniform_nonharmonic_norm": norm_at["uniform"],
            "optimal_nonharmonic_norm": norm_at["optimal"],
            "ratio": norm_at["optimal"] / max(norm_at["uniform"], 1e-300),
        }
        stages["comparison"] = {"status": "done"}
        click.echo(
            f"comparison at t={t_star:.4g}: uniform={norm_at['uniform']:.3e} "
            f"optimal={norm_at['optimal']:.3e}"
        )

        if figures:
            from . import plotting

            fig = plotting.complex_figure(
                cx, pts,
                face_weights=results[LAMBDA_OBJECTIVE].weights.get(2)
                if order == 1 and max_order >= 2 else None,
            )
            plotting.save_figure(fig, out / "complex.png")
            fig = plotting.weights_figure(
                {
                    "uniform": np.full(upper_count, 1.0 / upper_count),
                    "trace optimal": results[TRACE_OBJECTIVE].weights[order + 1],
                    "lambda optimal": results[LAMBDA_OBJECTIVE].weights[order + 1],
                },
                order + 1,
            )
            plotting.save_figure(fig, out / "weights.png")
            fig = plotting.flow_comparison_figure(
                {
                    name: (times, _nonharmonic_norms(tr, tr.weights_k))
                    for name, tr in flows.items()
                }
            )
            plotting.save_figure(fig, out / "flows.png")
    except Exception as exc:
        stages[current] = {"status": "failed", "error": str(exc)}
        io.write_json(report, out / "report.json")
        raise
    io.write_json(report, out / "report.json")
    if non_optimal:
        raise SolverNotOptimal(", ".join(non_optimal))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except (SolverNotOptimal, SolverAccuracyError) as exc:
        click.echo(f"error: solver: {exc}", err=True)
        return 3
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except click.exceptions.Abort:
        return 2
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 4
    return 0
