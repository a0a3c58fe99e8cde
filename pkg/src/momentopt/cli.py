"""Command line interface.

Thin client over the service handlers: every subcommand loads JSON files,
calls the corresponding handler in-process and prints either a text
summary or (with --json) the machine report.  Exit codes: 0 when
optimality is certified, 2 when the run is inconclusive, 1 on input or
numerical errors.
"""

from __future__ import annotations

import sys

import click

from . import service
from .serialize import dump_json, load_json


def _common_options(fn):
    decorators = [
        click.option("--seed", default=0, show_default=True, help="RNG seed for extraction."),
        click.option("--tol-rank", default=1e-6, show_default=True, help="Rank / kernel tolerance."),
        click.option("--tol-hankel", default=1e-4, show_default=True, help="Generalized Hankel tolerance."),
        click.option("--tol-feas", default=1e-4, show_default=True, help="Node feasibility tolerance."),
        click.option("--gap-tol", default=1e-8, show_default=True, help="SDP duality gap tolerance."),
        click.option("--max-order", default=None, type=int, help="Highest relaxation order to try."),
        click.option("--json", "as_json", is_flag=True, help="Print the machine-readable report."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _options_dict(seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order):
    return {
        "seed": seed,
        "tol_rank": tol_rank,
        "tol_hankel": tol_hankel,
        "tol_feas": tol_feas,
        "gap_tol": gap_tol,
        "max_order": max_order,
    }


def _fail(exc) -> "NoReturn":
    click.echo(f"error: {exc}", err=True)
    sys.exit(service.EXIT_ERROR)


def _print_certificate(cert: dict):
    click.echo(f"status: {cert['status']} (hankel: {cert['hankel_status']})")
    if cert.get("value") is not None:
        click.echo(f"value: {cert['value']:.10g}")
    if cert.get("nodes"):
        for node, w in zip(cert["nodes"], cert["weights"]):
            point = ", ".join(f"{v:.6g}" for v in node)
            click.echo(f"node: ({point})  weight: {w:.6g}")
    click.echo(
        f"dim T: {cert['dim_T']}  commutator rank: {cert['max_commutator_rank']}  "
        f"Moller bound: {cert['moller_bound']}"
    )
    for line in cert.get("diagnostics", []):
        click.echo(f"note: {line}")


@click.group()
def main():
    """Polynomial optimization via moment relaxations with Hankel certificates."""


@main.command()
@click.argument("problem_file", type=click.Path(dir_okay=False))
@_common_options
def solve(problem_file, seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order, as_json):
    """Run the full relaxation hierarchy on a problem file."""
    try:
        report = service.solve_problem(
            load_json(problem_file),
            _options_dict(seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order),
        )
    except Exception as exc:
        _fail(exc)
    if as_json:
        click.echo(dump_json(report))
    else:
        click.echo(f"status: {report['status']}")
        if report["value"] is not None:
            click.echo(f"best lower bound: {report['value']:.10g}")
        for lv in report["levels"]:
            cert = lv["certificate"]
            tag = cert["status"] if cert else lv["solver_status"]
            val = f"{lv['value']:.10g}" if lv["value"] is not None else "-"
            click.echo(f"order {lv['order']}: {tag} (value {val})")
        if report["certificate"]:
            _print_certificate(report["certificate"])
    sys.exit(service.exit_code_for(report["status"]))


@main.command()
@click.argument("problem_file", type=click.Path(dir_okay=False))
@click.option("--order", required=True, type=int, help="Relaxation order k.")
@_common_options
def relax(problem_file, order, seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order, as_json):
    """Solve a single moment relaxation and print the moments."""
    try:
        report = service.relax_problem(
            load_json(problem_file),
            order,
            _options_dict(seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order),
        )
    except Exception as exc:
        _fail(exc)
    if as_json:
        click.echo(dump_json(report))
    else:
        click.echo(f"solver status: {report['status']}")
        if report.get("value") is not None:
            click.echo(f"value: {report['value']:.10g}")
        for entry in report.get("moments", []):
            exps = "".join(f" {e}" for e in entry["exponents"])
            click.echo(f"y[{exps.strip()}] = {entry['value']:.10g}")
    if report["status"] not in ("Optimal", "MaxIterations"):
        sys.exit(service.EXIT_INCONCLUSIVE)


@main.command()
@click.argument("matrix_file", type=click.Path(dir_okay=False))
@click.option("--constraints", "problem_file", type=click.Path(dir_okay=False),
              default=None, help="Problem file used for the degree gate and node feasibility.")
@_common_options
def extract(matrix_file, problem_file, seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order, as_json):
    """GNS construction, extraction and certificate on a moment matrix file."""
    try:
        problem = load_json(problem_file) if problem_file else None
        cert = service.extract_matrix(
            load_json(matrix_file),
            problem,
            _options_dict(seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order),
        )
    except Exception as exc:
        _fail(exc)
    if as_json:
        click.echo(dump_json(cert))
    else:
        _print_certificate(cert)
    sys.exit(service.exit_code_for(cert["status"]))


@main.command()
@click.argument("matrix_file", type=click.Path(dir_okay=False))
@_common_options
def bound(matrix_file, seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order, as_json):
    """Moller node-count bound of a moment matrix file."""
    try:
        report = service.bound_matrix(
            load_json(matrix_file),
            _options_dict(seed, tol_rank, tol_hankel, tol_feas, gap_tol, max_order),
        )
    except Exception as exc:
        _fail(exc)
    if as_json:
        click.echo(dump_json(report))
    else:
        click.echo(f"dim T: {report['dim_T']}")
        click.echo(f"max commutator rank: {report['max_commutator_rank']}")
        click.echo(f"Moller bound: {report['moller_bound']}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run(service.app, host=host, port=port)


if __name__ == "__main__":
    main()
