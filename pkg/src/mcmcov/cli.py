"""Command line interface.

Subcommands: ``estimate`` (covariance of a chain CSV), ``batchsize``
(batch size selection report), ``simulate`` (VAR(1) chain with a ground
truth sidecar), ``replicate`` (the benchmark experiment). All reports are
JSON; failures print a machine-readable error JSON on stderr and exit
nonzero.
"""

import functools
import json
import os
import sys
import time

import click

from ._version import __version__
from .api import select_batch_size
from .batch_size import ar_pilot
from .chain import load_csv
from .estimators import (
    batch_means,
    flat_top_batch_means,
    flat_top_obm,
    generalized_obm,
    overlapping_batch_means,
)
from .inference import effective_sample_size
from .replicate import ExperimentConfig, load_config, run_experiment, write_outputs
from .var1 import random_coef, simulate, var1_process
from .windows import LagWindow, normalize_kind

_FAMILY = {"bm": "bm", "ft-bm": "bm", "obm": "obm", "ft-obm": "obm", "gobm": "obm"}


def _fail(exc: BaseException) -> None:
    payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    click.echo(json.dumps(payload), err=True)
    sys.exit(1)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, RuntimeError, OSError) as exc:
            _fail(exc)

    return wrapper


def _emit(report: dict, out_path) -> None:
    text = json.dumps(report, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
@click.version_option(__version__)
def main():
    """Asymptotic covariance estimation for MCMC output."""


@main.command("estimate")
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Chain CSV: one iteration per row, one component per column.")
@click.option("--estimator", type=click.Choice(["bm", "obm", "gobm", "ft-bm", "ft-obm"]),
              default="bm", show_default=True)
@click.option("--window", default="bartlett", show_default=True,
              help="Lag window for --estimator gobm.")
@click.option("--b", "batch_size", type=int, default=None, help="Explicit batch size.")
@click.option("--method", type=click.Choice(["ar", "np", "lag", "cbrt", "sqrt"]), default=None,
              help="Batch size selection method (alternative to --b).")
@click.option("--header", is_flag=True, help="Discard the first CSV row as a header.")
@click.option("--max-order", type=int, default=None, help="AR order cap for --method ar.")
@click.option("--out", "out_path", type=click.Path(writable=True), default=None,
              help="Write the JSON report here instead of stdout.")
@_guarded
def cmd_estimate(input_path, estimator, window, batch_size, method, header, max_order, out_path):
    """Estimate the asymptotic covariance of the chain means."""
    if (batch_size is None) == (method is None):
        raise ValueError("exactly one of --b and --method must be given")
    started = time.perf_counter()
    chain = load_csv(input_path, has_header=header)
    n = chain.shape[0]
    kind = normalize_kind(window)
    flat_top = estimator in ("ft-bm", "ft-obm") or (estimator == "gobm" and kind == "flat-top")
    selection = None
    pilot = None
    if batch_size is None:
        b, selection, pilot = select_batch_size(
            chain, method, family=_FAMILY[estimator], flat_top=flat_top, max_order=max_order
        )
    else:
        b = batch_size
        if flat_top and b % 2 != 0:
            raise ValueError(f"flat-top estimators require an even batch size, got {b}")
    if estimator == "bm":
        est = batch_means(chain, b)
    elif estimator == "obm":
        est = overlapping_batch_means(chain, b)
    elif estimator == "ft-bm":
        est = flat_top_batch_means(chain, b)
    elif estimator == "ft-obm":
        est = flat_top_obm(chain, b)
    else:
        est = generalized_obm(chain, LagWindow(kind, b))

    ess = None
    ess_error = None
    try:
        if pilot is None:
            pilot = ar_pilot(chain, max_order=max_order)
        ess = effective_sample_size(chain, pilot).tolist()
    except (ValueError, RuntimeError) as exc:
        ess_error = str(exc)

    report = {
        "input": os.fspath(input_path),
        "n": n,
        "p": chain.shape[1],
        "estimator": estimator,
        "window": est.window,
        "b": est.b,
        "method": "explicit" if method is None else method,
        "selection": None if selection is None else {
            "coefficient": selection.coefficient,
            "family_constant": selection.family_constant,
        },
        "mean": chain.mean(axis=0).tolist(),
        "cov": est.cov.tolist(),
        "ess": ess,
        "elapsed_s": round(time.perf_counter() - started, 6),
        "version": __version__,
    }
    if ess_error is not None:
        report["ess_error"] = ess_error
    _emit(report, out_path)


@main.command("batchsize")
@click.option("--in", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--method", "methods", default="ar,np,lag", show_default=True,
              help="Comma-separated subset of ar,np,lag,cbrt,sqrt.")
@click.option("--family", type=click.Choice(["bm", "obm"]), default="obm", show_default=True)
@click.option("--flat-top", "flat_top", is_flag=True,
              help="Select for a flat-top estimator (forces an even batch size).")
@click.option("--header", is_flag=True)
@click.option("--max-order", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(writable=True), default=None)
@_guarded
def cmd_batchsize(input_path, methods, family, flat_top, header, max_order, out_path):
    """Report selected batch sizes for a chain under one or more methods."""
    chain = load_csv(input_path, has_header=header)
    wanted = [m.strip() for m in methods.split(",") if m.strip()]
    if not wanted:
        raise ValueError("no batch size methods requested")
    results, errors = {}, {}
    for method in wanted:
        try:
            b, selection, _ = select_batch_size(
                chain, method, family=family, flat_top=flat_top, max_order=max_order
            )
            entry = {"b": b}
            if selection is not None and selection.coefficient is not None:
                entry["coefficient"] = selection.coefficient
                entry["family_constant"] = selection.family_constant
            results[method] = entry
        except (ValueError, RuntimeError) as exc:
            errors[method] = str(exc)
    report = {
        "input": os.fspath(input_path),
        "n": chain.shape[0],
        "p": chain.shape[1],
        "family": family,
        "flat_top": flat_top,
        "methods": results,
        "version": __version__,
    }
    if errors:
        report["errors"] = errors
    if not results:
        click.echo(json.dumps(report), err=True)
        sys.exit(1)
    _emit(report, out_path)


@main.command("simulate")
@click.option("--p", type=int, default=3, show_default=True)
@click.option("--rho", type=float, required=True, help="Strength of the process in (0, 1).")
@click.option("--n", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(writable=True))
@click.option("--sidecar", "sidecar_path", type=click.Path(writable=True), default=None,
              help="Ground truth JSON path [default: OUT + '.truth.json'].")
@_guarded
def cmd_simulate(p, rho, n, seed, out_path, sidecar_path):
    """Simulate a stationary VAR(1) chain and write its analytic ground truth."""
    process = var1_process(random_coef(p, rho, seed))
    chain = simulate(process, n, seed=[seed, 1])
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        for row in chain:
            fh.write(",".join(repr(v) for v in row) + "\n")
    sidecar = {
        "chain": os.fspath(out_path),
        "n": n,
        "rho": rho,
        "seed": seed,
        "version": __version__,
        **process.to_dict(),
    }
    if sidecar_path is None:
        sidecar_path = os.fspath(out_path) + ".truth.json"
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2)
        fh.write("\n")
    click.echo(json.dumps({"chain": os.fspath(out_path), "truth": os.fspath(sidecar_path)}))


@main.command("replicate")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Plain-text key = value experiment config.")
@click.option("--workers", type=int, default=None,
              help="Worker processes [default: min(4, cpu count)]. Output is "
                   "identical for any value.")
@click.option("--out-dir", type=click.Path(file_okay=False), default="replication-out",
              show_default=True)
@_guarded
def cmd_replicate(config_path, workers, out_dir):
    """Run the VAR(1) replication benchmark and write results + summary."""
    config = ExperimentConfig() if config_path is None else load_config(config_path)
    if workers is None:
        workers = min(4, os.cpu_count() or 1)
    records, summary, elapsed = run_experiment(config, workers=max(1, workers))
    csv_path, json_path = write_outputs(records, summary, out_dir)
    click.echo(json.dumps({
        "results": csv_path,
        "summary": json_path,
        "replications": config.replications,
        "rho_grid": list(config.rho_grid),
        "elapsed_s": round(elapsed, 3),
    }))


if __name__ == "__main__":
    main()
