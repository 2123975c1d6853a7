"""Replication engine for the VAR(1) benchmark experiments.

Each replication simulates a pilot chain, selects batch sizes with every
configured method, simulates a final chain, computes every configured
estimator at each batch size, and scores the results against the analytic
ground truth of the process: entrywise squared error against the true
asymptotic covariance, and whether the confidence region covers the true
mean (zero).

Randomness is split per replication as default_rng([seed, round(1000*rho),
replication, stage]) with stage 0 for the pilot chain and 1 for the final
chain, so outputs are byte-identical for any worker count. The coefficient
matrix is built once per seed and scaled by rho, so the whole rho grid
shares one shape.
"""

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ._version import __version__
from .api import select_batch_size
from .batch_size import ar_pilot, nonparametric_pilot
from .errors import CutoffNotFoundError, DegenerateChainError, FitError, IndefiniteCovarianceError
from .estimators import (
    batch_means,
    flat_top_batch_means,
    flat_top_obm,
    overlapping_batch_means,
)
from .inference import confidence_region
from .var1 import random_coef, simulate, var1_process

__all__ = ["ExperimentConfig", "CellResult", "ReplicationRecord",
           "load_config", "run_experiment", "write_outputs"]

_ESTIMATOR_FNS = {
    "bm": batch_means,
    "obm": overlapping_batch_means,
    "ft-bm": flat_top_batch_means,
    "ft-obm": flat_top_obm,
}
_FAMILY = {"bm": "bm", "ft-bm": "bm", "obm": "obm", "ft-obm": "obm"}
_ALL_METHODS = ("ar", "np", "lag", "cbrt", "sqrt")


@dataclass(frozen=True)
class ExperimentConfig:
    """Desk-scale defaults: 200 replications, pilot 1e4, final 1e5, p=3."""

    p: int = 3
    n_pilot: int = 10_000
    n_final: int = 100_000
    replications: int = 200
    rho_grid: tuple = (0.8, 0.9)
    seed: int = 1003
    estimators: tuple = ("bm", "obm", "ft-bm", "ft-obm")
    batch_methods: tuple = ("ar", "np", "lag", "cbrt", "sqrt")
    level: float = 0.9

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.n_pilot < 100:
            raise ValueError("n_pilot must be >= 100")
        if self.n_final < 100:
            raise ValueError("n_final must be >= 100")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must be in (0, 1)")
        for rho in self.rho_grid:
            if not 0.0 < rho < 1.0:
                raise ValueError(f"rho values must be in (0, 1), got {rho}")
        for est in self.estimators:
            if est not in _ESTIMATOR_FNS:
                raise ValueError(f"unknown estimator {est!r}")
        for method in self.batch_methods:
            if method not in _ALL_METHODS:
                raise ValueError(f"unknown batch method {method!r}")


def load_config(path) -> ExperimentConfig:
    """Read a plain-text ``key = value`` config file.

    Comma-separated lists are accepted for ``rho``, ``estimators`` and
    ``batch_methods``; blank lines and ``#`` comments are ignored. Unknown
    keys are an error.
    """
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key, val = key.strip().lower(), val.strip()
            if key in ("p", "n_pilot", "n_final", "replications", "seed"):
                values[key] = int(val)
            elif key == "level":
                values[key] = float(val)
            elif key in ("rho", "rho_grid"):
                values["rho_grid"] = tuple(float(v) for v in val.split(","))
            elif key == "estimators":
                values["estimators"] = tuple(v.strip() for v in val.split(",") if v.strip())
            elif key == "batch_methods":
                values["batch_methods"] = tuple(v.strip() for v in val.split(",") if v.strip())
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return ExperimentConfig(**values)


@dataclass(frozen=True)
class CellResult:
    """One (estimator, batch-size method) evaluation within a replication."""

    estimator: str
    method: str
    b: int | None
    sq_err: float | None
    covered: bool | None
    failure: str = ""


@dataclass(frozen=True)
class ReplicationRecord:
    """Everything scored in one replication at one rho."""

    rho: float
    rep: int
    seed: int
    coefficients: dict
    cells: list = field(default_factory=list)


def _rho_token(rho: float) -> int:
    return int(round(1000.0 * rho))


def _run_one(config: ExperimentConfig, rho: float, rep: int) -> ReplicationRecord:
    coef = random_coef(config.p, rho, config.seed)
    process = var1_process(coef)
    token = _rho_token(rho)
    pilot_chain = simulate(process, config.n_pilot, seed=[config.seed, token, rep, 0])

    # Batch sizes per method; a method failure poisons only its own cells.
    pilots, method_fail, coefficients = {}, {}, {}
    for method in config.batch_methods:
        if method == "ar":
            try:
                pilots["ar"] = ar_pilot(pilot_chain)
            except (FitError, DegenerateChainError, ValueError) as exc:
                method_fail["ar"] = f"ar-fit: {exc}"
        elif method == "np":
            try:
                pilots["np"] = nonparametric_pilot(pilot_chain)
            except (CutoffNotFoundError, DegenerateChainError, ValueError) as exc:
                method_fail["np"] = f"np-fit: {exc}"

    cells = []
    estimates = {}
    truth = process.long_run
    final_chain = None
    if config.estimators:
        final_chain = simulate(process, config.n_final, seed=[config.seed, token, rep, 1])
        final_mean = final_chain.mean(axis=0)
        target = np.zeros(config.p)

    for method in config.batch_methods:
        if method in ("ar", "np") and method in pilots:
            res = select_batch_size(
                pilot_chain, method, family="obm", flat_top=False,
                n_target=config.n_final, pilot=pilots[method],
            )[1]
            coefficients[method] = res.coefficient
        for estimator in config.estimators:
            if method in method_fail:
                cells.append(CellResult(estimator, method, None, None, None, method_fail[method]))
                continue
            flat_top = estimator.startswith("ft-")
            try:
                b, _, _ = select_batch_size(
                    pilot_chain, method, family=_FAMILY[estimator], flat_top=flat_top,
                    n_target=config.n_final, pilot=pilots.get(method),
                )
            except (CutoffNotFoundError, ValueError) as exc:
                reason = "lag-cap" if isinstance(exc, CutoffNotFoundError) else "select"
                cells.append(CellResult(estimator, method, None, None, None, f"{reason}: {exc}"))
                continue
            key = (estimator, b)
            if key not in estimates:
                try:
                    estimates[key] = _ESTIMATOR_FNS[estimator](final_chain, b)
                except ValueError as exc:
                    estimates[key] = exc
            est = estimates[key]
            if isinstance(est, Exception):
                cells.append(CellResult(estimator, method, b, None, None, f"estimate: {est}"))
                continue
            sq_err = float(np.mean((est.cov - truth) ** 2))
            try:
                covered = confidence_region(
                    final_mean, est, config.n_final, level=config.level
                ).contains(target)
                failure = ""
            except IndefiniteCovarianceError as exc:
                covered = None
                failure = f"indefinite-cov: {exc}"
            cells.append(CellResult(estimator, method, b, sq_err, covered, failure))

    return ReplicationRecord(
        rho=rho, rep=rep, seed=config.seed, coefficients=coefficients, cells=cells
    )


def run_experiment(config: ExperimentConfig, workers: int = 1):
    """Run every replication of every rho; returns (records, summary, elapsed).

    Records come back sorted by (rho position, replication), and all
    aggregation runs in that order, so the written output is identical for
    any ``workers`` value; wall time is returned separately and never enters
    the output files.
    """
    tasks = [(rho, rep) for rho in config.rho_grid for rep in range(config.replications)]
    started = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, [(config, rho, rep) for rho, rep in tasks],
                                    chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [_run_one(config, rho, rep) for rho, rep in tasks]
    elapsed = time.perf_counter() - started
    order = {(rho, rep): i for i, (rho, rep) in enumerate(tasks)}
    records = sorted(results, key=lambda r: order[(r.rho, r.rep)])
    return records, _summarize(config, records), elapsed


def _run_task(args):
    return _run_one(*args)


def _summarize(config: ExperimentConfig, records) -> dict:
    truths = {}
    for rho in config.rho_grid:
        process = var1_process(random_coef(config.p, rho, config.seed))
        num = float(np.sum(np.diag(process.bias) ** 2))
        den = float(np.sum(np.diag(process.long_run) ** 2))
        truths[rho] = (num / den) ** (1.0 / 3.0)

    summary = {
        "config": asdict(config),
        "version": __version__,
        "rho": {},
    }
    for rho in config.rho_grid:
        recs = [r for r in records if r.rho == rho]
        coef_block = {"true": truths[rho]}
        for method in ("ar", "np"):
            if method not in config.batch_methods:
                continue
            vals = [r.coefficients[method] for r in recs if method in r.coefficients]
            if vals:
                errs = [(v - truths[rho]) ** 2 for v in vals]
                mse = sum(errs) / len(errs)
                coef_block[method] = {
                    "n": len(vals),
                    "mean": sum(vals) / len(vals),
                    "mse": mse,
                    "rmse_rel": (mse ** 0.5) / truths[rho],
                }
            else:
                coef_block[method] = {"n": 0}
        est_block = {}
        for estimator in config.estimators:
            est_block[estimator] = {}
            for method in config.batch_methods:
                cells = [c for r in recs for c in r.cells
                         if c.estimator == estimator and c.method == method]
                errs = [c.sq_err for c in cells if c.sq_err is not None]
                bs = [c.b for c in cells if c.b is not None]
                covered = [c.covered for c in cells if c.covered is not None]
                fails = sum(1 for c in cells if c.failure)
                est_block[estimator][method] = {
                    "n": len(cells),
                    "mean_mse": sum(errs) / len(errs) if errs else None,
                    "mean_b": sum(bs) / len(bs) if bs else None,
                    "coverage": sum(covered) / len(covered) if covered else None,
                    "n_covered_denominator": len(covered),
                    "n_failures": fails,
                }
        summary["rho"][f"{rho:g}"] = {"coefficient": coef_block, "estimators": est_block}
    return summary


def write_outputs(records, summary: dict, out_dir) -> tuple[str, str]:
    """Write results.csv (long format) and summary.json into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    json_path = os.path.join(out_dir, "summary.json")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["rho", "rep", "estimator", "method", "b", "sq_err", "covered",
             "coefficient", "failure"]
        )
        for r in records:
            for c in r.cells:
                coeff = r.coefficients.get(c.method)
                writer.writerow([
                    f"{r.rho:g}",
                    r.rep,
                    c.estimator,
                    c.method,
                    "" if c.b is None else c.b,
                    "" if c.sq_err is None else repr(c.sq_err),
                    "" if c.covered is None else int(c.covered),
                    "" if coeff is None else repr(coeff),
                    c.failure,
                ])
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return csv_path, json_path
