"""Command-line front end.

    ecs-transfer sweep-fig1 --out fig1.csv
    ecs-transfer retrieve --t 4 --branch plus --engine effective
    ecs-transfer selftest --seed 1

Exit status: 0 success, 1 failed self-test property, 2 configuration error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
from typing import Iterable, List, Optional

import numpy as np

from . import analytic as an
from .analytic import Branch, ProjectionKind
from .entanglement import ecs_concurrence, schmidt_oracle
from .errors import DegenerateBranch, ECSError
from .hilbert import FockCutoff
from .model import SystemParams
from .protocol import Engine, retrieval_cutoff, rwa_validation, run_deposit, run_retrieval
from .selftest import run_selftest

COMMANDS = ("deposit", "retrieve", "rwa", "sweep-fig1", "sweep-fig2", "sweep-fig3", "selftest")

DEFAULTS = {
    "lambda1": 1.0,
    "lambda2": 1.0,
    "omega1": 20.0,
    "omega2": 20.0,
    "t": None,
    "tmin": 0.0,
    "tmax": 5.0,
    "steps": 2000,
    "branch": None,
    "projection": None,
    "nmax": None,
    "out": None,
    "seed": 0,
    "engine": "analytic",
    "ratios": "10,20,50,100",
}

FIG1_HEADER = ["t", "concurrence_analytic", "concurrence_oracle", "norm_const", "flag"]
FIG2_HEADER = ["t", "concurrence", "projection_prob", "flag"]
FIG3_HEADER = ["t", "concurrence_mm", "projection_prob_mm", "concurrence_m0", "projection_prob_m0", "flag"]
DEPOSIT_HEADER = [
    "outcome", "branch", "outcome_prob", "concurrence", "norm_const", "engine_fidelity", "truncation_loss", "flag",
]
RETRIEVE_HEADER = [
    "projection", "concurrence", "projection_prob", "residual_prob", "engine_fidelity", "truncation_loss",
    "A_gg_re", "A_gg_im", "A_ge_re", "A_ge_im", "A_eg_re", "A_eg_im", "A_ee_re", "A_ee_im", "flag",
]
RWA_HEADER = ["omega_over_lambda", "lambda", "t", "fidelity"]


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecs-transfer", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON file with defaults for any of the flags below")
    parser.add_argument("--lambda1", type=float)
    parser.add_argument("--lambda2", type=float)
    parser.add_argument("--omega1", type=float)
    parser.add_argument("--omega2", type=float)
    parser.add_argument("--t", type=float, help="single evolution time (t' = t for retrieval)")
    parser.add_argument("--tmin", type=float)
    parser.add_argument("--tmax", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--branch", choices=[b.value for b in Branch])
    parser.add_argument("--projection", choices=[p.value for p in ProjectionKind])
    parser.add_argument("--nmax", type=int, help="override the Fock cutoff chosen by the truncation rule")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--engine", choices=[e.value for e in Engine])
    parser.add_argument("--ratios", help="comma-separated omega/lambda values for the rwa command")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over the config file over defaults."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    cfg["command"] = args.command
    if cfg["steps"] < 2:
        raise ConfigError("steps must be >= 2")
    if cfg["tmin"] < 0 or cfg["tmax"] <= cfg["tmin"]:
        raise ConfigError("need 0 <= tmin < tmax")
    if cfg["t"] is not None and cfg["t"] < 0:
        raise ConfigError("t must be non-negative")
    if cfg["nmax"] is not None and cfg["nmax"] < 2:
        raise ConfigError("nmax must be >= 2")
    return cfg


def _params(cfg) -> SystemParams:
    try:
        return SystemParams(cfg["lambda1"], cfg["lambda2"], cfg["omega1"], cfg["omega2"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid(cfg) -> np.ndarray:
    return np.linspace(cfg["tmin"], cfg["tmax"], cfg["steps"])


def _cutoff(cfg) -> Optional[FockCutoff]:
    return FockCutoff(cfg["nmax"]) if cfg["nmax"] else None


def sweep_fig1(cfg) -> Iterable[list]:
    """Deposit-stage field concurrence: closed form next to the Gram-Schmidt oracle."""
    params = _params(cfg)
    branch = Branch(cfg["branch"] or "minus")
    yield FIG1_HEADER
    for t in _grid(cfg):
        m = an.norm_constant(params, t, branch)
        try:
            state, _ = an.deposit_state_analytic(params, t, branch)
        except DegenerateBranch:
            yield [fmt(t), "", "", fmt(m), "degenerate_branch"]
            continue
        yield [fmt(t), fmt(ecs_concurrence(state, branch).value), fmt(schmidt_oracle(state).value), fmt(m), ""]


def _retrieval_row(params, t, branch, engine, cutoff, kinds):
    try:
        res = run_retrieval(params, t, branch, engine, cutoff, projections=kinds)
    except DegenerateBranch:
        return None
    return res


def _sweep_retrieval(cfg, kinds, default_branch="plus") -> Iterable[list]:
    params = _params(cfg)
    branch = Branch(cfg["branch"] or default_branch)
    engine = Engine.parse(cfg["engine"])
    grid = _grid(cfg)
    # one cutoff for the whole grid so numeric engines reuse a single eigendecomposition
    cutoff = _cutoff(cfg)
    if cutoff is None and engine is not Engine.ANALYTIC:
        cutoff = retrieval_cutoff(params, grid[-1])
    for t in grid:
        res = _retrieval_row(params, t, branch, engine, cutoff, kinds)
        if res is None:
            yield [fmt(t)] + [""] * (2 * len(kinds)) + ["degenerate_branch"]
            continue
        row = [fmt(t)]
        flag = ""
        for r in res:
            if r.concurrence is None:
                flag = "zero_state"
            row += [fmt(r.concurrence.value if r.concurrence else None), fmt(r.projection_prob)]
        yield row + [flag]


def sweep_fig2(cfg) -> Iterable[list]:
    kind = ProjectionKind(cfg["projection"] or "vac_vac")
    yield FIG2_HEADER
    yield from _sweep_retrieval(cfg, [kind])


def sweep_fig3(cfg) -> Iterable[list]:
    yield FIG3_HEADER
    yield from _sweep_retrieval(cfg, [ProjectionKind.MM, ProjectionKind.M0])


def deposit_rows(cfg) -> Iterable[list]:
    params = _params(cfg)
    t = 4.0 if cfg["t"] is None else cfg["t"]
    yield DEPOSIT_HEADER
    for r in run_deposit(params, t, cfg["engine"], _cutoff(cfg)):
        m = an.norm_constant(params, t, r.branch)
        yield [
            r.atomic_outcome, r.branch.value, fmt(r.outcome_prob),
            fmt(r.concurrence.value if r.concurrence else None), fmt(m),
            fmt(r.engine_fidelity), fmt(r.truncation_loss), "degenerate_branch" if r.degenerate else "",
        ]


def retrieve_rows(cfg) -> Iterable[list]:
    params = _params(cfg)
    t = 4.0 if cfg["t"] is None else cfg["t"]
    branch = Branch(cfg["branch"] or "plus")
    kinds = [ProjectionKind(cfg["projection"])] if cfg["projection"] else None
    results = run_retrieval(params, t, branch, cfg["engine"], _cutoff(cfg), projections=kinds)
    yield RETRIEVE_HEADER
    for r in results:
        amps: List[str] = []
        if r.atomic_state is not None:
            for a in r.atomic_state.amplitudes:
                amps += [fmt(a.real), fmt(a.imag)]
        else:
            amps = [""] * 8
        yield [
            r.projection.value, fmt(r.concurrence.value if r.concurrence else None), fmt(r.projection_prob),
            fmt(r.residual_prob), fmt(r.engine_fidelity), fmt(r.truncation_loss), *amps,
            "" if r.atomic_state is not None else "zero_state",
        ]


def rwa_rows(cfg) -> Iterable[list]:
    lam = cfg["lambda1"]
    try:
        ratios = [float(x) for x in str(cfg["ratios"]).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --ratios: {exc}") from exc
    if not ratios:
        raise ConfigError("--ratios is empty")
    params = [SystemParams(lam, lam, r * lam, r * lam) for r in ratios]
    if cfg["t"] is not None:
        grid = [cfg["t"]]
    elif cfg.get("_explicit"):
        grid = list(_grid(cfg))
    else:
        grid = [1.0 / lam if lam > 0 else 1.0]
    yield RWA_HEADER
    for row in rwa_validation(params, grid, _cutoff(cfg)):
        yield [fmt(row.omega_over_lambda), fmt(row.lam), fmt(row.t), fmt(row.fidelity)]


TABLES = {
    "deposit": deposit_rows,
    "retrieve": retrieve_rows,
    "rwa": rwa_rows,
    "sweep-fig1": sweep_fig1,
    "sweep-fig2": sweep_fig2,
    "sweep-fig3": sweep_fig3,
}


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        cfg["_explicit"] = {k for k in ("tmin", "tmax", "steps") if getattr(args, k) is not None}
        if args.command == "selftest":
            results = run_selftest(cfg["seed"], cfg["nmax"])
            with _output(cfg["out"]) as fh:
                for r in results:
                    fh.write(r.line() + "\n")
                failed = sum(not r.passed for r in results)
                fh.write(f"{len(results) - failed}/{len(results)} properties passed\n")
            return 1 if failed else 0
        rows = list(TABLES[args.command](cfg))
        with _output(cfg["out"]) as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerows(rows)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ECSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
