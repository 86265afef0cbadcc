"""Invariant suite behind ``ecs-transfer selftest``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from . import analytic as an
from .analytic import Branch, ProjectionKind
from .entanglement import ecs_concurrence, pure2q_concurrence, schmidt_oracle, wootters_concurrence
from .errors import ECSError
from .hilbert import CompositeState, FockCutoff, Propagator, coherent_state, evolve, fidelity, overlap_analytic
from .model import SystemParams, build_full_hamiltonian
from .protocol import rwa_validation, run_deposit, run_retrieval


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}"


def _max_err(name: str, err: float, tol: float) -> CheckResult:
    return CheckResult(name, bool(err <= tol), f"measured={err:.3e} tol={tol:g}")


def check_overlap(rng, nmax_override):
    cutoff = FockCutoff(nmax_override or 64)
    worst = 0.0
    for _ in range(50):
        a, b = (complex(*rng.uniform(-2.1, 2.1, 2)) for _ in range(2))
        num = np.vdot(coherent_state(a, cutoff), coherent_state(b, cutoff))
        worst = max(worst, abs(num - overlap_analytic(a, b)))
    return _max_err("coherent_overlap_vs_fock_sum", worst, 1e-10)


def _random_state(rng, nmax):
    v = rng.normal(size=4 * nmax * nmax) + 1j * rng.normal(size=4 * nmax * nmax)
    return CompositeState(v / np.linalg.norm(v), nmax)


def check_unitarity(rng, nmax_override):
    cutoff = FockCutoff(nmax_override or 6)
    params = SystemParams(*rng.uniform(0.5, 2.0, 2), *rng.uniform(5.0, 20.0, 2))
    H = build_full_hamiltonian(params, cutoff)
    worst = 0.0
    for _ in range(5):
        psi = _random_state(rng, cutoff.nmax)
        out = evolve(psi, H, rng.uniform(0, 10))
        worst = max(worst, abs(out.norm - 1.0))
    return _max_err("evolve_unitarity", worst, 1e-9)


def check_composition(rng, nmax_override):
    cutoff = FockCutoff(nmax_override or 6)
    params = SystemParams(1.0, 0.7, 10.0, 12.0)
    H = build_full_hamiltonian(params, cutoff)
    psi = _random_state(rng, cutoff.nmax)
    t1, t2 = rng.uniform(0, 3, 2)
    two = evolve(evolve(psi, H, t1), H, t2)
    one = Propagator(H).apply(psi, t1 + t2)
    return _max_err("evolve_composition", 1.0 - fidelity(one.amplitudes, two.amplitudes), 1e-9)


def check_ecs_oracle(rng, nmax_override):
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        params = SystemParams(lam, lam, 20.0, 20.0)
        for t in np.linspace(4.0 / 100, 4.0, 100):
            for branch in Branch:
                state, _ = an.deposit_state_analytic(params, t, branch)
                worst = max(worst, abs(ecs_concurrence(state, branch).value - schmidt_oracle(state).value))
    return _max_err("ecs_closed_form_vs_oracle", worst, 1e-10)


def check_wootters(rng, nmax_override):
    worst = 0.0
    for _ in range(1000):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        state = an.QubitPairState(v, normalized=True)
        worst = max(worst, abs(wootters_concurrence(np.outer(v, v.conj())).value - pure2q_concurrence(state).value))
    return _max_err("wootters_vs_pure_det", worst, 1e-8)


def check_engines(rng, nmax_override):
    params = SystemParams()
    worst = 0.0
    for t in (0.5, 1.0, 2.0, 4.0):
        dep_cut = FockCutoff(nmax_override) if nmax_override else None
        for r in run_deposit(params, t, "effective", dep_cut):
            worst = max(worst, 1.0 - r.engine_fidelity)
        for r in run_retrieval(params, t, Branch.PLUS, "effective", dep_cut):
            worst = max(worst, 1.0 - r.engine_fidelity)
    return _max_err("analytic_vs_effective_engine", worst, 1e-8)


def check_p_coeffs(rng, nmax_override):
    worst = 0.0
    params = SystemParams(1.0, 1.3, 20.0, 17.0)
    for tp in (0.25, 0.5, 1.0, 2.0, 4.0):
        for branch in Branch:
            for kind in ProjectionKind:
                a = an.p_coeffs(params, tp, branch, kind).amplitudes
                b = an.p_coeffs_recipe(params, tp, branch, kind).amplitudes
                worst = max(worst, float(np.max(np.abs(a - b))))
    return _max_err("p_coeffs_closed_form_vs_recipe", worst, 1e-10)


def check_rwa(rng, nmax_override):
    cutoff = FockCutoff(nmax_override) if nmax_override else None
    ratios = (10, 20, 50, 100)
    rows = rwa_validation([SystemParams(1.0, 1.0, r, r) for r in ratios], [1.0], cutoff)
    fids = [row.fidelity for row in rows]
    ok = all(b >= a for a, b in zip(fids, fids[1:])) and fids[-1] >= 0.95
    detail = "fidelities=" + ",".join(f"{f:.6f}" for f in fids) + " require nondecreasing, last>=0.95"
    return CheckResult("rwa_monotone_convergence", ok, detail)


def check_headline(rng, nmax_override):
    params = SystemParams()
    res = run_retrieval(params, 4.0, Branch.PLUS, "analytic", projections=[ProjectionKind.VAC_VAC])[0]
    err = max(abs(res.concurrence.value - 1.0), abs(res.projection_prob - 0.25))
    return _max_err("vacuum_retrieval_headline", err, 1e-3)


CHECKS: List[Tuple[str, Callable]] = [
    ("coherent_overlap_vs_fock_sum", check_overlap),
    ("evolve_unitarity", check_unitarity),
    ("evolve_composition", check_composition),
    ("ecs_closed_form_vs_oracle", check_ecs_oracle),
    ("wootters_vs_pure_det", check_wootters),
    ("analytic_vs_effective_engine", check_engines),
    ("p_coeffs_closed_form_vs_recipe", check_p_coeffs),
    ("rwa_monotone_convergence", check_rwa),
    ("vacuum_retrieval_headline", check_headline),
]


def run_selftest(seed: int = 0, nmax_override: Optional[int] = None) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for name, check in CHECKS:
        try:
            out.append(check(rng, nmax_override))
        except ECSError as exc:
            out.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))
    return out
