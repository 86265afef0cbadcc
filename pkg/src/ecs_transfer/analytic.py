"""Closed-form states of the deposit and retrieval stages.

Field states are kept as short lists of coherent-product terms
``(coeff, alpha1, alpha2)`` and evaluated with exact coherent-state overlaps,
so nothing here depends on a Fock cutoff except ``EcsState.to_fock``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

import numpy as np

from .errors import DegenerateBranch, TPrimeMismatch, ZeroState
from .hilbert import BARE, DRESSED, CompositeState, FockCutoff, coherent_state, overlap_analytic
from .model import INVERSE, PHYSICAL, SystemParams

DEGENERATE_TOL = 1e-12
TPRIME_TOL = 1e-12

OUTCOMES = ("gg", "ge", "eg", "ee")
DRESSED_LABELS = ("++", "+-", "-+", "--")


class Branch(Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1

    @classmethod
    def for_outcome(cls, outcome: str) -> "Branch":
        """Atomic detection outcome of the deposit stage -> field branch."""
        if outcome in ("ge", "eg"):
            return cls.PLUS
        if outcome in ("gg", "ee"):
            return cls.MINUS
        raise ValueError(f"unknown atomic outcome {outcome!r}")


class ProjectionKind(Enum):
    """The seven coherent products the retrieved fields can be post-selected on."""

    VAC_VAC = "vac_vac"
    MM = "mm"
    PP = "pp"
    M0 = "m0"
    P0 = "p0"
    ZM = "0m"
    ZP = "0p"

    def amplitudes(self, params: SystemParams, tprime: float) -> Tuple[complex, complex]:
        g1 = -1j * params.lambda1 * tprime
        g2 = -1j * params.lambda2 * tprime
        return {
            "vac_vac": (0j, 0j),
            "mm": (g1, g2),
            "pp": (-g1, -g2),
            "m0": (g1, 0j),
            "p0": (-g1, 0j),
            "0m": (0j, g2),
            "0p": (0j, -g2),
        }[self.value]


Term = Tuple[complex, complex, complex]


@dataclass(frozen=True)
class EcsState:
    """sum_k coeff_k |alpha1_k, alpha2_k> over two cavity modes."""

    terms: Tuple[Term, ...]
    normalized: bool = False
    norm_const: float | None = None

    def __post_init__(self):
        terms = tuple((complex(c), complex(a1), complex(a2)) for c, a1, a2 in self.terms)
        if not 1 <= len(terms) <= 4:
            raise ValueError(f"EcsState holds 1 to 4 terms, got {len(terms)}")
        object.__setattr__(self, "terms", terms)
        if self.normalized and abs(self.norm2() - 1.0) > 1e-12:
            raise ValueError(f"state flagged normalized has norm^2 {self.norm2()!r}")

    def inner(self, other: "EcsState") -> complex:
        """<self|other>."""
        total = 0j
        for c, a1, a2 in self.terms:
            for d, b1, b2 in other.terms:
                total += c.conjugate() * d * overlap_analytic(a1, b1) * overlap_analytic(a2, b2)
        return total

    def norm2(self) -> float:
        return self.inner(self).real

    def amplitude(self, beta1: complex, beta2: complex) -> complex:
        """<beta1, beta2|self> for a coherent product bra."""
        return sum(c * overlap_analytic(beta1, a1) * overlap_analytic(beta2, a2) for c, a1, a2 in self.terms)

    def labels(self, mode: int) -> list[complex]:
        """Distinct coherent amplitudes appearing in ``mode`` (1 or 2)."""
        out: list[complex] = []
        for term in self.terms:
            a = term[mode]
            if not any(abs(a - b) < 1e-14 for b in out):
                out.append(a)
        return out

    def max_amplitude(self) -> float:
        return max(max(abs(a1), abs(a2)) for _, a1, a2 in self.terms)

    def to_fock(self, cutoff: FockCutoff) -> np.ndarray:
        """Two-mode Fock coefficient matrix c[n1, n2]."""
        out = np.zeros((cutoff.nmax, cutoff.nmax), dtype=np.complex128)
        for c, a1, a2 in self.terms:
            out += c * np.outer(coherent_state(a1, cutoff), coherent_state(a2, cutoff))
        return out


@dataclass(frozen=True)
class QubitPairState:
    """Amplitudes over gg, ge, eg, ee (bare) or ++, +-, -+, -- (dressed)."""

    amplitudes: np.ndarray
    basis: str = BARE
    normalized: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(4)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.basis not in (BARE, DRESSED):
            raise ValueError(f"unknown basis flag {self.basis!r}")
        if self.normalized and abs(self.norm2() - 1.0) > 1e-12:
            raise ValueError("state flagged normalized is not")

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def deposit_amplitudes(params: SystemParams, t: float) -> Tuple[complex, complex]:
    """alpha_j = -i lambda_j t / 2 reached by the deposit stage."""
    return (-0.5j * params.lambda1 * t, -0.5j * params.lambda2 * t)


def _phase_sign(convention: str) -> int:
    if convention == INVERSE:
        return 1
    if convention == PHYSICAL:
        return -1
    raise ValueError(f"unknown frame convention {convention!r}")


def norm_constant(params: SystemParams, t: float, branch: Branch) -> float:
    """M_pm = 2[1 +- cos(2ut) exp(-2|alpha1|^2 - 2|alpha2|^2)]."""
    a1, a2 = deposit_amplitudes(params, t)
    damp = math.exp(-2 * abs(a1) ** 2 - 2 * abs(a2) ** 2)
    return 2.0 * (1.0 + branch.sign * math.cos(2 * params.u * t) * damp)


def deposit_lab_fields(params: SystemParams, t: float, convention: str = INVERSE) -> Dict[str, EcsState]:
    """Unnormalized field factor attached to each bare atomic outcome after the deposit stage.

    The four fields sum (with their |xy> atomic labels) to the full lab-frame
    state, so their squared norms are the detection probabilities.
    """
    s = _phase_sign(convention)
    a1, a2 = deposit_amplitudes(params, t)
    ph = cmath.exp(1j * s * params.u * t)
    pre = 1.0 / (2.0 * math.sqrt(2.0))
    out = {}
    for outcome in OUTCOMES:
        sign = Branch.for_outcome(outcome).sign
        out[outcome] = EcsState(((pre * ph, a1, a2), (pre * sign / ph, -a1, -a2)))
    return out


def deposit_state_analytic(
    params: SystemParams, t: float, branch: Branch, convention: str = INVERSE
) -> Tuple[EcsState, float]:
    """Normalized two-mode ECS left after detecting an atomic outcome of ``branch``.

    Returns the state and the probability of *each* of the two atomic
    outcomes that produce it (M_pm / 8).

    Raises:
        DegenerateBranch: if M_pm < 1e-12 (minus branch at t = 0).
    """
    if t < 0:
        raise ValueError("deposit time must be non-negative")
    m = norm_constant(params, t, branch)
    if m < DEGENERATE_TOL:
        raise DegenerateBranch(f"{branch.value} branch has M = {m:.3e} at t = {t}")
    s = _phase_sign(convention)
    a1, a2 = deposit_amplitudes(params, t)
    ph = cmath.exp(1j * s * params.u * t)
    c = 1.0 / math.sqrt(m)
    state = EcsState(((c * ph, a1, a2), (branch.sign * c / ph, -a1, -a2)), normalized=True, norm_const=m)
    return state, m / 8.0


def _sector_terms(params: SystemParams, t: float, tprime: float, branch: Branch) -> Dict[str, Tuple[Term, Term]]:
    # Each dressed sector displaces mode j by -+ i lambda_j t'/2; all amplitudes are
    # on the imaginary axis so the displacement adds no phase.
    a1, a2 = deposit_amplitudes(params, t)
    b1, b2 = deposit_amplitudes(params, tprime)
    ph = cmath.exp(1j * params.u * t)
    out = {}
    for label in DRESSED_LABELS:
        s1 = 1 if label[0] == "+" else -1
        s2 = 1 if label[1] == "+" else -1
        out[label] = (
            (ph, a1 + s1 * b1, a2 + s2 * b2),
            (branch.sign / ph, -a1 + s1 * b1, -a2 + s2 * b2),
        )
    return out


def _check_tprime(t: float, tprime: float) -> None:
    if abs(tprime - t) > TPRIME_TOL * max(1.0, abs(t)):
        raise TPrimeMismatch(f"retrieval time t'={tprime} must equal deposit time t={t}")


def retrieval_state_analytic(params: SystemParams, t: float, tprime: float, branch: Branch) -> Dict[str, EcsState]:
    """Field superposition attached to each dressed atomic sector after retrieval.

    Sector ``"++"`` holds e^{iut'}|-i l1 t', -i l2 t'> +- e^{-iut'}|0,0> and so
    on. Coefficients carry 1/sqrt(M_pm) from the normalized input and the 1/2
    from expanding |gg> over the four dressed sectors, so the squared norms are
    probabilities.
    """
    _check_tprime(t, tprime)
    m = norm_constant(params, t, branch)
    if m < DEGENERATE_TOL:
        raise DegenerateBranch(f"{branch.value} branch has M = {m:.3e} at t = {t}")
    pre = 0.5 / math.sqrt(m)
    return {
        label: EcsState(tuple((pre * c, x1, x2) for c, x1, x2 in terms))
        for label, terms in _sector_terms(params, t, tprime, branch).items()
    }


def sectors_to_composite(sectors: Dict[str, EcsState], cutoff: FockCutoff) -> CompositeState:
    """Dressed-basis composite vector sum_k |k> (x) field_k in the truncated Fock basis."""
    psi = np.zeros((2, 2, cutoff.nmax, cutoff.nmax), dtype=np.complex128)
    for label, field in sectors.items():
        psi[int(label[0] == "-"), int(label[1] == "-")] = field.to_fock(cutoff)
    return CompositeState.from_tensor(psi, DRESSED)


def p_coeffs_recipe(params: SystemParams, tprime: float, branch: Branch, projection: ProjectionKind) -> QubitPairState:
    """p_k = <projection| sector k field> without the 1/(2 sqrt(M)) prefactor."""
    g1, g2 = projection.amplitudes(params, tprime)
    sectors = _sector_terms(params, tprime, tprime, branch)
    p = [EcsState(sectors[label]).amplitude(g1, g2) for label in DRESSED_LABELS]
    return QubitPairState(p, DRESSED)


def p_coeffs(params: SystemParams, tprime: float, branch: Branch, projection: ProjectionKind) -> QubitPairState:
    """Dressed-basis atomic amplitudes (p1..p4) after post-selecting the fields.

    Closed forms for the vacuum, ``mm`` and ``m0`` projections; the remaining
    four use the same inner-product recipe they were derived from.
    """
    if tprime < 0:
        raise ValueError("retrieval time must be non-negative")
    kind = projection.value
    if kind not in ("vac_vac", "mm", "m0"):
        return p_coeffs_recipe(params, tprime, branch, projection)
    x1 = (params.lambda1 * tprime) ** 2
    x2 = (params.lambda2 * tprime) ** 2
    ph = cmath.exp(1j * params.u * tprime)
    s = branch.sign
    e = math.exp
    if kind == "vac_vac":
        p = (
            e(-x1 / 2 - x2 / 2) * ph + s / ph,
            e(-x1 / 2) * ph + s * e(-x2 / 2) / ph,
            e(-x2 / 2) * ph + s * e(-x1 / 2) / ph,
            ph + s * e(-x1 / 2 - x2 / 2) / ph,
        )
    elif kind == "mm":
        p = (
            ph + s * e(-x1 / 2 - x2 / 2) / ph,
            e(-x2 / 2) * ph + s * e(-x1 / 2 - 2 * x2) / ph,
            e(-x1 / 2) * ph + s * e(-x2 / 2 - 2 * x1) / ph,
            e(-x1 / 2 - x2 / 2) * ph + s * e(-2 * x1 - 2 * x2) / ph,
        )
    else:
        p = (
            e(-x2 / 2) * ph + s * e(-x1 / 2) / ph,
            ph + s * e(-x1 / 2 - x2 / 2) / ph,
            e(-x1 / 2 - x2 / 2) * ph + s * e(-2 * x1) / ph,
            e(-x1 / 2) * ph + s * e(-2 * x1 - x2 / 2) / ph,
        )
    return QubitPairState(p, DRESSED)


def bare_coefficients(p: QubitPairState) -> np.ndarray:
    """Unnormalized (A_gg, A_ge, A_eg, A_ee); sum |A|^2 = 4 sum |p|^2."""
    if p.basis != DRESSED:
        raise ValueError("expected dressed-basis coefficients")
    p1, p2, p3, p4 = p.amplitudes
    return np.array([p1 + p4 + p2 + p3, p1 - p4 - p2 + p3, p1 - p4 + p2 - p3, p1 + p4 - p2 - p3])


def bare_amplitudes(p: QubitPairState) -> QubitPairState:
    """Normalized bare-basis state N(A_gg, A_ge, A_eg, A_ee) from dressed p1..p4.

    Raises:
        ZeroState: if sum |A|^2 < 1e-24.
    """
    a = bare_coefficients(p)
    total = float(np.vdot(a, a).real)
    if total < 1e-24:
        raise ZeroState("post-selected atomic state vanishes")
    return QubitPairState(a / math.sqrt(total), BARE, normalized=True)


def retrieval_probability(params: SystemParams, tprime: float, branch: Branch, projection: ProjectionKind) -> float:
    """Squared norm of the state after the rank-one field projection, t' = t."""
    m = norm_constant(params, tprime, branch)
    if m < DEGENERATE_TOL:
        raise DegenerateBranch(f"{branch.value} branch has M = {m:.3e} at t = {tprime}")
    return p_coeffs(params, tprime, branch, projection).norm2() / (4.0 * m)
