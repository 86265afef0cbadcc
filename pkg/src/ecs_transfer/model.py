"""Hamiltonians, dressed-basis rotation and frame transformation for two driven atoms in two cavities.

Atomic single-qubit basis is (|g>, |e>) with sigma = |g><e|. The dressed
states are |+-> = (|g> +- |e>)/sqrt(2), eigenstates of the drive term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import BasisFlagMismatch
from .hilbert import BARE, DRESSED, CompositeState, FockCutoff, LocalHamiltonian, Operator

SIGMA = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |g><e|
SIGMA_X = SIGMA + SIGMA.conj().T
PLUS = np.array([1, 1], dtype=np.complex128) / math.sqrt(2)
MINUS = np.array([1, -1], dtype=np.complex128) / math.sqrt(2)
# columns are |+>, |-> in bare coordinates; real, symmetric and involutive
HADAMARD = np.column_stack([PLUS, MINUS])

STRONG_DRIVING_WARN = 10.0

INVERSE = "inverse"
PHYSICAL = "physical"


@dataclass(frozen=True)
class SystemParams:
    """Couplings lambda_j and classical Rabi frequencies omega_j (hbar = 1)."""

    lambda1: float = 1.0
    lambda2: float = 1.0
    omega1: float = 20.0
    omega2: float = 20.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "omega1", "omega2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")

    @property
    def u(self) -> float:
        return self.omega1 + self.omega2

    @property
    def lambdas(self) -> tuple[float, float]:
        return (self.lambda1, self.lambda2)

    @property
    def omegas(self) -> tuple[float, float]:
        return (self.omega1, self.omega2)

    @property
    def strong_driving_ratio(self) -> float:
        ratios = [o / l if l > 0 else math.inf for o, l in zip(self.omegas, self.lambdas)]
        return min(ratios)

    @property
    def warning(self) -> Optional[str]:
        r = self.strong_driving_ratio
        if r < STRONG_DRIVING_WARN:
            return f"weak driving: min(omega/lambda) = {r:.3g} < {STRONG_DRIVING_WARN:g}"
        return None


def annihilation(cutoff: FockCutoff) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff.nmax)), k=1).astype(np.complex128)


def _local(pairs, cutoff, local):
    h = LocalHamiltonian(Operator(pairs[0]), Operator(pairs[1]))
    return h if local else h.to_operator()


def build_h0(params: SystemParams, cutoff: FockCutoff, local: bool = False):
    """Drive part sum_j omega_j (sigma_j + sigma_j^dag)."""
    eye = np.eye(cutoff.nmax)
    return _local([om * np.kron(SIGMA_X, eye) for om in params.omegas], cutoff, local)


def build_hi(params: SystemParams, cutoff: FockCutoff, local: bool = False):
    """Jaynes-Cummings coupling sum_j lambda_j (a_j^dag sigma_j + a_j sigma_j^dag)."""
    a = annihilation(cutoff)
    pair = np.kron(SIGMA, a.conj().T) + np.kron(SIGMA.conj().T, a)
    return _local([lam * pair for lam in params.lambdas], cutoff, local)


def build_full_hamiltonian(params: SystemParams, cutoff: FockCutoff, local: bool = False):
    """H = H0 + HI. With ``local=True`` returns the pairwise form instead of a dense composite matrix."""
    h = build_h0(params, cutoff, local=True) + build_hi(params, cutoff, local=True)
    return h if local else h.to_operator()


def build_effective_hamiltonian(params: SystemParams, cutoff: FockCutoff, local: bool = False):
    """Strong-driving Hamiltonian sum_j (lambda_j/2)(|+><+| - |-><-|)_j (a_j^dag + a_j), in the bare basis."""
    a = annihilation(cutoff)
    x = a + a.conj().T
    z_dressed = np.outer(PLUS, PLUS.conj()) - np.outer(MINUS, MINUS.conj())
    return _local([0.5 * lam * np.kron(z_dressed, x) for lam in params.lambdas], cutoff, local)


def _rotate_atoms(amps: np.ndarray, nmax: Optional[int]) -> np.ndarray:
    if nmax is None:
        return np.kron(HADAMARD, HADAMARD) @ amps
    psi = amps.reshape(2, 2, nmax, nmax)
    return np.einsum("ia,jb,abmn->ijmn", HADAMARD, HADAMARD, psi).reshape(-1)


def _switch_basis(state, src: str, dst: str):
    if state.basis != src:
        raise BasisFlagMismatch(f"expected a {src}-basis state, got {state.basis!r}")
    nmax = state.nmax if isinstance(state, CompositeState) else None
    return replace(state, amplitudes=_rotate_atoms(state.amplitudes, nmax), basis=dst)


def dressed_from_bare(state):
    """Rewrite the atomic factor of ``state`` in the |+->, |-> basis.

    Works on ``CompositeState`` and on four-amplitude qubit-pair states.
    """
    return _switch_basis(state, BARE, DRESSED)


def bare_from_dressed(state):
    return _switch_basis(state, DRESSED, BARE)


def interaction_frame_rotation(params: SystemParams, t: float) -> Operator:
    """U0(t) = exp(-i H0 t) on the two atoms, as a 4x4 bare-basis matrix.

    H0 acts as the identity on the cavity modes.
    """
    factors = [math.cos(om * t) * np.eye(2) - 1j * math.sin(om * t) * SIGMA_X for om in params.omegas]
    return Operator(np.kron(*factors), hermitian=False)


def apply_atomic(state: CompositeState, op: Operator) -> CompositeState:
    """Apply a 4x4 bare-basis atomic operator to a composite state (any basis flag)."""
    m = op.matrix
    if state.basis == DRESSED:
        hh = np.kron(HADAMARD, HADAMARD)
        m = hh @ m @ hh
    n = state.nmax
    out = np.einsum("ij,jmn->imn", m, state.amplitudes.reshape(4, n, n))
    return replace(state, amplitudes=out.reshape(-1))


def to_lab_frame(state: CompositeState, params: SystemParams, t: float, convention: str = INVERSE) -> CompositeState:
    """Map an interaction-frame state at time t back to the lab frame.

    ``convention="inverse"`` applies U0(t)^dag, which gives |+,+> an e^{+iut}
    phase; the closed forms in ``analytic`` default to this sign. ``"physical"`` applies U0(t),
    the frame relation satisfied by exp(-iHt) under the rotating-wave
    approximation.
    """
    u0 = interaction_frame_rotation(params, t).matrix
    if convention == INVERSE:
        u0 = u0.conj().T
    elif convention != PHYSICAL:
        raise ValueError(f"unknown frame convention {convention!r}")
    return apply_atomic(state, Operator(u0, hermitian=False))
