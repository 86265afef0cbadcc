"""Dense linear algebra on the truncated atom1 (x) atom2 (x) mode1 (x) mode2 space.

Composite vectors use the flat index ``((a1*2 + a2)*nmax + n1)*nmax + n2``,
so reshaping to ``(2, 2, nmax, nmax)`` gives the axes ``(a1, a2, n1, n2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np
import scipy.linalg
from scipy.special import gammainc

from .errors import CutoffTooSmall, DimensionMismatch, NonHermitian, NormDrift

TRUNCATION_TOL = 1e-10
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-9

BARE = "bare"
DRESSED = "dressed"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockCutoff:
    """Number of Fock levels kept per mode (basis |0>, ..., |nmax-1>)."""

    nmax: int

    def __post_init__(self):
        if int(self.nmax) != self.nmax or self.nmax < 2:
            raise ValueError(f"nmax must be an integer >= 2, got {self.nmax!r}")

    @classmethod
    def for_amplitude(cls, alpha_max: float) -> "FockCutoff":
        """Smallest cutoff allowed by the rule nmax >= |a|^2 + 10 sqrt(|a|^2 + 1)."""
        n2 = float(abs(alpha_max)) ** 2
        return cls(max(2, math.ceil(n2 + 10.0 * math.sqrt(n2 + 1.0))))

    def truncation_loss(self, alpha: complex) -> float:
        """Probability weight of |alpha> above the cutoff (Poisson tail)."""
        n2 = abs(alpha) ** 2
        if n2 == 0.0:
            return 0.0
        return float(gammainc(self.nmax, n2))

    def check(self, alpha: complex) -> None:
        loss = self.truncation_loss(alpha)
        if loss > TRUNCATION_TOL:
            raise CutoffTooSmall(
                f"nmax={self.nmax} loses {loss:.3e} of |alpha|={abs(alpha):.4g} "
                f"(need nmax >= {FockCutoff.for_amplitude(abs(alpha)).nmax})"
            )


def coherent_state(alpha: complex, cutoff: FockCutoff) -> np.ndarray:
    """Fock coefficients exp(-|a|^2/2) a^n / sqrt(n!) for n < nmax.

    The vector is not renormalized after truncation; ``cutoff.truncation_loss``
    reports what was cut.
    """
    cutoff.check(alpha)
    alpha = complex(alpha)
    n = np.arange(1, cutoff.nmax)
    steps = np.empty(cutoff.nmax, dtype=np.complex128)
    steps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    steps[1:] = alpha / np.sqrt(n)
    return np.cumprod(steps)


def overlap_analytic(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for untruncated coherent states."""
    alpha, beta = complex(alpha), complex(beta)
    return complex(np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + alpha.conjugate() * beta))


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 after normalizing both vectors; insensitive to global phase."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"fidelity between shapes {a.shape} and {b.shape}")
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    return float(abs(np.vdot(a, b)) ** 2 / (na * nb))


def tensor(*operands) -> np.ndarray:
    """Kronecker product in the fixed atom1, atom2, mode1, mode2 order.

    Accepts either all vectors or all square matrices. With four operands the
    first two must be qubits and the last two modes of equal dimension.
    """
    if not operands:
        raise DimensionMismatch("tensor() needs at least one operand")
    arrays = [np.asarray(x, dtype=np.complex128) for x in operands]
    ndims = {a.ndim for a in arrays}
    if len(ndims) != 1 or ndims.pop() not in (1, 2):
        raise DimensionMismatch("operands must be all vectors or all matrices")
    for a in arrays:
        if a.ndim == 2 and a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"operator of shape {a.shape} is not square")
    if len(arrays) == 4:
        dims = [a.shape[0] for a in arrays]
        if dims[0] != 2 or dims[1] != 2 or dims[2] != dims[3]:
            raise DimensionMismatch(f"layout atom1,atom2,mode1,mode2 violated by dims {dims}")
    return reduce(np.kron, arrays)


@dataclass(frozen=True)
class CompositeState:
    amplitudes: np.ndarray
    nmax: int
    basis: str = BARE

    def __post_init__(self):
        amps = _frozen(self.amplitudes).ravel()
        if amps.size != 4 * self.nmax * self.nmax:
            raise DimensionMismatch(f"{amps.size} amplitudes do not fit nmax={self.nmax}")
        if self.basis not in (BARE, DRESSED):
            raise ValueError(f"unknown basis flag {self.basis!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_factors(cls, atom1, atom2, mode1, mode2, basis: str = BARE) -> "CompositeState":
        mode1 = np.asarray(mode1)
        return cls(tensor(atom1, atom2, mode1, mode2), mode1.shape[0], basis)

    @classmethod
    def from_tensor(cls, psi: np.ndarray, basis: str = BARE) -> "CompositeState":
        return cls(np.asarray(psi).reshape(-1), psi.shape[2], basis)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(2, 2, self.nmax, self.nmax)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "CompositeState":
        return CompositeState(self.amplitudes / self.norm, self.nmax, self.basis)

    def field_given_atoms(self, a1: int, a2: int) -> np.ndarray:
        """Unnormalized two-mode coefficient matrix c[n1, n2] after projecting atoms onto |a1 a2>."""
        return np.array(self.tensor[a1, a2])

    def atoms_given_fields(self, mode1: np.ndarray, mode2: np.ndarray) -> np.ndarray:
        """Atomic amplitudes [aa, ab, ba, bb] after projecting the fields onto <mode1, mode2|."""
        out = np.einsum("m,n,abmn->ab", np.conj(mode1), np.conj(mode2), self.tensor)
        return out.reshape(4)


@dataclass(frozen=True)
class Operator:
    matrix: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator matrix must be square, got {m.shape}")
        if self.hermitian:
            err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
            if err > HERMITIAN_TOL:
                raise NonHermitian(f"max |M - M^dag| = {err:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix + other.matrix, self.hermitian and other.hermitian)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            return Operator(self.matrix @ other.matrix, hermitian=False)
        return self.matrix @ np.asarray(other)


def _pair_to_composite(pair: np.ndarray, nmax: int, which: int) -> np.ndarray:
    # kron(pair, I) is ordered (a_j, n_j, a_k, n_k); permute to (a1, a2, n1, n2).
    big = np.kron(pair, np.eye(2 * nmax)).reshape((2, nmax, 2, nmax) * 2)
    if which == 1:
        perm = (0, 2, 1, 3, 4, 6, 5, 7)
    else:
        perm = (2, 0, 3, 1, 6, 4, 7, 5)
    d = 4 * nmax * nmax
    return big.transpose(perm).reshape(d, d)


@dataclass(frozen=True)
class LocalHamiltonian:
    """Sum h1 + h2 with h_j acting on atom_j (x) mode_j (index a_j*nmax + n_j).

    Both Hamiltonians in this package have this form, which keeps exponentials
    at size 2*nmax instead of 4*nmax^2.
    """

    pair1: Operator
    pair2: Operator

    def __post_init__(self):
        if self.pair1.dim != self.pair2.dim or self.pair1.dim % 2:
            raise DimensionMismatch("pair operators must share an even dimension 2*nmax")

    @property
    def nmax(self) -> int:
        return self.pair1.dim // 2

    @property
    def hermitian(self) -> bool:
        return self.pair1.hermitian and self.pair2.hermitian

    def __add__(self, other: "LocalHamiltonian") -> "LocalHamiltonian":
        return LocalHamiltonian(self.pair1 + other.pair1, self.pair2 + other.pair2)

    def to_operator(self) -> Operator:
        n = self.nmax
        m = _pair_to_composite(self.pair1.matrix, n, 1) + _pair_to_composite(self.pair2.matrix, n, 2)
        return Operator(m, self.hermitian)


Hamiltonian = Union[Operator, LocalHamiltonian]


def apply_pair_unitaries(psi: np.ndarray, u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    """Apply u1 on (a1, n1) and u2 on (a2, n2) to a (2, 2, n, n) tensor."""
    n = psi.shape[2]
    u1 = u1.reshape(2, n, 2, n)
    u2 = u2.reshape(2, n, 2, n)
    out = np.einsum("ijkl,kbld->ibjd", u1, psi)
    return np.einsum("ijkl,akcl->aicj", u2, out)


def _check_norm(before: float, after: float) -> None:
    if before == 0.0:
        return
    drift = abs(after / before - 1.0)
    if drift > NORM_TOL:
        raise NormDrift(f"relative norm drift {drift:.3e} exceeds {NORM_TOL:g}")


def _require_hermitian(H: Hamiltonian) -> None:
    if not H.hermitian:
        raise NonHermitian("evolution requires a Hermitian generator")


def evolve(state: CompositeState, H: Hamiltonian, t: float) -> CompositeState:
    """Return exp(-i H t) |state> (hbar = 1).

    Uses scaling-and-squaring Pade exponentials; a ``LocalHamiltonian`` is
    exponentiated pair by pair.
    """
    _require_hermitian(H)
    if t == 0:
        return state
    if isinstance(H, LocalHamiltonian):
        if H.nmax != state.nmax:
            raise DimensionMismatch(f"H has nmax={H.nmax}, state has nmax={state.nmax}")
        u1 = scipy.linalg.expm(-1j * t * H.pair1.matrix)
        u2 = scipy.linalg.expm(-1j * t * H.pair2.matrix)
        out = apply_pair_unitaries(state.tensor, u1, u2).reshape(-1)
    else:
        if H.dim != state.amplitudes.size:
            raise DimensionMismatch(f"H has dim {H.dim}, state has {state.amplitudes.size}")
        out = scipy.linalg.expm(-1j * t * H.matrix) @ state.amplitudes
    _check_norm(state.norm, float(np.linalg.norm(out)))
    return CompositeState(out, state.nmax, state.basis)


class _Eig:
    def __init__(self, m: np.ndarray):
        self.w, self.v = np.linalg.eigh(m)

    def unitary(self, t: float) -> np.ndarray:
        return (self.v * np.exp(-1j * t * self.w)) @ self.v.conj().T


class Propagator:
    """exp(-i H t) for many t from a single eigendecomposition of H."""

    def __init__(self, H: Hamiltonian):
        _require_hermitian(H)
        self.H = H
        if isinstance(H, LocalHamiltonian):
            self._eigs = (_Eig(H.pair1.matrix), _Eig(H.pair2.matrix))
        else:
            self._eigs = (_Eig(H.matrix),)

    def apply(self, state: CompositeState, t: float) -> CompositeState:
        if len(self._eigs) == 2:
            u1, u2 = (e.unitary(t) for e in self._eigs)
            out = apply_pair_unitaries(state.tensor, u1, u2).reshape(-1)
        else:
            out = self._eigs[0].unitary(t) @ state.amplitudes
        _check_norm(state.norm, float(np.linalg.norm(out)))
        return CompositeState(out, state.nmax, state.basis)
