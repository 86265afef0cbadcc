"""Concurrence of two-mode entangled coherent states and of qubit pairs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import DEGENERATE_TOL, Branch, EcsState, QubitPairState
from .errors import ConcurrenceOutOfRange, DegenerateBranch, InvalidDensityMatrix
from .hilbert import BARE, overlap_analytic

CLAMP_TOL = 1e-12
SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


@dataclass(frozen=True)
class ConcurrenceValue:
    value: float
    method: str

    def __float__(self) -> float:
        return self.value


def _clamped(value: float, method: str, tol: float = CLAMP_TOL) -> ConcurrenceValue:
    if value < -tol or value > 1.0 + tol:
        raise ConcurrenceOutOfRange(f"{method} concurrence {value!r} outside [0, 1]")
    return ConcurrenceValue(min(max(value, 0.0), 1.0), method)


def ecs_closed_form(alpha1: complex, alpha2: complex, cos_term: float) -> float:
    """sqrt[(1-e^{-4|a1|^2})(1-e^{-4|a2|^2})] / [1 + cos_term * e^{-2|a1|^2-2|a2|^2}].

    ``cos_term`` is +-cos(2ut) with the sign of the branch.
    """
    n1, n2 = abs(alpha1) ** 2, abs(alpha2) ** 2
    num = math.sqrt(-math.expm1(-4 * n1) * -math.expm1(-4 * n2))
    den = 1.0 + cos_term * math.exp(-2 * n1 - 2 * n2)
    if den < 0.5 * DEGENERATE_TOL:
        raise DegenerateBranch(f"ECS normalization vanishes (M = {2 * den:.3e})")
    return num / den


def ecs_concurrence(state: EcsState, branch: Branch) -> ConcurrenceValue:
    """Closed-form concurrence of a normalized two-term ECS c1|a1,a2> + c2|-a1,-a2>.

    ``branch`` names which sign the state was built with; the signed cos(2ut)
    itself is read off the coefficients.
    """
    if len(state.terms) != 2:
        raise ValueError("ecs_concurrence needs the two-term form")
    (c1, a1, a2), (c2, b1, b2) = state.terms
    if abs(b1 + a1) > 1e-12 or abs(b2 + a2) > 1e-12 or abs(abs(c1) - abs(c2)) > 1e-12 * abs(c1):
        raise ValueError("state is not of the form c(e^{iut}|a1,a2> +- e^{-iut}|-a1,-a2>)")
    # c2/c1 = +-e^{-2iut}, so its real part is the signed cos(2ut) of the denominator
    ratio = c2 / c1
    return _clamped(ecs_closed_form(a1, a2, ratio.real), "ecs_analytic")


def _orthonormal_coords(labels: list[complex]) -> dict[complex, np.ndarray]:
    """Coordinates of each coherent label in a Gram-Schmidt basis built from them."""
    first = labels[0]
    coords = {first: np.array([1.0 + 0j, 0j])}
    if len(labels) == 2:
        second = labels[1]
        ov = overlap_analytic(first, second)
        # |<a|b>|^2 = exp(-|a-b|^2); expm1 keeps nearly equal labels accurate
        perp = math.sqrt(-math.expm1(-abs(first - second) ** 2))
        coords[second] = np.array([ov, perp], dtype=np.complex128)
    elif len(labels) > 2:
        raise ValueError("schmidt_oracle supports at most two coherent labels per mode")
    return coords


def schmidt_oracle(state: EcsState) -> ConcurrenceValue:
    """Concurrence 2|det m| / <psi|psi> from the exact 2x2 amplitude matrix in orthonormalized mode bases."""
    c1 = _orthonormal_coords(state.labels(1))
    c2 = _orthonormal_coords(state.labels(2))

    def lookup(table, a):
        for key, v in table.items():
            if abs(key - a) < 1e-14:
                return v
        raise KeyError(a)

    m = np.zeros((2, 2), dtype=np.complex128)
    for c, a1, a2 in state.terms:
        m += c * np.outer(lookup(c1, a1), lookup(c2, a2))
    norm2 = float(np.vdot(m, m).real)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return _clamped(2.0 * abs(det) / norm2, "schmidt_oracle")


def pure2q_concurrence(state: QubitPairState) -> ConcurrenceValue:
    """2|A_ee A_gg - A_ge A_eg| for a normalized bare-basis qubit pair.

    The expanded radical 2 sqrt(|A_ee A_gg|^2 + |A_eg A_ge|^2 - 2 Re(A_ee A_gg A_ge* A_eg*))
    is evaluated alongside; their squares must agree to 1e-12.
    """
    if state.basis != BARE:
        raise ValueError("pure2q_concurrence expects a bare-basis state")
    norm2 = state.norm2()
    if abs(norm2 - 1.0) > 1e-10:
        raise ValueError(f"state not normalized (norm^2 = {norm2!r})")
    a_gg, a_ge, a_eg, a_ee = state.amplitudes
    x = a_ee * a_gg
    y = a_ge * a_eg
    det_form = 2.0 * abs(x - y)
    cross = (x * y.conjugate() + x.conjugate() * y).real
    radicand = abs(x) ** 2 + abs(y) ** 2 - cross
    if abs(det_form**2 - 4.0 * radicand) > 1e-12:
        raise AssertionError("determinant and radical forms of the concurrence disagree")
    return _clamped(det_form, "pure_det")


def _validate_rho(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise InvalidDensityMatrix(f"expected a 4x4 matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise InvalidDensityMatrix("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise InvalidDensityMatrix(f"trace {np.trace(rho).real!r} != 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise InvalidDensityMatrix("density matrix is not positive semidefinite")
    return rho


def wootters_concurrence(rho: np.ndarray) -> ConcurrenceValue:
    """max(0, chi_1 - chi_2 - chi_3 - chi_4) from rho (sy x sy) rho* (sy x sy).

    The chi_i are computed as singular values of X^T (sy x sy) X with
    rho = X X^dag, which equal the square roots of the eigenvalues of R and
    avoid taking roots of roundoff-negative eigenvalues.
    """
    rho = _validate_rho(rho)
    w, v = np.linalg.eigh(rho)
    x = v * np.sqrt(np.clip(w, 0.0, None))
    chi = np.linalg.svd(x.T @ SIGMA_YY @ x, compute_uv=False)
    chi = np.sort(chi)[::-1]
    return _clamped(max(0.0, chi[0] - chi[1:].sum()), "wootters", tol=1e-10)


def schmidt_concurrence_numeric(fields: np.ndarray) -> ConcurrenceValue:
    """sqrt(2(1 - Tr rho_1^2)) of a two-mode pure state given as a Fock matrix c[n1, n2].

    Reduces to 2 s1 s2 when the state has Schmidt rank two.
    """
    s = np.linalg.svd(np.asarray(fields), compute_uv=False)
    p = s**2 / np.sum(s**2)
    purity = float(np.sum(p**2))
    return _clamped(math.sqrt(max(2.0 * (1.0 - purity), 0.0)), "schmidt_numeric")
