"""Effects and states: order, complement, orthogonality, sharpness, probabilities.

An effect is a Hermitian operator ``a`` with spectrum inside [0, 1]; a state
is a PSD operator of unit trace.  Constructors validate eagerly and reject
invariant violations instead of repairing them: silent clamping here would
mask bugs in operation duals downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadWeights, DimMismatch, InvariantViolation
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_rng,
    dagger,
    max_abs,
    psd_check,
    random_complex,
    random_unitary,
    trace_product,
)

__all__ = [
    "Effect",
    "State",
    "zero_effect",
    "identity_effect",
    "complement",
    "prob",
    "leq",
    "perp",
    "is_sharp",
    "has_eigenvalue_one",
    "random_effect",
    "random_state",
    "convex_combination",
]


def _validated_operator(matrix: np.ndarray, tol: Tolerances, what: str) -> tuple[np.ndarray, np.ndarray]:
    """Coerce, Hermitian-check, and eigendecompose; returns (matrix, eigenvalues)."""
    M = np.asarray(matrix, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvariantViolation(f"{what}: matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise InvariantViolation(f"{what}: matrix entries must be finite")
    dev = max_abs(M - dagger(M))
    if dev > tol.eq_tol:
        raise InvariantViolation(f"{what}: not Hermitian (deviation {dev:.3e})")
    vals = np.linalg.eigvalsh(M)
    return M, vals


@dataclass(frozen=True, eq=False)
class Effect:
    """Hermitian operator with spectrum in [0, 1] (within tolerance)."""

    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        M, vals = _validated_operator(self.matrix, self.tol, "Effect")
        if vals[0] < -self.tol.psd_tol:
            raise InvariantViolation(f"Effect: eigenvalue {vals[0]:.3e} below 0")
        if vals[-1] > 1.0 + self.tol.psd_tol:
            raise InvariantViolation(f"Effect: eigenvalue {vals[-1]:.6e} above 1")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class State:
    """PSD operator with unit trace (within tolerance)."""

    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self) -> None:
        M, vals = _validated_operator(self.matrix, self.tol, "State")
        if vals[0] < -self.tol.psd_tol:
            raise InvariantViolation(f"State: eigenvalue {vals[0]:.3e} below 0")
        tr = float(np.trace(M).real)
        if abs(tr - 1.0) > self.tol.eq_tol:
            raise InvariantViolation(f"State: trace {tr!r} differs from 1")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def zero_effect(dim: int) -> Effect:
    return Effect(np.zeros((dim, dim), dtype=np.complex128))


def identity_effect(dim: int) -> Effect:
    return Effect(np.eye(dim, dtype=np.complex128))


def _check_dims(x, y, what: str) -> None:
    if x.dim != y.dim:
        raise DimMismatch(f"{what}: {x.dim} vs {y.dim}")


def complement(a: Effect) -> Effect:
    """``I - a``; an involution."""
    return Effect(np.eye(a.dim) - a.matrix, tol=a.tol)


def prob(rho: State, a: Effect) -> float:
    """Probability ``tr(rho a)`` that the effect occurs in the given state.

    The trace of a state against a Hermitian operator is real up to rounding;
    an imaginary residue above eq_tol signals corrupted inputs and raises.
    """
    _check_dims(rho, a, "prob")
    value = trace_product(rho.matrix, a.matrix)
    if abs(value.imag) > a.tol.eq_tol:
        raise InvariantViolation(f"prob: imaginary residue {value.imag:.3e} exceeds eq_tol")
    return float(value.real)


def leq(a: Effect, b: Effect, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Operator order: true iff ``b - a`` is PSD within tolerance."""
    _check_dims(a, b, "leq")
    return psd_check(b.matrix - a.matrix, tol)


def perp(a: Effect, b: Effect, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``a + b`` is still an effect; equivalently ``b <= I - a``.

    Both characterizations are computed and must agree.
    """
    _check_dims(a, b, "perp")
    s = np.linalg.eigvalsh(a.matrix + b.matrix)
    direct = bool(s[0] >= -tol.psd_tol and s[-1] <= 1.0 + tol.psd_tol)
    via_order = leq(b, complement(a), tol)
    if direct != via_order:
        raise InvariantViolation("perp: sum-of-effects and order characterizations disagree")
    return direct


def is_sharp(a: Effect, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``a`` is a projection: ``a^2 = a`` within eq_tol."""
    return max_abs(a.matrix @ a.matrix - a.matrix) <= tol.eq_tol


def has_eigenvalue_one(a: Effect, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the top eigenvalue reaches 1 within eq_tol."""
    return bool(np.linalg.eigvalsh(a.matrix)[-1] >= 1.0 - tol.eq_tol)


def random_effect(dim: int, rng: int | np.random.Generator) -> Effect:
    """``U diag(u_1..u_d) U†`` with uniform spectrum and Haar ``U``.

    Conjugating a uniform spectrum keeps direct control of the eigenvalues, so
    samples exercise the near-0 and near-1 edges a Gram construction would
    smooth away.
    """
    g = as_rng(rng)
    U = random_unitary(dim, g)
    spectrum = g.uniform(0.0, 1.0, size=dim)
    return Effect(U @ np.diag(spectrum.astype(np.complex128)) @ dagger(U))


def random_state(dim: int, rng: int | np.random.Generator, pure: bool = False) -> State:
    """Normalized Wishart state ``WW†/tr(WW†)``, or a Gaussian pure state if ``pure``."""
    g = as_rng(rng)
    if pure:
        psi = g.standard_normal(dim) + 1j * g.standard_normal(dim)
        psi = psi / np.linalg.norm(psi)
        return State(np.outer(psi, psi.conj()))
    W = random_complex(dim, g)
    M = W @ dagger(W)
    return State(M / np.trace(M).real)


def convex_combination(weights: list[float], effects: list[Effect]) -> Effect:
    """``sum_i w_i a_i`` for nonnegative weights summing to one."""
    if len(weights) != len(effects) or not effects:
        raise BadWeights("convex_combination: need one weight per effect")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise BadWeights("convex_combination: weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > DEFAULT_TOL.eq_tol:
        raise BadWeights(f"convex_combination: weights sum to {w.sum()!r}, not 1")
    dim = effects[0].dim
    for e in effects[1:]:
        if e.dim != dim:
            raise DimMismatch("convex_combination: effects of mixed dimension")
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for wi, e in zip(w, effects):
        acc += wi * e.matrix
    return Effect(acc)
