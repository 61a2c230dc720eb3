"""Statistics of real-valued observables via their stochastic operators.

A real-valued observable ``A`` determines the self-adjoint operator
``sum_x x A_x``; expectations, variances, correlations and covariances of
observables are those of their stochastic operators.  The spread report pairs
the squared correlation against the product of variances and records the raw
commutator magnitude alongside, so both conventions for the commutator term
stay recomputable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effects import State
from .errors import DimMismatch, InvariantViolation
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, dagger, max_abs, mat_close
from .observables import Instrument, Observable, conditioned_obs, total_channel
from .operations import _dual_raw, apply

__all__ = [
    "SelfAdjointOperator",
    "UncertaintyReport",
    "as_selfadjoint",
    "stochastic_operator",
    "expectation",
    "correlation",
    "covariance",
    "variance",
    "uncertainty_report",
    "conditioned_stochastic",
    "conditioned_stats",
]


@dataclass(frozen=True, eq=False)
class SelfAdjointOperator:
    """Hermitian operator wrapper used for observable statistics."""

    matrix: np.ndarray
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self) -> None:
        M = as_matrix(self.matrix)
        dev = max_abs(M - dagger(M))
        if dev > self.tol.eq_tol:
            raise InvariantViolation(f"SelfAdjointOperator: Hermitian deviation {dev:.3e}")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def as_selfadjoint(S: SelfAdjointOperator | np.ndarray, tol: Tolerances = DEFAULT_TOL) -> SelfAdjointOperator:
    """Coerce a raw Hermitian matrix (or pass an existing wrapper through)."""
    if isinstance(S, SelfAdjointOperator):
        return S
    return SelfAdjointOperator(S, tol=tol)


def _real_outcomes(A: Observable) -> np.ndarray:
    if not A.is_real():
        raise InvariantViolation("stochastic operator requires numeric outcome labels")
    return np.asarray([float(x) for x in A.outcomes])


def stochastic_operator(A: Observable) -> SelfAdjointOperator:
    """``sum_x x A_x`` for a real-valued observable; spectrum stays inside the outcome range."""
    xs = _real_outcomes(A)
    acc = np.zeros((A.dim, A.dim), dtype=np.complex128)
    for x, e in zip(xs, A.effects):
        acc += x * e.matrix
    S = SelfAdjointOperator(acc, tol=A.tol)
    vals = np.linalg.eigvalsh(S.matrix)
    if vals[0] < xs.min() - 1e-9 or vals[-1] > xs.max() + 1e-9:
        raise InvariantViolation("stochastic_operator: spectrum escapes the outcome range")
    return S


def _check_dims(rho: State, S: SelfAdjointOperator, what: str) -> None:
    if rho.dim != S.dim:
        raise DimMismatch(f"{what}: state dim {rho.dim} vs operator dim {S.dim}")


def expectation(rho: State, S: SelfAdjointOperator | np.ndarray) -> float:
    """``tr(rho S)``; the imaginary residue must stay below eq_tol."""
    S = as_selfadjoint(S)
    _check_dims(rho, S, "expectation")
    value = complex(np.trace(rho.matrix @ S.matrix))
    if abs(value.imag) > S.tol.eq_tol:
        raise InvariantViolation(f"expectation: imaginary residue {value.imag:.3e}")
    return float(value.real)


def correlation(
    rho: State, S: SelfAdjointOperator | np.ndarray, T: SelfAdjointOperator | np.ndarray
) -> complex:
    """``tr(rho S T) - tr(rho S) tr(rho T)``; complex in general, conjugate-symmetric in (S, T)."""
    S, T = as_selfadjoint(S), as_selfadjoint(T)
    _check_dims(rho, S, "correlation")
    if S.dim != T.dim:
        raise DimMismatch("correlation: operator dims differ")
    joint = complex(np.trace(rho.matrix @ S.matrix @ T.matrix))
    return joint - expectation(rho, S) * expectation(rho, T)


def covariance(
    rho: State, S: SelfAdjointOperator | np.ndarray, T: SelfAdjointOperator | np.ndarray
) -> float:
    """Real part of the correlation; symmetric in its operator arguments."""
    return correlation(rho, S, T).real


def variance(rho: State, S: SelfAdjointOperator | np.ndarray) -> float:
    """``tr(rho S^2) - tr(rho S)^2``, clamped to 0 within -1e-10 of rounding noise.

    A residue below -1e-10 cannot come from rounding at these dimensions and
    signals an invalid state or non-Hermitian operator upstream, so it raises.
    """
    value = covariance(rho, S, S)
    if value < -1e-10:
        raise InvariantViolation(f"variance: negative value {value!r}")
    return max(value, 0.0)


@dataclass(frozen=True)
class UncertaintyReport:
    """Spread statistics of a pair of self-adjoint operators in a state.

    ``commutator_term`` stores the raw ``|tr(rho [S, T])|^2``; the verified
    split of the squared correlation uses a quarter of it next to the squared
    covariance, and both numbers are kept so either convention can be
    recomputed from the report.
    """

    expectation_s: float
    expectation_t: float
    variance_s: float
    variance_t: float
    correlation: complex
    covariance: float
    commutator_term: float
    bound: float

    def __post_init__(self) -> None:
        scale = max(1.0, abs(self.correlation) ** 2, self.bound)
        if abs(self.correlation) ** 2 > self.bound + 1e-9 * scale:
            raise InvariantViolation("UncertaintyReport: squared correlation exceeds the variance product")
        if abs(self.covariance - self.correlation.real) > 1e-12 * scale:
            raise InvariantViolation("UncertaintyReport: covariance is not the real part of the correlation")
        split = self.covariance**2 + self.commutator_term / 4.0
        if abs(abs(self.correlation) ** 2 - split) > 1e-9 * scale:
            raise InvariantViolation("UncertaintyReport: correlation split identity fails")

    @property
    def correlation_sq(self) -> float:
        return abs(self.correlation) ** 2


def uncertainty_report(
    rho: State, S: SelfAdjointOperator | np.ndarray, T: SelfAdjointOperator | np.ndarray
) -> UncertaintyReport:
    """Populate the spread report and verify its internal identities."""
    S, T = as_selfadjoint(S), as_selfadjoint(T)
    corr = correlation(rho, S, T)
    comm = S.matrix @ T.matrix - T.matrix @ S.matrix
    comm_term = abs(complex(np.trace(rho.matrix @ comm))) ** 2
    var_s = variance(rho, S)
    var_t = variance(rho, T)
    return UncertaintyReport(
        expectation_s=expectation(rho, S),
        expectation_t=expectation(rho, T),
        variance_s=var_s,
        variance_t=var_t,
        correlation=corr,
        covariance=corr.real,
        commutator_term=comm_term,
        bound=var_s * var_t,
    )


def conditioned_stochastic(B: Observable, instr: Instrument) -> SelfAdjointOperator:
    """Stochastic operator of ``B`` conditioned on a prior measurement by ``instr``.

    Computed twice - as the outcome-weighted sum of the conditioned effects
    and as the total-channel dual of the stochastic operator of ``B`` - and
    the two routes must agree.
    """
    if B.dim != instr.dim:
        raise DimMismatch("conditioned_stochastic: dimension mismatch")
    xs = _real_outcomes(B)
    conditioned = conditioned_obs(B, instr)
    via_sum = np.zeros((B.dim, B.dim), dtype=np.complex128)
    for x, e in zip(xs, conditioned.effects):
        via_sum += x * e.matrix
    via_dual = _dual_raw(total_channel(instr), stochastic_operator(B).matrix)
    if not mat_close(via_sum, via_dual, instr.tol.eq_tol):
        raise InvariantViolation("conditioned_stochastic: outcome-sum and dual routes disagree")
    return SelfAdjointOperator(via_dual, tol=instr.tol)


def conditioned_stats(
    rho: State, B: Observable, C: Observable, instr: Instrument
) -> UncertaintyReport:
    """Spread report of two conditioned observables after the same prior measurement."""
    if rho.dim != instr.dim:
        raise DimMismatch("conditioned_stats: dimension mismatch")
    S = conditioned_stochastic(B, instr)
    T = conditioned_stochastic(C, instr)
    report = uncertainty_report(rho, S, T)
    bar = total_channel(instr)
    after = apply(bar, rho)
    want_exp = float(np.trace(after @ stochastic_operator(B).matrix).real)
    if abs(report.expectation_s - want_exp) > 1e-9:
        raise InvariantViolation("conditioned_stats: expectation disagrees with the post-channel form")
    want_var = float(np.trace(rho.matrix @ S.matrix @ S.matrix).real) - want_exp**2
    if abs(report.variance_s - want_var) > 1e-9:
        raise InvariantViolation("conditioned_stats: variance disagrees with its defining form")
    return report
