"""Operations as Kraus families, their duals, and the sequential product of effects.

An operation acts as ``rho -> sum_i K_i rho K_i†`` with ``sum_i K_i†K_i <= I``;
its dual is ``A -> sum_i K_i† A K_i`` and the unique effect it measures is the
dual at the identity.  The sequential product of ``a`` then ``b`` relative to
an operation measuring ``a`` is the dual applied to ``b``.

Three named constructions are provided: a single-Kraus (unitary-twisted)
operation, the square-root state update, and the measure-and-reprepare map
``rho -> tr(rho a) * alpha``.  The last two are tagged so reports can name
them; every other family is 'generic'.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .effects import Effect, State, complement, random_effect, random_state
from .errors import (
    ComplementMismatch,
    DimMismatch,
    InvariantViolation,
    NotContraction,
    WrongMeasuredEffect,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    as_rng,
    dagger,
    eigh,
    max_abs,
    mat_close,
    random_complex,
    random_unitary,
    require_hermitian,
    sqrt_psd,
    stream,
)

__all__ = [
    "Operation",
    "CommutatorResult",
    "apply",
    "dual_apply",
    "measured_effect",
    "is_channel",
    "kraus_operation",
    "luders_operation",
    "holevo_operation",
    "zero_operation",
    "identity_operation",
    "commuting_unitary",
    "kraus_measuring",
    "random_operation",
    "seq_product",
    "commutator",
    "REPEATABILITY_CRITERIA",
    "is_repeatable",
    "condition_effect",
    "compose",
]

FLAVORS = ("generic", "luders", "holevo", "zero")


def _matrix_units(dim: int):
    """Basis E_jk of the operator space; linear maps agreeing on it agree everywhere."""
    for j in range(dim):
        for k in range(dim):
            E = np.zeros((dim, dim), dtype=np.complex128)
            E[j, k] = 1.0
            yield E


@dataclass(frozen=True, eq=False)
class Operation:
    """Completely positive trace-non-increasing map stored as a Kraus family."""

    kraus: tuple[np.ndarray, ...]
    flavor: str = "generic"
    a: Effect | None = None
    alpha: State | None = None
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self) -> None:
        if not self.kraus:
            raise InvariantViolation("Operation: Kraus family must be non-empty")
        ks = tuple(as_matrix(K) for K in self.kraus)
        dim = ks[0].shape[0]
        if any(K.shape != (dim, dim) for K in ks):
            raise DimMismatch("Operation: Kraus operators of mixed dimension")
        for K in ks:
            K.setflags(write=False)
        total = sum(dagger(K) @ K for K in ks)
        top = float(np.linalg.eigvalsh(total)[-1])
        if top > 1.0 + self.tol.psd_tol:
            raise InvariantViolation(f"Operation: sum K†K has eigenvalue {top!r} above 1")
        if self.flavor not in FLAVORS:
            raise InvariantViolation(f"Operation: unknown flavor {self.flavor!r}")
        object.__setattr__(self, "kraus", ks)
        # Stacked copies let apply/dual run as two vectorized products.
        stack = np.stack(ks)
        object.__setattr__(self, "_stack", stack)
        object.__setattr__(self, "_stack_dag", stack.conj().transpose(0, 2, 1))
        self._check_flavor(total)

    def _check_flavor(self, total: np.ndarray) -> None:
        if self.flavor == "luders":
            if self.a is None or len(self.kraus) != 1:
                raise InvariantViolation("Operation: square-root flavor needs a single Kraus term and its effect")
            if not mat_close(self.kraus[0], sqrt_psd(self.a.matrix, self.tol), self.tol.eq_tol):
                raise InvariantViolation("Operation: Kraus term is not the square root of the tagged effect")
        elif self.flavor == "holevo":
            if self.a is None or self.alpha is None:
                raise InvariantViolation("Operation: measure-and-reprepare flavor needs an effect and a state")
            if not mat_close(total, self.a.matrix, self.tol.eq_tol):
                raise InvariantViolation("Operation: dual at identity does not reproduce the tagged effect")
        elif self.flavor == "zero":
            if any(max_abs(K) > self.tol.eq_tol for K in self.kraus):
                raise InvariantViolation("Operation: zero flavor with nonzero Kraus term")

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]


def _as_square(x, dim: int, what: str) -> np.ndarray:
    M = as_matrix(x.matrix if isinstance(x, (Effect, State)) else x)
    if M.shape[0] != dim:
        raise DimMismatch(f"{what}: operand dim {M.shape[0]} vs operation dim {dim}")
    return M


def apply(op: Operation, rho: State | np.ndarray) -> np.ndarray:
    """Forward action ``sum_i K_i rho K_i†``."""
    M = _as_square(rho, op.dim, "apply")
    return np.einsum("nij,njk->ik", op._stack @ M, op._stack_dag)


def _dual_raw(op: Operation, A: np.ndarray) -> np.ndarray:
    return np.einsum("nij,njk->ik", op._stack_dag @ A, op._stack)


def dual_apply(op: Operation, A: Effect | np.ndarray) -> np.ndarray:
    """Dual (Heisenberg) action ``sum_i K_i† A K_i`` on a Hermitian operand."""
    M = _as_square(A, op.dim, "dual_apply")
    require_hermitian(M, op.tol, "dual_apply operand")
    return _dual_raw(op, M)


def measured_effect(op: Operation) -> Effect:
    """The unique effect the operation measures: its dual at the identity."""
    return Effect(_dual_raw(op, np.eye(op.dim, dtype=np.complex128)), tol=op.tol)


def is_channel(op: Operation, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the measured effect is the identity, i.e. the map preserves trace."""
    return mat_close(measured_effect(op).matrix, np.eye(op.dim), tol.eq_tol)


def kraus_operation(K: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> Operation:
    """Single-Kraus operation ``rho -> K rho K†``; requires ``K†K <= I``."""
    M = as_matrix(K)
    top = float(np.linalg.eigvalsh(dagger(M) @ M)[-1])
    if top > 1.0 + tol.psd_tol:
        raise NotContraction(f"kraus_operation: K†K has eigenvalue {top!r} above 1")
    return Operation((M,), flavor="generic", tol=tol)


def luders_operation(a: Effect) -> Operation:
    """Square-root state update ``rho -> a^{1/2} rho a^{1/2}``; the canonical map measuring ``a``."""
    return Operation((sqrt_psd(a.matrix, a.tol),), flavor="luders", a=a, tol=a.tol)


def holevo_operation(a: Effect, alpha: State, tol: Tolerances = DEFAULT_TOL) -> Operation:
    """Measure-and-reprepare map ``rho -> tr(rho a) * alpha``.

    The Kraus family is ``sqrt(l_j) |psi_j><e_k| a^{1/2}`` over the spectral
    decomposition of ``alpha`` (eigenvalues above psd_tol) and the standard
    basis.  Both defining formulas - the forward action and the dual
    ``b -> tr(alpha b) a`` - are verified on a full operator basis before the
    operation is returned.
    """
    if a.dim != alpha.dim:
        raise DimMismatch(f"holevo_operation: effect dim {a.dim} vs state dim {alpha.dim}")
    dim = a.dim
    root_a = sqrt_psd(a.matrix, tol)
    dec = eigh(alpha.matrix, tol)
    ks = []
    for lam, psi in zip(dec.eigenvalues, dec.eigenvectors.T):
        if lam <= tol.psd_tol:
            continue
        for k in range(dim):
            bra = np.zeros((1, dim), dtype=np.complex128)
            bra[0, k] = 1.0
            ks.append(np.sqrt(lam) * np.outer(psi, bra) @ root_a)
    op = Operation(tuple(ks), flavor="holevo", a=a, alpha=alpha, tol=tol)
    for E in _matrix_units(dim):
        want_fwd = np.trace(E @ a.matrix) * alpha.matrix
        if not mat_close(apply(op, E), want_fwd, 1e-10):
            raise InvariantViolation("holevo_operation: forward action deviates from tr(rho a) alpha")
        want_dual = np.trace(alpha.matrix @ E) * a.matrix
        if not mat_close(_dual_raw(op, E), want_dual, 1e-10):
            raise InvariantViolation("holevo_operation: dual action deviates from tr(alpha b) a")
    return op


def zero_operation(dim: int, tol: Tolerances = DEFAULT_TOL) -> Operation:
    """The operation annihilating every state; it measures the zero effect."""
    return Operation((np.zeros((dim, dim), dtype=np.complex128),), flavor="zero", tol=tol)


def identity_operation(dim: int) -> Operation:
    """The identity channel, as the square-root update of the identity effect."""
    return luders_operation(Effect(np.eye(dim, dtype=np.complex128)))


def commuting_unitary(a: Effect, rng: int | np.random.Generator) -> np.ndarray:
    """Haar-phase unitary diagonal in the eigenbasis of ``a``, so it commutes with ``a``."""
    g = as_rng(rng)
    dec = eigh(a.matrix, a.tol)
    phases = np.exp(1j * g.uniform(0.0, 2.0 * np.pi, size=a.dim))
    V = dec.eigenvectors
    return (V * phases[np.newaxis, :]) @ dagger(V)


def kraus_measuring(a: Effect, rng: int | np.random.Generator) -> Operation:
    """Random single-Kraus operation measuring ``a``: ``K = a^{1/2} U`` with ``[U, a] = 0``.

    The commutation constraint keeps ``K†K = a`` while still randomizing the
    unitary twist, which is exactly the freedom a single-Kraus measurement of
    ``a`` admits.
    """
    U = commuting_unitary(a, rng)
    return kraus_operation(sqrt_psd(a.matrix, a.tol) @ U, a.tol)


def random_operation(
    dim: int,
    rng: int | np.random.Generator,
    n_kraus: int = 3,
    measured: Effect | None = None,
) -> Operation:
    """Random multi-Kraus operation measuring ``measured`` (random effect by default).

    Gaussian seeds ``G_i`` are whitened by ``S^{-1/2}`` with ``S = sum G_i†G_i``
    and then right-multiplied by ``measured^{1/2}`` so the family sums to the
    requested effect exactly.
    """
    g = as_rng(rng)
    m = measured if measured is not None else random_effect(dim, g)
    seeds = [random_complex(dim, g) for _ in range(n_kraus)]
    S = sum(dagger(G) @ G for G in seeds)
    dec = eigh(S)
    inv_root = dec.eigenvectors @ np.diag(dec.eigenvalues.astype(np.complex128) ** -0.5) @ dagger(dec.eigenvectors)
    root_m = sqrt_psd(m.matrix)
    ks = tuple(G @ inv_root @ root_m for G in seeds)
    return Operation(ks, flavor="generic")


def seq_product(op_a: Operation, b: Effect) -> Effect:
    """Sequential product: measure the operation's effect first, then ``b``; the dual at ``b``."""
    if op_a.dim != b.dim:
        raise DimMismatch(f"seq_product: operation dim {op_a.dim} vs effect dim {b.dim}")
    return Effect(_dual_raw(op_a, b.matrix), tol=op_a.tol)


def _require_measures(op: Operation, a: Effect, tol: Tolerances, side: str) -> None:
    got = measured_effect(op)
    dev = max_abs(got.matrix - a.matrix)
    if dev > tol.eq_tol:
        raise WrongMeasuredEffect(f"{side}: operation measures a different effect (deviation {dev:.3e})")


@dataclass(frozen=True, eq=False)
class CommutatorResult:
    """Difference of the two orderings of a sequential measurement; Hermitian by construction."""

    value: np.ndarray
    vanishes: bool

    def __post_init__(self) -> None:
        M = as_matrix(self.value)
        if max_abs(M - dagger(M)) > 1e-8:
            raise InvariantViolation("CommutatorResult: value is not Hermitian")
        M.setflags(write=False)
        object.__setattr__(self, "value", M)


def commutator(
    a: Effect,
    b: Effect,
    op_a: Operation,
    op_b: Operation,
    tol: Tolerances = DEFAULT_TOL,
) -> CommutatorResult:
    """``a[op_a]b - b[op_b]a`` for operations measuring ``a`` and ``b`` respectively."""
    _require_measures(op_a, a, tol, "commutator (first operand)")
    _require_measures(op_b, b, tol, "commutator (second operand)")
    value = seq_product(op_a, b).matrix - seq_product(op_b, a).matrix
    return CommutatorResult(value, vanishes=max_abs(value) <= tol.eq_tol)


REPEATABILITY_CRITERIA = ("def", "ii", "iii", "iv", "v")


def is_repeatable(
    a: Effect,
    op: Operation,
    criterion: str = "def",
    tol: Tolerances = DEFAULT_TOL,
    rng: int | np.random.Generator | None = None,
    samples: int = 50,
) -> bool:
    """Whether measuring ``a`` with ``op`` leaves ``a`` certain on a repeat measurement.

    ``criterion`` selects one of five equivalent characterizations:

    - ``def``: the dual fixes ``a``.
    - ``ii``:  the sequential product with the complement vanishes.
    - ``iii``: the sequential product vanishes for every ``b <= I - a``
      (checked on the complement and ``samples`` random sub-effects of it).
    - ``iv``:  the dual of every effect sits below the dual of ``a``
      (checked on {0, complement, I} and ``samples`` random effects).
    - ``v``:   applying the operation twice preserves the once-applied trace
      (checked on ``samples`` random states).

    The sampled criteria include the deterministic edge witnesses that decide
    the property exactly, so sampling never changes the verdict.
    """
    if criterion not in REPEATABILITY_CRITERIA:
        raise InvariantViolation(f"is_repeatable: unknown criterion {criterion!r}")
    _require_measures(op, a, tol, "is_repeatable")
    g = as_rng(rng) if rng is not None else stream(0, 94)
    eye = np.eye(op.dim)
    a_prime = complement(a)
    if criterion == "def":
        return mat_close(_dual_raw(op, a.matrix), a.matrix, tol.eq_tol)
    if criterion == "ii":
        return max_abs(_dual_raw(op, a_prime.matrix)) <= tol.eq_tol
    if criterion == "iii":
        root_prime = sqrt_psd(a_prime.matrix, tol)
        subs = [a_prime.matrix] + [
            root_prime @ random_effect(op.dim, g).matrix @ root_prime for _ in range(samples)
        ]
        return all(max_abs(_dual_raw(op, b)) <= tol.eq_tol for b in subs)
    if criterion == "iv":
        dual_a = _dual_raw(op, a.matrix)
        probes = [np.zeros_like(eye), a_prime.matrix, eye] + [
            random_effect(op.dim, g).matrix for _ in range(samples)
        ]
        return all(
            np.linalg.eigvalsh(dual_a - _dual_raw(op, b))[0] >= -tol.psd_tol for b in probes
        )
    for _ in range(samples):
        rho = random_state(op.dim, g)
        sigma = apply(op, rho)
        if abs(float(np.trace(apply(op, sigma)).real) - float(np.trace(sigma).real)) > tol.eq_tol:
            return False
    return True


def condition_effect(
    b: Effect,
    op_a: Operation,
    op_a_prime: Operation,
    tol: Tolerances = DEFAULT_TOL,
    a: Effect | None = None,
) -> Effect:
    """Effect ``b`` conditioned by a prior yes/no measurement: sum of the two duals at ``b``.

    ``op_a`` must measure some effect and ``op_a_prime`` its complement; pass
    ``a`` to additionally pin down which effect is expected.
    """
    if op_a.dim != b.dim or op_a_prime.dim != b.dim:
        raise DimMismatch("condition_effect: dimension mismatch")
    measured = measured_effect(op_a)
    if a is not None:
        _require_measures(op_a, a, tol, "condition_effect")
    want_prime = complement(measured)
    got_prime = measured_effect(op_a_prime)
    dev = max_abs(got_prime.matrix - want_prime.matrix)
    if dev > tol.eq_tol:
        raise ComplementMismatch(
            f"condition_effect: second operation deviates from measuring the complement by {dev:.3e}"
        )
    return Effect(_dual_raw(op_a, b.matrix) + _dual_raw(op_a_prime, b.matrix), tol=tol)


def compose(first: Operation, then: Operation) -> Operation:
    """Operation acting as ``first`` followed by ``then``; Kraus family of all products.

    Equality with the literal composition is asserted on a full operator basis.
    """
    if first.dim != then.dim:
        raise DimMismatch(f"compose: {first.dim} vs {then.dim}")
    ks = tuple(K2 @ K1 for K2 in then.kraus for K1 in first.kraus)
    composed = Operation(ks, flavor="generic", tol=first.tol)
    for E in _matrix_units(first.dim):
        if not mat_close(apply(composed, E), apply(then, apply(first, E)), 1e-10):
            raise InvariantViolation("compose: product family deviates from sequential application")
    return composed
