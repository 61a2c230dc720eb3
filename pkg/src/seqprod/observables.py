"""Finite observables, instruments, bi-observables, and their sequential products.

An observable is an outcome-indexed family of effects summing to the
identity; an instrument is a family of operations whose total is a channel.
Measuring the instrument's observable first and another observable second
yields a bi-observable whose marginals recover the first observable and the
conditioned form of the second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Real

import numpy as np

from .effects import Effect, State
from .errors import (
    DimMismatch,
    InvariantViolation,
    LengthMismatch,
    NotNormalized,
    OutcomeMismatch,
    UnknownLabel,
)
from .linalg import DEFAULT_TOL, Tolerances, as_matrix, as_rng, dagger, max_abs, mat_close, random_unitary
from .operations import (
    Operation,
    _dual_raw,
    holevo_operation,
    kraus_operation,
    luders_operation,
    measured_effect,
)

__all__ = [
    "Label",
    "Observable",
    "Instrument",
    "BiObservable",
    "distribution",
    "instrument_distribution",
    "subset_effect",
    "measured_observable",
    "luders_instrument",
    "holevo_instrument",
    "kraus_instrument",
    "total_channel",
    "seq_product_obs",
    "marginal",
    "conditioned_obs",
    "transition_matrix",
    "coexist_via_joint",
    "random_observable",
    "random_sharp_observable",
    "trivial_observable",
]

Label = str | float | int


def _check_label(x) -> Label:
    if isinstance(x, str):
        return x
    if isinstance(x, Real) and np.isfinite(float(x)):
        return x
    raise InvariantViolation(f"outcome label must be a string or finite real, got {x!r}")


@dataclass(frozen=True, eq=False)
class Observable:
    """Ordered family of effects summing to the identity."""

    outcomes: tuple[Label, ...]
    effects: tuple[Effect, ...]
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self) -> None:
        outcomes = tuple(_check_label(x) for x in self.outcomes)
        effects = tuple(self.effects)
        if len(outcomes) != len(effects) or not effects:
            raise LengthMismatch("Observable: need one effect per outcome")
        if len(set(outcomes)) != len(outcomes):
            raise InvariantViolation("Observable: outcome labels must be distinct")
        dim = effects[0].dim
        if any(e.dim != dim for e in effects):
            raise DimMismatch("Observable: effects of mixed dimension")
        total = sum(e.matrix for e in effects)
        dev = max_abs(total - np.eye(dim))
        if dev > self.tol.eq_tol:
            raise InvariantViolation(f"Observable: effects sum deviates from identity by {dev:.3e}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].dim

    def effect(self, x: Label) -> Effect:
        try:
            return self.effects[self.outcomes.index(x)]
        except ValueError:
            raise UnknownLabel(f"Observable: no outcome {x!r}") from None

    def is_real(self) -> bool:
        return all(not isinstance(x, str) for x in self.outcomes)

    def is_sharp(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        from .effects import is_sharp

        return all(is_sharp(e, tol) for e in self.effects)


@dataclass(frozen=True, eq=False)
class Instrument:
    """Ordered family of operations whose sum is a channel."""

    outcomes: tuple[Label, ...]
    operations: tuple[Operation, ...]
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self) -> None:
        outcomes = tuple(_check_label(x) for x in self.outcomes)
        ops = tuple(self.operations)
        if len(outcomes) != len(ops) or not ops:
            raise LengthMismatch("Instrument: need one operation per outcome")
        if len(set(outcomes)) != len(outcomes):
            raise InvariantViolation("Instrument: outcome labels must be distinct")
        dim = ops[0].dim
        if any(op.dim != dim for op in ops):
            raise DimMismatch("Instrument: operations of mixed dimension")
        eye = np.eye(dim, dtype=np.complex128)
        total = sum(_dual_raw(op, eye) for op in ops)
        dev = max_abs(total - eye)
        if dev > self.tol.eq_tol:
            raise InvariantViolation(f"Instrument: total operation deviates from a channel by {dev:.3e}")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "operations", ops)

    @property
    def dim(self) -> int:
        return self.operations[0].dim

    def operation(self, x: Label) -> Operation:
        try:
            return self.operations[self.outcomes.index(x)]
        except ValueError:
            raise UnknownLabel(f"Instrument: no outcome {x!r}") from None


@dataclass(frozen=True, eq=False)
class BiObservable:
    """Observable indexed by pairs from two outcome lists."""

    outcomes1: tuple[Label, ...]
    outcomes2: tuple[Label, ...]
    effects: dict[tuple[Label, Label], Effect]
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self) -> None:
        o1 = tuple(_check_label(x) for x in self.outcomes1)
        o2 = tuple(_check_label(y) for y in self.outcomes2)
        if len(set(o1)) != len(o1) or len(set(o2)) != len(o2):
            raise InvariantViolation("BiObservable: outcome labels must be distinct")
        pairs = [(x, y) for x in o1 for y in o2]
        if set(self.effects) != set(pairs):
            raise InvariantViolation("BiObservable: effects must cover exactly the outcome product set")
        dims = {e.dim for e in self.effects.values()}
        if len(dims) != 1:
            raise DimMismatch("BiObservable: effects of mixed dimension")
        dim = dims.pop()
        total = sum(e.matrix for e in self.effects.values())
        dev = max_abs(total - np.eye(dim))
        if dev > self.tol.eq_tol:
            raise InvariantViolation(f"BiObservable: effects sum deviates from identity by {dev:.3e}")
        object.__setattr__(self, "outcomes1", o1)
        object.__setattr__(self, "outcomes2", o2)
        object.__setattr__(self, "effects", dict(self.effects))

    @property
    def dim(self) -> int:
        return next(iter(self.effects.values())).dim


def distribution(rho: State, A: Observable) -> list[tuple[Label, float]]:
    """Outcome probabilities ``tr(rho A_x)``; they are nonnegative and sum to one."""
    if rho.dim != A.dim:
        raise DimMismatch(f"distribution: state dim {rho.dim} vs observable dim {A.dim}")
    from .effects import prob

    probs = [(x, prob(rho, e)) for x, e in zip(A.outcomes, A.effects)]
    if any(p < -A.tol.eq_tol for _, p in probs):
        raise InvariantViolation("distribution: negative probability")
    total = sum(p for _, p in probs)
    if abs(total - 1.0) > 1e-9:
        raise InvariantViolation(f"distribution: probabilities sum to {total!r}")
    return probs


def instrument_distribution(rho: State, instr: Instrument) -> list[tuple[Label, float]]:
    """Outcome probabilities ``tr[I_x(rho)]`` of an instrument."""
    from .operations import apply

    if rho.dim != instr.dim:
        raise DimMismatch("instrument_distribution: dimension mismatch")
    return [(x, float(np.trace(apply(op, rho)).real)) for x, op in zip(instr.outcomes, instr.operations)]


def subset_effect(A: Observable, delta) -> Effect:
    """Effect of observing an outcome inside ``delta``: the partial sum of effects."""
    labels = list(delta)
    for x in labels:
        if x not in A.outcomes:
            raise UnknownLabel(f"subset_effect: {x!r} is not an outcome")
    acc = np.zeros((A.dim, A.dim), dtype=np.complex128)
    for x in labels:
        acc += A.effect(x).matrix
    return Effect(acc, tol=A.tol)


def measured_observable(instr: Instrument) -> Observable:
    """The observable an instrument measures: per-outcome duals at the identity."""
    return Observable(instr.outcomes, tuple(measured_effect(op) for op in instr.operations), tol=instr.tol)


def luders_instrument(A: Observable) -> Instrument:
    """Square-root instrument of an observable: outcome ``x`` applies ``A_x^{1/2} . A_x^{1/2}``."""
    return Instrument(A.outcomes, tuple(luders_operation(e) for e in A.effects), tol=A.tol)


def holevo_instrument(A: Observable, alphas: list[State]) -> Instrument:
    """Measure-and-reprepare instrument: outcome ``x`` prepares ``alpha_x`` with weight ``tr(rho A_x)``."""
    if len(alphas) != len(A.outcomes):
        raise LengthMismatch("holevo_instrument: need one state per outcome")
    if any(alpha.dim != A.dim for alpha in alphas):
        raise DimMismatch("holevo_instrument: state dimension mismatch")
    ops = tuple(holevo_operation(e, alpha, A.tol) for e, alpha in zip(A.effects, alphas))
    return Instrument(A.outcomes, ops, tol=A.tol)


def kraus_instrument(
    ks: list[np.ndarray],
    outcomes: tuple[Label, ...] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> Instrument:
    """Single-Kraus instrument from matrices with ``sum K_x†K_x = I``."""
    mats = [as_matrix(K) for K in ks]
    if not mats:
        raise LengthMismatch("kraus_instrument: empty family")
    dim = mats[0].shape[0]
    total = sum(dagger(K) @ K for K in mats)
    dev = max_abs(total - np.eye(dim))
    if dev > tol.eq_tol:
        raise NotNormalized(f"kraus_instrument: sum K†K deviates from identity by {dev:.3e}")
    if outcomes is None:
        outcomes = tuple(range(len(mats)))
    return Instrument(outcomes, tuple(kraus_operation(K, tol) for K in mats), tol=tol)


def total_channel(instr: Instrument) -> Operation:
    """The channel obtained by summing all outcome operations (union of Kraus families)."""
    ks = tuple(K for op in instr.operations for K in op.kraus)
    return Operation(ks, flavor="generic", tol=instr.tol)


def seq_product_obs(instr: Instrument, B: Observable) -> BiObservable:
    """Bi-observable of measuring the instrument's observable first, then ``B``."""
    if instr.dim != B.dim:
        raise DimMismatch("seq_product_obs: dimension mismatch")
    effects = {}
    for x, op in zip(instr.outcomes, instr.operations):
        for y, b in zip(B.outcomes, B.effects):
            effects[(x, y)] = Effect(_dual_raw(op, b.matrix), tol=instr.tol)
    return BiObservable(instr.outcomes, B.outcomes, effects, tol=instr.tol)


def marginal(biA: BiObservable, which: str) -> Observable:
    """First or second marginal observable of a bi-observable."""
    if which not in ("first", "second"):
        raise InvariantViolation(f"marginal: which must be 'first' or 'second', got {which!r}")
    dim = biA.dim
    if which == "first":
        sums = [
            sum((biA.effects[(x, y)].matrix for y in biA.outcomes2), np.zeros((dim, dim), dtype=np.complex128))
            for x in biA.outcomes1
        ]
        return Observable(biA.outcomes1, tuple(Effect(m, tol=biA.tol) for m in sums), tol=biA.tol)
    sums = [
        sum((biA.effects[(x, y)].matrix for x in biA.outcomes1), np.zeros((dim, dim), dtype=np.complex128))
        for y in biA.outcomes2
    ]
    return Observable(biA.outcomes2, tuple(Effect(m, tol=biA.tol) for m in sums), tol=biA.tol)


def conditioned_obs(B: Observable, instr: Instrument) -> Observable:
    """Observable ``B`` conditioned on a prior measurement by ``instr``: total dual at each ``B_y``."""
    if instr.dim != B.dim:
        raise DimMismatch("conditioned_obs: dimension mismatch")
    effects = []
    for b in B.effects:
        acc = np.zeros((B.dim, B.dim), dtype=np.complex128)
        for op in instr.operations:
            acc += _dual_raw(op, b.matrix)
        effects.append(Effect(acc, tol=instr.tol))
    return Observable(B.outcomes, tuple(effects), tol=instr.tol)


def transition_matrix(B: Observable, alphas: list[State]) -> np.ndarray:
    """Row-stochastic matrix ``T[x][y] = tr(alpha_x B_y)`` of transition probabilities."""
    if any(alpha.dim != B.dim for alpha in alphas):
        raise DimMismatch("transition_matrix: dimension mismatch")
    T = np.empty((len(alphas), len(B.outcomes)), dtype=float)
    for i, alpha in enumerate(alphas):
        for j, b in enumerate(B.effects):
            value = np.trace(alpha.matrix @ b.matrix)
            T[i, j] = value.real
    tol = B.tol
    if np.any(T < -tol.eq_tol) or np.any(T > 1.0 + tol.eq_tol):
        raise InvariantViolation("transition_matrix: entry outside [0, 1]")
    rows = T.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > 1e-9):
        raise InvariantViolation("transition_matrix: row does not sum to 1")
    return T


def coexist_via_joint(biA: BiObservable, B: Observable, C: Observable, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Certify coexistence of ``B`` and ``C``: the bi-observable must have them as marginals.

    A ``True`` answer is a certificate; ``False`` only means this particular
    joint observable does not witness coexistence.
    """
    if biA.outcomes1 != B.outcomes or biA.outcomes2 != C.outcomes:
        raise OutcomeMismatch("coexist_via_joint: outcome sets do not match the candidate marginals")
    first = marginal(biA, "first")
    second = marginal(biA, "second")
    ok_first = all(mat_close(e.matrix, f.matrix, tol.eq_tol) for e, f in zip(first.effects, B.effects))
    ok_second = all(mat_close(e.matrix, f.matrix, tol.eq_tol) for e, f in zip(second.effects, C.effects))
    return ok_first and ok_second


def trivial_observable(dim: int, label: Label = "x") -> Observable:
    """One-outcome observable whose only effect is the identity."""
    return Observable((label,), (Effect(np.eye(dim, dtype=np.complex128)),))


def random_observable(
    dim: int,
    n_outcomes: int,
    rng: int | np.random.Generator,
    outcomes: tuple[Label, ...] | None = None,
) -> Observable:
    """Random observable: whitened Wishart pieces ``S^{-1/2} G_x S^{-1/2}`` summing to the identity."""
    g = as_rng(rng)
    from .linalg import random_complex

    seeds = [random_complex(dim, g) for _ in range(n_outcomes)]
    gram = [dagger(G) @ G for G in seeds]
    S = sum(gram)
    vals, vecs = np.linalg.eigh(S)
    inv_root = vecs @ np.diag(vals.astype(np.complex128) ** -0.5) @ dagger(vecs)
    effects = tuple(Effect(inv_root @ G @ inv_root) for G in gram)
    if outcomes is None:
        outcomes = tuple(range(n_outcomes))
    return Observable(outcomes, effects)


def random_sharp_observable(
    dim: int,
    n_outcomes: int,
    rng: int | np.random.Generator,
    outcomes: tuple[Label, ...] | None = None,
) -> Observable:
    """Random sharp observable: projectors onto a partition of a Haar-random basis."""
    if n_outcomes > dim:
        raise InvariantViolation("random_sharp_observable: more outcomes than dimensions")
    g = as_rng(rng)
    U = random_unitary(dim, g)
    cuts = sorted(g.choice(np.arange(1, dim), size=n_outcomes - 1, replace=False)) if n_outcomes > 1 else []
    bounds = [0, *cuts, dim]
    effects = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        block = U[:, lo:hi]
        effects.append(Effect(block @ dagger(block)))
    if outcomes is None:
        outcomes = tuple(range(n_outcomes))
    return Observable(outcomes, tuple(effects))
