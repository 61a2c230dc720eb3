"""Named verification suites over fixed and seeded-random instances.

Each suite checks one claim family: either a law that must hold on every
generated instance (a *theorem* suite) or a "need not hold" claim certified
by searching for an explicit counterexample (a *witness* suite, where a found
witness is a pass).  Reports are deterministic functions of the
configuration: all randomness flows through counter-based streams addressed
by (seed, suite index, ...).

Universally quantified hypotheses are exercised on constructed instance
families that satisfy them exactly, plus deterministic edge witnesses; the
construction recipes are documented suite by suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .effects import (
    Effect,
    State,
    complement,
    has_eigenvalue_one,
    identity_effect,
    is_sharp,
    leq,
    prob,
    random_effect,
    random_state,
    zero_effect,
)
from .errors import InvariantViolation, UnknownSuite
from .linalg import (
    Tolerances,
    dagger,
    max_abs,
    mat_close,
    random_hermitian,
    random_unitary,
    sqrt_psd,
    stream,
)
from .observables import (
    Instrument,
    Observable,
    conditioned_obs,
    coexist_via_joint,
    distribution,
    holevo_instrument,
    instrument_distribution,
    kraus_instrument,
    luders_instrument,
    marginal,
    measured_observable,
    random_observable,
    random_sharp_observable,
    seq_product_obs,
    subset_effect,
    total_channel,
    transition_matrix,
    trivial_observable,
)
from .operations import (
    Operation,
    apply,
    commutator,
    commuting_unitary,
    condition_effect,
    dual_apply,
    holevo_operation,
    is_channel,
    is_repeatable,
    kraus_measuring,
    kraus_operation,
    luders_operation,
    measured_effect,
    random_operation,
    seq_product,
    zero_operation,
    REPEATABILITY_CRITERIA,
)
from .serialize import to_obj
from .stats import (
    conditioned_stochastic,
    conditioned_stats,
    correlation,
    covariance,
    expectation,
    stochastic_operator,
    uncertainty_report,
    variance,
)

__all__ = ["TrialConfig", "SuiteReport", "list_suites", "run_suite", "run_all", "run_scenario"]


@dataclass(frozen=True)
class TrialConfig:
    """Knobs of one suite run; ``dim`` is the largest dimension exercised (suites sweep 2..dim)."""

    dim: int = 2
    trials: int = 200
    seed: int = 0
    eq_tol: float = 1e-9
    psd_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise InvariantViolation("TrialConfig: dim must be >= 2")
        if self.trials < 1:
            raise InvariantViolation("TrialConfig: trials must be >= 1")
        if not (self.eq_tol > 0 and self.psd_tol > 0):
            raise InvariantViolation("TrialConfig: tolerances must be positive")

    @property
    def dims(self) -> range:
        return range(2, self.dim + 1)

    @property
    def tol(self) -> Tolerances:
        return Tolerances(self.eq_tol, self.psd_tol)


@dataclass(frozen=True)
class SuiteReport:
    """Machine-readable verdict of one suite run."""

    suite: str
    paper_claim: str
    cases_run: int
    cases_passed: int
    witnesses: tuple[dict, ...]
    status: str

    def __post_init__(self) -> None:
        if self.cases_passed > self.cases_run:
            raise InvariantViolation("SuiteReport: cases_passed exceeds cases_run")

    @property
    def ok(self) -> bool:
        return self.status in ("pass", "witness-found")

    def to_obj(self) -> dict:
        return {
            "suite": self.suite,
            "paper_claim": self.paper_claim,
            "cases_run": self.cases_run,
            "cases_passed": self.cases_passed,
            "witnesses": list(self.witnesses),
            "status": self.status,
        }


class _Recorder:
    """Accumulates case verdicts and witness-search outcomes for one suite run."""

    def __init__(self) -> None:
        self.cases_run = 0
        self.cases_passed = 0
        self.witnesses: list[dict] = []
        self.missing_required: list[str] = []

    def case(self, ok: bool, label: str, objects: dict | None = None) -> bool:
        self.cases_run += 1
        if ok:
            self.cases_passed += 1
        else:
            record = {"check": label, "ok": False}
            if objects:
                record["objects"] = {k: to_obj(v) for k, v in objects.items()}
            self.witnesses.append(record)
        return ok

    def found(self, label: str, found_at: int, objects: dict | None = None) -> None:
        record: dict[str, Any] = {"witness": label, "found_at": found_at}
        if objects:
            record["objects"] = {k: to_obj(v) for k, v in objects.items()}
        self.witnesses.append(record)

    def search(self, label: str, found_at: int | None, objects: dict | None = None, required: bool = True) -> None:
        if found_at is not None:
            self.found(label, found_at, objects)
        else:
            self.witnesses.append({"witness": label, "found_at": None, "required": required})
            if required:
                self.missing_required.append(label)

    def note(self, label: str, payload: dict) -> None:
        self.witnesses.append({"note": label, **{k: to_obj(v) for k, v in payload.items()}})

    def report(self, name: str, claim: str, kind: str) -> SuiteReport:
        if self.cases_passed < self.cases_run:
            status = "fail"
        elif self.missing_required:
            status = "witness-not-found"
        elif kind == "witness":
            status = "witness-found"
        else:
            status = "pass"
        return SuiteReport(name, claim, self.cases_run, self.cases_passed, tuple(self.witnesses), status)


class _Ctx:
    """Per-run bundle: config, recorder, substream factory, scenario object bindings."""

    def __init__(self, cfg: TrialConfig, rec: _Recorder, index: int, objects: dict | None) -> None:
        self.cfg = cfg
        self.rec = rec
        self.index = index
        self.objects = objects or {}
        self.tol = cfg.tol

    def rng(self, *path: int) -> np.random.Generator:
        return stream(self.cfg.seed, self.index, *path)


# ---------------------------------------------------------------------------
# Instance construction helpers
# ---------------------------------------------------------------------------


def _basis_effects(dim: int, rng: np.random.Generator, spectra: list[np.ndarray]) -> list[Effect]:
    """Effects sharing one Haar-random eigenbasis, hence mutually commuting."""
    V = random_unitary(dim, rng)
    return [Effect(V @ np.diag(np.asarray(s, dtype=np.complex128)) @ dagger(V)) for s in spectra]


def _co_diagonal(dim: int, rng: np.random.Generator, n: int, scale: float = 1.0) -> list[Effect]:
    return _basis_effects(dim, rng, [scale * rng.uniform(0.0, 1.0, dim) for _ in range(n)])


def _disjoint_pair(dim: int, rng: np.random.Generator) -> tuple[Effect, Effect]:
    """Effects with orthogonal supports (so their operator product vanishes)."""
    cut = int(rng.integers(1, dim))
    sa = np.concatenate([rng.uniform(0.1, 1.0, cut), np.zeros(dim - cut)])
    sb = np.concatenate([np.zeros(cut), rng.uniform(0.1, 1.0, dim - cut)])
    a, b = _basis_effects(dim, rng, [sa, sb])
    return a, b


def _sub_effect(b: Effect, rng: np.random.Generator) -> Effect:
    """Random effect below ``b``: a sandwich ``b^{1/2} e b^{1/2}``."""
    root = sqrt_psd(b.matrix, b.tol)
    e = random_effect(b.dim, rng)
    return Effect(root @ e.matrix @ root, tol=b.tol)


def _projector(dim: int, rng: np.random.Generator, rank: int | None = None) -> Effect:
    U = random_unitary(dim, rng)
    r = int(rng.integers(1, dim)) if rank is None else rank
    block = U[:, :r]
    return Effect(block @ dagger(block))


def _effect_with_unit_eigenvalue(dim: int, rng: np.random.Generator) -> tuple[Effect, np.ndarray]:
    """Random effect whose top eigenvalue is exactly one, plus a unit eigenvector for it."""
    V = random_unitary(dim, rng)
    spectrum = np.concatenate([[1.0], rng.uniform(0.0, 1.0, dim - 1)])
    a = Effect(V @ np.diag(spectrum.astype(np.complex128)) @ dagger(V))
    return a, V[:, 0]


def _effect_capped(dim: int, rng: np.random.Generator, cap: float = 0.99) -> Effect:
    """Random nonzero effect with spectrum capped below one (middle eigenvalue forced inland)."""
    spectrum = rng.uniform(0.05, cap, dim)
    spectrum[0] = rng.uniform(0.2, 0.8)
    V = random_unitary(dim, rng)
    return Effect(V @ np.diag(spectrum.astype(np.complex128)) @ dagger(V))


def _measuring_flavors(a: Effect, rng: np.random.Generator) -> list[tuple[str, Operation]]:
    """The three named operation families measuring ``a``."""
    return [
        ("luders", luders_operation(a)),
        ("kraus", kraus_measuring(a, rng)),
        ("holevo", holevo_operation(a, random_state(a.dim, rng))),
    ]


def _instrument_flavors(A: Observable, rng: np.random.Generator) -> list[tuple[str, Instrument]]:
    """The three named instrument families measuring ``A``."""
    ks = [random_unitary(A.dim, rng) @ sqrt_psd(e.matrix, e.tol) for e in A.effects]
    alphas = [random_state(A.dim, rng) for _ in A.outcomes]
    return [
        ("luders", luders_instrument(A)),
        ("kraus", kraus_instrument(ks, A.outcomes)),
        ("holevo", holevo_instrument(A, alphas)),
    ]


def _random_real_observable(dim: int, n: int, rng: np.random.Generator) -> Observable:
    labels = tuple(float(x) for x in rng.uniform(-2.0, 2.0, n))
    base = random_observable(dim, n, rng)
    return Observable(labels, base.effects)


def _comm_norm(A: np.ndarray, B: np.ndarray) -> float:
    return max_abs(A @ B - B @ A)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _suite_duality(ctx: _Ctx) -> None:
    cfg, rec = ctx.cfg, ctx.rec
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            kind = t % 4
            if kind == 0:
                op = random_operation(dim, g)
            elif kind == 1:
                op = luders_operation(random_effect(dim, g))
            elif kind == 2:
                op = holevo_operation(random_effect(dim, g), random_state(dim, g))
            else:
                op = kraus_measuring(random_effect(dim, g), g)
            rho = random_state(dim, g)
            b = random_effect(dim, g)
            lhs = np.trace(rho.matrix @ dual_apply(op, b.matrix))
            rhs = np.trace(apply(op, rho) @ b.matrix)
            rec.case(abs(lhs - rhs) <= 1e-8, f"trace pairing dim={dim} trial={t}")


def _suite_seqprod_laws(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        rec.case(
            max_abs(seq_product(zero_operation(dim), random_effect(dim, ctx.rng(dim, 0))).matrix) <= tol.eq_tol,
            f"zero operation absorbs dim={dim}",
        )
        for t in range(cfg.trials):
            g = ctx.rng(dim, t + 1)
            a = random_effect(dim, g)
            flavor, op = _measuring_flavors(a, g)[t % 3]
            ident = identity_effect(dim)
            rec.case(
                mat_close(seq_product(op, ident).matrix, a.matrix, tol.eq_tol),
                f"product with identity returns measured effect [{flavor}] dim={dim} trial={t}",
            )
            rec.case(
                max_abs(seq_product(op, zero_effect(dim)).matrix) <= tol.eq_tol,
                f"product with zero vanishes [{flavor}] dim={dim} trial={t}",
            )
            b = random_effect(dim, g)
            c = _sub_effect(complement(b), g)
            both = Effect(b.matrix + c.matrix)
            additive = mat_close(
                seq_product(op, both).matrix,
                seq_product(op, b).matrix + seq_product(op, c).matrix,
                1e-9,
            )
            rec.case(additive, f"additivity [{flavor}] dim={dim} trial={t}")
            lam = float(g.uniform(0.1, 0.9))
            mix = Effect(lam * b.matrix + (1 - lam) * c.matrix)
            convex = mat_close(
                seq_product(op, mix).matrix,
                lam * seq_product(op, b).matrix + (1 - lam) * seq_product(op, c).matrix,
                1e-9,
            )
            rec.case(convex, f"convexity [{flavor}] dim={dim} trial={t}")
            ab = seq_product(op, b)
            rec.case(leq(ab, a, tol), f"product below first factor [{flavor}] dim={dim} trial={t}")
            split = mat_close(ab.matrix + seq_product(op, complement(b)).matrix, a.matrix, 1e-9)
            rec.case(split, f"product plus complement product is the factor [{flavor}] dim={dim} trial={t}")


def _luders_prod(a: Effect, b: Effect) -> np.ndarray:
    root = sqrt_psd(a.matrix, a.tol)
    return root @ b.matrix @ root


def _suite_luders(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a = random_effect(dim, g)
            b = random_effect(dim, g)
            c = _sub_effect(complement(b), g)
            lhs = _luders_prod(a, Effect(b.matrix + c.matrix))
            rec.case(
                mat_close(lhs, _luders_prod(a, b) + _luders_prod(a, c), 1e-9),
                f"L1 additivity dim={dim} trial={t}",
            )
            rec.case(
                mat_close(_luders_prod(identity_effect(dim), a), a.matrix, 1e-9),
                f"L2 identity acts trivially dim={dim} trial={t}",
            )
            da, db = _disjoint_pair(dim, g)
            rec.case(
                max_abs(_luders_prod(da, db)) <= 1e-9 and max_abs(_luders_prod(db, da)) <= 1e-9,
                f"L3 zero products are symmetric dim={dim} trial={t}",
            )
            ca, cb = _co_diagonal(dim, g, 2)
            cc = random_effect(dim, g)
            rec.case(
                _comm_norm(ca.matrix, complement(cb).matrix) <= 1e-9,
                f"L4 complement stays commuting dim={dim} trial={t}",
            )
            assoc_lhs = _luders_prod(ca, Effect(_luders_prod(cb, cc)))
            assoc_rhs = _luders_prod(Effect(_luders_prod(ca, cb)), cc)
            rec.case(mat_close(assoc_lhs, assoc_rhs, 1e-9), f"L4 commuting associativity dim={dim} trial={t}")
            # L5: a, b in the commutant of a degenerate c, halved so they are summable.
            g5 = ctx.rng(dim, t, 5)
            if dim == 2:
                c5 = Effect(float(g5.uniform(0.1, 1.0)) * np.eye(2, dtype=np.complex128))
                a5 = Effect(random_effect(2, g5).matrix / 2.0)
                b5 = Effect(random_effect(2, g5).matrix / 2.0)
            else:
                V = random_unitary(dim, g5)
                m = dim - 1
                c_vals = np.concatenate([np.full(m, g5.uniform(0.1, 1.0)), g5.uniform(0.0, 1.0, dim - m)])
                c5 = Effect(V @ np.diag(c_vals.astype(np.complex128)) @ dagger(V))

                def _block_effect() -> Effect:
                    top = random_effect(m, g5).matrix / 2.0
                    rest = np.diag((g5.uniform(0.0, 1.0, dim - m) / 2.0).astype(np.complex128))
                    M = np.zeros((dim, dim), dtype=np.complex128)
                    M[:m, :m] = top
                    M[m:, m:] = rest
                    return Effect(V @ M @ dagger(V))

                a5, b5 = _block_effect(), _block_effect()
            ok_hyp = _comm_norm(a5.matrix, c5.matrix) <= 1e-12 and _comm_norm(b5.matrix, c5.matrix) <= 1e-12
            prod5 = _luders_prod(a5, b5)
            rec.case(
                ok_hyp and _comm_norm(prod5, c5.matrix) <= 1e-9,
                f"L5 product stays in the commutant dim={dim} trial={t}",
            )
            rec.case(
                _comm_norm(a5.matrix + b5.matrix, c5.matrix) <= 1e-9,
                f"L5 sum stays in the commutant dim={dim} trial={t}",
            )
            # Vanishing of the two-sided product difference is equivalent to commutation.
            gc = ctx.rng(dim, t, 6)
            xa, xb = _co_diagonal(dim, gc, 2)
            comm_val = commutator(xa, xb, luders_operation(xa), luders_operation(xb), tol)
            rec.case(comm_val.vanishes, f"commuting pair has vanishing commutator dim={dim} trial={t}")
            ya, yb = random_effect(dim, gc), random_effect(dim, gc)
            if _comm_norm(ya.matrix, yb.matrix) > 1e-6:
                noncomm = commutator(ya, yb, luders_operation(ya), luders_operation(yb), tol)
                rec.case(
                    max_abs(noncomm.value) > 1e-9,
                    f"non-commuting pair has nonvanishing commutator dim={dim} trial={t}",
                )


def _suite_thm21(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            alpha = random_state(dim, g)
            a = random_effect(dim, g)
            op = holevo_operation(a, alpha)
            b = random_effect(dim, g)
            c = _sub_effect(complement(b), g)
            lhs = seq_product(op, Effect(b.matrix + c.matrix)).matrix
            rec.case(
                mat_close(lhs, seq_product(op, b).matrix + seq_product(op, c).matrix, 1e-9),
                f"H1 additivity dim={dim} trial={t}",
            )
            # H5 on instances built to satisfy its hypotheses: proportional effects
            # c = lam*a, b = mu*a automatically commute relative to a shared state.
            mu, lam = float(g.uniform(0.2, 1.0)), float(g.uniform(0.2, 1.0))
            base = Effect(random_effect(dim, g).matrix / (1.0 + mu))
            b5 = Effect(mu * base.matrix)
            c5 = Effect(lam * base.matrix)
            op_a5 = holevo_operation(base, alpha)
            op_b5 = holevo_operation(b5, alpha)
            op_c5 = holevo_operation(c5, alpha)
            hyp1 = commutator(base, c5, op_a5, op_c5, tol).value
            hyp2 = commutator(b5, c5, op_b5, op_c5, tol).value
            rec.case(max_abs(hyp1) <= 1e-10 and max_abs(hyp2) <= 1e-10, f"H5 hypotheses vanish dim={dim} trial={t}")
            e = seq_product(op_a5, b5)
            concl1 = commutator(e, c5, holevo_operation(e, alpha), op_c5, tol).value
            rec.case(max_abs(concl1) <= 1e-9, f"H5 product conclusion dim={dim} trial={t}")
            summed = Effect(base.matrix + b5.matrix)
            concl2 = commutator(summed, c5, holevo_operation(summed, alpha), op_c5, tol).value
            rec.case(max_abs(concl2) <= 1e-9, f"H5 sum conclusion dim={dim} trial={t}")
            # The associativity identity of H4 holds unconditionally.
            x, y, z = (random_effect(dim, g) for _ in range(3))
            op_x = holevo_operation(x, alpha)
            op_y = holevo_operation(y, alpha)
            inner = seq_product(op_y, z)
            lhs_assoc = seq_product(op_x, inner).matrix
            xy = seq_product(op_x, y)
            rhs_assoc = seq_product(holevo_operation(xy, alpha), z).matrix
            rec.case(mat_close(lhs_assoc, rhs_assoc, 1e-9), f"H4 associativity identity dim={dim} trial={t}")

    # Witness searches run at the smallest dimension, mirroring how the failures arise.
    found_h2 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 2)
        alpha, a = random_state(2, g), random_effect(2, g)
        value = seq_product(holevo_operation(identity_effect(2), alpha), a).matrix
        if max_abs(value - a.matrix) > 1e-6:
            found_h2 = (t + 1, {"alpha": alpha, "a": a, "identity_product": value})
            break
    rec.search("H2 fails: identity measured first does not pass the effect through", *(found_h2 or (None,)))

    found_h3 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 3)
        U = random_unitary(2, g)
        phi, psi = U[:, 0], U[:, 1]
        a = Effect(np.outer(phi, phi.conj()))
        alpha = State(np.outer(phi, phi.conj()))
        b = Effect(np.outer(psi, psi.conj()))
        fwd = seq_product(holevo_operation(a, alpha), b).matrix
        back = seq_product(holevo_operation(b, alpha), a).matrix
        if max_abs(fwd) <= 1e-10 and max_abs(back - b.matrix) <= 1e-9 and max_abs(b.matrix) > 0.5:
            found_h3 = (t + 1, {"a": a, "b": b, "alpha": alpha})
            break
    rec.search("H3 fails: orthogonal projections give a one-sided zero product", *(found_h3 or (None,)))

    found_h4 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 4)
        alpha, a = random_state(2, g), random_effect(2, g)
        lam = float(g.uniform(0.2, 1.0))
        b = Effect(lam * a.matrix)
        hyp = commutator(a, b, holevo_operation(a, alpha), holevo_operation(b, alpha), ctx.tol).value
        bp = complement(b)
        concl = commutator(a, bp, holevo_operation(a, alpha), holevo_operation(bp, alpha), ctx.tol).value
        expect_gap = a.matrix - prob(alpha, a) * np.eye(2)
        if max_abs(hyp) <= 1e-10 and max_abs(concl - expect_gap) <= 1e-9 and max_abs(concl) > 1e-6:
            found_h4 = (t + 1, {"alpha": alpha, "a": a, "b": b, "complement_commutator": concl})
            break
    rec.search("H4 first part fails: commuting with b does not give commuting with its complement", *(found_h4 or (None,)))


def _suite_kraus_counterparts(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a = random_effect(dim, g)
            op = kraus_measuring(a, g)
            b = random_effect(dim, g)
            c = _sub_effect(complement(b), g)
            lhs = seq_product(op, Effect(b.matrix + c.matrix)).matrix
            rec.case(
                mat_close(lhs, seq_product(op, b).matrix + seq_product(op, c).matrix, 1e-9),
                f"additivity counterpart dim={dim} trial={t}",
            )
            da, db = _disjoint_pair(dim, g)
            op_a = kraus_measuring(da, g)
            op_b = kraus_measuring(db, g)
            rec.case(
                max_abs(seq_product(op_a, db).matrix) <= 1e-9
                and max_abs(seq_product(op_b, da).matrix) <= 1e-9,
                f"zero-symmetry counterpart on disjoint supports dim={dim} trial={t}",
            )
            rec.case(
                max_abs(commutator(a, zero_effect(dim), op, zero_operation(dim), tol).value) <= tol.eq_tol,
                f"commutator with the zero effect vanishes dim={dim} trial={t}",
            )

    found_l2 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 2)
        K = random_unitary(2, g)
        a = random_effect(2, g)
        twisted = seq_product(kraus_operation(K), a).matrix
        if max_abs(twisted - a.matrix) > 1e-6:
            found_l2 = (t + 1, {"unitary": K, "a": a, "twisted": twisted})
            break
    rec.search("identity counterpart fails: a unitary measuring I twists effects", *(found_l2 or (None,)))

    found_l4 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 4)
        a = random_effect(2, g)
        J = random_unitary(2, g)
        value = a.matrix - dagger(J) @ a.matrix @ J
        if max_abs(value) > 1e-6:
            found_l4 = (t + 1, {"a": a, "unitary": J, "complement_commutator": value})
            break
    rec.search("complement counterpart fails via the zero effect", *(found_l4 or (None,)))

    # Commutant-closure counterpart: search a constructed family at dim 2 where
    # both hypotheses vanish exactly (scalar a and c, diagonal b, diagonal-phase
    # twist on c) and the product conclusion can break.
    found_l5 = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 5)
        s = float(g.uniform(0.05, 0.45))
        tt = float(g.uniform(0.1, 1.0))
        b_diag = g.uniform(0.05, 0.5, 2)
        a = Effect(s * np.eye(2, dtype=np.complex128))
        b = Effect(np.diag(b_diag.astype(np.complex128)))
        c = Effect(tt * np.eye(2, dtype=np.complex128))
        U_a = random_unitary(2, g)
        W_c = np.diag(np.exp(1j * g.uniform(0.0, 2.0 * np.pi, 2)))
        U_b = np.diag(np.exp(1j * g.uniform(0.0, 2.0 * np.pi, 2)))
        op_a = kraus_operation(sqrt_psd(a.matrix) @ U_a)
        op_b = kraus_operation(sqrt_psd(b.matrix) @ U_b)
        op_c = kraus_operation(sqrt_psd(c.matrix) @ W_c)
        hyp1 = commutator(a, c, op_a, op_c, tol).value
        hyp2 = commutator(b, c, op_b, op_c, tol).value
        if max_abs(hyp1) > 1e-10 or max_abs(hyp2) > 1e-10:
            continue
        e = seq_product(op_a, b)
        concl = commutator(e, c, kraus_measuring(e, g), op_c, tol).value
        if max_abs(concl) > 1e-6:
            found_l5 = (t + 1, {"a": a, "b": b, "c": c, "product": e, "conclusion": concl})
            break
    rec.search(
        "commutant-closure counterpart fails on a twisted scalar family",
        *(found_l5 or (None,)),
        required=False,
    )


def _suite_example1(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            c = random_effect(dim, g)
            flavor, op = _measuring_flavors(c, g)[t % 3]
            b = random_effect(dim, g)
            a = _sub_effect(b, g)
            rec.case(
                leq(seq_product(op, a), seq_product(op, b), tol),
                f"one operation is monotone [{flavor}] dim={dim} trial={t}",
            )

    found_two_ops = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 1)
        c = random_effect(2, g)
        a = random_effect(2, g)
        alpha, beta = random_state(2, g), random_state(2, g)
        gap = prob(alpha, a) - prob(beta, a)
        if gap <= 0:
            alpha, beta = beta, alpha
            gap = -gap
        if gap * float(np.linalg.eigvalsh(c.matrix)[-1]) > 1e-6:
            lhs = seq_product(holevo_operation(c, alpha), a)
            rhs = seq_product(holevo_operation(c, beta), a)
            if not leq(lhs, rhs, tol):
                found_two_ops = (t + 1, {"c": c, "a": a, "alpha": alpha, "beta": beta})
                break
    rec.search("monotonicity fails across two operations measuring the same effect", *(found_two_ops or (None,)))

    found_state_dep = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 2)
        a, c = random_effect(2, g), random_effect(2, g)
        alpha, beta = random_state(2, g), random_state(2, g)
        diff = abs(prob(alpha, c) - prob(beta, c)) * max_abs(a.matrix)
        if diff > 1e-6:
            found_state_dep = (t + 1, {"a": a, "c": c, "alpha": alpha, "beta": beta})
            break
    rec.search("the product depends on the preparing state, not just the effects", *(found_state_dep or (None,)))

    found_luders = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 3)
        if t < cfg.trials // 2:
            b = random_effect(2, g)
            a = _sub_effect(b, g)
        else:
            a = _projector(2, g, rank=1)
            b = identity_effect(2)
        c = random_effect(2, g)
        gap = _luders_prod(b, c) - _luders_prod(a, c)
        if float(np.linalg.eigvalsh(gap)[0]) < -1e-8:
            found_luders = (t + 1, {"a": a, "b": b, "c": c})
            break
    rec.search("square-root products are not monotone in the first factor", *(found_luders or (None,)))


def _suite_example2(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a, b, c = _co_diagonal(dim, g, 3)
            prod = Effect(_luders_prod(a, b))
            all_luders = commutator(c, prod, luders_operation(c), luders_operation(prod), tol).value
            rec.case(max_abs(all_luders) <= 1e-9, f"all square-root case vanishes dim={dim} trial={t}")
            # Mixed case: last operation replaced by measure-and-reprepare.
            alpha = random_state(dim, g)
            mixed = commutator(c, prod, luders_operation(c), holevo_operation(prod, alpha), tol).value
            closed = (c.matrix - prob(alpha, c) * np.eye(dim)) @ prod.matrix
            rec.case(mat_close(mixed, closed, 1e-9), f"mixed case closed form dim={dim} trial={t}")
            scalar_c = Effect(float(g.uniform(0.1, 1.0)) * np.eye(dim, dtype=np.complex128))
            vanish1 = commutator(scalar_c, prod, luders_operation(scalar_c), holevo_operation(prod, alpha), tol).value
            rec.case(max_abs(vanish1) <= 1e-9, f"mixed case vanishes for scalar first factor dim={dim} trial={t}")
            da, db = _disjoint_pair(dim, g)
            zero_prod = Effect(_luders_prod(da, db))
            vanish2 = commutator(c, zero_prod, luders_operation(c), holevo_operation(zero_prod, alpha), tol).value
            rec.case(max_abs(vanish2) <= 1e-9, f"mixed case vanishes for zero product dim={dim} trial={t}")
            # All measure-and-reprepare: proportional family satisfies both hypotheses.
            mu, lam = float(g.uniform(0.2, 1.0)), float(g.uniform(0.2, 1.0))
            base = random_effect(dim, g)
            bb, cc = Effect(mu * base.matrix), Effect(lam * base.matrix)
            delta = random_state(dim, g)
            op_i = holevo_operation(cc, alpha)
            op_j = holevo_operation(base, alpha)
            op_k = holevo_operation(bb, alpha)
            hyp1 = commutator(cc, base, op_i, op_j, tol).value
            hyp2 = commutator(cc, bb, op_i, op_k, tol).value
            rec.case(max_abs(hyp1) <= 1e-10 and max_abs(hyp2) <= 1e-10, f"reprepare hypotheses vanish dim={dim} trial={t}")
            e = seq_product(op_j, bb)
            value = commutator(cc, e, op_i, holevo_operation(e, delta), tol).value
            closed_h = prob(alpha, bb) * (prob(alpha, cc) - prob(delta, cc)) * base.matrix
            rec.case(mat_close(value, closed_h, 1e-9), f"reprepare closed form dim={dim} trial={t}")
            same_delta = commutator(cc, e, op_i, holevo_operation(e, alpha), tol).value
            rec.case(max_abs(same_delta) <= 1e-9, f"reprepare vanishes for matching states dim={dim} trial={t}")

    found = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 9)
        a, b, c = _co_diagonal(2, g, 3)
        alpha = random_state(2, g)
        prod = Effect(_luders_prod(a, b))
        value = commutator(c, prod, luders_operation(c), holevo_operation(prod, alpha), tol).value
        if max_abs(value) > 1e-6:
            found = (t + 1, {"a": a, "b": b, "c": c, "alpha": alpha, "value": value})
            break
    rec.search("the commutator with a sequential product need not vanish", *(found or (None,)))


def _suite_example3(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            specs = [g.uniform(0.0, 0.5, dim), g.uniform(0.0, 0.5, dim), g.uniform(0.0, 1.0, dim)]
            a, b, c = _basis_effects(dim, g, specs)
            summed = Effect(a.matrix + b.matrix)
            all_luders = commutator(c, summed, luders_operation(c), luders_operation(summed), tol).value
            rec.case(max_abs(all_luders) <= 1e-9, f"all square-root case vanishes dim={dim} trial={t}")
            # Proportional measure-and-reprepare family.
            mu = float(g.uniform(0.2, 1.0))
            lam = float(g.uniform(0.2, 1.0))
            base = Effect(random_effect(dim, g).matrix / (1.0 + mu))
            bb, cc = Effect(mu * base.matrix), Effect(lam * base.matrix)
            alpha, delta = random_state(dim, g), random_state(dim, g)
            op_i = holevo_operation(cc, alpha)
            hyp1 = commutator(cc, base, op_i, holevo_operation(base, alpha), tol).value
            hyp2 = commutator(cc, bb, op_i, holevo_operation(bb, alpha), tol).value
            rec.case(max_abs(hyp1) <= 1e-10 and max_abs(hyp2) <= 1e-10, f"hypotheses vanish dim={dim} trial={t}")
            total = Effect(base.matrix + bb.matrix)
            value = commutator(cc, total, op_i, holevo_operation(total, delta), tol).value
            gap = prob(alpha, cc) - prob(delta, cc)
            closed = gap * base.matrix + gap * bb.matrix
            rec.case(mat_close(value, closed, 1e-9), f"sum closed form dim={dim} trial={t}")
            same = commutator(cc, total, op_i, holevo_operation(total, alpha), tol).value
            rec.case(max_abs(same) <= 1e-9, f"vanishes for matching states dim={dim} trial={t}")

    found = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 9)
        mu, lam = float(g.uniform(0.2, 1.0)), float(g.uniform(0.2, 1.0))
        base = Effect(random_effect(2, g).matrix / (1.0 + mu))
        bb, cc = Effect(mu * base.matrix), Effect(lam * base.matrix)
        alpha, delta = random_state(2, g), random_state(2, g)
        total = Effect(base.matrix + bb.matrix)
        value = commutator(cc, total, holevo_operation(cc, alpha), holevo_operation(total, delta), ctx.tol).value
        if max_abs(value) > 1e-6:
            found = (t + 1, {"a": base, "b": bb, "c": cc, "alpha": alpha, "delta": delta, "value": value})
            break
    rec.search("the commutator with a statistical sum need not vanish", *(found or (None,)))


def _example4_objects(ctx: _Ctx):
    objs = ctx.objects
    a = objs.get("a") or Effect(np.diag([1.0, 0.5]).astype(np.complex128))
    b = objs.get("b") or Effect(np.diag([0.0, 1.0]).astype(np.complex128))
    op_a = objs.get("op_a") or kraus_operation(np.diag([1.0, 2.0**-0.5]).astype(np.complex128))
    op_b = objs.get("op_b") or kraus_operation(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128))
    return a, b, op_a, op_b


def _suite_example4(ctx: _Ctx) -> None:
    rec, tol = ctx.rec, ctx.tol
    a, b, op_a, op_b = _example4_objects(ctx)
    rec.case(mat_close(measured_effect(op_a).matrix, a.matrix, 1e-12), "first operation measures its effect")
    rec.case(mat_close(measured_effect(op_b).matrix, b.matrix, 1e-12), "second operation measures its effect")
    rec.case(_comm_norm(a.matrix, b.matrix) <= 1e-12, "the two effects commute as operators")
    rec.case(is_sharp(b, tol) and not is_sharp(a, tol), "exactly one factor is a projection")
    value = commutator(a, b, op_a, op_b, tol)
    expected = np.diag([0.0, -0.5]).astype(np.complex128)
    rec.case(mat_close(value.value, expected, 1e-12), "fixed-instance commutator value")
    rec.case(not value.vanishes, "the relative commutator does not vanish")
    rec.note("noncommuting-instance", {"value": value.value, "a": a, "b": b})


def _suite_thm31(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    flavors = ("luders", "kraus", "holevo", "luders-sharp", "holevo-fixedpoint")
    for dim in cfg.dims:
        zero_op = zero_operation(dim)
        verdicts = [is_repeatable(zero_effect(dim), zero_op, crit, tol, rng=ctx.rng(dim, 0)) for crit in REPEATABILITY_CRITERIA]
        rec.case(len(set(verdicts)) == 1 and verdicts[0], f"criteria agree on the zero effect dim={dim}")
        for fi, flavor in enumerate(flavors):
            count = cfg.trials if fi < 3 else max(1, cfg.trials // 4)
            for t in range(count):
                g = ctx.rng(dim, fi + 1, t)
                if flavor == "luders":
                    a = random_effect(dim, g)
                    op = luders_operation(a)
                elif flavor == "kraus":
                    a = random_effect(dim, g)
                    op = kraus_measuring(a, g)
                elif flavor == "holevo":
                    a = random_effect(dim, g)
                    op = holevo_operation(a, random_state(dim, g))
                elif flavor == "luders-sharp":
                    a = _projector(dim, g)
                    op = luders_operation(a)
                else:
                    a, psi = _effect_with_unit_eigenvalue(dim, g)
                    op = holevo_operation(a, State(np.outer(psi, psi.conj())))
                verdicts = [
                    is_repeatable(a, op, crit, tol, rng=ctx.rng(dim, fi + 1, t, ci))
                    for ci, crit in enumerate(REPEATABILITY_CRITERIA)
                ]
                ok = len(set(verdicts)) == 1
                rec.case(ok, f"criteria agree [{flavor}] dim={dim} trial={t}", None if ok else {"a": a, "op": op})


def _suite_thm32(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a, psi = _effect_with_unit_eigenvalue(dim, g)
            rec.case(has_eigenvalue_one(a, tol), f"constructed effect reaches eigenvalue one dim={dim} trial={t}")
            op = holevo_operation(a, State(np.outer(psi, psi.conj())))
            rec.case(
                max_abs(seq_product(op, a).matrix - a.matrix) <= 1e-10,
                f"eigenvector repreparation is repeatable dim={dim} trial={t}",
            )
            capped = _effect_capped(dim, g)
            rec.case(not has_eigenvalue_one(capped, tol), f"capped effect misses eigenvalue one dim={dim} trial={t}")
            dec_top = np.linalg.eigh(capped.matrix)[1][:, -1]
            ops = [
                luders_operation(capped),
                kraus_measuring(capped, g),
                holevo_operation(capped, State(np.outer(dec_top, dec_top.conj()))),
                holevo_operation(capped, random_state(dim, g)),
            ]
            rec.case(
                all(not is_repeatable(capped, op_k, "def", tol) for op_k in ops),
                f"capped effect is never repeatable dim={dim} trial={t}",
            )
        sharp = _projector(dim, ctx.rng(dim, 7001))
        rec.case(
            is_repeatable(sharp, luders_operation(sharp), "def", tol) and has_eigenvalue_one(sharp, tol),
            f"projections are repeatable and reach one dim={dim}",
        )
        rec.case(
            is_repeatable(zero_effect(dim), zero_operation(dim), "def", tol),
            f"the zero effect is repeatable dim={dim}",
        )


def _suite_thm33(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            sharp = _projector(dim, g)
            rec.case(
                is_repeatable(sharp, kraus_measuring(sharp, g), "def", tol),
                f"sharp effects are single-Kraus repeatable dim={dim} trial={t}",
            )
            soft = _effect_capped(dim, g, cap=0.95)
            rec.case(
                not is_repeatable(soft, kraus_measuring(soft, g), "def", tol),
                f"unsharp effects are not single-Kraus repeatable dim={dim} trial={t}",
            )
            # Repreparation criterion both ways: support inside vs. outside the
            # fixed-point eigenspace of the effect.
            g2 = ctx.rng(dim, t, 2)
            V = random_unitary(dim, g2)
            k = 1 if dim == 2 else int(g2.integers(1, dim - 1))
            spectrum = np.concatenate([np.ones(k), g2.uniform(0.0, 0.8, dim - k)])
            a = Effect(V @ np.diag(spectrum.astype(np.complex128)) @ dagger(V))
            inside = random_state(k, g2)
            alpha_in = State(V[:, :k] @ inside.matrix @ dagger(V[:, :k]))
            op_in = holevo_operation(a, alpha_in)
            rec.case(
                is_repeatable(a, op_in, "def", tol),
                f"supported repreparation is repeatable dim={dim} trial={t}",
            )
            avals, avecs = np.linalg.eigh(alpha_in.matrix)
            fixed = all(
                np.linalg.norm(a.matrix @ avecs[:, i] - avecs[:, i]) <= 1e-8
                for i in range(dim)
                if avals[i] > tol.psd_tol
            )
            rec.case(fixed, f"supported state lives in the fixed-point eigenspace dim={dim} trial={t}")
            leak = np.outer(V[:, -1], V[:, -1].conj())
            alpha_out = State(0.7 * alpha_in.matrix + 0.3 * leak)
            rec.case(
                not is_repeatable(a, holevo_operation(a, alpha_out), "def", tol),
                f"leaking repreparation is not repeatable dim={dim} trial={t}",
            )


def _suite_thm34(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a, b = _co_diagonal(dim, g, 2)
            fixed = condition_effect(b, luders_operation(a), luders_operation(complement(a)), tol)
            rec.case(mat_close(fixed.matrix, b.matrix, 1e-9), f"commuting pair conditions transparently dim={dim} trial={t}")
            sharp = _projector(dim, g)
            b0 = random_effect(dim, g)
            pinched = Effect(
                sharp.matrix @ b0.matrix @ sharp.matrix
                + complement(sharp).matrix @ b0.matrix @ complement(sharp).matrix
            )
            again = condition_effect(pinched, luders_operation(sharp), luders_operation(complement(sharp)), tol)
            rec.case(
                mat_close(again.matrix, pinched.matrix, 1e-10),
                f"pinched effects are conditioning fixed points dim={dim} trial={t}",
            )
            rec.case(
                _comm_norm(sharp.matrix, pinched.matrix) <= 1e-8,
                f"fixed points commute with the sharp effect dim={dim} trial={t}",
            )
            # Quantitative converse: for a projection the conditioning defect and the
            # commutator share off-diagonal blocks, hence equal Frobenius norms.
            free = random_effect(dim, g)
            conditioned = condition_effect(free, luders_operation(sharp), luders_operation(complement(sharp)), tol)
            defect = float(np.linalg.norm(conditioned.matrix - free.matrix))
            comm = float(np.linalg.norm(sharp.matrix @ free.matrix - free.matrix @ sharp.matrix))
            rec.case(abs(defect - comm) <= 1e-10, f"conditioning defect equals the commutator norm dim={dim} trial={t}")


def _suite_conditioning(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            a = random_effect(dim, g)
            a_prime = complement(a)
            pair_kind = t % 3
            if pair_kind == 0:
                op1, op2 = luders_operation(a), luders_operation(a_prime)
            elif pair_kind == 1:
                U, V = commuting_unitary(a, g), commuting_unitary(a_prime, g)
                op1 = kraus_operation(sqrt_psd(a.matrix) @ U)
                op2 = kraus_operation(sqrt_psd(a_prime.matrix) @ V)
            else:
                op1 = holevo_operation(a, random_state(dim, g))
                op2 = holevo_operation(a_prime, random_state(dim, g))
            b = random_effect(dim, g)
            cond_b = condition_effect(b, op1, op2, tol, a=a)
            cond_b_prime = condition_effect(complement(b), op1, op2, tol)
            rec.case(
                mat_close(cond_b.matrix + cond_b_prime.matrix, np.eye(dim), 1e-9),
                f"conditioned complements sum to identity dim={dim} trial={t}",
            )
            rec.case(
                mat_close(condition_effect(identity_effect(dim), op1, op2, tol).matrix, np.eye(dim), 1e-9),
                f"conditioning fixes the identity dim={dim} trial={t}",
            )
            c = _sub_effect(complement(b), g)
            rec.case(
                mat_close(
                    condition_effect(Effect(b.matrix + c.matrix), op1, op2, tol).matrix,
                    cond_b.matrix + condition_effect(c, op1, op2, tol).matrix,
                    1e-9,
                ),
                f"conditioning is additive dim={dim} trial={t}",
            )
            if pair_kind == 1:
                closed = (
                    sqrt_psd(a.matrix) @ dagger(U) @ b.matrix @ U @ sqrt_psd(a.matrix)
                    + sqrt_psd(a_prime.matrix) @ dagger(V) @ b.matrix @ V @ sqrt_psd(a_prime.matrix)
                )
                rec.case(mat_close(cond_b.matrix, closed, 1e-10), f"single-Kraus closed form dim={dim} trial={t}")
                self_cond = condition_effect(a, op1, op2, tol)
                rec.case(
                    mat_close(self_cond.matrix, a.matrix, 1e-9),
                    f"twisted square-root pairs condition their effect to itself dim={dim} trial={t}",
                )
            if pair_kind == 2:
                alpha, beta = op1.alpha, op2.alpha
                closed = prob(alpha, b) * a.matrix + prob(beta, b) * a_prime.matrix
                rec.case(mat_close(cond_b.matrix, closed, 1e-9), f"reprepare closed form dim={dim} trial={t}")
                rearranged = (prob(alpha, b) - prob(beta, b)) * a.matrix + prob(beta, b) * np.eye(dim)
                rec.case(mat_close(cond_b.matrix, rearranged, 1e-9), f"reprepare rearranged form dim={dim} trial={t}")
                shared = condition_effect(b, op1, holevo_operation(a_prime, alpha), tol)
                rec.case(
                    mat_close(shared.matrix, prob(alpha, b) * np.eye(dim), 1e-9),
                    f"shared-state conditioning is scalar dim={dim} trial={t}",
                )

    found_self = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 8)
        a = random_effect(2, g)
        alpha, beta = random_state(2, g), random_state(2, g)
        cond = condition_effect(a, holevo_operation(a, alpha), holevo_operation(complement(a), beta), tol)
        if max_abs(cond.matrix - a.matrix) > 1e-6:
            found_self = (t + 1, {"a": a, "alpha": alpha, "beta": beta, "conditioned": cond})
            break
    rec.search("repreparation interferes with a repeat of the same effect", *(found_self or (None,)))

    found_channel = None
    for t in range(cfg.trials):
        g = ctx.rng(2, t, 9)
        U = random_unitary(2, g)
        b = random_effect(2, g)
        cond = condition_effect(b, kraus_operation(U), zero_operation(2), tol)
        if max_abs(cond.matrix - b.matrix) > 1e-6:
            found_channel = (t + 1, {"unitary": U, "b": b, "conditioned": cond})
            break
    rec.search("conditioning on the identity effect can still disturb", *(found_channel or (None,)))


def _suite_obs_marginals(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    trials = max(1, cfg.trials // 10)
    for dim in cfg.dims:
        for t in range(trials):
            g = ctx.rng(dim, t)
            n1 = int(g.integers(3, 5))
            n2 = int(g.integers(2, 4))
            A = random_observable(dim, n1, g)
            B = random_observable(dim, n2, g)
            for flavor, instr in _instrument_flavors(A, g):
                bi = seq_product_obs(instr, B)
                measured = measured_observable(instr)
                first = marginal(bi, "first")
                ok_first = all(
                    mat_close(e.matrix, f.matrix, 1e-10) for e, f in zip(first.effects, measured.effects)
                )
                rec.case(ok_first, f"first marginal is the measured observable [{flavor}] dim={dim} trial={t}")
                conditioned = conditioned_obs(B, instr)
                second = marginal(bi, "second")
                ok_second = all(
                    mat_close(e.matrix, f.matrix, 1e-10) for e, f in zip(second.effects, conditioned.effects)
                )
                rec.case(ok_second, f"second marginal is the conditioned observable [{flavor}] dim={dim} trial={t}")
                rec.case(
                    coexist_via_joint(bi, measured, conditioned, tol),
                    f"joint observable certifies coexistence [{flavor}] dim={dim} trial={t}",
                )
                rec.case(is_channel(total_channel(instr), tol), f"total operation is a channel [{flavor}] dim={dim} trial={t}")
            trivial = trivial_observable(dim)
            bi_triv = seq_product_obs(luders_instrument(A), trivial)
            first_triv = marginal(bi_triv, "first")
            rec.case(
                all(mat_close(e.matrix, f.matrix, 1e-10) for e, f in zip(first_triv.effects, A.effects)),
                f"trivial second factor returns the first observable dim={dim} trial={t}",
            )


def _suite_obs_distribution(ctx: _Ctx) -> None:
    cfg, rec = ctx.cfg, ctx.rec
    trials = max(1, cfg.trials // 5)
    for dim in cfg.dims:
        for t in range(trials):
            g = ctx.rng(dim, t)
            n = int(g.integers(2, 5))
            A = random_observable(dim, n, g)
            rho = random_state(dim, g)
            probs = distribution(rho, A)
            rec.case(
                abs(sum(p for _, p in probs) - 1.0) <= 1e-9 and all(p >= -1e-9 for _, p in probs),
                f"observable distribution is a probability distribution dim={dim} trial={t}",
            )
            flavor, instr = _instrument_flavors(A, g)[t % 3]
            iprobs = instrument_distribution(rho, instr)
            rec.case(
                abs(sum(p for _, p in iprobs) - 1.0) <= 1e-9,
                f"instrument distribution normalizes [{flavor}] dim={dim} trial={t}",
            )
            agree = all(abs(pa - pi) <= 1e-9 for (_, pa), (_, pi) in zip(probs, iprobs))
            rec.case(agree, f"instrument reproduces the observable statistics [{flavor}] dim={dim} trial={t}")
            labels = list(A.outcomes)
            k = int(g.integers(0, n + 1))
            delta = labels[:k]
            rest = labels[k:]
            rec.case(
                mat_close(
                    subset_effect(A, delta).matrix + subset_effect(A, rest).matrix,
                    np.eye(dim),
                    1e-10,
                ),
                f"subset effects are additive to the identity dim={dim} trial={t}",
            )


def _suite_post_processing(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    trials = max(1, cfg.trials // 5)
    found_nonsharp = None
    for dim in cfg.dims:
        for t in range(trials):
            g = ctx.rng(dim, t)
            n1 = int(g.integers(2, min(dim, 3) + 1))
            n2 = int(g.integers(2, 4))
            A_sharp = random_sharp_observable(dim, n1, g)
            B = random_observable(dim, n2, g)
            alphas = [random_state(dim, g) for _ in A_sharp.outcomes]
            T = transition_matrix(B, alphas)
            rec.case(
                bool(np.all(T >= -1e-9) and np.all(T <= 1.0 + 1e-9) and np.all(np.abs(T.sum(axis=1) - 1.0) <= 1e-9)),
                f"transition matrix is row-stochastic dim={dim} trial={t}",
            )
            instr = holevo_instrument(A_sharp, alphas)
            conditioned = conditioned_obs(B, instr)
            ok_post = all(
                mat_close(
                    e.matrix,
                    sum(T[i, j] * A_sharp.effects[i].matrix for i in range(n1)),
                    1e-10,
                )
                for j, e in enumerate(conditioned.effects)
            )
            rec.case(ok_post, f"conditioning equals post-processing by the transition matrix dim={dim} trial={t}")
            commuting = all(
                _comm_norm(e.matrix, f.matrix) <= 1e-8 for e in conditioned.effects for f in A_sharp.effects
            )
            rec.case(commuting, f"sharp first observable gives commuting conditioned effects dim={dim} trial={t}")
            bi = seq_product_obs(instr, B)
            rec.case(
                coexist_via_joint(bi, measured_observable(instr), conditioned, tol),
                f"post-processed observable coexists with the measured one dim={dim} trial={t}",
            )
            if found_nonsharp is None:
                A_soft = random_observable(dim, n1, g)
                instr_soft = holevo_instrument(A_soft, alphas)
                cond_soft = conditioned_obs(B, instr_soft)
                worst = max(
                    _comm_norm(e.matrix, f.matrix) for e in cond_soft.effects for f in A_soft.effects
                )
                if worst > 1e-6:
                    found_nonsharp = (t + 1, {"A": A_soft, "B": B, "conditioned": cond_soft})
    rec.search(
        "unsharp first observables can give non-commuting conditioned effects",
        *(found_nonsharp or (None,)),
        required=False,
    )


def _suite_stats_identities(ctx: _Ctx) -> None:
    cfg, rec, tol = ctx.cfg, ctx.rec, ctx.tol
    trials = max(1, cfg.trials // 5)
    for dim in cfg.dims:
        binary = Observable((0.0, 1.0), random_observable(dim, 2, ctx.rng(dim, 0)).effects)
        rec.case(
            mat_close(stochastic_operator(binary).matrix, binary.effects[1].matrix, 1e-12),
            f"binary observable reduces to its one-effect dim={dim}",
        )
        cval = 0.75
        rec.case(
            mat_close(
                stochastic_operator(Observable((cval,), (identity_effect(dim),))).matrix,
                cval * np.eye(dim),
                1e-12,
            ),
            f"trivial observable has scalar stochastic operator dim={dim}",
        )
        for t in range(trials):
            g = ctx.rng(dim, t + 1)
            B = _random_real_observable(dim, int(g.integers(2, 5)), g)
            C = _random_real_observable(dim, int(g.integers(2, 4)), g)
            rho = random_state(dim, g)
            Bt = stochastic_operator(B)
            Ct = stochastic_operator(C)
            xs = np.asarray([float(x) for x in B.outcomes])
            vals = np.linalg.eigvalsh(Bt.matrix)
            rec.case(
                vals[0] >= xs.min() - 1e-9 and vals[-1] <= xs.max() + 1e-9,
                f"stochastic operator spectrum is outcome-bounded dim={dim} trial={t}",
            )
            rec.case(
                abs(correlation(rho, Bt, Ct) - np.conj(correlation(rho, Ct, Bt))) <= 1e-12,
                f"correlation is conjugate-symmetric dim={dim} trial={t}",
            )
            rec.case(
                abs(covariance(rho, Bt, Ct) - covariance(rho, Ct, Bt)) <= 1e-12,
                f"covariance is symmetric dim={dim} trial={t}",
            )
            rec.case(
                abs(correlation(rho, Bt, Bt).imag) <= 1e-12 and variance(rho, Bt) >= 0.0,
                f"self-correlation is a nonnegative variance dim={dim} trial={t}",
            )
            A = random_observable(dim, int(g.integers(2, 4)), g)
            for flavor, instr in _instrument_flavors(A, g):
                S = conditioned_stochastic(B, instr)
                after = apply(total_channel(instr), rho)
                rec.case(
                    abs(expectation(rho, S) - float(np.trace(after @ Bt.matrix).real)) <= 1e-9,
                    f"conditioned expectation matches the post-channel form [{flavor}] dim={dim} trial={t}",
                )
            # Square-root instrument closed form, and its sharp-case commutator shape.
            sharp = random_sharp_observable(dim, int(g.integers(2, min(dim, 3) + 1)), g)
            instr_sharp = luders_instrument(sharp)
            S_B = conditioned_stochastic(B, instr_sharp).matrix
            S_C = conditioned_stochastic(C, instr_sharp).matrix
            closed = sum(
                sqrt_psd(e.matrix) @ Bt.matrix @ sqrt_psd(e.matrix) for e in sharp.effects
            )
            rec.case(mat_close(S_B, closed, 1e-10), f"square-root conditioned closed form dim={dim} trial={t}")
            reduced = sum(
                e.matrix @ (Bt.matrix @ e.matrix @ Ct.matrix - Ct.matrix @ e.matrix @ Bt.matrix) @ e.matrix
                for e in sharp.effects
            )
            rec.case(
                mat_close(S_B @ S_C - S_C @ S_B, reduced, 1e-9),
                f"sharp-case commutator reduction dim={dim} trial={t}",
            )
            # Measure-and-reprepare closed form and the shared-state collapse.
            alphas = [random_state(dim, g) for _ in A.outcomes]
            instr_h = holevo_instrument(A, alphas)
            S_h = conditioned_stochastic(B, instr_h).matrix
            closed_h = sum(
                float(np.trace(al.matrix @ Bt.matrix).real) * e.matrix
                for al, e in zip(alphas, A.effects)
            )
            rec.case(mat_close(S_h, closed_h, 1e-10), f"reprepare conditioned closed form dim={dim} trial={t}")
            exp_h = sum(
                prob(rho, e) * float(np.trace(al.matrix @ Bt.matrix).real)
                for al, e in zip(alphas, A.effects)
            )
            rec.case(
                abs(expectation(rho, S_h) - exp_h) <= 1e-9,
                f"reprepare conditioned expectation form dim={dim} trial={t}",
            )
            shared = random_state(dim, g)
            instr_shared = holevo_instrument(A, [shared] * len(A.outcomes))
            S_shared = conditioned_stochastic(B, instr_shared)
            mean = float(np.trace(shared.matrix @ Bt.matrix).real)
            exps = [expectation(random_state(dim, ctx.rng(dim, t + 1, 40 + k)), S_shared) for k in range(20)]
            rec.case(
                all(abs(e - mean) <= 1e-9 for e in exps),
                f"shared-state conditioning is preparation-independent dim={dim} trial={t}",
            )
            rec.case(
                variance(rho, S_shared) <= 1e-9,
                f"shared-state conditioned operator is dispersion-free dim={dim} trial={t}",
            )
            if t == 0:
                printed = float(
                    np.trace(shared.matrix @ Bt.matrix @ shared.matrix @ Bt.matrix).real
                ) - mean**2
                by_definition = variance(rho, S_shared)
                rec.note(
                    "shared-state variance forms",
                    {
                        "squared-product-form": printed,
                        "stochastic-operator-form": by_definition,
                        "agree": bool(abs(printed - by_definition) <= 1e-9),
                    },
                )
            rep = conditioned_stats(rho, B, B, instr_h)
            rec.case(
                abs(rep.correlation.imag) <= 1e-10 and abs(rep.correlation.real - rep.variance_s) <= 1e-9,
                f"conditioned stats degenerate correctly on equal observables dim={dim} trial={t}",
            )


def _suite_uncertainty(ctx: _Ctx) -> None:
    cfg, rec = ctx.cfg, ctx.rec
    from .linalg import random_hermitian

    for dim in cfg.dims:
        for t in range(cfg.trials):
            g = ctx.rng(dim, t)
            rho = random_state(dim, g)
            S = random_hermitian(dim, g)
            T = random_hermitian(dim, g)
            rep = uncertainty_report(rho, S, T)
            rec.case(
                rep.correlation_sq <= rep.bound + 1e-9,
                f"squared correlation is bounded by the variance product dim={dim} trial={t}",
            )
            joint = complex(np.trace(rho.matrix @ S @ T))
            rec.case(
                abs(rep.correlation_sq - (rep.covariance**2 + joint.imag**2)) <= 1e-9,
                f"correlation splits into covariance and antisymmetric parts dim={dim} trial={t}",
            )
            rec.case(
                abs(rep.commutator_term - 4.0 * joint.imag**2) <= 1e-9,
                f"commutator magnitude is four antisymmetric squares dim={dim} trial={t}",
            )
            self_rep = uncertainty_report(rho, S, S)
            rec.case(
                abs(self_rep.correlation_sq - self_rep.bound) <= 1e-9,
                f"equal operators saturate the bound dim={dim} trial={t}",
            )
    # Saturating fixed instance: a basis state with the two anticommuting spin axes.
    sx = np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    ground = State(np.diag([1.0, 0.0]).astype(np.complex128))
    rep = uncertainty_report(ground, sx, sy)
    rec.case(abs(rep.correlation_sq - 1.0) <= 1e-12, "fixed instance has unit squared correlation")
    rec.case(abs(rep.bound - 1.0) <= 1e-12, "fixed instance has unit variance product")
    rec.case(abs(rep.commutator_term - 4.0) <= 1e-12, "fixed instance records commutator magnitude four")
    rec.case(abs(rep.covariance) <= 1e-12, "fixed instance has zero covariance")
    rec.note("saturating-instance", {"report": rep})


@dataclass(frozen=True)
class _SuiteDef:
    name: str
    claim: str
    kind: str
    run: Callable[[_Ctx], None]


_REGISTRY: tuple[_SuiteDef, ...] = (
    _SuiteDef(
        "duality",
        "The dual of an operation satisfies tr[rho I*(b)] = tr[I(rho) b] for all states and effects.",
        "theorem",
        _suite_duality,
    ),
    _SuiteDef(
        "seqprod-laws",
        "Sequential products fix the identity and zero, are additive and convex in the "
        "second factor, stay below the first factor, and split over complements.",
        "theorem",
        _suite_seqprod_laws,
    ),
    _SuiteDef(
        "luders-L1-L5",
        "The square-root product is additive, has a left identity, symmetrizes zero "
        "products, is associative on commuting pairs, and preserves commutants; its "
        "relative commutator vanishes exactly on operator-commuting pairs.",
        "theorem",
        _suite_luders,
    ),
    _SuiteDef(
        "thm-2.1",
        "For measure-and-reprepare products sharing one prepared state: additivity and "
        "commutant closure hold, the identity and zero-symmetry conditions fail, the "
        "complement half of the commuting condition fails, and its associativity "
        "identity always holds.",
        "theorem",
        _suite_thm21,
    ),
    _SuiteDef(
        "kraus-counterparts",
        "Single-Kraus products keep additivity and zero-symmetry, but a unitary "
        "measuring the identity can twist effects, the complement condition fails "
        "through the zero effect, and commutant closure admits counterexamples.",
        "theorem",
        _suite_kraus_counterparts,
    ),
    _SuiteDef(
        "example-1",
        "Ordering a <= b survives one fixed measuring operation but not a change of "
        "operation, including between two square-root updates.",
        "witness",
        _suite_example1,
    ),
    _SuiteDef(
        "example-2",
        "Commutators vanishing against two factors need not vanish against their "
        "sequential product once different operation families mix.",
        "witness",
        _suite_example2,
    ),
    _SuiteDef(
        "example-3",
        "Commutators vanishing against two summands need not vanish against their "
        "statistical sum for measure-and-reprepare operations.",
        "witness",
        _suite_example3,
    ),
    _SuiteDef(
        "example-4",
        "Two commuting 2x2 effects measured by single-Kraus operations have relative "
        "commutator diag(0, -1/2), which does not vanish.",
        "theorem",
        _suite_example4,
    ),
    _SuiteDef(
        "thm-3.1",
        "Five characterizations of repeatability (dual fixed point, vanishing "
        "complement product, vanishing products below the complement, dominated "
        "duals, and twice-applied trace stability) agree on every instance.",
        "theorem",
        _suite_thm31,
    ),
    _SuiteDef(
        "thm-3.2",
        "An effect is repeatable by some operation exactly when it is zero or has "
        "eigenvalue one; repreparing a unit eigenvector realizes it.",
        "theorem",
        _suite_thm32,
    ),
    _SuiteDef(
        "thm-3.3",
        "Single-Kraus repeatability is equivalent to sharpness; repreparation "
        "repeatability is equivalent to the prepared state living in the unit "
        "eigenspace of the effect.",
        "theorem",
        _suite_thm33,
    ),
    _SuiteDef(
        "thm-3.4",
        "Conditioning by square-root updates is transparent on commuting pairs, and "
        "for a sharp effect the conditioning defect has exactly the commutator's size.",
        "theorem",
        _suite_thm34,
    ),
    _SuiteDef(
        "conditioning-laws",
        "Conditioning is an additive morphism fixing the identity, respects "
        "complements, has closed single-Kraus and repreparation forms, and can "
        "disturb even a repeat of the measured effect.",
        "theorem",
        _suite_conditioning,
    ),
    _SuiteDef(
        "obs-marginals",
        "The first marginal of a sequential product of observables is the measured "
        "observable and the second marginal is the conditioned observable, for all "
        "three instrument families.",
        "theorem",
        _suite_obs_marginals,
    ),
    _SuiteDef(
        "obs-distribution",
        "Observable and instrument outcome statistics are probability distributions "
        "and agree whenever the instrument measures the observable.",
        "theorem",
        _suite_obs_distribution,
    ),
    _SuiteDef(
        "post-processing",
        "Conditioning on a measure-and-reprepare instrument is post-processing by a "
        "row-stochastic transition matrix, and sharp first observables yield "
        "commuting, coexisting conditioned effects.",
        "theorem",
        _suite_post_processing,
    ),
    _SuiteDef(
        "stats-identities",
        "Stochastic-operator statistics obey their defining identities, the "
        "conditioned closed forms for all instrument families, and the shared-state "
        "collapse to preparation-independent values.",
        "theorem",
        _suite_stats_identities,
    ),
    _SuiteDef(
        "uncertainty",
        "The squared correlation never exceeds the product of variances and equals "
        "the squared covariance plus one quarter of the squared commutator trace.",
        "theorem",
        _suite_uncertainty,
    ),
)

_BY_NAME = {s.name: (i, s) for i, s in enumerate(_REGISTRY)}


def list_suites() -> list[tuple[str, str]]:
    """Registered suite names with the claims they check."""
    return [(s.name, s.claim) for s in _REGISTRY]


def run_suite(name: str, cfg: TrialConfig | None = None, objects: dict | None = None) -> SuiteReport:
    """Run one named suite; deterministic for a fixed configuration."""
    if name not in _BY_NAME:
        raise UnknownSuite(f"no suite named {name!r}; see list_suites()")
    index, suite = _BY_NAME[name]
    cfg = cfg or TrialConfig()
    rec = _Recorder()
    suite.run(_Ctx(cfg, rec, index, objects))
    return rec.report(suite.name, suite.claim, suite.kind)


def run_all(cfg: TrialConfig | None = None, parallel: bool = False) -> list[SuiteReport]:
    """Run every registered suite in registry order.

    With ``parallel`` the suites run on worker threads; each one derives its
    randomness from (seed, suite index) alone, so the merged reports are
    byte-identical to a sequential run.
    """
    cfg = cfg or TrialConfig()
    if not parallel:
        return [run_suite(s.name, cfg) for s in _REGISTRY]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=min(8, len(_REGISTRY))) as pool:
        futures = [pool.submit(run_suite, s.name, cfg) for s in _REGISTRY]
        return [f.result() for f in futures]


def run_scenario(scenario, cfg: TrialConfig | None = None) -> list[SuiteReport]:
    """Run the checks of a loaded scenario, binding its named objects into the suites."""
    base = cfg or TrialConfig()
    reports = []
    for check in scenario.checks:
        overrides = dict(check.overrides)
        merged = TrialConfig(
            dim=int(overrides.pop("dim", base.dim)),
            trials=int(overrides.pop("trials", base.trials)),
            seed=int(overrides.pop("seed", base.seed)),
            eq_tol=float(overrides.pop("eq_tol", base.eq_tol)),
            psd_tol=float(overrides.pop("psd_tol", base.psd_tol)),
        )
        if overrides:
            raise InvariantViolation(f"scenario check {check.suite!r}: unknown overrides {sorted(overrides)}")
        bound = {slot: scenario.objects[label] for slot, label in check.uses.items()}
        reports.append(run_suite(check.suite, merged, objects=bound))
    return reports
