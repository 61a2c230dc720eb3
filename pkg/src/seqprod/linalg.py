"""Complex linear algebra kernel shared by every other module.

All operators are dense square ``numpy`` arrays of ``complex128``; suites run
at dimensions 2-5, so clarity wins over asymptotics everywhere.  The module
provides Hermitian eigendecomposition, PSD square roots, polar decomposition,
seeded Haar-random generators, and tolerance-aware predicates.

Comparison semantics are entrywise absolute: all operators in play are
contractions, so scale is O(1) and relative tolerances would only add noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, InvariantViolation, NotHermitian, NotPSD

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "EigenDecomposition",
    "as_matrix",
    "dagger",
    "max_abs",
    "mat_close",
    "is_hermitian",
    "require_hermitian",
    "eigh",
    "psd_check",
    "require_psd",
    "sqrt_psd",
    "polar_decompose",
    "trace_product",
    "stream",
    "as_rng",
    "random_complex",
    "random_hermitian",
    "random_unitary",
]


@dataclass(frozen=True)
class Tolerances:
    """Comparison tolerances: ``eq_tol`` for entrywise equality, ``psd_tol`` as eigenvalue floor."""

    eq_tol: float = 1e-9
    psd_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.eq_tol > 0 and self.psd_tol > 0):
            raise InvariantViolation("Tolerances: eq_tol and psd_tol must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(A: np.ndarray) -> np.ndarray:
    """Coerce to a square complex128 array with finite entries."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvariantViolation(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise InvariantViolation("matrix entries must be finite")
    return M


def dagger(A: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(A).conj().T


def max_abs(A: np.ndarray) -> float:
    """Largest entry magnitude, 0.0 for empty input."""
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def mat_close(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    """Entrywise absolute comparison at tolerance ``tol``."""
    return max_abs(np.asarray(A) - np.asarray(B)) <= tol


def is_hermitian(A: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff ``max_ij |A_ij - conj(A_ji)| <= eq_tol``."""
    M = as_matrix(A)
    return max_abs(M - dagger(M)) <= tol.eq_tol


def require_hermitian(A: np.ndarray, tol: Tolerances = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Return ``A`` as a matrix, raising :class:`NotHermitian` if it fails the predicate."""
    M = as_matrix(A)
    dev = max_abs(M - dagger(M))
    if dev > tol.eq_tol:
        raise NotHermitian(f"{what} deviates from Hermitian by {dev:.3e} (eq_tol={tol.eq_tol:.1e})")
    return M


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix.

    ``eigenvalues`` ascend; the columns of ``eigenvectors`` are the matching
    orthonormal eigenvectors.  Construction re-checks unitarity of the
    eigenvector matrix so downstream code can rely on it blindly.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.eigenvalues, dtype=float)
        vecs = as_matrix(self.eigenvectors)
        if vals.ndim != 1 or vals.size != vecs.shape[0]:
            raise InvariantViolation("EigenDecomposition: eigenvalue count must equal dimension")
        if np.any(np.diff(vals) < 0):
            raise InvariantViolation("EigenDecomposition: eigenvalues must be non-decreasing")
        d = vecs.shape[0]
        if max_abs(dagger(vecs) @ vecs - np.eye(d)) > 1e-8:
            raise InvariantViolation("EigenDecomposition: eigenvector matrix is not unitary")
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    def reconstruct(self) -> np.ndarray:
        """Return ``V diag(lambda) V†``."""
        V = self.eigenvectors
        return V @ np.diag(self.eigenvalues.astype(np.complex128)) @ dagger(V)


def eigh(A: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    M = require_hermitian(A, tol)
    vals, vecs = np.linalg.eigh(M)
    return EigenDecomposition(vals, vecs)


def psd_check(A: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``A`` is >= -psd_tol."""
    M = require_hermitian(A, tol)
    vals = np.linalg.eigvalsh(M)
    return bool(vals[0] >= -tol.psd_tol)


def require_psd(A: np.ndarray, tol: Tolerances = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Return ``A`` as a Hermitian matrix, raising :class:`NotPSD` if an eigenvalue is below -psd_tol."""
    M = require_hermitian(A, tol, what)
    lo = float(np.linalg.eigvalsh(M)[0])
    if lo < -tol.psd_tol:
        raise NotPSD(f"{what} has eigenvalue {lo:.3e} below -psd_tol={-tol.psd_tol:.1e}")
    return M


def sqrt_psd(A: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root of a PSD matrix.

    Eigenvalues in ``[-psd_tol, 0)`` are clamped to zero first; genuinely
    negative spectra raise :class:`NotPSD`.
    """
    dec = eigh(require_psd(A, tol), tol)
    vals = np.clip(dec.eigenvalues, 0.0, None)
    V = dec.eigenvectors
    M = V @ np.diag(np.sqrt(vals).astype(np.complex128)) @ dagger(V)
    return (M + dagger(M)) / 2.0


def polar_decompose(K: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Right polar decomposition ``K = U P`` with ``U`` unitary and ``P = sqrt_psd(K†K)``.

    For rank-deficient ``K`` the unitary is completed from the singular value
    decomposition, pairing left and right singular vectors in index order.
    """
    M = as_matrix(K)
    W, _, Vh = np.linalg.svd(M)
    U = W @ Vh
    P = sqrt_psd(dagger(M) @ M, tol)
    return U, P


def trace_product(A: np.ndarray, B: np.ndarray) -> complex:
    """``tr(AB)`` for matching square matrices."""
    MA, MB = as_matrix(A), as_matrix(B)
    if MA.shape != MB.shape:
        raise DimMismatch(f"trace_product: {MA.shape} vs {MB.shape}")
    return complex(np.sum(MA * MB.T))


# ---------------------------------------------------------------------------
# Seeded randomness.  One counter-based (Philox) generator family: a stream is
# addressed by (seed, *path), so suites can split reproducible substreams per
# (suite, dim, trial) without any shared state.
# ---------------------------------------------------------------------------


def stream(seed: int, *path: int) -> np.random.Generator:
    """Deterministic Philox generator for the addressed substream."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(seq))


def as_rng(seed_or_rng: int | np.random.Generator) -> np.random.Generator:
    """Accept either an integer seed or an existing generator."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return stream(int(seed_or_rng))


def random_complex(dim: int, rng: int | np.random.Generator) -> np.ndarray:
    """Square matrix of standard complex Gaussian entries."""
    g = as_rng(rng)
    return (g.standard_normal((dim, dim)) + 1j * g.standard_normal((dim, dim))) / np.sqrt(2.0)


def random_hermitian(dim: int, rng: int | np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random Hermitian matrix ``scale * (G + G†)/2`` from a complex Gaussian G."""
    G = random_complex(dim, rng)
    return scale * (G + dagger(G)) / 2.0


def random_unitary(dim: int, rng: int | np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a complex Gaussian with the diagonal phases of R fixed."""
    if dim < 1:
        raise InvariantViolation("random_unitary: dim must be >= 1")
    G = random_complex(dim, rng)
    Q, R = np.linalg.qr(G)
    phases = np.diagonal(R).copy()
    phases = phases / np.abs(phases)
    return Q * phases[np.newaxis, :]
