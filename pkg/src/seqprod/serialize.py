"""JSON wire formats for matrices, effects, states, operations, observables, instruments.

A complex number is a two-element array ``[re, im]`` of decimal floats; a
matrix is an array of rows; a serialized matrix object is
``{"dim": d, "rows": [...]}``.  Python's float repr round-trips 17
significant digits, so dumps and loads are bit-exact.
"""

from __future__ import annotations

from typing import Any

import numpy as np

from .effects import Effect, State
from .errors import ParseError
from .linalg import DEFAULT_TOL, Tolerances, as_matrix
from .observables import BiObservable, Instrument, Observable
from .operations import Operation
from .stats import UncertaintyReport

__all__ = [
    "matrix_to_obj",
    "matrix_from_obj",
    "to_obj",
    "from_obj",
    "report_to_obj",
]


def matrix_to_obj(M: np.ndarray) -> dict[str, Any]:
    A = as_matrix(M)
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in A]
    return {"dim": A.shape[0], "rows": rows}


def _expect(obj: Any, key: str, what: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{what}: missing field {key!r}")
    return obj[key]


def matrix_from_obj(obj: Any, what: str = "matrix") -> np.ndarray:
    dim = _expect(obj, "dim", what)
    rows = _expect(obj, "rows", what)
    try:
        M = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: malformed rows ({exc})") from None
    if M.shape != (dim, dim):
        raise ParseError(f"{what}: rows shape {M.shape} does not match dim {dim}")
    return M


def _labels_to_obj(labels) -> list:
    return [x if isinstance(x, str) else float(x) for x in labels]


def to_obj(value: Any) -> Any:
    """Serialize a domain object (dispatch on type)."""
    if isinstance(value, Effect):
        return {"kind": "effect", **matrix_to_obj(value.matrix)}
    if isinstance(value, State):
        return {"kind": "state", **matrix_to_obj(value.matrix)}
    if isinstance(value, Operation):
        params: dict[str, Any] = {}
        if value.a is not None:
            params["a"] = matrix_to_obj(value.a.matrix)
        if value.alpha is not None:
            params["alpha"] = matrix_to_obj(value.alpha.matrix)
        return {
            "kind": "operation",
            "flavor": value.flavor,
            "kraus": [matrix_to_obj(K) for K in value.kraus],
            "params": params,
        }
    if isinstance(value, Observable):
        return {
            "kind": "observable",
            "outcomes": _labels_to_obj(value.outcomes),
            "effects": [matrix_to_obj(e.matrix) for e in value.effects],
        }
    if isinstance(value, Instrument):
        return {
            "kind": "instrument",
            "outcomes": _labels_to_obj(value.outcomes),
            "operations": [to_obj(op) for op in value.operations],
        }
    if isinstance(value, BiObservable):
        xs, ys, effects = [], [], []
        for x in value.outcomes1:
            for y in value.outcomes2:
                xs.append(x if isinstance(x, str) else float(x))
                ys.append(y if isinstance(y, str) else float(y))
                effects.append(matrix_to_obj(value.effects[(x, y)].matrix))
        return {
            "kind": "bi-observable",
            "outcomes1": xs,
            "outcomes2": ys,
            "effects": effects,
        }
    if isinstance(value, UncertaintyReport):
        return report_to_obj(value)
    if isinstance(value, np.ndarray):
        return matrix_to_obj(value)
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    raise ParseError(f"to_obj: cannot serialize {type(value).__name__}")


def report_to_obj(report: UncertaintyReport) -> dict[str, float]:
    """Flat decimal-field form of a spread report (complex correlation split in two)."""
    return {
        "expectation_s": report.expectation_s,
        "expectation_t": report.expectation_t,
        "variance_s": report.variance_s,
        "variance_t": report.variance_t,
        "correlation_re": report.correlation.real,
        "correlation_im": report.correlation.imag,
        "covariance": report.covariance,
        "commutator_term": report.commutator_term,
        "bound": report.bound,
    }


def from_obj(obj: Any, tol: Tolerances = DEFAULT_TOL) -> Any:
    """Deserialize a domain object (dispatch on the ``kind`` field)."""
    kind = _expect(obj, "kind", "object")
    if kind == "effect":
        return Effect(matrix_from_obj(obj, "effect"), tol=tol)
    if kind == "state":
        return State(matrix_from_obj(obj, "state"), tol=tol)
    if kind == "operation":
        flavor = _expect(obj, "flavor", "operation")
        kraus = tuple(matrix_from_obj(m, "kraus operator") for m in _expect(obj, "kraus", "operation"))
        params = obj.get("params", {})
        a = Effect(matrix_from_obj(params["a"], "operation effect"), tol=tol) if "a" in params else None
        alpha = State(matrix_from_obj(params["alpha"], "operation state"), tol=tol) if "alpha" in params else None
        return Operation(kraus, flavor=flavor, a=a, alpha=alpha, tol=tol)
    if kind == "observable":
        outcomes = tuple(_expect(obj, "outcomes", "observable"))
        effects = tuple(Effect(matrix_from_obj(m, "observable effect"), tol=tol) for m in _expect(obj, "effects", "observable"))
        return Observable(outcomes, effects, tol=tol)
    if kind == "instrument":
        outcomes = tuple(_expect(obj, "outcomes", "instrument"))
        ops = tuple(from_obj(o, tol) for o in _expect(obj, "operations", "instrument"))
        return Instrument(outcomes, ops, tol=tol)
    if kind == "bi-observable":
        xs = _expect(obj, "outcomes1", "bi-observable")
        ys = _expect(obj, "outcomes2", "bi-observable")
        mats = _expect(obj, "effects", "bi-observable")
        if not (len(xs) == len(ys) == len(mats)):
            raise ParseError("bi-observable: parallel arrays of unequal length")
        effects = {
            (x, y): Effect(matrix_from_obj(m, "bi-observable effect"), tol=tol)
            for x, y, m in zip(xs, ys, mats)
        }
        o1 = tuple(dict.fromkeys(xs))
        o2 = tuple(dict.fromkeys(ys))
        return BiObservable(o1, o2, effects, tol=tol)
    raise ParseError(f"from_obj: unknown kind {kind!r}")
