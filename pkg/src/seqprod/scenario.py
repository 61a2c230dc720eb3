"""Scenario files: named objects plus a list of suite checks to run against them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import InvariantViolation, ParseError
from .linalg import DEFAULT_TOL, Tolerances
from .serialize import from_obj, to_obj

__all__ = ["ScenarioCheck", "Scenario", "load_scenario", "save_scenario", "bundled_scenario_path"]


@dataclass(frozen=True)
class ScenarioCheck:
    """One suite invocation: suite name, config overrides, and object bindings."""

    suite: str
    overrides: dict[str, Any] = field(default_factory=dict)
    uses: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class Scenario:
    name: str
    dim: int
    objects: dict[str, Any]
    checks: tuple[ScenarioCheck, ...]


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (``data/<name>.scenario.json``)."""
    return Path(__file__).parent / "data" / f"{name}.scenario.json"


def load_scenario(path: str | Path, tol: Tolerances = DEFAULT_TOL) -> Scenario:
    """Load and validate a scenario file.

    Every named object is fully validated at load; a violated invariant is
    reported with the offending label.  Check bindings must reference labels
    that exist.
    """
    p = Path(path)
    if not p.exists():
        fallback = bundled_scenario_path(p.stem.removesuffix(".scenario"))
        if fallback.exists():
            p = fallback
        else:
            raise ParseError(f"scenario file not found: {path}")
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"scenario {p}: {exc}") from None
    for key in ("name", "dim", "objects", "checks"):
        if key not in raw:
            raise ParseError(f"scenario {p}: missing field {key!r}")
    dim = int(raw["dim"])
    objects: dict[str, Any] = {}
    for label, obj in raw["objects"].items():
        try:
            value = from_obj(obj, tol)
        except InvariantViolation as exc:
            raise InvariantViolation(f"scenario object {label!r}: {exc}") from None
        got_dim = getattr(value, "dim", dim)
        if got_dim != dim:
            raise InvariantViolation(f"scenario object {label!r}: dim {got_dim} differs from scenario dim {dim}")
        objects[label] = value
    checks = []
    for i, c in enumerate(raw["checks"]):
        if "suite" not in c:
            raise ParseError(f"scenario {p}: check #{i} missing 'suite'")
        uses = dict(c.get("uses", {}))
        for slot, label in uses.items():
            if label not in objects:
                raise InvariantViolation(f"scenario check #{i}: label {label!r} does not resolve")
        checks.append(ScenarioCheck(c["suite"], dict(c.get("overrides", {})), uses))
    return Scenario(str(raw["name"]), dim, objects, tuple(checks))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Write a scenario back out; loading the result reproduces the objects bit-exactly."""
    raw = {
        "name": scenario.name,
        "dim": scenario.dim,
        "objects": {label: to_obj(value) for label, value in scenario.objects.items()},
        "checks": [
            {"suite": c.suite, "overrides": c.overrides, "uses": c.uses} for c in scenario.checks
        ],
    }
    Path(path).write_text(json.dumps(raw, indent=2) + "\n", encoding="utf-8")
