"""Scenario files: a group, a base field, representations and coefficients."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .exactfield import FieldDescriptor, field_make, prime_power
from .groups import DEFAULT_GROUP_CAP, GroupError, GroupSpec, RepError, Representation, RepSpec


class ScenarioError(ValueError):
    pass


class ParseError(ScenarioError):
    pass


class ShapeMismatch(ScenarioError):
    pass


class BadPrimePower(ScenarioError):
    pass


@dataclass(frozen=True)
class Caps:
    max_group_size: int = DEFAULT_GROUP_CAP
    max_extension_M: int = 4
    nondeg_depth: int = 2

    def __post_init__(self):
        for name in ("max_group_size", "max_extension_M", "nondeg_depth"):
            if int(getattr(self, name)) < 1:
                raise ParseError(f"caps.{name} must be positive")

    def to_json(self) -> dict:
        return {"max_group_size": self.max_group_size, "max_extension_M": self.max_extension_M,
                "nondeg_depth": self.nondeg_depth}


@dataclass(frozen=True)
class Scenario:
    label: str
    group: GroupSpec
    q: int
    rep_specs: tuple[RepSpec, ...]
    A: tuple[np.ndarray, ...] = field(compare=False)
    caps: Caps = Caps()
    notes: str = ""

    @property
    def p(self) -> int:
        return self.field.p

    @cached_property
    def field(self) -> FieldDescriptor:
        p, e = prime_power(self.q)
        return field_make(p, e)

    @cached_property
    def reps(self) -> tuple[Representation, ...]:
        return tuple(_rep_cache(self.group, s) for s in self.rep_specs)

    @property
    def d(self) -> int:
        return self.group.dimension

    def with_A(self, A: Sequence, label: str | None = None) -> "Scenario":
        mats = tuple(_parse_matrix(a, self.field, f"A[{j}]") for j, a in enumerate(A))
        new = replace(self, A=mats, label=label or self.label)
        _check_shapes(new)
        return new

    def with_caps(self, **kw) -> "Scenario":
        return replace(self, caps=replace(self.caps, **kw))

    @property
    def is_zero(self) -> bool:
        return all(not a.any() for a in self.A)

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "group": self.group.to_json(),
            "q": self.q,
            "reps": [s.to_json() for s in self.rep_specs],
            "A": [a.tolist() if self.field.degree == 1 else
                  [[list(self.field.element(int(c)).coords) for c in row] for row in a] for a in self.A],
            "caps": self.caps.to_json(),
        }
        if self.notes:
            out["notes"] = self.notes
        return out


_REP_CACHE: dict = {}


def _rep_cache(group: GroupSpec, spec: RepSpec) -> Representation:
    key = (group, spec)
    if key not in _REP_CACHE:
        _REP_CACHE[key] = Representation(group, spec)
    return _REP_CACHE[key]


def _parse_entry(x: Any, F: FieldDescriptor, where: str) -> int:
    if isinstance(x, bool):
        raise ParseError(f"{where}: booleans are not field elements")
    if isinstance(x, int):
        return x % F.p
    if isinstance(x, list):
        if len(x) > F.degree or not all(isinstance(c, int) and not isinstance(c, bool) for c in x):
            raise ParseError(f"{where}: expected at most {F.degree} integer coordinates, got {x!r}")
        return sum((c % F.p) * F.p**i for i, c in enumerate(x))
    raise ParseError(f"{where}: cannot read {x!r} as a field element")


def _parse_matrix(rows: Any, F: FieldDescriptor, where: str) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim != 2 or (arr < 0).any() or (arr >= F.size).any():
            raise ShapeMismatch(f"{where}: expected a matrix of field codes")
        return arr
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: expected a list of rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ShapeMismatch(f"{where}: row {i} has {len(r)} entries, row 0 has {width}")
    return np.array([[_parse_entry(x, F, f"{where}[{i}][{j}]") for j, x in enumerate(r)]
                     for i, r in enumerate(rows)], dtype=np.int64)


def _check_shapes(s: Scenario):
    if len(s.A) != len(s.rep_specs):
        raise ShapeMismatch(f"{len(s.A)} coefficient matrices for {len(s.rep_specs)} representations")
    for j, (a, rep) in enumerate(zip(s.A, s.reps)):
        if a.shape != (rep.dim, rep.dim):
            raise ShapeMismatch(f"A[{j}] has shape {a.shape[0]}x{a.shape[1]}; "
                                f"representation {j} has dimension {rep.dim}")


def parse_scenario(obj: Any, default_label: str = "scenario") -> Scenario:
    if not isinstance(obj, dict):
        raise ParseError("scenario must be a JSON object")
    for key in ("group", "q", "reps", "A"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}")
    g = obj["group"]
    if not isinstance(g, dict) or "kind" not in g:
        raise ParseError("group must be an object with 'kind' and 'n'")
    try:
        group = GroupSpec(g["kind"], int(g.get("n", 1)))
    except (GroupError, TypeError, ValueError) as exc:
        raise ParseError(f"group: {exc}") from None
    q = obj["q"]
    if not isinstance(q, int) or isinstance(q, bool) or prime_power(q) is None:
        raise BadPrimePower(f"q = {q!r} is not a prime power")
    reps = obj["reps"]
    if not isinstance(reps, list) or not reps:
        raise ParseError("reps must be a nonempty list")
    try:
        specs = tuple(RepSpec.parse(r) for r in reps)
    except (RepError, TypeError, ValueError) as exc:
        raise ParseError(f"reps: {exc}") from None
    caps_obj = obj.get("caps", {}) or {}
    if not isinstance(caps_obj, dict):
        raise ParseError("caps must be an object")
    unknown = set(caps_obj) - {"max_group_size", "max_extension_M", "nondeg_depth"}
    if unknown:
        raise ParseError(f"unknown caps {sorted(unknown)}")
    try:
        caps = Caps(**{k: int(v) for k, v in caps_obj.items()})
    except (TypeError, ValueError) as exc:
        raise ParseError(f"caps: {exc}") from None
    label = str(obj.get("label", default_label))
    A_raw = obj["A"]
    if not isinstance(A_raw, list):
        raise ParseError("A must be a list of matrices")
    base = Scenario(label, group, q, specs, (), caps, str(obj.get("notes", "")))
    F = base.field
    mats = tuple(_parse_matrix(a, F, f"A[{j}]") for j, a in enumerate(A_raw))
    try:
        _ = base.reps
    except RepError as exc:
        raise ParseError(f"reps: {exc}") from None
    s = replace(base, A=mats)
    _check_shapes(s)
    return s


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return parse_scenario(obj, default_label=path.stem)


def fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


def fixture(name: str) -> Scenario:
    return load_scenario(fixtures_dir() / f"{name}.json")
