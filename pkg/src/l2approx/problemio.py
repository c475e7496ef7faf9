"""Problem-file schema: parsing and validation with field-path diagnostics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .groupring import GroupRingMatrix
from .groups import FolnerExhaustion, GroupSpec, QuotientChain, QuotientMap


class ProblemError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass
class Problem:
    matrix: GroupRingMatrix
    scheme: QuotientChain | FolnerExhaustion | None
    tol: Fraction
    analyses: list[str]
    extra: dict

    @property
    def group(self) -> GroupSpec:
        return self.matrix.group


def parse_fraction(text, path: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ProblemError(path, f"not a rational number: {exc}")


def load_problem(path: str) -> Problem:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ProblemError(path, "file not found")
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)
    return problem_from_dict(raw)


def problem_from_dict(raw: dict) -> Problem:
    if not isinstance(raw, dict):
        raise ProblemError("$", "problem file must be a JSON object")
    if "matrix" not in raw:
        raise ProblemError("$.matrix", "missing")
    try:
        matrix = GroupRingMatrix.from_json(raw["matrix"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError("$.matrix", str(exc))
    scheme = None
    if "scheme" in raw:
        scheme = _parse_scheme(raw["scheme"], matrix.group)
    tol = parse_fraction(raw.get("tol", "1/1000"), "$.tol")
    analyses = raw.get("analyses", [])
    if not isinstance(analyses, list):
        raise ProblemError("$.analyses", "must be a list")
    return Problem(matrix, scheme, tol, analyses, raw)


def _parse_scheme(raw: dict, group: GroupSpec):
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ProblemError("$.scheme.kind", "missing")
    kind = raw["kind"]
    if kind == "quotient-chain":
        levels = raw.get("levels")
        if not levels:
            raise ProblemError("$.scheme.levels", "missing or empty")
        maps = []
        for i, lv in enumerate(levels):
            try:
                maps.append(QuotientMap.from_json(group, lv))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProblemError(f"$.scheme.levels[{i}]", str(exc))
        try:
            return QuotientChain(tuple(maps),
                                 separating=bool(raw.get("separating", True)),
                                 class_tag=str(raw.get("class_tag", "")))
        except ValueError as exc:
            raise ProblemError("$.scheme.levels", str(exc))
    if kind == "folner":
        levels = raw.get("levels")
        if not levels:
            raise ProblemError("$.scheme.levels", "missing or empty")
        try:
            return FolnerExhaustion(group, tuple(int(x) for x in levels))
        except (TypeError, ValueError) as exc:
            raise ProblemError("$.scheme.levels", str(exc))
    raise ProblemError("$.scheme.kind", f"unknown scheme kind {kind!r}")


def format_float(x: float) -> str:
    return f"{x:.12e}"


def json_default(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
