"""Canonical JSON wire formats.

Complex scalars are [re, im] pairs; every numeric field is rendered with 17
significant digits so identical inputs and seeds produce byte-identical
reports.  Loaders raise SchemaError with a JSON-pointer path on malformed
input.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .algebra import OperatorAlgebra
from .cones import (
    AxiomCheck,
    ConeAuditReport,
    ConeOracle,
    ConstantEstimate,
    SimilarityCone,
    StandardCone,
    Witness,
)
from .errors import SchemaError


# ---------------------------------------------------------------------------
# Canonical writer
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    out = format(float(x), ".17g")
    return out


def _canonical(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)},{_fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _canonical(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(str(k)) + ":" + _canonical(v)
                              for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    return _canonical(obj) + "\n"


# ---------------------------------------------------------------------------
# Matrices and algebras
# ---------------------------------------------------------------------------

def matrix_to_obj(x: np.ndarray) -> dict:
    x = np.asarray(x, dtype=complex)
    return {
        "dim": int(x.shape[0]),
        "entries": [[[float(v.real), float(v.imag)] for v in row] for row in x],
    }


def _expect(cond: bool, pointer: str, msg: str) -> None:
    if not cond:
        raise SchemaError(pointer, msg)


def matrix_from_obj(obj, pointer: str = "") -> np.ndarray:
    _expect(isinstance(obj, dict), pointer, "expected a matrix object")
    _expect("dim" in obj, pointer + "/dim", "missing")
    _expect(isinstance(obj["dim"], int) and obj["dim"] >= 1, pointer + "/dim",
            "must be a positive integer")
    n = obj["dim"]
    entries = obj.get("entries")
    _expect(isinstance(entries, list) and len(entries) == n,
            pointer + "/entries", f"expected {n} rows")
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(entries):
        _expect(isinstance(row, list) and len(row) == n,
                f"{pointer}/entries/{i}", f"expected {n} columns")
        for j, pair in enumerate(row):
            _expect(isinstance(pair, list) and len(pair) == 2,
                    f"{pointer}/entries/{i}/{j}", "expected an [re, im] pair")
            re, im = pair
            _expect(isinstance(re, (int, float)) and isinstance(im, (int, float)),
                    f"{pointer}/entries/{i}/{j}", "entries must be numbers")
            _expect(math.isfinite(re) and math.isfinite(im),
                    f"{pointer}/entries/{i}/{j}", "entries must be finite")
            out[i, j] = complex(re, im)
    return out


def algebra_to_obj(algebra: OperatorAlgebra) -> dict:
    return {
        "ambient_dim": algebra.ambient_dim,
        "basis": [matrix_to_obj(b) for b in algebra.basis],
        "star_closed": bool(algebra.star_closed),
    }


def algebra_from_obj(obj, pointer: str = "") -> OperatorAlgebra:
    _expect(isinstance(obj, dict), pointer, "expected an algebra object")
    _expect(isinstance(obj.get("ambient_dim"), int), pointer + "/ambient_dim",
            "must be an integer")
    n = obj["ambient_dim"]
    basis_obj = obj.get("basis")
    _expect(isinstance(basis_obj, list) and basis_obj, pointer + "/basis",
            "must be a nonempty list")
    basis = []
    for k, b in enumerate(basis_obj):
        mat = matrix_from_obj(b, f"{pointer}/basis/{k}")
        _expect(mat.shape == (n, n), f"{pointer}/basis/{k}/dim",
                f"must equal ambient_dim {n}")
        basis.append(mat)
    _expect(isinstance(obj.get("star_closed"), bool), pointer + "/star_closed",
            "must be a boolean")
    stacked = np.stack(basis)
    unit_coords = np.tensordot(stacked.conj(), np.eye(n, dtype=complex),
                               axes=([1, 2], [0, 1]))
    algebra = OperatorAlgebra(
        ambient_dim=n, basis=stacked, unit_coords=unit_coords,
        star_closed=obj["star_closed"],
    )
    algebra.validate()
    return algebra


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

def cone_to_obj(cone: ConeOracle) -> dict:
    out = {"variant": cone.variant, "tol_psd": cone.tol_psd}
    if isinstance(cone, SimilarityCone):
        out["algebra"] = algebra_to_obj(cone.algebra)
        out["S"] = matrix_to_obj(cone.s)
    elif isinstance(cone, StandardCone):
        out["algebra"] = algebra_to_obj(cone.algebra)
    else:  # pullback
        out["grid"] = [float(q) for q in cone.grid]
    return out


def cone_from_obj(obj, base_dir: str = ".", pointer: str = "") -> ConeOracle:
    from .case_studies import FunctionPullbackCone

    _expect(isinstance(obj, dict), pointer, "expected a cone object")
    variant = obj.get("variant")
    _expect(variant in ("standard", "similarity", "pullback"),
            pointer + "/variant", "must be standard, similarity or pullback")
    tol_psd = obj.get("tol_psd", 1e-9)
    _expect(isinstance(tol_psd, (int, float)) and tol_psd > 0,
            pointer + "/tol_psd", "must be a positive number")

    if variant == "pullback":
        grid = obj.get("grid")
        _expect(isinstance(grid, list) and len(grid) >= 2, pointer + "/grid",
                "must be a list of at least two points")
        return FunctionPullbackCone(np.asarray(grid, dtype=float), float(tol_psd))

    alg_obj = obj.get("algebra")
    if isinstance(alg_obj, str):
        alg_obj = load_json(os.path.join(base_dir, alg_obj))
    algebra = algebra_from_obj(alg_obj, pointer + "/algebra")
    if variant == "standard":
        return StandardCone(algebra, float(tol_psd))
    s = matrix_from_obj(obj.get("S"), pointer + "/S")
    _expect(s.shape == (algebra.ambient_dim,) * 2, pointer + "/S/dim",
            "must match the algebra ambient dimension")
    return SimilarityCone(algebra, s, float(tol_psd))


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError("", f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON in {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def witness_to_obj(w: Witness) -> dict:
    def enc(x):
        if isinstance(x, np.ndarray):
            return matrix_to_obj(x)
        if hasattr(x, "f_values"):  # function samples
            return {
                "grid": [float(q) for q in x.grid],
                "f_values": [[float(v.real), float(v.imag)] for v in x.f_values],
                "f_derivs": [[float(v.real), float(v.imag)] for v in x.f_derivs],
            }
        return x

    return {
        "kind": w.kind,
        "level": w.level,
        "members": [enc(m) for m in w.members],
        "outside": None if w.outside is None else enc(w.outside),
        "note": w.note,
    }


def check_to_obj(c: AxiomCheck) -> dict:
    return {
        "axiom": c.axiom,
        "verdict": c.verdict,
        "detail": c.detail,
        "witness": None if c.witness is None else witness_to_obj(c.witness),
    }


def constant_to_obj(c: ConstantEstimate) -> dict:
    wrapped = Witness("constant", c.level, tuple(c.witness), None)
    return {
        "name": c.name,
        "value": float(c.value),
        "level": c.level,
        "witness": witness_to_obj(wrapped)["members"],
    }


def audit_to_obj(report: ConeAuditReport) -> dict:
    return {
        "audit": report.audit,
        "levels": list(report.levels),
        "samples": report.samples,
        "seed": report.seed,
        "passed": report.passed,
        "checks": [check_to_obj(c) for c in report.checks],
        "constants": {k: constant_to_obj(v) for k, v in report.constants.items()},
    }
