"""JSON serialization of operators, subspaces, maps, and CLI reports.

Complex scalars are encoded as [re, im] pairs; all documents validate against
the JSON Schemas shipped in ``schemas/``.  Serialization is lossless for the
float values involved (Python's float repr round-trips), so emitted documents
parse back bit-exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from .config import DEFAULT_TOL, ToleranceConfig
from .operators import Operator, SpaceLayout
from .maps import SubsystemMap, map_from_kraus
from .subspaces import OperatorSubspace, span_from_generators

__all__ = [
    "parse_operator",
    "emit_operator",
    "parse_subspace",
    "emit_subspace",
    "parse_map",
    "emit_map",
    "parse_unitary_family",
    "emit_representation",
    "Verdict",
    "Report",
    "emit_report",
    "parse_report",
    "inputs_digest",
    "validate_document",
]

_SCHEMA_CACHE: dict[str, dict] = {}


def load_schema(name: str) -> dict:
    if name not in _SCHEMA_CACHE:
        text = resources.files("beyondcp").joinpath(f"schemas/{name}.json").read_text()
        _SCHEMA_CACHE[name] = json.loads(text)
    return _SCHEMA_CACHE[name]


def validate_document(doc: Any, schema_name: str) -> None:
    """Validate a JSON document, raising ValueError with a JSON pointer path."""
    try:
        jsonschema.validate(doc, load_schema(schema_name))
    except jsonschema.ValidationError as err:
        pointer = "/" + "/".join(str(part) for part in err.absolute_path)
        raise ValueError(
            f"{schema_name} document invalid at {pointer}: {err.message}"
        ) from None


# -- complex matrix codec -------------------------------------------------------


def _emit_matrix(entries: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(entries, dtype=complex)]


def _parse_matrix(obj: list, where: str) -> np.ndarray:
    rows = len(obj)
    width = len(obj[0])
    for r, row in enumerate(obj):
        if len(row) != width:
            raise ValueError(f"{where}: row {r} has length {len(row)}, expected {width}")
    return np.array([[complex(c[0], c[1]) for c in row] for row in obj], dtype=complex)


def _layout_from_doc(doc: dict) -> SpaceLayout:
    labels = tuple(doc["labels"]) if "labels" in doc else None
    return SpaceLayout(tuple(int(d) for d in doc["dims"]), labels)


# -- operators -------------------------------------------------------------------


def emit_operator(op: Operator) -> dict:
    doc: dict[str, Any] = {"dims": list(op.layout.dims)}
    if op.layout.labels is not None:
        doc["labels"] = list(op.layout.labels)
    doc["matrix"] = _emit_matrix(op.entries)
    return doc


def parse_operator(doc: dict) -> Operator:
    validate_document(doc, "operator")
    layout = _layout_from_doc(doc)
    matrix = _parse_matrix(doc["matrix"], "/matrix")
    if matrix.shape != (layout.total_dim, layout.total_dim):
        raise ValueError(
            f"/matrix: shape {matrix.shape} does not match dims product {layout.total_dim}"
        )
    return Operator(layout, matrix)


# -- subspaces --------------------------------------------------------------------


def emit_subspace(v: OperatorSubspace) -> dict:
    doc: dict[str, Any] = {"dims": list(v.layout.dims)}
    if v.layout.labels is not None:
        doc["labels"] = list(v.layout.labels)
    doc["generators"] = [_emit_matrix(g.entries) for g in v.generators]
    doc["basis"] = [_emit_matrix(b.entries) for b in v.basis]
    return doc


def parse_subspace(doc: dict, tol: ToleranceConfig = DEFAULT_TOL) -> OperatorSubspace:
    validate_document(doc, "subspace")
    layout = _layout_from_doc(doc)
    n = layout.total_dim

    def to_ops(key: str) -> tuple[Operator, ...]:
        ops = []
        for i, mat in enumerate(doc.get(key, [])):
            arr = _parse_matrix(mat, f"/{key}/{i}")
            if arr.shape != (n, n):
                raise ValueError(f"/{key}/{i}: shape {arr.shape} does not match dims")
            ops.append(Operator(layout, arr))
        return tuple(ops)

    generators = to_ops("generators")
    basis = to_ops("basis")
    if basis:
        return OperatorSubspace(layout, basis, generators or basis, tol)
    return span_from_generators(generators, tol)


def parse_unitary_family(doc: dict, tol: ToleranceConfig = DEFAULT_TOL):
    """Parse {"members": [operator...], "description": ...} into a UnitaryFamily."""
    from .consistency import UnitaryFamily

    if not isinstance(doc, dict) or "members" not in doc:
        raise ValueError('unitary family document requires a "members" array')
    members = tuple(parse_operator(m) for m in doc["members"])
    return UnitaryFamily(members, description=str(doc.get("description", "")))


# -- maps --------------------------------------------------------------------------


def emit_map(phi: SubsystemMap) -> dict:
    return {
        "kind": "matrix",
        "dims": list(phi.domain.layout.dims),
        "basis": [_emit_matrix(b.entries) for b in phi.domain.basis],
        "coord_matrix": _emit_matrix(phi.coord_matrix),
        "provenance": phi.provenance,
    }


def _builtin_map(doc: dict, tol: ToleranceConfig) -> SubsystemMap:
    from . import catalog
    from .maps import identity_map

    name = doc["name"]
    if name == "identity":
        return identity_map((int(doc.get("dim", 2)),), tol)
    if name == "transpose":
        return catalog.transpose_map(tol)
    if name == "repolarizer":
        if "epsilon" not in doc:
            raise ValueError('/epsilon: builtin "repolarizer" requires epsilon')
        return catalog.repolarizer(float(doc["epsilon"]), tol)
    if name == "depolarizer":
        if "epsilon" not in doc:
            raise ValueError('/epsilon: builtin "depolarizer" requires epsilon')
        return catalog.depolarizer(float(doc["epsilon"]), tol)
    if name in ("controlled_phase", "example1"):
        if "t" not in doc:
            raise ValueError(f'/t: builtin "{name}" requires t')
        return catalog.controlled_phase_map(float(doc["t"]), tol)
    raise ValueError(f"/name: unknown builtin map {name!r}")


def parse_map(doc: dict, tol: ToleranceConfig = DEFAULT_TOL) -> SubsystemMap:
    validate_document(doc, "map")
    kind = doc["kind"]
    if kind == "builtin":
        return _builtin_map(doc, tol)
    layout = _layout_from_doc(doc)
    n = layout.total_dim
    if kind == "kraus":
        ops = []
        for i, mat in enumerate(doc["operators"]):
            arr = _parse_matrix(mat, f"/operators/{i}")
            if arr.shape != (n, n):
                raise ValueError(f"/operators/{i}: shape {arr.shape} does not match dims")
            ops.append(Operator(layout, arr))
        return map_from_kraus(ops, tol)
    basis = []
    for i, mat in enumerate(doc["basis"]):
        arr = _parse_matrix(mat, f"/basis/{i}")
        if arr.shape != (n, n):
            raise ValueError(f"/basis/{i}: shape {arr.shape} does not match dims")
        basis.append(Operator(layout, arr))
    domain = OperatorSubspace(layout, tuple(basis), tuple(basis), tol)
    coord = _parse_matrix(doc["coord_matrix"], "/coord_matrix")
    if coord.shape != (n * n, len(basis)):
        raise ValueError(
            f"/coord_matrix: shape {coord.shape}, expected {(n * n, len(basis))}"
        )
    return SubsystemMap(domain, coord, provenance=str(doc.get("provenance", "file")))


def emit_representation(rep) -> dict:
    return {
        "bath_dim": rep.bath_dim,
        "unitary": emit_operator(rep.unitary),
        "subspace": emit_subspace(rep.subspace),
        "target_domain": emit_subspace(rep.target_domain),
    }


# -- reports ------------------------------------------------------------------------


def _jsonable_number(x: float | None):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf"
    if math.isnan(x):
        return "nan"
    return x


@dataclass
class Verdict:
    """One named pass/fail outcome with an optional residual and details."""

    name: str
    passed: bool
    residual: float | None = None
    details: dict = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": _jsonable_number(self.residual),
            "details": _jsonable_details(self.details),
        }


def _jsonable_details(value):
    if isinstance(value, dict):
        return {str(k): _jsonable_details(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable_details(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return _jsonable_number(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return _jsonable_number(float(value))
    return str(value)


@dataclass
class Report:
    """Machine-readable command outcome embedding the tolerances used."""

    command: str
    inputs_digest: str
    seed: int | None
    tolerances: ToleranceConfig
    verdicts: list[Verdict] = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, residual: float | None = None, **details) -> None:
        self.verdicts.append(Verdict(name, passed, residual, details))

    @property
    def all_passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def to_doc(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "tolerances": {
                "rank_cut": self.tolerances.rank_cut,
                "residual_tol": self.tolerances.residual_tol,
                "psd_slack": self.tolerances.psd_slack,
                "entropy_support_tol": self.tolerances.entropy_support_tol,
            },
            "verdicts": [v.to_doc() for v in self.verdicts],
            "artifacts": _jsonable_details(self.artifacts)
            if not _artifacts_already_jsonable(self.artifacts)
            else self.artifacts,
        }


def _artifacts_already_jsonable(artifacts: dict) -> bool:
    try:
        json.dumps(artifacts)
        return True
    except (TypeError, ValueError):
        return False


def emit_report(report: Report) -> dict:
    doc = report.to_doc()
    validate_document(doc, "report")
    return doc


def parse_report(doc: dict) -> dict:
    validate_document(doc, "report")
    return doc


def inputs_digest(payload: Any) -> str:
    """Stable SHA-256 digest of the canonicalized JSON input payload."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
