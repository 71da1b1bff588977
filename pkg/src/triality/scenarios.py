"""Scenario documents, the canonical scenario library, and CSV tables.

A scenario document is JSON::

    {
      "name": "asymmetric-two-path",
      "n": 2,
      "amplitudes": [{"mod": 0.894..., "phase_rad": 0.0}, {"re": 0.447..., "im": 0.0}],
      "detector": {"gram": [[{"re": 1, "im": 0}, ...], ...]},
      "metadata": {"description": "..."}
    }

``detector`` holds exactly one of ``vectors`` (``n`` rows of ``m`` complex
entries) or ``gram`` (``n x n`` complex entries).
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .state import (
    DetectorGram,
    DetectorVectors,
    PathAmplitudes,
    QuantonDetectorState,
    ValidationError,
    gram_from_vectors,
)


class ScenarioError(ValidationError):
    """A scenario document is malformed or describes an invalid state."""


@dataclass(frozen=True)
class Scenario:
    name: str
    state: QuantonDetectorState
    metadata: dict = field(default_factory=dict)

    @property
    def description(self) -> str:
        return str(self.metadata.get("description", ""))


def _number(obj, where: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"{where}: expected a number, got {obj!r}")
    if not math.isfinite(obj):
        raise ScenarioError(f"{where}: non-finite value")
    return float(obj)


def _complex(obj, where: str) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(_number(obj, where))
    if not isinstance(obj, dict):
        raise ScenarioError(f"{where}: expected {{re, im}} or {{mod, phase_rad}}, got {obj!r}")
    keys = set(obj)
    if keys == {"re", "im"}:
        return complex(_number(obj["re"], where + ".re"), _number(obj["im"], where + ".im"))
    if keys == {"mod", "phase_rad"}:
        mod = _number(obj["mod"], where + ".mod")
        if mod < 0:
            raise ScenarioError(f"{where}.mod: negative modulus {mod!r}")
        phase = _number(obj["phase_rad"], where + ".phase_rad")
        return mod * complex(math.cos(phase), math.sin(phase))
    raise ScenarioError(f"{where}: keys must be {{re, im}} or {{mod, phase_rad}}, got {sorted(keys)}")


def _complex_matrix(obj, where: str, rows: int | None = None) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ScenarioError(f"{where}: expected a non-empty list of rows")
    if rows is not None and len(obj) != rows:
        raise ScenarioError(f"{where}: expected {rows} rows, got {len(obj)}")
    width = None
    out = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ScenarioError(f"{where}[{i}]: expected a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ScenarioError(f"{where}[{i}]: row length {len(row)} differs from {width}")
        out.append([_complex(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(out, dtype=np.complex128)


def parse_scenario_document(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ScenarioError("top level must be an object")
    for key in ("n", "amplitudes", "detector"):
        if key not in doc:
            raise ScenarioError(f"missing field '{key}'")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ScenarioError(f"n: expected an integer >= 2, got {n!r}")
    amps = doc["amplitudes"]
    if not isinstance(amps, list):
        raise ScenarioError("amplitudes: expected a list")
    if len(amps) != n:
        raise ScenarioError(f"amplitudes: expected {n} entries, got {len(amps)}")
    c = np.array([_complex(x, f"amplitudes[{k}]") for k, x in enumerate(amps)])

    det = doc["detector"]
    if not isinstance(det, dict):
        raise ScenarioError("detector: expected an object")
    present = [k for k in ("vectors", "gram") if k in det]
    if len(present) != 1:
        raise ScenarioError(f"detector: exactly one of 'vectors' or 'gram' required, got {present or 'neither'}")
    extra = set(det) - {"vectors", "gram", "m"}
    if extra:
        raise ScenarioError(f"detector: unknown fields {sorted(extra)}")

    try:
        amplitudes = PathAmplitudes(c)
        if present[0] == "vectors":
            d = _complex_matrix(det["vectors"], "detector.vectors", rows=n)
            if "m" in det and det["m"] != d.shape[1]:
                raise ScenarioError(f"detector.m: declared {det['m']!r} but vectors have length {d.shape[1]}")
            gram = gram_from_vectors(DetectorVectors(d))
        else:
            G = _complex_matrix(det["gram"], "detector.gram", rows=n)
            if G.shape != (n, n):
                raise ScenarioError(f"detector.gram: expected {n}x{n}, got {G.shape[0]}x{G.shape[1]}")
            gram = DetectorGram(G)
        state = QuantonDetectorState(amplitudes, gram)
    except ScenarioError:
        raise
    except ValidationError as exc:
        raise ScenarioError(str(exc)) from None

    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        meta = {"description": str(meta)}
    return Scenario(name=str(doc.get("name", "")), state=state, metadata=meta)


def parse_scenario(text: str) -> QuantonDetectorState:
    return parse_scenario_document(text).state


def _encode(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def dump_scenario(state: QuantonDetectorState, name: str = "", metadata: dict | None = None) -> str:
    """Serialize ``state`` as a scenario document with an explicit Gram matrix."""
    doc = {
        "name": name,
        "n": state.n,
        "amplitudes": [_encode(z) for z in state.c],
        "detector": {"gram": [[_encode(z) for z in row] for row in state.G]},
        "metadata": metadata or {},
    }
    return json.dumps(doc, indent=2) + "\n"


def canonical_scenarios() -> dict[str, Scenario]:
    sq = np.sqrt
    spin = np.array([[1.0, 0.0], [0.5, sq(0.75)]])
    G_half = np.array([[1.0, 0.5], [0.5, 1.0]])
    items = [
        Scenario(
            "neutron-spin-two-path",
            QuantonDetectorState.from_vectors(PathAmplitudes.equal(2), spin),
            {"description": "balanced two-path interferometer, spin qubit marks the path with overlap 0.5"},
        ),
        Scenario(
            "max-entangled-n3",
            QuantonDetectorState(PathAmplitudes.equal(3), DetectorGram(np.eye(3))),
            {"description": "equal three-path amplitudes, mutually orthogonal detector states"},
        ),
        Scenario(
            "disentangled-n3",
            QuantonDetectorState(PathAmplitudes.equal(3), DetectorGram(np.ones((3, 3)))),
            {"description": "equal three-path amplitudes, identical detector states"},
        ),
        Scenario(
            "asymmetric-two-path",
            QuantonDetectorState(PathAmplitudes([sq(0.8), sq(0.2)]), DetectorGram(G_half)),
            {"description": "beam populations 0.8/0.2, detector overlap 0.5"},
        ),
        Scenario(
            "biased-n3",
            QuantonDetectorState(PathAmplitudes.from_populations([0.5, 0.3, 0.2]), DetectorGram(np.ones((3, 3)))),
            {"description": "populations 0.5/0.3/0.2, no which-path marking"},
        ),
    ]
    return {s.name: s for s in items}


@dataclass
class ResultTable:
    headers: Sequence[str]
    rows: list[Sequence[Any]] = field(default_factory=list)
    provenance: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.headers = list(self.headers)
        if len(set(self.headers)) != len(self.headers):
            raise ValueError(f"duplicate column headers: {self.headers}")
        for row in self.rows:
            self._check(row)

    def _check(self, row):
        if len(row) != len(self.headers):
            raise ValueError(f"row has {len(row)} cells, expected {len(self.headers)}")

    def append(self, row: Sequence[Any]) -> None:
        self._check(row)
        self.rows.append(list(row))


def format_cell(value) -> str:
    """Render one cell; floats use the shortest round-trip representation."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def emit_table(table: ResultTable, provenance: bool = False) -> str:
    """CSV text, header row first, LF line endings.

    With ``provenance=True`` the provenance entries are prepended as
    ``# key=value`` comment lines.
    """
    buf = io.StringIO()
    if provenance:
        for key, val in table.provenance.items():
            buf.write(f"# {key}={format_cell(val)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.headers)
    for row in table.rows:
        writer.writerow([format_cell(x) for x in row])
    return buf.getvalue()


def matrix_table(rho: np.ndarray) -> ResultTable:
    """Matrix entries as ``row, col, re, im`` records (1-based indices)."""
    rho = np.asarray(rho)
    table = ResultTable(["row", "col", "re", "im"])
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            table.append([i + 1, j + 1, float(rho[i, j].real), float(rho[i, j].imag)])
    return table
