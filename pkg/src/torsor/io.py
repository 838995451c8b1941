"""JSON file formats for matrices, complexes, sequences, gluing data and triangulations."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import HilbertComplex
from .gluing import GluingData
from .sequences import ChainMap, ShortExactSequence
from .simplicial import LocalSystem, SimplicialComplex


class FormatError(ValueError):
    """Input that cannot be parsed into the expected structure."""


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, list):
        # bare nested list, real entries
        arr = np.asarray(obj, dtype=float)
        if arr.ndim != 2:
            raise FormatError("a bare matrix must be a list of rows")
        return arr.astype(complex)
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj.get("re", []), dtype=float)
        im = np.asarray(obj.get("im", np.zeros(rows * cols)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad matrix literal: {exc}") from exc
    if re.size != rows * cols or im.size != rows * cols:
        raise FormatError(f"matrix literal of shape {rows}x{cols} has {re.size} real / {im.size} imaginary entries")
    m = (re + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise FormatError("matrix literal has non-finite entries")
    return m


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    out = {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "re": m.real.ravel().tolist()}
    if np.any(m.imag != 0):
        out["im"] = m.imag.ravel().tolist()
    return out


def complex_from_json(obj) -> HilbertComplex:
    try:
        dims = [int(n) for n in obj["dims"]]
        diffs = [matrix_from_json(m) for m in obj.get("diffs", [])]
        grams = obj.get("grams")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad complex: {exc}") from exc
    if len(diffs) != max(len(dims) - 1, 0):
        raise FormatError(f"{len(dims)} degrees need {len(dims) - 1} differentials, got {len(diffs)}")
    if grams is not None:
        grams = [matrix_from_json(g) for g in grams]
    for j, d in enumerate(diffs):
        if d.shape != (dims[j + 1], dims[j]):
            raise FormatError(f"d_{j} has shape {d.shape}, expected {(dims[j + 1], dims[j])}")
    return HilbertComplex.build(diffs, grams, dims)


def complex_to_json(c: HilbertComplex) -> dict:
    out = {"dims": list(c.dims), "diffs": [matrix_to_json(d) for d in c.diffs]}
    if any(not np.allclose(g, np.eye(g.shape[0]), atol=0, rtol=0) for g in c.grams):
        out["grams"] = [matrix_to_json(g) for g in c.grams]
    return out


def _maps(obj, key, source, target) -> ChainMap:
    try:
        mats = [matrix_from_json(m) for m in obj[key]]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"missing chain map {key!r}") from exc
    try:
        return ChainMap.build(source, target, mats)
    except ValueError as exc:
        raise FormatError(f"chain map {key!r}: {exc}") from exc


def ses_from_json(obj) -> ShortExactSequence:
    try:
        a, c, b = (complex_from_json(obj[k]) for k in ("A", "C", "B"))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad exact sequence: {exc}") from exc
    return ShortExactSequence(a, c, b, _maps(obj, "alpha", a, c), _maps(obj, "beta", c, b))


def ses_to_json(s: ShortExactSequence) -> dict:
    return {
        "A": complex_to_json(s.A),
        "C": complex_to_json(s.C),
        "B": complex_to_json(s.B),
        "alpha": [matrix_to_json(m) for m in s.alpha.maps],
        "beta": [matrix_to_json(m) for m in s.beta.maps],
    }


def gluing_from_json(obj) -> GluingData:
    try:
        c1, c2, b = (complex_from_json(obj[k]) for k in ("C1", "C2", "B"))
        flag = bool(obj.get("partial_isometry", False))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"bad gluing data: {exc}") from exc
    return GluingData(c1, c2, b, _maps(obj, "r1", c1, b), _maps(obj, "r2", c2, b), flag)


def gluing_to_json(g: GluingData) -> dict:
    return {
        "C1": complex_to_json(g.C1),
        "C2": complex_to_json(g.C2),
        "B": complex_to_json(g.B),
        "r1": [matrix_to_json(m) for m in g.r1.maps],
        "r2": [matrix_to_json(m) for m in g.r2.maps],
        "partial_isometry": g.partial_isometry,
    }


def triangulation_from_json(obj) -> tuple[SimplicialComplex, LocalSystem]:
    try:
        n = int(obj["vertices"])
        simplices = [tuple(int(v) for v in s) for s in obj["simplices"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad triangulation: {exc}") from exc
    k = SimplicialComplex.from_simplices(simplices, n_vertices=n, close=False)
    ls = obj.get("local_system")
    if not ls:
        return k, LocalSystem()
    try:
        fiber = int(ls.get("fiber", 1))
        edges = {}
        for key, m in ls.get("edges", {}).items():
            a, b = (int(v) for v in key.split("-"))
            mat = matrix_from_json(m)
            if a > b:
                a, b, mat = b, a, np.linalg.inv(mat)
            edges[(a, b)] = mat
    except (AttributeError, TypeError, ValueError) as exc:
        raise FormatError(f"bad local system: {exc}") from exc
    return k, LocalSystem(fiber, edges)


def triangulation_to_json(k: SimplicialComplex, local: LocalSystem | None = None) -> dict:
    out = {"vertices": k.n_vertices, "simplices": [list(s) for s in k.all()]}
    if local is not None and (local.fiber != 1 or local.edges):
        out["local_system"] = {
            "fiber": local.fiber,
            "edges": {f"{a}-{b}": matrix_to_json(m) for (a, b), m in sorted(local.edges.items())},
        }
    return out


def load_json(path) -> object:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")
