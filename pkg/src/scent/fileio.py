"""JSON file formats for matrices, states and distillation families.

Matrix document::

    {"dim_rows": R, "dim_cols": C, "re": [[...], ...], "im": [[...], ...]}

optionally with ``"dims": [d_A, d_B]`` for a bipartite density matrix, or
``"local_dim": d`` for a Schmidt correlated state. With ``local_dim`` the
matrix is either the d x d coefficient matrix or the full d^2 x d^2
density matrix. A single-column matrix is a pure state vector.

Family document::

    {"N": N, "payload_dim": d, "u_re": [[...]], "u_im": [[...]],
     "lambda": [...], "theta": [[...]]}

Floats are written with 17 significant digits so documents round-trip
exactly.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import ScentError


class InputError(ScentError, ValueError):
    """Malformed input document; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def format_float(x: float) -> str:
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    s = "%.17g" % x
    if "." not in s and "e" not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def matrix_doc(m, **extra) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    doc = {"dim_rows": m.shape[0], "dim_cols": m.shape[1], "re": m.real.tolist(), "im": m.imag.tolist()}
    doc.update(extra)
    return doc


def _grid(doc: dict, key: str, rows: int, cols: int) -> np.ndarray:
    if key not in doc:
        raise InputError(key, "missing field")
    g = doc[key]
    if not isinstance(g, list) or len(g) != rows:
        raise InputError(key, f"expected {rows} rows")
    out = np.empty((rows, cols))
    for i, row in enumerate(g):
        if not isinstance(row, list) or len(row) != cols:
            raise InputError(f"{key}[{i}]", f"expected {cols} entries")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputError(f"{key}[{i}][{j}]", "not a number")
            out[i, j] = v
    return out


def _posint(doc: dict, key: str) -> int:
    if key not in doc:
        raise InputError(key, "missing field")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise InputError(key, "expected a positive integer")
    return v


def parse_matrix(doc) -> np.ndarray:
    if not isinstance(doc, dict):
        raise InputError("<root>", "expected a JSON object")
    r = _posint(doc, "dim_rows")
    c = _posint(doc, "dim_cols")
    return _grid(doc, "re", r, c) + 1j * _grid(doc, "im", r, c)


def load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(str(path), f"cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}", f"invalid JSON ({exc.msg})") from exc


def parse_state(doc):
    """Build a state object from a matrix document.

    Returns a :class:`SchmidtCorrelatedState` for coefficient documents, else a
    :class:`DensityMatrix` (pure-state columns are turned into projectors).
    """
    from .states import DensityMatrix, SchmidtCorrelatedState

    m = parse_matrix(doc)
    dims = doc.get("dims")
    if dims is not None:
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) and x > 0 for x in dims)):
            raise InputError("dims", "expected [d_A, d_B]")
        dims = tuple(dims)
    try:
        if "local_dim" in doc:
            d = _posint(doc, "local_dim")
            if m.shape == (d, d):
                return SchmidtCorrelatedState(d, m)
            if m.shape == (d * d, d * d):
                return DensityMatrix(m, (d, d))
            if m.shape == (d * d, 1):
                return DensityMatrix.from_pure(m[:, 0], (d, d))
            raise InputError("local_dim", f"local_dim {d} does not match matrix shape {m.shape}")
        if m.shape[1] == 1:
            return DensityMatrix.from_pure(m[:, 0], dims)
        return DensityMatrix(m, dims)
    except InputError:
        raise
    except ScentError as exc:
        raise InputError("re/im", str(exc)) from exc


def state_doc(state) -> dict:
    from .states import SchmidtCorrelatedState

    if isinstance(state, SchmidtCorrelatedState):
        return matrix_doc(state.coeffs, local_dim=state.local_dim)
    doc = matrix_doc(state.matrix)
    if state.dims is not None:
        doc["dims"] = list(state.dims)
    return doc


def family_doc(f) -> dict:
    u = np.asarray(f.basis.u)
    return {
        "N": f.count,
        "payload_dim": f.payload_dim,
        "u_re": u.real.tolist(),
        "u_im": u.imag.tolist(),
        "lambda": np.asarray(f.payload_coeffs).tolist(),
        "theta": np.asarray(f.payload_phases).tolist(),
    }


def parse_family(doc):
    from .distill import DistillationFamily
    from .locc import DiscriminationBasis

    if not isinstance(doc, dict):
        raise InputError("<root>", "expected a JSON object")
    n = _posint(doc, "N")
    d = _posint(doc, "payload_dim")
    u = _grid(doc, "u_re", n, n) + 1j * _grid(doc, "u_im", n, n)
    lam = _grid({"lambda": [doc.get("lambda")]} if "lambda" in doc else {}, "lambda", 1, d)[0]
    theta = _grid(doc, "theta", n, d)
    try:
        basis = DiscriminationBasis(u)
    except ValueError as exc:
        raise InputError("u_re/u_im", str(exc)) from exc
    try:
        return DistillationFamily(basis, lam, theta)
    except ValueError as exc:
        raise InputError("lambda", str(exc)) from exc
