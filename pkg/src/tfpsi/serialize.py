"""Reading and writing signals, symbols, operators, sequences and matrices.

Two formats, chosen by file extension:

* ``.csv``: a first comment line ``# {json header}``, a column line, then one
  row per entry with values printed as ``%.17g``.
* ``.bin``: raw little-endian ``float64`` values with real and imaginary parts
  interleaved, plus a JSON header next to it (same stem, ``.json``).
  Round trips through this format are bit-exact.

Column layouts

======== ===================================
signal   ``t, re, im``
symbol   ``x, xi, re, im``
operator ``row, col, re, im``
sequence ``k, l, re, im``
matrix   ``rowK, rowL, colK, colL, re, im``
======== ===================================
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .cdmat import CDMatrix
from .seqalg import LatticeSeq, PhaseLattice

__all__ = ["save", "load", "write_table", "read_table", "write_json", "FMT"]

FMT = "%.17g"

_COLUMNS = {
    "signal": ["t", "re", "im"],
    "symbol": ["x", "xi", "re", "im"],
    "operator": ["row", "col", "re", "im"],
    "sequence": ["k", "l", "re", "im"],
    "matrix": ["rowK", "rowL", "colK", "colL", "re", "im"],
}


def _kind_of(obj, kind):
    if kind is not None:
        if kind not in _COLUMNS:
            raise ValueError(f"unknown kind {kind!r}")
        return kind
    if isinstance(obj, LatticeSeq):
        return "sequence"
    if isinstance(obj, CDMatrix):
        return "matrix"
    a = np.asarray(obj)
    if a.ndim == 1:
        return "signal"
    if a.ndim == 2:
        return "symbol"
    raise ValueError("cannot infer what to save")


def _check_n(n: int, where) -> int:
    n = int(n)
    if n < 1 or n % 2 == 0:
        raise ValueError(f"{where}: N must be odd, got {n}")
    return n


def _payload(obj, kind):
    """Header dict, index columns (int array, one row per entry) and complex values."""
    if kind == "sequence":
        lat = obj.lattice
        head = {"n": lat.n, "alpha": lat.alpha, "beta": lat.beta}
        return head, lat.indices, obj.flat
    if kind == "matrix":
        lat = obj.lattice
        head = {"n": lat.n, "alpha": lat.alpha, "beta": lat.beta}
        if hasattr(obj, "header"):
            head["provenance"] = obj.header()
        idx = lat.indices
        size = lat.size
        r, c = np.divmod(np.arange(size * size), size)
        return head, np.concatenate([idx[r], idx[c]], axis=1), obj.entries.ravel()
    a = np.asarray(obj, dtype=complex)
    n = _check_n(a.shape[0], kind)
    if kind == "signal":
        if a.ndim != 1:
            raise ValueError("a signal must be one-dimensional")
        return {"n": n}, np.arange(n)[:, None], a
    if a.shape != (n, n):
        raise ValueError(f"a {kind} must be N x N")
    r, c = np.divmod(np.arange(n * n), n)
    return {"n": n}, np.stack([r, c], axis=1), a.ravel()


def save(obj, path, kind: str | None = None) -> Path:
    """Write ``obj`` to ``path`` (``.csv`` or ``.bin`` + ``.json``); returns the path."""
    path = Path(path)
    kind = _kind_of(obj, kind)
    head, idx, vals = _payload(obj, kind)
    head = {"kind": kind, **head}
    if path.suffix == ".csv":
        with open(path, "w", newline="") as fh:
            fh.write("# " + json.dumps(head, sort_keys=True) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(_COLUMNS[kind])
            for ix, v in zip(idx.tolist(), vals.tolist()):
                w.writerow([*ix, FMT % v.real, FMT % v.imag])
    elif path.suffix == ".bin":
        inter = np.empty(2 * vals.size, dtype="<f8")
        inter[0::2] = vals.real
        inter[1::2] = vals.imag
        path.write_bytes(inter.tobytes())
        head.update({"dtype": "<f8", "layout": "interleaved", "count": int(vals.size)})
        path.with_suffix(".json").write_text(json.dumps(head, sort_keys=True, indent=1) + "\n")
    else:
        raise ValueError(f"unsupported extension {path.suffix!r} (use .csv or .bin)")
    return path


def _rebuild(head: dict, idx: np.ndarray | None, vals: np.ndarray, where: str):
    kind = head.get("kind")
    if kind not in _COLUMNS:
        raise ValueError(f"{where}: unknown kind {kind!r}")
    n = _check_n(head["n"], where)
    if kind in ("sequence", "matrix"):
        lat = PhaseLattice(n, int(head["alpha"]), int(head["beta"]))
        ka, kb = lat.shape
        if kind == "sequence":
            out = np.zeros(lat.shape, complex)
            if idx is None:
                out = vals.reshape(lat.shape)
            else:
                out[idx[:, 0] % ka, idx[:, 1] % kb] = vals
            return LatticeSeq(out, lat)
        size = lat.size
        if idx is None:
            return CDMatrix(vals.reshape(size, size), lat)
        out = np.zeros((size, size), complex)
        r = (idx[:, 0] % ka) * kb + idx[:, 1] % kb
        c = (idx[:, 2] % ka) * kb + idx[:, 3] % kb
        out[r, c] = vals
        return CDMatrix(out, lat)
    if kind == "signal":
        if idx is None:
            return vals.reshape(n)
        out = np.zeros(n, complex)
        out[idx[:, 0]] = vals
        return out
    if idx is None:
        return vals.reshape(n, n)
    out = np.zeros((n, n), complex)
    out[idx[:, 0], idx[:, 1]] = vals
    return out


def _expected_count(head: dict) -> int:
    n = int(head["n"])
    kind = head["kind"]
    if kind == "signal":
        return n
    if kind in ("symbol", "operator"):
        return n * n
    size = (n // int(head["alpha"])) * (n // int(head["beta"]))
    return size if kind == "sequence" else size * size


def load(path):
    """Read an object written by :func:`save`."""
    path = Path(path)
    if path.suffix == ".bin":
        hpath = path.with_suffix(".json")
        head = json.loads(hpath.read_text())
        _check_n(head.get("n", 0), hpath)
        raw = np.frombuffer(path.read_bytes(), dtype="<f8")
        if raw.size != 2 * _expected_count(head):
            raise ValueError(f"{path}: expected {2 * _expected_count(head)} values, found {raw.size}")
        vals = raw[0::2] + 1j * raw[1::2]
        return _rebuild(head, None, vals, str(path))
    if path.suffix != ".csv":
        raise ValueError(f"unsupported extension {path.suffix!r} (use .csv or .bin)")
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("#"):
            raise ValueError(f"{path}: row 1: missing '# {{header}}' line")
        try:
            head = json.loads(first[1:])
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: row 1: bad header ({exc.msg})") from None
        kind = head.get("kind")
        if kind not in _COLUMNS:
            raise ValueError(f"{path}: row 1: unknown kind {kind!r}")
        _check_n(head.get("n", 0), path)
        cols = _COLUMNS[kind]
        reader = csv.reader(fh)
        names = next(reader, None)
        if names != cols:
            raise ValueError(f"{path}: row 2: expected columns {cols}, got {names}")
        n_idx = len(cols) - 2
        idx, vals = [], []
        for row_no, row in enumerate(reader, start=3):
            if len(row) != len(cols):
                raise ValueError(f"{path}: row {row_no}: expected {len(cols)} fields, got {len(row)}")
            try:
                idx.append([int(x) for x in row[:n_idx]])
                vals.append(complex(float(row[-2]), float(row[-1])))
            except ValueError:
                raise ValueError(f"{path}: row {row_no}: could not parse {row}") from None
    if len(vals) != _expected_count(head):
        raise ValueError(f"{path}: expected {_expected_count(head)} rows, found {len(vals)}")
    return _rebuild(head, np.array(idx, dtype=int).reshape(-1, n_idx), np.array(vals), str(path))


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FMT % v
    return str(v)


def write_table(path, columns, rows) -> Path:
    """Plain CSV table (no header comment); floats as ``%.17g``."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            if len(r) != len(columns):
                raise ValueError(f"row {r} does not match columns {columns}")
            w.writerow([_cell(v) for v in r])
    return path


def read_table(path) -> tuple[list[str], list[list[float]]]:
    """Read a numeric table written by :func:`write_table`."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        cols = next(reader)
        rows = []
        for row_no, row in enumerate(reader, start=2):
            if len(row) != len(cols):
                raise ValueError(f"{path}: row {row_no}: expected {len(cols)} fields, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise ValueError(f"{path}: row {row_no}: could not parse {row}") from None
    return cols, rows


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


def write_json(path, obj) -> Path:
    """JSON with sorted keys; ``nan`` becomes ``null`` and infinities become strings."""
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")
    return path
