"""JSON persistence for states, superoperators and reports.

State files look like ``{"k": 2, "m": 2, "re": [[...]], "im": [[...]]}``,
optionally with ``"dims"`` and ``"split"`` for multipartite matrices. Floats
are written with Python's shortest round-trip repr and signed zeros are
normalized, so re-reading and re-writing an emitted file reproduces it
byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bipartite import SitesDescriptor
from .state import BipartiteState, DimensionError, as_matrix
from .superoperators import SuperOperator


class FormatError(ValueError):
    """A file does not follow the documented JSON layout."""


@dataclass(frozen=True)
class MatrixRecord:
    """A stored matrix with its split; the matrix need not be PSD or Hermitian."""

    k: int
    m: int
    matrix: np.ndarray
    sites: SitesDescriptor | None = None

    @property
    def descriptor(self) -> SitesDescriptor:
        return self.sites if self.sites is not None else SitesDescriptor.bipartite(self.k, self.m)

    def to_state(self) -> BipartiteState:
        return BipartiteState(self.k, self.m, self.matrix)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def matrix_to_dict(mat) -> dict:
    mat = np.asarray(mat, dtype=np.complex128)
    # adding 0.0 turns -0.0 into 0.0, so emitted files are stable under re-reading
    return {"re": (mat.real + 0.0).tolist(), "im": (mat.imag + 0.0).tolist()}


def matrix_from_dict(data) -> np.ndarray:
    try:
        re, im = data["re"], data["im"]
    except (KeyError, TypeError) as exc:
        raise FormatError("matrix needs 're' and 'im' arrays") from exc
    re_arr, im_arr = _grid(re, "re"), _grid(im, "im")
    if re_arr.shape != im_arr.shape:
        raise FormatError(f"'re' {re_arr.shape} and 'im' {im_arr.shape} differ in shape")
    return re_arr + 1j * im_arr


def _grid(rows, name) -> np.ndarray:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise FormatError(f"'{name}' must be a list of rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise FormatError(f"'{name}' rows have unequal lengths")
    for r in rows:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise FormatError(f"'{name}' holds a non-numeric entry {x!r}")
    return np.array(rows, dtype=float).reshape(len(rows), len(rows[0]) if rows else 0)


def record_to_dict(k: int, m: int, mat, sites: SitesDescriptor | None = None) -> dict:
    out = {"k": int(k), "m": int(m), **matrix_to_dict(mat)}
    if sites is not None:
        out["dims"] = list(sites.dims)
        out["split"] = sites.split
    return out


def state_to_dict(state: BipartiteState, sites: SitesDescriptor | None = None) -> dict:
    return record_to_dict(state.k, state.m, state.matrix, sites)


def record_from_dict(data) -> MatrixRecord:
    if not isinstance(data, dict):
        raise FormatError("state file must hold a JSON object")
    try:
        k, m = data["k"], data["m"]
    except KeyError as exc:
        raise FormatError(f"missing key {exc.args[0]!r}") from exc
    if not all(isinstance(x, int) and not isinstance(x, bool) and x >= 1 for x in (k, m)):
        raise FormatError("'k' and 'm' must be positive integers")
    mat = matrix_from_dict(data)
    if mat.shape != (k * m, k * m):
        raise FormatError(f"matrix of shape {mat.shape} does not match k*m = {k * m}")
    try:
        as_matrix(mat)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    sites = None
    if "dims" in data:
        try:
            sites = SitesDescriptor(tuple(data["dims"]), int(data.get("split", 1)))
        except (TypeError, ValueError) as exc:
            raise FormatError(f"bad dims/split: {exc}") from exc
        if (sites.left, sites.right) != (k, m):
            raise FormatError(f"dims {sites.dims} split at {sites.split} do not give ({k}, {m})")
    return MatrixRecord(k, m, mat, sites)


def state_from_dict(data) -> BipartiteState:
    rec = record_from_dict(data)
    return rec.to_state()


def _load(path) -> object:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def read_record(path) -> MatrixRecord:
    return record_from_dict(_load(path))


def read_state(path) -> BipartiteState:
    return read_record(path).to_state()


def write_record(path, k: int, m: int, mat, sites: SitesDescriptor | None = None) -> None:
    Path(path).write_text(dumps(record_to_dict(k, m, mat, sites)))


def write_state(path, state: BipartiteState, sites: SitesDescriptor | None = None) -> None:
    write_record(path, state.k, state.m, state.matrix, sites)


def superop_to_dict(op: SuperOperator) -> dict:
    return op.to_dict()


def superop_from_dict(data) -> SuperOperator:
    try:
        return SuperOperator.from_dict(data)
    except (KeyError, TypeError, DimensionError) as exc:
        raise FormatError(f"bad superoperator record: {exc}") from exc


def read_projection(path, n: int) -> np.ndarray:
    data = _load(path)
    mat = matrix_from_dict(data)
    if mat.shape != (n, n):
        raise FormatError(f"projection must be {n} x {n}, got {mat.shape}")
    return mat
