"""Tensor and certificate files.

A tensor file is a JSON object with ``order``, ``dim`` and exactly one of
``ones`` (list of 1-based index lists) or ``dense`` (a '0'/'1' string in
row-major order, last index fastest).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .certificates import Certificate, certificate_from_json, certificate_to_json
from .tensor import BooleanTensor

PathLike = Union[str, Path]


class FormatError(ValueError):
    pass


def _int_field(obj: dict, name: str) -> int:
    value = obj.get(name)
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"field {name!r} must be an integer")
    return value


def tensor_from_json(obj: Any) -> BooleanTensor:
    if not isinstance(obj, dict):
        raise FormatError("tensor file must hold a JSON object")
    order, dim = _int_field(obj, "order"), _int_field(obj, "dim")
    if order < 2 or dim < 1:
        raise FormatError(f"need order >= 2 and dim >= 1, got order={order}, dim={dim}")
    has_ones, has_dense = "ones" in obj, "dense" in obj
    if has_ones == has_dense:
        raise FormatError("exactly one of 'ones' or 'dense' must be present")
    if has_dense:
        dense = obj["dense"]
        if not isinstance(dense, str):
            raise FormatError("'dense' must be a string")
        try:
            return BooleanTensor.from_dense(order, dim, dense)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    ones = obj["ones"]
    if not isinstance(ones, list):
        raise FormatError("'ones' must be a list of index lists")
    for idx in ones:
        if not isinstance(idx, list) or len(idx) != order:
            raise FormatError(f"index {idx!r} must be a list of length {order}")
        for x in idx:
            if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x <= dim:
                raise FormatError(f"index {idx!r} has an entry outside 1..{dim}")
    return BooleanTensor.from_ones(order, dim, ones)


def tensor_to_json(t: BooleanTensor, dense: bool = False) -> dict:
    out: dict[str, Any] = {"order": t.order, "dim": t.dim}
    if dense:
        out["dense"] = t.to_dense()
    else:
        out["ones"] = [list(ix) for ix in t.ones_list()]
    return out


def read_tensor(path: PathLike) -> BooleanTensor:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return tensor_from_json(obj)


def write_tensor(t: BooleanTensor, path: PathLike, dense: bool = False) -> None:
    Path(path).write_text(json.dumps(tensor_to_json(t, dense)) + "\n")


def read_certificate(path: PathLike) -> Certificate:
    try:
        return certificate_from_json(json.loads(Path(path).read_text()))
    except (json.JSONDecodeError, TypeError) as exc:
        raise FormatError(f"{path}: {exc}") from None


def write_certificate(cert: Certificate, path: PathLike) -> None:
    Path(path).write_text(json.dumps(certificate_to_json(cert)) + "\n")
