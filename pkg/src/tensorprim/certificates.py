"""Evidence attached to negative verdicts.

Every certificate can be re-checked against the tensor it was issued for
without trusting the support-family engine: zero columns by scanning
entries, zero entries of powers with :func:`tensorprim.engine.power_entry`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union

from .nested import NestedIndex, all_equal_tree, nested_from_json, nested_to_json
from .tensor import BooleanTensor


@dataclass(frozen=True)
class ZeroColumn:
    """Column ``alpha`` (1-based, length ``m-1``) is zero in every row."""

    alpha: tuple[int, ...]


@dataclass(frozen=True)
class ZeroEntry:
    """``(A^k)[row, flatten(index)] == 0``."""

    k: int
    row: int
    index: NestedIndex


@dataclass(frozen=True)
class MajorizationZero:
    """``M(A^k)[row, column] == 0``, i.e. a zero at the all-``column`` index."""

    k: int
    row: int
    column: int


@dataclass(frozen=True)
class SupportCycle:
    """The support family at level ``start`` recurs at ``start + length``
    without ever being ``{full}``; ``witness`` is a zero entry at level ``start``."""

    start: int
    length: int
    witness: ZeroEntry


Certificate = Union[ZeroColumn, ZeroEntry, MajorizationZero, SupportCycle]


def check_certificate(t: BooleanTensor, cert: Certificate) -> bool:
    """Independently validate ``cert`` against ``t``."""
    from . import engine

    if isinstance(cert, ZeroColumn):
        if len(cert.alpha) != t.order - 1:
            return False
        return not any(t.entry((i,) + tuple(cert.alpha)) for i in range(1, t.dim + 1))
    if isinstance(cert, ZeroEntry):
        return not engine.power_entry(t, cert.k, cert.row, cert.index)
    if isinstance(cert, MajorizationZero):
        idx = all_equal_tree(cert.column, t.order - 1, cert.k)
        return not engine.power_entry(t, cert.k, cert.row, idx)
    if isinstance(cert, SupportCycle):
        if cert.length < 1 or cert.witness.k != cert.start:
            return False
        fams = engine.support_families(t, cert.start + cert.length)
        first = fams[cert.start - 1].members
        again = fams[cert.start + cert.length - 1].members
        full = (1 << t.dim) - 1
        if first != again or first == frozenset({full}):
            return False
        return check_certificate(t, cert.witness)
    raise TypeError(f"not a certificate: {cert!r}")


def certificate_to_json(cert: Certificate) -> dict[str, Any]:
    if isinstance(cert, ZeroColumn):
        return {"type": "zero_column", "alpha": list(cert.alpha)}
    if isinstance(cert, ZeroEntry):
        return {
            "type": "zero_entry",
            "k": cert.k,
            "row": cert.row,
            "index": nested_to_json(cert.index),
        }
    if isinstance(cert, MajorizationZero):
        return {
            "type": "majorization_zero",
            "k": cert.k,
            "row": cert.row,
            "column": cert.column,
        }
    if isinstance(cert, SupportCycle):
        return {
            "type": "support_cycle",
            "start": cert.start,
            "length": cert.length,
            "witness": certificate_to_json(cert.witness),
        }
    raise TypeError(f"not a certificate: {cert!r}")


def certificate_from_json(obj: dict[str, Any]) -> Certificate:
    kind = obj.get("type")
    try:
        if kind == "zero_column":
            return ZeroColumn(tuple(int(x) for x in obj["alpha"]))
        if kind == "zero_entry":
            return ZeroEntry(int(obj["k"]), int(obj["row"]), nested_from_json(obj["index"]))
        if kind == "majorization_zero":
            return MajorizationZero(int(obj["k"]), int(obj["row"]), int(obj["column"]))
        if kind == "support_cycle":
            witness = certificate_from_json(obj["witness"])
            if not isinstance(witness, ZeroEntry):
                raise ValueError("support_cycle witness must be a zero_entry")
            return SupportCycle(int(obj["start"]), int(obj["length"]), witness)
    except KeyError as exc:
        raise ValueError(f"certificate of type {kind!r} is missing field {exc}") from None
    raise ValueError(f"unknown certificate type {kind!r}")
