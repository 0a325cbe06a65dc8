"""Cheap structural tests that rule out (strong) primitivity.

All checks here are necessary conditions.  A failed check is a sound
negative verdict; a passed check proves nothing.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .nested import NestedIndex
from .tensor import BooleanTensor, majorization

# bit positions in FilterReport.bits()
FILTER_FIELDS = (
    "every_column_nonzero",
    "every_slice_nonzero",
    "offdiagonal_in_each_majorization_column",
    "majorization_column_with_two_positives",
    "strong_two_positive_column",
    "isolated_two_cycle",
    "near_singleton_columns",
)


@dataclass(frozen=True)
class FilterReport:
    every_column_nonzero: bool
    every_slice_nonzero: bool
    offdiagonal_in_each_majorization_column: bool
    majorization_column_with_two_positives: bool
    # same test as the previous field; listed separately because it is the
    # form that applies to strongly primitive tensors
    strong_two_positive_column: bool
    isolated_two_cycle: bool
    near_singleton_columns: bool

    @property
    def cannot_be_primitive(self) -> bool:
        return (
            not self.offdiagonal_in_each_majorization_column
            or not self.majorization_column_with_two_positives
            or self.isolated_two_cycle
        )

    @property
    def cannot_be_strongly_primitive(self) -> bool:
        return (
            not self.every_column_nonzero
            or not self.every_slice_nonzero
            or self.near_singleton_columns
            or self.cannot_be_primitive
        )

    def bits(self) -> int:
        return sum(1 << b for b, name in enumerate(FILTER_FIELDS) if getattr(self, name))

    def as_dict(self) -> dict:
        out = asdict(self)
        out["cannot_be_primitive"] = self.cannot_be_primitive
        out["cannot_be_strongly_primitive"] = self.cannot_be_strongly_primitive
        return out


def _column_masks(t: BooleanTensor) -> np.ndarray:
    a = t.array.reshape(t.dim, -1)
    return (a * (1 << np.arange(t.dim, dtype=np.int64))[:, None]).sum(axis=0)


def find_isolated_two_cycle(t: BooleanTensor) -> Optional[tuple[int, int]]:
    """Rows ``(i, j)`` such that majorization column ``j`` is positive only at
    row ``i`` and column ``i`` only at row ``j``."""
    mat = majorization(t).array
    n = t.dim
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            col_j, col_i = mat[:, j], mat[:, i]
            if col_j[i] and col_j.sum() == 1 and col_i[j] and col_i.sum() == 1:
                return i + 1, j + 1
    return None


def near_singleton_columns(t: BooleanTensor) -> Optional[list[tuple[int, ...]]]:
    """For each ``s`` a column positive at most in row ``s``, or ``None``.

    Such columns make every power keep ``n-1`` zeros in each slice.  Needs
    ``n >= 2``.
    """
    n = t.dim
    if n < 2:
        return None
    masks = _column_masks(t)
    shape = (n,) * (t.order - 1)
    picks = []
    for s in range(n):
        ok = np.flatnonzero((masks & ~(1 << s)) == 0)
        if ok.size == 0:
            return None
        picks.append(tuple(int(x) + 1 for x in np.unravel_index(int(ok[0]), shape)))
    return picks


def filter_report(t: BooleanTensor) -> FilterReport:
    n = t.dim
    masks = _column_masks(t)
    mat = majorization(t).array
    if n >= 2:
        offdiag = all(
            any(mat[i, j] for i in range(n) if i != j) for j in range(n)
        )
        two_pos = bool((mat.sum(axis=0) >= 2).any())
    else:
        # both conditions are vacuous for a single row
        offdiag = two_pos = True
    return FilterReport(
        every_column_nonzero=bool((masks != 0).all()),
        every_slice_nonzero=bool(t.array.reshape(n, -1).any(axis=1).all()),
        offdiagonal_in_each_majorization_column=offdiag,
        majorization_column_with_two_positives=two_pos,
        strong_two_positive_column=two_pos,
        isolated_two_cycle=find_isolated_two_cycle(t) is not None,
        near_singleton_columns=near_singleton_columns(t) is not None,
    )


class Dim2Case(enum.Enum):
    ALL_ONES = "all-ones"
    FIRST_SLICE_FULL = "first-slice-full"
    SECOND_SLICE_FULL = "second-slice-full"
    NOT_STRONGLY_PRIMITIVE = "not-strongly-primitive"


def classify_dim2(t: BooleanTensor) -> Dim2Case:
    """Complete description of strong primitivity for ``n = 2``."""
    if t.dim != 2:
        raise ValueError(f"classify_dim2 needs n = 2, got n = {t.dim}")
    a = t.array
    m = t.order
    if a.all():
        return Dim2Case.ALL_ONES
    if a[0].all() and a[(1,) + (0,) * (m - 1)]:
        return Dim2Case.FIRST_SLICE_FULL
    if a[1].all() and a[(0,) + (1,) * (m - 1)]:
        return Dim2Case.SECOND_SLICE_FULL
    return Dim2Case.NOT_STRONGLY_PRIMITIVE


def dim2_zero_witnesses(
    t: BooleanTensor, alpha1: Sequence[int], alpha2: Sequence[int]
) -> tuple[NestedIndex, NestedIndex]:
    """Zero entries of ``A^2`` in rows 1 and 2, for ``n = 2``.

    Needs ``t[1, alpha1] == 0`` and ``t[2, alpha2] == 0``.  Block ``b`` of
    the row-1 index is ``alpha2`` where ``alpha1`` has letter 1 and ``alpha1``
    where it has letter 2; the row-2 index is built the same way from the
    letters of ``alpha2``.
    """
    if t.dim != 2:
        raise ValueError("dim2_zero_witnesses needs n = 2")
    alpha1, alpha2 = tuple(alpha1), tuple(alpha2)
    if t.entry((1,) + alpha1) or t.entry((2,) + alpha2):
        raise ValueError("need t[1, alpha1] == 0 and t[2, alpha2] == 0")
    pick = {1: alpha2, 2: alpha1}
    return tuple(pick[x] for x in alpha1), tuple(pick[x] for x in alpha2)


def near_singleton_witnesses(
    t: BooleanTensor, columns: Sequence[Sequence[int]], depth: int
) -> list[list[tuple[int, NestedIndex]]]:
    """Zero entries of ``A^r`` for ``r = 1..depth``.

    ``columns[s-1]`` must be positive at most in row ``s``.  Level ``r``
    holds ``(i, index_k)`` for every ``i`` and every ``k != i``, where
    ``index_k`` at level ``r`` replaces each letter ``x`` of ``columns[k-1]``
    by the level ``r-1`` index for ``x``.
    """
    n = t.dim
    columns = [tuple(c) for c in columns]
    if len(columns) != n:
        raise ValueError(f"need {n} columns, got {len(columns)}")
    for s, col in enumerate(columns, start=1):
        for i in range(1, n + 1):
            if i != s and t.entry((i,) + col):
                raise ValueError(f"column {col} is positive in row {i} != {s}")
    levels = []
    current: list[NestedIndex] = list(columns)
    for r in range(1, depth + 1):
        if r > 1:
            current = [tuple(current[x - 1] for x in col) for col in columns]
        levels.append(
            [(i, current[k - 1]) for i in range(1, n + 1) for k in range(1, n + 1) if k != i]
        )
    return levels
