"""Primitive and strongly primitive degrees from zero patterns.

Writing a column of ``A^k`` as ``m-1`` blocks ``b_2..b_m`` (columns of
``A^(k-1)``), the row ``i`` entry is positive iff some positive entry
``a[i, i_2, ..., i_m]`` has every ``i_t`` in the support of block ``b_t``.
So the set of rows where a column of ``A^k`` is positive depends only on the
supports of its blocks one level down, through a fixed map ``g``.  The family
of all column supports of ``A^k`` therefore evolves deterministically over a
finite state space, which is what :func:`eta` iterates.

Support sets are ``n``-bit ints: bit ``i-1`` stands for row ``i``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .certificates import (
    Certificate,
    MajorizationZero,
    SupportCycle,
    ZeroColumn,
    ZeroEntry,
)
from .nested import NestedIndex, all_equal_tree, tree_depth
from .tensor import MAX_ENTRIES, BooleanTensor, SizeGuardError

# dense g-table when log2 of its size, n*(m-1), stays under this
DENSE_TABLE_BITS = 20


@dataclass(frozen=True)
class DegreeResult:
    """``degree`` is ``None`` exactly when the property fails; then
    ``certificate`` explains why."""

    degree: Optional[int]
    certificate: Optional[Certificate] = None

    @property
    def holds(self) -> bool:
        return self.degree is not None


@dataclass
class SupportFamily:
    """All column supports of ``A^level``.

    ``realizers`` maps each member to how it arises: a 1-based column index
    at level 1, otherwise a tuple of ``m-1`` members of the previous level.
    """

    level: int
    members: frozenset
    realizers: dict = field(repr=False)

    def is_full(self, dim: int) -> bool:
        return self.members == frozenset({(1 << dim) - 1})


def mask_to_set(mask: int) -> set[int]:
    return {i + 1 for i in range(mask.bit_length()) if mask >> i & 1}


def set_to_mask(rows) -> int:
    out = 0
    for i in rows:
        out |= 1 << (i - 1)
    return out


class _Kernel:
    """Per-tensor cache: column supports and the g map."""

    def __init__(self, t: BooleanTensor):
        if t.order < 2:
            raise ValueError("tensors of order >= 2 only")
        self.t = t
        self.m = t.order
        self.n = t.dim
        self.full = (1 << self.n) - 1
        a = t.array.reshape(self.n, -1)
        weights = (1 << np.arange(self.n, dtype=np.int64))[:, None]
        self.col_masks = (a * weights).sum(axis=0)
        self.table = None
        self.memo: dict[tuple[int, ...], int] = {}
        if self.n * (self.m - 1) <= DENSE_TABLE_BITS:
            self.table = _dense_g_table(t)

    def g(self, supports: Sequence[int]) -> int:
        if self.table is not None:
            return int(self.table[tuple(supports)])
        key = tuple(supports)
        hit = self.memo.get(key)
        if hit is None:
            hit = _g_direct(self.t, key)
            self.memo[key] = hit
        return hit

    def initial(self) -> SupportFamily:
        realizers: dict[int, tuple[int, ...]] = {}
        shape = (self.n,) * (self.m - 1)
        for flat, mask in enumerate(self.col_masks.tolist()):
            if mask not in realizers:
                alpha = np.unravel_index(flat, shape)
                realizers[mask] = tuple(int(x) + 1 for x in alpha)
        return SupportFamily(1, frozenset(realizers), realizers)

    def step(self, fam: SupportFamily) -> SupportFamily:
        mem = sorted(fam.members)
        arity = self.m - 1
        realizers: dict[int, tuple[int, ...]] = {}
        if self.table is not None:
            sub = self.table[np.ix_(*([np.array(mem)] * arity))]
            values, first = np.unique(sub.reshape(-1), return_index=True)
            coords = np.unravel_index(first, sub.shape)
            for v, *c in zip(values.tolist(), *[x.tolist() for x in coords]):
                realizers[v] = tuple(mem[j] for j in c)
        else:
            for combo in itertools.product(mem, repeat=arity):
                v = self.g(combo)
                if v not in realizers:
                    realizers[v] = combo
        return SupportFamily(fam.level + 1, frozenset(realizers), realizers)


def _dense_g_table(t: BooleanTensor) -> np.ndarray:
    """``table[c_2, ..., c_m]`` = g over all support tuples, by subset DP per axis."""
    n, m = t.dim, t.order
    s = t.array.astype(bool)
    # replace each index axis (length n) by a subset axis (length 2^n)
    for axis in range(1, m):
        moved = np.moveaxis(s, axis, 0)
        out = np.zeros((1 << n,) + moved.shape[1:], dtype=bool)
        for c in range(1, 1 << n):
            low = c & -c
            out[c] = out[c ^ low] | moved[low.bit_length() - 1]
        s = np.moveaxis(out, 0, axis)
    weights = (1 << np.arange(n, dtype=np.int64)).reshape((n,) + (1,) * (m - 1))
    return (s * weights).sum(axis=0)


def _g_direct(t: BooleanTensor, supports: tuple[int, ...]) -> int:
    if any(c == 0 for c in supports):
        return 0
    rows = [np.array(sorted(r - 1 for r in mask_to_set(c))) for c in supports]
    a = t.array
    out = 0
    for i in range(t.dim):
        if a[i][np.ix_(*rows)].any():
            out |= 1 << i
    return out


# -- public operations ----------------------------------------------------


def column_support(t: BooleanTensor, alpha: Sequence[int]) -> int:
    """Rows ``i`` with ``t[i, alpha] == 1`` as a mask."""
    alpha = tuple(alpha)
    if len(alpha) != t.order - 1:
        raise ValueError(f"column index must have length {t.order - 1}")
    return set_to_mask(i for i in range(1, t.dim + 1) if t.entry((i,) + alpha))


def g_map(t: BooleanTensor, *supports: int) -> int:
    """Rows ``i`` having a positive entry ``t[i, i_2..i_m]`` with each
    ``i_j`` inside ``supports[j-2]``."""
    if len(supports) != t.order - 1:
        raise ValueError(f"g takes {t.order - 1} supports, got {len(supports)}")
    full = (1 << t.dim) - 1
    for c in supports:
        if not 0 <= c <= full:
            raise ValueError(f"support mask {c} out of range for n={t.dim}")
    return _g_direct(t, tuple(supports))


def initial_family(t: BooleanTensor) -> SupportFamily:
    return _Kernel(t).initial()


def step_family(t: BooleanTensor, fam: SupportFamily) -> SupportFamily:
    return _Kernel(t).step(fam)


def support_families(t: BooleanTensor, levels: int) -> list[SupportFamily]:
    """Families for levels ``1..levels``."""
    k = _Kernel(t)
    fams = [k.initial()]
    while len(fams) < levels:
        fams.append(k.step(fams[-1]))
    return fams


class _Trajectory:
    """Family sequence up to its first repeat, with periodic lookup beyond.

    ``{full}`` maps to itself, so a strongly primitive tensor ends in a
    cycle of length 1 at ``full_at``.
    """

    def __init__(self, t: BooleanTensor, kernel: Optional[_Kernel] = None):
        self.kernel = kernel or _Kernel(t)
        fam = self.kernel.initial()
        self.fams = [fam]
        seen = {fam.members: 1}
        while True:
            fam = self.kernel.step(fam)
            self.fams.append(fam)
            if fam.members in seen:
                self.start = seen[fam.members]
                self.length = fam.level - self.start
                break
            seen[fam.members] = fam.level
        self.full_at = next(
            (f.level for f in self.fams if f.is_full(t.dim)), None
        )

    def family(self, level: int) -> SupportFamily:
        if level <= len(self.fams):
            return self.fams[level - 1]
        # levels past start are periodic; the stored copy at rep has realizers
        # drawn from a level congruent to level - 1
        base = self.start + 1
        rep = base + (level - base) % self.length
        return self.fams[rep - 1]

    def unfold(self, level: int, mask: int) -> NestedIndex:
        """Concrete column index of ``A^level`` whose support is ``mask``."""
        memo: dict[tuple[int, int], NestedIndex] = {}
        # iterative post-order to avoid deep recursion at large levels
        stack = [(level, mask, False)]
        while stack:
            lv, mk, ready = stack.pop()
            if (lv, mk) in memo:
                continue
            real = self.family(lv).realizers[mk]
            if lv == 1:
                memo[(lv, mk)] = tuple(real)
                continue
            if ready:
                memo[(lv, mk)] = tuple(memo[(lv - 1, c)] for c in real)
            else:
                stack.append((lv, mk, True))
                stack.extend((lv - 1, c, False) for c in real if (lv - 1, c) not in memo)
        return memo[(level, mask)]

    def witness(self, level: int) -> Optional[tuple[int, NestedIndex]]:
        fam = self.family(level)
        full = self.kernel.full
        for mask in sorted(fam.members):
            if mask != full:
                row = next(i + 1 for i in range(self.kernel.n) if not mask >> i & 1)
                return row, self.unfold(level, mask)
        return None


def eta(t: BooleanTensor) -> DegreeResult:
    """Strongly primitive degree: least ``k`` with ``A^k`` entrywise positive."""
    k = _Kernel(t)
    zero = np.flatnonzero(k.col_masks == 0)
    if zero.size:
        alpha = np.unravel_index(int(zero[0]), (t.dim,) * (t.order - 1))
        return DegreeResult(None, ZeroColumn(tuple(int(x) + 1 for x in alpha)))
    traj = _Trajectory(t, k)
    if traj.full_at is not None:
        return DegreeResult(traj.full_at)
    row, idx = traj.witness(traj.start)
    cert = SupportCycle(traj.start, traj.length, ZeroEntry(traj.start, row, idx))
    return DegreeResult(None, cert)


def wielandt_cap(n: int) -> int:
    return (n - 1) ** 2 + 1


def gamma(t: BooleanTensor) -> DegreeResult:
    """Primitive degree: least ``r`` with ``M(A^r)`` entrywise positive.

    The search stops at ``(n-1)^2 + 1``; no primitive tensor needs more.
    Columns ``(j, ..., j)`` of a power split into ``m-1`` equal blocks, so each
    majorization column follows its own orbit under ``c -> g(c, ..., c)``.
    """
    k = _Kernel(t)
    n, m = t.dim, t.order
    diag_flat = [np.ravel_multi_index((j,) * (m - 1), (n,) * (m - 1)) for j in range(n)]
    d = [int(k.col_masks[f]) for f in diag_flat]
    cap = wielandt_cap(n)
    for r in range(1, cap + 1):
        if all(c == k.full for c in d):
            return DegreeResult(r)
        if r == cap:
            break
        d = [k.g((c,) * (m - 1)) for c in d]
    j = next(j for j, c in enumerate(d) if c != k.full)
    row = next(i for i in range(n) if not d[j] >> i & 1)
    return DegreeResult(None, MajorizationZero(cap, row + 1, j + 1))


def family_at(t: BooleanTensor, level: int) -> SupportFamily:
    """Support family of ``A^level``, using periodicity for large levels."""
    if level < 1:
        raise ValueError("level must be >= 1")
    return _Trajectory(t).family(level)


def zero_witness(t: BooleanTensor, level: int) -> Optional[tuple[int, NestedIndex]]:
    """A ``(row, index)`` with ``(A^level)[row, index] == 0``, or ``None`` if
    ``A^level`` is positive."""
    if level < 1:
        raise ValueError("level must be >= 1")
    return _Trajectory(t).witness(level)


def explicit_power(t: BooleanTensor, k: int) -> BooleanTensor:
    """Boolean pattern of ``A^k`` materialized entry by entry.

    Straight from the definition of the general product, with no use of
    support families; serves as the oracle for everything above.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    m, n = t.order, t.dim
    order = (m - 1) ** k + 1
    if order * math.log2(max(n, 2)) > math.log2(MAX_ENTRIES) + 1e-9 and n > 1:
        raise SizeGuardError(
            f"A^{k} has {n}^{order} entries, over the dense storage guard of 2^34"
        )
    a = t.array.astype(np.int64)
    power = a.reshape(n, -1)
    for _ in range(k - 1):
        x = a
        # contract i_2, ..., i_m in turn; each new block axis lands at the end
        for _ in range(m - 1):
            x = np.tensordot(x, power, axes=([1], [0]))
            x = np.minimum(x, 1)
        power = x.reshape(n, -1)
    return BooleanTensor(power.reshape((n,) * order).astype(bool))


def power_entry(t: BooleanTensor, k: int, row: int, index) -> bool:
    """Entry of ``A^k`` at ``(row, flatten(index))`` without materializing ``A^k``.

    ``index`` is a depth-``k`` tree, i.e. the ``m-1`` block subtrees of depth
    ``k-1``.  Supports are memoized per subtree object, so shared subtrees are
    evaluated once.
    """
    from .nested import freeze

    index = freeze(index)
    m, n = t.order, t.dim
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 1 <= row <= n:
        raise ValueError(f"row {row} out of range 1..{n}")
    if isinstance(index, int):
        raise ValueError("index must have m-1 blocks")
    depth = tree_depth(index, m - 1, n)
    if depth != k:
        raise ValueError(f"index has depth {depth}, expected {k}")
    a = t.array
    memo: dict[int, np.ndarray] = {}

    def support(node) -> np.ndarray:
        key = id(node)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(node, int):
            out = np.zeros(n, dtype=bool)
            out[node - 1] = True
        else:
            rows = [np.flatnonzero(support(child)) for child in node]
            if any(r.size == 0 for r in rows):
                out = np.zeros(n, dtype=bool)
            else:
                out = np.array([a[i][np.ix_(*rows)].any() for i in range(n)])
        memo[key] = out
        return out

    return bool(support(index)[row - 1])


def is_strongly_primitive(t: BooleanTensor) -> bool:
    return eta(t).holds


def is_primitive(t: BooleanTensor) -> bool:
    return gamma(t).holds


__all__ = [
    "DegreeResult",
    "SupportFamily",
    "all_equal_tree",
    "column_support",
    "eta",
    "explicit_power",
    "family_at",
    "g_map",
    "gamma",
    "initial_family",
    "is_primitive",
    "is_strongly_primitive",
    "mask_to_set",
    "power_entry",
    "set_to_mask",
    "step_family",
    "support_families",
    "wielandt_cap",
    "zero_witness",
]
