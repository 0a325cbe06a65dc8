"""Zero patterns of nonnegative tensors.

A :class:`BooleanTensor` stores one bit per entry of an order ``m``, dimension
``n`` tensor: ``True`` means the entry is strictly positive.  Entries are laid
out row-major with the last index varying fastest.  Multi-indices passed to the
public API are 1-based; the backing numpy array is indexed 0-based.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

MAX_ENTRIES = 2**34
MAX_CANONICAL_DIM = 8


class SizeGuardError(ValueError):
    """Raised when a shape exceeds the dense storage guard."""


def _check_shape(order: int, dim: int) -> None:
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    if dim**order > MAX_ENTRIES:
        raise SizeGuardError(
            f"{dim}^{order} entries exceeds the dense storage guard of 2^34"
        )


class BooleanTensor:
    """Immutable zero pattern of an order-``m`` dimension-``n`` tensor."""

    __slots__ = ("order", "dim", "_a", "_key")

    def __init__(self, array: np.ndarray):
        a = np.asarray(array)
        if a.ndim < 1:
            raise ValueError("a tensor needs at least one axis")
        dim = a.shape[0]
        if any(s != dim for s in a.shape):
            raise ValueError(f"all axes must have equal length, got shape {a.shape}")
        _check_shape(a.ndim, dim)
        a = np.array(a, dtype=bool, copy=True)
        a.flags.writeable = False
        self.order = a.ndim
        self.dim = dim
        self._a = a
        self._key = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zeros(cls, order: int, dim: int) -> "BooleanTensor":
        _check_shape(order, dim)
        return cls(np.zeros((dim,) * order, dtype=bool))

    @classmethod
    def ones(cls, order: int, dim: int) -> "BooleanTensor":
        _check_shape(order, dim)
        return cls(np.ones((dim,) * order, dtype=bool))

    @classmethod
    def from_ones(
        cls, order: int, dim: int, ones: Iterable[Sequence[int]]
    ) -> "BooleanTensor":
        if order < 2:
            raise ValueError(f"order must be >= 2, got {order}")
        _check_shape(order, dim)
        a = np.zeros((dim,) * order, dtype=bool)
        for idx in ones:
            a[_zero_based(idx, order, dim)] = True
        return cls(a)

    @classmethod
    def from_dense(cls, order: int, dim: int, dense: str) -> "BooleanTensor":
        _check_shape(order, dim)
        if len(dense) != dim**order:
            raise ValueError(
                f"dense string has length {len(dense)}, expected {dim**order}"
            )
        if set(dense) - {"0", "1"}:
            raise ValueError("dense string may only contain '0' and '1'")
        flat = np.frombuffer(dense.encode("ascii"), dtype=np.uint8) == ord("1")
        return cls(flat.reshape((dim,) * order))

    @classmethod
    def from_code(cls, order: int, dim: int, code: int) -> "BooleanTensor":
        """Inverse of :attr:`code`: the first entry is the most significant bit."""
        _check_shape(order, dim)
        size = dim**order
        if code < 0 or code >> size:
            raise ValueError(f"code does not fit in {size} bits")
        raw = code.to_bytes((size + 7) // 8, "big")
        flat = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[-size:]
        return cls(flat.astype(bool).reshape((dim,) * order))

    # -- accessors --------------------------------------------------------

    @property
    def array(self) -> np.ndarray:
        """Read-only boolean array of shape ``(n,) * m``."""
        return self._a

    @property
    def size(self) -> int:
        return self._a.size

    @property
    def code(self) -> int:
        """Packed bit array read as an unsigned integer, first entry most significant."""
        flat = self._a.reshape(-1)
        pad = (-flat.size) % 8
        packed = np.packbits(np.concatenate([np.zeros(pad, bool), flat]))
        return int.from_bytes(packed.tobytes(), "big")

    def hex(self) -> str:
        return format(self.code, f"0{(self.size + 3) // 4}x")

    def entry(self, idx: Sequence[int]) -> bool:
        return bool(self._a[_zero_based(idx, self.order, self.dim)])

    def slice(self, i: int) -> "BooleanTensor":
        if not 1 <= i <= self.dim:
            raise IndexError(f"slice {i} out of range 1..{self.dim}")
        return BooleanTensor(self._a[i - 1])

    def ones_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) + 1 for x in ix) for ix in zip(*np.nonzero(self._a))]

    def to_dense(self) -> str:
        return "".join("1" if b else "0" for b in self._a.reshape(-1))

    def count(self) -> int:
        return int(self._a.sum())

    def is_all_ones(self) -> bool:
        return bool(self._a.all())

    def __eq__(self, other):
        if not isinstance(other, BooleanTensor):
            return NotImplemented
        return self.order == other.order and self.dim == other.dim and bool(
            np.array_equal(self._a, other._a)
        )

    def __hash__(self):
        if self._key is None:
            self._key = hash((self.order, self.dim, np.packbits(self._a).tobytes()))
        return self._key

    def __repr__(self):
        zeros = self.size - self.count()
        return f"BooleanTensor(order={self.order}, dim={self.dim}, zeros={zeros})"


def _zero_based(idx: Sequence[int], order: int, dim: int) -> tuple[int, ...]:
    idx = tuple(idx)
    if len(idx) != order:
        raise ValueError(f"index {idx} has length {len(idx)}, expected {order}")
    for x in idx:
        if not isinstance(x, (int, np.integer)) or not 1 <= x <= dim:
            raise IndexError(f"index component {x!r} out of range 1..{dim}")
    return tuple(int(x) - 1 for x in idx)


def from_ones(order: int, dim: int, ones: Iterable[Sequence[int]]) -> BooleanTensor:
    return BooleanTensor.from_ones(order, dim, ones)


def entry(t: BooleanTensor, idx: Sequence[int]) -> bool:
    return t.entry(idx)


def slice_of(t: BooleanTensor, i: int) -> BooleanTensor:
    """The order ``m-1`` subtensor obtained by fixing the first index to ``i``."""
    return t.slice(i)


def majorization(t: BooleanTensor) -> BooleanTensor:
    """Matrix with entry ``(i, j)`` equal to ``t[i, j, ..., j]``."""
    n = t.dim
    j = np.arange(n)
    cols = (j,) * (t.order - 1)
    # fancy index over the diagonal of the trailing axes
    m = t.array[(slice(None),) + cols]
    return BooleanTensor(m)


def is_essentially_positive(t: BooleanTensor) -> bool:
    return bool(majorization(t).array.all())


def _as_perm(perm: Sequence[int], n: int) -> np.ndarray:
    p = [int(x) for x in perm]
    if sorted(p) != list(range(1, n + 1)):
        raise ValueError(f"{list(perm)} is not a permutation of 1..{n}")
    return np.array(p) - 1


def relabel(t: BooleanTensor, perm: Sequence[int]) -> BooleanTensor:
    """Simultaneous relabeling: result[i_1..i_m] = t[perm(i_1)..perm(i_m)].

    ``perm`` lists the images of ``1..n`` (1-based).
    """
    p = _as_perm(perm, t.dim)
    return BooleanTensor(t.array[np.ix_(*([p] * t.order))])


def position_permutations(order: int, dim: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """All ``n!`` relabelings as gathers on flat entry positions.

    Returns the permutations (0-based) and an int array ``g`` of shape
    ``(n!, n**m)`` with ``relabel(t, p).flat[q] == t.flat[g[k, q]]``.
    """
    perms = list(itertools.permutations(range(dim)))
    base = np.arange(dim**order).reshape((dim,) * order)
    gathers = np.stack(
        [base[np.ix_(*([np.array(p)] * order))].reshape(-1) for p in perms]
    )
    return perms, gathers


def canonical_code(t: BooleanTensor) -> int:
    """Smallest :attr:`BooleanTensor.code` over all ``n!`` relabelings."""
    if t.dim > MAX_CANONICAL_DIM:
        raise SizeGuardError(
            f"canonical form enumerates n! relabelings; n={t.dim} exceeds {MAX_CANONICAL_DIM}"
        )
    _, gathers = position_permutations(t.order, t.dim)
    flat = t.array.reshape(-1)
    images = flat[gathers]
    # lexicographic minimum over rows == numeric minimum of the codes
    best = min(range(len(images)), key=lambda r: images[r].tobytes())
    return BooleanTensor(images[best].reshape((t.dim,) * t.order)).code


def canonical_key(t: BooleanTensor) -> str:
    return format(canonical_code(t), f"0{(t.size + 3) // 4}x")
