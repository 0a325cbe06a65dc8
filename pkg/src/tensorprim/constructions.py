"""Named tensor and matrix families."""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from .tensor import BooleanTensor, majorization


def wielandt_matrix(n: int) -> BooleanTensor:
    """The ``n x n`` pattern with exponent ``(n-1)^2 + 1``.

    Row 1 has ones in columns ``n-1`` and ``n``, rows ``2..n`` have a single
    one just below the diagonal.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    a = np.zeros((n, n), dtype=bool)
    a[0, n - 2] = a[0, n - 1] = True
    for i in range(1, n):
        a[i, i - 1] = True
    return BooleanTensor(a)


def _residue(x: int, n: int) -> int:
    """Representative of ``x mod n`` in ``1..n``."""
    return (x - 1) % n + 1


def shifted_wielandt_range(n: int) -> range:
    return range(0, n * n - 3 * n + 3)


def shifted_wielandt_tensor(m: int, n: int, k: int, reading: str = "exact") -> BooleanTensor:
    """Tensor with majorization matrix :func:`wielandt_matrix` and primitive
    degree ``k + n`` (``(n-1)^2 + 1`` when ``k == 0``).

    For ``k >= 1`` write ``k = (n-1) q + r`` with ``1 <= r <= n-1``.  Rows
    outside the window ``{r-q, ..., r+1}`` (mod n) get a one at every column
    whose set of values is exactly ``{r-q-1, r}`` (mod n).

    ``reading="subset"`` also accepts columns using only one of the two
    values, letting those override the majorization pattern; it exists so
    both readings can be checked against the stated degrees.
    """
    if m < 3 or n < 3:
        raise ValueError(f"need m >= 3 and n >= 3, got m={m}, n={n}")
    if k not in shifted_wielandt_range(n):
        raise ValueError(f"k must lie in 0..{n * n - 3 * n + 2}, got {k}")
    if reading not in ("exact", "subset"):
        raise ValueError(f"unknown reading {reading!r}")
    a = np.zeros((n,) * m, dtype=bool)
    w = wielandt_matrix(n).array
    for i in range(n):
        for j in range(n):
            a[(i,) + (j,) * (m - 1)] = w[i, j]
    if k == 0:
        return BooleanTensor(a)
    q, r = divmod(k - 1, n - 1)
    r += 1
    window = {_residue(x, n) for x in range(r - q, r + 2)}
    values = {_residue(r - q - 1, n), _residue(r, n)}
    rows = [i for i in range(1, n + 1) if i not in window]
    for alpha in itertools.product(range(1, n + 1), repeat=m - 1):
        used = set(alpha)
        hit = used == values if reading == "exact" else used <= values
        if hit:
            for i in rows:
                a[(i - 1,) + tuple(x - 1 for x in alpha)] = True
    return BooleanTensor(a)


def eta4_example() -> BooleanTensor:
    """``m = n = 3``, all ones except at 111, 222, 333, 233, 311."""
    zeros = {(1, 1, 1), (2, 2, 2), (3, 3, 3), (2, 3, 3), (3, 1, 1)}
    ones = [ix for ix in itertools.product((1, 2, 3), repeat=3) if ix not in zeros]
    return BooleanTensor.from_ones(3, 3, ones)


def reducible_majorization_example(m: int, n: int) -> BooleanTensor:
    """All ones except ``a[1, j, ..., j]`` for ``j != 1``.

    Strongly primitive with degree 2 although its majorization matrix is not
    primitive.
    """
    if m < 2 or n < 3:
        raise ValueError(f"need m >= 2 and n >= 3, got m={m}, n={n}")
    a = np.ones((n,) * m, dtype=bool)
    for j in range(1, n):
        a[(0,) + (j,) * (m - 1)] = False
    return BooleanTensor(a)


def slice_zeros_example() -> BooleanTensor:
    """``m = 5, n = 2``, all ones except at 12122 and 21121."""
    a = np.ones((2,) * 5, dtype=bool)
    a[0, 1, 0, 1, 1] = False
    a[1, 0, 0, 1, 0] = False
    return BooleanTensor(a)


def _forced_dominant_row(m: int, n: int, i: int) -> np.ndarray:
    if not 1 <= i <= n:
        raise ValueError(f"row {i} out of range 1..{n}")
    a = np.zeros((n,) * m, dtype=bool)
    a[i - 1] = True
    a[(slice(None),) + (i - 1,) * (m - 1)] = True
    return a


def dominant_row_tensor(
    m: int,
    n: int,
    i: int,
    extra: Optional[Iterable[Sequence[int]]] = None,
    allow_all_ones: bool = False,
) -> BooleanTensor:
    """Row ``i`` all ones, plus ``a[j, i, ..., i] = 1`` for every ``j``.

    Any such pattern other than all-ones has ``A^2 > 0``.  ``extra`` lists
    further 1-based positions to switch on.
    """
    a = _forced_dominant_row(m, n, i).copy()
    for idx in extra or ():
        a[tuple(x - 1 for x in idx)] = True
    if a.all() and not allow_all_ones:
        raise ValueError("the all-ones pattern must be requested explicitly")
    return BooleanTensor(a)


def dominant_row_patterns(m: int, n: int, i: int) -> Iterator[BooleanTensor]:
    """Every :func:`dominant_row_tensor` for row ``i`` except all-ones."""
    forced = _forced_dominant_row(m, n, i)
    free = np.flatnonzero(~forced.reshape(-1))
    for bits in itertools.product((False, True), repeat=free.size):
        flat = forced.reshape(-1).copy()
        flat[free] = bits
        if not flat.all():
            yield BooleanTensor(flat.reshape(forced.shape))


def two_cycle_tensor(
    m: int, n: int, i: int, j: int, filler: Optional[BooleanTensor] = None
) -> BooleanTensor:
    """Majorization columns ``i`` and ``j`` each have a single positive, at
    rows ``j`` and ``i`` respectively, so the two columns swap forever and no
    power is essentially positive.

    ``filler`` supplies the remaining entries; by default they are all ones.
    """
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"need distinct rows in 1..{n}, got {i}, {j}")
    if filler is None:
        a = np.ones((n,) * m, dtype=bool)
        a[(slice(None),) + (j - 1,) * (m - 1)] = False
        a[(slice(None),) + (i - 1,) * (m - 1)] = False
    else:
        if (filler.order, filler.dim) != (m, n):
            raise ValueError("filler shape does not match")
        a = filler.array.copy()
        mj = a[(slice(None),) + (j - 1,) * (m - 1)].copy()
        mi = a[(slice(None),) + (i - 1,) * (m - 1)].copy()
        mj[i - 1] = mi[j - 1] = False
        if mj.any() or mi.any():
            raise ValueError(
                f"filler has positives in majorization columns {i} or {j} "
                "outside the permitted rows"
            )
    a[(i - 1,) + (j - 1,) * (m - 1)] = True
    a[(j - 1,) + (i - 1,) * (m - 1)] = True
    return BooleanTensor(a)


def diagonal_tensor(m: int, n: int) -> BooleanTensor:
    a = np.zeros((n,) * m, dtype=bool)
    for i in range(n):
        a[(i,) * m] = True
    return BooleanTensor(a)


def check_shifted_wielandt(m: int, n: int, reading: str = "exact") -> list[tuple[int, int, Optional[int]]]:
    """Compare every ``k`` against its expected primitive degree.

    Returns ``(k, expected, got)`` for each mismatch; empty means the family
    behaves as stated.
    """
    from .engine import gamma, wielandt_cap

    bad = []
    w = wielandt_matrix(n)
    for k in shifted_wielandt_range(n):
        t = shifted_wielandt_tensor(m, n, k, reading)
        expected = wielandt_cap(n) if k == 0 else k + n
        got = gamma(t).degree
        if got != expected or majorization(t) != w:
            bad.append((k, expected, got))
    return bad


# name -> (builder, required parameters)
NAMED: dict[str, tuple[Callable[..., BooleanTensor], tuple[str, ...]]] = {
    "eta4": (lambda: eta4_example(), ()),
    "reducible-majorization": (reducible_majorization_example, ("m", "n")),
    "slice-zeros": (lambda: slice_zeros_example(), ()),
    "shifted-wielandt": (shifted_wielandt_tensor, ("m", "n", "k")),
    "wielandt": (wielandt_matrix, ("n",)),
    "dominant-row": (dominant_row_tensor, ("m", "n", "i")),
    "two-cycle": (two_cycle_tensor, ("m", "n", "i", "j")),
    "all-ones": (BooleanTensor.ones, ("m", "n")),
    "diagonal": (diagonal_tensor, ("m", "n")),
}


def named_example(name: str, **params: int) -> BooleanTensor:
    try:
        builder, needed = NAMED[name]
    except KeyError:
        raise ValueError(f"unknown construction {name!r}; choose from {sorted(NAMED)}") from None
    missing = [p for p in needed if params.get(p) is None]
    if missing:
        raise ValueError(f"{name} needs parameters: {', '.join(missing)}")
    return builder(*(params[p] for p in needed))
