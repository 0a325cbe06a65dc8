"""Reference implementation of tensor powers, independent of the package.

``(A B)[i, b_1, ..., b_{m-1}] = OR over x of a[i, x_1..x_{m-1}] AND
B[x_1, b_1] AND ... AND B[x_{m-1}, b_{m-1}]``, with ``B`` viewed as a
matrix of rows by columns.  Each positive entry of ``A`` contributes the
outer product of the selected rows of ``B``.
"""

from __future__ import annotations

import itertools
from functools import reduce

import numpy as np


def from_code(code: int, m: int, n: int) -> np.ndarray:
    size = n**m
    flat = np.array([(code >> (size - 1 - p)) & 1 for p in range(size)], dtype=bool)
    return flat.reshape((n,) * m)


def product_rows(a: np.ndarray, b_rows: np.ndarray) -> np.ndarray:
    """Rows-by-columns matrix of ``A B`` given ``B`` as rows-by-columns."""
    n, m = a.shape[0], a.ndim
    out = np.zeros((n, b_rows.shape[1] ** (m - 1)), dtype=bool)
    for i in range(n):
        acc = np.zeros(out.shape[1], dtype=bool)
        for x in itertools.product(range(n), repeat=m - 1):
            if a[(i,) + x]:
                acc |= reduce(np.multiply.outer, [b_rows[t] for t in x]).reshape(-1)
        out[i] = acc
    return out


def power_rows(a: np.ndarray, k: int) -> np.ndarray:
    n = a.shape[0]
    rows = a.reshape(n, -1)
    for _ in range(k - 1):
        rows = product_rows(a, rows)
    return rows


def column_supports(rows: np.ndarray) -> set[int]:
    weights = 1 << np.arange(rows.shape[0])
    return set((rows.astype(np.int64) * weights[:, None]).sum(axis=0).tolist())


def majorization_positive(rows: np.ndarray, k: int, m: int) -> bool:
    n = rows.shape[0]
    width = (m - 1) ** k
    for j in range(n):
        col = np.ravel_multi_index((j,) * width, (n,) * width)
        if not rows[:, col].all():
            return False
    return True


def degrees_up_to(a: np.ndarray, kmax: int) -> tuple:
    """Least ``k <= kmax`` with the majorization matrix, resp. the whole
    power, positive; ``None`` if not reached."""
    m = a.ndim
    g = e = None
    for k in range(1, kmax + 1):
        rows = power_rows(a, k)
        if g is None and majorization_positive(rows, k, m):
            g = k
        if e is None and rows.all():
            e = k
    return g, e
