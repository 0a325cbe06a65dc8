"""Boolean matrix primitivity and exponent."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .tensor import BooleanTensor


def _as_bool_matrix(mat) -> np.ndarray:
    if isinstance(mat, BooleanTensor):
        if mat.order != 2:
            raise ValueError(f"expected an order-2 pattern, got order {mat.order}")
        return mat.array
    a = np.asarray(mat).astype(bool)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def bool_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x.astype(np.int64) @ y.astype(np.int64)) > 0


def mat_exponent(mat) -> Optional[int]:
    """Least ``e`` with ``M^e`` all-positive, or ``None`` if ``M`` is not primitive.

    Powers are formed one multiplication at a time up to Wielandt's bound
    ``(n-1)^2 + 1``; a primitive matrix always reaches positivity by then.
    """
    a = _as_bool_matrix(mat)
    n = a.shape[0]
    p = a.copy()
    for e in range(1, (n - 1) ** 2 + 2):
        if p.all():
            return e
        p = bool_matmul(p, a)
    return None


def is_primitive_matrix(mat) -> bool:
    return mat_exponent(mat) is not None
