"""Vectorized degree computation over many small patterns at once.

Same recursion as :mod:`tensorprim.engine`, without certificates.  A support
family is held as a bitset over the ``2^n`` possible support masks (so
``n <= 6`` fits in a uint64), and ``g`` is tabulated per pattern.  Eventual
cycles in the family sequence are found with Floyd's tortoise and hare, which
needs no per-pattern history.
"""

from __future__ import annotations

import itertools

import numpy as np

MAX_BATCH_DIM = 6
MAX_TABLE = 1 << 20
# target number of booleans in the largest per-chunk intermediate
WORK_CELLS = 1 << 22

PRUNE_CHOICES = ("columns", "slices", "majorization", "two-cycle", "near-singleton")


def codes_to_bits(codes: np.ndarray, nbits: int) -> np.ndarray:
    """Unpack integer codes (first entry most significant) into a bool matrix."""
    codes = np.asarray(codes, dtype=np.uint64)
    shifts = np.arange(nbits - 1, -1, -1, dtype=np.uint64)
    return ((codes[:, None] >> shifts) & np.uint64(1)).astype(bool)


def bits_to_codes(bits: np.ndarray) -> np.ndarray:
    nbits = bits.shape[1]
    if nbits > 64:
        raise ValueError("integer codes need n^m <= 64")
    weights = np.uint64(1) << np.arange(nbits - 1, -1, -1, dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def bits_to_hex(bits: np.ndarray) -> list[str]:
    nbits = bits.shape[1]
    width = (nbits + 3) // 4
    if nbits <= 64:
        return [format(int(c), f"0{width}x") for c in bits_to_codes(bits)]
    pad = (-nbits) % 8
    packed = np.packbits(np.concatenate([np.zeros((bits.shape[0], pad), bool), bits], axis=1), axis=1)
    return [format(int.from_bytes(row.tobytes(), "big"), f"0{width}x") for row in packed]


class BatchKernel:
    """Degree and filter evaluation for patterns of one shape ``(m, n)``."""

    def __init__(self, order: int, dim: int):
        if order < 2 or dim < 1:
            raise ValueError("need m >= 2 and n >= 1")
        if dim > MAX_BATCH_DIM:
            raise ValueError(f"batch evaluation supports n <= {MAX_BATCH_DIM}")
        self.m, self.n = order, dim
        self.nmasks = 1 << dim
        self.tsize = self.nmasks ** (order - 1)
        if self.tsize > MAX_TABLE:
            raise ValueError(f"g table of {self.tsize} entries is too large for batch mode")
        self.ncols = dim ** (order - 1)
        self.full = self.nmasks - 1
        self.full_family = np.uint64(1) << np.uint64(self.full)
        self.cap = (dim - 1) ** 2 + 1
        self.diag_cols = np.array(
            [np.ravel_multi_index((j,) * (order - 1), (dim,) * (order - 1)) for j in range(dim)]
        )
        self.diag_tuples = np.array(
            [np.ravel_multi_index((c,) * (order - 1), (self.nmasks,) * (order - 1)) for c in range(self.nmasks)]
        )
        self.row_weights = (1 << np.arange(dim, dtype=np.int64))
        self.chunk = max(1, WORK_CELLS // (dim * self.tsize))

    # -- pieces -------------------------------------------------------------

    def _col_masks(self, a: np.ndarray) -> np.ndarray:
        # a: (N, n, ncols)
        return np.tensordot(a.astype(np.int64), self.row_weights, axes=([1], [0])).astype(np.int64)

    def _g_table(self, a: np.ndarray) -> np.ndarray:
        """(N, tsize) masks; same subset DP as the scalar engine, batched."""
        n, m = self.n, self.m
        s = a.reshape((a.shape[0], n) + (n,) * (m - 1))
        for axis in range(2, m + 1):
            moved = np.moveaxis(s, axis, 0)
            out = np.zeros((self.nmasks,) + moved.shape[1:], dtype=bool)
            for c in range(1, self.nmasks):
                low = c & -c
                out[c] = out[c ^ low] | moved[low.bit_length() - 1]
            s = np.moveaxis(out, 0, axis)
        masks = np.tensordot(s.astype(np.int64), self.row_weights, axes=([1], [0]))
        return masks.reshape(a.shape[0], self.tsize)

    def _step(self, fam: np.ndarray, onehot: np.ndarray) -> np.ndarray:
        mem = ((fam[:, None] >> np.arange(self.nmasks, dtype=np.uint64)) & np.uint64(1)).astype(bool)
        act = mem
        for _ in range(self.m - 2):
            act = act[..., None] & mem.reshape((mem.shape[0],) + (1,) * (act.ndim - 1) + (self.nmasks,))
        act = act.reshape(fam.shape[0], self.tsize)
        return np.bitwise_or.reduce(np.where(act, onehot, np.uint64(0)), axis=1)

    def filter_bits(self, a: np.ndarray, cmask: np.ndarray) -> np.ndarray:
        """Same bit layout as :meth:`tensorprim.screening.FilterReport.bits`."""
        n = self.n
        N = a.shape[0]
        every_col = (cmask != 0).all(axis=1)
        every_slice = a.any(axis=2).all(axis=1)
        maj = a[:, :, self.diag_cols]  # (N, row, col)
        if n >= 2:
            off = ~np.eye(n, dtype=bool)
            offdiag = (maj & off[None]).any(axis=1).all(axis=1)
            two_pos = (maj.sum(axis=1) >= 2).any(axis=1)
            mcol = np.tensordot(maj.astype(np.int64), self.row_weights, axes=([1], [0]))  # (N, col)
            iso = np.zeros(N, dtype=bool)
            for i in range(n):
                for j in range(n):
                    if i != j:
                        iso |= (mcol[:, j] == (1 << i)) & (mcol[:, i] == (1 << j))
            near = np.ones(N, dtype=bool)
            for s in range(n):
                near &= ((cmask & ~(1 << s)) == 0).any(axis=1)
        else:
            offdiag = two_pos = np.ones(N, dtype=bool)
            iso = near = np.zeros(N, dtype=bool)
        fields = [every_col, every_slice, offdiag, two_pos, two_pos, iso, near]
        out = np.zeros(N, dtype=np.uint8)
        for b, f in enumerate(fields):
            out |= f.astype(np.uint8) << b
        return out

    # -- main entry -----------------------------------------------------------

    def evaluate(self, bits: np.ndarray, prune: tuple[str, ...] = ()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(gamma, eta, filter_bits)``; a degree of 0 means the
        property fails."""
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[1] != self.n ** self.m:
            raise ValueError(f"expected shape (N, {self.n ** self.m})")
        outs = [self._evaluate(bits[s:s + self.chunk], prune) for s in range(0, bits.shape[0], self.chunk)]
        if not outs:
            e = np.zeros(0, dtype=np.int32)
            return e, e.copy(), np.zeros(0, dtype=np.uint8)
        return tuple(np.concatenate(x) for x in zip(*outs))

    def _evaluate(self, bits, prune):
        N = bits.shape[0]
        a = bits.reshape(N, self.n, self.ncols)
        cmask = self._col_masks(a)
        fbits = self.filter_bits(a, cmask)
        skip_gamma = np.zeros(N, dtype=bool)
        skip_eta = np.zeros(N, dtype=bool)
        if "columns" in prune:
            skip_eta |= (fbits & 1) == 0
        if "slices" in prune:
            skip_eta |= (fbits & 2) == 0
        if "majorization" in prune:
            skip_gamma |= (fbits & 12) != 12
        if "two-cycle" in prune:
            skip_gamma |= (fbits & 32) != 0
        if "near-singleton" in prune:
            skip_eta |= (fbits & 64) != 0
        skip_eta |= skip_gamma

        need = ~(skip_gamma & skip_eta)
        g = np.zeros((N, self.tsize), dtype=np.int64)
        if need.any():
            g[need] = self._g_table(a[need])
        gamma = self._gamma(cmask, g, ~skip_gamma)
        eta = self._eta(cmask, g, ~skip_eta)
        return gamma, eta, fbits

    def _gamma(self, cmask, g, todo):
        N = cmask.shape[0]
        out = np.zeros(N, dtype=np.int32)
        idx = np.flatnonzero(todo)
        d = cmask[idx][:, self.diag_cols]
        diag = g[idx][:, self.diag_tuples]
        for r in range(1, self.cap + 1):
            done = (d == self.full).all(axis=1)
            out[idx[done]] = r
            idx, d, diag = idx[~done], d[~done], diag[~done]
            if idx.size == 0:
                break
            d = np.take_along_axis(diag, d, axis=1)
        return out

    def _eta(self, cmask, g, todo):
        N = cmask.shape[0]
        out = np.zeros(N, dtype=np.int32)
        one = np.uint64(1)
        fam = np.bitwise_or.reduce(one << cmask.astype(np.uint64), axis=1)
        todo = todo & (cmask != 0).all(axis=1)
        out[todo & (fam == self.full_family)] = 1
        idx = np.flatnonzero(todo & (fam != self.full_family))
        onehot = one << g[idx].astype(np.uint64)
        tort = hare = fam[idx]
        level = 1
        while idx.size:
            h1 = self._step(hare, onehot)
            hit1 = h1 == self.full_family
            h2 = self._step(h1, onehot)
            hit2 = (h2 == self.full_family) & ~hit1
            tort = self._step(tort, onehot)
            out[idx[hit1]] = level + 1
            out[idx[hit2]] = level + 2
            cyc = (tort == h2) & ~hit1 & ~hit2
            keep = ~(hit1 | hit2 | cyc)
            idx, tort, hare, onehot = idx[keep], tort[keep], h2[keep], onehot[keep]
            level += 2
        return out


def all_patterns(order: int, dim: int) -> np.ndarray:
    nbits = dim**order
    return codes_to_bits(np.arange(1 << nbits, dtype=np.uint64), nbits)


def low_zero_codes(order: int, dim: int, max_zeros: int) -> np.ndarray:
    """Codes of every pattern with at most ``max_zeros`` zeros, ascending."""
    nbits = dim**order
    if nbits > 64:
        raise ValueError("low-zero enumeration needs n^m <= 64")
    full = (1 << nbits) - 1
    codes = []
    for z in range(max_zeros + 1):
        for pos in itertools.combinations(range(nbits), z):
            c = full
            for p in pos:
                c ^= 1 << (nbits - 1 - p)
            codes.append(c)
    return np.array(sorted(codes), dtype=np.uint64)
