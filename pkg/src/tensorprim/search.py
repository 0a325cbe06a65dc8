"""Enumeration of zero patterns, theorem checks and the maximum-degree probe.

Patterns are visited in a fixed order: ascending integer code for the
exhaustive and low-zero modes, generation order for random sampling.  Work
is cut into contiguous chunks that workers evaluate independently; results
are merged in chunk order, so output never depends on the worker count.
"""

from __future__ import annotations

import json
import logging
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Iterator, Optional

import numpy as np

from . import __version__
from .batch import (
    PRUNE_CHOICES,
    BatchKernel,
    bits_to_codes,
    bits_to_hex,
    codes_to_bits,
    low_zero_codes,
)
from .tensor import MAX_CANONICAL_DIM, BooleanTensor, position_permutations

log = logging.getLogger(__name__)

CHUNK = 1 << 16
CHECKPOINT_CHUNK = 1 << 20
EXHAUSTIVE_BITS = 30
RNG_NAME = "numpy PCG64 seeded with [seed, chunk_index]"
CSV_COLUMNS = ("canonical_key_hex", "orbit_size", "gamma", "eta", "filter_bits", "certificate_ref")


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class EnumSpec:
    m: int
    n: int
    mode: str = "exhaustive"  # exhaustive | random | low-zero
    samples: int = 0
    seed: Optional[int] = None
    max_zeros: int = 0
    canonicalize: bool = False
    prune: tuple[str, ...] = ()
    max_patterns: Optional[int] = None
    max_seconds: Optional[float] = None
    allow_large: bool = False

    def validate(self) -> None:
        nbits = self.n**self.m
        if self.mode not in ("exhaustive", "random", "low-zero"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "exhaustive" and nbits > EXHAUSTIVE_BITS and not self.allow_large:
            raise ValueError(
                f"exhaustive mode over 2^{nbits} patterns needs allow_large "
                f"(limit 2^{EXHAUSTIVE_BITS})"
            )
        if self.mode == "exhaustive" and nbits > 62:
            raise ValueError("exhaustive mode needs n^m <= 62")
        if self.mode == "random":
            if self.seed is None:
                raise ValueError("random mode needs an explicit seed")
            if self.samples < 0:
                raise ValueError("samples must be >= 0")
        if self.mode == "low-zero" and self.max_zeros < 0:
            raise ValueError("max_zeros must be >= 0")
        if self.canonicalize and (self.n > MAX_CANONICAL_DIM or nbits > 64):
            raise ValueError("canonical keys need n <= 8 and n^m <= 64")
        bad = set(self.prune) - set(PRUNE_CHOICES)
        if bad:
            raise ValueError(f"unknown filters {sorted(bad)}; choose from {PRUNE_CHOICES}")

    def echo(self) -> str:
        d = asdict(self)
        d["prune"] = list(self.prune)
        return json.dumps(d, sort_keys=True)


@dataclass
class ClassRecord:
    key: str
    orbit_size: int
    gamma: Optional[int]
    eta: Optional[int]
    filter_bits: int
    certificate_ref: str = ""

    def csv_line(self) -> str:
        return ",".join(
            [
                self.key,
                str(self.orbit_size),
                "-" if self.gamma is None else str(self.gamma),
                "-" if self.eta is None else str(self.eta),
                format(self.filter_bits, "02x"),
                self.certificate_ref,
            ]
        )


@dataclass
class _Chunk:
    keys: list
    orbit: np.ndarray
    gamma: np.ndarray
    eta: np.ndarray
    fbits: np.ndarray
    weight: np.ndarray
    visited: int


@dataclass
class EnumResult:
    spec: EnumSpec
    chunks: list = field(default_factory=list, repr=False)
    histogram: Counter = field(default_factory=Counter)
    visited: int = 0
    partial: bool = False
    wall_time: float = 0.0
    workers: int = 1

    def records(self) -> Iterator[ClassRecord]:
        for ch in self.chunks:
            for k, o, g, e, f in zip(ch.keys, ch.orbit.tolist(), ch.gamma.tolist(), ch.eta.tolist(), ch.fbits.tolist()):
                yield ClassRecord(k, o, g or None, e or None, f)

    @property
    def primitive(self) -> int:
        return sum(c for (g, _), c in self.histogram.items() if g is not None)

    @property
    def strongly_primitive(self) -> int:
        return sum(c for (_, e), c in self.histogram.items() if e is not None)

    @property
    def max_eta(self) -> Optional[int]:
        vals = [e for (_, e) in self.histogram if e is not None]
        return max(vals) if vals else None

    def keys_with_eta(self, value: int, limit: int = 10) -> list[str]:
        """Smallest keys attaining ``value``."""
        out: list[str] = []
        for ch in self.chunks:
            hit = np.flatnonzero(ch.eta == value)
            out.extend(ch.keys[i] for i in hit)
        return sorted(set(out))[:limit]

    def header_lines(self) -> list[str]:
        # wall time and worker count stay out of the CSV so reruns are byte-identical
        lines = [
            f"# tensorprim {__version__}",
            f"# spec {self.spec.echo()}",
            f"# seed {self.spec.seed if self.spec.seed is not None else '-'}",
        ]
        if self.spec.mode == "random":
            lines.append(f"# generator {RNG_NAME}, chunk {CHUNK}")
        lines.append(f"# visited {self.visited}")
        if self.partial:
            lines.append("# partial budget exceeded")
        return lines

    def write_csv(self, fh: IO[str]) -> None:
        for line in self.header_lines():
            fh.write(line + "\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for ch in self.chunks:
            fh.write(_chunk_csv(ch))

    def summary(self) -> dict:
        hist = sorted(
            ([g, e, c] for (g, e), c in self.histogram.items()),
            key=lambda r: (r[0] is None, r[0] or 0, r[1] is None, r[1] or 0),
        )
        return {
            "spec": json.loads(self.spec.echo()),
            "version": __version__,
            "visited": self.visited,
            "classes": sum(len(ch.keys) for ch in self.chunks),
            "primitive": self.primitive,
            "strongly_primitive": self.strongly_primitive,
            "max_eta": self.max_eta,
            "histogram": hist,
            "partial": self.partial,
            "wall_time": round(self.wall_time, 3),
            "workers": self.workers,
        }


def _chunk_csv(ch: _Chunk) -> str:
    g = ["-" if x == 0 else str(x) for x in ch.gamma.tolist()]
    e = ["-" if x == 0 else str(x) for x in ch.eta.tolist()]
    lines = [
        f"{k},{o},{gg},{ee},{f:02x},\n"
        for k, o, gg, ee, f in zip(ch.keys, ch.orbit.tolist(), g, e, ch.fbits.tolist())
    ]
    return "".join(lines)


# -- chunk sources and workers ----------------------------------------------


def _tasks(spec: EnumSpec) -> list[tuple]:
    nbits = spec.n**spec.m
    if spec.mode == "exhaustive":
        total = 1 << nbits
        return [("range", s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    if spec.mode == "random":
        return [
            ("random", spec.seed, i, min(CHUNK, spec.samples - i * CHUNK))
            for i in range(math.ceil(spec.samples / CHUNK))
        ]
    codes = low_zero_codes(spec.m, spec.n, spec.max_zeros)
    return [("codes", codes[s:s + CHUNK]) for s in range(0, len(codes), CHUNK)]


def _task_bits(task: tuple, nbits: int) -> np.ndarray:
    kind = task[0]
    if kind == "range":
        return codes_to_bits(np.arange(task[1], task[2], dtype=np.uint64), nbits)
    if kind == "random":
        _, seed, index, count = task
        rng = np.random.Generator(np.random.PCG64([seed, index]))
        return rng.integers(0, 2, size=(count, nbits), dtype=np.uint8).astype(bool)
    return codes_to_bits(task[1], nbits)


_PERM_CACHE: dict = {}


def _gathers(m: int, n: int) -> np.ndarray:
    if (m, n) not in _PERM_CACHE:
        _PERM_CACHE[(m, n)] = position_permutations(m, n)[1]
    return _PERM_CACHE[(m, n)]


def canonical_codes(bits: np.ndarray, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Minimal code over all relabelings and orbit size, per row."""
    gathers = _gathers(m, n)
    images = np.stack([bits_to_codes(bits[:, g]) for g in gathers], axis=1)
    images.sort(axis=1)
    orbit = 1 + (images[:, 1:] != images[:, :-1]).sum(axis=1)
    return images[:, 0], orbit


def _run_task(spec: EnumSpec, task: tuple) -> _Chunk:
    nbits = spec.n**spec.m
    bits = _task_bits(task, nbits)
    visited = bits.shape[0]
    if spec.canonicalize:
        codes = bits_to_codes(bits)
        canon, orbit = canonical_codes(bits, spec.m, spec.n)
        if spec.mode == "random":
            weight = np.ones(visited, dtype=np.int64)
            keys_src = codes_to_bits(canon, nbits)
        else:
            # the visited set is closed under relabeling: keep representatives
            rep = canon == codes
            bits, orbit = bits[rep], orbit[rep]
            weight = orbit.astype(np.int64)
            keys_src = bits
    else:
        orbit = np.ones(visited, dtype=np.int64)
        weight = orbit
        keys_src = bits
    kernel = BatchKernel(spec.m, spec.n)
    gamma, eta, fbits = kernel.evaluate(keys_src, spec.prune)
    return _Chunk(bits_to_hex(keys_src), orbit.astype(np.int64), gamma, eta, fbits, weight, visited)


def _chunk_histogram(ch: _Chunk) -> Counter:
    out: Counter = Counter()
    pairs = np.stack([ch.gamma, ch.eta], axis=1)
    if pairs.size == 0:
        return out
    uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
    sums = np.bincount(inv.reshape(-1), weights=ch.weight, minlength=len(uniq))
    for (g, e), c in zip(uniq.tolist(), sums.tolist()):
        out[(g or None, e or None)] += int(c)
    return out


def _execute(spec: EnumSpec, tasks: list[tuple], workers: int) -> Iterator[_Chunk]:
    if workers <= 1:
        for task in tasks:
            yield _run_task(spec, task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # bounded window keeps memory flat while preserving order
        window = max(2 * workers, 4)
        pending = []
        it = iter(tasks)
        for task in it:
            pending.append(pool.submit(_run_task, spec, task))
            if len(pending) >= window:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


def classify_all(spec: EnumSpec, workers: int = 1, keep_records: bool = True) -> EnumResult:
    """Evaluate every pattern the run selects.

    Stops early, with ``partial`` set, when the pattern or time budget runs
    out; the chunk in flight is always finished first.
    """
    spec.validate()
    t0 = time.monotonic()
    result = EnumResult(spec, workers=workers)
    for ch in _execute(spec, _tasks(spec), workers):
        result.visited += ch.visited
        result.histogram.update(_chunk_histogram(ch))
        if keep_records:
            result.chunks.append(ch)
        else:
            result.chunks.append(_best_only(ch))
        if spec.max_patterns is not None and result.visited >= spec.max_patterns:
            result.partial = True
        if spec.max_seconds is not None and time.monotonic() - t0 > spec.max_seconds:
            result.partial = True
        if result.partial:
            log.warning("budget exceeded after %d patterns", result.visited)
            break
    result.wall_time = time.monotonic() - t0
    return result


def _best_only(ch: _Chunk) -> _Chunk:
    """Drop all rows except those at this chunk's maximum finite eta."""
    if ch.eta.size == 0 or ch.eta.max() == 0:
        sel = np.zeros(0, dtype=np.int64)
    else:
        sel = np.flatnonzero(ch.eta == ch.eta.max())
    return _Chunk(
        [ch.keys[i] for i in sel], ch.orbit[sel], ch.gamma[sel], ch.eta[sel], ch.fbits[sel], ch.weight[sel], ch.visited
    )


# -- theorem checks -----------------------------------------------------------


def verify_majorization_criterion(
    m: int, samples: int = 100_000, seed: int = 1, workers: int = 1
) -> dict:
    """For ``n = 2``: primitive exactly when the majorization matrix is.

    Exhaustive for ``m <= 4``, sampled otherwise.
    """
    from .matrix import is_primitive_matrix

    n = 2
    if m <= 4:
        spec = EnumSpec(m, n, "exhaustive")
    else:
        spec = EnumSpec(m, n, "random", samples=samples, seed=seed)
    res = classify_all(spec, workers)
    prim_matrix = {}
    agree = disagree = prim = 0
    counterexamples = []
    for rec in res.records():
        t = BooleanTensor.from_code(m, n, int(rec.key, 16))
        mcode = tuple(t.array[(slice(None),) + (np.arange(n),) * (m - 1)].reshape(-1).tolist())
        if mcode not in prim_matrix:
            prim_matrix[mcode] = is_primitive_matrix(np.array(mcode).reshape(n, n))
        ok = (rec.gamma is not None) == prim_matrix[mcode]
        prim += rec.gamma is not None
        if ok:
            agree += 1
        else:
            disagree += 1
            counterexamples.append(rec.key)
    return {
        "check": "majorization-criterion",
        "m": m,
        "n": n,
        "visited": res.visited,
        "agree": agree,
        "primitive": prim,
        "counterexamples": counterexamples[:20],
        "result": res,
    }


def verify_dim2_characterization(m: int, workers: int = 1) -> dict:
    """For ``n = 2``: strongly primitive set equals the three-case set, degrees <= 2."""
    from .screening import Dim2Case, classify_dim2

    res = classify_all(EnumSpec(m, 2, "exhaustive"), workers)
    sp, cases, degrees = set(), set(), Counter()
    for rec in res.records():
        if rec.eta is not None:
            sp.add(rec.key)
            degrees[rec.eta] += 1
        t = BooleanTensor.from_code(m, 2, int(rec.key, 16))
        if classify_dim2(t) is not Dim2Case.NOT_STRONGLY_PRIMITIVE:
            cases.add(rec.key)
    return {
        "check": "dim2-characterization",
        "m": m,
        "visited": res.visited,
        "strongly_primitive": len(sp),
        "case_set": len(cases),
        "equal": sp == cases,
        "max_eta": max(degrees) if degrees else None,
        "symmetric_difference": sorted(sp ^ cases)[:20],
        "result": res,
    }


def verify_shifted_wielandt(m_values: Iterable[int] = (3, 4), n_values: Iterable[int] = (3, 4, 5)) -> dict:
    from .certificates import ZeroColumn
    from .constructions import shifted_wielandt_range, shifted_wielandt_tensor
    from .engine import eta, gamma, wielandt_cap

    rows, failures = [], []
    for m in m_values:
        for n in n_values:
            for k in shifted_wielandt_range(n):
                t = shifted_wielandt_tensor(m, n, k)
                expected = wielandt_cap(n) if k == 0 else k + n
                g = gamma(t).degree
                e = eta(t)
                ok = g == expected and not e.holds and isinstance(e.certificate, ZeroColumn)
                rows.append({"m": m, "n": n, "k": k, "expected": expected, "gamma": g, "eta": e.degree, "ok": ok})
                if not ok:
                    failures.append(rows[-1])
    return {"check": "shifted-wielandt", "cases": len(rows), "failures": failures, "rows": rows}


@dataclass
class MaxEtaReport:
    m: int
    n: int
    bound: int
    max_eta: Optional[int]
    witnesses: list
    counterexamples: list
    histogram: Counter
    visited: int
    partial: bool
    results: list = field(repr=False, default_factory=list)

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "conjectured_bound": self.bound,
            "max_eta": self.max_eta,
            "witnesses": self.witnesses,
            "counterexamples": self.counterexamples,
            "counterexample_count": len(self.counterexamples),
            "visited": self.visited,
            "partial": self.partial,
            "histogram": sorted(
                ([g, e, c] for (g, e), c in self.histogram.items()),
                key=lambda r: (r[0] is None, r[0] or 0, r[1] is None, r[1] or 0),
            ),
        }


def max_eta_search(specs: Iterable[EnumSpec], workers: int = 1, counterexample_limit: int = 50) -> MaxEtaReport:
    """Largest strongly primitive degree over the union of the given runs.

    Any pattern with degree at least ``(n-1)^2 + 1`` contradicts the
    conjectured bound and is reported, never filtered out.
    """
    specs = list(specs)
    m, n = specs[0].m, specs[0].n
    if any((s.m, s.n) != (m, n) for s in specs):
        raise ValueError("all runs must share (m, n)")
    if n < 3:
        raise ValueError("the maximum-degree probe targets n >= 3")
    bound = (n - 1) ** 2 + 1
    hist: Counter = Counter()
    visited, partial = 0, False
    results = []
    witnesses: set[str] = set()
    bad: set[str] = set()
    best = None
    for spec in specs:
        res = classify_all(spec, workers)
        results.append(res)
        hist.update(res.histogram)
        visited += res.visited
        partial |= res.partial
        top = res.max_eta
        if top is not None and (best is None or top > best):
            best, witnesses = top, set()
        if top is not None and top == best:
            witnesses.update(res.keys_with_eta(top))
        for e in range(bound, (top or 0) + 1):
            bad.update(res.keys_with_eta(e, limit=counterexample_limit))
    if bad:
        log.warning(
            "conjecture counterexamples: %d patterns with eta >= %d, smallest %s",
            len(bad), bound, min(bad),
        )
    for key in sorted(bad):
        log.debug("conjecture counterexample: eta >= %d for pattern %s", bound, key)
    return MaxEtaReport(
        m, n, bound, best, sorted(witnesses)[:10], sorted(bad)[:counterexample_limit], hist, visited, partial, results
    )


# -- resumable exhaustive sweep -------------------------------------------------


def sweep_with_checkpoint(spec: EnumSpec, path: str, workers: int = 1) -> dict:
    """Exhaustive sweep in ranges of 2^20 patterns, one JSON line per finished range.

    Rerunning with the same ``path`` skips ranges already recorded.  Only
    aggregates are kept: histogram, maximum eta and its smallest keys.
    """
    if spec.mode != "exhaustive":
        raise ValueError("checkpointed sweeps are exhaustive only")
    spec.validate()
    total = 1 << (spec.n**spec.m)
    done: dict[int, dict] = {}
    if os.path.exists(path):
        with open(path) as fh:
            for line in fh:
                if not line.endswith("\n"):
                    break  # torn final write
                rec = json.loads(line)
                if rec.get("spec") != spec.echo():
                    raise ValueError(f"checkpoint {path} belongs to a different spec")
                done[rec["start"]] = rec
    starts = [s for s in range(0, total, CHECKPOINT_CHUNK) if s not in done]
    t0 = time.monotonic()
    with open(path, "a") as out:
        for start in starts:
            stop = min(start + CHECKPOINT_CHUNK, total)
            sub = [("range", s, min(s + CHUNK, stop)) for s in range(start, stop, CHUNK)]
            hist: Counter = Counter()
            best, keys = 0, []
            for ch in _execute(spec, sub, workers):
                hist.update(_chunk_histogram(ch))
                if ch.eta.size and ch.eta.max() >= best and ch.eta.max() > 0:
                    top = int(ch.eta.max())
                    hits = [ch.keys[i] for i in np.flatnonzero(ch.eta == top)]
                    if top > best:
                        best, keys = top, []
                    keys = sorted(set(keys) | set(hits))[:10]
            rec = {
                "spec": spec.echo(),
                "start": start,
                "stop": stop,
                "histogram": [[g, e, c] for (g, e), c in sorted(hist.items(), key=str)],
                "max_eta": best or None,
                "max_keys": keys,
            }
            out.write(json.dumps(rec) + "\n")
            out.flush()
            done[start] = rec
            if spec.max_seconds is not None and time.monotonic() - t0 > spec.max_seconds:
                break
    hist = Counter()
    best, keys = 0, []
    for rec in done.values():
        for g, e, c in rec["histogram"]:
            hist[(g, e)] += c
        if rec["max_eta"] and rec["max_eta"] >= best:
            if rec["max_eta"] > best:
                best, keys = rec["max_eta"], []
            keys = sorted(set(keys) | set(rec["max_keys"]))[:10]
    complete = len(done) == len(range(0, total, CHECKPOINT_CHUNK))
    return {
        "spec": json.loads(spec.echo()),
        "ranges_done": len(done),
        "complete": complete,
        "patterns": sum(hist.values()),
        "histogram": sorted(([g, e, c] for (g, e), c in hist.items()), key=str),
        "max_eta": best or None,
        "max_keys": keys,
    }
