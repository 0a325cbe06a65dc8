"""Acceptance criteria, one test each.

A summary line per criterion is printed at the end of the pytest run.
"""

from __future__ import annotations

import io
import math
import time

import numpy as np
import pytest

import oracle
from tensorprim.certificates import ZeroColumn, check_certificate
from tensorprim.constructions import (
    eta4_example,
    shifted_wielandt_range,
    slice_zeros_example,
    two_cycle_tensor,
)
from tensorprim.engine import (
    eta,
    explicit_power,
    family_at,
    gamma,
    power_entry,
    support_families,
    wielandt_cap,
)
from tensorprim.matrix import mat_exponent
from tensorprim.nested import all_equal_tree
from tensorprim.screening import dim2_zero_witnesses
from tensorprim.search import (
    EnumSpec,
    max_eta_search,
    verify_dim2_characterization,
    verify_majorization_criterion,
    verify_shifted_wielandt,
)
from tensorprim.tensor import BooleanTensor

acceptance = pytest.mark.acceptance

# counts pinned by tests/oracle.py before the engine existed; see test_oracle.py
PRIMITIVE_COUNTS = {2: (3, 16), 3: (48, 256), 4: (12288, 65536)}
STRONGLY_PRIMITIVE_COUNTS = {2: 3, 3: 15, 4: 255}

PROBE_SPECS = (
    EnumSpec(3, 3, "low-zero", max_zeros=3),
    EnumSpec(3, 3, "random", samples=1_000_000, seed=7),
)

_cache: dict = {}


def _csv(result) -> str:
    buf = io.StringIO()
    result.write_csv(buf)
    return buf.getvalue()


def _majorization_runs(workers: int):
    key = ("maj", workers)
    if key not in _cache:
        _cache[key] = {m: verify_majorization_criterion(m, workers=workers) for m in (2, 3, 4)}
    return _cache[key]


def _dim2_runs(workers: int):
    key = ("dim2", workers)
    if key not in _cache:
        _cache[key] = {m: verify_dim2_characterization(m, workers=workers) for m in (2, 3, 4)}
    return _cache[key]


def _probe(workers: int):
    key = ("probe", workers)
    if key not in _cache:
        _cache[key] = max_eta_search(PROBE_SPECS, workers=workers)
    return _cache[key]


@acceptance(1, "worked example: both degrees 4, zero of A^3, full family at level 4")
def test_criterion_01_worked_example():
    t0 = time.monotonic()
    t = eta4_example()
    assert gamma(t).degree == 4
    assert eta(t).degree == 4
    cube = explicit_power(t, 3)
    assert cube.size == 19683
    assert cube.entry((2,) + (3,) * 8) is False
    assert family_at(t, 4).members == frozenset({0b111})
    assert time.monotonic() - t0 < 1.0


@acceptance(2, "shifted Wielandt family: exact primitive degrees, zero-column certificates")
def test_criterion_02_shifted_wielandt_degrees():
    t0 = time.monotonic()
    rep = verify_shifted_wielandt((3, 4), (3, 4, 5))
    assert rep["failures"] == []
    expected_cases = sum(len(shifted_wielandt_range(n)) for n in (3, 4, 5)) * 2
    assert rep["cases"] == expected_cases
    for row in rep["rows"]:
        want = wielandt_cap(row["n"]) if row["k"] == 0 else row["k"] + row["n"]
        assert row["gamma"] == want
        assert row["eta"] is None
    from tensorprim.constructions import shifted_wielandt_tensor

    for m in (3, 4):
        for n in (3, 4, 5):
            for k in shifted_wielandt_range(n):
                t = shifted_wielandt_tensor(m, n, k)
                cert = eta(t).certificate
                assert isinstance(cert, ZeroColumn) and check_certificate(t, cert)
    assert time.monotonic() - t0 < 5.0


@acceptance(3, "n = 2: primitive exactly when the majorization matrix is, all patterns m = 2..4")
def test_criterion_03_majorization_criterion():
    t0 = time.monotonic()
    runs = _majorization_runs(1)
    for m, rep in runs.items():
        prim, total = PRIMITIVE_COUNTS[m]
        assert rep["visited"] == total
        assert rep["agree"] == total
        assert rep["counterexamples"] == []
        assert rep["primitive"] == prim
    assert time.monotonic() - t0 < 10.0


@acceptance(4, "n = 2: strongly primitive set equals the three-case set, degrees <= 2")
def test_criterion_04_dim2_characterization():
    t0 = time.monotonic()
    runs = _dim2_runs(1)
    for m, rep in runs.items():
        assert rep["equal"], rep["symmetric_difference"]
        assert rep["strongly_primitive"] == rep["case_set"] == STRONGLY_PRIMITIVE_COUNTS[m]
        assert rep["max_eta"] <= 2
        n = 2
        bound = n * (2 ** ((n - 1) * (n ** (m - 1) - 1)) - 1)
        assert rep["strongly_primitive"] - 1 == bound  # all-ones removed
    assert time.monotonic() - t0 < 10.0


@acceptance(5, "support families and degrees match explicit powers on all m = 3, n = 2 patterns")
def test_criterion_05_oracle_equivalence():
    t0 = time.monotonic()
    for code in range(256):
        a = oracle.from_code(code, 3, 2)
        t = BooleanTensor(a)
        fams = support_families(t, 3)
        for k in (1, 2, 3):
            explicit = explicit_power(t, k).array.reshape(2, -1)
            ref = oracle.power_rows(a, k)
            assert np.array_equal(explicit, ref)
            assert set(fams[k - 1].members) == oracle.column_supports(ref)
        g_ref, e_ref = oracle.degrees_up_to(a, 3)
        # for n = 2 both degrees are at most 2 when they exist, so k <= 3 decides them
        assert gamma(t).degree == g_ref
        assert eta(t).degree == e_ref
    assert time.monotonic() - t0 < 30.0


@acceptance(6, "order 2: both degrees equal the matrix exponent on 200 random matrices")
def test_criterion_06_matrix_reduction():
    t0 = time.monotonic()
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(1, 7))
        density = rng.uniform(0.15, 0.9)
        mat = rng.random((n, n)) < density
        t = BooleanTensor(mat)
        e = mat_exponent(mat)
        assert gamma(t).degree == e
        assert eta(t).degree == e
    assert time.monotonic() - t0 < 5.0


@acceptance(7, "dimension 2 zero witnesses: worked example and 100 random tensors")
def test_criterion_07_dim2_witnesses():
    t0 = time.monotonic()
    t = slice_zeros_example()
    a1, a2 = (2, 1, 2, 2), (1, 1, 2, 1)
    w1, w2 = dim2_zero_witnesses(t, a1, a2)
    assert w1 == (a1, a2, a1, a1)
    assert power_entry(t, 2, 1, w1) is False
    assert power_entry(t, 2, 2, w2) is False
    sq = explicit_power(t, 2)
    assert sq.size == 131072
    assert all(not sq.array[i].all() for i in range(2))

    rng = np.random.default_rng(36)
    for _ in range(100):
        m = int(rng.integers(2, 6))
        a = rng.random((2,) * m) < 0.7
        alphas = []
        for row in range(2):
            alpha = tuple(int(x) for x in rng.integers(0, 2, size=m - 1))
            a[(row,) + alpha] = False
            alphas.append(tuple(x + 1 for x in alpha))
        t = BooleanTensor(a)
        w1, w2 = dim2_zero_witnesses(t, *alphas)
        assert power_entry(t, 2, 1, w1) is False
        assert power_entry(t, 2, 2, w2) is False
    assert time.monotonic() - t0 < 5.0


@acceptance(8, "isolated two-cycle: neither property holds, parity pattern up to k = 6")
def test_criterion_08_two_cycle():
    t0 = time.monotonic()
    m, n, i, j = 3, 3, 1, 2
    t = two_cycle_tensor(m, n, i, j)
    assert not gamma(t).holds
    assert not eta(t).holds
    for k in range(1, 7):
        col_i = [power_entry(t, k, r, all_equal_tree(i, m - 1, k)) for r in range(1, n + 1)]
        col_j = [power_entry(t, k, r, all_equal_tree(j, m - 1, k)) for r in range(1, n + 1)]
        if k % 2:
            assert col_j == [r == i for r in range(1, n + 1)]
            assert col_i == [r == j for r in range(1, n + 1)]
        else:
            assert col_i == [r == i for r in range(1, n + 1)]
            assert col_j == [r == j for r in range(1, n + 1)]
    assert time.monotonic() - t0 < 1.0


@acceptance(9, "powers past the degree stay positive; the square has degree ceil(eta/2)")
def test_criterion_09_power_stability():
    t0 = time.monotonic()
    runs = _dim2_runs(1)
    members = []
    for m in (3, 4):
        res = runs[m]["result"]
        members += [(m, rec.key, rec.eta) for rec in res.records() if rec.eta is not None]
    m3 = [x for x in members if x[0] == 3]
    assert len(m3) == 15
    for m, key, e in m3:
        t = BooleanTensor.from_code(m, 2, int(key, 16))
        fams = support_families(t, e + 3)
        assert all(f.members == frozenset({0b11}) for f in fams[e - 1:])
    for m, key, e in members[:20]:
        t = BooleanTensor.from_code(m, 2, int(key, 16))
        assert eta(explicit_power(t, 2)).degree == math.ceil(e / 2)
    assert time.monotonic() - t0 < 10.0


@acceptance(10, "m = n = 3 probe: low-zero stratum plus 10^6 samples stay below (n-1)^2 + 1")
def test_criterion_10_max_degree_probe():
    t0 = time.monotonic()
    rep = _probe(1)
    elapsed = time.monotonic() - t0
    assert rep.visited == 3304 + 1_000_000
    assert eta(eta4_example()).degree == 4
    assert rep.max_eta is not None and rep.max_eta >= 4
    assert elapsed < 300
    # any pattern at or above the conjectured bound fails the criterion
    assert rep.counterexamples == [], (
        f"{len(rep.counterexamples)}+ patterns with eta >= {rep.bound}; "
        f"max eta {rep.max_eta}; smallest {rep.counterexamples[:3]}"
    )
    assert rep.max_eta <= 4


@acceptance(11, "four workers give byte-identical CSV to one worker")
def test_criterion_11_parallel_determinism():
    for m in (2, 3, 4):
        assert _csv(_majorization_runs(4)[m]["result"]) == _csv(_majorization_runs(1)[m]["result"])
        assert _csv(_dim2_runs(4)[m]["result"]) == _csv(_dim2_runs(1)[m]["result"])
    one, four = _probe(1), _probe(4)
    assert [_csv(r) for r in four.results] == [_csv(r) for r in one.results]
