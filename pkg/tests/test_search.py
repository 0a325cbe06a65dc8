import io
import json

import numpy as np
import pytest

from tensorprim.engine import eta, gamma
from tensorprim.search import (
    CSV_COLUMNS,
    EnumSpec,
    canonical_codes,
    classify_all,
    max_eta_search,
    sweep_with_checkpoint,
    verify_shifted_wielandt,
)
from tensorprim.batch import codes_to_bits
from tensorprim.tensor import BooleanTensor, canonical_code, relabel


def _csv(res):
    buf = io.StringIO()
    res.write_csv(buf)
    return buf.getvalue()


def test_counts_small():
    r = classify_all(EnumSpec(2, 2))
    assert (r.visited, r.primitive, r.strongly_primitive) == (16, 3, 3)
    r = classify_all(EnumSpec(3, 2))
    assert (r.primitive, r.strongly_primitive, r.max_eta) == (48, 15, 2)


def test_canonical_run_recovers_raw_counts():
    raw = classify_all(EnumSpec(3, 2))
    canon = classify_all(EnumSpec(3, 2, canonicalize=True))
    assert canon.histogram == raw.histogram
    assert sum(1 for _ in canon.records()) == 136
    assert sum(rec.orbit_size for rec in canon.records()) == 256


def test_canonical_codes_match_scalar():
    rng = np.random.default_rng(4)
    codes = rng.integers(0, 2**27, size=200, dtype=np.uint64)
    canon, orbit = canonical_codes(codes_to_bits(codes, 27), 3, 3)
    for c, k in zip(codes.tolist(), canon.tolist()):
        assert canonical_code(BooleanTensor.from_code(3, 3, c)) == k
    assert set(orbit.tolist()) <= {1, 2, 3, 6}


def test_orbit_consistency():
    rng = np.random.default_rng(10)
    perms = [(2, 1, 3), (3, 1, 2), (1, 3, 2)]
    for _ in range(1000 // 20):
        t = BooleanTensor(rng.random((3, 3, 3)) < 0.7)
        ref = (gamma(t).degree, eta(t).degree)
        for p in perms:
            r = relabel(t, p)
            assert (gamma(r).degree, eta(r).degree) == ref


def test_records_reproducible_from_key():
    res = classify_all(EnumSpec(3, 3, "random", samples=300, seed=3))
    for rec in res.records():
        t = BooleanTensor.from_code(3, 3, int(rec.key, 16))
        assert (gamma(t).degree, eta(t).degree) == (rec.gamma, rec.eta)
        if rec.gamma is not None and rec.eta is not None:
            assert rec.gamma <= rec.eta


def test_csv_layout():
    text = _csv(classify_all(EnumSpec(2, 2)))
    lines = text.splitlines()
    header = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# spec ") for l in header)
    assert any(l.startswith("# tensorprim ") for l in header)
    assert "# visited 16" in header
    body = [l for l in lines if not l.startswith("#")]
    assert body[0] == ",".join(CSV_COLUMNS)
    # all-zero pattern: only the near-singleton bit is set
    assert body[1] == "0,1,-,-,40," and len(body) == 17


def test_determinism_and_parallel_merge():
    spec = EnumSpec(3, 3, "random", samples=140_000, seed=11)
    a, b = classify_all(spec), classify_all(spec)
    assert _csv(a) == _csv(b)
    c = classify_all(spec, workers=3)
    assert _csv(c) == _csv(a) and c.histogram == a.histogram


def test_seed_changes_samples():
    a = classify_all(EnumSpec(3, 3, "random", samples=100, seed=1))
    b = classify_all(EnumSpec(3, 3, "random", samples=100, seed=2))
    assert _csv(a) != _csv(b)


def test_pruning_keeps_histogram():
    spec = dict(m=3, n=3, mode="random", samples=20_000, seed=5)
    plain = classify_all(EnumSpec(**spec))
    pruned = classify_all(EnumSpec(**spec, prune=("columns", "slices", "majorization", "two-cycle", "near-singleton")))
    assert plain.histogram == pruned.histogram


def test_budget_marks_partial():
    res = classify_all(EnumSpec(3, 3, "random", samples=300_000, seed=1, max_patterns=70_000))
    assert res.partial and res.visited < 300_000
    assert "# partial budget exceeded" in _csv(res)


def test_spec_validation():
    with pytest.raises(ValueError):
        EnumSpec(3, 4).validate()  # 2^64 patterns without override
    with pytest.raises(ValueError):
        EnumSpec(3, 3, "random", samples=10).validate()  # no seed
    with pytest.raises(ValueError):
        EnumSpec(3, 2, prune=("bogus",)).validate()
    EnumSpec(3, 3, allow_large=True).validate()


def test_low_zero_stratum():
    res = classify_all(EnumSpec(3, 3, "low-zero", max_zeros=3))
    assert res.visited == 3304
    assert res.max_eta is not None and res.max_eta < 5


def test_max_eta_search_reports_counterexamples():
    rep = max_eta_search([EnumSpec(3, 3, "random", samples=200_000, seed=7)])
    assert rep.bound == 5
    # degree 5 and 6 patterns exist; each listed key really has eta >= 5
    assert rep.max_eta >= 5 and rep.counterexamples
    for key in rep.counterexamples[:5]:
        assert eta(BooleanTensor.from_code(3, 3, int(key, 16))).degree >= 5
    assert rep.witnesses == sorted(rep.witnesses)
    with pytest.raises(ValueError):
        max_eta_search([EnumSpec(3, 2)])


def test_shifted_wielandt_suite():
    rep = verify_shifted_wielandt((3,), (3, 4))
    assert rep["failures"] == [] and rep["cases"] == 3 + 7


def test_checkpoint_resume(tmp_path, monkeypatch):
    import tensorprim.search as search

    monkeypatch.setattr(search, "CHECKPOINT_CHUNK", 1 << 12)
    monkeypatch.setattr(search, "CHUNK", 1 << 10)
    spec = EnumSpec(4, 2, canonicalize=True)
    path = tmp_path / "ck.jsonl"
    full = sweep_with_checkpoint(spec, str(path))
    assert full["complete"] and full["patterns"] == 65536
    lines = path.read_text().splitlines()
    assert len(lines) == 16
    # drop the last ranges plus a torn write, then resume
    path.write_text("\n".join(lines[:10]) + "\n" + lines[10][:20])
    resumed = sweep_with_checkpoint(spec, str(path))
    assert resumed == full
    ref = classify_all(EnumSpec(4, 2))
    assert {(g, e): c for g, e, c in full["histogram"]} == dict(ref.histogram)
    other = EnumSpec(4, 2)
    with pytest.raises(ValueError):
        sweep_with_checkpoint(other, str(path))
