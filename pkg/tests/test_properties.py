"""Property tests against the reference power implementation."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from tensorprim.certificates import check_certificate
from tensorprim.engine import eta, explicit_power, gamma, support_families, zero_witness, power_entry
from tensorprim.tensor import BooleanTensor, canonical_code, relabel


@st.composite
def patterns(draw, max_m=4, max_n=3):
    m = draw(st.integers(2, max_m))
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n**m, max_size=n**m))
    return BooleanTensor(np.array(bits, bool).reshape((n,) * m))


def _fits(t, k):
    return t.dim ** ((t.order - 1) ** k + 1) <= 4096


@settings(max_examples=150, deadline=None)
@given(patterns())
def test_families_match_reference(t):
    fams = support_families(t, 3)
    for k in (1, 2, 3):
        if not _fits(t, k):
            break
        ref = oracle.power_rows(t.array, k)
        assert set(fams[k - 1].members) == oracle.column_supports(ref)
        assert np.array_equal(explicit_power(t, k).array.reshape(t.dim, -1), ref)


@settings(max_examples=150, deadline=None)
@given(patterns(max_m=3, max_n=4))
def test_certificates_validate(t):
    for r in (gamma(t), eta(t)):
        if not r.holds:
            assert check_certificate(t, r.certificate)


@settings(max_examples=100, deadline=None)
@given(patterns(max_m=3, max_n=3), st.integers(1, 6))
def test_witness_is_zero(t, level):
    w = zero_witness(t, level)
    e = eta(t).degree
    assert (w is None) == (e is not None and level >= e)
    if w is not None:
        assert not power_entry(t, level, *w)


@settings(max_examples=100, deadline=None)
@given(patterns(max_m=3, max_n=3), st.permutations([1, 2, 3]))
def test_relabel_invariance(t, perm):
    perm = [p for p in perm if p <= t.dim]
    r = relabel(t, perm)
    assert (gamma(r).degree, eta(r).degree) == (gamma(t).degree, eta(t).degree)
    assert canonical_code(r) == canonical_code(t)


@settings(max_examples=60, deadline=None)
@given(patterns(max_m=3, max_n=3))
def test_positivity_persists(t):
    e = eta(t).degree
    if e is not None:
        fams = support_families(t, e + 3)
        assert all(f.is_full(t.dim) for f in fams[e - 1:])
