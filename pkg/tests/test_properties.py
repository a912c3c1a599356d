import random

import numpy as np
from hypothesis import given, settings, strategies as st

from knotqm.bracket import bracket_of_braid_closure
from knotqm.diagram import BraidWord, braid_to_tl, tl_generator, tl_identity
from knotqm.entangle import check_inequalities, random_connectome
from knotqm.hilbert import numeric_gram
from knotqm.poly import LOOP, LaurentPoly, NumericParams, RationalFunc
from knotqm.protocols import teleport
from knotqm.rmatrix import braid_representation, markov_trace

polys = st.dictionaries(st.integers(-6, 6), st.integers(-4, 4), max_size=4).map(LaurentPoly)
nonzero = polys.filter(lambda p: not p.is_zero())


@st.composite
def braids(draw, max_strands=4, max_len=7):
    n = draw(st.integers(2, max_strands))
    gens = st.integers(1, n - 1).flatmap(lambda g: st.sampled_from((g, -g)))
    return BraidWord(n, tuple(draw(st.lists(gens, min_size=1, max_size=max_len))))


FAST = settings(max_examples=60, deadline=None)


@FAST
@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - q) + q == p


@FAST
@given(polys, polys)
def test_mirror_is_involutive_homomorphism(p, q):
    assert p.mirror().mirror() == p
    assert (p * q).mirror() == p.mirror() * q.mirror()


@FAST
@given(polys, nonzero)
def test_exact_div_undoes_mul(p, q):
    assert (p * q).exact_div(q) == p


@FAST
@given(nonzero, nonzero, polys)
def test_rational_field_ops(p, q, r):
    x = RationalFunc(p, q)
    assert x * RationalFunc(q, p) == RationalFunc.coerce(LaurentPoly.constant(1))
    assert (x + RationalFunc.coerce(r)) - RationalFunc.coerce(r) == x


@FAST
@given(st.integers(3, 6), st.lists(st.integers(0, 10), min_size=3, max_size=6))
def test_tl_associativity(n, picks):
    gens = [tl_generator(n, 1 + k % (n - 1)) for k in picks]
    a, b, c = gens[0], gens[1], gens[2]
    assert (a * b) * c == a * (b * c)
    assert (a * b).reflect() == b.reflect() * a.reflect()


@FAST
@given(braids())
def test_braid_inverse_in_tl(w):
    assert braid_to_tl(w) * braid_to_tl(w.inverse()) == tl_identity(w.strands)


@settings(max_examples=40, deadline=None)
@given(braids())
def test_skein_equals_matrix_trace(w):
    assert bracket_of_braid_closure(w).raw == markov_trace(braid_representation(w), w.strands)


@settings(max_examples=30, deadline=None)
@given(braids())
def test_mirror_rule(w):
    assert bracket_of_braid_closure(w.mirror()).raw == bracket_of_braid_closure(w).raw.mirror()


@FAST
@given(st.sampled_from([2, 4, 6, 8]), st.floats(2.5, 5000))
def test_gram_real_symmetric(n, k):
    g = numeric_gram(n, NumericParams.from_k(k))
    assert np.allclose(g, g.T) and np.allclose(g.imag, 0)


@FAST
@given(st.integers(0, 10 ** 6), st.integers(2, 6), st.sampled_from([2, 4, 6]))
def test_connectome_inequalities(seed, parties, points):
    c = random_connectome(parties, points, random.Random(seed))
    assert check_inequalities(c)["ok"]


@FAST
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_teleport_random_inputs(a, b, c, d):
    v = np.array([a + 1j * b, c + 1j * d])
    if np.linalg.norm(v) < 1e-3:
        return
    v = v / np.linalg.norm(v)
    for label in ("Phi+", "Phi-", "Psi+", "Psi-"):
        assert abs(teleport(v, label).fidelity - 1) < 1e-9
