import pytest

from oracles import catalan as catalan_oracle, noncrossing

from knotqm.diagram import (
    BraidWord,
    PDParseError,
    PlanarMatching,
    TangleDiagram,
    TLElement,
    braid_to_tl,
    cap_adjacent,
    catalan,
    connectome_of,
    enumerate_matchings,
    glue,
    jones_wenzl,
    markov_closure,
    plat_closure,
    tl_generator,
    tl_identity,
)
from knotqm.poly import LOOP, ONE, A, NumericParams, RationalFunc

TREFOIL = "X(1,5,2,4) X(3,1,4,6) X(5,3,6,2)"
WHITEHEAD = "X(6,1,7,2) X(10,7,5,8) X(4,5,1,6) X(2,10,3,9) X(8,4,9,3)"


@pytest.mark.parametrize("n", range(0, 8))
def test_matchings_counted_and_listed(n):
    ms = enumerate_matchings(n)
    assert len(ms) == catalan(n) == catalan_oracle(n)
    assert [m.partners for m in ms] == noncrossing(n)
    assert all(m.is_planar() for m in ms)


def test_four_point_order():
    e0, e1 = enumerate_matchings(2)
    assert e0.partners == (1, 0, 3, 2)
    assert e1.partners == (3, 2, 1, 0)


def test_matching_validation():
    with pytest.raises(ValueError):
        PlanarMatching((1, 0, 2))
    assert not PlanarMatching((2, 3, 0, 1)).is_planar()
    assert PlanarMatching.from_pairs(4, [(0, 3), (1, 2)]).partners == (3, 2, 1, 0)


def test_glue_counts_loops():
    free, loops = glue([[(("a", 0), ("a", 1))], [(("b", 0), ("b", 1))]], [(("a", 0), ("b", 0)), (("a", 1), ("b", 1))])
    assert free == {} and loops == 1


def test_braid_parse_and_inverse():
    w = BraidWord.parse("n=3: 1 -2 1")
    assert w.strands == 3 and w.letters == (1, -2, 1)
    assert w.writhe == 1
    assert w.inverse().letters == (-1, 2, -1)
    assert w.mirror().letters == (-1, 2, -1)
    assert str(w) == "n=3: 1 -2 1"
    for bad in ("n=2: 2", "n=x: 1", "1 2 3", "n=2: 0"):
        with pytest.raises(PDParseError):
            BraidWord.parse(bad)


def test_braid_permutation():
    assert BraidWord(3, (1, 2)).permutation() == BraidWord(3, (-1, -2)).permutation()
    assert sorted(BraidWord(4, (1, 3, -2)).permutation()) == [0, 1, 2, 3]


# -- Temperley-Lieb algebra ------------------------------------------------


@pytest.mark.parametrize("n", range(2, 7))
def test_tl_relations(n):
    one = tl_identity(n)
    u = [None] + [tl_generator(n, i) for i in range(1, n)]
    for i in range(1, n):
        assert u[i] * u[i] == u[i].scale(LOOP)
        assert u[i] * one == u[i] == one * u[i]
        if i + 1 < n:
            assert u[i] * u[i + 1] * u[i] == u[i]
            assert u[i + 1] * u[i] * u[i + 1] == u[i + 1]
        for j in range(i + 2, n):
            assert u[i] * u[j] == u[j] * u[i]


@pytest.mark.parametrize("n", range(3, 6))
def test_braid_relations_in_tl(n):
    for i in range(1, n - 1):
        lhs = braid_to_tl(BraidWord(n, (i, i + 1, i)))
        rhs = braid_to_tl(BraidWord(n, (i + 1, i, i + 1)))
        assert lhs == rhs
    assert braid_to_tl(BraidWord(n, (1, -1))) == tl_identity(n)


def test_letter_images():
    assert braid_to_tl(BraidWord(2, (1,))) == tl_identity(2).scale(A) + tl_generator(2, 1).scale(A ** -1)
    assert braid_to_tl(BraidWord(2, (-1,))) == tl_identity(2).scale(A ** -1) + tl_generator(2, 1).scale(A)


def test_first_letter_on_top():
    w = BraidWord(3, (1, 2))
    assert braid_to_tl(w) == braid_to_tl(BraidWord(3, (1,))) * braid_to_tl(BraidWord(3, (2,)))


def test_closures():
    assert markov_closure(tl_identity(3)) == LOOP ** 3
    assert plat_closure(tl_identity(2)) == LOOP
    assert plat_closure(tl_generator(2, 1)) == LOOP ** 2


def test_numeric_tl_matches_exact():
    params = NumericParams.from_k(13.3)
    w = BraidWord(4, (1, -2, 3, 2, -1))
    exact = braid_to_tl(w).evaluate(params)
    assert exact.allclose(braid_to_tl(w, params))


def test_tensor_and_reflect():
    x = tl_generator(2, 1).tensor(tl_identity(1))
    assert x == tl_generator(3, 1)
    y = braid_to_tl(BraidWord(3, (1, 2)))
    # reflecting a product reverses it and inverts A
    assert y.reflect() == braid_to_tl(BraidWord(3, (-2, -1)))


# -- Jones-Wenzl -------------------------------------------------------------


@pytest.mark.parametrize("m", [2, 3, 4])
def test_jones_wenzl_idempotent_and_killed(m):
    p = jones_wenzl(m)
    assert p * p == p
    for i in range(1, m):
        u = tl_generator(m, i)
        assert (u * p).is_zero() and (p * u).is_zero()
        assert cap_adjacent(p, "top", i - 1).is_zero()
        assert cap_adjacent(p, "bottom", i - 1).is_zero()


def test_p2_explicit():
    p2 = jones_wenzl(2)
    expected = tl_identity(2).map_coeffs(RationalFunc.coerce) - tl_generator(2, 1).map_coeffs(
        lambda c: RationalFunc(c, LOOP))
    assert p2 == expected


def test_numeric_jones_wenzl():
    params = NumericParams.from_k(1000)
    p = jones_wenzl(5, params)
    assert (p * p).allclose(p)
    assert (tl_generator(5, 2, complex(params.d_value)) * p).allclose(TLElement.zero(5, 5, complex(params.d_value)))


# -- PD diagrams -------------------------------------------------------------


def test_trefoil_pd():
    t = TangleDiagram.parse(TREFOIL)
    assert t.is_closed
    assert t.writhe() == 3
    assert t.crossing_signs() == [1, 1, 1]
    assert len(t.components()) == 1
    assert t.mirror().writhe() == -3


def test_whitehead_pd():
    t = TangleDiagram.parse(WHITEHEAD)
    assert len(t.components()) == 2
    assert t.writhe() == -1


def test_parse_records_and_errors():
    t = TangleDiagram.parse("# comment\nX(a,b,c,d)\nE(a,b,c,d)\nL(2)\n")
    assert t.free_ends == ["a", "b", "c", "d"] and t.loops == 2
    for bad in ("X(1,2,3)", "Q(1)", "X(1,2,3,4) junk", "O(1,?)"):
        with pytest.raises(PDParseError):
            TangleDiagram.parse(bad)
    with pytest.raises(PDParseError):
        TangleDiagram.parse("X(1,2,3,4)").validate()


def test_text_roundtrip():
    t = TangleDiagram.parse(TREFOIL)
    again = TangleDiagram.parse(t.to_text())
    assert again.crossings == t.crossings and again.writhe() == t.writhe()


def test_from_braid_closures():
    w = BraidWord(2, (1, 1, 1))
    t = TangleDiagram.from_braid(w, "trace")
    assert t.is_closed and t.writhe() == 3 and len(t.components()) == 1
    hopf = TangleDiagram.from_braid(BraidWord(2, (1, 1)), "trace")
    assert len(hopf.components()) == 2
    open_t = TangleDiagram.from_braid(BraidWord(2, (-1, -1)), None)
    assert len(open_t.free_ends) == 4


def test_connectome_of():
    assert connectome_of(BraidWord(2, (1, 1))).partners == (2, 3, 0, 1)
    assert connectome_of(BraidWord(2, (1,))) == (3, 2, 1, 0)  # strands cross: not planar
    open_t = TangleDiagram.from_braid(BraidWord(2, (-1, -1)), None)
    # free ends are listed bottom row then top row, so vertical strands cross in that order
    assert connectome_of(open_t) == (2, 3, 0, 1)
    single = TLElement.single(0, 4, (1, 0, 3, 2))
    assert connectome_of(single).partners == (1, 0, 3, 2)
