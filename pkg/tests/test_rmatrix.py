import random

import numpy as np
import pytest

from oracles import markov_numeric, unit_phase

from knotqm.bracket import bracket_of_braid_closure
from knotqm.diagram import BraidWord
from knotqm.poly import LOOP, ONE, A, NumericParams
from knotqm.rmatrix import (
    BudgetExceeded,
    LaurentMatrix,
    SingularMatrixError,
    braid_matrix_numeric,
    braid_representation,
    cap_covector,
    cap_state,
    check_pseudounitary,
    FlatState,
    cup_vector,
    embed,
    flatten,
    markov_trace,
    markov_trace_numeric,
    matrix_element,
    r_matrix,
    sigma,
    u_matrix,
)

WHITEHEAD_VALUE = (-(A ** 3)) ** -1 * LOOP * (
    A ** 14 - A ** 10 - A ** 10 + A ** 6 - A ** 2 - A ** 2 + A ** -2 - A ** -6)


def test_u_squared():
    u = u_matrix()
    assert u @ u == u.scale(LOOP)


def test_r_inverse():
    assert r_matrix(1) @ r_matrix(-1) == LaurentMatrix.identity(4)


def test_yang_baxter():
    r1, r2 = embed(r_matrix(1), 1, 3), embed(r_matrix(1), 2, 3)
    assert r1 @ r2 @ r1 == r2 @ r1 @ r2


def test_hecke_relation():
    r = r_matrix(1)
    lhs = r @ r
    rhs = r.scale(A - A ** -3) + LaurentMatrix.identity(4).scale(A ** -2)
    assert lhs == rhs


def test_cup_cap_build_u():
    x, y = cup_vector(), cap_covector()
    outer = LaurentMatrix([[a * b for b in y.coords] for a in x.coords])
    assert outer == u_matrix()
    # closing a cup with a cap gives one loop
    assert sum((a * b for a, b in zip(x.coords, y.coords)), LOOP - LOOP) == LOOP


def test_trefoil_trace():
    w = BraidWord(2, (-1, -1, -1))
    assert markov_trace(braid_representation(w), 2) == bracket_of_braid_closure(w).raw


def test_markov_stabilization_and_cyclicity():
    rng = random.Random(2)
    for _ in range(60):
        n = rng.randint(2, 4)
        letters = tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(1, 6)))
        base = markov_trace(braid_representation(BraidWord(n, letters)), n)
        for s, factor in ((1, -(A ** 3)), (-1, -(A ** -3))):
            w2 = BraidWord(n + 1, letters + (s * n,))
            assert markov_trace(braid_representation(w2), n + 1) == factor * base
        k = rng.randint(0, len(letters))
        rot = BraidWord(n, letters[k:] + letters[:k])
        assert markov_trace(braid_representation(rot), n) == base


def test_numeric_matches_exact_and_oracle():
    params = NumericParams.from_k(9.7)
    w = BraidWord(3, (1, -2, 1, 2, -1))
    exact = braid_representation(w).evaluate(params)
    num = braid_matrix_numeric(w, params)
    assert np.allclose(exact, num)
    v = markov_trace_numeric(num, 3, params)
    assert abs(v - markov_numeric(w.letters, 3, params.A_value)) < 1e-9


def test_budget():
    with pytest.raises(BudgetExceeded):
        braid_representation(BraidWord(5, (1,)), budget=4)


def test_pseudounitary():
    for w in (BraidWord(2, (1,)), BraidWord(3, (1, -2, 2, 1))):
        assert check_pseudounitary(braid_representation(w))
    assert check_pseudounitary(sigma(2))
    with pytest.raises(SingularMatrixError):
        check_pseudounitary(u_matrix())


def _apply(m, state):
    zero = ONE - ONE
    n = len(state.coords)
    return FlatState(tuple(sum((m.entries[i][j] * state.coords[j] for j in range(n) if state.coords[j]), zero)
                           for i in range(n)), state.strands)


def test_flattened_states():
    psi = cap_state(4)
    assert psi == flatten(u_matrix())
    assert psi == cup_vector().kron(cap_covector())
    phi = _apply(embed(u_matrix(), 2, 4), psi)
    ident = LaurentMatrix.identity(16)
    assert matrix_element(psi, ident, psi) == LOOP * LOOP
    assert matrix_element(psi, ident, phi) == LOOP
    with pytest.raises(ValueError):
        cap_state(6)


def test_whitehead_matrix_element():
    psi = cap_state(4)
    u2 = embed(u_matrix(), 2, 4)
    phi = _apply(u2, psi)
    op = u2 @ braid_representation(BraidWord(4, (-1, -3, 2, -3, -1)))
    assert matrix_element(psi, op, phi) == WHITEHEAD_VALUE
