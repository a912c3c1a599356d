import random

import numpy as np
import pytest

from knotqm.diagram import BraidWord, tl_identity
from knotqm.poly import NumericParams
from knotqm.protocols import (
    BELL_LABELS,
    DENSECODE_ENCODING,
    bell_basis,
    braid_unitary,
    chained_resource,
    densecode_braided,
    densecode_simple,
    gates,
    teleport,
)
from knotqm.hilbert import PartyState, expand_in_computational_basis

K1000 = NumericParams.from_k(1000)


def random_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_gate_identities():
    g = gates()
    for m in (g.X, g.Z, g.H):
        assert np.allclose(m @ m, g.I, atol=1e-10)
    assert np.allclose(g.H @ g.X @ g.H, g.Z, atol=1e-10)


def test_bell_basis():
    bell = bell_basis(K1000)
    assert np.allclose(bell.overlaps(), np.eye(4), atol=1e-10)
    ladder = expand_in_computational_basis(PartyState.from_tl(tl_identity(4)), K1000).ravel()
    assert np.allclose(ladder / np.linalg.norm(ladder), bell.states["Phi+"], atol=1e-9)


@pytest.mark.parametrize("label", sorted(BELL_LABELS))
def test_teleport_bell_labels(label):
    rng = np.random.default_rng(0)
    psi = random_qubit(rng)
    rec = teleport(psi, label, K1000)
    assert abs(rec.fidelity - 1) < 1e-10
    assert abs(rec.probability - 0.25) < 1e-12
    a, b = BELL_LABELS[label]
    assert np.allclose(rec.correction, gates().correction(a, b))


def test_phi_minus_needs_z():
    rec = teleport(np.array([0.6, 0.8]), "Phi-")
    assert np.allclose(rec.correction, gates().Z)


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(3)
    psi = random_qubit(rng)
    assert abs(sum(teleport(psi, lab).probability for lab in BELL_LABELS) - 1) < 1e-9


def test_teleport_braids():
    rng = np.random.default_rng(7)
    r = random.Random(7)
    for _ in range(30):
        w = BraidWord(4, tuple(r.choice((1, -1)) * r.randint(1, 3) for _ in range(r.randint(1, 6))))
        rec = teleport(random_qubit(rng), w, K1000)
        assert abs(rec.fidelity - 1) < 1e-9


def test_braid_unitaries_are_unitary():
    r = random.Random(1)
    for k in (1000, 12.5):
        params = NumericParams.from_k(k)
        for _ in range(10):
            w = BraidWord(4, tuple(r.choice((1, -1)) * r.randint(1, 3) for _ in range(6)))
            u = braid_unitary(w, params)
            assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-9)


def test_nonunitary_resource_loses_fidelity():
    rng = np.random.default_rng(2)
    fids = [teleport(random_qubit(rng), "Phi+", K1000, resource=chained_resource(K1000)).fidelity
            for _ in range(5)]
    assert max(fids) < 1 - 1e-3


def test_zero_probability_rejected():
    with pytest.raises(ValueError):
        teleport(np.array([1, 0]), "Phi+", resource=np.array([[0, 0], [1, 0]]))


@pytest.mark.parametrize("k", [100, 1000, 3.3, 17.9])
def test_densecode_simple(k):
    params = NumericParams.from_k(k)
    for a in (0, 1):
        for b in (0, 1):
            assert densecode_simple(a, b, params) == (a, b)


def test_densecode_outcome_labels():
    assert densecode_simple(1, 0) == BELL_LABELS["Phi-"]
    assert densecode_simple(1, 1) == BELL_LABELS["Psi-"]


@pytest.mark.parametrize("sign", [1, -1])
def test_densecode_braided(sign):
    expected = {(0, 0): (0, 0), (1, 0): (1, 0), (0, 1): (0, 1), (1, 1): (1, 1)}
    for bits in DENSECODE_ENCODING:
        out = densecode_braided(*bits, K1000, crossing_sign=sign)
        assert out.labels == expected[bits]
        assert abs(abs(out.weight) - 1) < 1e-9
        assert out.residue < 1e-9
