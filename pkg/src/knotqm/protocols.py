"""Teleportation and dense coding on four-point qubits.

The simple protocols work with 2x2 and 4x4 numeric operators in the
orthonormal qubit basis.  Braids acting on a single qubit are converted to
unitaries through the Temperley-Lieb action on that basis.  The braided
dense-coding run instead stays diagrammatic: it acts on an eight-point cap
state with permutation braids and reads the result off the matchings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .diagram import BraidWord, PlanarMatching, TLElement, braid_to_tl, enumerate_matchings
from .hilbert import orthonormal_qubit_basis, overlap
from .poly import NumericParams

__all__ = [
    "GateSet",
    "BellBasis",
    "BELL_LABELS",
    "gates",
    "bell_basis",
    "braid_unitary",
    "TeleportRecord",
    "teleport",
    "densecode_simple",
    "DENSECODE_ENCODING",
    "DENSECODE_HADAMARD",
    "DENSECODE_CNOT",
    "BraidedOutcome",
    "densecode_braided",
    "chained_resource",
]

ZERO_PROB = 1e-12
# label -> (a, b) such that the correction is Z^a X^b
BELL_LABELS = {"Phi+": (0, 0), "Phi-": (1, 0), "Psi+": (0, 1), "Psi-": (1, 1)}


@dataclass(frozen=True)
class GateSet:
    I: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    H: np.ndarray

    def correction(self, a: int, b: int) -> np.ndarray:
        """``Z^a X^b`` as a matrix (``X^b`` acts first)."""
        return np.linalg.matrix_power(self.Z, a) @ np.linalg.matrix_power(self.X, b)


def gates() -> GateSet:
    s = 1 / math.sqrt(2)
    return GateSet(
        np.eye(2, dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
        np.array([[s, s], [s, -s]], dtype=complex),
    )


@dataclass(frozen=True)
class BellBasis:
    states: dict[str, np.ndarray]  # label -> length-4 vector, index 2*q1 + q2

    def overlaps(self) -> np.ndarray:
        vs = [self.states[k] for k in BELL_LABELS]
        return np.array([[np.vdot(x, y) for y in vs] for x in vs])


def bell_basis(params: NumericParams | None = None) -> BellBasis:
    """The four Bell states in the computational basis.

    ``params`` only serves to fail early when the qubit basis itself is
    degenerate; the vectors do not depend on it.
    """
    if params is not None:
        orthonormal_qubit_basis(params)
    s = 1 / math.sqrt(2)
    return BellBasis({
        "Phi+": np.array([s, 0, 0, s], dtype=complex),
        "Phi-": np.array([s, 0, 0, -s], dtype=complex),
        "Psi+": np.array([0, s, s, 0], dtype=complex),
        "Psi-": np.array([0, s, -s, 0], dtype=complex),
    })


def braid_unitary(w: BraidWord, params: NumericParams | None = None) -> np.ndarray:
    """Matrix of a four-strand braid acting on the qubit ``{|0>, |1>}``.

    Entry ``(j, k)`` is ``<j| B |k>`` with the braid glued on top of the
    cap state.
    """
    if w.strands != 4:
        raise ValueError("a qubit braid acts on four strands")
    params = params or NumericParams.from_k()
    basis = orthonormal_qubit_basis(params)
    op = braid_to_tl(w, params)
    u = np.zeros((2, 2), dtype=complex)
    for k, ket in enumerate(basis):
        moved = op * ket
        for j, bra in enumerate(basis):
            u[j, k] = overlap(bra, moved, params)
    return u


@dataclass
class TeleportRecord:
    measurement: str
    probability: float
    bob_state: np.ndarray
    correction: np.ndarray
    corrected: np.ndarray
    fidelity: float
    trace: list[dict] = field(default_factory=list)


def _normalized(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    if n < ZERO_PROB:
        raise ValueError("zero vector")
    return v / n


def teleport(psi: Sequence[complex], measurement: Union[str, BraidWord] = "Phi+",
             params: NumericParams | None = None, resource: np.ndarray | None = None) -> TeleportRecord:
    """Project Alice's two qubits of ``psi (x) resource`` and correct Bob's qubit.

    ``measurement`` is a Bell label or a four-strand braid ``B``; the latter
    measures ``(B (x) 1)|Phi+>`` and Bob undoes the induced ``U_B^dagger``.
    ``resource`` is the shared two-qubit coefficient matrix (default ``Phi+``).
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,) or abs(np.linalg.norm(psi) - 1) > 1e-9:
        raise ValueError("psi must be a normalized qubit")
    g = gates()
    bell = bell_basis(params)
    if resource is None:
        resource = bell.states["Phi+"].reshape(2, 2)
    resource = np.asarray(resource, dtype=complex)
    resource = resource / np.linalg.norm(resource)
    full = np.einsum("a,bc->abc", psi, resource)

    if isinstance(measurement, BraidWord):
        u = braid_unitary(measurement, params)
        m = (np.kron(u, g.I) @ bell.states["Phi+"]).reshape(2, 2)
        correction = u
        label = f"braid {measurement}"
    else:
        if measurement not in BELL_LABELS:
            raise ValueError(f"unknown Bell label {measurement!r}")
        m = bell.states[measurement].reshape(2, 2)
        correction = g.correction(*BELL_LABELS[measurement])
        label = measurement

    bob = np.einsum("ab,abc->c", m.conj(), full)
    prob = float(np.vdot(bob, bob).real)
    if prob < ZERO_PROB:
        raise ValueError(f"measurement {label} has zero probability")
    bob = bob / math.sqrt(prob)
    corrected = correction @ bob
    fidelity = float(abs(np.vdot(psi, corrected)) ** 2)
    steps = [
        {"stage": "input", "state": psi},
        {"stage": "shared", "state": resource.ravel()},
        {"stage": "measured", "outcome": label, "probability": prob},
        {"stage": "bob", "state": bob},
        {"stage": "corrected", "state": corrected},
    ]
    return TeleportRecord(label, prob, bob, correction, corrected, fidelity, steps)


def densecode_simple(a: int, b: int, params: NumericParams | None = None) -> tuple[int, int]:
    """Encode with ``Z^a X^b`` on Bob's half of ``Phi+`` and read the Bell outcome."""
    if a not in (0, 1) or b not in (0, 1):
        raise ValueError("bits must be 0 or 1")
    g = gates()
    bell = bell_basis(params)
    state = np.kron(g.I, g.correction(a, b)) @ bell.states["Phi+"]
    probs = {k: abs(np.vdot(v, state)) ** 2 for k, v in bell.states.items()}
    if abs(sum(probs.values()) - 1) > 1e-9:
        raise ArithmeticError("Bell probabilities do not sum to one")
    hits = [k for k, p in probs.items() if abs(p - 1) < 1e-10]
    if len(hits) != 1:
        raise ArithmeticError(f"no deterministic outcome: {probs}")
    return BELL_LABELS[hits[0]]


def chained_resource(params: NumericParams | None = None) -> np.ndarray:
    """Coefficient matrix of the chained two-clasp state, normalized.

    Its entries are ``(A^4 + A^-4)^2`` and ``(1 - A^4)^2`` on the diagonal,
    so it is entangled but not maximally.
    """
    params = params or NumericParams.from_k()
    a = params.A_value
    c = np.diag([(a ** 4 + a ** -4) ** 2, (1 - a ** 4) ** 2]).astype(complex)
    return c / np.linalg.norm(c)


# ---------------------------------------------------------------------------
# braided dense coding on eight points
#
# Points 1..4 are Alice's qubit and 5..8 Bob's, counted upwards.  Letter +i
# is the crossing where the strand at i+1 passes over to position i, -i the
# one where the strand at i passes over to i+1.  Steps inside one tuple
# commute and are applied in the listed order.

DENSECODE_ENCODING = {(0, 0): (), (1, 0): (-7,), (0, 1): (5,), (1, 1): (-7, 5)}
DENSECODE_HADAMARD = ((2,), (1, 3), (2,))
DENSECODE_CNOT = ((4,), (3, 7, 5, -1), (6, 4, -2))
_RAINBOW = (7, 6, 5, 4, 3, 2, 1, 0)


@dataclass
class BraidedOutcome:
    labels: tuple[int, int]  # (Bob's qubit, Alice's qubit) in the e0/e1 cap basis
    matching: PlanarMatching
    weight: complex  # overall framing phase of the surviving diagram
    residue: float  # largest |coefficient| on any other matching
    stages: list[dict] = field(default_factory=list)


def _letters(encoding: Sequence[int], sign: int) -> list[int]:
    out = list(encoding)
    for group in DENSECODE_HADAMARD + DENSECODE_CNOT:
        out.extend(group)
    return [sign * g for g in out]


def _qubit_label(partners: Sequence[int], offset: int) -> int | None:
    local = tuple(p - offset for p in partners[offset:offset + 4])
    if any(not 0 <= p < 4 for p in local):
        return None
    e0, e1 = (m.partners for m in enumerate_matchings(2))
    return {e0: 0, e1: 1}.get(local)


def densecode_braided(a: int, b: int, params: NumericParams | None = None,
                      crossing_sign: int = 1, tolerance: float = 1e-9) -> BraidedOutcome:
    """Run the drawn eight-point protocol and read off the product matching.

    The state starts as the nested ladder joining Alice and Bob, then the
    encoding braid, the Hadamard analogue and the CNOT analogue act in turn.
    ``crossing_sign=-1`` mirrors every crossing, which must leave the
    outcome unchanged.  Raises ``ArithmeticError`` if more than one matching
    survives.
    """
    if (a, b) not in DENSECODE_ENCODING:
        raise ValueError("bits must be 0 or 1")
    params = params or NumericParams.from_k()
    state = TLElement(0, 8, {_RAINBOW: 1.0 + 0j}, complex(params.d_value))
    stages = [{"stage": "shared", "terms": dict(state.terms)}]
    for g in _letters(DENSECODE_ENCODING[(a, b)], crossing_sign):
        state = braid_to_tl(BraidWord(8, (g,)), params) * state
    stages.append({"stage": "measured", "terms": dict(state.terms)})
    big = {k: complex(v) for k, v in state.terms.items() if abs(complex(v)) > tolerance}
    if len(big) != 1:
        raise ArithmeticError(f"outcome ambiguous: {len(big)} matchings survive")
    (key, weight), = big.items()
    bob, alice = _qubit_label(key, 4), _qubit_label(key, 0)
    if bob is None or alice is None:
        raise ArithmeticError("surviving matching is not a product of two qubits")
    residue = max((abs(complex(v)) for k, v in state.terms.items() if k != key), default=0.0)
    return BraidedOutcome((bob, alice), PlanarMatching(key), weight, residue, stages)
