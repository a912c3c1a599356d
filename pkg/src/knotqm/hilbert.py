"""Cap-diagram Hilbert spaces: bases, Gram matrices, orthonormalisation and
expansion of diagrammatic states in a computational basis.

A single-party state on ``n`` points is a :class:`TLElement` with no bottom
points.  Multi-party states live in :class:`PartyState`, which keeps a global
point numbering plus, for each party, the list of its global points in local
order.  Coefficients of a state in a product basis are computed by gluing the
reflected basis diagrams onto the state and counting loops.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diagram import (
    PlanarMatching,
    TLElement,
    enumerate_matchings,
    glue,
    jones_wenzl,
    tl_identity,
    tl_multiply,
)
from .poly import LOOP, ONE, LaurentPoly, NumericParams, RationalFunc
from .rmatrix import LaurentMatrix

__all__ = [
    "CapBasisState",
    "GramData",
    "QuditBasis",
    "PartyState",
    "ExactExpansion",
    "DegenerateParamsError",
    "cap_state",
    "overlap",
    "gram_matrix",
    "orthonormal_qubit_basis",
    "party_basis",
    "expand_in_computational_basis",
    "expand_exact_qubits",
    "raw_overlaps",
    "qudit_channel_matching",
    "qudit_basis",
    "degeneracy_warning",
    "NULL_TOL",
]

NULL_TOL = 1e-9

CapBasisState = TLElement  # single-boundary state: bottom == 0


class DegenerateParamsError(ValueError):
    """The requested basis does not exist at these parameters."""


def cap_state(partners: Sequence[int] | PlanarMatching, coeff=ONE) -> TLElement:
    """Single-matching state on a line of points."""
    m = partners if isinstance(partners, PlanarMatching) else PlanarMatching(tuple(partners))
    return TLElement.single(0, m.n_points, m, coeff)


def _as_numeric(x: TLElement, params: NumericParams | None) -> TLElement:
    if x.exact and params is not None:
        return x.evaluate(params)
    return x


def overlap(x: TLElement, y: TLElement, params: NumericParams | None = None):
    """``<x|y>``: reflect ``x``, glue it on top of ``y`` and evaluate loops."""
    if x.bottom or y.bottom:
        raise ValueError("overlap expects single-boundary states")
    if x.top != y.top:
        raise ValueError(f"point-count mismatch: {x.top} vs {y.top}")
    if x.exact != y.exact:
        x, y = _as_numeric(x, params), _as_numeric(y, params)
        if x.exact != y.exact:
            raise ValueError("mixing exact and numeric states needs params")
    if x.is_zero() or y.is_zero():
        return LaurentPoly() if x.exact else 0j
    val = tl_multiply(x.reflect(), y).scalar_value()
    if not x.exact and not isinstance(val, complex):
        val = complex(val)
    return val


def _loops_between(p: tuple, q: tuple) -> int:
    pairs = [(("a", i), ("a", j)) for i, j in enumerate(p) if i < j]
    pairs += [(("b", i), ("b", j)) for i, j in enumerate(q) if i < j]
    _, loops = glue([pairs], [(("a", i), ("b", i)) for i in range(len(p))])
    return loops


@lru_cache(maxsize=None)
def _gram_loops(n_points: int) -> tuple[tuple[int, ...], ...]:
    ms = enumerate_matchings(n_points // 2)
    return tuple(tuple(_loops_between(a.partners, b.partners) for b in ms) for a in ms)


def numeric_gram(n_points: int, params: NumericParams) -> np.ndarray:
    d = params.d_value
    return np.array([[d ** l for l in row] for row in _gram_loops(n_points)], dtype=complex)


@dataclass
class GramData:
    n_points: int
    matchings: list[PlanarMatching]
    gram: LaurentMatrix
    gram_numeric: np.ndarray
    transform: np.ndarray  # columns: orthonormal vectors in the matching basis
    numeric_rank: int
    tolerance: float
    signature: list[int] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.matchings)

    def determinant(self) -> LaurentPoly:
        return _exact_det(self.gram)


def _exact_det(m: LaurentMatrix) -> LaurentPoly:
    """Fraction-free (Bareiss) determinant over Laurent polynomials."""
    n = m.rows
    a = [[RationalFunc.coerce(x) for x in row] for row in m.entries]
    sign = 1
    prev = RationalFunc.coerce(ONE)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not a[r][k].is_zero()), None)
            if swap is None:
                return LaurentPoly()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    det = a[n - 1][n - 1] if n else RationalFunc.coerce(ONE)
    val = det.as_poly()
    return val if sign > 0 else -val


def gram_matrix(n_points: int, params: NumericParams | None = None, tolerance: float = NULL_TOL) -> GramData:
    """Exact Gram matrix over the canonical matching order and a numeric
    Gram-Schmidt transform at ``params``.

    Directions whose residual norm, relative to the diagram's own norm, falls
    below ``tolerance`` are dropped; ``numeric_rank`` counts the survivors.
    """
    if n_points % 2:
        raise ValueError("n_points must be even")
    params = params or NumericParams.from_k()
    ms = enumerate_matchings(n_points // 2)
    size = len(ms)
    loops = _gram_loops(n_points)
    maxl = max(max(r) for r in loops) if size else 0
    pw = [ONE]
    for _ in range(maxl):
        pw.append(pw[-1] * LOOP)
    gram = LaurentMatrix([[pw[loops[i][j]] for j in range(size)] for i in range(size)])
    g = numeric_gram(n_points, params)
    transform, signature = _gram_schmidt(g, tolerance)
    return GramData(n_points, ms, gram, g, transform, transform.shape[1], tolerance, signature)


def _gram_schmidt(g: np.ndarray, tolerance: float) -> tuple[np.ndarray, list[int]]:
    vecs: list[np.ndarray] = []
    signs: list[int] = []
    n = g.shape[0]
    for m in range(n):
        v = np.zeros(n, dtype=complex)
        v[m] = 1.0
        for q, s in zip(vecs, signs):
            v = v - s * (q.conj() @ g @ v) * q
        norm2 = (v.conj() @ g @ v).real
        ref = abs(g[m, m].real) or 1.0
        if abs(norm2) / ref < tolerance:
            continue
        s = 1 if norm2 > 0 else -1
        vecs.append(v / math.sqrt(abs(norm2)))
        signs.append(s)
    if not vecs:
        return np.zeros((n, 0), dtype=complex), []
    return np.stack(vecs, axis=1), signs


def orthonormal_qubit_basis(params: NumericParams | None = None) -> tuple[TLElement, TLElement]:
    """``|0> = e0/d`` and ``|1> = (e1 - e0/d)/sqrt(d^2-1)`` on four points."""
    params = params or NumericParams.from_k()
    d = params.d_value
    if abs(d) < 1e-12 or d * d - 1 < 1e-9:
        raise DegenerateParamsError(f"qubit basis is degenerate or indefinite at d = {d}")
    e0, e1 = enumerate_matchings(2)
    loop = complex(d)
    zero = TLElement(0, 4, {e0: 1 / d + 0j}, loop)
    s = 1 / math.sqrt(d * d - 1)
    one = TLElement(0, 4, {e1: s + 0j, e0: -s / d + 0j}, loop)
    return zero, one


def _basis_matrix(states: Sequence[TLElement], ms: Sequence[PlanarMatching]) -> np.ndarray:
    idx = {m.partners: k for k, m in enumerate(ms)}
    t = np.zeros((len(ms), len(states)), dtype=complex)
    for col, st in enumerate(states):
        for key, c in st.terms.items():
            t[idx[key], col] = complex(c)
    return t


def party_basis(n_points: int, params: NumericParams | None = None) -> list[TLElement]:
    """Orthonormal basis of the ``n_points`` space.

    Four points use the qubit basis above; other sizes use Gram-Schmidt in
    canonical matching order with positive normalisation.
    """
    params = params or NumericParams.from_k()
    if n_points == 4:
        return list(orthonormal_qubit_basis(params))
    gd = gram_matrix(n_points, params)
    loop = complex(params.d_value)
    out = []
    for col in range(gd.transform.shape[1]):
        terms = {m.partners: gd.transform[k, col] for k, m in enumerate(gd.matchings)
                 if abs(gd.transform[k, col]) > 0}
        out.append(TLElement(0, n_points, terms, loop))
    return out


# ---------------------------------------------------------------------------
# multi-party states


@dataclass
class PartyState:
    """Diagrammatic state on ``n_points`` global points split among parties.

    ``terms`` maps global partner tuples to coefficients.  Matchings are not
    required to be planar in the global numbering, because the parties'
    boundaries need not be drawn on one line.
    """

    n_points: int
    parties: list[list[int]]
    terms: dict[tuple, object]
    names: list[str] | None = None

    def __post_init__(self):
        flat = sorted(p for party in self.parties for p in party)
        if flat != list(range(self.n_points)):
            raise ValueError("parties must partition the points 0..n_points-1")
        self.terms = {tuple(k): v for k, v in self.terms.items()}
        for k in self.terms:
            PlanarMatching(k)  # involution check
            if len(k) != self.n_points:
                raise ValueError("term size does not match n_points")
        if self.names is None:
            self.names = [chr(ord("A") + i) for i in range(len(self.parties))]

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (LaurentPoly, RationalFunc)) for v in self.terms.values())

    def party_index(self, party: int | str) -> int:
        if isinstance(party, int) and not isinstance(party, bool):
            if 0 <= party < len(self.parties):
                return party
        elif party in self.names:
            return self.names.index(party)
        raise KeyError(f"party {party!r} not found")

    @classmethod
    def from_tl(cls, x: TLElement, names: Sequence[str] = ("A", "B")) -> "PartyState":
        """Bottom points form the first party, top points the second."""
        n = x.bottom + x.top
        parties = [list(range(x.bottom)), list(range(x.bottom, n))]
        return cls(n, parties, dict(x.terms), list(names))

    @classmethod
    def from_single(cls, x: TLElement, splits: Sequence[int], names=None) -> "PartyState":
        """A single-line state cut into consecutive parties of the given sizes."""
        if sum(splits) != x.top or x.bottom:
            raise ValueError("splits must cover the line")
        parties, start = [], 0
        for s in splits:
            parties.append(list(range(start, start + s)))
            start += s
        return cls(x.top, parties, dict(x.terms), names)

    def scale(self, c) -> "PartyState":
        return PartyState(self.n_points, self.parties, {k: v * c for k, v in self.terms.items()}, self.names)

    def apply_local(self, party: int | str, op: TLElement) -> "PartyState":
        """Act with a TL element on one party's points (bottom of ``op`` glued to the party)."""
        pi = self.party_index(party)
        pts = self.parties[pi]
        n_p = len(pts)
        if op.bottom != n_p or op.top != n_p:
            raise ValueError("local operator must map the party's points to themselves")
        out: dict[tuple, object] = {}
        for key, v in self.terms.items():
            for okey, ov in op.terms.items():
                state_pairs = [(("s", i), ("s", j)) for i, j in enumerate(key) if i < j]
                op_pairs = [(("o", i), ("o", j)) for i, j in enumerate(okey) if i < j]
                joins = [(("s", g), ("o", k)) for k, g in enumerate(pts)]
                free, loops = glue([state_pairs, op_pairs], joins)

                def to_global(node):
                    side, i = node
                    return i if side == "s" else pts[i - n_p]

                p = [0] * self.n_points
                for a, b in free.items():
                    p[to_global(a)] = to_global(b)
                c = v * ov
                if loops:
                    c = c * op.loop ** loops
                k2 = tuple(p)
                out[k2] = out[k2] + c if k2 in out else c
        return PartyState(self.n_points, self.parties, out, self.names)

    def to_json(self) -> dict:
        def enc(v):
            if isinstance(v, LaurentPoly):
                return v.to_json()
            if isinstance(v, RationalFunc):
                return v.to_json()
            v = complex(v)
            return [v.real, v.imag]

        return {
            "n_points": self.n_points,
            "parties": self.parties,
            "names": self.names,
            "terms": [[list(k), enc(v)] for k, v in self.terms.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "PartyState":
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {}
        for k, v in obj["terms"]:
            terms[tuple(k)] = _decode_coeff(v)
        return cls(int(obj["n_points"]), [list(p) for p in obj["parties"]], terms, obj.get("names"))


def _decode_coeff(v):
    if isinstance(v, dict):
        if "numerator" in v:
            return RationalFunc.from_json(v)
        return LaurentPoly.from_json(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    if isinstance(v, int) and not isinstance(v, bool):
        return LaurentPoly.constant(v)
    if isinstance(v, (float, complex)):
        return complex(v)
    if isinstance(v, str):
        return LaurentPoly.constant(int(v))
    raise ValueError(f"cannot decode coefficient {v!r}")


def raw_overlaps(state: PartyState, params: NumericParams | None = None,
                 matchings: Sequence[Sequence[PlanarMatching]] | None = None):
    """Tensor ``R[m_1,...,m_k] = <m_1 ... m_k | state>`` over raw cap diagrams.

    Exact (object array of Laurent/rational values) when the state is exact
    and ``params`` is None; numeric otherwise.
    """
    if matchings is None:
        matchings = [enumerate_matchings(len(p) // 2) for p in state.parties]
    exact = state.exact and params is None
    shape = tuple(len(m) for m in matchings)
    out = np.empty(shape, dtype=object) if exact else np.zeros(shape, dtype=complex)
    d = LOOP if exact else complex(params.d_value)
    coeffs = {k: (v if exact else _num(v, params)) for k, v in state.terms.items()}
    for idx in itertools.product(*(range(s) for s in shape)):
        bra_pairs = []
        joins = []
        for pi, (party, mi) in enumerate(zip(state.parties, idx)):
            m = matchings[pi][mi]
            bra_pairs += [(("p", pi, i), ("p", pi, j)) for i, j in m.pairs()]
            joins += [(g, ("p", pi, k)) for k, g in enumerate(party)]
        total = None
        for key, c in coeffs.items():
            pairs = [(i, j) for i, j in enumerate(key) if i < j]
            _, loops = glue([pairs, bra_pairs], joins)
            term = c * d ** loops if loops else c
            total = term if total is None else total + term
        if total is None:
            total = LaurentPoly() if exact else 0j
        out[idx] = total
    return out


def _num(v, params: NumericParams) -> complex:
    if isinstance(v, (LaurentPoly, RationalFunc)):
        return complex(v.evaluate(params))
    return complex(v)


def _contract(raw: np.ndarray, transforms: Sequence[np.ndarray]) -> np.ndarray:
    """``c[i...] = sum_m conj(T1[m1,i1]) ... raw[m...]``."""
    out = raw
    for axis, t in enumerate(transforms):
        out = np.tensordot(t.conj().T, out, axes=([1], [axis]))
        out = np.moveaxis(out, 0, axis)
    return out


def expand_in_computational_basis(state: PartyState | TLElement, params: NumericParams | None = None,
                                  bases: Sequence[Sequence[TLElement]] | None = None) -> np.ndarray:
    """Coefficients of ``state`` in the product of orthonormal party bases.

    ``bases[p]`` lists party ``p``'s basis states as single-line elements in
    the party's local point order; by default :func:`party_basis` is used.
    """
    if isinstance(state, TLElement):
        state = PartyState.from_tl(state)
    params = params or NumericParams.from_k()
    mats = [enumerate_matchings(len(p) // 2) for p in state.parties]
    if bases is None:
        bases = [party_basis(len(p), params) for p in state.parties]
    transforms = [_basis_matrix(b, m) for b, m in zip(bases, mats)]
    raw = raw_overlaps(state, params, mats)
    c = _contract(raw, transforms)
    # a basis with <i|i> = -1 (odd number of pairs at d < 0) flips the sign of
    # the coefficient: psi = sum_i s_i <i|psi> |i>
    for axis, (party, t) in enumerate(zip(state.parties, transforms)):
        g = numeric_gram(len(party), params)
        signs = np.sign(np.real(np.einsum("mi,mn,ni->i", t.conj(), g, t)))
        shape = [1] * c.ndim
        shape[axis] = len(signs)
        c = c * signs.reshape(shape)
    return c


@dataclass
class ExactExpansion:
    """Exact qubit coefficients.

    ``scaled[idx]`` is the coefficient in the basis ``|0> = e0/d``,
    ``|1~> = e1 - e0/d``; the coefficient on normalised ``|1>`` factors picks
    up ``(d^2-1)^(-1/2)`` for every 1 in the index.
    """

    scaled: np.ndarray

    def rational(self, idx: Sequence[int]) -> RationalFunc:
        ones = sum(idx)
        if ones % 2:
            raise ValueError("coefficient carries a square root of d^2-1")
        val = RationalFunc.coerce(self.scaled[tuple(idx)])
        return val / (LOOP * LOOP - 1) ** (ones // 2) if ones else val

    def numeric(self, params: NumericParams) -> np.ndarray:
        d = params.d_value
        s = 1 / math.sqrt(d * d - 1)
        out = np.zeros(self.scaled.shape, dtype=complex)
        for idx in itertools.product(*(range(n) for n in self.scaled.shape)):
            out[idx] = complex(self.scaled[idx].evaluate(params)) * s ** sum(idx)
        return out


def expand_exact_qubits(state: PartyState | TLElement) -> ExactExpansion:
    """Exact expansion for states whose parties are all four-point qubits."""
    if isinstance(state, TLElement):
        state = PartyState.from_tl(state)
    if any(len(p) != 4 for p in state.parties):
        raise ValueError("exact expansion is implemented for four-point parties only")
    if not state.exact:
        raise ValueError("state coefficients are numeric")
    raw = raw_overlaps(state)
    inv_d = RationalFunc(ONE, LOOP)
    zero_c, one = RationalFunc.coerce(ONE), RationalFunc.coerce(ONE)
    # rows: matchings (e0, e1); columns: basis (|0>, |1~>); conjugation fixes d
    t = [[inv_d, -inv_d], [RationalFunc.coerce(0), one]]
    out = raw
    for axis in range(raw.ndim):
        moved = np.moveaxis(out, axis, 0)
        new = np.empty(moved.shape, dtype=object)
        for i in range(2):
            acc = None
            for m in range(2):
                term = moved[m] * t[m][i]
                acc = term if acc is None else acc + term
            new[i] = acc
        out = np.moveaxis(new, 0, axis)
    simplified = np.empty(out.shape, dtype=object)
    for idx in itertools.product(*(range(n) for n in out.shape)):
        v = RationalFunc.coerce(out[idx])
        simplified[idx] = v.num if v.is_polynomial() else v
    return ExactExpansion(simplified)


# ---------------------------------------------------------------------------
# qudits


@dataclass
class QuditBasis:
    j: float
    n_points: int
    states: list[TLElement]
    labels: list[int]
    overlaps: np.ndarray
    numeric_rank: int

    @property
    def dimension(self) -> int:
        return len(self.states)


def qudit_channel_matching(j: float, s: int) -> PlanarMatching:
    """Diagram on ``8j`` points where four groups of ``2j`` meet in channel ``s``.

    Groups 0-1 and 2-3 share ``2j - s`` lines, groups 0-3 and 1-2 share ``s``.
    """
    tj = int(round(2 * j))
    if abs(2 * j - tj) > 1e-12 or tj < 1:
        raise ValueError("j must be a positive half-integer")
    if not 0 <= s <= tj:
        raise ValueError("channel label out of range")
    g = [k * tj for k in range(4)]
    pairs = []
    for i in range(s):
        pairs.append((g[0] + i, g[3] + tj - 1 - i))
    for t in range(tj - s):
        pairs.append((g[0] + s + t, g[1] + tj - s - 1 - t))
    for t in range(s):
        pairs.append((g[1] + tj - s + t, g[2] + s - 1 - t))
    for t in range(tj - s):
        pairs.append((g[2] + s + t, g[3] + tj - s - 1 - t))
    return PlanarMatching.from_pairs(4 * tj, pairs)


def _group_projector(j: float, params: NumericParams) -> TLElement:
    tj = int(round(2 * j))
    p = jones_wenzl(tj, params)
    full = p
    for _ in range(3):
        full = full.tensor(p)
    return full


def qudit_basis(j: float, params: NumericParams | None = None, tolerance: float = NULL_TOL) -> QuditBasis:
    """Orthonormal basis of four spin-``j`` groups fused to spin zero.

    Each channel diagram is projected with ``P_{2j}`` on every group and the
    results are orthonormalised in channel order ``s = 0..2j``.  For ``j=1/2``
    this is the qubit basis.
    """
    params = params or NumericParams.from_k()
    tj = int(round(2 * j))
    n = 4 * tj
    if tj == 1:
        states = list(orthonormal_qubit_basis(params))
        ov = np.array([[overlap(a, b) for b in states] for a in states])
        return QuditBasis(j, n, states, [0, 1], ov, 2)
    loop = complex(params.d_value)
    proj = _group_projector(j, params)
    raw = []
    for s in range(tj + 1):
        m = qudit_channel_matching(j, s)
        st = TLElement(0, n, {m: 1.0 + 0j}, loop)
        raw.append(tl_multiply(proj, st))
    g = np.array([[overlap(a, b) for b in raw] for a in raw], dtype=complex)
    t, signs = _gram_schmidt(g, tolerance)
    if t.shape[1] < tj + 1:
        raise DegenerateParamsError(f"only {t.shape[1]} of {tj + 1} qudit states survive at k={params.k}")
    states = []
    for col in range(t.shape[1]):
        acc = TLElement.zero(0, n, loop)
        for k, st in enumerate(raw):
            if abs(t[k, col]) > 0:
                acc = acc + st.scale(t[k, col])
        states.append(acc)
    ov = np.array([[overlap(a, b) for b in states] for a in states], dtype=complex)
    return QuditBasis(j, n, states, list(range(tj + 1)), ov, t.shape[1])


def degeneracy_warning(n_points: int, params: NumericParams) -> str | None:
    """Message when an integer level truncates an ``n_points`` space."""
    k = params.k
    if abs(k - round(k)) < 1e-12 and n_points > k:
        return (f"warning: integer k={int(round(k))} < {n_points} points; the diagram space is "
                f"truncated and Gram matrices may be singular or indefinite")
    return None
