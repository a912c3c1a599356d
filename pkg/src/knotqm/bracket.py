"""Kauffman bracket and Jones polynomial by skein resolution of PD diagrams.

Two evaluators are provided and kept deliberately separate:

* :func:`state_sum` walks all ``2^n`` smoothings depth first, with no sharing.
* :func:`skein_dp` resolves crossings in order and merges partial states that
  leave the unresolved part of the diagram connected the same way.

For a crossing ``X(a,b,c,d)`` the A-smoothing joins ``a-b`` and ``c-d``; the
B-smoothing joins ``a-d`` and ``b-c``.  A positive crossing carries framing
factor ``-A^3``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Union

from .diagram import BraidWord, PDParseError, TangleDiagram, TLElement, glue
from .poly import LOOP, ONE, A, LaurentPoly, format_jones, jones_json

__all__ = [
    "BracketResult",
    "JonesQ",
    "kauffman_bracket",
    "bracket_of_braid_closure",
    "jones_polynomial",
    "linking_number",
    "state_sum",
    "skein_dp",
]

_SMOOTH_A = ((0, 1), (2, 3))
_SMOOTH_B = ((0, 3), (1, 2))


@dataclass(frozen=True)
class BracketResult:
    """Framed bracket, writhe, unknot-normalised bracket and framing-free Jones form (in A)."""

    raw: LaurentPoly
    writhe: int
    normalized: LaurentPoly
    jones: LaurentPoly

    @classmethod
    def from_raw(cls, raw: LaurentPoly, writhe: int) -> "BracketResult":
        if raw.is_zero():
            raise ValueError("bracket vanished; not a valid closed diagram")
        normalized = raw.exact_div(LOOP)
        jones = normalized * (-(A ** 3)) ** (-writhe) if writhe else normalized
        return cls(raw, writhe, normalized, jones)

    @property
    def normalized_unknot(self) -> LaurentPoly:
        return self.normalized

    def to_json(self) -> dict:
        return {
            "raw": self.raw.to_json(),
            "writhe": self.writhe,
            "normalized": self.normalized.to_json(),
            "jones_A": self.jones.to_json(),
            "jones_q": jones_json(self.jones),
        }


@dataclass(frozen=True)
class JonesQ:
    """Jones polynomial after ``A^4 -> q^-1``; ``variable`` is ``q`` or ``q^(1/4)``."""

    poly: LaurentPoly
    variable: str
    text: str

    def __str__(self):
        return self.text


def _places(t: TangleDiagram):
    occ = t.occurrences()
    edge_pairs = [tuple(p) for p in occ.values()]
    return edge_pairs


def _end_key(free, bottom: int, n_ends: int) -> tuple:
    """Turn a pairing of ``("end", k)`` places into a partner tuple."""
    p = [0] * n_ends
    for a, b in free.items():
        p[a[1]] = b[1]
    return tuple(p)


def _finish(t: TangleDiagram, acc: dict[tuple, LaurentPoly], bottom: int):
    loops = LOOP ** t.loops if t.loops else ONE
    if t.is_closed:
        total = acc.get((), LaurentPoly())
        return total * loops
    n = len(t.free_ends)
    if not 0 <= bottom <= n:
        raise ValueError("bottom split out of range")
    return TLElement(bottom, n - bottom, {k: v * loops for k, v in acc.items()})


def state_sum(t: TangleDiagram, bottom: int = 0):
    """Plain sum over all smoothings, one loop count per state."""
    edge_pairs = _places(t)
    n = len(t.crossings)
    acc: dict[tuple, LaurentPoly] = {}
    joins: list = []

    def rec(i: int, exp: int):
        if i == n:
            free, loops = glue([edge_pairs], joins)
            key = _end_key(free, bottom, len(t.free_ends))
            term = LaurentPoly({exp: 1}) * (LOOP ** loops)
            acc[key] = acc[key] + term if key in acc else term
            return
        for smoothing, step in ((_SMOOTH_A, 1), (_SMOOTH_B, -1)):
            for s1, s2 in smoothing:
                joins.append((("x", i, s1), ("x", i, s2)))
            rec(i + 1, exp + step)
            del joins[-2:]

    rec(0, 0)
    return _finish(t, acc, bottom)


def skein_dp(t: TangleDiagram, bottom: int = 0):
    """Crossing-by-crossing resolution with merging of equal frontier states.

    The state after resolving crossings ``0..i-1`` is the pairing that the
    resolved part induces on the remaining places (slots of later crossings
    and boundary ends).  States with the same pairing are summed, which is
    the memoisation: the number of live states is bounded by the number of
    planar pairings of the frontier rather than by ``2^i``.
    """
    occ = t.occurrences()
    start = []
    for a, b in occ.values():
        start.append((a, b) if _order(a) < _order(b) else (b, a))
    states: dict[frozenset, LaurentPoly] = {frozenset(start): ONE}
    for i in range(len(t.crossings)):
        nxt: dict[frozenset, LaurentPoly] = {}
        cache: dict[tuple, tuple[frozenset, int]] = {}
        for pairing, coeff in states.items():
            for smoothing, step in ((_SMOOTH_A, 1), (_SMOOTH_B, -1)):
                key = (pairing, smoothing)
                if key not in cache:
                    joins = [(("x", i, s1), ("x", i, s2)) for s1, s2 in smoothing]
                    free, loops = glue([pairing], joins)
                    new = frozenset((a, b) for a, b in free.items() if _order(a) < _order(b))
                    cache[key] = (new, loops)
                new, loops = cache[key]
                term = coeff.shift(step)
                if loops:
                    term = term * LOOP ** loops
                nxt[new] = nxt[new] + term if new in nxt else term
        states = {k: v for k, v in nxt.items() if not v.is_zero()}
    acc: dict[tuple, LaurentPoly] = {}
    for pairing, coeff in states.items():
        p = [0] * len(t.free_ends)
        for a, b in pairing:
            p[a[1]], p[b[1]] = b[1], a[1]
        key = tuple(p)
        acc[key] = acc[key] + coeff if key in acc else coeff
    return _finish(t, acc, bottom)


def _order(place) -> tuple:
    return (0, place[1], 0) if place[0] == "end" else (1, place[1], place[2])


def kauffman_bracket(t: TangleDiagram, closed: bool | None = None, *, memo: bool = True,
                     bottom: int = 0) -> Union[BracketResult, TLElement]:
    """Bracket of a PD diagram.

    Closed diagrams give a :class:`BracketResult`.  Diagrams with free ends
    give a :class:`TLElement` whose endpoints follow ``free_ends``; the first
    ``bottom`` of them become bottom points.
    """
    if closed is None:
        closed = t.is_closed
    if closed and not t.is_closed:
        raise PDParseError("diagram has free ends; it is not closed")
    value = skein_dp(t, bottom) if memo else state_sum(t, bottom)
    if not closed:
        return value
    writhe = t.writhe() if t.crossings else 0
    return BracketResult.from_raw(value, writhe)


def bracket_of_braid_closure(w: BraidWord, closure: str = "trace", *, memo: bool = True) -> BracketResult:
    """Skein bracket of the closed braid, built from its PD code."""
    t = TangleDiagram.from_braid(w, closure)
    raw = skein_dp(t) if memo else state_sum(t)
    writhe = w.writhe if closure == "trace" else (t.writhe() if t.crossings else 0)
    return BracketResult.from_raw(raw, writhe)


def jones_polynomial(b: BracketResult) -> JonesQ:
    """Substitute ``A^4 -> q^-1`` in the framing-free bracket."""
    obj = jones_json(b.jones)
    poly = LaurentPoly.from_json(obj)
    return JonesQ(poly, obj["variable"], format_jones(b.jones))


def linking_number(t: TangleDiagram, comp_a: int, comp_b: int) -> int:
    """Half the signed count of crossings between two components."""
    if comp_a == comp_b:
        raise ValueError("linking number needs two different components")
    if not t.is_closed:
        raise ValueError("linking number needs a closed diagram")
    comp = t.component_of()
    n_comp = len(t.components())
    for c in (comp_a, comp_b):
        if not 0 <= c < n_comp:
            raise ValueError(f"component {c} not found (diagram has {n_comp})")
    signs = t.crossing_signs()
    total = 0
    for (a, b, _c, _d), s in zip(t.crossings, signs):
        if {comp[a], comp[b]} == {comp_a, comp_b}:
            total += s
    if total % 2:
        raise PDParseError("odd inter-component crossing sum; diagram is inconsistent")
    return total // 2
