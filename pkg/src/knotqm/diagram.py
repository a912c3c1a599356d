"""Braid words, planar matchings, the Temperley-Lieb diagram algebra and PD tangles.

Point conventions for rectangular diagrams: a diagram with ``b`` bottom and
``t`` top endpoints numbers the bottom points ``0..b-1`` left to right and the
top points ``b..b+t-1`` left to right.  Walking around the boundary visits
bottom points left to right and then top points right to left, and planarity
is checked in that circular order.  A state on a single boundary line is a
diagram with no bottom points.

Stacking: ``x * y`` places ``y`` underneath ``x``, so ``y`` acts first.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .poly import LOOP, ONE, A, LaurentPoly, NumericParams, RationalFunc, quantum_integer

__all__ = [
    "BraidWord",
    "PlanarMatching",
    "TLElement",
    "TangleDiagram",
    "PDParseError",
    "enumerate_matchings",
    "tl_identity",
    "tl_generator",
    "tl_multiply",
    "braid_to_tl",
    "markov_closure",
    "plat_closure",
    "jones_wenzl",
    "cap_adjacent",
    "connectome_of",
    "glue",
    "catalan",
]

Coeff = Union[LaurentPoly, RationalFunc, complex, float, int]


class PDParseError(ValueError):
    """Malformed braid or PD text."""


def catalan(n: int) -> int:
    from math import comb

    return comb(2 * n, n) // (n + 1)


# ---------------------------------------------------------------------------
# gluing


def glue(
    matchings: Iterable[Mapping[Hashable, Hashable] | Iterable[tuple[Hashable, Hashable]]],
    joins: Iterable[tuple[Hashable, Hashable]],
) -> tuple[dict, int]:
    """Connect several matchings along ``joins`` and read off the result.

    Every node belongs to exactly one matching pair.  A join identifies two
    nodes; nodes that are never joined are free.  Returns the induced pairing
    of the free nodes and the number of closed loops that formed.
    """
    mate: dict = {}
    for m in matchings:
        pairs = m.items() if isinstance(m, Mapping) else m
        for a, b in pairs:
            mate[a] = b
            mate[b] = a
    link: dict = {}
    for a, b in joins:
        if a in link or b in link:
            raise ValueError(f"node joined twice: {a!r} / {b!r}")
        link[a] = b
        link[b] = a
    out: dict = {}
    seen: set = set()
    for start in mate:
        if start in link or start in seen:
            continue
        seen.add(start)
        cur = mate[start]
        while cur in link:
            seen.add(cur)
            nxt = link[cur]
            seen.add(nxt)
            cur = mate[nxt]
        seen.add(cur)
        out[start] = cur
        out[cur] = start
    loops = 0
    for start in mate:
        if start in seen:
            continue
        loops += 1
        cur = start
        while cur not in seen:
            seen.add(cur)
            other = mate[cur]
            seen.add(other)
            cur = link[other]
    return out, loops


# ---------------------------------------------------------------------------
# matchings


@dataclass(frozen=True)
class PlanarMatching:
    """Fixed-point-free involution on ``0..n_points-1`` stored as a partner tuple."""

    partners: tuple[int, ...]

    def __post_init__(self):
        p = self.partners
        for i, j in enumerate(p):
            if not (0 <= j < len(p)) or j == i or p[j] != i:
                raise ValueError(f"not a fixed-point-free involution: {p}")

    @property
    def n_points(self) -> int:
        return len(self.partners)

    @classmethod
    def from_pairs(cls, n_points: int, pairs: Iterable[tuple[int, int]]) -> "PlanarMatching":
        p = [-1] * n_points
        for a, b in pairs:
            if p[a] != -1 or p[b] != -1:
                raise ValueError(f"point used twice in pairs {pairs}")
            p[a], p[b] = b, a
        return cls(tuple(p))

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partners) if i < j]

    def is_planar(self, order: Sequence[int] | None = None) -> bool:
        """Non-crossing test with points visited in ``order`` around a circle."""
        if order is None:
            order = range(self.n_points)
        pos = {pt: k for k, pt in enumerate(order)}
        stack: list[int] = []
        for pt in order:
            q = self.partners[pt]
            if pos[q] > pos[pt]:
                stack.append(pt)
            else:
                if not stack or stack[-1] != q:
                    return False
                stack.pop()
        return True

    def __iter__(self):
        return iter(self.partners)

    def __len__(self):
        return len(self.partners)


def _enumerate_partner_seqs(n_pairs: int) -> list[tuple[int, ...]]:
    def gen(points: tuple[int, ...]) -> Iterator[dict[int, int]]:
        if not points:
            yield {}
            return
        first = points[0]
        for k in range(1, len(points), 2):
            partner = points[k]
            for inner in gen(points[1:k]):
                for outer in gen(points[k + 1:]):
                    yield {**inner, **outer, first: partner, partner: first}

    n = 2 * n_pairs
    out = [tuple(m[i] for i in range(n)) for m in gen(tuple(range(n)))]
    out.sort()
    return out


@lru_cache(maxsize=None)
def _matchings_cached(n_pairs: int) -> tuple[PlanarMatching, ...]:
    return tuple(PlanarMatching(p) for p in _enumerate_partner_seqs(n_pairs))


def enumerate_matchings(n_pairs: int) -> list[PlanarMatching]:
    """All non-crossing perfect matchings of ``2*n_pairs`` points on a line.

    Ordered lexicographically by partner sequence; for two pairs this lists
    ``(0,1)(2,3)`` before ``(0,3)(1,2)``.
    """
    if n_pairs < 0:
        raise ValueError("n_pairs must be non-negative")
    return list(_matchings_cached(n_pairs))


# ---------------------------------------------------------------------------
# braid words


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        object.__setattr__(self, "letters", tuple(int(g) for g in self.letters))
        for g in self.letters:
            if g == 0 or abs(g) >= self.strands:
                raise ValueError(f"letter {g} invalid on {self.strands} strands")

    @property
    def writhe(self) -> int:
        return sum(1 if g > 0 else -1 for g in self.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in reversed(self.letters)))

    def mirror(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-g for g in self.letters))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise ValueError("strand mismatch")
        return BraidWord(self.strands, self.letters + other.letters)

    def permutation(self) -> list[int]:
        """``perm[i]`` is the top position reached by the strand starting at bottom ``i``.

        Letters are applied right to left, matching the stacking order of
        :func:`braid_to_tl` where the last letter sits at the bottom.
        """
        pos = list(range(self.strands))  # pos[strand] -> current position
        at = list(range(self.strands))  # at[position] -> strand
        for g in reversed(self.letters):
            i = abs(g) - 1
            s, t = at[i], at[i + 1]
            at[i], at[i + 1] = t, s
            pos[s], pos[t] = i + 1, i
        return pos

    @classmethod
    def parse(cls, text: str) -> "BraidWord":
        m = re.fullmatch(r"\s*n\s*=\s*(\d+)\s*:\s*(.*?)\s*", text)
        if not m:
            raise PDParseError(f"braid text must look like 'n=<strands>: g1 g2 ...', got {text!r}")
        try:
            letters = tuple(int(tok) for tok in m.group(2).replace(",", " ").split())
        except ValueError as exc:
            raise PDParseError(f"bad braid letter in {text!r}") from exc
        try:
            return cls(int(m.group(1)), letters)
        except ValueError as exc:
            raise PDParseError(str(exc)) from exc

    def __str__(self):
        return f"n={self.strands}: " + " ".join(str(g) for g in self.letters)


# ---------------------------------------------------------------------------
# Temperley-Lieb elements


def _is_exact(c) -> bool:
    return isinstance(c, (LaurentPoly, RationalFunc))


def _conj(c):
    if isinstance(c, (LaurentPoly, RationalFunc)):
        return c.mirror()
    return complex(c).conjugate()


def _is_zero(c) -> bool:
    if isinstance(c, (LaurentPoly, RationalFunc)):
        return c.is_zero()
    return c == 0


@lru_cache(maxsize=200_000)
def _compose(xb: int, xt: int, xp: tuple, yb: int, yp: tuple) -> tuple[tuple, int]:
    """Stack matching ``xp`` (bottom xb, top xt) on ``yp`` (bottom yb, top xb)."""
    xs = [(("x", i), ("x", j)) for i, j in enumerate(xp) if i < j]
    ys = [(("y", i), ("y", j)) for i, j in enumerate(yp) if i < j]
    joins = [(("x", k), ("y", yb + k)) for k in range(xb)]
    out, loops = glue([xs, ys], joins)
    p = [0] * (yb + xt)

    def idx(node):
        side, i = node
        return i if side == "y" else yb + (i - xb)

    for a, b in out.items():
        p[idx(a)] = idx(b)
    return tuple(p), loops


class TLElement:
    """Formal linear combination of planar diagrams with ``bottom``/``top`` endpoints.

    Coefficients are exact (:class:`LaurentPoly` or :class:`RationalFunc`) with
    loop value ``d = -A^2 - A^-2``, or numeric with a numeric loop value.
    """

    __slots__ = ("bottom", "top", "terms", "loop")

    def __init__(self, bottom: int, top: int, terms: Mapping[PlanarMatching | tuple, Coeff] | None = None,
                 loop: Coeff = LOOP):
        if (bottom + top) % 2:
            raise ValueError("total endpoint count must be even")
        self.bottom = bottom
        self.top = top
        self.loop = loop
        acc: dict[tuple, Coeff] = {}
        for m, c in (terms or {}).items():
            key = m.partners if isinstance(m, PlanarMatching) else tuple(m)
            if len(key) != bottom + top:
                raise ValueError("matching size does not match the element's endpoints")
            acc[key] = acc[key] + c if key in acc else c
        self.terms = {k: v for k, v in acc.items() if not _is_zero(v)}

    # constructors
    @classmethod
    def zero(cls, bottom: int, top: int, loop: Coeff = LOOP) -> "TLElement":
        return cls(bottom, top, {}, loop)

    @classmethod
    def single(cls, bottom: int, top: int, partners, coeff: Coeff = ONE, loop: Coeff = LOOP) -> "TLElement":
        m = partners if isinstance(partners, PlanarMatching) else PlanarMatching(tuple(partners))
        if not m.is_planar(boundary_order(bottom, top)):
            raise ValueError(f"matching {m.partners} is not planar for {bottom}/{top} endpoints")
        return cls(bottom, top, {m: coeff}, loop)

    @classmethod
    def scalar(cls, c: Coeff, loop: Coeff = LOOP) -> "TLElement":
        return cls(0, 0, {(): c}, loop)

    # basic queries
    @property
    def strands(self) -> int:
        if self.bottom != self.top:
            raise ValueError("rectangular element has no single strand count")
        return self.bottom

    @property
    def exact(self) -> bool:
        return _is_exact(self.loop)

    def is_zero(self) -> bool:
        return not self.terms

    def matchings(self) -> list[PlanarMatching]:
        return [PlanarMatching(k) for k in self.terms]

    def coeff(self, partners) -> Coeff:
        key = partners.partners if isinstance(partners, PlanarMatching) else tuple(partners)
        return self.terms.get(key, 0)

    def scalar_value(self) -> Coeff:
        if self.bottom or self.top:
            raise ValueError("element is not a scalar")
        return self.terms.get((), 0 if not self.exact else LaurentPoly())

    def _like(self, bottom: int, top: int, terms) -> "TLElement":
        return TLElement(bottom, top, terms, self.loop)

    # linear structure
    def _check_shape(self, other: "TLElement"):
        if (self.bottom, self.top) != (other.bottom, other.top):
            raise ValueError(f"shape mismatch {self.bottom}/{self.top} vs {other.bottom}/{other.top}")

    def __add__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        self._check_shape(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return self._like(self.bottom, self.top, terms)

    def __neg__(self):
        return self._like(self.bottom, self.top, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Coeff) -> "TLElement":
        return self._like(self.bottom, self.top, {k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, TLElement):
            return NotImplemented
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, TLElement):
            return tl_multiply(self, other)
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, TLElement):
            return NotImplemented
        if (self.bottom, self.top) != (other.bottom, other.top):
            return False
        return (self - other).is_zero()

    __hash__ = None  # mutable-looking container semantics

    def allclose(self, other: "TLElement", tol: float = 1e-9) -> bool:
        self._check_shape(other)
        diff = (self.numeric_view() - other.numeric_view()).terms
        return all(abs(v) <= tol for v in diff.values())

    def numeric_view(self) -> "TLElement":
        if self.exact:
            raise ValueError("exact element; evaluate it first")
        return self

    # structural operations
    def evaluate(self, params: NumericParams) -> "TLElement":
        """Numeric copy at the phase ``params``."""
        if not self.exact:
            return self
        terms = {k: complex(v.evaluate(params)) for k, v in self.terms.items()}
        return TLElement(self.bottom, self.top, terms, complex(params.d_value))

    def map_coeffs(self, fn: Callable[[Coeff], Coeff]) -> "TLElement":
        return self._like(self.bottom, self.top, {k: fn(v) for k, v in self.terms.items()})

    def reflect(self) -> "TLElement":
        """Swap top and bottom (time reversal) and conjugate coefficients."""
        b, t = self.bottom, self.top
        # old bottom i -> new top i (index t + i); old top j (index b + j) -> new bottom j
        def rel(i: int) -> int:
            return t + i if i < b else i - b

        terms = {}
        for k, v in self.terms.items():
            p = [0] * (b + t)
            for i, j in enumerate(k):
                p[rel(i)] = rel(j)
            terms[tuple(p)] = _conj(v)
        return self._like(t, b, terms)

    def tensor(self, other: "TLElement") -> "TLElement":
        """Place ``other`` to the right of ``self``."""
        b1, t1, b2, t2 = self.bottom, self.top, other.bottom, other.top

        def r1(i):
            return i if i < b1 else b2 + i

        def r2(i):
            return b1 + i if i < b2 else b1 + t1 + i

        terms: dict[tuple, Coeff] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                p = [0] * (b1 + t1 + b2 + t2)
                for i, j in enumerate(k1):
                    p[r1(i)] = r1(j)
                for i, j in enumerate(k2):
                    p[r2(i)] = r2(j)
                key = tuple(p)
                c = v1 * v2
                terms[key] = terms[key] + c if key in terms else c
        return self._like(b1 + b2, t1 + t2, terms)

    def embed(self, extra: int = 1) -> "TLElement":
        """Add ``extra`` straight strands on the right."""
        return self.tensor(tl_identity(extra, self.loop))

    def __repr__(self):
        return f"TLElement({self.bottom}/{self.top}, {len(self.terms)} terms)"


def boundary_order(bottom: int, top: int) -> list[int]:
    return list(range(bottom)) + list(range(bottom + top - 1, bottom - 1, -1))


def tl_identity(n: int, loop: Coeff = LOOP) -> TLElement:
    p = tuple([n + i for i in range(n)] + list(range(n)))
    one = ONE if _is_exact(loop) else 1.0 + 0j
    return TLElement(n, n, {p: one}, loop)


def tl_generator(n: int, i: int, loop: Coeff = LOOP) -> TLElement:
    """``u_i`` on ``n`` strands (1-based ``i``)."""
    if not 1 <= i <= n - 1:
        raise IndexError(f"generator index {i} out of range for {n} strands")
    p = [n + k for k in range(n)] + list(range(n))
    a, b = i - 1, i
    p[a], p[b] = b, a
    p[n + a], p[n + b] = n + b, n + a
    one = ONE if _is_exact(loop) else 1.0 + 0j
    return TLElement(n, n, {tuple(p): one}, loop)


def tl_multiply(x: TLElement, y: TLElement) -> TLElement:
    """``x`` stacked on top of ``y``; every closed loop contributes the loop value."""
    if x.bottom != y.top:
        raise ValueError(f"cannot stack: {x.bottom} bottom points over {y.top} top points")
    if _is_exact(x.loop) != _is_exact(y.loop):
        raise ValueError("cannot mix exact and numeric elements")
    loop = x.loop
    pw = [ONE if _is_exact(loop) else 1.0 + 0j]
    terms: dict[tuple, Coeff] = {}
    for kx, vx in x.terms.items():
        for ky, vy in y.terms.items():
            key, loops = _compose(x.bottom, x.top, kx, y.bottom, ky)
            while len(pw) <= loops:
                pw.append(pw[-1] * loop)
            c = vx * vy * pw[loops] if loops else vx * vy
            terms[key] = terms[key] + c if key in terms else c
    return TLElement(y.bottom, x.top, terms, loop)


def _letter_tl(n: int, g: int, loop: Coeff = LOOP) -> TLElement:
    u = tl_generator(n, abs(g), loop)
    one = tl_identity(n, loop)
    if _is_exact(loop):
        a, ai = A, A ** -1
    else:
        raise ValueError("numeric braid images need braid_to_tl(..., params=...)")
    if g > 0:
        return one.scale(a) + u.scale(ai)
    return one.scale(ai) + u.scale(a)


def braid_to_tl(w: BraidWord, params: NumericParams | None = None) -> TLElement:
    """Image of a braid word: ``A id + A^-1 u_i`` per positive letter, ``A^-1 id + A u_i`` per negative.

    The first letter ends up on top (acts last).
    """
    n = w.strands
    if params is None:
        result = tl_identity(n)
        for g in w.letters:
            result = tl_multiply(result, _letter_tl(n, g))
        return result
    a = params.A_value
    loop = complex(params.d_value)
    result = tl_identity(n, loop)
    for g in w.letters:
        u = tl_generator(n, abs(g), loop)
        one = tl_identity(n, loop)
        step = one.scale(a) + u.scale(1 / a) if g > 0 else one.scale(1 / a) + u.scale(a)
        result = tl_multiply(result, step)
    return result


def _closure_value(x: TLElement, joins_for: Callable[[int, int], list[tuple[int, int]]]) -> Coeff:
    total = None
    for k, v in x.terms.items():
        pairs = [(i, j) for i, j in enumerate(k) if i < j]
        extra = joins_for(x.bottom, x.top)
        # caps are extra matchings on fresh nodes joined to the element's points
        cap_pairs = [(("c", a), ("c", b)) for a, b in extra]
        joins = []
        for a, b in extra:
            joins.append((a, ("c", a)))
            joins.append((b, ("c", b)))
        _, loops = glue([pairs, cap_pairs], joins)
        c = v * x.loop ** loops if loops else v
        total = c if total is None else total + c
    if total is None:
        return LaurentPoly() if x.exact else 0j
    return total


def _require_poly(val):
    if isinstance(val, RationalFunc):
        if not val.is_polynomial():
            raise ValueError("closure has a nontrivial denominator; evaluate numerically instead")
        return val.as_poly()
    return val


def markov_closure(x: TLElement) -> Coeff:
    """Join top ``i`` to bottom ``i`` for every strand and evaluate loops."""
    n = x.strands
    total = None
    for k, v in x.terms.items():
        pairs = [(i, j) for i, j in enumerate(k) if i < j]
        # the closure arcs: attach through fresh nodes so glue sees a matching per node
        arcs = [(("b", i), ("t", i)) for i in range(n)]
        joins = [(i, ("b", i)) for i in range(n)] + [(n + i, ("t", i)) for i in range(n)]
        _, loops = glue([pairs, arcs], joins)
        c = v * x.loop ** loops if loops else v
        total = c if total is None else total + c
    if total is None:
        total = LaurentPoly() if x.exact else 0j
    return _require_poly(total) if x.exact else total


def plat_closure(x: TLElement) -> Coeff:
    """Cap neighbouring pairs ``(0,1), (2,3), ...`` on both top and bottom."""
    if x.bottom % 2 or x.top % 2:
        raise ValueError("plat closure needs an even number of points on each side")

    def caps(b, t):
        out = [(2 * j, 2 * j + 1) for j in range(b // 2)]
        out += [(b + 2 * j, b + 2 * j + 1) for j in range(t // 2)]
        return out

    val = _closure_value(x, caps)
    return _require_poly(val) if x.exact else val


def cap_adjacent(x: TLElement, side: str, position: int) -> TLElement:
    """Close endpoints ``position`` and ``position+1`` on ``side`` with a cap."""
    if side not in ("top", "bottom"):
        raise ValueError("side must be 'top' or 'bottom'")
    count = x.top if side == "top" else x.bottom
    if not 0 <= position < count - 1:
        raise IndexError(f"cap position {position} out of range for {count} points")
    nb, nt = (x.bottom, x.top - 2) if side == "top" else (x.bottom - 2, x.top)
    if side == "top":
        cap = tl_identity(position, x.loop).tensor(
            TLElement.single(2, 0, (1, 0), _unit(x.loop), x.loop)).tensor(
            tl_identity(x.top - position - 2, x.loop))
        res = tl_multiply(cap, x)
    else:
        cup = tl_identity(position, x.loop).tensor(
            TLElement.single(0, 2, (1, 0), _unit(x.loop), x.loop)).tensor(
            tl_identity(x.bottom - position - 2, x.loop))
        res = tl_multiply(x, cup)
    assert (res.bottom, res.top) == (nb, nt)
    return res


def _unit(loop):
    return ONE if _is_exact(loop) else 1.0 + 0j


@lru_cache(maxsize=16)
def _jones_wenzl_exact(m: int) -> TLElement:
    if m == 1:
        return tl_identity(1)
    prev = _jones_wenzl_exact(m - 1).embed(1)
    coef = RationalFunc(quantum_integer(m - 2), quantum_integer(m - 1))
    u = tl_generator(m, m - 1)
    mid = tl_multiply(tl_multiply(prev, u), prev)
    out = prev - mid.scale(coef)
    return out.map_coeffs(_simplify_coeff)


def _simplify_coeff(c):
    if isinstance(c, RationalFunc) and c.is_polynomial():
        return c.num
    return c


def _jones_wenzl_numeric(m: int, params: NumericParams) -> TLElement:
    loop = complex(params.d_value)
    out = tl_identity(1, loop)
    a = params.A_value
    for n in range(1, m):
        prev = out.embed(1)
        ratio = quantum_integer(n - 1).evaluate(a) / quantum_integer(n).evaluate(a)
        u = tl_generator(n + 1, n, loop)
        out = prev - tl_multiply(tl_multiply(prev, u), prev).scale(ratio)
    return out


def jones_wenzl(m: int, params: NumericParams | None = None) -> TLElement:
    """Jones-Wenzl projector on ``m`` strands by the standard recursion.

    ``P_{n+1} = P_n (x) 1 - (Delta_{n-1}/Delta_n) (P_n (x) 1) u_n (P_n (x) 1)``.
    With ``params`` the recursion runs numerically, which is how projectors
    beyond four or five strands stay cheap.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if params is None:
        return _jones_wenzl_exact(m)
    return _jones_wenzl_numeric(m, params)


# ---------------------------------------------------------------------------
# PD tangles


@dataclass
class TangleDiagram:
    """Planar-diagram presentation of a tangle or link.

    Each crossing lists four edge labels counterclockwise starting from the
    incoming under-strand, so the under-strand runs from slot 0 to slot 2.
    ``free_ends`` lists boundary edges in boundary order; an edge listed twice
    there is an arc joining two boundary points directly.  ``loops`` counts
    extra closed components with no crossings.  ``orientations`` holds
    explicit edge directions: ``+1`` means the edge runs from its first
    occurrence to its second, where free-end occurrences come before any
    crossing occurrence.
    """

    crossings: list[tuple[Hashable, Hashable, Hashable, Hashable]]
    free_ends: list[Hashable] = field(default_factory=list)
    orientations: dict[Hashable, int] = field(default_factory=dict)
    loops: int = 0

    def __post_init__(self):
        self.crossings = [tuple(c) for c in self.crossings]
        self.validate()

    # -- structure -------------------------------------------------------
    def occurrences(self) -> dict[Hashable, list[tuple]]:
        """``edge -> [("end", k) | ("x", crossing, slot), ...]`` in canonical order."""
        occ: dict[Hashable, list[tuple]] = {}
        for k, e in enumerate(self.free_ends):
            occ.setdefault(e, []).append(("end", k))
        for ci, c in enumerate(self.crossings):
            for s, e in enumerate(c):
                occ.setdefault(e, []).append(("x", ci, s))
        return occ

    def validate(self) -> None:
        for c in self.crossings:
            if len(c) != 4:
                raise PDParseError(f"crossing {c} does not have four edges")
        for e, places in self.occurrences().items():
            if len(places) != 2:
                raise PDParseError(f"edge {e!r} occurs {len(places)} times; every edge needs two ends")
        for e, s in self.orientations.items():
            if s not in (1, -1):
                raise PDParseError(f"orientation of {e!r} must be +1 or -1")

    @property
    def is_closed(self) -> bool:
        return not self.free_ends

    def edges(self) -> list[Hashable]:
        return list(self.occurrences())

    # -- orientation -----------------------------------------------------
    def _direction_table(self, force: bool = False) -> dict[Hashable, int]:
        """Infer edge directions; see the class docstring for the sign meaning.

        Explicit flags come first, then the under-strand rule at every
        crossing, then the over-strand rule (one of slots 1 and 3 flows in).
        Crossings still undecided fall back on consecutive labels: along a
        component the next edge carries the next label, wrapping around.
        """
        occ = self.occurrences()
        dirs: dict[Hashable, int] = {}

        def head(e):
            return occ[e][1] if dirs[e] == 1 else occ[e][0]

        def set_head(e, place) -> bool:
            want = 1 if place == occ[e][1] else -1
            if e in dirs:
                if dirs[e] != want:
                    raise PDParseError(f"inconsistent orientation at edge {e!r}")
                return False
            dirs[e] = want
            return True

        def set_tail(e, place) -> bool:
            first, second = occ[e]
            return set_head(e, first if place == second else second)

        for e, s in self.orientations.items():
            if e not in occ:
                raise PDParseError(f"orientation given for unknown edge {e!r}")
            dirs[e] = s

        def propagate():
            changed = True
            while changed:
                changed = False
                for ci, (a, b, c, d) in enumerate(self.crossings):
                    changed |= set_head(a, ("x", ci, 0))
                    changed |= set_tail(c, ("x", ci, 2))
                    for x, sx, y, sy in ((b, 1, d, 3), (d, 3, b, 1)):
                        if x in dirs:
                            if head(x) == ("x", ci, sx):
                                changed |= set_tail(y, ("x", ci, sy))
                            else:
                                changed |= set_head(y, ("x", ci, sy))

        propagate()
        if len(dirs) < len(occ):
            succ = self._successor_map()
            for ci, (a, b, c, d) in enumerate(self.crossings):
                if b in dirs and d in dirs:
                    continue
                if succ.get(d) == b and b != d:
                    set_head(d, ("x", ci, 3))
                elif succ.get(b) == d and b != d:
                    set_head(b, ("x", ci, 1))
                else:
                    continue
                propagate()
        if force:
            # remaining components only pass over others; orient each by its first edge
            for e in occ:
                if e not in dirs:
                    dirs[e] = 1
                    propagate()
        return dirs

    def _successor_map(self) -> dict[Hashable, Hashable]:
        succ = {}
        for comp in self.components():
            ints = sorted(e for e in comp if isinstance(e, int))
            if len(ints) != len(comp):
                continue
            for i, e in enumerate(ints):
                succ[e] = ints[(i + 1) % len(ints)]
        return succ

    def complete_orientation(self) -> None:
        """Fix any undetermined edge directions deterministically and store them."""
        occ = self.occurrences()
        dirs = self._direction_table(force=True)
        self._set_orientation_from_heads({e: (occ[e][1] if dirs[e] == 1 else occ[e][0]) for e in occ})

    def heads(self) -> dict[Hashable, tuple]:
        """Place each edge flows into."""
        occ = self.occurrences()
        return {e: (occ[e][1] if s == 1 else occ[e][0]) for e, s in self.directions().items()}

    def _set_orientation_from_heads(self, heads: Mapping[Hashable, tuple]) -> None:
        occ = self.occurrences()
        self.orientations = {e: (1 if heads[e] == occ[e][1] else -1) for e in occ}

    def orientation_known(self) -> bool:
        try:
            dirs = self._direction_table()
        except PDParseError:
            return False
        return all(e in dirs for e in self.occurrences())

    def directions(self) -> dict[Hashable, int]:
        dirs = self._direction_table()
        missing = [e for e in self.occurrences() if e not in dirs]
        if missing:
            raise PDParseError(f"orientation undetermined for edges {missing}; add O(edge,+/-) lines")
        return dirs

    def crossing_signs(self) -> list[int]:
        """+1 when the over-strand runs from slot 3 to slot 1."""
        heads = self.heads()
        return [1 if heads[c[3]] == ("x", ci, 3) else -1 for ci, c in enumerate(self.crossings)]

    def writhe(self) -> int:
        return sum(self.crossing_signs())

    def components(self) -> list[list[Hashable]]:
        """Edge sets of the strands, following under (0-2) and over (1-3) through crossings."""
        occ = self.occurrences()
        parent = {e: e for e in occ}

        def find(e):
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for c in self.crossings:
            for x, y in ((c[0], c[2]), (c[1], c[3])):
                parent[find(x)] = find(y)
        groups: dict[Hashable, list] = {}
        for e in occ:
            groups.setdefault(find(e), []).append(e)
        return [sorted(g, key=_sort_key) for g in sorted(groups.values(), key=lambda g: min(map(_sort_key, g)))]

    def component_of(self) -> dict[Hashable, int]:
        return {e: i for i, comp in enumerate(self.components()) for e in comp}

    # -- transformations -------------------------------------------------
    def mirror(self) -> "TangleDiagram":
        """Switch every crossing.

        Rotating the label list keeps the oriented strands intact: a positive
        crossing ``(a,b,c,d)`` becomes ``(d,a,b,c)`` and a negative one ``(b,c,d,a)``.
        Without orientation data either rotation gives the same unoriented mirror.
        """
        try:
            heads = self.heads()
            signs = self.crossing_signs()
        except PDParseError:
            heads, signs = None, [1] * len(self.crossings)
        new = []
        for (a, b, c, d), s in zip(self.crossings, signs):
            new.append((d, a, b, c) if s > 0 else (b, c, d, a))
        out = TangleDiagram(new, list(self.free_ends), {}, self.loops)
        if heads is not None:
            moved = {}
            for e, h in heads.items():
                if h[0] == "x":
                    shift = 1 if signs[h[1]] > 0 else -1
                    h = ("x", h[1], (h[2] + shift) % 4)
                moved[e] = h
            out._set_orientation_from_heads(moved)
        return out

    # -- text format -----------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "TangleDiagram":
        crossings, ends, orient = [], [], {}
        loops = 0
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for tok in re.findall(r"[A-Za-z]+\([^)]*\)", line):
                head, body = tok.split("(", 1)
                args = [a.strip() for a in body.rstrip(")").split(",") if a.strip()]
                head = head.upper()
                if head == "X":
                    if len(args) != 4:
                        raise PDParseError(f"line {lineno}: X needs four labels")
                    crossings.append(tuple(_label(a) for a in args))
                elif head == "O":
                    if len(args) != 2 or args[1] not in ("+", "-"):
                        raise PDParseError(f"line {lineno}: O needs (edge,+/-)")
                    orient[_label(args[0])] = 1 if args[1] == "+" else -1
                elif head == "E":
                    ends.extend(_label(a) for a in args)
                elif head == "L":
                    if len(args) != 1:
                        raise PDParseError(f"line {lineno}: L needs a loop count")
                    loops += int(args[0])
                else:
                    raise PDParseError(f"line {lineno}: unknown record {head}")
            rest = re.sub(r"[A-Za-z]+\([^)]*\)", "", line).strip(" ,;")
            if rest:
                raise PDParseError(f"line {lineno}: cannot parse {rest!r}")
        return cls(crossings, ends, orient, loops)

    def to_text(self) -> str:
        lines = [f"X({a},{b},{c},{d})" for a, b, c, d in self.crossings]
        if self.free_ends:
            lines.append("E(" + ",".join(map(str, self.free_ends)) + ")")
        for e, s in self.orientations.items():
            lines.append(f"O({e},{'+' if s > 0 else '-'})")
        if self.loops:
            lines.append(f"L({self.loops})")
        return "\n".join(lines) + "\n"

    # -- builders --------------------------------------------------------
    @classmethod
    def from_braid(cls, w: BraidWord, closure: str | None = "trace") -> "TangleDiagram":
        """PD code for a braid, closed by ``trace`` or ``plat``, or left open (``None``).

        Strands run upward and the first letter of the word sits on top.  An
        open braid has free ends bottom ``0..n-1`` then top ``0..n-1``, the
        same order as :class:`TLElement` points.  Orientation is recorded
        explicitly (upward for trace closures and open braids).
        """
        n = w.strands
        counter = iter(range(1, 10**9))
        cur = [next(counter) for _ in range(n)]
        bottom = list(cur)
        crossings = []
        heads: dict = {}
        for g in reversed(w.letters):
            i = abs(g) - 1
            ci = len(crossings)
            x_in, y_in = cur[i], cur[i + 1]
            x_out, y_out = next(counter), next(counter)
            if g > 0:
                # left-to-right strand x passes over
                crossings.append((y_in, x_out, y_out, x_in))
                heads[y_in], heads[x_in] = ("x", ci, 0), ("x", ci, 3)
            else:
                crossings.append((x_in, y_in, x_out, y_out))
                heads[x_in], heads[y_in] = ("x", ci, 0), ("x", ci, 1)
            cur[i], cur[i + 1] = y_out, x_out
        top = list(cur)
        if closure is None:
            ends = bottom + top
            for k in range(n, 2 * n):
                heads[ends[k]] = ("end", k)
            t = cls(crossings, ends, {}, 0)
            t._set_orientation_from_heads(heads)
            return t
        if closure == "trace":
            ident = [(top[i], bottom[i]) for i in range(n)]
        elif closure == "plat":
            if n % 2:
                raise ValueError("plat closure needs an even strand count")
            ident = []
            for j in range(0, n, 2):
                ident.append((top[j + 1], top[j]))
                ident.append((bottom[j + 1], bottom[j]))
        else:
            raise ValueError(f"unknown closure {closure!r}")
        parent: dict = {}

        def find(e):
            parent.setdefault(e, e)
            while parent[e] != e:
                parent[e] = parent[parent[e]]
                e = parent[e]
            return e

        for e in bottom + top + [e for c in crossings for e in c]:
            find(e)
        for a, b in ident:
            parent[find(a)] = find(b)
        used = sorted({find(e) for c in crossings for e in c})
        free_loops = len({find(e) for e in parent} - set(used))
        rename = {old: k + 1 for k, old in enumerate(used)}
        new = [tuple(rename[find(e)] for e in c) for c in crossings]
        if closure == "plat":
            return cls._oriented_by_walk(new, free_loops)
        t = cls(new, [], {}, free_loops)
        # every merged edge keeps the head of the segment that enters a crossing
        t._set_orientation_from_heads({rename[find(e)]: h for e, h in heads.items()})
        return t


    @classmethod
    def _oriented_by_walk(cls, crossings, loops: int) -> "TangleDiagram":
        """Orient each component by walking it, then rotate crossings whose
        under-strand runs backwards so slot 0 is incoming again."""
        t = cls(crossings, [], {}, loops)
        occ = t.occurrences()
        heads: dict = {}
        for e0 in occ:
            if e0 in heads:
                continue
            e, place = e0, occ[e0][0]
            while e not in heads:
                first, second = occ[e]
                nxt = second if place == first else first
                heads[e] = nxt
                _, ci, s = nxt
                place = ("x", ci, (s + 2) % 4)
                e = t.crossings[ci][place[2]]
        new = []
        for ci, c in enumerate(t.crossings):
            if heads[c[0]] == ("x", ci, 0):
                new.append(c)
            else:
                new.append((c[2], c[3], c[0], c[1]))
                for e, h in heads.items():
                    if h[0] == "x" and h[1] == ci:
                        heads[e] = ("x", ci, (h[2] + 2) % 4)
        out = cls(new, [], {}, loops)
        out._set_orientation_from_heads(heads)
        return out


def _is_successor(a, b) -> bool:
    try:
        return int(b) == int(a) + 1
    except (TypeError, ValueError):
        return False


def _sort_key(e):
    return (0, e, "") if isinstance(e, int) else (1, 0, str(e))


def _label(tok: str):
    tok = tok.strip()
    return int(tok) if re.fullmatch(r"-?\d+", tok) else tok


def connectome_of(t: Union[TangleDiagram, BraidWord, TLElement]) -> PlanarMatching | tuple[int, ...]:
    """Endpoint connectivity with crossing information forgotten.

    Tangles: follow each strand straight through its crossings; the result
    pairs positions in ``free_ends``.  Braids: the permutation matching on
    ``2n`` points (bottom then top).  Single-term TL elements: their matching.
    Crossing connectomes need not be planar, so the result may be returned as
    a plain partner tuple.
    """
    if isinstance(t, BraidWord):
        perm = t.permutation()
        n = t.strands
        p = [0] * (2 * n)
        for i, j in enumerate(perm):
            p[i], p[n + j] = n + j, i
        return _maybe_planar(tuple(p), boundary_order(n, n))
    if isinstance(t, TLElement):
        if len(t.terms) != 1:
            raise ValueError("connectome of a superposition is not defined; pass the tangle")
        (k,) = t.terms
        return PlanarMatching(k)
    occ = t.occurrences()
    through = {}
    for ci, c in enumerate(t.crossings):
        for s in range(4):
            through[("x", ci, s)] = ("x", ci, (s + 2) % 4)
    p = [0] * len(t.free_ends)
    for k, e in enumerate(t.free_ends):
        place = ("end", k)
        while True:
            e_places = occ[e]
            other = e_places[1] if e_places[0] == place else e_places[0]
            if other[0] == "end":
                p[k] = other[1]
                break
            place = through[other]
            e = t.crossings[place[1]][place[2]]
    return _maybe_planar(tuple(p), list(range(len(p))))


def _maybe_planar(p: tuple, order) -> PlanarMatching | tuple:
    m = PlanarMatching(p)
    return m if m.is_planar(order) else p
