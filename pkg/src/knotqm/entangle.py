"""Entanglement of diagrammatic states.

Numeric quantities (density matrices, entropies, Schmidt data) are computed
at a :class:`NumericParams` phase.  Connectome statements (surgery, line
counting, the entropy inequalities) are exact integer bookkeeping.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .diagram import PlanarMatching, catalan, enumerate_matchings
from .hilbert import (
    PartyState,
    _basis_matrix,
    _contract,
    expand_in_computational_basis,
    numeric_gram,
    party_basis,
    raw_overlaps,
)
from .poly import LOOP, ONE, LaurentPoly, NumericParams, RationalFunc

__all__ = [
    "SchmidtResult",
    "DensityOperator",
    "Connectome",
    "EntropyError",
    "reduced_density",
    "von_neumann_entropy",
    "schmidt_decompose",
    "surgery_reduce",
    "connectome_class",
    "slocc_class",
    "connectome_entropy",
    "check_inequalities",
    "random_connectome",
    "lm_connectome",
    "tripartite_connectome",
    "TRIPARTITE_EXPECTED",
    "tripartite_ghz_expand",
    "search_inequality_violations",
]

EIG_FLOOR = 1e-12
NEG_CLIP = 1e-9
RANK_TOL = 1e-9


class EntropyError(ValueError):
    pass


@dataclass
class SchmidtResult:
    coefficients: np.ndarray  # descending, sums to 1
    rank: int
    coefficient_matrix: np.ndarray


@dataclass
class DensityOperator:
    scope: list[str]
    matrix: np.ndarray
    normalized: bool = True
    diagrammatic: np.ndarray | None = None  # independent gluing route, when computed

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.matrix + self.matrix.conj().T) / 2)


# ---------------------------------------------------------------------------
# density matrices


def _as_party_state(state) -> PartyState:
    if isinstance(state, PartyState):
        return state
    if isinstance(state, Connectome):
        return state.to_state()
    from .diagram import TLElement

    if isinstance(state, TLElement):
        return PartyState.from_tl(state)
    raise TypeError(f"unsupported state type {type(state).__name__}")


def _signs(party_size: int, t: np.ndarray, params: NumericParams) -> np.ndarray:
    g = numeric_gram(party_size, params)
    return np.sign(np.real(np.einsum("mi,mn,ni->i", t.conj(), g, t)))


def reduced_density(state, keep_party, params: NumericParams | None = None,
                    bases=None, check: bool = True) -> DensityOperator:
    """Reduced density of ``keep_party`` (a name, an index, or a list of them).

    Two routes are computed: the partial trace of ``c c^dagger`` in the
    orthonormal product basis, and gluing the traced parties' raw diagrams
    with the inverse Gram matrix as the metric.  With ``check`` they must
    agree to 1e-9.
    """
    st = _as_party_state(state)
    params = params or NumericParams.from_k()
    keep = keep_party if isinstance(keep_party, (list, tuple)) else [keep_party]
    keep_idx = [st.party_index(p) for p in keep]
    traced = [i for i in range(len(st.parties)) if i not in keep_idx]
    if not traced:
        raise ValueError("need at least one traced party")
    if bases is None:
        bases = [party_basis(len(p), params) for p in st.parties]
    mats = [enumerate_matchings(len(p) // 2) for p in st.parties]
    transforms = [_basis_matrix(b, m) for b, m in zip(bases, mats)]
    signs = [_signs(len(p), t, params) for p, t in zip(st.parties, transforms)]
    raw = raw_overlaps(st, params, mats)

    # route 1: coefficients in the orthonormal basis
    c = _contract(raw, transforms)
    for axis, s in enumerate(signs):
        shape = [1] * c.ndim
        shape[axis] = len(s)
        c = c * s.reshape(shape)
    order = keep_idx + traced
    cm = np.transpose(c, order)
    dk = int(np.prod([cm.shape[i] for i in range(len(keep_idx))]))
    cm = cm.reshape(dk, -1)
    tw = np.ones(1)
    for i in traced:
        tw = np.kron(tw, signs[i])
    rho = (cm * tw) @ cm.conj().T
    rho = _normalize(rho)

    # route 2: keep the traced parties in the raw diagram basis, metric G^-1
    x = _contract(raw, [transforms[i] if i in keep_idx else np.eye(len(mats[i])) for i in range(len(mats))])
    for i in keep_idx:
        shape = [1] * x.ndim
        shape[i] = len(signs[i])
        x = x * signs[i].reshape(shape)
    xm = np.transpose(x, order).reshape(dk, -1)
    ginv = np.ones((1, 1))
    for i in traced:
        ginv = np.kron(ginv, np.linalg.pinv(numeric_gram(len(st.parties[i]), params), rcond=1e-12, hermitian=True))
    rho2 = _normalize(xm @ ginv.T @ xm.conj().T)
    if check and not np.allclose(rho, rho2, atol=1e-9, rtol=0):
        raise ArithmeticError("numeric and diagrammatic partial traces disagree")
    scope = [st.names[i] for i in keep_idx]
    return DensityOperator(scope, rho, True, rho2)


def _normalize(rho: np.ndarray) -> np.ndarray:
    tr = np.trace(rho)
    if abs(tr) < 1e-15:
        raise EntropyError("state has zero norm")
    rho = rho / tr
    return (rho + rho.conj().T) / 2


def von_neumann_entropy(rho: DensityOperator | np.ndarray) -> float:
    """``-sum lambda log lambda`` (natural log) over eigenvalues above 1e-12."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    if isinstance(rho, DensityOperator) and not rho.normalized:
        raise EntropyError("density operator is not normalized")
    if abs(np.trace(m) - 1) > 1e-9:
        raise EntropyError("density operator must have unit trace")
    lam = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if lam.min() < -NEG_CLIP:
        raise EntropyError(f"negative eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > EIG_FLOOR]
    return float(-np.sum(lam * np.log(lam)))


def schmidt_decompose(state, params: NumericParams | None = None, bases=None,
                      tolerance: float = RANK_TOL) -> SchmidtResult:
    """Squared singular values of the bipartite coefficient matrix, normalised."""
    st = _as_party_state(state)
    if len(st.parties) != 2:
        raise ValueError("Schmidt decomposition needs exactly two parties")
    c = expand_in_computational_basis(st, params, bases)
    sv = np.linalg.svd(c, compute_uv=False)
    lam = sv ** 2
    total = lam.sum()
    if total <= 0:
        raise EntropyError("state has zero norm")
    lam = np.sort(lam / total)[::-1]
    rank = int(np.sum(lam > tolerance))
    return SchmidtResult(lam, rank, c)


def slocc_class(state, params: NumericParams | None = None, bases=None) -> int:
    """Schmidt rank, the SLOCC invariant of a bipartite pure state."""
    if isinstance(state, Connectome):
        reduced, _ = surgery_reduce(state)
        if len(reduced.parties) != 2:
            raise ValueError("slocc_class needs two parties")
        return slocc_class(reduced.to_state(), params, bases)
    return schmidt_decompose(state, params, bases).rank


# ---------------------------------------------------------------------------
# connectomes


@dataclass
class Connectome:
    """Endpoint matching with a party label on every endpoint.

    ``loop_factor`` is the power of ``d`` multiplying the diagram, accumulated
    by surgery (each cut contributes ``-1``).
    """

    parties: list[list[int]]
    pairing: tuple[int, ...]
    loop_factor: int = 0
    names: list[str] | None = None

    def __post_init__(self):
        self.pairing = tuple(self.pairing)
        PlanarMatching(self.pairing)  # involution check
        flat = sorted(p for party in self.parties for p in party)
        if flat != list(range(len(self.pairing))):
            raise ValueError("parties must partition the endpoints")
        if self.names is None:
            self.names = [chr(ord("A") + i) for i in range(len(self.parties))]

    @property
    def n_points(self) -> int:
        return len(self.pairing)

    def owner(self) -> list[int]:
        own = [0] * self.n_points
        for pi, party in enumerate(self.parties):
            for p in party:
                own[p] = pi
        return own

    def lines(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.pairing) if i < j]

    @property
    def cross_counts(self) -> dict[tuple[int, int], int]:
        own = self.owner()
        out: dict[tuple[int, int], int] = {}
        for i, j in self.lines():
            a, b = sorted((own[i], own[j]))
            if a != b:
                out[(a, b)] = out.get((a, b), 0) + 1
        return out

    def boundary_count(self, group: Sequence[int]) -> int:
        """Lines with exactly one end in the union of the given parties."""
        own = self.owner()
        g = set(group)
        return sum(1 for i, j in self.lines() if (own[i] in g) != (own[j] in g))

    def between(self, a: int, b: int) -> int:
        return self.cross_counts.get(tuple(sorted((a, b))), 0)

    def scalar(self) -> RationalFunc:
        if self.loop_factor >= 0:
            return RationalFunc.coerce(LOOP ** self.loop_factor)
        return RationalFunc(ONE, LOOP ** (-self.loop_factor))

    def to_state(self) -> PartyState:
        return PartyState(self.n_points, [list(p) for p in self.parties],
                          {self.pairing: self.scalar()}, list(self.names))

    def to_json(self) -> dict:
        return {"parties": self.parties, "pairing": list(self.pairing), "names": self.names,
                "loop_factor": self.loop_factor}

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "Connectome":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls([list(p) for p in obj["parties"]], tuple(obj["pairing"]),
                   int(obj.get("loop_factor", 0)), obj.get("names"))


def surgery_reduce(c: Connectome) -> tuple[Connectome, RationalFunc]:
    """Cut every two-line neck until none is left.

    A set of parties joined to the rest by exactly two lines ``p1-q1`` and
    ``p2-q2`` is rewritten as caps ``p1-p2`` and ``q1-q2`` times ``1/d``.
    Returns the fixed point and its total scalar ``d^loop_factor``.
    """
    pairing = list(c.pairing)
    own = c.owner()
    k = len(c.parties)
    factor = c.loop_factor
    changed = True
    while changed:
        changed = False
        for size in range(1, k // 2 + 1):
            for group in itertools.combinations(range(k), size):
                g = set(group)
                cut = [(i, pairing[i]) for i in range(len(pairing))
                       if own[i] in g and own[pairing[i]] not in g]
                if len(cut) != 2:
                    continue
                (p1, q1), (p2, q2) = cut
                pairing[p1], pairing[p2] = p2, p1
                pairing[q1], pairing[q2] = q2, q1
                factor -= 1
                changed = True
                break
            if changed:
                break
    out = Connectome([list(p) for p in c.parties], tuple(pairing), factor, list(c.names))
    return out, out.scalar()


def connectome_class(c: Connectome) -> str:
    """``separable``, ``biseparable`` or ``genuine`` after surgery.

    For three parties a genuinely connected connectome is in the GHZ class.
    """
    reduced, _ = surgery_reduce(c)
    k = len(reduced.parties)
    parent = list(range(k))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in reduced.cross_counts:
        parent[find(a)] = find(b)
    groups = len({find(i) for i in range(k)})
    if groups == k:
        return "separable"
    if groups == 1:
        return "GHZ" if k == 3 else "genuine"
    return "biseparable"


def connectome_entropy(c: Connectome, party: int | str) -> tuple[float, float]:
    """Entropy of one party counted from its cross lines: ``(log C_{m/2}, m log 2)``."""
    pi = party if isinstance(party, int) else c.names.index(party)
    m = c.boundary_count([pi])
    if m % 2:
        raise EntropyError(f"party has an odd number ({m}) of cross lines")
    return math.log(catalan(m // 2)), m * math.log(2)


def check_inequalities(c: Connectome) -> dict:
    """Subadditivity, strong subadditivity and monogamy in line-count units.

    Entropies are measured by boundary line counts ``N_X``.  For each ordered
    triple of single parties ``(A, B, C)``:

    * ``N_A + N_B - N_AB = 2 l_AB``
    * ``N_AB + N_BC - N_B - N_ABC = 2 l_AC``
    * ``I(A:BC) - I(A:B) - I(A:C) = 0`` with ``I(X:Y) = N_X + N_Y - N_XY``
    """
    k = len(c.parties)
    report = {"subadditivity": [], "strong_subadditivity": [], "monogamy": [], "ok": True}
    for a, b in itertools.permutations(range(k), 2):
        slack = c.boundary_count([a]) + c.boundary_count([b]) - c.boundary_count([a, b])
        good = slack == 2 * c.between(a, b) and slack >= 0
        report["subadditivity"].append({"A": a, "B": b, "slack": slack, "two_l": 2 * c.between(a, b), "ok": good})
        report["ok"] &= good
    if k >= 3:
        for a, b, cc in itertools.permutations(range(k), 3):
            n = c.boundary_count
            ssa = n([a, b]) + n([b, cc]) - n([b]) - n([a, b, cc])
            good = ssa == 2 * c.between(a, cc) and ssa >= 0
            report["strong_subadditivity"].append({"A": a, "B": b, "C": cc, "slack": ssa,
                                                   "two_l": 2 * c.between(a, cc), "ok": good})

            def mi(x, y):
                return n(x) + n(y) - n(x + y)

            mono = mi([a], [b, cc]) - mi([a], [b]) - mi([a], [cc])
            report["monogamy"].append({"A": a, "B": b, "C": cc, "difference": mono, "ok": mono == 0})
            report["ok"] &= good and mono == 0
    report["entropy_units"] = {"per_line": math.log(2)}
    return report


def random_connectome(n_parties: int, points_per_party: int | Sequence[int],
                      rng: random.Random | int | None = None) -> Connectome:
    """Uniformly random perfect matching over all endpoints (lines may cross)."""
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    sizes = [points_per_party] * n_parties if isinstance(points_per_party, int) else list(points_per_party)
    total = sum(sizes)
    if total % 2:
        raise ValueError("total number of endpoints must be even")
    parties, start = [], 0
    for s in sizes:
        parties.append(list(range(start, start + s)))
        start += s
    pts = list(range(total))
    rng.shuffle(pts)
    p = [0] * total
    for i in range(0, total, 2):
        a, b = pts[i], pts[i + 1]
        p[a], p[b] = b, a
    return Connectome(parties, tuple(p))


def lm_connectome(l: int, m: int) -> Connectome:
    """Two parties of ``l + m`` points joined by ``m`` lines, each with ``l/2`` caps."""
    if l % 2 or m < 0 or l < 0:
        raise ValueError("l must be even and m non-negative")
    n = l + m
    p = [0] * (2 * n)
    for i in range(m):
        p[i], p[n + i] = n + i, i
    for t in range(m, n, 2):
        p[t], p[t + 1] = t + 1, t
        p[n + t], p[n + t + 1] = n + t + 1, n + t
    return Connectome([list(range(n)), list(range(n, 2 * n))], tuple(p), 0, ["left", "right"])


# the seven tripartite qubit connectomes; L = 0..3, R = 4..7, T = 8..11
_L, _R, _T = 0, 4, 8
_TRIPARTITE_LINES = {
    1: [(_L, _L + 1), (_L + 2, _L + 3), (_R, _R + 1), (_R + 2, _R + 3), (_T, _T + 1), (_T + 2, _T + 3)],
    2: [(_L + 2, _L + 3), (_L, _R), (_L + 1, _R + 1), (_R + 2, _R + 3), (_T, _T + 1), (_T + 2, _T + 3)],
    3: [(_T, _L + 3), (_T + 1, _L + 2), (_T + 2, _R + 2), (_T + 3, _R + 3), (_L, _L + 1), (_R, _R + 1)],
    4: [(_L + 1, _L + 2), (_L, _R), (_R + 1, _R + 2), (_T, _L + 3), (_T + 1, _T + 2), (_T + 3, _R + 3)],
    5: [(_L, _R), (_L + 1, _R + 1), (_L + 2, _R + 2), (_L + 3, _R + 3), (_T, _T + 1), (_T + 2, _T + 3)],
    6: [(_L, _R), (_L + 1, _R + 1), (_L + 2, _R + 2), (_T, _L + 3), (_T + 1, _T + 2), (_T + 3, _R + 3)],
    7: [(_L, _R), (_L + 1, _R + 1), (_T, _L + 3), (_T + 1, _L + 2), (_T + 2, _R + 2), (_T + 3, _R + 3)],
}

TRIPARTITE_EXPECTED = {1: "separable", 2: "separable", 3: "separable", 4: "separable",
                       5: "biseparable", 6: "biseparable", 7: "GHZ"}


def tripartite_connectome(number: int) -> Connectome:
    """Connectome ``number`` (1-7) of three four-point parties L, R, T."""
    if number not in _TRIPARTITE_LINES:
        raise KeyError("tripartite connectomes are numbered 1..7")
    pm = PlanarMatching.from_pairs(12, _TRIPARTITE_LINES[number])
    return Connectome([list(range(0, 4)), list(range(4, 8)), list(range(8, 12))], pm.partners, 0, ["L", "R", "T"])


def tripartite_ghz_expand(params: NumericParams | None = None, connectome: Connectome | None = None) -> np.ndarray:
    """Computational-basis coefficients ``c[l, r, t]`` of the GHZ-class connectome."""
    c = connectome or tripartite_connectome(7)
    return expand_in_computational_basis(c.to_state(), params)


def _subset_entropy(psi: np.ndarray, keep: Sequence[int]) -> float:
    rest = [i for i in range(psi.ndim) if i not in keep]
    m = np.transpose(psi, list(keep) + rest)
    dk = int(np.prod([psi.shape[i] for i in keep]))
    m = m.reshape(dk, -1)
    return von_neumann_entropy(m @ m.conj().T)


def search_inequality_violations(samples: int = 100, params: NumericParams | None = None,
                                 seed: int = 0, terms: int = 3) -> dict:
    """Probe random superpositions of four-party qubit connectomes.

    Each sample mixes ``terms`` random connectomes (three points A, B, C and
    a purifying party D) with random complex weights and records the
    entropy-unit slacks ``S_A + S_B - S_AB`` and
    ``I(A:BC) - I(A:B) - I(A:C)``.  The smallest values seen are returned;
    no claim about their sign is made.
    """
    params = params or NumericParams.from_k()
    rng = random.Random(seed)
    nrng = np.random.default_rng(seed)
    best = {"subadditivity": math.inf, "monogamy": math.inf, "samples": 0}
    for _ in range(samples):
        psi = None
        for _t in range(terms):
            c = random_connectome(4, 4, rng)
            e = expand_in_computational_basis(c.to_state(), params)
            w = complex(nrng.normal(), nrng.normal())
            psi = w * e if psi is None else psi + w * e
        nrm = np.linalg.norm(psi)
        if nrm < 1e-12:
            continue
        psi = psi / nrm
        s = {}
        for keep in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)):
            s[keep] = _subset_entropy(psi, keep)
        best["subadditivity"] = min(best["subadditivity"], s[(0,)] + s[(1,)] - s[(0, 1)])

        def mi(x, y):
            return s[x] + s[y] - s[tuple(sorted(x + y))]

        mono = mi((0,), (1, 2)) - mi((0,), (1,)) - mi((0,), (2,))
        best["monogamy"] = min(best["monogamy"], mono)
        best["samples"] += 1
    return best
