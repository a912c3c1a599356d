"""Reference computations written without the package's gluing code.

These are deliberately naive: union-find loop counting, a from-scratch
state sum over PD codes and dense numeric R matrices.
"""
from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def loops_between(p, q) -> int:
    """Closed loops formed by stacking matching ``p`` against matching ``q``."""
    dsu = _DSU()
    for i, j in enumerate(p):
        dsu.union(("p", i), ("p", j))
    for i, j in enumerate(q):
        dsu.union(("q", i), ("q", j))
    for i in range(len(p)):
        dsu.union(("p", i), ("q", i))
    return len({dsu.find(("p", i)) for i in range(len(p))})


def noncrossing(n_pairs: int) -> list[tuple[int, ...]]:
    """All non-crossing perfect matchings of ``2 n_pairs`` points by brute force."""
    pts = 2 * n_pairs
    out = []

    def rec(p):
        if -1 not in p:
            out.append(tuple(p))
            return
        i = p.index(-1)
        for j in range(i + 1, pts, 2):
            if p[j] != -1:
                continue
            if any(p[k] != -1 and not i < p[k] < j for k in range(i + 1, j)):
                continue
            q = list(p)
            q[i], q[j] = j, i
            rec(q)

    rec([-1] * pts)
    return sorted(out)


def gram(n_pairs: int, d: float) -> np.ndarray:
    ms = noncrossing(n_pairs)
    return np.array([[d ** loops_between(p, q) for q in ms] for p in ms])


def bracket_pd(crossings, a: complex) -> complex:
    """Numeric Kauffman state sum of a closed PD code at ``A = a``."""
    d = -a * a - a ** -2
    total = 0j
    n = len(crossings)
    for state in itertools.product((0, 1), repeat=n):
        dsu = _DSU()
        for c, s in zip(crossings, state):
            x, y, z, w = c
            if s == 0:
                dsu.union(x, y)
                dsu.union(z, w)
            else:
                dsu.union(x, w)
                dsu.union(y, z)
        edges = {e for c in crossings for e in c}
        loops = len({dsu.find(e) for e in edges})
        na = state.count(0)
        total += a ** (na - (n - na)) * d ** (loops - 1)
    return total * d


def r_numeric(a: complex, sign: int = 1) -> np.ndarray:
    u = np.array([[0, 0, 0, 0], [0, -a * a, 1, 0], [0, 1, -a ** -2, 0], [0, 0, 0, 0]], dtype=complex)
    b = a if sign > 0 else 1 / a
    return b * np.eye(4) + u / b


def markov_numeric(letters, strands: int, a: complex) -> complex:
    m = np.eye(2 ** strands, dtype=complex)
    for g in letters:
        loc = r_numeric(a, 1 if g > 0 else -1)
        i = abs(g)
        m = m @ np.kron(np.kron(np.eye(2 ** (i - 1)), loc), np.eye(2 ** (strands - i - 1)))
    rho = np.diag([-a * a, -a ** -2])
    full = np.array([[1.0 + 0j]])
    for _ in range(strands):
        full = np.kron(full, rho)
    return complex(np.trace(full @ m))


def entropy_of(c: np.ndarray) -> float:
    """Entanglement entropy of a bipartite coefficient matrix."""
    s = np.linalg.svd(c / np.linalg.norm(c), compute_uv=False) ** 2
    s = s[s > 1e-14]
    return float(-(s * np.log(s)).sum())


def unit_phase(theta: float) -> complex:
    return cmath.exp(1j * theta)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)
