"""Braid group representation on qubit tensor spaces through the 4x4 R matrix.

Basis index conventions: strand 1 is the leftmost tensor factor, i.e. the most
significant bit of a basis index.  ``R = A*I + A^-1*U`` with

    U = [[0,    0,     0, 0],
         [0, -A^2,     1, 0],
         [0,    1, -A^-2, 0],
         [0,    0,     0, 0]]

so that ``U = |cup><cap|`` with cup ``(0, 1, -A^-2, 0)`` and cap ``(0, -A^2, 1, 0)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diagram import BraidWord
from .poly import LOOP, ONE, ZERO, A, LaurentPoly, NumericParams

__all__ = [
    "LaurentMatrix",
    "FlatState",
    "SingularMatrixError",
    "BudgetExceeded",
    "DEFAULT_BUDGET",
    "r_matrix",
    "u_matrix",
    "rho",
    "sigma",
    "cup_vector",
    "cap_covector",
    "embed",
    "braid_representation",
    "braid_matrix_numeric",
    "markov_trace",
    "cap_state",
    "flatten",
    "matrix_element",
    "check_pseudounitary",
]

DEFAULT_BUDGET = 10


class SingularMatrixError(ArithmeticError):
    pass


class BudgetExceeded(ValueError):
    pass


class LaurentMatrix:
    """Dense matrix of :class:`LaurentPoly` entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        grid = [[LaurentPoly.coerce(x) for x in row] for row in entries]
        if not grid or not grid[0]:
            raise ValueError("matrix must be non-empty")
        width = len(grid[0])
        if any(len(r) != width for r in grid):
            raise ValueError("ragged matrix")
        self.rows = len(grid)
        self.cols = width
        self.entries = grid

    @classmethod
    def identity(cls, n: int) -> "LaurentMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, r: int, c: int) -> "LaurentMatrix":
        return cls([[ZERO] * c for _ in range(r)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_t = list(zip(*other.entries))
        out = []
        for row in self.entries:
            nz = [(k, v) for k, v in enumerate(row) if v]
            out.append([_dot(nz, col) for col in cols_t])
        return LaurentMatrix(out)

    __mul__ = __matmul__

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._same_shape(other)
        return LaurentMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._same_shape(other)
        return LaurentMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def scale(self, c) -> "LaurentMatrix":
        c = LaurentPoly.coerce(c)
        return LaurentMatrix([[x * c for x in row] for row in self.entries])

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def kron(self, other: "LaurentMatrix") -> "LaurentMatrix":
        out = []
        for r1 in self.entries:
            for r2 in other.entries:
                out.append([a * b for a in r1 for b in r2])
        return LaurentMatrix(out)

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix([list(col) for col in zip(*self.entries)])

    def dagger(self) -> "LaurentMatrix":
        """Transpose combined with ``A -> A^-1`` (complex conjugation at a unit phase)."""
        return LaurentMatrix([[x.mirror() for x in col] for col in zip(*self.entries)])

    def trace(self) -> LaurentPoly:
        if self.rows != self.cols:
            raise ValueError("trace of a non-square matrix")
        total = ZERO
        for i in range(self.rows):
            total = total + self.entries[i][i]
        return total

    def evaluate(self, params: NumericParams | complex) -> np.ndarray:
        return np.array([[x.evaluate(params) for x in row] for row in self.entries], dtype=complex)

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.entries == other.entries

    __hash__ = None

    def to_json(self) -> list:
        return [[x.to_json() for x in row] for row in self.entries]

    def __repr__(self):
        return f"LaurentMatrix({self.rows}x{self.cols})"


def _dot(nz_row, col) -> LaurentPoly:
    total = ZERO
    for k, v in nz_row:
        w = col[k]
        if w:
            total = total + v * w
    return total


@dataclass(frozen=True)
class FlatState:
    """Length ``2^n`` coordinate vector of Laurent polynomials."""

    coords: tuple[LaurentPoly, ...]
    strands: int

    def __post_init__(self):
        if len(self.coords) != 2 ** self.strands:
            raise ValueError("FlatState length must be 2^strands")

    def as_column(self) -> LaurentMatrix:
        return LaurentMatrix([[c] for c in self.coords])

    def evaluate(self, params) -> np.ndarray:
        return np.array([c.evaluate(params) for c in self.coords], dtype=complex)

    def kron(self, other: "FlatState") -> "FlatState":
        return FlatState(tuple(a * b for a in self.coords for b in other.coords), self.strands + other.strands)


def u_matrix() -> LaurentMatrix:
    z, one = ZERO, ONE
    return LaurentMatrix([
        [z, z, z, z],
        [z, -(A ** 2), one, z],
        [z, one, -(A ** -2), z],
        [z, z, z, z],
    ])


def r_matrix(sign: int = 1) -> LaurentMatrix:
    """``R`` for ``sign=+1``; its inverse ``A^-1 I + A U`` for ``sign=-1``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = A if sign > 0 else A ** -1
    return LaurentMatrix.identity(4).scale(a) + u_matrix().scale(a ** -1)


def rho() -> LaurentMatrix:
    return LaurentMatrix([[-(A ** 2), ZERO], [ZERO, -(A ** -2)]])


def sigma(n: int = 1) -> LaurentMatrix:
    s = LaurentMatrix([[ZERO, ONE], [ONE, ZERO]])
    out = s
    for _ in range(n - 1):
        out = out.kron(s)
    return out


def cup_vector() -> FlatState:
    return FlatState((ZERO, ONE, -(A ** -2), ZERO), 2)


def cap_covector() -> FlatState:
    return FlatState((ZERO, -(A ** 2), ONE, ZERO), 2)


def embed(m: LaurentMatrix, position: int, strands: int) -> LaurentMatrix:
    """``I^(position-1) (x) m (x) I^(rest)`` for a two-strand ``m`` at strands ``position, position+1``."""
    if not 1 <= position <= strands - 1:
        raise IndexError("embedding position out of range")
    left = LaurentMatrix.identity(2 ** (position - 1))
    right = LaurentMatrix.identity(2 ** (strands - position - 1))
    return left.kron(m).kron(right)


def _apply_local(m_rows: list[list[LaurentPoly]], local: LaurentMatrix, position: int, strands: int):
    """Left-multiply a dense row list by the embedded 4x4 ``local`` without forming it."""
    shift = strands - position - 1  # bit offset of the right strand of the pair
    mask = 3 << shift
    out = [None] * len(m_rows)
    loc = local.entries
    for r in range(len(m_rows)):
        a = (r >> shift) & 3
        base = r & ~mask
        row_terms = [(b, loc[a][b]) for b in range(4) if loc[a][b]]
        acc = None
        for b, coeff in row_terms:
            src = m_rows[base | (b << shift)]
            scaled = [coeff * x if x else x for x in src]
            acc = scaled if acc is None else [p + q for p, q in zip(acc, scaled)]
        out[r] = acc if acc is not None else [ZERO] * len(m_rows[0])
    return out


def braid_representation(w: BraidWord, budget: int = DEFAULT_BUDGET) -> LaurentMatrix:
    """Ordered product ``R_{g1}^{+-1} R_{g2}^{+-1} ...`` of embedded R factors."""
    if w.strands > budget:
        raise BudgetExceeded(f"{w.strands} strands exceeds the exact budget of {budget}; use braid_matrix_numeric")
    n = w.strands
    rows = LaurentMatrix.identity(2 ** n).entries
    rp, rm = r_matrix(1), r_matrix(-1)
    for g in reversed(w.letters):
        rows = _apply_local(rows, rp if g > 0 else rm, abs(g), n)
    return LaurentMatrix(rows)


def braid_matrix_numeric(w: BraidWord, params: NumericParams) -> np.ndarray:
    n = w.strands
    rp = r_matrix(1).evaluate(params)
    rm = r_matrix(-1).evaluate(params)
    out = np.eye(2 ** n, dtype=complex)
    for g in w.letters:
        loc = rp if g > 0 else rm
        full = np.kron(np.kron(np.eye(2 ** (abs(g) - 1)), loc), np.eye(2 ** (n - abs(g) - 1)))
        out = out @ full
    return out


def _rho_weights(n: int) -> list[LaurentPoly]:
    hi, lo = -(A ** 2), -(A ** -2)
    weights = []
    for x in range(2 ** n):
        w = ONE
        for k in range(n):
            w = w * (lo if (x >> k) & 1 else hi)
        weights.append(w)
    return weights


def markov_trace(m: LaurentMatrix, strands: int) -> LaurentPoly:
    """``Tr(rho^(x)n m)`` with ``rho = diag(-A^2, -A^-2)``."""
    if m.rows != 2 ** strands or m.cols != 2 ** strands:
        raise ValueError(f"expected a {2 ** strands}x{2 ** strands} matrix")
    total = ZERO
    for i, w in enumerate(_rho_weights(strands)):
        x = m.entries[i][i]
        if x:
            total = total + w * x
    return total


def markov_trace_numeric(m: np.ndarray, strands: int, params: NumericParams) -> complex:
    r = np.diag([-(params.A_value ** 2), -(params.A_value ** -2)])
    full = np.array([[1.0 + 0j]])
    for _ in range(strands):
        full = np.kron(full, r)
    return complex(np.trace(full @ m))


def flatten(m: LaurentMatrix) -> FlatState:
    """Row-major flattening of a ``2^k x 2^k`` matrix into a ``2^(2k)`` vector."""
    k = (m.rows - 1).bit_length()
    if m.rows != m.cols or 2 ** k != m.rows:
        raise ValueError("flatten expects a square matrix of size 2^k")
    return FlatState(tuple(x for row in m.entries for x in row), 2 * k)


def cap_state(n_strands: int = 4) -> FlatState:
    """Flattened ``U^(x)(n/4)``; for four strands this is the two-cap state."""
    if n_strands % 4 or n_strands <= 0:
        raise ValueError("cap_state is built from flattened U factors and needs a multiple of 4 strands")
    m = u_matrix()
    for _ in range(n_strands // 4 - 1):
        m = m.kron(u_matrix())
    return flatten(m)


def matrix_element(bra: FlatState, op: LaurentMatrix, ket: FlatState) -> LaurentPoly:
    """``bra^T op ket``; conjugation under the Sigma metric is a plain transpose."""
    if op.rows != len(bra.coords) or op.cols != len(ket.coords):
        raise ValueError("dimension mismatch in matrix element")
    total = ZERO
    for i, b in enumerate(bra.coords):
        if not b:
            continue
        row = op.entries[i]
        s = ZERO
        for j, k in enumerate(ket.coords):
            if k and row[j]:
                s = s + row[j] * k
        total = total + b * s
    return total


def check_pseudounitary(m: LaurentMatrix, *, probe: complex | None = None) -> bool:
    """True when ``m^-1 = Sigma^(x)n dagger(m) Sigma^(x)n``.

    Singular input raises :class:`SingularMatrixError`; singularity is
    detected numerically at a generic unit phase before the exact check.
    """
    if m.rows != m.cols:
        raise ValueError("pseudo-unitarity needs a square matrix")
    n = (m.rows - 1).bit_length()
    if 2 ** n != m.rows:
        raise ValueError("matrix size must be a power of two")
    z = probe if probe is not None else complex(np.exp(0.7311j))
    num = m.evaluate(z)
    if abs(np.linalg.det(num)) < 1e-9 * max(1.0, np.abs(num).max()) ** m.rows:
        raise SingularMatrixError("matrix is singular; pseudo-unitarity is undefined")
    s = sigma(n)
    candidate = s @ m.dagger() @ s
    return (m @ candidate) == LaurentMatrix.identity(m.rows)
