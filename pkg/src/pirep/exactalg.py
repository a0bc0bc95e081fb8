"""Exact rational and multi-prime modular linear algebra.

Everything above this module talks in terms of :class:`RatMatrix` and
:class:`Subspace`.  Ranks of large integer matrices go through
:func:`rank_modular`; small ones through the fraction-free
:func:`rank_exact`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Iterator, Sequence, Union

import numpy as np
import sympy

PRIME_LOW = 2**60
PRIME_HIGH = 2**62


class DimensionError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError(f"refusing float entry {x!r}; use an exact rational")
    return Fraction(x)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise DimensionError(f"row {i} has length {len(r)}, expected {cols}")
        return cls(len(rows), cols, tuple(_frac(x) for r in rows for x in r))

    @classmethod
    def from_flat(cls, n: int, flat: Sequence) -> "RatMatrix":
        """Square n x n matrix from a row-major vector."""
        return cls(n, n, tuple(_frac(x) for x in flat))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "RatMatrix":
        """Matrix unit E_ij (0-based)."""
        e = [Fraction(0)] * (n * n)
        e[i * n + j] = Fraction(1)
        return cls(n, n, tuple(e))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} + {other.shape}")
        return RatMatrix(self.rows, self.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} - {other.shape}")
        return RatMatrix(self.rows, self.cols,
                         tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        return RatMatrix(self.rows, self.cols, tuple(c * a for a in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"{self.shape} @ {other.shape}")
        n, m, k = self.rows, other.cols, self.cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            ai = a[i * k:(i + 1) * k]
            for j in range(m):
                s = Fraction(0)
                for t in range(k):
                    x = ai[t]
                    if x:
                        y = b[t * m + j]
                        if y:
                            s += x * y
                out.append(s)
        return RatMatrix(n, m, tuple(out))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def trace(self) -> Fraction:
        return sum((self[i, i] for i in range(min(self.rows, self.cols))), Fraction(0))

    def integer_rows(self) -> list[list[int]]:
        """Rows scaled individually by the lcm of their denominators."""
        out = []
        for i in range(self.rows):
            r = self.row(i)
            m = lcm(*(x.denominator for x in r)) if r else 1
            out.append([int(x * m) for x in r])
        return out

    def __str__(self) -> str:
        return "[" + ", ".join(
            "[" + ", ".join(str(x) for x in self.row(i)) + "]" for i in range(self.rows)) + "]"


def bracket(x: RatMatrix, y: RatMatrix) -> RatMatrix:
    return x @ y - y @ x


# --- echelon forms over Q -------------------------------------------------

def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; zero rows dropped.  Returns (rows, pivot columns)."""
    m = [[_frac(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        inv = 1 / pr[c]
        if inv != 1:
            pr = m[r] = [x * inv for x in pr]
        nz = [j for j in range(c, ncols) if pr[j]]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for j in nz:
                        row[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def _as_rows(m) -> list[list]:
    if isinstance(m, RatMatrix):
        return m.to_rows()
    if isinstance(m, np.ndarray):
        return [[int(x) if isinstance(x, (int, np.integer)) else x for x in r] for r in m.tolist()]
    return [list(r) for r in m]


@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^ambient_dim stored by its reduced echelon basis."""
    ambient_dim: int
    basis: RatMatrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        vecs = [list(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient_dim:
                raise DimensionError(f"vector of length {len(v)} in Q^{ambient_dim}")
        rows, _ = rref(vecs)
        return cls(ambient_dim, RatMatrix.from_rows(rows, cols=ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RatMatrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, RatMatrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return [self.basis.row(i) for i in range(self.dim)]

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(v) if x) for v in self.vectors()]

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        """Coordinates of v in the echelon basis, or None if v is not in the span."""
        v = [_frac(x) for x in v]
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in Q^{self.ambient_dim}")
        coords = []
        rest = list(v)
        for b, p in zip(self.vectors(), self.pivots()):
            c = rest[p]
            coords.append(c)
            if c:
                for j, x in enumerate(b):
                    if x:
                        rest[j] -= c * x
        return coords if not any(rest) else None

    def contains(self, v: Sequence) -> bool:
        return self.coordinates(v) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(v) for v in other.vectors())

    def __add__(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimension mismatch")
        return Subspace.span(self.vectors() + other.vectors(), self.ambient_dim)

    def intersect(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("ambient dimension mismatch")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        # x = sum a_i u_i = sum b_j w_j  <=>  (a, b) in ker [U^T | -W^T]
        u, w = self.vectors(), other.vectors()
        cols = [list(x) for x in u] + [[-y for y in x] for x in w]
        system = [[c[i] for c in cols] for i in range(self.ambient_dim)]
        ker = nullspace(system, len(cols))
        out = []
        for k in ker:
            vec = [Fraction(0)] * self.ambient_dim
            for a, ui in zip(k[:len(u)], u):
                if a:
                    for j, x in enumerate(ui):
                        if x:
                            vec[j] += a * x
            out.append(vec)
        return Subspace.span(out, self.ambient_dim)

    def annihilator(self) -> list[list[Fraction]]:
        """Basis of linear functionals vanishing exactly on this subspace."""
        return nullspace(self.basis.to_rows(), self.ambient_dim)

    def complement_basis(self) -> list[list[Fraction]]:
        """Standard unit vectors on the non-pivot coordinates."""
        piv = set(self.pivots())
        out = []
        for j in range(self.ambient_dim):
            if j not in piv:
                e = [Fraction(0)] * self.ambient_dim
                e[j] = Fraction(1)
                out.append(e)
        return out


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows * x = 0}, one vector per free column."""
    r, piv = rref(rows) if rows else ([], [])
    free = [j for j in range(ncols) if j not in set(piv)]
    out = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(r, piv):
            x[p] = -row[f]
        out.append(x)
    return out


def kernel(m: RatMatrix) -> Subspace:
    return Subspace.span(nullspace(m.to_rows(), m.cols), m.cols)


def solve_linear(a: RatMatrix, rhs: RatMatrix) -> tuple[RatMatrix | None, Subspace]:
    """Solve a X = rhs.  Returns (particular solution or None, kernel of a)."""
    if a.rows != rhs.rows:
        raise DimensionError(f"a has {a.rows} rows, rhs has {rhs.rows}")
    ker = kernel(a)
    aug = [list(a.row(i)) + list(rhs.row(i)) for i in range(a.rows)]
    r, piv = rref(aug)
    if any(p >= a.cols for p in piv):
        return None, ker
    sol = [[Fraction(0)] * rhs.cols for _ in range(a.cols)]
    for row, p in zip(r, piv):
        sol[p] = row[a.cols:]
    return RatMatrix.from_rows(sol, cols=rhs.cols), ker


# --- exact rank -----------------------------------------------------------

def _integer_rows(rows: list[list]) -> list[list[int]]:
    out = []
    for r in rows:
        if all(isinstance(x, int) for x in r):
            out.append(list(r))
            continue
        fr = [_frac(x) for x in r]
        m = lcm(*(x.denominator for x in fr)) if fr else 1
        out.append([int(x * m) for x in fr])
    return out


def rank_exact(m) -> int:
    """Rank over Q by Bareiss fraction-free elimination.

    Accepts a RatMatrix, a numpy integer array or nested sequences of
    integers / Fractions.  Rational rows are scaled to integers first.
    """
    rows = _integer_rows(_as_rows(m))
    rows = [r for r in rows if any(r)]
    if not rows:
        return 0
    ncols = len(rows[0])
    # eliminate along the shorter side
    if ncols < len(rows):
        rows = [list(c) for c in zip(*rows)]
        rows = [r for r in rows if any(r)]
        ncols = len(rows[0])
    nrows = len(rows)
    prev = 1
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        pc = pr[c]
        tail = range(c + 1, ncols)
        for i in range(rank + 1, nrows):
            ri = rows[i]
            f = ri[c]
            if f:
                for j in tail:
                    ri[j] = (pc * ri[j] - f * pr[j]) // prev
            elif pc != prev:
                for j in tail:
                    ri[j] = (pc * ri[j]) // prev
            ri[c] = 0
        prev = pc
        rank += 1
        if rank == nrows:
            break
    return rank


# --- modular rank ---------------------------------------------------------

def random_primes(count: int, seed: int) -> list[int]:
    """`count` distinct primes in (2^60, 2^62), deterministic in `seed`."""
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        p = sympy.nextprime(rng.randrange(PRIME_LOW, PRIME_HIGH - 2**20))
        if p < PRIME_HIGH and p not in out:
            out.append(int(p))
    return out


_LD_OK = np.finfo(np.longdouble).nmant >= 63


def _mulmod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Elementwise a*b mod p for int64 arrays with entries in [0, p), p < 2^62."""
    if not _LD_OK:
        return (a.astype(object) * b.astype(object) % p).astype(np.int64)
    pl = np.longdouble(p)
    q = np.floor(a.astype(np.longdouble) * b.astype(np.longdouble) / pl).astype(np.int64)
    ua, ub, uq = a.astype(np.uint64), b.astype(np.uint64), q.astype(np.uint64)
    r = (ua * ub - uq * np.uint64(p)).view(np.int64)
    r = np.where(r < 0, r + p, r)
    return np.where(r >= p, r - p, r)


def _panel_pivots(panel: np.ndarray, p: int) -> tuple[list[int], list[int]]:
    """Row and column indices of a maximal nonsingular minor of `panel` mod p."""
    a = np.array(panel, dtype=np.int64)
    nrows, ncols = a.shape
    order = list(range(nrows))
    prow: list[int] = []
    pcol: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            order[r], order[piv] = order[piv], order[r]
        inv = pow(int(a[r, c]), -1, p)
        row = _mulmod(a[r, c:], np.full(ncols - c, inv, dtype=np.int64), p)
        below = a[r + 1:]
        hit = np.nonzero(below[:, c])[0]
        if hit.size:
            sub = below[hit, c:]
            f = np.broadcast_to(below[hit, c][:, None], sub.shape)
            sub = sub - _mulmod(f, np.broadcast_to(row, sub.shape), p)
            sub[sub < 0] += p
            below[hit, c:] = sub
        prow.append(order[r])
        pcol.append(c)
        r += 1
    return prow, pcol


def _inverse_mod(s: np.ndarray, p: int) -> np.ndarray:
    n = s.shape[0]
    a = np.concatenate([np.array(s, dtype=np.int64), np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        piv = c + int(np.nonzero(a[c:, c])[0][0])
        if piv != c:
            a[[c, piv]] = a[[piv, c]]
        inv = pow(int(a[c, c]), -1, p)
        a[c] = _mulmod(a[c], np.full(2 * n, inv, dtype=np.int64), p)
        f = a[:, c].copy()
        f[c] = 0
        upd = _mulmod(np.broadcast_to(f[:, None], a.shape), np.broadcast_to(a[c], a.shape), p)
        a = a - upd
        a[a < 0] += p
    return a[:, n:]


_LIMB = 21
_LIMB_MASK = (1 << _LIMB) - 1
_K_CHUNK = 2048


def matmul_mod(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """x @ y mod p for entries in [0, p), p < 2^62, via exact float64 limb products."""
    m, k = x.shape
    n = y.shape[1]
    if k == 0:
        return np.zeros((m, n), dtype=np.int64)
    xl = [((x >> (_LIMB * i)) & _LIMB_MASK).astype(np.float64) for i in range(3)]
    yl = [((y >> (_LIMB * i)) & _LIMB_MASK).astype(np.float64) for i in range(3)]
    out = np.zeros((m, n), dtype=np.int64)
    for s in range(5):
        acc = np.zeros((m, n), dtype=np.int64)
        for a in range(3):
            b = s - a
            if not 0 <= b < 3:
                continue
            for k0 in range(0, k, _K_CHUNK):
                z = xl[a][:, k0:k0 + _K_CHUNK] @ yl[b][k0:k0 + _K_CHUNK]
                acc += z.astype(np.int64) % p
                acc %= p
        shift = pow(2, _LIMB * s, p)
        out += _mulmod(acc, np.full_like(acc, shift), p)
        out %= p
    return out


def rank_mod_p(a: np.ndarray, p: int, block: int = 64) -> int:
    """Rank of an int64 matrix (entries already in [0, p)) over GF(p).

    Right-looking blocked elimination: pivots of each column panel are found
    elementwise, the trailing Schur complement is updated with matmul_mod.
    """
    rows = np.array(a, dtype=np.int64)
    rank = 0
    while rows.shape[0] and rows.shape[1]:
        panel = rows[:, :block]
        prow, pcol = _panel_pivots(panel, p)
        rest = rows[:, block:]
        if prow:
            others = np.setdiff1d(np.arange(rows.shape[0]), prow)
            sinv = _inverse_mod(rows[np.ix_(prow, pcol)], p)
            if others.size and rest.shape[1]:
                mult = matmul_mod(rows[np.ix_(others, pcol)], sinv, p)
                upd = matmul_mod(mult, rest[prow], p)
                rest = rest[others] - upd
                rest[rest < 0] += p
            else:
                rest = rest[others]
        rank += len(prow)
        rows = rest
    return rank


def _exact_dot(block: np.ndarray, sketch: np.ndarray) -> np.ndarray:
    """Exact integer product of an integer block with a small nonnegative sketch."""
    bmax = int(np.max(np.abs(block))) if block.size else 0
    smax = int(sketch.max()) if sketch.size else 0
    bound = bmax * smax * block.shape[1]
    if bound < 2**53:
        return np.rint(block.astype(np.float64) @ sketch.astype(np.float64)).astype(np.int64)
    if bound < 2**62:
        return block.astype(np.int64) @ sketch.astype(np.int64)
    return block.astype(object) @ sketch.astype(object)


@dataclass(frozen=True)
class ModularRank:
    rank: int
    primes: tuple[int, ...]
    per_prime: tuple[int, ...]
    seed: int

    def __int__(self) -> int:
        return self.rank


RowSource = Union[np.ndarray, Sequence[Sequence[int]], Callable[[], Iterator]]

SKETCH_BITS = 24


def _blocks(source) -> Iterator[np.ndarray]:
    if callable(source):
        it = source()
    elif isinstance(source, np.ndarray):
        it = iter([source])
    else:
        it = iter(source)
    for blk in it:
        arr = np.asarray(blk)
        if arr.dtype == object:
            arr = np.array(arr.tolist(), dtype=object)
        if arr.ndim == 1:
            arr = arr[None, :]
        yield arr


def rank_modular(row_source: RowSource, primes: int = 2, seed: int = 0,
                 n_rows: int | None = None) -> ModularRank:
    """Max over `primes` random 60-bit primes of the rank mod p.

    `row_source` is an integer matrix, an iterable of rows / row blocks, or a
    zero-argument callable returning a fresh iterator of row blocks (called
    once per prime, so rows need not be materialised across primes).

    Wide inputs are first compressed by an exact integer sketch with
    SKETCH_BITS-bit random entries down to `n_rows` columns; ranks over
    GF(p) of the compressed rows can only drop, so the result stays a lower
    bound on the rational rank.
    """
    if primes < 1:
        raise ValueError("need at least one prime")
    if not callable(row_source) and not isinstance(row_source, np.ndarray):
        row_source = list(row_source)
        if n_rows is None:
            n_rows = sum(np.asarray(b).shape[0] if np.asarray(b).ndim == 2 else 1
                         for b in row_source)
    elif isinstance(row_source, np.ndarray) and n_rows is None:
        n_rows = row_source.shape[0] if row_source.ndim == 2 else 1
    plist = random_primes(primes, seed)
    ranks = []
    for idx, p in enumerate(plist):
        rng = np.random.default_rng([seed, idx])
        width = None
        sketch = None
        reduced = []
        for blk in _blocks(row_source):
            if width is None:
                width = blk.shape[1]
                if n_rows is not None and width > n_rows:
                    sketch = rng.integers(0, 2**SKETCH_BITS, size=(width, n_rows), dtype=np.int64)
            elif blk.shape[1] != width:
                raise DimensionError(f"row width {blk.shape[1]} after width {width}")
            if blk.shape[0] == 0:
                continue
            if sketch is not None:
                blk = _exact_dot(blk, sketch)
            if blk.dtype == object:
                red = np.array([[int(x) % p for x in r] for r in blk], dtype=np.int64)
            else:
                red = np.mod(blk.astype(np.int64), p)
            reduced.append(red)
        if not reduced:
            ranks.append(0)
            continue
        ranks.append(rank_mod_p(np.vstack(reduced), p))
    return ModularRank(max(ranks), tuple(plist), tuple(ranks), seed)
