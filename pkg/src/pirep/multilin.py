"""Multilinear polynomials evaluated on rho(L): codimensions, identities,
cocharacter multiplicities and alternation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exactalg import rank_exact, rank_modular
from .liestruct import LinearRep
from .symcomb import (GroupAlgebraElement, Partition, Perm, Tableau, compose, hook_dimension,
                      partitions_of, sign, subgroup_on_blocks, young_symmetrizer_star)

DEFAULT_CELL_BUDGET = 2 * 10**8
EXACT_CELL_LIMIT = 10**6
MODULAR_FROM_N = 5
ROW_BLOCK = 64


class ResourceGuardError(RuntimeError):
    pass


def all_perms(n: int) -> list[Perm]:
    return list(permutations(range(n)))


class EvalTable:
    """Evaluations of all multilinear monomials of degree n on basis tuples.

    Row sigma is the concatenation, over substitution tuples t in
    lexicographic order, of the flattened product b_{t[s(0)]} ... b_{t[s(n-1)]}.
    All products are read from one table of prefix-shared products.
    """

    def __init__(self, rep: LinearRep, n: int):
        if n < 1:
            raise ValueError("degree must be at least 1")
        self.rep = rep
        self.n = n
        self.d = rep.dim_l
        self.dim_v = rep.dim_v
        self.perms = all_perms(n)
        self.index = {p: i for i, p in enumerate(self.perms)}

    @property
    def width(self) -> int:
        return self.d ** self.n * self.dim_v ** 2

    @property
    def cells(self) -> int:
        return len(self.perms) * self.width

    @cached_property
    def _basis(self) -> np.ndarray:
        ib = self.rep.integer_basis()
        maxabs = max((abs(x) for m in ib for r in m for x in r), default=0)
        bound = maxabs ** self.n * self.dim_v ** max(self.n - 1, 0)
        dtype = np.int64 if bound < 2**62 else object
        return np.array(ib, dtype=dtype).reshape(self.d, self.dim_v, self.dim_v)

    @cached_property
    def products(self) -> np.ndarray:
        """products[idx(u)] = b_{u_1} ... b_{u_n}, u_1 most significant."""
        b = self._basis
        table = b
        for _ in range(self.n - 1):
            if b.dtype == object:
                table = np.array([[x.dot(y) for y in b] for x in table], dtype=object)
            else:
                table = np.einsum("aij,bjk->abik", table, b)
            table = table.reshape(-1, self.dim_v, self.dim_v)
        return table.reshape(self.d ** self.n, self.dim_v ** 2)

    @cached_property
    def _tuples(self) -> np.ndarray:
        if self.d == 0:
            return np.zeros((0, self.n), dtype=np.int64)
        grid = np.indices((self.d,) * self.n).reshape(self.n, -1).T
        return grid.astype(np.int64)

    @cached_property
    def _powers(self) -> np.ndarray:
        return np.array([self.d ** (self.n - 1 - j) for j in range(self.n)], dtype=np.int64)

    def row(self, perm: Perm) -> np.ndarray:
        if self.d == 0:
            return np.zeros(0, dtype=np.int64)
        idx = self._tuples[:, list(perm)] @ self._powers
        return self.products[idx].reshape(-1)

    def rows(self, perms: Sequence[Perm]) -> np.ndarray:
        if not perms:
            return np.zeros((0, self.width), dtype=self.products.dtype if self.d else np.int64)
        return np.stack([self.row(p) for p in perms])

    def evaluate(self, f: GroupAlgebraElement) -> np.ndarray:
        """Flattened evaluation of f on every basis tuple (integers, up to basis scaling)."""
        if f.n != self.n:
            raise ValueError("degree mismatch")
        out = np.zeros(self.width, dtype=object)
        for p, c in f.terms.items():
            out = out + c * self.row(p).astype(object)
        return out

    def matrix(self) -> np.ndarray:
        return self.rows(self.perms)

    def blocks(self, perms: Sequence[Perm] | None = None) -> Iterator[np.ndarray]:
        perms = self.perms if perms is None else perms
        for k in range(0, len(perms), ROW_BLOCK):
            yield self.rows(perms[k:k + ROW_BLOCK])


@dataclass(frozen=True)
class RankResult:
    rank: int
    method: str
    primes: tuple[int, ...] = ()
    seed: int | None = None


def choose_method(n: int, cells: int, method: str) -> str:
    if method == "auto":
        return "modular" if n >= MODULAR_FROM_N or cells > EXACT_CELL_LIMIT else "exact"
    if method not in ("exact", "modular"):
        raise ValueError(f"unknown rank method {method!r}")
    return method


def _guard(cells: int, budget: int, force: bool, what: str) -> None:
    if cells > budget and not force:
        raise ResourceGuardError(
            f"{what}: {cells} matrix cells exceed the budget of {budget}; pass force to run")


def _rank(mat_or_blocks, n_rows: int, method: str, primes: int, seed: int) -> RankResult:
    if method == "exact":
        mat = mat_or_blocks() if callable(mat_or_blocks) else mat_or_blocks
        if not isinstance(mat, np.ndarray):
            mat = np.vstack(list(mat)) if n_rows else np.zeros((0, 0), dtype=np.int64)
        return RankResult(rank_exact(mat), "exact")
    rep = rank_modular(mat_or_blocks, primes=primes, seed=seed, n_rows=n_rows)
    return RankResult(rep.rank, "modular", rep.primes, seed)


def codimension_result(rep: LinearRep, n: int, method: str = "auto", primes: int = 2,
                       seed: int = 0, budget: int = DEFAULT_CELL_BUDGET,
                       force: bool = False) -> RankResult:
    if n < 1:
        raise ValueError("n must be at least 1")
    if rep.dim_l == 0:
        return RankResult(0, choose_method(n, 0, method))
    table = EvalTable(rep, n)
    _guard(table.cells, budget, force, f"codimension n={n}")
    method = choose_method(n, table.cells, method)
    if method == "exact":
        return _rank(table.matrix(), len(table.perms), method, primes, seed)
    return _rank(lambda: table.blocks(), len(table.perms), method, primes, seed)


def codimension(rep: LinearRep, n: int, method: str = "auto", primes: int = 2, seed: int = 0,
                budget: int = DEFAULT_CELL_BUDGET, force: bool = False) -> int:
    """c_n(rho): rank of the n! evaluation rows."""
    return codimension_result(rep, n, method, primes, seed, budget, force).rank


def is_identity(f: GroupAlgebraElement, rep: LinearRep) -> bool:
    if f.n < 1:
        raise ValueError("polynomial degree must be at least 1")
    if rep.dim_l == 0 or f.is_zero():
        return True
    values = EvalTable(rep, f.n).evaluate(f)
    return not any(values)


def alternate(f: GroupAlgebraElement, variables: Iterable[int]) -> GroupAlgebraElement:
    """Signed sum over permutations of the given (1-based) variables."""
    vs = tuple(sorted(set(variables)))
    if any(not 1 <= v <= f.n for v in vs):
        raise ValueError(f"variables {vs} outside 1..{f.n}")
    group = subgroup_on_blocks(f.n, [tuple(v - 1 for v in vs)])
    alt = GroupAlgebraElement(f.n, {p: sign(p) for p in group})
    return alt * f


@dataclass(frozen=True)
class CocharRow:
    shape: Partition
    m: int
    dim: int
    computed: bool


@dataclass(frozen=True)
class CocharTable:
    n: int
    rows: tuple[CocharRow, ...]
    c_n: int
    method: str
    seed: int | None = None

    @property
    def weighted_sum(self) -> int:
        return sum(r.m * r.dim for r in self.rows)

    @property
    def consistent(self) -> bool:
        return self.weighted_sum == self.c_n

    def multiplicity(self, shape: Partition | tuple[int, ...]) -> int:
        parts = shape.parts if isinstance(shape, Partition) else tuple(shape)
        return next(r.m for r in self.rows if r.shape.parts == parts)


def symmetrizer_matrix(e: GroupAlgebraElement, perms: Sequence[Perm],
                       index: dict[Perm, int]) -> np.ndarray:
    """E[s, t] = coefficient of t in e * s; rows of E @ M evaluate e * x_s."""
    size = len(perms)
    mat = np.zeros((size, size), dtype=np.int64)
    for i, s in enumerate(perms):
        for p, c in e.terms.items():
            if c.denominator != 1:
                raise ValueError("symmetrizer with non-integer coefficients")
            mat[i, index[compose(p, s)]] += int(c)
    return mat


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if b.dtype == object:
        return a.astype(object) @ b
    amax = int(np.abs(a).sum(axis=1).max()) if a.size else 0
    bmax = int(np.abs(b).max()) if b.size else 0
    if amax * bmax < 2**53:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    if amax * bmax < 2**62:
        return a @ b
    return a.astype(object) @ b.astype(object)


def multiplicity(rep: LinearRep, shape: Partition, method: str = "auto", primes: int = 2,
                 seed: int = 0, table: EvalTable | None = None) -> RankResult:
    """m(rho, shape) as the rank of the evaluations of e*_T x_s over all s."""
    n = shape.n
    if rep.dim_l == 0:
        return RankResult(0, choose_method(n, 0, method))
    table = table or EvalTable(rep, n)
    method = choose_method(n, table.cells, method)
    e = young_symmetrizer_star(Tableau.canonical(shape))
    emat = symmetrizer_matrix(e, table.perms, table.index)
    vals = _int_matmul(emat, table.matrix())
    return _rank(vals, len(table.perms), method, primes, seed)


def cocharacter_multiplicities(rep: LinearRep, n: int, method: str = "auto", primes: int = 2,
                               seed: int = 0, budget: int = DEFAULT_CELL_BUDGET,
                               force: bool = False, compute_all: bool = False,
                               max_n: int = 6, workers: int = 1) -> CocharTable:
    """All m(rho, lambda) for lambda |- n, alongside c_n for the consistency check.

    Shapes with more rows than dim rho(L) are recorded as 0 without a rank
    computation unless compute_all is set.  Ranks for different shapes are
    independent and may run on `workers` threads (numpy releases the GIL).
    """
    if n > max_n and not force:
        raise ResourceGuardError(f"cocharacter degree {n} above the configured maximum {max_n}")
    table = EvalTable(rep, n) if rep.dim_l else None
    if table is not None:
        _guard(table.cells, budget, force, f"cocharacter n={n}")
    cells = table.cells if table else 0
    used = choose_method(n, cells, method)
    shapes = partitions_of(n)
    todo = [lam for lam in shapes if compute_all or len(lam) <= rep.dim_l]

    def one(lam):
        return multiplicity(rep, lam, used, primes, seed, table).rank

    if table is not None:
        table.products  # build the shared table before fanning out
    if workers > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ranks = dict(zip(todo, pool.map(one, todo)))
    else:
        ranks = {lam: one(lam) for lam in todo}
    rows = [CocharRow(lam, ranks.get(lam, 0), hook_dimension(lam), lam in ranks)
            for lam in shapes]
    c_n = codimension(rep, n, used, primes, seed, budget, force)
    return CocharTable(n, tuple(rows), c_n, used, seed if used == "modular" else None)


