"""Helpers for subspaces of End(V) stored as flattened row-major vectors."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .exactalg import RatMatrix, Subspace, nullspace, rref

Vec = tuple[Fraction, ...]


def flat(m: RatMatrix) -> Vec:
    return m.entries


def unflat(v: Sequence, n: int) -> RatMatrix:
    return RatMatrix.from_flat(n, v)


def mul(u: Sequence[Fraction], v: Sequence[Fraction], n: int) -> Vec:
    """Product of two flattened n x n matrices."""
    out = [Fraction(0)] * (n * n)
    for i in range(n):
        for k in range(n):
            a = u[i * n + k]
            if a:
                row = k * n
                for j in range(n):
                    b = v[row + j]
                    if b:
                        out[i * n + j] += a * b
    return tuple(out)


def brk(u: Sequence[Fraction], v: Sequence[Fraction], n: int) -> Vec:
    a, b = mul(u, v, n), mul(v, u, n)
    return tuple(x - y for x, y in zip(a, b))


def trace_of_product(u: Sequence[Fraction], v: Sequence[Fraction], n: int) -> Fraction:
    return sum((u[i * n + k] * v[k * n + i] for i in range(n) for k in range(n)), Fraction(0))


def identity_vec(n: int) -> Vec:
    return RatMatrix.identity(n).entries


def product_space(left: Subspace, right: Subspace, n: int) -> Subspace:
    """span{x y : x in left, y in right}."""
    prods = [mul(x, y, n) for x in left.vectors() for y in right.vectors()]
    return Subspace.span(prods, n * n)


def algebra_closure(vectors: Iterable[Sequence], n: int, unital: bool = False) -> Subspace:
    """Smallest product-closed subspace of End(Q^n) containing `vectors`."""
    seed = [tuple(Fraction(x) for x in v) for v in vectors]
    if unital:
        seed.append(identity_vec(n))
    space = Subspace.span(seed, n * n)
    fresh = space.vectors()
    while fresh:
        basis = space.vectors()
        cand = [mul(x, y, n) for x in basis for y in fresh] + \
               [mul(y, x, n) for x in basis for y in fresh]
        new = []
        grown = space
        for c in cand:
            if not grown.contains(c):
                grown = Subspace.span(grown.vectors() + [c], n * n)
                new.append(c)
        space = grown
        fresh = new
    return space


def trace_radical(space: Subspace, n: int) -> Subspace:
    """{x in A : tr(x y) = 0 for all y in A}; the Jacobson radical of a matrix algebra A."""
    basis = space.vectors()
    if not basis:
        return Subspace.zero(n * n)
    system = [[trace_of_product(a, b, n) for a in basis] for b in basis]
    ker = nullspace(system, len(basis))
    return Subspace.span([combine(k, basis) for k in ker], n * n)


def combine(coeffs: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]]) -> Vec:
    dim = len(vectors[0]) if vectors else 0
    out = [Fraction(0)] * dim
    for c, v in zip(coeffs, vectors):
        if c:
            for j, x in enumerate(v):
                if x:
                    out[j] += c * x
    return tuple(out)


def nilpotency_index(j: Subspace, n: int) -> int:
    """Least p >= 1 with J^p = 0."""
    p, power = 1, j
    while power.dim:
        power = product_space(power, j, n)
        p += 1
    return p


class Coordinates:
    """Coordinates with respect to a fixed (not necessarily echelon) basis."""

    def __init__(self, basis: Sequence[Sequence]):
        self.basis = [tuple(Fraction(x) for x in b) for b in basis]
        self.k = len(self.basis)
        if not self.basis:
            self.pivots: list[int] = []
            self.inv: list[list[Fraction]] = []
            return
        dim = len(self.basis[0])
        _, piv = rref(self.basis)
        if len(piv) != self.k:
            raise ValueError("basis vectors are linearly dependent")
        self.pivots = piv
        # x B[:, piv] = v[piv]  =>  x = v[piv] inv(B[:, piv])
        sq = [[b[p] for p in piv] for b in self.basis]
        aug = [row + [Fraction(int(i == j)) for j in range(self.k)] for i, row in enumerate(sq)]
        red, _ = rref(aug)
        self.inv = [r[self.k:] for r in red]
        self.dim = dim

    def __call__(self, v: Sequence, check: bool = False) -> list[Fraction]:
        if not self.k:
            if check and any(v):
                raise ValueError("vector outside span")
            return []
        w = [v[p] for p in self.pivots]
        x = [sum((w[i] * self.inv[i][j] for i in range(self.k) if w[i]), Fraction(0))
             for j in range(self.k)]
        if check and tuple(combine(x, self.basis)) != tuple(Fraction(a) for a in v):
            raise ValueError("vector outside span")
        return x


def extend_basis(sub: Subspace, within: Subspace) -> list[Vec]:
    """Vectors of `within`'s echelon basis completing `sub` to a basis of `within`."""
    out: list[Vec] = []
    cur = sub
    for v in within.vectors():
        if not cur.contains(v):
            out.append(v)
            cur = Subspace.span(cur.vectors() + [v], within.ambient_dim)
    return out


def action_matrix(op_left: Sequence[Fraction], complement: Sequence[Vec],
                  coords: Coordinates, n: int, m: int) -> list[list[Fraction]]:
    """Matrix of left multiplication by `op_left` on U/W in the basis `complement`.

    `coords` expresses vectors of U in the basis complement + basis(W); only
    the first m coordinates (the quotient part) are kept.  Column convention.
    """
    cols = [coords(mul(op_left, c, n), check=True)[:m] for c in complement]
    return [[cols[j][i] for j in range(m)] for i in range(m)]
