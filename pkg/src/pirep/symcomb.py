"""Partitions, tableaux, hook lengths and Young symmetrizers.

Permutations of {0..n-1} are tuples of images, ``p[i] = p(i)``, and compose
as functions: ``(p * q)(i) = p(q(i))``.  A multilinear monomial
``x_{s(1)} ... x_{s(n)}`` is identified with the permutation ``s``; the
group acts on polynomials by renaming variables, so ``p . x_s = x_{p s}``
and P_n is the left regular module.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from math import factorial, prod
from typing import Iterable, Iterator, Mapping

Perm = tuple[int, ...]


@dataclass(frozen=True, order=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p <= 0 for p in self.parts):
            raise ValueError(f"parts must be positive: {self.parts}")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {self.parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def cells(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.parts):
            for j in range(row):
                yield i, j

    def removable(self) -> list["Partition"]:
        """Partitions obtained by deleting one corner box."""
        out = []
        for i, row in enumerate(self.parts):
            nxt = self.parts[i + 1] if i + 1 < len(self.parts) else 0
            if row > nxt:
                parts = list(self.parts)
                parts[i] -= 1
                out.append(Partition(tuple(p for p in parts if p)))
        return out

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def partitions_of(n: int) -> list[Partition]:
    """All partitions of n, in reverse lexicographic order."""
    if n < 0:
        raise ValueError("n must be nonnegative")

    def gen(rest: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return [Partition(p) for p in gen(n, n)]


def hook_lengths(lam: Partition) -> list[int]:
    conj = lam.conjugate().parts
    return [lam.parts[i] - j + conj[j] - i - 1 for i, j in lam.cells()]


def hook_dimension(lam: Partition) -> int:
    """Dimension of the irreducible S_n-module M(lam), n!/prod(hooks)."""
    num = factorial(lam.n)
    den = prod(hook_lengths(lam))
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError(f"hook formula not integral for {lam}")
    return q


@dataclass(frozen=True)
class Tableau:
    """Bijective filling of a Young diagram with 0..n-1 (row-major by default)."""
    shape: Partition
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if tuple(len(r) for r in self.rows) != self.shape.parts:
            raise ValueError("filling does not match shape")
        if sorted(x for r in self.rows for x in r) != list(range(self.shape.n)):
            raise ValueError("filling is not a bijection onto 0..n-1")

    @classmethod
    def canonical(cls, shape: Partition) -> "Tableau":
        rows, k = [], 0
        for length in shape.parts:
            rows.append(tuple(range(k, k + length)))
            k += length
        return cls(shape, tuple(rows))

    def columns(self) -> list[tuple[int, ...]]:
        if not self.rows:
            return []
        return [tuple(r[j] for r in self.rows if len(r) > j) for j in range(len(self.rows[0]))]


# --- permutations ---------------------------------------------------------

def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple(p[i] for i in q)


def inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def sign(p: Perm) -> int:
    seen = [False] * len(p)
    s = 1
    for i in range(len(p)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = p[j]
                length += 1
            if length % 2 == 0:
                s = -s
    return s


def subgroup_on_blocks(n: int, blocks: Iterable[tuple[int, ...]]) -> list[Perm]:
    """All permutations preserving each block setwise and fixing everything else."""
    blocks = [b for b in blocks if len(b) > 1]
    out = []
    for choice in product(*(permutations(b) for b in blocks)):
        p = list(range(n))
        for b, img in zip(blocks, choice):
            for src, dst in zip(b, img):
                p[src] = dst
        out.append(tuple(p))
    return out


# --- group algebra --------------------------------------------------------

@dataclass(frozen=True)
class GroupAlgebraElement:
    """Sparse rational combination of permutations of {0..n-1}."""
    n: int
    terms: Mapping[Perm, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for p, c in self.terms.items():
            if len(p) != self.n:
                raise ValueError(f"permutation {p} not of degree {self.n}")
            c = Fraction(c)
            if c:
                clean[tuple(p)] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def from_perm(cls, p: Perm, coeff=1) -> "GroupAlgebraElement":
        return cls(len(p), {tuple(p): Fraction(coeff)})

    @classmethod
    def monomial(cls, variables: Iterable[int]) -> "GroupAlgebraElement":
        """x_{v_1} ... x_{v_n} for a 1-based ordering of the variables."""
        return cls.from_perm(tuple(v - 1 for v in variables))

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        terms = defaultdict(Fraction, self.terms)
        for p, c in other.terms.items():
            terms[p] += c
        return GroupAlgebraElement(self.n, terms)

    def __sub__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        return self + other.scale(-1)

    def scale(self, c) -> "GroupAlgebraElement":
        c = Fraction(c)
        return GroupAlgebraElement(self.n, {p: c * v for p, v in self.terms.items()})

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        if self.n != other.n:
            raise ValueError("degree mismatch")
        terms: dict[Perm, Fraction] = defaultdict(Fraction)
        for p, a in self.terms.items():
            for q, b in other.terms.items():
                terms[compose(p, q)] += a * b
        return GroupAlgebraElement(self.n, terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupAlgebraElement) and self.n == other.n \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def proportionality(self, other: "GroupAlgebraElement") -> Fraction | None:
        """c with other == c * self, or None."""
        if self.is_zero():
            return Fraction(0) if other.is_zero() else None
        p0, a0 = next(iter(self.terms.items()))
        c = other.terms.get(p0, Fraction(0)) / a0
        return c if self.scale(c) == other else None

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, c in sorted(self.terms.items()):
            mono = "".join(f"x{i + 1}" for i in p)
            parts.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(parts)


def row_symmetrizer(t: Tableau) -> GroupAlgebraElement:
    n = t.shape.n
    return GroupAlgebraElement(n, {p: Fraction(1) for p in subgroup_on_blocks(n, t.rows)})


def column_antisymmetrizer(t: Tableau) -> GroupAlgebraElement:
    n = t.shape.n
    return GroupAlgebraElement(
        n, {p: Fraction(sign(p)) for p in subgroup_on_blocks(n, t.columns())})


def young_symmetrizer(t: Tableau) -> GroupAlgebraElement:
    """e_T = a_T b_T."""
    return row_symmetrizer(t) * column_antisymmetrizer(t)


def young_symmetrizer_star(t: Tableau) -> GroupAlgebraElement:
    """e*_T = b_T a_T."""
    return column_antisymmetrizer(t) * row_symmetrizer(t)
