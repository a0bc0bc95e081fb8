"""Associative envelope A of rho(L), its radical and a composition chain
of left ideals refining A > J > J^2 > ... > 0."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import sympy

from .exactalg import RatMatrix, Subspace, nullspace
from .liestruct import LinearRep
from .matalg import (Coordinates, action_matrix, algebra_closure, combine, extend_basis, flat,
                     mul, nilpotency_index, product_space, trace_radical, unflat)

IRREDUCIBLE = "irreducible"
ONE_DIMENSIONAL = "one_dimensional"


class NonSplitInput(RuntimeError):
    """A composition factor has an endomorphism field larger than Q."""


@dataclass(frozen=True)
class Envelope:
    dim_v: int
    space: Subspace
    radical: Subspace | None = None
    p: int | None = None
    chain: tuple[Subspace, ...] | None = None
    factor_kind: tuple[str, ...] | None = None
    seed: int = 0

    @property
    def basis(self) -> list[RatMatrix]:
        return [unflat(v, self.dim_v) for v in self.space.vectors()]

    @property
    def dim_a(self) -> int:
        return self.space.dim

    @property
    def theta(self) -> int:
        return len(self.chain) - 1 if self.chain else 0

    def factor_dims(self) -> list[int]:
        return [self.chain[k].dim - self.chain[k + 1].dim for k in range(self.theta)]


def generate_envelope(rep: LinearRep) -> Envelope:
    n = rep.dim_v
    return Envelope(dim_v=n, space=algebra_closure([flat(b) for b in rep.basis], n))


def jacobson_radical(env: Envelope) -> tuple[Subspace, int]:
    n = env.dim_v
    j = trace_radical(env.space, n)
    return j, nilpotency_index(j, n)


# --- module splitting -----------------------------------------------------

def _matvec(m: list[list[Fraction]], v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in m]


def _transpose(m):
    return [list(r) for r in zip(*m)] if m else []


def _spin(v: Sequence[Fraction], mats: list, dim: int) -> Subspace:
    """Smallest subspace containing v and stable under all mats."""
    space = Subspace.span([v], dim)
    fresh = space.vectors()
    while fresh:
        new = []
        for u in fresh:
            for m in mats:
                w = _matvec(m, u)
                if any(w) and not space.contains(w):
                    space = Subspace.span(space.vectors() + [w], dim)
                    new.append(w)
        fresh = new
    return space


def _sym(m):
    return sympy.Matrix(len(m), len(m), lambda i, j: sympy.Rational(
        m[i][j].numerator, m[i][j].denominator))


def _poly_at(coeffs, x: list[list[Fraction]]) -> list[list[Fraction]]:
    dim = len(x)
    acc = [[Fraction(0)] * dim for _ in range(dim)]
    for c in coeffs:
        acc = [[sum((acc[i][k] * x[k][j] for k in range(dim) if acc[i][k]), Fraction(0))
                + (c if i == j else 0) for j in range(dim)] for i in range(dim)]
    return acc


def _commutant_dim(mats: list, dim: int) -> int:
    nunk = dim * dim
    rows = []
    for m in mats:
        # (Y M - M Y)[i][j] = sum_k Y[i][k] M[k][j] - M[i][k] Y[k][j]
        for i in range(dim):
            for j in range(dim):
                row = [Fraction(0)] * nunk
                for k in range(dim):
                    row[i * dim + k] += m[k][j]
                    row[k * dim + j] -= m[i][k]
                rows.append(row)
    return len(nullspace(rows, nunk)) if rows else nunk


def _find_submodule(mats: list, dim: int, rng: random.Random, where: str,
                    max_attempts: int = 40) -> Subspace | None:
    """A proper nonzero submodule of a semisimple module, or None if simple."""
    x_sym = sympy.Symbol("x")
    zero_part = nullspace([row for m in mats for row in m], dim) if mats else \
        [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    if zero_part:
        if len(zero_part) < dim:
            return Subspace.span(zero_part, dim)
        if dim == 1:
            return None
        return Subspace.span(zero_part[:1], dim)
    for _ in range(max_attempts):
        x = [[Fraction(0)] * dim for _ in range(dim)]
        terms = [(m,) for m in mats] + [(a, b) for a in mats for b in mats]
        for term in rng.sample(terms, min(len(terms), 2 * len(mats) + 1)):
            c = rng.randint(-5, 5)
            if not c:
                continue
            prod = term[0]
            for f in term[1:]:
                prod = [[sum((prod[i][k] * f[k][j] for k in range(dim)), Fraction(0))
                         for j in range(dim)] for i in range(dim)]
            x = [[x[i][j] + c * prod[i][j] for j in range(dim)] for i in range(dim)]
        cp = _sym(x).charpoly(x_sym).as_expr()
        _, factors = sympy.factor_list(cp, x_sym)
        factors = sorted((sympy.Poly(f, x_sym) for f, _ in factors), key=lambda f: f.degree())
        for f in factors:
            coeffs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
                      for c in f.all_coeffs()]
            fx = _poly_at(coeffs, x)
            ker = nullspace(fx, dim)
            if not ker:
                continue
            for v in ker:
                sub = _spin(v, mats, dim)
                if sub.dim < dim:
                    return sub
            if len(ker) == f.degree():
                w = nullspace(_transpose(fx), dim)[0]
                dual = _spin(w, [_transpose(m) for m in mats], dim)
                if dual.dim < dim:
                    return Subspace.span(nullspace(dual.basis.to_rows(), dim), dim)
                if _commutant_dim(mats, dim) > 1:
                    raise NonSplitInput(
                        f"{where}: simple factor of dimension {dim} has endomorphism "
                        f"ring of dimension {_commutant_dim(mats, dim)} over Q")
                return None
    raise RuntimeError(f"{where}: module splitting did not settle in {max_attempts} attempts")


def _module_series(mats: list, dim: int, rng: random.Random, where: str
                   ) -> list[tuple[Subspace, str]]:
    """Composition series V = V_0 > ... > V_t = 0 in coordinates, with factor kinds.

    Returned as [(V_0, kind_0), ..., (V_{t-1}, kind_{t-1})]; the final zero
    space is implicit.
    """
    if dim == 0:
        return []
    sub = _find_submodule(mats, dim, rng, where)
    if sub is None:
        kind = IRREDUCIBLE if any(any(r) for m in mats for r in m) else ONE_DIMENSIONAL
        return [(Subspace.full(dim), kind)]
    # series of the quotient, lifted, then of the submodule
    comp = sub.complement_basis()
    co = Coordinates(comp + sub.vectors())
    q = len(comp)
    qmats = []
    for m in mats:
        cols = [co(_matvec(m, c), check=True)[:q] for c in comp]
        qmats.append([[cols[j][i] for j in range(q)] for i in range(q)])
    top = _module_series(qmats, q, rng, where)
    smats = []
    sv = sub.vectors()
    sco = Coordinates(sv)
    for m in mats:
        cols = [sco(_matvec(m, v), check=True) for v in sv]
        smats.append([[cols[j][i] for j in range(len(sv))] for i in range(len(sv))])
    bottom = _module_series(smats, len(sv), rng, where)
    out = []
    for space, kind in top:
        lifted = [combine(v, comp) for v in space.vectors()] + sv
        out.append((Subspace.span(lifted, dim), kind))
    for space, kind in bottom:
        out.append((Subspace.span([combine(v, sv) for v in space.vectors()], dim), kind))
    return out


def composition_chain(env: Envelope, seed: int | None = None
                      ) -> tuple[tuple[Subspace, ...], tuple[str, ...]]:
    n = env.dim_v
    n2 = n * n
    if env.radical is None:
        raise ValueError("radical not computed")
    rng = random.Random(env.seed if seed is None else seed)
    layers = [env.space]
    power = env.radical
    while power.dim:
        layers.append(power)
        power = product_space(power, env.radical, n)
    layers.append(Subspace.zero(n2))
    abasis = env.space.vectors()
    chain: list[Subspace] = []
    kinds: list[str] = []
    for idx in range(len(layers) - 1):
        u, w = layers[idx], layers[idx + 1]
        if u.dim == w.dim:
            continue
        comp = extend_basis(w, u)
        co = Coordinates(list(comp) + w.vectors())
        mats = [action_matrix(a, comp, co, n, len(comp)) for a in abasis]
        series = _module_series(mats, len(comp), rng, f"layer {idx}")
        for space, kind in series:
            chain.append(Subspace.span([combine(v, comp) for v in space.vectors()]
                                       + w.vectors(), n2))
            kinds.append(kind)
    chain.append(Subspace.zero(n2))
    return tuple(chain), tuple(kinds)


def build_envelope(rep: LinearRep, seed: int = 0) -> Envelope:
    env = generate_envelope(rep)
    j, p = jacobson_radical(env)
    env = replace(env, radical=j, p=p, seed=seed)
    chain, kinds = composition_chain(env)
    return replace(env, chain=chain, factor_kind=kinds)


# --- queries on the chain -------------------------------------------------

def factor_action(env: Envelope, k: int, x: Sequence[Fraction]) -> list[list[Fraction]]:
    """Matrix of left multiplication by x on B_k / B_{k+1}."""
    n = env.dim_v
    bk, bk1 = env.chain[k], env.chain[k + 1]
    comp = extend_basis(bk1, bk)
    co = Coordinates(list(comp) + bk1.vectors())
    return action_matrix(x, comp, co, n, len(comp))


def annihilator_in_rho(rep: LinearRep, env: Envelope, k: int) -> Subspace:
    """{x in rho(L) : x B_k in B_{k+1}}."""
    if not 0 <= k < env.theta:
        raise IndexError(f"chain index {k} outside 0..{env.theta - 1}")
    n = rep.dim_v
    lv = rep.space.vectors()
    if not lv:
        return Subspace.zero(n * n)
    funcs = env.chain[k + 1].annihilator()
    rows = []
    for b in env.chain[k].vectors():
        prods = [mul(x, b, n) for x in lv]
        for f in funcs:
            rows.append([sum((a * c for a, c in zip(f, pr) if a and c), Fraction(0))
                         for pr in prods])
    ker = nullspace(rows, len(lv)) if rows else \
        [[Fraction(int(i == j)) for j in range(len(lv))] for i in range(len(lv))]
    return Subspace.span([combine(c, lv) for c in ker], n * n)


def height(env: Envelope, a: RatMatrix) -> int:
    v = flat(a)
    if not env.space.contains(v):
        raise ValueError("element is not in the envelope")
    return max(k for k, b in enumerate(env.chain) if b.contains(v))
