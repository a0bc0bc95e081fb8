"""Linear Lie algebras rho(L) in gl(V): closure, Levi-type decomposition,
Wedderburn-Malcev splitting of radical elements, structure-lemma checks."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import sympy

from .exactalg import DimensionError, RatMatrix, Subspace, nullspace, solve_linear
from .matalg import (Coordinates, algebra_closure, brk, combine, extend_basis, flat, identity_vec,
                     mul, trace_of_product, trace_radical, unflat)

if TYPE_CHECKING:
    from .envelope import Envelope


class LeviError(RuntimeError):
    """The input is outside what the decomposition supports (e.g. not split)."""


@dataclass(frozen=True)
class LinearRep:
    dim_v: int
    basis: tuple[RatMatrix, ...]

    @property
    def dim_l(self) -> int:
        return len(self.basis)

    @property
    def space(self) -> Subspace:
        return Subspace.span([flat(b) for b in self.basis], self.dim_v ** 2)

    def integer_basis(self) -> list[list[list[int]]]:
        """Basis matrices each scaled to have integer entries (same span)."""
        out = []
        for b in self.basis:
            row = RatMatrix(1, b.rows * b.cols, b.entries).integer_rows()[0]
            out.append([row[i * self.dim_v:(i + 1) * self.dim_v] for i in range(self.dim_v)])
        return out

    def transformed(self, basis: Sequence[RatMatrix]) -> "LinearRep":
        """Same dim_v, explicit (non-canonical) basis; used for invariance tests."""
        return LinearRep(self.dim_v, tuple(basis))


def close_under_bracket(generators: Sequence[RatMatrix], dim_v: int) -> LinearRep:
    for g in generators:
        if g.shape != (dim_v, dim_v):
            raise DimensionError(f"generator of shape {g.shape}, expected {dim_v}x{dim_v}")
    n2 = dim_v * dim_v
    space = Subspace.span([flat(g) for g in generators], n2)
    fresh = space.vectors()
    while fresh:
        basis = space.vectors()
        new = []
        for x in fresh:
            for y in basis:
                c = brk(x, y, dim_v)
                if any(c) and not space.contains(c):
                    space = Subspace.span(space.vectors() + [c], n2)
                    new.append(c)
        fresh = new
    return LinearRep(dim_v, tuple(unflat(v, dim_v) for v in space.vectors()))


@dataclass(frozen=True)
class LeviData:
    g: Subspace
    r: Subspace
    s: Subspace
    l_cap_j: Subspace


def _span_brackets(a: Sequence, b: Sequence, n: int) -> Subspace:
    return Subspace.span([brk(x, y, n) for x in a for y in b], n * n)


def solvable_radical(rep: LinearRep) -> Subspace:
    """{x in rho(L) : tr(xy) = 0 for all y in [rho(L), rho(L)]}."""
    n = rep.dim_v
    lvecs = rep.space.vectors()
    derived = _span_brackets(lvecs, lvecs, n).vectors()
    if not lvecs:
        return Subspace.zero(n * n)
    system = [[trace_of_product(x, y, n) for x in lvecs] for y in derived]
    ker = nullspace(system, len(lvecs)) if system else \
        [[Fraction(int(i == j)) for j in range(len(lvecs))] for i in range(len(lvecs))]
    return Subspace.span([combine(k, lvecs) for k in ker], n * n)


def _levi_subalgebra(lspace: Subspace, r: Subspace, n: int) -> Subspace:
    """Lift a complement of R to a subalgebra, one derived-series step at a time."""
    n2 = n * n
    xs = extend_basis(r, lspace)
    if not xs:
        return Subspace.zero(n2)
    s = len(xs)
    rvec = r.vectors()
    coords = Coordinates(list(xs) + rvec)
    # structure constants of L/R in the basis xs
    const = {}
    for i in range(s):
        for j in range(i + 1, s):
            const[i, j] = coords(brk(xs[i], xs[j], n), check=True)[:s]
    series = [r]
    while series[-1].dim:
        v = series[-1].vectors()
        series.append(_span_brackets(v, v, n))
    xs = [list(x) for x in xs]
    for k in range(len(series) - 1):
        rk, rk1 = series[k].vectors(), series[k + 1].vectors()
        pairs = sorted(const)
        nu = s * len(rk)
        nv = len(pairs) * len(rk1)
        rows, rhs = [], []
        for pidx, (i, j) in enumerate(pairs):
            c = const[i, j]
            e = [a - b for a, b in zip(brk(xs[i], xs[j], n), combine(c, xs))]
            # e + [x_i, r_j] - [x_j, r_i] - sum_l c_l r_l - s_ij = 0
            cols = [[Fraction(0)] * n2 for _ in range(nu + nv)]
            for a, ra in enumerate(rk):
                bj = brk(xs[i], ra, n)
                bi = brk(xs[j], ra, n)
                for t in range(n2):
                    cols[j * len(rk) + a][t] += bj[t]
                    cols[i * len(rk) + a][t] -= bi[t]
                for l in range(s):
                    if c[l]:
                        for t in range(n2):
                            cols[l * len(rk) + a][t] -= c[l] * ra[t]
            for b, sb in enumerate(rk1):
                for t in range(n2):
                    cols[nu + pidx * len(rk1) + b][t] -= sb[t]
            for t in range(n2):
                rows.append([col[t] for col in cols])
                rhs.append([-e[t]])
        if not rows:
            continue
        sol, _ = solve_linear(RatMatrix.from_rows(rows, cols=nu + nv),
                              RatMatrix.from_rows(rhs, cols=1))
        if sol is None:
            raise LeviError(f"no Levi lift at derived-series stage {k}")
        u = [sol[t, 0] for t in range(nu)]
        for i in range(s):
            ri = combine(u[i * len(rk):(i + 1) * len(rk)], rk)
            xs[i] = [a + b for a, b in zip(xs[i], ri)]
    return Subspace.span(xs, n2)


def invariant_projection(big: Subspace, sub: Subspace, ops: Sequence, act
                         ) -> tuple[list[list[Fraction]] | None, list[list[list[Fraction]]]]:
    """Projection big -> sub, identity on sub, commuting with act(op, .) for op in ops.

    Returns (P, homogeneous) where pi(b_a) = sum_b P[a][b] sub_b and
    `homogeneous` is a basis of the equivariant maps big/sub -> sub in the
    same layout.  Both spaces must be act-invariant.
    """
    bvec, svec = big.vectors(), sub.vectors()
    nb, ns = len(bvec), len(svec)
    if ns == 0:
        return [[] for _ in range(nb)], []
    bco = Coordinates(bvec)
    sco = Coordinates(svec)
    nunk = nb * ns

    def var(a, b):
        return a * ns + b

    rows, rhs = [], []
    for j, sj in enumerate(svec):
        alpha = bco(sj, check=True)
        for b in range(ns):
            row = [Fraction(0)] * nunk
            for a in range(nb):
                if alpha[a]:
                    row[var(a, b)] += alpha[a]
            rows.append(row)
            rhs.append([Fraction(int(b == j))])
    for op in ops:
        beta = [bco(act(op, ba), check=True) for ba in bvec]
        gamma = [sco(act(op, sb), check=True) for sb in svec]
        for a in range(nb):
            for e in range(ns):
                row = [Fraction(0)] * nunk
                for c in range(nb):
                    if beta[a][c]:
                        row[var(c, e)] += beta[a][c]
                for b in range(ns):
                    if gamma[b][e]:
                        row[var(a, b)] -= gamma[b][e]
                rows.append(row)
                rhs.append([Fraction(0)])
    sol, ker = solve_linear(RatMatrix.from_rows(rows, cols=nunk), RatMatrix.from_rows(rhs, cols=1))
    homogeneous = [[[h[var(a, b)] for b in range(ns)] for a in range(nb)] for h in ker.vectors()]
    if sol is None:
        return None, homogeneous
    return [[sol[var(a, b), 0] for b in range(ns)] for a in range(nb)], homogeneous


def projection_kernel(big: Subspace, sub: Subspace, proj: list[list[Fraction]], n: int) -> Subspace:
    bvec = big.vectors()
    ns = sub.dim
    if ns == 0:
        return big
    system = [[proj[a][b] for a in range(len(bvec))] for b in range(ns)]
    ker = nullspace(system, len(bvec))
    return Subspace.span([combine(k, bvec) for k in ker], n * n)


def levi_decompose(rep: LinearRep, env: "Envelope") -> LeviData:
    n = rep.dim_v
    lspace = rep.space
    r = solvable_radical(rep)
    g = _levi_subalgebra(lspace, r, n)
    gv = g.vectors()
    if any(not g.contains(brk(x, y, n)) for x in gv for y in gv):
        raise LeviError("computed Levi factor is not bracket-closed")
    if g.dim + r.dim != lspace.dim or (g + r).dim != lspace.dim:
        raise LeviError("G + R does not decompose rho(L)")
    l_cap_j = lspace.intersect(env.radical)
    proj, _ = invariant_projection(r, l_cap_j, gv, lambda x, y: brk(x, y, n))
    if proj is None:
        raise LeviError("no G-invariant complement of rho(L) & J(A) in R")
    s = projection_kernel(r, l_cap_j, proj, n)
    return LeviData(g=g, r=r, s=s, l_cap_j=l_cap_j)


# --- Wedderburn-Malcev splitting -------------------------------------------

@dataclass(frozen=True)
class WmSplit:
    inputs: tuple[RatMatrix, ...]
    nilpotent_parts: tuple[RatMatrix, ...]
    semisimple_parts: tuple[RatMatrix, ...]


class SplitError(RuntimeError):
    pass


def wm_split(env: "Envelope", elements: Sequence[RatMatrix], seed: int = 0,
             max_attempts: int = 20) -> WmSplit:
    """a_i = b_i + c_i with b_i in the radical and the c_i commuting and diagonalizable.

    Works in the unital algebra generated by the elements; its quotient by the
    radical is commutative, so idempotents lifted from a single generic
    element all commute.
    """
    elements = tuple(elements)
    if not elements:
        return WmSplit((), (), ())
    n = elements[0].rows
    n2 = n * n
    a1 = algebra_closure([flat(e) for e in elements], n, unital=True)
    j1 = trace_radical(a1, n)
    limit = max(env.dim_a, a1.dim) + 1
    rng = random.Random(seed)
    quot = extend_basis(j1, a1)
    t = len(quot)
    one = identity_vec(n)
    x_sym = sympy.Symbol("x")
    for _ in range(max_attempts):
        coeffs = [Fraction(rng.randint(-9, 9)) for _ in quot]
        x = combine(coeffs, quot)
        # minimal polynomial of x modulo J1 via the multiplication operator on A1/J1
        opm = _quotient_operator(x, a1, j1, quot, n)
        mpoly = sympy.Poly(opm.charpoly(x_sym).as_expr(), x_sym)
        sqf = sympy.Poly(sympy.quo(mpoly, sympy.gcd(mpoly, mpoly.diff(x_sym))), x_sym)
        _, factors = sympy.factor_list(sqf.as_expr(), x_sym)
        if any(sympy.degree(f, x_sym) > 1 for f, _ in factors):
            raise SplitError("semisimple quotient is not split over Q")
        roots = [-sympy.Poly(f, x_sym).all_coeffs()[1] / sympy.Poly(f, x_sym).all_coeffs()[0]
                 for f, _ in factors]
        if len(roots) != t:
            continue  # x does not generate the quotient; draw again
        roots = [Fraction(int(r.p), int(r.q)) for r in roots]
        idems = []
        for i, mu in enumerate(roots):
            # Lagrange polynomial prod_{k != i} (x - mu_k) / (mu_i - mu_k)
            e = one
            for k, nu in enumerate(roots):
                if k != i:
                    shifted = tuple(a - nu * b for a, b in zip(x, one))
                    e = tuple(v / (mu - nu) for v in mul(e, shifted, n))
            e = _lift_idempotent(e, n, limit)
            idems.append(e)
        parts_b, parts_c = [], []
        for a in elements:
            av = flat(a)
            c = tuple(Fraction(0) for _ in range(n2))
            for e in idems:
                mu = _eigenvalue_mod(av, e, j1, n)
                c = tuple(ci + mu * ei for ci, ei in zip(c, e))
            b = tuple(ai - ci for ai, ci in zip(av, c))
            parts_b.append(unflat(b, n))
            parts_c.append(unflat(c, n))
        return WmSplit(elements, tuple(parts_b), tuple(parts_c))
    raise SplitError("no generic element found for the semisimple quotient")


def _quotient_operator(x, a1: Subspace, j1: Subspace, quot, n: int) -> sympy.Matrix:
    co = Coordinates(list(quot) + j1.vectors())
    t = len(quot)
    cols = [co(mul(x, q, n), check=True)[:t] for q in quot]
    return sympy.Matrix(t, t, lambda i, j: sympy.Rational(cols[j][i].numerator, cols[j][i].denominator))


def _lift_idempotent(e, n: int, limit: int):
    for _ in range(limit):
        e2 = mul(e, e, n)
        if e2 == tuple(e):
            return tuple(e)
        e3 = mul(e2, e, n)
        e = tuple(3 * a - 2 * b for a, b in zip(e2, e3))
    if mul(e, e, n) == tuple(e):
        return tuple(e)
    raise SplitError(f"idempotent lifting did not converge in {limit} steps")


def _eigenvalue_mod(a, e, j1: Subspace, n: int) -> Fraction:
    """mu with a e - mu e in J1 (a acts on the idempotent e by a scalar modulo J1)."""
    ae = mul(a, e, n)
    # find mu from a coordinate where e is nonzero modulo J1
    comp = extend_basis(j1, Subspace.span(j1.vectors() + [e, ae], n * n))
    co = Coordinates(list(comp) + j1.vectors())
    ce = co(e, check=True)
    cae = co(ae, check=True)
    k = len(comp)
    idx = next(i for i in range(k) if ce[i])
    mu = cae[idx] / ce[idx]
    if any(cae[i] - mu * ce[i] for i in range(k)):
        raise SplitError("element does not act by a scalar on a primitive idempotent")
    return mu


# --- lemma checks ---------------------------------------------------------

@dataclass
class LemmaReport:
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks[name] = bool(passed)
        if detail:
            self.details[name] = detail


def verify_lemmas(rep: LinearRep, env: "Envelope", levi: LeviData) -> LemmaReport:
    from .envelope import annihilator_in_rho, factor_action

    n = rep.dim_v
    rep_out = LemmaReport()
    lv = rep.space.vectors()
    jac = env.radical

    bad = [(i, k) for i, x in enumerate(lv) for k, y in enumerate(levi.r.vectors())
           if not jac.contains(brk(x, y, n))]
    rep_out.record("LR", not bad, f"{len(bad)} brackets outside J(A)" if bad else "")

    rs_direct = levi.s.dim + levi.l_cap_j.dim == levi.r.dim and \
        (levi.s + levi.l_cap_j) == levi.r
    gs_zero = all(not any(brk(g, s, n)) for g in levi.g.vectors() for s in levi.s.vectors())
    rep_out.record("RS.direct_sum", rs_direct)
    rep_out.record("RS.commute", gs_zero)
    rep_out.record("Levi.split", levi.g.dim + levi.r.dim == rep.dim_l
                   and (levi.g + levi.r) == rep.space)

    irr_ok, ann_ok = True, True
    notes = []
    for k in range(env.theta):
        bk, bk1 = env.chain[k], env.chain[k + 1]
        if not bk1.contains_space(_product(jac, bk, n)):
            continue
        for s in levi.s.vectors():
            mat = factor_action(env, k, s)
            m = len(mat)
            lam = mat[0][0] if m else Fraction(0)
            scalar = all(mat[i][j] == (lam if i == j else 0) for i in range(m) for j in range(m))
            if not scalar:
                irr_ok = False
                notes.append(f"S acts non-scalarly on factor {k}")
        ann = annihilator_in_rho(rep, env, k)
        rhs = ann.intersect(levi.g) + ann.intersect(levi.s) + levi.l_cap_j
        if rhs != ann:
            ann_ok = False
            notes.append(f"AnnGS fails on factor {k}")
    rep_out.record("Irr", irr_ok, "; ".join(n for n in notes if "S acts" in n))
    rep_out.record("AnnGS", ann_ok, "; ".join(n for n in notes if "AnnGS" in n))
    return rep_out


def _product(left: Subspace, right: Subspace, n: int) -> Subspace:
    return Subspace.span([mul(x, y, n) for x in left.vectors() for y in right.vectors()], n * n)
