import random
from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial

import pytest
import sympy

from conftest import NAMES, conjugator, load
from pirep.exactalg import RatMatrix
from pirep.liestruct import LinearRep, close_under_bracket
from pirep.multilin import (EvalTable, ResourceGuardError, alternate, choose_method, codimension,
                            codimension_result, cocharacter_multiplicities, is_identity,
                            multiplicity)
from pirep.symcomb import GroupAlgebraElement, Partition, partitions_of

X1X2 = GroupAlgebraElement.monomial([1, 2])
X2X1 = GroupAlgebraElement.monomial([2, 1])
COMM = X1X2 - X2X1


def brute_codim(rep: LinearRep, n: int) -> int:
    """Rank, via sympy, of all monomials evaluated on all basis tuples."""
    if rep.dim_l == 0:
        return 0
    basis = [sympy.Matrix(b.to_rows()) for b in rep.basis]
    rows = []
    for sigma in permutations(range(n)):
        row = []
        for t in product(range(rep.dim_l), repeat=n):
            m = sympy.eye(rep.dim_v)
            for i in sigma:
                m = m * basis[t[i]]
            row.extend(m)
        rows.append(row)
    return sympy.Matrix(rows).rank()


def procesi_m2(n: int) -> int:
    """Codimensions of the full matrix algebra M_2 (closed formula)."""
    return comb(2 * n + 2, n + 1) // (n + 2) - comb(n, 3) + 1 - 2 ** n


# --- codimensions -------------------------------------------------------------

def test_codimension_examples():
    zero, scalar, sl2 = load("zero").rep, load("scalar1").rep, load("sl2_natural").rep
    for n in range(1, 5):
        assert codimension(zero, n) == 0
        assert codimension(scalar, n) == 1
    assert codimension(sl2, 2) == 2


@pytest.mark.parametrize("name", [n for n in NAMES if n != "sl2_adjoint"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_codimension_matches_brute_force(name, n):
    rep = load(name).rep
    assert codimension(rep, n, method="exact") == brute_codim(rep, n)


def test_codimension_adjoint_brute_force_small():
    rep = load("sl2_adjoint").rep
    assert [codimension(rep, n) for n in (1, 2)] == [brute_codim(rep, n) for n in (1, 2)]


@pytest.mark.parametrize("n", range(1, 6))
def test_gl2_matches_m2_formula(n):
    assert codimension(load("gl2").rep, n) == procesi_m2(n)


def test_hand_derived_sequences():
    # span{E11, E12}: a product is nonzero only when E12 is last, so the row of
    # a monomial is determined by its last variable
    assert [codimension(load("ut2_e11_e12").rep, n) for n in range(1, 6)] == [1, 2, 3, 4, 5]
    # strictly upper triangular 3x3: only products of length <= 2 survive
    assert [codimension(load("heisenberg3").rep, n) for n in range(1, 6)] == [1, 2, 0, 0, 0]
    assert [codimension(load("e12").rep, n) for n in range(1, 6)] == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("name", NAMES)
def test_exact_and_modular_agree(name):
    rep = load(name).rep
    for n in range(1, 5):
        assert codimension(rep, n, method="exact") == codimension(rep, n, method="modular")


@pytest.mark.parametrize("name", NAMES)
def test_codimension_upper_bound(name):
    rep = load(name).rep
    for n in range(1, 5):
        assert 0 <= codimension(rep, n) <= min(factorial(n), rep.dim_l ** n * rep.dim_v ** 2)


@pytest.mark.parametrize("name", ["sl2_natural", "ut2_e11_e12", "heisenberg3"])
@pytest.mark.parametrize("seed", [3, 11])
def test_conjugation_invariance(name, seed):
    rep = load(name).rep
    p, pinv = conjugator(rep.dim_v, seed)
    conj = close_under_bracket([p @ b @ pinv for b in rep.basis], rep.dim_v)
    for n in range(1, 5):
        assert codimension(conj, n) == codimension(rep, n)


@pytest.mark.parametrize("name", ["sl2_natural", "gl2", "ut2_e11_e12"])
@pytest.mark.parametrize("seed", [0, 5])
def test_basis_invariance(name, seed):
    rep = load(name).rep
    rng = random.Random(seed)
    k = rep.dim_l
    while True:
        coeffs = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(k)]
                  for _ in range(k)]
        if sympy.Matrix(coeffs).det() != 0:
            break
    mixed = []
    for row in coeffs:
        acc = RatMatrix.zeros(rep.dim_v, rep.dim_v)
        for c, b in zip(row, rep.basis):
            acc = acc + b.scale(c)
        mixed.append(acc)
    other = rep.transformed(mixed)
    for n in range(1, 5):
        assert codimension(other, n) == codimension(rep, n)


def test_method_choice_and_guard():
    assert choose_method(4, 10, "auto") == "exact"
    assert choose_method(5, 10, "auto") == "modular"
    assert choose_method(3, 10**7, "auto") == "modular"
    with pytest.raises(ValueError):
        choose_method(3, 10, "bogus")
    rep = load("gl2").rep
    with pytest.raises(ResourceGuardError):
        codimension(rep, 5, budget=1000)
    assert codimension(rep, 3, budget=10, force=True) == 6
    res = codimension_result(rep, 5, seed=9)
    assert res.method == "modular" and res.seed == 9 and len(res.primes) == 2


def test_eval_table_layout():
    rep = load("ut2_e11_e12").rep
    table = EvalTable(rep, 3)
    assert table.width == 2 ** 3 * 4
    # row for identity permutation at tuple (1, 0, 1) is b1 b0 b1
    b = [sympy.Matrix(m) for m in rep.integer_basis()]
    row = table.row((0, 1, 2))
    idx = 1 * 4 + 0 * 2 + 1
    assert list(row[idx * 4:(idx + 1) * 4]) == list(b[1] * b[0] * b[1])


# --- identities and alternation --------------------------------------------------

def test_is_identity_examples():
    assert is_identity(COMM, load("scalar1").rep)
    assert is_identity(X1X2, load("e12").rep)
    assert not is_identity(COMM, load("sl2_natural").rep)


def test_standard_polynomial_s4_is_identity_of_gl2():
    s4 = alternate(GroupAlgebraElement.monomial([1, 2, 3, 4]), [1, 2, 3, 4])
    assert len(s4) == 24
    assert is_identity(s4, load("gl2").rep)
    s3 = alternate(GroupAlgebraElement.monomial([1, 2, 3]), [1, 2, 3])
    assert not is_identity(s3, load("gl2").rep)


def test_alternate_examples():
    assert alternate(X1X2, [1, 2]) == COMM
    assert alternate(X1X2, [2]) == X1X2
    once = alternate(X1X2, [1, 2])
    assert alternate(once, [1, 2]) == once.scale(2)
    with pytest.raises(ValueError):
        alternate(X1X2, [3])


def test_alternation_twice_general():
    f = GroupAlgebraElement.monomial([3, 1, 2, 4])
    once = alternate(f, [1, 2, 4])
    assert alternate(once, [1, 2, 4]) == once.scale(6)


# --- cocharacters ----------------------------------------------------------------

def test_cochar_scalar_and_zero():
    t = cocharacter_multiplicities(load("scalar1").rep, 3)
    assert [(r.shape.parts, r.m) for r in t.rows] == [((3,), 1), ((2, 1), 0), ((1, 1, 1), 0)]
    t = cocharacter_multiplicities(load("zero").rep, 3)
    assert all(r.m == 0 for r in t.rows) and t.c_n == 0


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cochar_consistency_and_column_vanishing(name, n):
    rep = load(name).rep
    t = cocharacter_multiplicities(rep, n, compute_all=True)
    assert t.consistent, (t.weighted_sum, t.c_n)
    for r in t.rows:
        assert r.computed
        if len(r.shape) > rep.dim_l:
            assert r.m == 0


def test_cochar_sl2_n4_against_independent_codimension():
    rep = load("sl2_natural").rep
    t = cocharacter_multiplicities(rep, 4)
    assert t.weighted_sum == brute_codim(rep, 4)


def test_cochar_gl2_known_values():
    # M_2: the (1,1,1,1) component dies (standard polynomial s_4)
    t = cocharacter_multiplicities(load("gl2").rep, 4)
    assert t.multiplicity((1, 1, 1, 1)) == 0
    assert t.multiplicity((4,)) == 1


def test_cochar_threads_same_result():
    rep = load("sl2_adjoint").rep
    a = cocharacter_multiplicities(rep, 4, workers=1)
    b = cocharacter_multiplicities(rep, 4, workers=3)
    assert a == b


def test_cochar_max_n_guard():
    with pytest.raises(ResourceGuardError):
        cocharacter_multiplicities(load("scalar1").rep, 7)


def test_multiplicity_matches_scaling_independence():
    rep = load("sl2_natural").rep
    lam = Partition((2, 1))
    scaled = rep.transformed([b.scale(Fraction(3, 2)) for b in rep.basis])
    assert multiplicity(rep, lam).rank == multiplicity(scaled, lam).rank


def test_cochar_zero_row_shapes_skipped_by_default():
    rep = load("e12").rep
    t = cocharacter_multiplicities(rep, 2)
    skipped = [r for r in t.rows if not r.computed]
    assert [r.shape.parts for r in skipped] == [(1, 1)]
    assert t.consistent


def test_partitions_cover_all_shapes():
    t = cocharacter_multiplicities(load("sl2_natural").rep, 3)
    assert [r.shape for r in t.rows] == partitions_of(3)
    assert [r.dim for r in t.rows] == [1, 2, 1]

