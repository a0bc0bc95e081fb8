from fractions import Fraction
from functools import lru_cache

import pytest

from pirep.exactalg import RatMatrix
from pirep.pipeline import structures
from pirep.repspec import bundled_names, parse_spec

NAMES = bundled_names()


@lru_cache(maxsize=None)
def load(name: str, seed: int = 0):
    return structures(parse_spec(name), seed)


def unit(n, i, j):
    return RatMatrix.unit(n, i, j)


def mat(rows):
    return RatMatrix.from_rows([[Fraction(x) for x in r] for r in rows])


@pytest.fixture(params=NAMES)
def example(request):
    return load(request.param)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("PI_CACHE_DIR", str(tmp_path / "cache"))


def conjugator(n: int, seed: int) -> tuple[RatMatrix, RatMatrix]:
    """A random unimodular P (unipotent upper times unipotent lower) and its inverse."""
    import random

    import sympy

    rng = random.Random(seed)
    up = [[Fraction(int(i == j)) if i >= j else Fraction(rng.randint(-3, 3)) for j in range(n)]
          for i in range(n)]
    low = [[Fraction(int(i == j)) if i <= j else Fraction(rng.randint(-3, 3)) for j in range(n)]
           for i in range(n)]
    p = RatMatrix.from_rows(up) @ RatMatrix.from_rows(low)
    inv = sympy.Matrix(p.to_rows()).inv()
    pinv = RatMatrix.from_rows([[Fraction(int(x.p), int(x.q)) for x in inv.row(i)]
                                for i in range(n)])
    return p, pinv


def affine_gl2(seed: int = 1) -> list[RatMatrix]:
    """gl_2 acting on Q^2 plus translations, inside gl_3, in a scrambled basis of V."""
    gens = [unit(3, i, j) for i in range(2) for j in range(2)] + [unit(3, 0, 2), unit(3, 1, 2)]
    p, pinv = conjugator(3, seed)
    return [p @ g @ pinv for g in gens]
