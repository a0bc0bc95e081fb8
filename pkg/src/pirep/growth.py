"""Growth-law verdict: fit C1 n^r1 d^n <= c_n <= C2 n^r2 d^n over computed n.

Exponents r are half-integers, so every comparison is done exactly on
squares: s_n^2 = c_n^2 / (n^(2r) d^(2n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cache import Cache
from .exponent import DEFAULT_STATE_CAP, pi_exponent
from .multilin import DEFAULT_CELL_BUDGET
from .pipeline import codimensions, structures
from .repspec import RepSpec, format_rational

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
ROOT_WINDOW = (Fraction(3, 5), Fraction(21, 20))
MAX_TWICE_R = 200


@dataclass(frozen=True)
class GrowthOptions:
    method: str = "auto"
    primes: int = 2
    seed: int = 0
    budget: int = DEFAULT_CELL_BUDGET
    force: bool = False
    state_cap: int = DEFAULT_STATE_CAP


@dataclass(frozen=True)
class Fit:
    twice_r1: int
    c1_sq: Fraction
    twice_r2: int
    c2_sq: Fraction

    @property
    def r1(self) -> Fraction:
        return Fraction(self.twice_r1, 2)

    @property
    def r2(self) -> Fraction:
        return Fraction(self.twice_r2, 2)


@dataclass
class GrowthReport:
    name: str
    max_n: int
    table: list[dict]
    d: int
    d_lower_bound: bool
    fit: Fit | None
    verdict: str
    notes: list[str] = field(default_factory=list)

    @property
    def codims(self) -> list[int]:
        return [row["c_n"] for row in self.table]

    def to_dict(self) -> dict:
        out = {"name": self.name, "max_n": self.max_n, "table": self.table, "d": self.d,
               "d_lower_bound": self.d_lower_bound, "verdict": self.verdict, "notes": self.notes}
        if self.fit is not None:
            f = self.fit
            out["fit"] = {
                "r1": format_rational(f.r1), "r2": format_rational(f.r2),
                "C1": round(math.sqrt(f.c1_sq), 12), "C2": round(math.sqrt(f.c2_sq), 12),
                "C1_squared": format_rational(f.c1_sq), "C2_squared": format_rational(f.c2_sq),
            }
        if self.d > 0 and self.codims and self.codims[-1] > 0:
            out["root"] = round(self.codims[-1] ** (1 / self.max_n), 12)
            out["root_window"] = [float(ROOT_WINDOW[0] * self.d), float(ROOT_WINDOW[1] * self.d)]
        return out


def scaled_sq(c: int, n: int, d: int, twice_r: int) -> Fraction:
    """(c / (n^r d^n))^2 with r = twice_r / 2."""
    return Fraction(c * c) / (Fraction(n) ** twice_r * Fraction(d) ** (2 * n))


def _monotone(values: list[Fraction], increasing: bool) -> bool:
    pairs = zip(values, values[1:])
    return all(b >= a for a, b in pairs) if increasing else all(b <= a for a, b in pairs)


def fit_envelope(codims: list[int], d: int) -> Fit | None:
    """Least r2 with c_n/(n^r2 d^n) non-increasing, greatest r1 with it non-decreasing.

    codims[i] is c_{i+1}; all must be positive and d > 0.
    """
    if d <= 0 or not codims or min(codims) <= 0:
        return None
    ns = range(1, len(codims) + 1)

    def seq(tr):
        return [scaled_sq(c, n, d, tr) for n, c in zip(ns, codims)]

    up = next((tr for tr in range(-MAX_TWICE_R, MAX_TWICE_R + 1)
               if _monotone(seq(tr), increasing=False)), None)
    lo = next((tr for tr in range(MAX_TWICE_R, -MAX_TWICE_R - 1, -1)
               if _monotone(seq(tr), increasing=True)), None)
    if up is None or lo is None:
        return None
    return Fit(lo, min(seq(lo)), up, max(seq(up)))


def brackets(codims: list[int], d: int, fit: Fit) -> bool:
    """Exact check of C1 n^r1 d^n <= c_n <= C2 n^r2 d^n for every computed n."""
    for n, c in enumerate(codims, 1):
        if scaled_sq(c, n, d, fit.twice_r1) < fit.c1_sq:
            return False
        if scaled_sq(c, n, d, fit.twice_r2) > fit.c2_sq:
            return False
    return True


def in_root_window(c: int, n: int, d: int) -> bool:
    lo, hi = ROOT_WINDOW
    return (lo * d) ** n <= c <= (hi * d) ** n


def growth_verdict(codims: list[int], d: int) -> tuple[str, Fit | None, list[str]]:
    notes = []
    if d == 0:
        if len(codims) < 2:
            return FAIL, None, ["need at least two computed codimensions"]
        ok = codims[-1] == 0 and codims[-2] == 0
        if not ok:
            notes.append("d = 0 but the trailing codimensions do not vanish")
        return (PASS if ok else FAIL), None, notes
    if min(codims) < 1:
        return FAIL, None, ["d > 0 but some computed c_n is 0"]
    fit = fit_envelope(codims, d)
    if fit is None:
        return FAIL, None, ["no half-integer exponent within range gives a monotone ratio"]
    if not brackets(codims, d, fit):
        # cannot happen by construction; kept as an independent re-check
        return FAIL, fit, ["fitted envelope does not bracket the data"]
    n = len(codims)
    if not in_root_window(codims[-1], n, d):
        notes.append(f"c_{n}^(1/{n}) outside [{float(ROOT_WINDOW[0] * d)}, "
                     f"{float(ROOT_WINDOW[1] * d)}]")
        return FAIL, fit, notes
    return PASS, fit, notes


def run_growth(spec: RepSpec, max_n: int, options: GrowthOptions | None = None,
               cache: Cache | None = None) -> GrowthReport:
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    opts = options or GrowthOptions()
    st = structures(spec, opts.seed, cache)
    exp = pi_exponent(st.rep, st.env, st.levi, state_cap=opts.state_cap, seed=opts.seed)
    rows = codimensions(spec, st.rep, max_n, opts.method, opts.primes, opts.seed,
                        opts.budget, opts.force, cache)
    table = [{"n": n, "c_n": r.rank, "method": r.method,
              "primes": [str(p) for p in r.primes], "seed": r.seed} for n, r in rows]
    codims = [r.rank for _, r in rows]
    if exp.lower_bound:
        return GrowthReport(spec.name, max_n, table, exp.d, True, None, INCONCLUSIVE,
                            ["exponent search hit its state cap"] + exp.notes)
    verdict, fit, notes = growth_verdict(codims, exp.d)
    return GrowthReport(spec.name, max_n, table, exp.d, False, fit, verdict, exp.notes + notes)
