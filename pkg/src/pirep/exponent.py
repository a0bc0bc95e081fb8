"""The PI-exponent d(rho): a search over chains of composition factors of A
whose G-invariant complements can be multiplied together without vanishing."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .envelope import Envelope, annihilator_in_rho
from .exactalg import Subspace
from .liestruct import LeviData, LinearRep, invariant_projection, projection_kernel
from .matalg import identity_vec, mul

DEFAULT_STATE_CAP = 10**5
ALTERNATIVE_TRIALS = 3


class ComplementError(RuntimeError):
    pass


@dataclass(frozen=True)
class FactorChoice:
    k: int
    ideal_pair: tuple[Subspace, Subspace]
    complement: Subspace
    ann: Subspace
    kind: str


@dataclass
class ExponentResult:
    d: int
    witness: list[FactorChoice]
    final_ann: Subspace
    visited: int
    lower_bound: bool = False
    complement_disagreement: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def witness_indices(self) -> list[int]:
        return [c.k for c in self.witness]


def _left_mult(n: int):
    return lambda g, b: mul(g, b, n)


def _complement_data(env: Envelope, levi: LeviData, k: int):
    if not 0 <= k < env.theta:
        raise IndexError(f"chain index {k} outside 0..{env.theta - 1}")
    bk, bk1 = env.chain[k], env.chain[k + 1]
    proj, homogeneous = invariant_projection(bk, bk1, levi.g.vectors(), _left_mult(env.dim_v))
    if proj is None:
        raise ComplementError(f"no G-invariant complement of B_{k + 1} in B_{k}")
    return bk, bk1, proj, homogeneous


def invariant_complement(env: Envelope, levi: LeviData, k: int) -> Subspace:
    """G-invariant T with B_k = B_{k+1} + T (direct), from the canonical solve."""
    bk, bk1, proj, _ = _complement_data(env, levi, k)
    return projection_kernel(bk, bk1, proj, env.dim_v)


def alternative_complements(env: Envelope, levi: LeviData, k: int, count: int,
                            rng: random.Random) -> list[Subspace]:
    """Random G-invariant complements other than the canonical one (empty if unique)."""
    bk, bk1, proj, homogeneous = _complement_data(env, levi, k)
    if not homogeneous:
        return []
    out = []
    for _ in range(count):
        coeffs = [Fraction(rng.randint(-3, 3)) for _ in homogeneous]
        p = [[proj[a][b] + sum((c * h[a][b] for c, h in zip(coeffs, homogeneous)), Fraction(0))
              for b in range(len(proj[a]))] for a in range(len(proj))]
        out.append(projection_kernel(bk, bk1, p, env.dim_v))
    return out


def _step(w: Subspace, t: Subspace, qs: Sequence, n: int) -> Subspace:
    """span{x q y : x in W, q in basis(A) + {1}, y in T}."""
    prods = []
    for x in w.vectors():
        for q in qs:
            xq = mul(x, q, n)
            if any(xq):
                for y in t.vectors():
                    prods.append(mul(xq, y, n))
    return Subspace.span(prods, n * n)


def _connectors(env: Envelope) -> list:
    return env.space.vectors() + [identity_vec(env.dim_v)]


def reachable_span(env: Envelope, complements: Sequence[Subspace]) -> Subspace:
    qs = _connectors(env)
    w = complements[0]
    for t in complements[1:]:
        if not w.dim:
            break
        w = _step(w, t, qs, env.dim_v)
    return w


def condition2_reachable(env: Envelope, choices: Sequence[FactorChoice]) -> bool:
    """True iff T_1 q_1 T_2 ... q_{r-1} T_r != 0 for some q_i in A + {1}."""
    if not choices:
        raise ValueError("need at least one factor")
    return reachable_span(env, [c.complement for c in choices]).dim > 0


def factor_choices(rep: LinearRep, env: Envelope, levi: LeviData) -> list[FactorChoice]:
    return [FactorChoice(k, (env.chain[k], env.chain[k + 1]),
                         invariant_complement(env, levi, k),
                         annihilator_in_rho(rep, env, k), env.factor_kind[k])
            for k in range(env.theta)]


def _key(w: Subspace, nsp: Subspace) -> tuple:
    return (w.basis.rows, w.basis.entries, nsp.basis.rows, nsp.basis.entries)


def pi_exponent(rep: LinearRep, env: Envelope, levi: LeviData,
                state_cap: int = DEFAULT_STATE_CAP, seed: int = 0,
                check_alternatives: bool = True) -> ExponentResult:
    dim_l = rep.dim_l
    choices = factor_choices(rep, env, levi)
    n = env.dim_v
    full = rep.space
    if not choices:
        return ExponentResult(0, [], full, 0)
    qs = _connectors(env)
    seen: set = set()
    queue: deque = deque()
    best_path: list[int] = []
    best_n = full
    best_d = -1
    capped = False

    def push(w, nsp, path):
        nonlocal capped
        key = _key(w, nsp)
        if key in seen:
            return
        if len(seen) >= state_cap:
            capped = True
            return
        seen.add(key)
        queue.append((w, nsp, path))

    for c in choices:
        if c.complement.dim:
            push(c.complement, c.ann, [c.k])
    while queue:
        w, nsp, path = queue.popleft()
        d_here = dim_l - nsp.dim
        if d_here > best_d:
            best_d, best_path, best_n = d_here, path, nsp
        for c in choices:
            w2 = _step(w, c.complement, qs, n)
            if w2.dim:
                push(w2, nsp.intersect(c.ann), path + [c.k])
    if best_d < 0:
        return ExponentResult(0, [], full, len(seen), lower_bound=capped)
    witness = [choices[k] for k in best_path]
    result = ExponentResult(best_d, witness, best_n, len(seen), lower_bound=capped)
    if capped:
        result.notes.append(f"state cap {state_cap} reached; d is a lower bound")
    if check_alternatives:
        rng = random.Random(seed)
        for trial in range(ALTERNATIVE_TRIALS):
            alts = []
            varied = False
            for c in witness:
                alt = alternative_complements(env, levi, c.k, 1, rng)
                if alt:
                    varied = True
                alts.append(alt[0] if alt else c.complement)
            if not varied:
                break
            if reachable_span(env, alts).dim == 0:
                result.complement_disagreement = True
                result.notes.append(
                    f"witness {result.witness_indices} vanishes for an alternative "
                    f"G-invariant complement (trial {trial})")
    return result
