"""Glue: spec -> rho(L) -> envelope -> Levi data, with optional caching."""

from __future__ import annotations

from dataclasses import dataclass

from .cache import Cache, envelope_from_json, envelope_to_json
from .envelope import Envelope, build_envelope
from .liestruct import LeviData, LinearRep, close_under_bracket, levi_decompose
from .multilin import DEFAULT_CELL_BUDGET, RankResult, codimension_result
from .repspec import RepSpec


@dataclass(frozen=True)
class Structures:
    spec: RepSpec
    rep: LinearRep
    env: Envelope
    levi: LeviData


def structures(spec: RepSpec, seed: int = 0, cache: Cache | None = None) -> Structures:
    rep = close_under_bracket(spec.generators, spec.dim_v)
    kind = f"envelope-s{seed}"
    env = None
    if cache is not None:
        data = cache.load(spec, kind)
        if data is not None:
            env = envelope_from_json(data)
    if env is None:
        env = build_envelope(rep, seed)
        if cache is not None:
            cache.store(spec, kind, envelope_to_json(env))
    return Structures(spec, rep, env, levi_decompose(rep, env))


def codimensions(spec: RepSpec, rep: LinearRep, max_n: int, method: str = "auto",
                 primes: int = 2, seed: int = 0, budget: int = DEFAULT_CELL_BUDGET,
                 force: bool = False, cache: Cache | None = None) -> list[tuple[int, RankResult]]:
    stored = (cache.load(spec, "codim") if cache is not None else None) or {}
    out = []
    dirty = False
    try:
        for n in range(1, max_n + 1):
            key = f"{n}|{method}|{primes}|{seed}"
            if key in stored:
                e = stored[key]
                res = RankResult(e["rank"], e["method"], tuple(e["primes"]), e["seed"])
            else:
                res = codimension_result(rep, n, method, primes, seed, budget, force)
                stored[key] = {"rank": res.rank, "method": res.method,
                               "primes": list(res.primes), "seed": res.seed}
                dirty = True
            out.append((n, res))
    finally:
        # keep whatever was computed before a resource guard tripped
        if dirty and cache is not None:
            cache.store(spec, "codim", stored)
    return out
