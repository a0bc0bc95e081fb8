"""On-disk JSON cache for envelopes and codimensions, keyed by spec content hash."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .envelope import Envelope
from .exactalg import Subspace
from .repspec import RepSpec, format_rational, parse_rational

DEFAULT_DIR = ".pi-cache"


def cache_dir() -> Path:
    return Path(os.environ.get("PI_CACHE_DIR", DEFAULT_DIR))


def threads() -> int:
    raw = os.environ.get("PI_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class Cache:
    def __init__(self, root: Path | str | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else cache_dir()
        self.enabled = enabled

    def path(self, spec: RepSpec, kind: str) -> Path:
        return self.root / f"{spec.content_hash()[:32]}-{__version__}-{kind}.json"

    def load(self, spec: RepSpec, kind: str) -> dict | None:
        if not self.enabled:
            return None
        p = self.path(spec, kind)
        if not p.exists():
            return None
        try:
            data = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError):
            return None
        if data.get("hash") != spec.content_hash() or data.get("version") != __version__:
            return None
        return data["payload"]

    def store(self, spec: RepSpec, kind: str, payload: dict) -> None:
        if not self.enabled:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        blob = json.dumps({"hash": spec.content_hash(), "version": __version__,
                           "payload": payload}, sort_keys=True, indent=1)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(blob)
            os.replace(tmp, self.path(spec, kind))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def subspace_to_json(s: Subspace) -> dict:
    return {"ambient": s.ambient_dim,
            "basis": [[format_rational(x) for x in v] for v in s.vectors()]}


def subspace_from_json(d: dict) -> Subspace:
    vecs = [[parse_rational(x, "cache") for x in v] for v in d["basis"]]
    return Subspace.span(vecs, d["ambient"])


def envelope_to_json(env: Envelope) -> dict:
    return {
        "dim_v": env.dim_v,
        "space": subspace_to_json(env.space),
        "radical": subspace_to_json(env.radical),
        "p": env.p,
        "chain": [subspace_to_json(c) for c in env.chain],
        "factor_kind": list(env.factor_kind),
        "seed": env.seed,
    }


def envelope_from_json(d: dict) -> Envelope:
    return Envelope(dim_v=d["dim_v"], space=subspace_from_json(d["space"]),
                    radical=subspace_from_json(d["radical"]), p=d["p"],
                    chain=tuple(subspace_from_json(c) for c in d["chain"]),
                    factor_kind=tuple(d["factor_kind"]), seed=d["seed"])
