"""TOML representation specs: parsing and canonical formatting."""

from __future__ import annotations

import hashlib
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .exactalg import RatMatrix

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")

DATA_DIR = Path(__file__).parent / "data"


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class RepSpec:
    name: str
    dim_v: int
    generators: tuple[RatMatrix, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dim_v": self.dim_v,
            "generators": [[[format_rational(g[i, j]) for j in range(self.dim_v)]
                            for i in range(self.dim_v)] for g in self.generators],
        }

    def content_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _line_of(text: str, token: str) -> int | None:
    for lineno, line in enumerate(text.splitlines(), 1):
        if token in line:
            return lineno
    return None


def parse_rational(value, where: str, text: str = "") -> Fraction:
    if isinstance(value, bool):
        raise SpecError(f"{where}: boolean is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        num, _, den = value.replace(" ", "").partition("/")
        if den and int(den) == 0:
            raise SpecError(f"{where}: zero denominator in {value!r}")
        return Fraction(int(num), int(den) if den else 1)
    token = repr(value) if not isinstance(value, str) else f'"{value}"'
    line = _line_of(text, token if isinstance(value, str) else str(value))
    at = f" (line {line})" if line else ""
    kind = "float" if isinstance(value, float) else "malformed rational"
    raise SpecError(f"{where}{at}: {kind} {token}; use integers or \"p/q\" strings")


def parse_spec_text(text: str, source: str = "<string>") -> RepSpec:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SpecError(f"{source}: {exc}") from exc
    name = data.get("name", Path(source).stem)
    if "dim_v" not in data:
        raise SpecError(f"{source}: missing dim_v")
    dim_v = data["dim_v"]
    if not isinstance(dim_v, int) or isinstance(dim_v, bool) or dim_v < 1:
        raise SpecError(f"{source}: dim_v must be a positive integer, got {dim_v!r}")
    gens_raw = data.get("generators", [])
    if not isinstance(gens_raw, list):
        raise SpecError(f"{source}: generators must be a list of matrices")
    gens = []
    for g, mat in enumerate(gens_raw):
        where = f"{source}: generator {g}"
        if not isinstance(mat, list) or len(mat) != dim_v:
            raise SpecError(f"{where}: expected {dim_v} rows, got "
                            f"{len(mat) if isinstance(mat, list) else type(mat).__name__}")
        rows = []
        for i, row in enumerate(mat):
            if not isinstance(row, list) or len(row) != dim_v:
                raise SpecError(f"{where}, row {i}: expected {dim_v} entries (ragged matrix)")
            rows.append([parse_rational(x, f"{where}, row {i}, column {j}", text)
                         for j, x in enumerate(row)])
        gens.append(RatMatrix.from_rows(rows))
    return RepSpec(str(name), dim_v, tuple(gens))


def parse_spec(path) -> RepSpec:
    path = Path(path)
    if not path.exists() and (DATA_DIR / path).exists():
        path = DATA_DIR / path
    if not path.exists() and (DATA_DIR / f"{path}.toml").exists():
        path = DATA_DIR / f"{path}.toml"
    return parse_spec_text(path.read_text(), str(path))


def bundled_names() -> list[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.toml"))
