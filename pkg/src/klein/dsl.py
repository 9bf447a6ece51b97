"""Line-oriented potential descriptions.

::

    # Sauter-like ramp between two plateaus
    mass 1
    left 0
    right 10
    segment -1 0 0.5
    ramp 0 20 0.5 10 200

``segment x0 x1 V`` is a flat piece and ``ramp x0 x1 V0 V1 n`` expands to
``n`` flat pieces sampling the ramp at their midpoints.  Pieces must be
listed left to right and touch end to start.  ``#`` starts a comment.  The
same content is accepted as JSON::

    {"mass": 1, "left": 0, "right": 10,
     "pieces": [["segment", -1, 0, 0.5], ["ramp", 0, 20, 0.5, 10, 200]]}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError, PotentialSyntaxError
from .transfer import PotentialProfile, Segment, build_profile, staircase

_ARITY = {"mass": 1, "left": 1, "right": 1, "segment": 3, "ramp": 5}


@dataclass(frozen=True)
class Piece:
    kind: str
    values: tuple[float, ...]
    line: int = 0

    def expand(self) -> list[Segment]:
        if self.kind == "segment":
            return [Segment(*self.values)]
        x0, x1, V0, V1, n = self.values
        return staircase(x0, x1, V0, V1, int(n))


@dataclass(frozen=True)
class PotentialDocument:
    left: float
    right: float
    mass: float = 1.0
    pieces: tuple[Piece, ...] = field(default_factory=tuple)

    def profile(self) -> PotentialProfile:
        segs = [s for p in self.pieces for s in p.expand()]
        return build_profile(self.left, self.right, segs, self.mass)


def _number(tok: str, line: int, col: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise PotentialSyntaxError(f"'{tok}' is not a number", line, col) from None
    if not math.isfinite(val):
        raise PotentialSyntaxError(f"'{tok}' is not finite", line, col)
    return val


def _check_piece(kind: str, vals: list[float], prev_end: float | None, fail) -> None:
    x0, x1 = vals[0], vals[1]
    if not x1 > x0:
        fail(f"{kind} is empty or reversed ({x0} >= {x1})", 2)
    if kind == "ramp":
        n = vals[4]
        if n != int(n) or n < 1:
            fail(f"ramp step count must be a positive integer, got {n}", 5)
    if prev_end is not None:
        if x0 < prev_end:
            fail(f"{kind} overlaps previous", 1)
        if x0 > prev_end:
            fail(f"{kind} leaves a gap after previous (starts at {x0}, previous ends at {prev_end})", 1)


def _assemble(scalars: dict[str, float], pieces: list[Piece], fail_missing) -> PotentialDocument:
    for key in ("left", "right"):
        if key not in scalars:
            fail_missing(f"missing '{key}' directive")
    doc = PotentialDocument(scalars["left"], scalars["right"], scalars.get("mass", 1.0), tuple(pieces))
    doc.profile()  # surfaces mass and expansion errors now
    return doc


def parse_potential(text: str) -> PotentialDocument:
    """Parse the text form; errors carry 1-based line and column."""
    if text.lstrip().startswith("{"):
        return parse_potential_json(text)
    scalars: dict[str, float] = {}
    seen_line: dict[str, int] = {}
    pieces: list[Piece] = []
    prev_end = None
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body = raw.split("#", 1)[0]
        toks, cols = [], []
        pos = 0
        for tok in body.split():
            pos = body.index(tok, pos)
            toks.append(tok)
            cols.append(pos + 1)
            pos += len(tok)
        if not toks:
            continue
        kind = toks[0].lower()
        if kind not in _ARITY:
            raise PotentialSyntaxError(f"unknown directive '{toks[0]}'", lineno, cols[0])
        if len(toks) - 1 != _ARITY[kind]:
            raise PotentialSyntaxError(
                f"'{kind}' takes {_ARITY[kind]} value(s), got {len(toks) - 1}", lineno, cols[0])
        vals = [_number(t, lineno, c) for t, c in zip(toks[1:], cols[1:])]
        if kind in ("mass", "left", "right"):
            if kind in scalars:
                raise PotentialSyntaxError(
                    f"duplicate '{kind}' directive (first on line {seen_line[kind]})", lineno, cols[0])
            if kind == "mass" and not vals[0] > 0:
                raise PotentialSyntaxError(f"mass must be positive, got {vals[0]}", lineno, cols[1])
            scalars[kind] = vals[0]
            seen_line[kind] = lineno
            continue

        def fail(msg: str, arg: int, _ln=lineno, _cols=cols):
            raise PotentialSyntaxError(msg, _ln, _cols[arg])

        _check_piece(kind, vals, prev_end, fail)
        pieces.append(Piece(kind, tuple(vals), lineno))
        prev_end = vals[1]

    def missing(msg: str):
        raise PotentialSyntaxError(msg, max(last_line, 1), 1)

    return _assemble(scalars, pieces, missing)


def parse_potential_json(text: str) -> PotentialDocument:
    """JSON form; structural errors are reported by entry number."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PotentialSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise DomainError("potential JSON must be an object")
    unknown = set(data) - {"mass", "left", "right", "pieces"}
    if unknown:
        raise DomainError(f"unknown key(s) {sorted(unknown)}")
    scalars = {}
    for key in ("mass", "left", "right"):
        if key in data:
            val = data[key]
            if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
                raise DomainError(f"'{key}' must be a finite number, got {val!r}")
            scalars[key] = float(val)
    if "mass" in scalars and not scalars["mass"] > 0:
        raise DomainError(f"mass must be positive, got {scalars['mass']}")
    pieces = []
    prev_end = None
    for i, entry in enumerate(data.get("pieces", []), start=1):
        if not isinstance(entry, list) or not entry or entry[0] not in ("segment", "ramp"):
            raise DomainError(f"entry {i}: expected ['segment', ...] or ['ramp', ...]")
        kind = entry[0]
        if len(entry) - 1 != _ARITY[kind]:
            raise DomainError(f"entry {i}: '{kind}' takes {_ARITY[kind]} value(s), got {len(entry) - 1}")
        vals = []
        for v in entry[1:]:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"entry {i}: {v!r} is not a finite number")
            vals.append(float(v))

        def fail(msg: str, arg: int, _i=i):
            raise DomainError(f"entry {_i}: {msg}")

        _check_piece(kind, vals, prev_end, fail)
        pieces.append(Piece(kind, tuple(vals), i))
        prev_end = vals[1]

    def missing(msg: str):
        raise DomainError(msg)

    return _assemble(scalars, pieces, missing)


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_potential(doc: PotentialDocument) -> str:
    """Text form of ``doc``; numbers are written so they parse back exactly."""
    lines = [f"mass {_fmt(doc.mass)}", f"left {_fmt(doc.left)}", f"right {_fmt(doc.right)}"]
    for p in doc.pieces:
        lines.append(" ".join([p.kind] + [_fmt(v) for v in p.values]))
    return "\n".join(lines) + "\n"


def format_potential_json(doc: PotentialDocument) -> str:
    pieces = [[p.kind] + [int(v) if p.kind == "ramp" and i == 4 else v for i, v in enumerate(p.values)]
              for p in doc.pieces]
    return json.dumps({"mass": doc.mass, "left": doc.left, "right": doc.right, "pieces": pieces}) + "\n"


def load_potential(path: str) -> PotentialDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_potential(fh.read())
