"""Reader and writer for ``.sdl`` model files.

An entry looks like the equation listings of Vensim-style models::

    (29) New Processing Rate= (Inductive Bias+Popularity Bias)*"Avg. New Users per. Items"/HCI
    Units: bias/(interactions*Day)
    Optional free-text comment lines.

Entries end at a blank line or at the next ``(NN)`` tag. The expression may
wrap over several lines before the ``Units:`` line. Names containing
``& , ( ) /`` or starting with a digit must be double-quoted.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .errors import ParseError, UnitParseError
from .expr import (
    FUNCTIONS,
    Binary,
    Call,
    Expr,
    NumberLiteral,
    VarRef,
    format_expr,
    format_name,
    format_number,
    normalize_name,
)
from .model import ModelSpec, VariableDef, make_model
from .units import UnitExpr, format_units, parse_units


class Severity(str, enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    span: tuple[int, int]

    def __str__(self):
        a, b = self.span
        where = f"line {a}" if a == b else f"lines {a}-{b}"
        return f"{where}: {self.severity.value}: {self.message}"


@dataclass
class SourceEntry:
    name: str
    raw_expr: str
    raw_units: str
    span: tuple[int, int]
    index: Optional[int] = None
    raw_range: Optional[str] = None
    comment: Optional[str] = None


@dataclass
class ParseResult:
    model: Optional[ModelSpec]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    entries: list[SourceEntry] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return self.model is not None

    def unwrap(self) -> ModelSpec:
        if self.model is None:
            raise ParseError(self.errors)
        return self.model


class _Syntax(Exception):
    pass


_ENTRY_TAG = re.compile(r"^\s*\((\d+)\)\s*(.*)$")
_UNITS_LINE = re.compile(r"^\s*Units\s*:(.*)$", re.IGNORECASE)
_BAD_UNQUOTED = set('&,()/"')


# -- entry splitting ----------------------------------------------------------


def split_entries(source: str) -> tuple[list[SourceEntry], list[Diagnostic]]:
    entries: list[SourceEntry] = []
    diags: list[Diagnostic] = []
    cur: Optional[dict] = None
    state = "idle"

    def start(lineno: int, text: str) -> dict:
        m = _ENTRY_TAG.match(text)
        index = int(m.group(1)) if m else None
        header = m.group(2) if m else text.strip()
        return {"index": index, "header": [header], "start": lineno, "end": lineno,
                "units": None, "doc": []}

    def finish(c: dict) -> None:
        span = (c["start"], c["end"])
        header = " ".join(h.strip() for h in c["header"] if h.strip())
        try:
            name, raw_expr = _split_header(header)
        except _Syntax as exc:
            diags.append(Diagnostic(Severity.ERROR, str(exc), span))
            return
        if c["units"] is None:
            diags.append(Diagnostic(Severity.ERROR, f"{name or '<entry>'}: missing Units line", span))
            return
        raw_units, raw_range = _split_range(c["units"])
        if not raw_units:
            diags.append(Diagnostic(Severity.ERROR, f"{name}: empty Units line", span))
            return
        doc = " ".join(d.strip() for d in c["doc"]) or None
        entries.append(SourceEntry(name=name, raw_expr=raw_expr, raw_units=raw_units, span=span,
                                   index=c["index"], raw_range=raw_range, comment=doc))

    lines = source.splitlines()
    for lineno, text in enumerate(lines, start=1):
        blank = not text.strip()
        tagged = _ENTRY_TAG.match(text) is not None
        units = _UNITS_LINE.match(text)
        if state == "idle":
            if blank:
                continue
            if units:
                diags.append(Diagnostic(Severity.ERROR, "Units line without a preceding equation",
                                        (lineno, lineno)))
                continue
            cur = start(lineno, text)
            state = "expr"
        elif state == "expr":
            if units:
                cur["units"] = units.group(1)
                cur["end"] = lineno
                state = "doc"
            elif tagged:
                finish(cur)
                cur = start(lineno, text)
            elif not blank:
                cur["header"].append(text)
                cur["end"] = lineno
        else:  # doc
            if blank:
                finish(cur)
                cur, state = None, "idle"
            elif tagged:
                finish(cur)
                cur = start(lineno, text)
                state = "expr"
            else:
                cur["doc"].append(text)
                cur["end"] = lineno
    if cur is not None:
        finish(cur)
    return entries, diags


def _split_header(header: str) -> tuple[str, str]:
    if header.count('"') % 2:
        raise _Syntax("unterminated quote")
    in_quote = False
    for i, ch in enumerate(header):
        if ch == '"':
            in_quote = not in_quote
        elif ch == "=" and not in_quote:
            return _parse_name(header[:i]), header[i + 1:].strip()
    raise _Syntax(f"expected '<name> = <expression>', got {header!r}")


def _parse_name(raw: str) -> str:
    raw = raw.strip()
    if not raw:
        raise _Syntax("missing variable name")
    if raw.startswith('"'):
        if not raw.endswith('"') or len(raw) < 2 or '"' in raw[1:-1]:
            raise _Syntax(f"malformed quoted name {raw}")
        name = normalize_name(raw[1:-1])
        if not name:
            raise _Syntax("empty quoted name")
        return name
    if raw[0].isdigit():
        raise _Syntax(f"name {raw!r} starts with a digit and must be quoted")
    bad = sorted(set(raw) & _BAD_UNQUOTED)
    if bad:
        raise _Syntax(f"name {raw!r} contains {''.join(bad)!r} and must be quoted")
    return normalize_name(raw)


def _split_range(units_text: str) -> tuple[str, Optional[str]]:
    text = units_text.strip()
    i = text.find("[")
    if i < 0:
        return text, None
    return text[:i].strip(), text[i:].strip()


def parse_range(raw: Optional[str]) -> Optional[tuple[Optional[float], Optional[float]]]:
    if raw is None:
        return None
    body = raw.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise _Syntax(f"malformed range {raw!r}")
    parts = [p.strip() for p in body[1:-1].split(",")]
    if len(parts) < 2:
        raise _Syntax(f"range needs two bounds: {raw!r}")

    def bound(p: str) -> Optional[float]:
        if p in ("?", ""):
            return None
        try:
            return float(p)
        except ValueError:
            raise _Syntax(f"bad range bound {p!r}") from None

    return bound(parts[0]), bound(parts[1])


# -- expression lexer / parser ------------------------------------------------

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_. ]*")
_FUNC_ALIASES = {"INTEG": "INTEG", "MAX": "MAX", "MIN": "MIN", "RANDOM NORMAL": "RANDOM_NORMAL"}


def _tokenize(text: str) -> list[tuple[str, object]]:
    toks: list[tuple[str, object]] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/(),":
            toks.append(("op" if ch in "+-*/" else ch, ch))
            i += 1
            continue
        if ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise _Syntax("unterminated quote")
            name = normalize_name(text[i + 1:j])
            if not name:
                raise _Syntax("empty quoted name")
            toks.append(("name", name))
            i = j + 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            toks.append(("num", float(m.group())))
            i = m.end()
            continue
        m = _IDENT.match(text, i)
        if m:
            word = normalize_name(m.group())
            i = m.end()
            j = i
            while j < n and text[j].isspace():
                j += 1
            if j < n and text[j] == "(":
                fn = _FUNC_ALIASES.get(word.upper())
                if fn is None:
                    raise _Syntax(f"unknown function {word!r}")
                toks.append(("func", fn))
            else:
                toks.append(("name", word))
            continue
        raise _Syntax(f"unexpected character {ch!r}")
    return toks


class _ExprParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else ("end", None)

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            found = "end of expression" if tok[0] == "end" else repr(tok[1])
            raise _Syntax(f"expected {kind!r}, found {found}")
        self.pos += 1
        return tok

    def parse(self) -> Expr:
        if not self.toks:
            raise _Syntax("empty expression")
        e = self.expr()
        if self.pos != len(self.toks):
            raise _Syntax(f"unexpected {self.toks[self.pos][1]!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take("op")[1]
            e = Binary(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take("op")[1]
            e = Binary(op, e, self.factor())
        return e

    def factor(self) -> Expr:
        tok = self.peek()
        if tok == ("op", "-"):
            self.pos += 1
            inner = self.factor()
            if isinstance(inner, NumberLiteral):
                return NumberLiteral(-inner.value)
            return Binary("-", NumberLiteral(0.0), inner)
        if tok == ("op", "+"):
            self.pos += 1
            return self.factor()
        return self.primary()

    def primary(self) -> Expr:
        kind, value = self.peek()
        if kind == "num":
            self.pos += 1
            return NumberLiteral(value)
        if kind == "name":
            self.pos += 1
            return VarRef(value)
        if kind == "(":
            self.pos += 1
            e = self.expr()
            self.take(")")
            return e
        if kind == "func":
            self.pos += 1
            self.take("(")
            args = [self.expr()]
            while self.peek()[0] == ",":
                self.pos += 1
                args.append(self.expr())
            self.take(")")
            want = FUNCTIONS[value]
            if len(args) != want:
                raise _Syntax(f"arity mismatch: {value.replace('_', ' ')} takes {want} arguments, got {len(args)}")
            return Call(value, tuple(args))
        if kind == "end":
            raise _Syntax("unexpected end of expression")
        raise _Syntax(f"unexpected {value!r}")


def parse_expr(text: str) -> Expr:
    """Parse a single expression; raises ``ValueError`` on bad input."""
    try:
        return _ExprParser(text).parse()
    except _Syntax as exc:
        raise ValueError(str(exc)) from None


# -- model ------------------------------------------------------------------


def parse_model(source: str) -> ParseResult:
    """Parse SDL text. ``result.model`` is None when any error diagnostic was raised."""
    entries, diags = split_entries(source)
    defs: list[VariableDef] = []
    seen: dict[str, tuple[int, int]] = {}
    for entry in entries:
        try:
            expr = _ExprParser(entry.raw_expr).parse()
            rng = parse_range(entry.raw_range)
        except _Syntax as exc:
            diags.append(Diagnostic(Severity.ERROR, f"{entry.name}: {exc}", entry.span))
            continue
        try:
            units = parse_units(entry.raw_units)
        except UnitParseError as exc:
            diags.append(Diagnostic(Severity.ERROR, f"{entry.name}: {exc}", entry.span))
            continue
        if entry.name in seen:
            first = seen[entry.name][0]
            diags.append(Diagnostic(Severity.ERROR,
                                    f"duplicate name {entry.name!r} (first defined on line {first})",
                                    entry.span))
            continue
        seen[entry.name] = entry.span
        defs.append(VariableDef(name=entry.name, expr=expr, units=units, range=rng,
                                doc=entry.comment, index=entry.index, span=entry.span))
    if not entries and not diags:
        diags.append(Diagnostic(Severity.WARNING, "no entries", (0, 0)))
    diags.sort(key=lambda d: d.span)
    if any(d.severity is Severity.ERROR for d in diags):
        return ParseResult(None, diags, entries)
    try:
        model = make_model(defs)
    except Exception as exc:  # control entries that do not evaluate
        last = max((e.span[1] for e in entries), default=0)
        diags.append(Diagnostic(Severity.ERROR, str(exc), (1, last)))
        return ParseResult(None, diags, entries)
    return ParseResult(model, diags, entries)


def load_model(path) -> ModelSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read()).unwrap()


def _format_range(rng) -> str:
    lo, hi = rng
    fmt = lambda b: "?" if b is None else format_number(b)  # noqa: E731
    return f"[{fmt(lo)},{fmt(hi)}]"


def serialize(spec: ModelSpec) -> str:
    """Canonical SDL text; entries renumbered from 1 in model order."""
    out: list[str] = []
    for i, var in enumerate(spec.variables, start=1):
        out.append(f"({i:02d}) {format_name(var.name)} = {format_expr(var.expr)}")
        units = f"Units: {format_units(var.units)}"
        if var.range is not None:
            units += f" {_format_range(var.range)}"
        out.append(units)
        if var.doc:
            out.append(var.doc)
        out.append("")
    return "\n".join(out)


# -- JSON rendering -----------------------------------------------------------


def expr_to_json(e: Expr) -> dict:
    if isinstance(e, NumberLiteral):
        return {"type": "number", "value": e.value}
    if isinstance(e, VarRef):
        return {"type": "ref", "name": e.name}
    if isinstance(e, Binary):
        return {"type": "binary", "op": e.op, "left": expr_to_json(e.left), "right": expr_to_json(e.right)}
    if isinstance(e, Call):
        return {"type": "call", "function": e.function, "args": [expr_to_json(a) for a in e.args]}
    raise TypeError(e)


def expr_from_json(d: dict) -> Expr:
    t = d["type"]
    if t == "number":
        return NumberLiteral(d["value"])
    if t == "ref":
        return VarRef(d["name"])
    if t == "binary":
        return Binary(d["op"], expr_from_json(d["left"]), expr_from_json(d["right"]))
    if t == "call":
        return Call(d["function"], tuple(expr_from_json(a) for a in d["args"]))
    raise ValueError(f"unknown node type {t!r}")


def model_to_json(spec: ModelSpec) -> dict:
    return {
        "schema": "sdsim.model/1",
        "control": spec.control.as_dict(),
        "variables": [
            {
                "name": v.name,
                "kind": v.kind.value,
                "index": v.index,
                "units": v.units.exponents,
                "units_text": format_units(v.units),
                "range": list(v.range) if v.range is not None else None,
                "doc": v.doc,
                "expr": expr_to_json(v.expr),
            }
            for v in spec.variables
        ],
    }


def model_from_json(d: dict) -> ModelSpec:
    return make_model(
        VariableDef(
            name=v["name"],
            expr=expr_from_json(v["expr"]),
            units=UnitExpr(v["units"]),
            range=tuple(v["range"]) if v.get("range") is not None else None,
            doc=v.get("doc"),
            index=v.get("index"),
        )
        for v in d["variables"]
    )


def dumps_json(spec: ModelSpec) -> str:
    return json.dumps(model_to_json(spec), indent=2) + "\n"
