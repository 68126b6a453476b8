"""Line-oriented text format for network models and filter sets.

Model files::

    PROPERTY  P001 "description"
    CONTAINER C001 "description"
    FACT      F001 OWNER C001 [PROP P001] VALUE true "description"
    LINK      L001 FROM C001 TO C002 "description"
    BILINK    L001 L002 BETWEEN C001 C002 "description"
    RULE      R001 "description"
      PRE  START P001 true
      PRE  END   P002 false
      POST END   P002 true
    END

Filter files::

    FILTER C002
      REQUIRE P002 true
    END

``#`` starts a comment line; blank lines are ignored. Descriptions are
double-quoted with ``\\"``, ``\\\\`` and ``\\n`` escapes and may be omitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .filters import Filter
from .model import (
    CommonProperty,
    Condition,
    Container,
    EntityId,
    Fact,
    GenericRule,
    Kind,
    Link,
    NetworkModel,
    validate_model,
)

__all__ = ["Diagnostic", "ParseError", "parse_model", "serialize_model", "parse_filters", "serialize_filters"]


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"


class ParseError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


class _Syntax(Exception):
    def __init__(self, column: int, message: str):
        self.column = column
        self.message = message


@dataclass
class _Tok:
    text: str
    col: int  # 1-based
    quoted: bool = False


def _tokenize(line: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch in " \t\r":
            i += 1
        elif ch == '"':
            start = i
            i += 1
            buf: list[str] = []
            while True:
                if i >= n:
                    raise _Syntax(start + 1, "unterminated string")
                ch = line[i]
                if ch == "\\":
                    if i + 1 >= n or line[i + 1] not in '"\\n':
                        raise _Syntax(i + 1, 'bad escape, expected \\", \\\\ or \\n')
                    buf.append("\n" if line[i + 1] == "n" else line[i + 1])
                    i += 2
                elif ch == '"':
                    i += 1
                    break
                else:
                    buf.append(ch)
                    i += 1
            toks.append(_Tok("".join(buf), start + 1, quoted=True))
        else:
            start = i
            while i < n and line[i] not in ' \t\r"':
                i += 1
            toks.append(_Tok(line[start:i], start + 1))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], line_len: int):
        self.toks = toks
        self.pos = 0
        self.end_col = line_len + 1

    def _col(self) -> int:
        return self.toks[self.pos].col if self.pos < len(self.toks) else self.end_col

    def word(self, expected: str) -> _Tok:
        if self.pos >= len(self.toks) or self.toks[self.pos].quoted:
            raise _Syntax(self._col(), f"expected {expected}")
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def keyword(self, kw: str) -> None:
        tok = self.word(kw)
        if tok.text != kw:
            raise _Syntax(tok.col, f"expected {kw}, got {tok.text!r}")

    def peek_keyword(self, kw: str) -> bool:
        return self.pos < len(self.toks) and not self.toks[self.pos].quoted and self.toks[self.pos].text == kw

    def ident(self, kind: Kind) -> EntityId:
        tok = self.word(f"{kind.name.lower()} id")
        try:
            return EntityId.parse(tok.text, kind)
        except ValueError as exc:
            raise _Syntax(tok.col, f"expected {kind.name.lower()} id: {exc}") from None

    def boolean(self) -> bool:
        tok = self.word("true|false")
        if tok.text not in ("true", "false"):
            raise _Syntax(tok.col, f"expected true|false, got {tok.text!r}")
        return tok.text == "true"

    def description(self) -> str:
        if self.pos < len(self.toks) and self.toks[self.pos].quoted:
            self.pos += 1
            return self.toks[self.pos - 1].text
        return ""

    def done(self) -> None:
        if self.pos < len(self.toks):
            raise _Syntax(self.toks[self.pos].col, f"unexpected {self.toks[self.pos].text!r}, expected end of line")


def _lines(text: str | bytes) -> tuple[list[str], list[Diagnostic]]:
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = text[: exc.start].count(b"\n") + 1
            return [], [Diagnostic(line, 1, f"undecodable byte at offset {exc.start}")]
    return text.split("\n"), []


@dataclass
class _Rule:
    id: EntityId
    description: str
    line: int
    conds: dict[str, list[Condition]] = field(
        default_factory=lambda: {"start_pre": [], "end_pre": [], "start_post": [], "end_post": []}
    )


def parse_model(text: str | bytes) -> NetworkModel:
    """Parse and validate a model document. Raises ParseError with line-numbered diagnostics."""
    lines, diags = _lines(text)
    if diags:
        raise ParseError(diags)

    props: list[CommonProperty] = []
    containers: dict[EntityId, str] = {}
    facts: list[Fact] = []
    links: list[Link] = []
    rules: list[GenericRule] = []
    where: dict[EntityId, int] = {}
    rule: _Rule | None = None

    def declare(eid: EntityId, lineno: int, col: int) -> None:
        if eid in where:
            raise _Syntax(col, f"duplicate id {eid} (first defined on line {where[eid]})")
        where[eid] = lineno

    for lineno, raw in enumerate(lines, 1):
        try:
            toks = _tokenize(raw)
            if not toks or (not toks[0].quoted and toks[0].text.startswith("#")):
                continue
            cur = _Cursor(toks, len(raw))
            head = cur.word("directive")
            if rule is not None:
                if head.text == "END":
                    cur.done()
                    rules.append(GenericRule(rule.id, rule.description, *(tuple(v) for v in rule.conds.values())))
                    rule = None
                elif head.text in ("PRE", "POST"):
                    side = cur.word("START|END")
                    if side.text not in ("START", "END"):
                        raise _Syntax(side.col, f"expected START|END, got {side.text!r}")
                    cond = Condition(cur.ident(Kind.PROPERTY), cur.boolean())
                    cur.done()
                    rule.conds[f"{side.text.lower()}_{head.text.lower()}"].append(cond)
                else:
                    raise _Syntax(head.col, f"expected PRE, POST or END inside RULE, got {head.text!r}")
                continue

            if head.text == "PROPERTY":
                pid = cur.ident(Kind.PROPERTY)
                desc = cur.description()
                cur.done()
                declare(pid, lineno, head.col)
                props.append(CommonProperty(pid, desc))
            elif head.text == "CONTAINER":
                cid = cur.ident(Kind.CONTAINER)
                desc = cur.description()
                cur.done()
                declare(cid, lineno, head.col)
                containers[cid] = desc
            elif head.text == "FACT":
                fid = cur.ident(Kind.FACT)
                cur.keyword("OWNER")
                owner = cur.ident(Kind.CONTAINER)
                prop = None
                if cur.peek_keyword("PROP"):
                    cur.keyword("PROP")
                    prop = cur.ident(Kind.PROPERTY)
                cur.keyword("VALUE")
                value = cur.boolean()
                desc = cur.description()
                cur.done()
                declare(fid, lineno, head.col)
                facts.append(Fact(fid, owner, prop, value, desc))
            elif head.text == "LINK":
                lid = cur.ident(Kind.LINK)
                cur.keyword("FROM")
                src = cur.ident(Kind.CONTAINER)
                cur.keyword("TO")
                dst = cur.ident(Kind.CONTAINER)
                desc = cur.description()
                cur.done()
                declare(lid, lineno, head.col)
                links.append(Link(lid, src, dst, desc))
            elif head.text == "BILINK":
                fwd = cur.ident(Kind.LINK)
                back = cur.ident(Kind.LINK)
                cur.keyword("BETWEEN")
                a = cur.ident(Kind.CONTAINER)
                b = cur.ident(Kind.CONTAINER)
                desc = cur.description()
                cur.done()
                declare(fwd, lineno, head.col)
                declare(back, lineno, head.col)
                links.append(Link(fwd, a, b, desc))
                links.append(Link(back, b, a, desc))
            elif head.text == "RULE":
                rid = cur.ident(Kind.RULE)
                desc = cur.description()
                cur.done()
                declare(rid, lineno, head.col)
                rule = _Rule(rid, desc, lineno)
            else:
                raise _Syntax(head.col, f"unknown directive {head.text!r}")
        except _Syntax as exc:
            diags.append(Diagnostic(lineno, exc.column, exc.message))

    if rule is not None:
        diags.append(Diagnostic(rule.line, 1, f"RULE {rule.id} is missing END"))
    if diags:
        raise ParseError(diags)

    by_owner: dict[EntityId, list[EntityId]] = {cid: [] for cid in containers}
    for fact in facts:
        if fact.owner in by_owner:
            by_owner[fact.owner].append(fact.id)
    model = NetworkModel.build(
        props,
        [Container(cid, desc, tuple(by_owner[cid])) for cid, desc in containers.items()],
        facts,
        links,
        rules,
    )
    report = validate_model(model)
    if not report.ok:
        raise ParseError(
            [Diagnostic(where.get(i.entity, 0), 1, str(i)) for i in report.errors]
        )
    return model


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _b(value: bool) -> str:
    return "true" if value else "false"


def serialize_model(model: NetworkModel) -> str:
    """Canonical text: entities grouped by kind in id order, one directive per line.

    Facts are grouped by owning container (container id order) and keep each
    container's fact order, which parsing relies on to rebuild fact lists.
    """
    out: list[str] = []
    for p in model.properties.values():
        out.append(f"PROPERTY {p.id} {_quote(p.description)}")
    for c in model.containers.values():
        out.append(f"CONTAINER {c.id} {_quote(c.description)}")
    for c in model.containers.values():
        for fid in c.facts:
            f = model.facts[fid]
            prop = f" PROP {f.property}" if f.property is not None else ""
            out.append(f"FACT {f.id} OWNER {f.owner}{prop} VALUE {_b(f.initial_value)} {_quote(f.description)}")
    for link in model.links.values():
        out.append(f"LINK {link.id} FROM {link.source} TO {link.destination} {_quote(link.description)}")
    for r in model.rules.values():
        out.append(f"RULE {r.id} {_quote(r.description)}")
        for tag, conds in (
            ("PRE START", r.start_pre),
            ("PRE END", r.end_pre),
            ("POST START", r.start_post),
            ("POST END", r.end_post),
        ):
            for cond in conds:
                out.append(f"  {tag} {cond.property} {_b(cond.value)}")
        out.append("END")
    return "".join(line + "\n" for line in out)


def parse_filters(text: str | bytes) -> list[Filter]:
    """Parse a filter file. Ids are checked against a model separately (filters.check_filters)."""
    lines, diags = _lines(text)
    if diags:
        raise ParseError(diags)
    filters: list[Filter] = []
    seen: dict[EntityId, int] = {}
    current: tuple[EntityId, int, list[tuple[EntityId, bool]]] | None = None

    for lineno, raw in enumerate(lines, 1):
        try:
            toks = _tokenize(raw)
            if not toks or (not toks[0].quoted and toks[0].text.startswith("#")):
                continue
            cur = _Cursor(toks, len(raw))
            head = cur.word("directive")
            if current is None:
                if head.text != "FILTER":
                    raise _Syntax(head.col, f"expected FILTER, got {head.text!r}")
                cid = cur.ident(Kind.CONTAINER)
                cur.done()
                if cid in seen:
                    raise _Syntax(
                        head.col, f"container referenced by multiple filters: {cid} (first on line {seen[cid]})"
                    )
                seen[cid] = lineno
                current = (cid, lineno, [])
            elif head.text == "REQUIRE":
                pid = cur.ident(Kind.PROPERTY)
                value = cur.boolean()
                cur.done()
                if any(p == pid for p, _ in current[2]):
                    raise _Syntax(head.col, f"property {pid} constrained twice in one filter")
                current[2].append((pid, value))
            elif head.text == "END":
                cur.done()
                filters.append(Filter(current[0], tuple(current[2])))
                current = None
            else:
                raise _Syntax(head.col, f"expected REQUIRE or END, got {head.text!r}")
        except _Syntax as exc:
            diags.append(Diagnostic(lineno, exc.column, exc.message))

    if current is not None:
        diags.append(Diagnostic(current[1], 1, f"FILTER {current[0]} is missing END"))
    if diags:
        raise ParseError(diags)
    return filters


def serialize_filters(filters: list[Filter]) -> str:
    out: list[str] = []
    for flt in filters:
        out.append(f"FILTER {flt.container}")
        out.extend(f"  REQUIRE {pid} {_b(value)}" for pid, value in flt.constraints)
        out.append("END")
    return "".join(line + "\n" for line in out)

