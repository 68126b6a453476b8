"""Path-chain records: one line per explored path.

    C001,L002,R001;C002,L005,R002;C003UL004UL006|F001T,F002T,F003T

Hops (container, exit link, fired rules) are ``;``-terminated, the terminal
container is followed by its still-available exits (each prefixed ``U``), and
the fact states of every visited container follow the ``|``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import EntityId, Kind


@dataclass(frozen=True)
class Hop:
    container: EntityId
    link: EntityId
    rules: tuple[EntityId, ...] = ()


@dataclass(frozen=True)
class PathRecord:
    hops: tuple[Hop, ...]
    terminal: EntityId
    exits: tuple[EntityId, ...] = ()
    facts: tuple[tuple[EntityId, bool], ...] = ()

    def __str__(self) -> str:
        return serialize_record(self, newline=False)


class RecordSyntaxError(ValueError):
    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"offset {offset}: {message}")


def serialize_record(record: PathRecord, newline: bool = True) -> str:
    parts: list[str] = []
    for hop in record.hops:
        parts.append(str(hop.container))
        parts.append(",")
        parts.append(str(hop.link))
        for rid in hop.rules:
            parts.append(",")
            parts.append(str(rid))
        parts.append(";")
    parts.append(str(record.terminal))
    for lid in record.exits:
        parts.append("U")
        parts.append(str(lid))
    parts.append("|")
    parts.append(",".join(f"{fid}{'T' if v else 'F'}" for fid, v in record.facts))
    if newline:
        parts.append("\n")
    return "".join(parts)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.fail(f"expected {ch!r}")
        self.pos += 1

    def fail(self, message: str):
        got = repr(self.peek()) if self.pos < len(self.text) else "end of record"
        raise RecordSyntaxError(self.pos, f"{message}, got {got}")

    def ident(self, kind: Kind) -> EntityId:
        self.expect(kind.value)
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit() and self.text[self.pos].isascii():
            self.pos += 1
        digits = self.text[start : self.pos]
        if not digits:
            self.fail(f"expected digits after {kind.value!r}")
        if len(digits) < 3:
            raise RecordSyntaxError(start, f"id {kind.value}{digits} is not padded to width 3")
        if len(digits) > 3 and digits[0] == "0":
            raise RecordSyntaxError(start, f"id {kind.value}{digits} has excess zero padding")
        number = int(digits)
        if number < 1:
            raise RecordSyntaxError(start, "id number must be >= 1")
        return EntityId(kind, number)


def parse_record(line: str) -> PathRecord:
    """Inverse of serialize_record. A single trailing newline is accepted."""
    if line.endswith("\n"):
        line = line[:-1]
    r = _Reader(line)
    hops: list[Hop] = []
    while True:
        container = r.ident(Kind.CONTAINER)
        if r.peek() != ",":
            break
        r.pos += 1
        link = r.ident(Kind.LINK)
        rules: list[EntityId] = []
        while r.peek() == ",":
            r.pos += 1
            rules.append(r.ident(Kind.RULE))
        r.expect(";")
        hops.append(Hop(container, link, tuple(rules)))
    exits: list[EntityId] = []
    while r.peek() == "U":
        r.pos += 1
        exits.append(r.ident(Kind.LINK))
    r.expect("|")
    facts: list[tuple[EntityId, bool]] = []
    if r.peek():
        while True:
            fid = r.ident(Kind.FACT)
            flag = r.peek()
            if flag not in ("T", "F"):
                r.fail("expected 'T' or 'F'")
            r.pos += 1
            facts.append((fid, flag == "T"))
            if not r.peek():
                break
            r.expect(",")
    return PathRecord(tuple(hops), container, tuple(exits), tuple(facts))
