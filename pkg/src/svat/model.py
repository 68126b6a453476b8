"""Domain types for a Blackboard-style network model and whole-model validation.

A model is a set of containers (nodes) holding boolean facts, unidirectional
links between containers, shared properties that let one generic rule address
facts in any container, and the generic rules themselves.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping


class Kind(str, enum.Enum):
    CONTAINER = "C"
    LINK = "L"
    RULE = "R"
    FACT = "F"
    PROPERTY = "P"


_ID_RE = re.compile(r"([CLRFP])([0-9]+)\Z")


@dataclass(frozen=True, order=True)
class EntityId:
    kind: Kind
    number: int

    def __post_init__(self) -> None:
        if self.number < 1:
            raise ValueError(f"entity number must be >= 1, got {self.number}")

    def __str__(self) -> str:
        return f"{self.kind.value}{self.number:03d}"

    def __repr__(self) -> str:
        return f"EntityId({self})"

    @classmethod
    def parse(cls, text: str, kind: Kind | None = None) -> EntityId:
        m = _ID_RE.match(text)
        if m is None:
            raise ValueError(f"malformed id {text!r}")
        parsed = Kind(m.group(1))
        if kind is not None and parsed is not kind:
            raise ValueError(f"expected a {kind.name.lower()} id, got {text!r}")
        return cls(parsed, int(m.group(2)))


def C(n: int) -> EntityId:
    return EntityId(Kind.CONTAINER, n)


def L(n: int) -> EntityId:
    return EntityId(Kind.LINK, n)


def R(n: int) -> EntityId:
    return EntityId(Kind.RULE, n)


def F(n: int) -> EntityId:
    return EntityId(Kind.FACT, n)


def P(n: int) -> EntityId:
    return EntityId(Kind.PROPERTY, n)


@dataclass(frozen=True)
class CommonProperty:
    id: EntityId
    description: str = ""


@dataclass(frozen=True)
class Fact:
    id: EntityId
    owner: EntityId
    property: EntityId | None
    initial_value: bool
    description: str = ""


@dataclass(frozen=True)
class Container:
    id: EntityId
    description: str = ""
    facts: tuple[EntityId, ...] = ()


@dataclass(frozen=True)
class Link:
    id: EntityId
    source: EntityId
    destination: EntityId
    description: str = ""


@dataclass(frozen=True)
class Condition:
    """A property/value pair. Read as "required" in a pre list, "new value" in a post list."""

    property: EntityId
    value: bool


@dataclass(frozen=True)
class GenericRule:
    id: EntityId
    description: str = ""
    start_pre: tuple[Condition, ...] = ()
    end_pre: tuple[Condition, ...] = ()
    start_post: tuple[Condition, ...] = ()
    end_post: tuple[Condition, ...] = ()


def _keyed(items: Iterable, what: str) -> Mapping[EntityId, object]:
    out: dict[EntityId, object] = {}
    for item in items:
        if item.id in out:
            raise ValueError(f"duplicate {what} id {item.id}")
        out[item.id] = item
    return MappingProxyType(dict(sorted(out.items())))


@dataclass(frozen=True, eq=False)
class NetworkModel:
    """Read-only network. Entity mappings are keyed by id and iterate in id order.

    Equality compares entity sets by id; the only order that matters is each
    container's fact list.
    """

    properties: Mapping[EntityId, CommonProperty] = field(default_factory=dict)
    containers: Mapping[EntityId, Container] = field(default_factory=dict)
    facts: Mapping[EntityId, Fact] = field(default_factory=dict)
    links: Mapping[EntityId, Link] = field(default_factory=dict)
    rules: Mapping[EntityId, GenericRule] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        properties: Iterable[CommonProperty] = (),
        containers: Iterable[Container] = (),
        facts: Iterable[Fact] = (),
        links: Iterable[Link] = (),
        rules: Iterable[GenericRule] = (),
    ) -> NetworkModel:
        """Build from entity lists. Raises ValueError on a repeated id."""
        return cls(
            _keyed(properties, "property"),
            _keyed(containers, "container"),
            _keyed(facts, "fact"),
            _keyed(links, "link"),
            _keyed(rules, "rule"),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NetworkModel):
            return NotImplemented
        return all(
            dict(getattr(self, name)) == dict(getattr(other, name))
            for name in ("properties", "containers", "facts", "links", "rules")
        )

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def fact_index(self) -> Mapping[tuple[EntityId, EntityId], EntityId]:
        """(container, property) -> fact id, for facts bound to a property.

        On a duplicate pair the first fact in container order wins; validation
        reports the duplicate.
        """
        index: dict[tuple[EntityId, EntityId], EntityId] = {}
        for container in self.containers.values():
            for fid in container.facts:
                fact = self.facts.get(fid)
                if fact is not None and fact.property is not None:
                    index.setdefault((container.id, fact.property), fid)
        return MappingProxyType(index)

    @cached_property
    def exits(self) -> Mapping[EntityId, tuple[Link, ...]]:
        """Outgoing links per container, ascending by link id."""
        out: dict[EntityId, list[Link]] = {cid: [] for cid in self.containers}
        for link in self.links.values():
            out.setdefault(link.source, []).append(link)
        return MappingProxyType({cid: tuple(links) for cid, links in out.items()})


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    message: str
    entity: EntityId | None = None

    def __str__(self) -> str:
        where = f"{self.entity}: " if self.entity is not None else ""
        return f"{self.severity}: {where}{self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return bool(self.issues)


class ModelError(ValueError):
    """A model failed validation."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(str(i) for i in report.errors))


def _check_conditions(rule: GenericRule, props: Mapping, issues: list[Issue]) -> None:
    for name in ("start_pre", "end_pre", "start_post", "end_post"):
        seen: set[EntityId] = set()
        for cond in getattr(rule, name):
            if cond.property not in props:
                issues.append(Issue("error", f"unresolved rule property {cond.property}", rule.id))
            if cond.property in seen:
                issues.append(
                    Issue("error", f"property {cond.property} repeated in {name.replace('_', ' ')}", rule.id)
                )
            seen.add(cond.property)
    # a property may appear in both start and end lists; only per-list repeats are errors


def validate_model(model: NetworkModel) -> ValidationReport:
    """Return every invariant violation in the model; an empty report means valid."""
    issues: list[Issue] = []
    kinds = (
        (model.properties, Kind.PROPERTY),
        (model.containers, Kind.CONTAINER),
        (model.facts, Kind.FACT),
        (model.links, Kind.LINK),
        (model.rules, Kind.RULE),
    )
    for mapping, kind in kinds:
        for key, entity in mapping.items():
            if key != entity.id or entity.id.kind is not kind:
                issues.append(Issue("error", f"misfiled entity under {kind.name.lower()}s", key))

    for fact in model.facts.values():
        if fact.owner not in model.containers:
            issues.append(Issue("error", f"unresolved fact owner {fact.owner}", fact.id))
        elif fact.id not in model.containers[fact.owner].facts:
            issues.append(Issue("error", f"fact missing from owner {fact.owner} fact list", fact.id))
        if fact.property is not None and fact.property not in model.properties:
            issues.append(Issue("error", f"unresolved fact property {fact.property}", fact.id))

    for container in model.containers.values():
        bound: set[EntityId] = set()
        for fid in container.facts:
            fact = model.facts.get(fid)
            if fact is None:
                issues.append(Issue("error", f"unresolved container fact {fid}", container.id))
                continue
            if fact.owner != container.id:
                issues.append(Issue("error", f"fact {fid} is owned by {fact.owner}", container.id))
            if fact.property is not None:
                if fact.property in bound:
                    issues.append(
                        Issue("error", f"duplicate property in container ({fact.property})", container.id)
                    )
                bound.add(fact.property)
        if len(set(container.facts)) != len(container.facts):
            issues.append(Issue("error", "fact listed twice", container.id))

    for link in model.links.values():
        for end in (link.source, link.destination):
            if end not in model.containers:
                issues.append(Issue("error", f"unresolved link endpoint {end}", link.id))
        if link.source == link.destination:
            issues.append(Issue("warning", "self-loop link", link.id))

    for rule in model.rules.values():
        _check_conditions(rule, model.properties, issues)

    return ValidationReport(tuple(issues))


def require_valid(model: NetworkModel) -> NetworkModel:
    report = validate_model(model)
    if not report.ok:
        raise ModelError(report)
    return model
