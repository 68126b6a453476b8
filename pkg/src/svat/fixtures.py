"""The three benchmark networks and an illustrative office network.

Models 1-3 are the link-cap benchmark networks (3 containers/6 links/2 rules,
4/8/4 and 4/12/6). Each also ships as a text model under ``models/`` in the
repository; the two must stay equal.
"""

from __future__ import annotations

import enum

from .model import (
    C,
    CommonProperty,
    Condition,
    Container,
    EntityId,
    F,
    Fact,
    GenericRule,
    L,
    Link,
    NetworkModel,
    P,
    R,
)


class FixtureId(enum.Enum):
    MODEL1 = "model1"
    MODEL2 = "model2"
    MODEL3 = "model3"
    OFFICE = "office"


# start/end containers used for every benchmark run of each model
DEFAULT_RUN: dict[FixtureId, tuple[EntityId, EntityId]] = {
    FixtureId.MODEL1: (C(1), C(3)),
    FixtureId.MODEL2: (C(1), C(4)),
    FixtureId.MODEL3: (C(1), C(4)),
    FixtureId.OFFICE: (C(6), C(9)),
}

Conds = dict[int, bool]


def _conds(spec: Conds) -> tuple[Condition, ...]:
    return tuple(Condition(P(n), v) for n, v in spec.items())


def _assemble(
    properties: list[str],
    containers: list[str],
    facts: list[tuple[int, int, int | None, bool]],
    links: list[tuple[int, int, int]],
    rules: list[tuple[int, str, Conds, Conds, Conds, Conds]],
    descriptions: dict[int, str] | None = None,
) -> NetworkModel:
    descriptions = descriptions or {}
    owned: dict[int, list[EntityId]] = {n: [] for n in range(1, len(containers) + 1)}
    fact_objs = []
    for fnum, owner, prop, value in facts:
        owned[owner].append(F(fnum))
        fact_objs.append(Fact(F(fnum), C(owner), P(prop) if prop else None, value, descriptions.get(fnum, "")))
    return NetworkModel.build(
        [CommonProperty(P(i), d) for i, d in enumerate(properties, 1)],
        [Container(C(i), d, tuple(owned[i])) for i, d in enumerate(containers, 1)],
        fact_objs,
        [Link(L(n), C(s), C(d)) for n, s, d in links],
        [GenericRule(R(n), desc, _conds(a), _conds(b), _conds(c), _conds(d)) for n, desc, a, b, c, d in rules],
    )


def model1() -> NetworkModel:
    return _assemble(
        ["P1", "P2", "P3"],
        ["Container 1", "Container 2", "Container 3"],
        [(1, 1, 1, True), (2, 2, 2, False), (3, 3, 3, False)],
        [(1, 2, 1), (2, 1, 2), (3, 1, 3), (4, 3, 1), (5, 2, 3), (6, 3, 2)],
        [
            (1, "", {1: True}, {2: False}, {}, {2: True}),
            (2, "", {2: True}, {3: False}, {}, {3: True}),
        ],
    )


_MODEL2_LINKS = [(1, 1, 2), (2, 2, 1), (3, 1, 3), (4, 3, 1), (5, 4, 2), (6, 2, 4), (7, 4, 3), (8, 3, 4)]


def model2() -> NetworkModel:
    return _assemble(
        ["P1", "P2", "P3", "P4", "P5"],
        ["Container 1", "Container 2", "Container 3", "Container 4"],
        [(1, 1, 1, True), (2, 2, 2, False), (3, 1, 3, False), (4, 3, 4, False), (5, 4, 5, False)],
        _MODEL2_LINKS,
        [
            (1, "", {1: True}, {2: False}, {}, {2: True}),
            (2, "", {2: True}, {3: False}, {}, {3: True}),
            (3, "", {3: True}, {4: False}, {}, {4: True}),
            (4, "", {4: True}, {5: False}, {}, {5: True}),
        ],
    )


def model3() -> NetworkModel:
    return _assemble(
        [f"P{i}" for i in range(1, 10)],
        ["Container 1", "Container 2", "Container 3", "Container 4"],
        [
            (1, 1, 1, True),
            (2, 1, 2, True),
            (3, 1, 3, False),
            (4, 1, 4, False),
            (5, 2, 5, False),
            (6, 2, 6, True),
            (7, 3, 7, False),
            (8, 3, 8, False),
            (9, 4, 9, False),
        ],
        _MODEL2_LINKS + [(9, 1, 4), (10, 4, 1), (11, 2, 3), (12, 3, 2)],
        [
            (1, "", {1: True, 2: True}, {5: False}, {}, {5: True}),
            (2, "", {5: True, 6: True}, {3: False}, {}, {3: True}),
            (3, "", {3: True}, {7: False}, {}, {7: True}),
            (4, "", {7: True, 8: False}, {5: True, 6: True}, {8: True}, {}),
            (5, "", {7: True, 8: True}, {4: False}, {}, {4: True}),
            (6, "", {4: True}, {9: False}, {}, {9: True}),
        ],
    )


def office() -> NetworkModel:
    """Small office network: an attacker enters at Terminal 4 through a default
    root account, moves through Switch 2, the router, Firewall 2 and the wireless
    hub, and escalates privileges on Workstation 1 with a planted file.
    """
    bilinks = [(1, 2), (2, 3), (3, 4), (3, 5), (5, 6), (3, 7), (7, 8), (8, 9), (4, 10)]
    links = []
    for i, (a, b) in enumerate(bilinks):
        links.append((2 * i + 1, a, b))
        links.append((2 * i + 2, b, a))
    fw, trav, comp = 5, 9, 3
    facts: list[tuple[int, int, int | None, bool]] = [
        (1, 1, fw, False),
        (2, 1, trav, False),
        (3, 2, fw, True),
        (4, 2, trav, False),
        (5, 3, fw, False),
        (6, 3, trav, False),
        (7, 4, fw, False),
        (8, 4, trav, False),
        (9, 5, fw, False),
        (10, 5, trav, False),
        (11, 6, 1, True),
        (12, 6, 2, True),
        (13, 6, comp, False),
        (14, 6, trav, False),
        (15, 7, fw, False),
        (16, 7, trav, False),
        (17, 8, fw, False),
        (18, 8, trav, False),
        (19, 9, fw, False),
        (20, 9, trav, False),
        (21, 9, 6, True),
        (22, 9, 7, True),
        (23, 9, 8, False),
        (24, 9, comp, False),
        (25, 10, fw, True),
        (26, 10, trav, False),
        (27, 10, 6, False),
        (28, 6, None, True),
    ]
    return _assemble(
        [
            "EntryPoint",
            "DefaultRootAccount",
            "Compromised",
            "RouterConnection",
            "FirewallEnabled",
            "Win10",
            "MaliciousFile",
            "Administrator",
            "CompTraversed",
        ],
        [
            "Internet",
            "Firewall 1",
            "Router",
            "Switch 1",
            "Switch 2",
            "Terminal 4",
            "Firewall 2",
            "Wireless Hub",
            "Workstation 1",
            "Server",
        ],
        facts,
        links,
        [
            (1, "Default root account login", {1: True, 2: True}, {trav: False}, {comp: True, trav: True}, {trav: True}),
            (2, "Lateral movement through unfiltered device", {trav: True}, {fw: False, trav: False}, {}, {trav: True}),
            (
                3,
                "Privilege escalation with malicious file",
                {trav: True},
                {6: True, 7: True, 8: False},
                {},
                {8: True, comp: True},
            ),
        ],
        descriptions={28: "Physical console attached"},
    )


_BUILDERS = {
    FixtureId.MODEL1: model1,
    FixtureId.MODEL2: model2,
    FixtureId.MODEL3: model3,
    FixtureId.OFFICE: office,
}


def builtin_model(fixture: FixtureId | str | int) -> NetworkModel:
    """Accepts a FixtureId, its value ("model2"), or a benchmark number (2)."""
    if isinstance(fixture, int):
        fixture = f"model{fixture}"
    return _BUILDERS[FixtureId(fixture)]()
