"""Exhaustive start-to-end path enumeration over a network model.

Each explored path carries its own copy of the fact values of every container
it has visited ("variants"), so rules fired along one path never leak into
another or into the model. Paths are expanded breadth first; a path is final
when it reaches the end container and is never extended past it. Every link
may be traversed at most ``link_cap`` times within one path.
"""

from __future__ import annotations

import logging
import sys
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping

from .model import EntityId, GenericRule, NetworkModel
from .pathchain import Hop, PathRecord

log = logging.getLogger(__name__)

# how many expansions between wall-clock checks
_CLOCK_EVERY = 4096


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    start: EntityId
    end: EntityId
    link_cap: int = 1
    trace_enabled: bool = True
    count_only: bool = False
    timeout: float | None = None  # seconds
    apply_rules: bool = True
    keep_paths: bool = True  # retain final path bodies in the result

    def __post_init__(self) -> None:
        if self.link_cap < 1:
            raise ConfigError(f"link cap must be >= 1, got {self.link_cap}")
        if self.timeout is not None and self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")


@dataclass(frozen=True)
class RealityPath:
    steps: tuple[Hop, ...]
    terminal: EntityId
    # insertion order is first-visit container order, then each container's fact order
    facts: Mapping[EntityId, bool]
    link_usage: Mapping[EntityId, int]
    visited: tuple[EntityId, ...]

    @property
    def depth(self) -> int:
        return len(self.steps)

    @property
    def containers(self) -> tuple[EntityId, ...]:
        """Container sequence from start to terminal."""
        return tuple(h.container for h in self.steps) + (self.terminal,)


@dataclass
class Stats:
    final_paths: int = 0
    trace_records: int = 0
    dead_ends: int = 0
    max_depth: int = 0
    expansions: int = 0
    elapsed: float = 0.0
    completed: bool = True


@dataclass
class EnumerationResult:
    final_paths: list[RealityPath] = field(default_factory=list)
    trace: list[PathRecord] = field(default_factory=list)
    stats: Stats = field(default_factory=Stats)


def root_path(model: NetworkModel, start: EntityId) -> RealityPath:
    facts = {fid: model.facts[fid].initial_value for fid in model.containers[start].facts}
    return RealityPath((), start, facts, {}, (start,))


def available_exits(model: NetworkModel, path: RealityPath, cap: int) -> list[EntityId]:
    """Links leaving the terminal that this path has used fewer than ``cap`` times."""
    usage = path.link_usage
    return [link.id for link in model.exits.get(path.terminal, ()) if usage.get(link.id, 0) < cap]


def _holds(model: NetworkModel, state: Mapping[EntityId, bool], container: EntityId, conds) -> bool:
    index = model.fact_index
    for cond in conds:
        fid = index.get((container, cond.property))
        if fid is None or state[fid] != cond.value:
            return False
    return True


def _targets(model: NetworkModel, container: EntityId, conds) -> bool:
    index = model.fact_index
    return all((container, cond.property) in index for cond in conds)


def is_eligible(model: NetworkModel, state: Mapping[EntityId, bool], rule: GenericRule, src: EntityId, dst: EntityId) -> bool:
    return (
        _holds(model, state, src, rule.start_pre)
        and _holds(model, state, dst, rule.end_pre)
        and _targets(model, src, rule.start_post)
        and _targets(model, dst, rule.end_post)
    )


def apply_rule(
    model: NetworkModel, state: Mapping[EntityId, bool], rule: GenericRule, src: EntityId, dst: EntityId
) -> dict[EntityId, bool]:
    """Return a copy of ``state`` with the rule's post-conditions written. ``state`` is untouched."""
    out = dict(state)
    _write(model, out, rule, src, dst)
    return out


def _write(model: NetworkModel, state: dict[EntityId, bool], rule: GenericRule, src: EntityId, dst: EntityId) -> None:
    index = model.fact_index
    for cond in rule.start_post:
        state[index[(src, cond.property)]] = cond.value
    for cond in rule.end_post:
        state[index[(dst, cond.property)]] = cond.value


def _arrival_state(model: NetworkModel, path: RealityPath, dst: EntityId) -> Mapping[EntityId, bool]:
    if dst in path.visited:
        return path.facts
    merged = dict(path.facts)
    for fid in model.containers[dst].facts:
        merged[fid] = model.facts[fid].initial_value
    return merged


def _fire(
    model: NetworkModel, state: Mapping[EntityId, bool], src: EntityId, dst: EntityId
) -> tuple[list[EntityId], Mapping[EntityId, bool]]:
    # sequential: each rule sees the writes of the rules fired before it
    fired: list[EntityId] = []
    work: dict[EntityId, bool] | None = None
    for rule in model.rules.values():
        current = state if work is None else work
        if is_eligible(model, current, rule, src, dst):
            if work is None:
                work = dict(state)
            _write(model, work, rule, src, dst)
            fired.append(rule.id)
    return fired, (state if work is None else work)


def eligible_rules(model: NetworkModel, path: RealityPath, link: EntityId) -> list[EntityId]:
    """Rules that fire, in order, when ``path`` takes ``link`` from its terminal."""
    lk = model.links[link]
    if lk.source != path.terminal:
        raise ValueError(f"{link} does not leave {path.terminal}")
    fired, _ = _fire(model, _arrival_state(model, path, lk.destination), lk.source, lk.destination)
    return fired


def extend(model: NetworkModel, path: RealityPath, link: EntityId, apply_rules: bool = True) -> RealityPath:
    lk = model.links[link]
    state = _arrival_state(model, path, lk.destination)
    fired: list[EntityId] = []
    if apply_rules:
        fired, state = _fire(model, state, lk.source, lk.destination)
    usage = dict(path.link_usage)
    usage[link] = usage.get(link, 0) + 1
    visited = path.visited if lk.destination in path.visited else path.visited + (lk.destination,)
    return RealityPath(
        path.steps + (Hop(path.terminal, link, tuple(fired)),),
        lk.destination,
        state,
        usage,
        visited,
    )


def to_record(model: NetworkModel, path: RealityPath, cap: int) -> PathRecord:
    return PathRecord(
        path.steps,
        path.terminal,
        tuple(available_exits(model, path, cap)),
        tuple(path.facts.items()),
    )


def occupancy_snapshots(
    model: NetworkModel, path: RealityPath, apply_rules: bool = True
) -> Iterator[tuple[EntityId, Mapping[EntityId, bool]]]:
    """Replay ``path`` and yield (container, state) each time the path stands on a container."""
    cur = root_path(model, path.steps[0].container if path.steps else path.terminal)
    yield cur.terminal, cur.facts
    for hop in path.steps:
        cur = extend(model, cur, hop.link, apply_rules)
        yield cur.terminal, cur.facts


class _Timeout(Exception):
    pass


def _check(model: NetworkModel, config: RunConfig) -> None:
    for role, cid in (("start", config.start), ("end", config.end)):
        if cid not in model.containers:
            raise ConfigError(f"unknown {role} container {cid}")


def enumerate_paths(
    model: NetworkModel,
    config: RunConfig,
    on_record: Callable[[PathRecord], None] | None = None,
) -> EnumerationResult:
    """Enumerate every path from ``config.start`` to ``config.end``.

    With ``trace_enabled`` each explored path (partial, dead end, final) becomes
    a PathRecord, in breadth-first order; records go to ``on_record`` when given,
    otherwise into ``result.trace``. ``count_only`` keeps counts only.
    """
    _check(model, config)
    if config.count_only:
        return _count(model, config)

    t0 = time.perf_counter()
    deadline = None if config.timeout is None else t0 + config.timeout
    cap, end = config.link_cap, config.end
    result = EnumerationResult()
    stats = result.stats
    trace = config.trace_enabled
    sink = on_record if on_record is not None else result.trace.append

    def emit(path: RealityPath, exits: list[EntityId]) -> None:
        stats.trace_records += 1
        if path.depth > stats.max_depth:
            stats.max_depth = path.depth
        if trace:
            sink(PathRecord(path.steps, path.terminal, tuple(exits), tuple(path.facts.items())))

    root = root_path(model, config.start)
    frontier: deque[RealityPath] = deque()
    exits = available_exits(model, root, cap)
    emit(root, exits)
    keep = config.keep_paths
    if root.terminal == end:
        if keep:
            result.final_paths.append(root)
        stats.final_paths = 1
    elif exits:
        frontier.append(root)
    else:
        stats.dead_ends += 1

    while frontier:
        parent = frontier.popleft()
        for lid in available_exits(model, parent, cap):
            child = extend(model, parent, lid, config.apply_rules)
            stats.expansions += 1
            child_exits = available_exits(model, child, cap)
            emit(child, child_exits)
            if child.terminal == end:
                if keep:
                    result.final_paths.append(child)
                stats.final_paths += 1
            elif child_exits:
                frontier.append(child)
            else:
                stats.dead_ends += 1
        if deadline is not None and frontier and time.perf_counter() > deadline:
            stats.completed = False
            log.info("enumeration timed out after %d expansions", stats.expansions)
            break

    stats.elapsed = time.perf_counter() - t0
    return result


def _count(model: NetworkModel, config: RunConfig) -> EnumerationResult:
    """Depth-first counter over integer-indexed links, no fact state.

    Rules never prune traversal, so path counts do not depend on them.
    """
    t0 = time.perf_counter()
    deadline = None if config.timeout is None else t0 + config.timeout
    cids = list(model.containers)
    cidx = {cid: i for i, cid in enumerate(cids)}
    adj: list[list[tuple[int, int]]] = [[] for _ in cids]
    for li, link in enumerate(model.links.values()):
        adj[cidx[link.source]].append((li, cidx[link.destination]))
    cap = config.link_cap
    end = cidx[config.end]
    usage = [0] * len(model.links)
    # final, records, dead ends, max depth
    tally = [0, 0, 0, 0]
    budget = [_CLOCK_EVERY]

    def walk(node: int, depth: int) -> None:
        tally[1] += 1
        if depth > tally[3]:
            tally[3] = depth
        if node == end:
            tally[0] += 1
            return
        budget[0] -= 1
        if budget[0] <= 0:
            budget[0] = _CLOCK_EVERY
            if deadline is not None and time.perf_counter() > deadline:
                raise _Timeout
        stuck = True
        for li, dst in adj[node]:
            if usage[li] < cap:
                stuck = False
                usage[li] += 1
                walk(dst, depth + 1)
                usage[li] -= 1
        if stuck:
            tally[2] += 1

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, cap * len(usage) + 100))
    completed = True
    try:
        walk(cidx[config.start], 0)
    except _Timeout:
        completed = False
    finally:
        sys.setrecursionlimit(limit)

    stats = Stats(
        final_paths=tally[0],
        trace_records=tally[1],
        dead_ends=tally[2],
        max_depth=tally[3],
        expansions=tally[1] - 1,
        elapsed=time.perf_counter() - t0,
        completed=completed,
    )
    return EnumerationResult(stats=stats)
