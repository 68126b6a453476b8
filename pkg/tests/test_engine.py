from functools import lru_cache
from math import comb

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from svat.engine import (
    ConfigError,
    RunConfig,
    apply_rule,
    available_exits,
    eligible_rules,
    enumerate_paths,
    extend,
    occupancy_snapshots,
    root_path,
)
from svat.model import C, F, L, P, R, NetworkModel
from svat.pathchain import serialize_record

from .reference_traces import MODEL1_CAP1, MODEL1_FINALS, MODEL2_CAP1_PREFIX, MODEL3_FINALS
from .strategies import models, small_graphs

# hand-simulated continuation of the model-2 cap-1 trace (records 9-13)
MODEL2_CAP1_TAIL = """\
C001,L003;C003,L004;C001,L001,R001;C002UL002UL006|F001T,F003F,F004F,F002T
C001,L001,R001;C002,L002,R002;C001,L003,R003;C003,L004;C001|F001T,F003T,F002T,F004T
C001,L001,R001;C002,L002,R002;C001,L003,R003;C003,L008,R004;C004UL005UL007|F001T,F003T,F002T,F004T,F005T
C001,L003;C003,L004;C001,L001,R001;C002,L002,R002;C001|F001T,F003T,F004F,F002T
C001,L003;C003,L004;C001,L001,R001;C002,L006;C004UL005UL007|F001T,F003F,F004F,F002T,F005F
"""


def trace_text(model, start, end, cap, **kw):
    result = enumerate_paths(model, RunConfig(start, end, cap, **kw))
    return "".join(serialize_record(r) for r in result.trace), result


def walk(model, start, links):
    path = root_path(model, start)
    for lid in links:
        path = extend(model, path, lid)
    return path


# independent oracles


class OracleBudgetExceeded(Exception):
    pass


def oracle_tally(model: NetworkModel, start, end, cap, budget: int | None = None) -> tuple[int, int]:
    """Memoised (final paths, explored paths) over link sequences from start that stop
    at the first arrival at end. Raises OracleBudgetExceeded past ``budget`` memo states
    or explored paths.
    """
    link_list = list(model.links.values())
    out = {c: [i for i, lk in enumerate(link_list) if lk.source == c] for c in model.containers}
    memo: dict = {}

    def tally(node, usage):
        key = (node, usage)
        if key in memo:
            return memo[key]
        if budget is not None and len(memo) > budget:
            raise OracleBudgetExceeded
        finals, explored = (1, 1) if node == end else (0, 1)
        if node != end:
            for i in out[node]:
                if usage[i] < cap:
                    bumped = usage[:i] + (usage[i] + 1,) + usage[i + 1 :]
                    f, e = tally(link_list[i].destination, bumped)
                    finals += f
                    explored += e
        memo[key] = (finals, explored)
        return finals, explored

    result = tally(start, (0,) * len(link_list))
    if budget is not None and result[1] > 50 * budget:
        raise OracleBudgetExceeded
    return result


def oracle_count(model: NetworkModel, start, end, cap) -> int:
    return oracle_tally(model, start, end, cap)[0]


def oracle_replay(model: NetworkModel, start, links):
    """Re-derive rule firings and final fact values for a hop sequence straight from the model tables."""
    values = {}
    seen = []

    def visit(c):
        if c not in seen:
            seen.append(c)
            for fid in model.containers[c].facts:
                values[fid] = model.facts[fid].initial_value

    def fact_for(c, prop):
        for fid in model.containers[c].facts:
            if model.facts[fid].property == prop:
                return fid
        return None

    visit(start)
    fired_per_hop = []
    for lid in links:
        link = model.links[lid]
        visit(link.destination)
        fired = []
        for rule in sorted(model.rules.values(), key=lambda r: r.id.number):
            ok = True
            for side, conds in ((link.source, rule.start_pre), (link.destination, rule.end_pre)):
                for cond in conds:
                    fid = fact_for(side, cond.property)
                    if fid is None or values[fid] != cond.value:
                        ok = False
            for side, conds in ((link.source, rule.start_post), (link.destination, rule.end_post)):
                for cond in conds:
                    if fact_for(side, cond.property) is None:
                        ok = False
            if ok:
                for side, conds in ((link.source, rule.start_post), (link.destination, rule.end_post)):
                    for cond in conds:
                        values[fact_for(side, cond.property)] = cond.value
                fired.append(rule.id)
        fired_per_hop.append(tuple(fired))
    return fired_per_hop, values


# traces


def test_model1_trace(model1):
    text, result = trace_text(model1, C(1), C(3), 1)
    assert text == MODEL1_CAP1
    assert result.stats.final_paths == 3


def test_model2_trace(model2):
    text, result = trace_text(model2, C(1), C(4), 1)
    assert text == MODEL2_CAP1_PREFIX + MODEL2_CAP1_TAIL
    finals = [i for i, r in enumerate(result.trace, 1) if r.terminal == C(4)]
    assert finals == [5, 7, 11, 13]
    assert result.stats.final_paths == 4
    assert result.stats.dead_ends == 2


def test_streamed_trace_matches_collected(model2):
    seen = []
    result = enumerate_paths(model2, RunConfig(C(1), C(4), 2), on_record=seen.append)
    assert result.trace == []
    assert seen == enumerate_paths(model2, RunConfig(C(1), C(4), 2)).trace


# exits / rules


def test_exits_at_root(model1):
    assert available_exits(model1, root_path(model1, C(1)), 1) == [L(2), L(3)]


def test_exit_exhausted_by_cap(model1):
    path = walk(model1, C(1), [L(2), L(1)])
    assert available_exits(model1, path, 1) == [L(3)]
    assert available_exits(model1, path, 2) == [L(2), L(3)]


def test_no_exits_left(model2):
    path = walk(model2, C(1), [L(1), L(2), L(3), L(4)])
    assert path.terminal == C(1)
    assert available_exits(model2, path, 1) == []


def test_first_hop_fires_r001(model1):
    assert eligible_rules(model1, root_path(model1, C(1)), L(2)) == [R(1)]


def test_missing_property_blocks_rule(model1):
    path = walk(model1, C(1), [L(2)])
    assert eligible_rules(model1, path, L(1)) == []


def test_rule_sees_variant_state(model2):
    path = walk(model2, C(1), [L(1)])
    assert path.facts[F(2)] is True
    assert eligible_rules(model2, path, L(2)) == [R(2)]


def test_eligible_rules_rejects_foreign_link(model1):
    with pytest.raises(ValueError):
        eligible_rules(model1, root_path(model1, C(1)), L(1))


def test_apply_r001(model1):
    path = walk(model1, C(1), [L(2)])
    assert path.facts == {F(1): True, F(2): True}
    assert path.steps[0].rules == (R(1),)


def test_start_post_writes_source(model3):
    path = walk(model3, C(1), [L(1), L(2), L(3)])
    assert path.facts[F(8)] is False
    nxt = extend(model3, path, L(12))
    assert nxt.steps[-1].rules == (R(4),)
    assert nxt.facts[F(8)] is True


def test_apply_rule_is_copy_on_write(model1):
    state = {F(1): True, F(2): False}
    out = apply_rule(model1, state, model1.rules[R(1)], C(1), C(2))
    assert out == {F(1): True, F(2): True}
    assert state == {F(1): True, F(2): False}
    assert apply_rule(model1, out, model1.rules[R(1)], C(1), C(2)) == out


def test_sequential_rule_firing():
    from svat.modelfmt import parse_model

    model = parse_model(
        "PROPERTY P001\nPROPERTY P002\nCONTAINER C001\nCONTAINER C002\n"
        "FACT F001 OWNER C001 PROP P001 VALUE true\nFACT F002 OWNER C002 PROP P002 VALUE false\n"
        "LINK L001 FROM C001 TO C002\n"
        # R002 only fires because R001 set P002 first; R003 is then blocked by R002
        "RULE R001\n PRE START P001 true\n POST END P002 true\nEND\n"
        "RULE R002\n PRE END P002 true\n POST START P001 false\nEND\n"
        "RULE R003\n PRE START P001 true\n POST END P002 false\nEND\n"
    )
    path = walk(model, C(1), [L(1)])
    assert path.steps[0].rules == (R(1), R(2))
    assert path.facts == {F(1): False, F(2): True}


def test_parent_path_untouched_by_extension(model1):
    root = root_path(model1, C(1))
    before = dict(root.facts)
    extend(model1, root, L(2))
    assert root.facts == before


# enumerate


def test_start_equals_end(model1):
    result = enumerate_paths(model1, RunConfig(C(1), C(1), 1))
    assert result.stats.final_paths == 1
    assert result.final_paths[0].steps == ()
    assert len(result.trace) == 1


def test_unknown_container(model1):
    with pytest.raises(ConfigError, match="unknown end container C009"):
        enumerate_paths(model1, RunConfig(C(1), C(9), 1))


def test_bad_cap():
    with pytest.raises(ConfigError):
        RunConfig(C(1), C(2), 0)


def test_rule_free_mode(model2):
    result = enumerate_paths(model2, RunConfig(C(1), C(4), 2, apply_rules=False))
    assert all(not h.rules for p in result.final_paths for h in p.steps)
    assert result.stats.final_paths == 18


@pytest.mark.parametrize("cap", range(1, 6))
def test_model1_growth(model1, cap):
    assert enumerate_paths(model1, RunConfig(C(1), C(3), cap, count_only=True)).stats.final_paths == 2 * cap + 1
    assert MODEL1_FINALS[cap - 1] == 2 * cap + 1


@pytest.mark.parametrize("cap", range(1, 11))
def test_model2_counts_match_oracle(model2, cap):
    expected = oracle_count(model2, C(1), C(4), cap)
    # the oracle agrees with the closed form C(2k+2, k+1) - 2 on this ring
    assert expected == comb(2 * cap + 2, cap + 1) - 2
    assert enumerate_paths(model2, RunConfig(C(1), C(4), cap, count_only=True)).stats.final_paths == expected


@pytest.mark.parametrize("cap", range(1, 4))
def test_model3_counts_match_oracle(model3, cap):
    expected = oracle_count(model3, C(1), C(4), cap)
    assert expected == MODEL3_FINALS[cap - 1]
    assert enumerate_paths(model3, RunConfig(C(1), C(4), cap, count_only=True)).stats.final_paths == expected


@pytest.mark.parametrize("model_no, end, caps", [(1, C(3), 4), (2, C(4), 4), (3, C(4), 2)])
def test_count_only_agrees_with_full_run(model_no, end, caps):
    from svat.fixtures import builtin_model

    model = builtin_model(model_no)
    for cap in range(1, caps + 1):
        full = enumerate_paths(model, RunConfig(C(1), end, cap, trace_enabled=False)).stats
        fast = enumerate_paths(model, RunConfig(C(1), end, cap, count_only=True)).stats
        for name in ("final_paths", "trace_records", "dead_ends", "max_depth", "expansions"):
            assert getattr(full, name) == getattr(fast, name), name


def test_determinism(model2):
    a, ra = trace_text(model2, C(1), C(4), 3)
    b, rb = trace_text(model2, C(1), C(4), 3)
    assert a == b
    assert [p.steps for p in ra.final_paths] == [p.steps for p in rb.final_paths]


@pytest.mark.parametrize("cap", [1, 2, 3])
def test_trace_invariants(model2, cap):
    result = enumerate_paths(model2, RunConfig(C(1), C(4), cap))
    lines = [serialize_record(r) for r in result.trace]
    assert len(set(lines)) == len(lines)
    hop_seqs = [tuple(h.link for h in p.steps) for p in result.final_paths]
    assert len(set(hop_seqs)) == len(hop_seqs)
    assert result.stats.final_paths == sum(r.terminal == C(4) for r in result.trace)
    depths = [len(r.hops) for r in result.trace]
    assert depths == sorted(depths)
    for p in result.final_paths:
        assert all(n <= cap for n in p.link_usage.values())
        # usage agrees with the hop list
        counts = {}
        for h in p.steps:
            counts[h.link] = counts.get(h.link, 0) + 1
        assert counts == dict(p.link_usage)


@pytest.mark.parametrize("model_no, end, top", [(1, C(3), 5), (2, C(4), 7), (3, C(4), 3)])
def test_monotone_in_cap(model_no, end, top):
    from svat.fixtures import builtin_model

    model = builtin_model(model_no)
    counts = [enumerate_paths(model, RunConfig(C(1), end, k, count_only=True)).stats.final_paths for k in range(1, top + 1)]
    assert counts == sorted(counts)


def test_model_untouched_by_run(model3):
    before = {fid: f.initial_value for fid, f in model3.facts.items()}
    enumerate_paths(model3, RunConfig(C(1), C(4), 2, trace_enabled=False))
    assert {fid: f.initial_value for fid, f in model3.facts.items()} == before


def test_timeout_full_mode(model3):
    result = enumerate_paths(model3, RunConfig(C(1), C(4), 3, trace_enabled=False, timeout=0.01))
    assert not result.stats.completed
    assert result.stats.final_paths < 39553


def test_timeout_count_mode(model3):
    result = enumerate_paths(model3, RunConfig(C(1), C(4), 5, count_only=True, timeout=0.05))
    assert not result.stats.completed


def test_occupancy_snapshots(model2):
    path = walk(model2, C(1), [L(1), L(2)])
    snaps = list(occupancy_snapshots(model2, path))
    assert [c for c, _ in snaps] == [C(1), C(2), C(1)]
    assert snaps[0][1] == {F(1): True, F(3): False}
    assert snaps[2][1][F(3)] is True


# properties


@settings(max_examples=150, deadline=None)
@given(small_graphs(), st.integers(1, 3))
def test_counts_match_oracle_on_random_graphs(graph, cap):
    model, start, end = graph
    try:
        finals, explored = oracle_tally(model, start, end, cap, budget=20_000)
    except OracleBudgetExceeded:
        assume(False)
    stats = enumerate_paths(model, RunConfig(start, end, cap, count_only=True)).stats
    assert (stats.final_paths, stats.trace_records) == (finals, explored)
    if explored < 5000:
        full = enumerate_paths(model, RunConfig(start, end, cap, trace_enabled=False)).stats
        assert (full.final_paths, full.trace_records) == (finals, explored)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
@given(models(max_containers=3, max_links=5), st.data())
def test_rule_firings_replay(model, data):
    if not model.containers:
        return
    start = data.draw(st.sampled_from(list(model.containers)))
    end = data.draw(st.sampled_from(list(model.containers)))
    result = enumerate_paths(model, RunConfig(start, end, 2, trace_enabled=False))
    for path in result.final_paths[:50]:
        fired, values = oracle_replay(model, start, [h.link for h in path.steps])
        assert [h.rules for h in path.steps] == fired
        assert dict(path.facts) == values
        # fact order: containers by first visit, each in definition order
        order = []
        for c in path.containers:
            for fid in model.containers[c].facts:
                if fid not in order:
                    order.append(fid)
        assert list(path.facts) == order
