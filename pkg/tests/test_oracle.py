# -*- coding: utf-8 -*-
"""
Cross-check of the pushdown backend against explicit exploration on small
systems whose stack height is bounded: level 0 states only skip or push
into level 1, level 1 states only skip or pop back to level 0.
"""

# System import
from collections import OrderedDict

# Third party import
import numpy as np
import pytest

# Package import
from rpdsmc.eqrel import induced, parse_partition
from rpdsmc.ltl import parse_ltl, eval_word
from rpdsmc.machines import (Rule, Rpds, POP, SKIP, push, make_id, rpds_successors,
                             pds_successors, nfa_accepts)
from rpdsmc.oracle import explore, check_finite
from rpdsmc.pdsmc import model_check_pds, HOLDS, VIOLATED
from rpdsmc.reduction import reduce_rpds, reduce_ra, map_id
from rpdsmc.utils import ResourceLimitError

from conftest import drain_automaton, bottom_id


LEVELS = OrderedDict([("a0", 0), ("b0", 0), ("a1", 1), ("b1", 1)])
FORMULAS = ["G F h", "F G h", "G (h | l)", "h U l", "G F l", "X h", "G (!l | X !l)",
            "F G !l", "G !h | F l"]


def layered_rpds(k, seed, rules_per_state=3):
    rng = np.random.default_rng(seed)

    def guard():
        theta = tuple(int(v) for v in rng.integers(0, 3, size=k))
        d = int(rng.integers(0, 3))
        theta_prime = tuple(int(v) for v in rng.integers(0, 3, size=k))
        return induced(theta, d, theta_prime)

    rules = []
    for state, level in LEVELS.items():
        for _ in range(rules_per_state):
            stay = bool(rng.integers(2))
            if level == 0:
                targets = ["a0", "b0"] if stay else ["a1", "b1"]
                command = SKIP if stay else push(int(rng.integers(1, k + 1)))
            else:
                targets = ["a1", "b1"] if stay else ["a0", "b0"]
                command = SKIP if stay else POP
            rules.append(Rule(state, guard(), str(rng.choice(targets)), command))
    return Rpds(k, list(LEVELS), rules)


def valuation_of(m):
    return OrderedDict([("h", drain_automaton(m.k, m.states, ["a0", "a1"])),
                        ("l", drain_automaton(m.k, m.states, ["a1", "b1"]))])


def reduce_instance(m, ras, start):
    reduced = reduce_rpds(m, start=start)
    valuation = OrderedDict((atom, reduce_ra(ra, m.states)) for atom, ra in ras.items())
    return reduced, valuation


def backend(m, ras, f, start):
    reduced, valuation = reduce_instance(m, ras, start)
    return model_check_pds(reduced.pds, valuation, f, map_id(start))


def check_lasso(m, lasso, reduced=None, valuation=None, bottom=None):
    """ Check the steps of a lasso and, given a reduction, that its images
    form a lasso of the reduced PDS with the same labels.
    """
    path = list(lasso.stem) + list(lasso.loop)
    labels = list(lasso.stem_labels) + list(lasso.loop_labels)
    for c, nxt in zip(path, path[1:] + [lasso.loop[0]]):
        assert nxt in [target for _, target in rpds_successors(m, c)]
        if reduced is not None:
            image = map_id(c, bottom)
            assert map_id(nxt, bottom) in [target for _, target in
                                           pds_successors(reduced.pds, image)]
    if reduced is not None:
        for c, letter in zip(path, labels):
            image = map_id(c, bottom)
            assert {atom for atom, nfa in valuation.items() if nfa_accepts(nfa, image)} == letter


@pytest.mark.parametrize("k,seed", [(1, seed) for seed in range(12)] +
                         [(2, seed) for seed in range(6)])
def test_backend_agrees_with_oracle(k, seed):
    m = layered_rpds(k, seed)
    ras = valuation_of(m)
    start = bottom_id("a0", k)
    graph = explore(m, ras, start)
    assert all(len(c.stack) <= 2 for c in graph.nodes)
    reduced, valuation = reduce_instance(m, ras, start)
    for text in FORMULAS:
        f = parse_ltl(text)
        expected = check_finite(graph, f)
        verdict = model_check_pds(reduced.pds, valuation, f, map_id(start))
        assert verdict.status == expected.status, (seed, text)
        if expected.status == VIOLATED:
            lasso = expected.witness
            check_lasso(m, lasso, reduced, valuation, bottom=start.stack[-1])
            assert not eval_word(f, lasso.stem_labels, lasso.loop_labels)
            if verdict.witness is not None:
                lasso = verdict.witness
                assert not eval_word(f, lasso.stem_labels, lasso.loop_labels)


def test_skip_loop():
    m = Rpds(1, ["s"], [Rule("s", parse_partition("{x1,x1',top}", 1), "s", SKIP)])
    ras = OrderedDict([("h", drain_automaton(1, m.states, ["s"]))])
    start = bottom_id("s", 1)
    graph = explore(m, ras, start)
    assert len(graph) == 1
    assert graph.successors == [[0]]
    assert graph.labels == [frozenset(["h"])]
    assert check_finite(graph, parse_ltl("G F h")).status == HOLDS
    verdict = check_finite(graph, parse_ltl("F G !h"))
    assert verdict.status == VIOLATED
    assert set(verdict.witness.stem) | set(verdict.witness.loop) == {start}
    assert backend(m, ras, parse_ltl("F G !h"), start).status == VIOLATED
    assert backend(m, ras, parse_ltl("G F h"), start).status == HOLDS


def test_deadlocked_runs_are_ignored():
    m = Rpds(1, ["s", "t"], [Rule("s", parse_partition("{x1,x1',top}", 1), "t", SKIP)])
    ras = OrderedDict([("h", drain_automaton(1, m.states, ["s"]))])
    start = bottom_id("s", 1)
    graph = explore(m, ras, start)
    assert graph.deadlocks == [1]
    assert check_finite(graph, parse_ltl("h & X h")).status == HOLDS
    assert backend(m, ras, parse_ltl("h & X h"), start).status == HOLDS


def test_unbounded_stack(system, start_id, in_p1):
    with pytest.raises(ResourceLimitError) as info:
        explore(system, {"in_p1": in_p1}, start_id, max_stack=5)
    assert info.value.kind == "stack"
    with pytest.raises(ResourceLimitError) as info:
        explore(system, {"in_p1": in_p1}, start_id, max_nodes=3)
    assert info.value.kind == "nodes"


def test_input_errors(system, start_id, differs, in_p1):
    with pytest.raises(ValueError):
        explore(system, {"accept": differs}, start_id)
    graph = explore(layered_rpds(1, 0), valuation_of(layered_rpds(1, 0)), bottom_id("a0", 1))
    with pytest.raises(ValueError):
        check_finite(graph, parse_ltl("G h"), start=make_id("b1", (7, ), [(7, (7, ))]))
    with pytest.raises(ValueError):
        check_finite(graph, parse_ltl("G in_p1"))
