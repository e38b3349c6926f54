# -*- coding: utf-8 -*-

# System import
from collections import defaultdict

# Third party import
import pytest
from hypothesis import given, settings, strategies as st

# Package import
from rpdsmc.eqrel import (Partition, enumerate_phi, enumerate_reg, bell_number, parse_partition,
                          parse_reg_partition, make_partition, induced, induced_reg,
                          models_triple, models_reg, lat, compose, compose_top, composable,
                          composable_top, eqj, pre_view, post_view, symbol_position, Symbol)
from rpdsmc.machines import make_id, is_proper
from rpdsmc.utils import ResourceLimitError


def test_bell_numbers():
    assert [bell_number(n) for n in range(8)] == [1, 1, 2, 5, 15, 52, 203, 877]


@pytest.mark.parametrize("k,count", [(1, 5), (2, 52), (3, 877)])
def test_enumerate_phi_counts(k, count):
    phis = enumerate_phi(k)
    assert len(phis) == count
    assert len(set(phis)) == count
    assert all(phi.k == k for phi in phis)


def test_enumerate_phi_guards():
    with pytest.raises(ResourceLimitError) as info:
        enumerate_phi(4)
    assert info.value.kind == "phi"
    with pytest.raises(ValueError):
        enumerate_phi(0)
    assert len(enumerate_phi(4, max_k=4)) == bell_number(9)


def test_enumerate_reg():
    assert len(enumerate_reg(2)) == 2
    assert len(enumerate_reg(3)) == 5


def test_symbols():
    assert symbol_position("x1", 2) == 0
    assert symbol_position("x2'", 2) == 3
    assert symbol_position("top", 2) == 4
    assert symbol_position(Symbol("primed", 1), 2) == 2
    assert symbol_position(Symbol("top"), 3) == 6
    with pytest.raises(ValueError):
        symbol_position("x3", 2)
    with pytest.raises(ValueError):
        symbol_position("y1", 2)


def test_text_syntax(phi):
    assert str(phi["fresh1_read1"]) == "{x1,top}{x2,x2'}{x1'}"
    assert str(phi["keep_read1"]) == "{x1,x1',top}{x2,x2'}"
    assert parse_partition("{}", 2) == Partition(2, range(5))
    assert make_partition([["x1", "top"], ["x2", "x2'"]], 2) == phi["fresh1_read1"]
    assert parse_reg_partition("{x1,x2}", 2) == induced_reg((7, 7))
    for name, relation in phi.items():
        assert parse_partition(str(relation), 2) == relation


@pytest.mark.parametrize("text", ["{x1}{x1,x2}", "{x3}", "{y1}", "{x1,top} junk", "x1,top"])
def test_text_syntax_errors(text):
    with pytest.raises(ValueError):
        parse_partition(text, 2)


def test_reg_partition_rejects_primed():
    with pytest.raises(ValueError):
        parse_reg_partition("{x1,x1'}", 2)


def test_models_triple_along_a_run(phi):
    # r1 from (p0,[d1,d0]) reading d0 then r2 reading d2
    assert models_triple((1, 0), 0, (2, 0), phi["fresh1_read2"])
    assert models_triple((2, 0), 2, (3, 0), phi["fresh1_read1"])
    assert not models_triple((2, 0), 2, (3, 0), phi["load1"])
    assert models_reg((4, 2), parse_reg_partition("{x1}{x2}", 2))
    assert not models_reg((4, 4), parse_reg_partition("{x1}{x2}", 2))


def test_arity_mismatch_is_an_error(phi):
    single = parse_partition("{x1,x1',top}", 1)
    with pytest.raises(ValueError):
        models_triple((2, 0), 2, (3, 0, 1), phi["fresh1_read1"])
    with pytest.raises(ValueError):
        models_triple((0, ), 0, (0, ), phi["keep"])
    with pytest.raises(ValueError):
        models_reg((0, ), parse_reg_partition("{x1}{x2}", 2))
    with pytest.raises(ValueError):
        composable(phi["keep"], single)
    with pytest.raises(ValueError):
        composable_top(single, phi["keep"])
    with pytest.raises(ValueError):
        compose(phi["keep"], single)


def test_goldens(phi):
    assert eqj(phi["fresh1_read1"], 1) == phi["keep_read1"]
    assert eqj(phi["fresh1_read1"], 2) == phi["keep_read2"]
    assert compose_top(phi["keep_read1"], phi["fresh1_read1"]) == phi["fresh1_read1"]
    assert compose(phi["fresh1_read1"], phi["fresh1_read1"]) == phi["fresh1_read1"]
    assert lat(phi["fresh1_read2"]) == parse_reg_partition("{x1}{x2}", 2)


def test_composability_goldens(phi):
    assert composable(phi["fresh1_read2"], phi["fresh1_read1"])
    assert not composable_top(phi["fresh1_read2"], phi["fresh1_read1"])
    assert composable_top(phi["fresh1_read2"], phi["fresh2_read2"])
    assert composable_top(phi["fresh1_read1"], phi["load1"])


def test_compose_rejects_mismatch(phi):
    # keep leaves top apart from the registers, fresh1_read1 relates x1 with top
    assert not composable_top(phi["keep"], phi["fresh1_read1"])
    with pytest.raises(ValueError):
        compose_top(phi["keep"], phi["fresh1_read1"])
    merged = parse_partition("{x1',x2'}", 2)
    assert not composable(merged, phi["fresh1_read1"])
    with pytest.raises(ValueError):
        compose(merged, phi["fresh1_read1"])
    with pytest.raises(ValueError):
        eqj(phi["fresh1_read1"], 3)


values = st.integers(min_value=0, max_value=4)


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=2).flatmap(
    lambda k: st.tuples(st.lists(values, min_size=k, max_size=k), values,
                        st.lists(values, min_size=k, max_size=k))))
def test_every_triple_models_exactly_one_relation(triple):
    theta, d, theta_prime = triple
    k = len(theta)
    matches = [phi for phi in enumerate_phi(k) if models_triple(theta, d, theta_prime, phi)]
    assert matches == [induced(theta, d, theta_prime)]
    assert lat(matches[0]) == induced_reg(theta_prime)
    for j in range(1, k + 1):
        assert eqj(matches[0], j) == induced(theta_prime, theta_prime[j - 1], theta_prime)


def _draw(rng, k, n=6):
    return tuple(int(v) for v in rng.integers(0, n, size=k))


def test_compose_soundness_on_proper_ids(rng):
    checked = 0
    while checked < 10000:
        k = int(rng.integers(1, 3))
        theta1, theta2, theta3 = _draw(rng, k), _draw(rng, k), _draw(rng, k)
        d1, d2 = theta1[int(rng.integers(k))], theta2[int(rng.integers(k))]
        if not is_proper(make_id("p", theta3, [(d2, theta2), (d1, theta1)])):
            continue
        first, second = induced(theta1, d1, theta2), induced(theta2, d2, theta3)
        assert composable(first, second)
        assert models_triple(theta1, d1, theta3, compose(first, second))
        checked += 1


def test_compose_top_soundness(rng):
    checked = 0
    while checked < 10000:
        k = int(rng.integers(1, 3))
        theta1, theta2, theta3 = _draw(rng, k), _draw(rng, k), _draw(rng, k)
        d = int(rng.integers(0, 6))
        if not set(theta1) & set(theta3) <= set(theta2) | {d}:
            continue
        first, second = induced(theta1, d, theta2), induced(theta2, d, theta3)
        assert composable_top(first, second)
        assert models_triple(theta1, d, theta3, compose_top(first, second))
        checked += 1


def _group(phis, view, with_top):
    groups = defaultdict(list)
    for phi in phis:
        groups[view(phi, with_top=with_top)].append(phi)
    return groups


@pytest.mark.parametrize("with_top", [False, True])
def test_associativity_exhaustive(with_top):
    operator = compose_top if with_top else compose
    phis = enumerate_phi(2)
    by_pre = _group(phis, pre_view, with_top)
    by_post = _group(phis, post_view, with_top)
    triples = 0
    for second in phis:
        for first in by_post[pre_view(second, with_top=with_top)]:
            left = operator(first, second)
            for third in by_pre[post_view(second, with_top=with_top)]:
                assert operator(left, third) == operator(first, operator(second, third))
                triples += 1
    assert triples > 0
