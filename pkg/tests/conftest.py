# -*- coding: utf-8 -*-
"""
Shared fixtures: the bundled instances and the named relations over two
registers.
"""

# System import
import os

# Third party import
import numpy as np
import pytest

# Package import
from rpdsmc.eqrel import parse_partition, enumerate_phi, enumerate_reg
from rpdsmc.formats import load_rpds, load_ra, load_id
from rpdsmc.machines import Rule, Rpds, Ra, POP, push, make_id
from rpdsmc.reduction import ReducedState


INSTANCES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                         "instances")
PHIS = {
    "fresh1_read2": "{x2,x2',top}",
    "fresh1_read1": "{x1,top}{x2,x2'}",
    "load1": "{x2,x2'}{x1',top}",
    "fresh2_read2": "{x1,x1'}{x2,top}",
    "keep": "{x1,x1'}{x2,x2'}",
    "keep_read1": "{x1,x1',top}{x2,x2'}",
    "keep_read2": "{x1,x1'}{x2,x2',top}",
}


def instance(name):
    return os.path.join(INSTANCES, name)


@pytest.fixture(scope="session")
def phi():
    return {name: parse_partition(text, 2) for name, text in PHIS.items()}


@pytest.fixture(scope="session")
def system():
    return load_rpds(instance("store_values.rpds"))


@pytest.fixture(scope="session")
def differs():
    return load_ra(instance("popped_differs.ra"))


@pytest.fixture(scope="session")
def start_id():
    return load_id(instance("start.id"))


@pytest.fixture(scope="session")
def accepted_id():
    return load_id(instance("accepted.id"))


@pytest.fixture(scope="session")
def in_p1():
    return load_ra(instance("in_p1.ra"))


@pytest.fixture(scope="session")
def in_p2():
    return load_ra(instance("in_p2.ra"))


@pytest.fixture
def rng():
    return np.random.default_rng(20221)


def keep_registers(k):
    """ The relations popping any top while keeping the registers.
    """
    keep = [(i, i + k) for i in range(k)]
    guards = []
    for phi in enumerate_phi(k):
        if all(phi.related(a, b) for a, b in keep):
            guards.append(phi)
    return guards


def drain_automaton(k, states, holding):
    """ An automaton accepting every ID whose control state is in `holding`.
    """
    drain = "drain"
    rules = [Rule(p, guard, drain, POP) for p in list(holding) + [drain]
             for guard in keep_registers(k)]
    base = Rpds(k, list(states) + [drain], rules)
    return Ra(base, initial=states, accepting=[(drain, psi) for psi in enumerate_reg(k)])


def stored_push_rule(phi, target="p1"):
    """ The reduced rule of r2 in p1 when x1 was read last.
    """
    return Rule(ReducedState("p1", phi["keep_read1"]), phi["fresh1_read2"],
                ReducedState(target, phi["keep_read1"]), push(phi["fresh1_read1"]))


def bottom_id(state, k):
    theta = tuple(range(k))
    return make_id(state, theta, [(0, theta)])
