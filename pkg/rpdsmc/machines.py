# -*- coding: utf-8 -*-
"""
Register pushdown systems, register automata, pushdown systems and their
pop-only automata, with their step semantics.

Data values are natural numbers. An RPDS instantaneous description (ID)
holds a control state, the current register assignment and a stack of
cells (value, saved assignment), top first.
"""

# System import
import logging
from collections import namedtuple, OrderedDict

# Package import
from .eqrel import Partition, RegPartition, models_reg, models_triple
from .eqrel import reg, primed, top
from .utils import ImproperIdError


# Global parameters
logger = logging.getLogger("rpdsmc")
Command = namedtuple("Command", ["op", "arg"], defaults=(None, ))
Rule = namedtuple("Rule", ["source", "guard", "target", "command"])
StackCell = namedtuple("StackCell", ["value", "saved"])
RpdsId = namedtuple("RpdsId", ["state", "theta", "stack"])
PdsId = namedtuple("PdsId", ["state", "stack"])
POP = Command("pop")
SKIP = Command("skip")


def push(arg):
    return Command("push", arg)


def make_id(state, theta, stack=()):
    """ Build an RPDS ID from plain sequences; `stack` holds (value, saved)
    pairs, top first.
    """
    return RpdsId(state, tuple(theta),
                  tuple(StackCell(value, tuple(saved)) for value, saved in stack))


def _unique(items):
    return tuple(OrderedDict.fromkeys(items))


class Rpds(object):
    """ A register pushdown system with k registers.
    """
    def __init__(self, k, states, rules, names=None):
        """ Init class.

        Parameters
        ----------
        k: int
            the number of registers.
        states: iterable of str
            the control states.
        rules: iterable of Rule
            the rules: the guard is a Partition and the command a pop, a
            skip or a push of the register j in 1..k.
        names: dict, default None
            optional display names of the rules.
        """
        if k < 1:
            raise ValueError("Number of registers must be positive, got {0}.".format(k))
        self.k = k
        self.states = _unique(states)
        self.rules = _unique(rules)
        self.names = dict(names or {})
        self._by_source = {}
        known = set(self.states)
        for rule in self.rules:
            if rule.source not in known or rule.target not in known:
                raise ValueError("Rule {0} uses an unknown state.".format(rule))
            if not isinstance(rule.guard, Partition) or rule.guard.k != k:
                raise ValueError("Rule {0} needs a guard over {1} registers.".format(rule, k))
            if rule.command.op == "push":
                if not (isinstance(rule.command.arg, int) and 1 <= rule.command.arg <= k):
                    raise ValueError("Rule {0} pushes an unknown register.".format(rule))
            elif rule.command.op not in ("pop", "skip"):
                raise ValueError("Unknown command: {0}.".format(rule.command))
            self._by_source.setdefault(rule.source, []).append(rule)

    def rules_from(self, state):
        return self._by_source.get(state, ())

    def rule_name(self, rule):
        if rule in self.names:
            return self.names[rule]
        return "r{0}".format(self.rules.index(rule) + 1)

    def rule_by_name(self, name):
        for rule in self.rules:
            if self.rule_name(rule) == name:
                return rule
        raise KeyError("Unknown rule: '{0}'.".format(name))


class Ra(object):
    """ A register automaton: an RPDS with pop rules only, initial states
    and an acceptance condition on the registers once the stack is empty.
    """
    def __init__(self, base, initial, accepting):
        for rule in base.rules:
            if rule.command != POP:
                raise ValueError("Register automaton rules must pop: {0}.".format(rule))
        self.base = base
        self.k = base.k
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        for state in self.initial:
            if state not in base.states:
                raise ValueError("Unknown initial state: {0}.".format(state))
        for state, psi in self.accepting:
            if state not in base.states:
                raise ValueError("Unknown accepting state: {0}.".format(state))
            if not isinstance(psi, RegPartition) or psi.k != self.k:
                raise ValueError("Acceptance needs a relation over {0} registers.".format(self.k))

    @property
    def states(self):
        return self.base.states

    def as_valuation(self, states):
        """ Lift the automaton so that its initial states are exactly
        `states`: acceptance of every ID is preserved and IDs in the other
        listed states are rejected.
        """
        states = _unique(states)
        clash = set(states) & (set(self.base.states) - self.initial)
        used = set(self.base.states) | set(states)
        rename = {}
        for state in self.base.states:
            if state in clash:
                name = state + "~"
                while name in used:
                    name += "~"
                used.add(name)
                rename[state] = name
            else:
                rename[state] = state
        rules = [Rule(rename[r.source], r.guard, rename[r.target], r.command)
                 for r in self.base.rules]
        names = {Rule(rename[r.source], r.guard, rename[r.target], r.command): name
                 for r, name in self.base.names.items()}
        lifted_states = [rename[s] for s in self.base.states]
        lifted_states += [s for s in states if s not in lifted_states]
        base = Rpds(self.k, lifted_states, rules, names)
        accepting = [(rename[q], psi) for q, psi in self.accepting]
        return Ra(base, initial=states, accepting=accepting)


class Pds(object):
    """ A pushdown system: guards and pushed data are stack symbols.
    """
    def __init__(self, states, alphabet, rules):
        self.states = _unique(states)
        self.alphabet = _unique(alphabet)
        self.rules = _unique(rules)
        self._index = {}
        known, symbols = set(self.states), set(self.alphabet)
        for rule in self.rules:
            assert rule.source in known and rule.target in known, (
                "Rule %s uses an unknown state" % (rule, ))
            assert rule.guard in symbols, "Rule %s reads an unknown symbol" % (rule, )
            assert rule.command.op in ("pop", "skip", "push")
            if rule.command.op == "push":
                assert rule.command.arg in symbols, (
                    "Rule %s pushes an unknown symbol" % (rule, ))
            self._index.setdefault((rule.source, rule.guard), []).append(rule)

    def rules_at(self, state, symbol):
        return self._index.get((state, symbol), ())


class Nfa(object):
    """ A pop-only PDS with initial and final states: it accepts an ID if a
    run from an initial state empties the stack in a final state.
    """
    def __init__(self, base, initial, final):
        for rule in base.rules:
            if rule.command != POP:
                raise ValueError("Automaton rules must pop: {0}.".format(rule))
        self.base = base
        self.initial = frozenset(initial)
        self.final = frozenset(final)

    @property
    def states(self):
        return self.base.states


def values_of(c):
    values = set(c.theta)
    for cell in c.stack:
        values.add(cell.value)
        values.update(cell.saved)
    return values


def frsp(theta_next, d, theta, saved):
    """ Check the freshness of an update: every new register value is either
    carried over from the registers or the top value, or absent from all the
    saved assignments.

    Parameters
    ----------
    theta_next: tuple of int
        the assignment after the step.
    d: int
        the value on top of the stack before the step.
    theta: tuple of int
        the assignment before the step.
    saved: sequence of tuple of int
        the assignments saved in the stack.

    Returns
    -------
    fresh: bool
        the update respects freshness.
    """
    if len(theta_next) != len(theta):
        raise ValueError("Assignments of {0} and {1} registers.".format(
            len(theta_next), len(theta)))
    old = set(theta) | {d}
    stored = set(value for assignment in saved for value in assignment)
    return all(value in old or value not in stored for value in theta_next)


def is_proper(c):
    """ Check that an ID is reachable-shaped: every stored value was held
    by its saved assignment, and a value lost by the registers never comes
    back.
    """
    cells = list(reversed(c.stack))
    assignments = [set(cell.saved) for cell in cells] + [set(c.theta)]
    n = len(assignments)
    suffix = [set() for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | assignments[i]
    for i, cell in enumerate(cells):
        if cell.value not in assignments[i]:
            return False
    for i in range(n):
        for j in range(i + 1, n):
            lost = assignments[i] - assignments[j]
            if i < n - 1 and cells[i].value not in assignments[j]:
                lost.add(cells[i].value)
            if lost & suffix[j + 1]:
                return False
    return True


def _target_assignment(phi, theta, d, avoid):
    """ The canonical assignment reached from (theta, d) under phi, or None
    when (theta, d) does not match phi. Unconstrained registers take the
    smallest values not in `avoid`, in block order.
    """
    k = phi.k
    t = top(k)
    before = list(range(k)) + [t]
    value = dict(zip(range(k), theta))
    value[t] = d
    for a in before:
        for b in before:
            if a < b and phi.related(a, b) != (value[a] == value[b]):
                return None
    fresh, target, candidate = {}, [], 0
    for j in range(1, k + 1):
        s = primed(j, k)
        rep = phi.rep[s]
        if rep < k:
            target.append(value[rep])
        elif phi.related(s, t):
            target.append(d)
        else:
            if rep not in fresh:
                while candidate in avoid:
                    candidate += 1
                fresh[rep] = candidate
                candidate += 1
            target.append(fresh[rep])
    target = tuple(target)
    assert models_triple(theta, d, target, phi), "Inconsistent canonical update"
    return target


def rpds_successors(m, c, check=True):
    """ Compute the canonical successors of an ID.

    Parameters
    ----------
    m: Rpds or Ra
        the system.
    c: RpdsId
        a proper ID.
    check: bool, default True
        check that the ID is proper.

    Returns
    -------
    successors: tuple of (Rule, RpdsId)
        one successor per applicable rule, in rule order; an empty stack
        has no successor.
    """
    m = getattr(m, "base", m)
    if check and not is_proper(c):
        raise ImproperIdError("ID {0} is not proper.".format(c))
    if len(c.stack) == 0:
        return ()
    d = c.stack[0].value
    avoid = values_of(c)
    saved = [cell.saved for cell in c.stack]
    successors = []
    for rule in m.rules_from(c.state):
        theta = _target_assignment(rule.guard, c.theta, d, avoid)
        if theta is None:
            continue
        assert frsp(theta, d, c.theta, saved), "Non fresh canonical update"
        if rule.command.op == "pop":
            stack = c.stack[1:]
        elif rule.command.op == "skip":
            stack = c.stack
        else:
            stack = (StackCell(theta[reg(rule.command.arg, m.k)], theta), ) + c.stack
        successors.append((rule, RpdsId(rule.target, theta, stack)))
    return tuple(successors)


def rpds_run(m, c, choices):
    """ Follow a sequence of choices from an ID.

    Parameters
    ----------
    m: Rpds
        the system.
    c: RpdsId
        the start ID.
    choices: iterable of int or str
        successor indices or rule names.

    Returns
    -------
    run: list of (Rule, RpdsId)
        the steps taken; the run stops early at a deadlock.
    """
    run, current = [], c
    for position, choice in enumerate(choices):
        successors = rpds_successors(m, current)
        if len(successors) == 0:
            logger.warning("Deadlock after %s steps in state %s.", position, current.state)
            break
        if isinstance(choice, int):
            if not 0 <= choice < len(successors):
                raise ValueError("Step {0}: choice {1} out of {2} successors.".format(
                    position + 1, choice, len(successors)))
            step = successors[choice]
        else:
            matches = [s for s in successors if m.rule_name(s[0]) == choice]
            if len(matches) == 0:
                enabled = ", ".join(m.rule_name(s[0]) for s in successors)
                raise ValueError("Step {0}: rule {1} is not enabled (enabled: {2}).".format(
                    position + 1, choice, enabled))
            step = matches[0]
        run.append(step)
        current = step[1]
    return run


def _drains(a, c, memo):
    key = (c.state, c.theta, c.stack)
    if key in memo:
        return memo[key]
    if len(c.stack) == 0:
        result = any(q == c.state and models_reg(c.theta, psi)
                     for q, psi in a.accepting)
    else:
        result = any(_drains(a, nxt, memo)
                     for _, nxt in rpds_successors(a.base, c, check=False))
    memo[key] = result
    return result


def ra_accepts(a, c):
    """ Check whether a register automaton accepts an ID: some run from the
    ID empties the stack in an accepting configuration.
    """
    if not is_proper(c):
        raise ImproperIdError("ID {0} is not proper.".format(c))
    if c.state not in a.initial:
        return False
    return _drains(a, c, {})


def pds_successors(m, c):
    if len(c.stack) == 0:
        return ()
    successors = []
    for rule in m.rules_at(c.state, c.stack[0]):
        if rule.command.op == "pop":
            stack = c.stack[1:]
        elif rule.command.op == "skip":
            stack = c.stack
        else:
            stack = (rule.command.arg, ) + c.stack
        successors.append((rule, PdsId(rule.target, stack)))
    return tuple(successors)


def nfa_accepts(a, c):
    if c.state not in a.initial:
        return False
    current = {c.state}
    for symbol in c.stack:
        current = {rule.target for state in current
                   for rule in a.base.rules_at(state, symbol)}
        if not current:
            return False
    return bool(current & a.final)
