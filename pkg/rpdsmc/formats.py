# -*- coding: utf-8 -*-
"""
Text formats of systems, automata and IDs.

A system file lists `k=<n>`, `states ...` and lines
`rule [<name>:] <p> <relation> -> <q> pop|skip|push <j>`; an automaton file
adds `initial ...` and `accept <q> <register relation>` lines and only pops.
A relation is written as blocks, e.g. {x1,top}{x2,x2'}; unlisted symbols
are singletons and `*` stands for every relation. An ID reads
(p0,[d1,d0],(d0,[d1,d0])), the stack top first.
"""

# System import
import re
import logging

# Package import
from .eqrel import (parse_partition, parse_reg_partition, enumerate_phi,
                    enumerate_reg)
from .machines import Rule, Rpds, Ra, make_id, POP, SKIP, push
from .utils import FormatError


# Global parameters
logger = logging.getLogger("rpdsmc")
NAME = r"[A-Za-z_][A-Za-z0-9_'~.-]*"
RULE_RE = re.compile(r"^rule\s+(?:(" + NAME + r")\s*:\s*)?(" + NAME + r")\s+(.*?)\s*->\s*(" +
                     NAME + r")\s*(.*)$")
K_RE = re.compile(r"^k\s*=\s*(\d+)$")
VALUE_RE = re.compile(r"^d(\d+)$")


def render_value(v):
    return "d{0}".format(v)


def render_assignment(theta):
    return "[" + ",".join(render_value(v) for v in theta) + "]"


def render_id(c):
    cells = "".join("({0},{1})".format(render_value(cell.value), render_assignment(cell.saved))
                    for cell in c.stack)
    return "({0},{1},{2})".format(c.state, render_assignment(c.theta), cells or "ε")


def render_pds_id(c):
    return "({0},{1})".format(c.state, " ".join(str(s) for s in c.stack) or "ε")


def render_command(command):
    if command.op == "push":
        return "push {0}".format(command.arg)
    return command.op


def render_rule(rule, name=None):
    prefix = "{0}: ".format(name) if name else ""
    return "rule {0}{1} {2} -> {3} {4}".format(prefix, rule.source, rule.guard, rule.target,
                                               render_command(rule.command))


def render_pds_rule(rule):
    return "<{0}, {1}> -> <{2}, {3}>".format(rule.source, rule.guard, rule.target,
                                            render_command(rule.command))


def render_rpds(m):
    lines = ["k={0}".format(m.k), "states " + " ".join(m.states)]
    lines += [render_rule(rule, m.rule_name(rule)) for rule in m.rules]
    return "\n".join(lines) + "\n"


def render_ra(a):
    lines = ["k={0}".format(a.k), "states " + " ".join(a.states),
             "initial " + " ".join(s for s in a.states if s in a.initial)]
    lines += [render_rule(rule, a.base.rule_name(rule)) for rule in a.base.rules]
    lines += ["accept {0} {1}".format(q, psi) for q, psi in sorted(
        a.accepting, key=lambda item: (item[0], item[1].rep))]
    return "\n".join(lines) + "\n"


def render_reduced(reduced):
    """ The PDS of a reduction, each rule followed by its provenance.
    """
    pds = reduced.pds
    lines = ["# {0} states, {1} symbols, {2} rules".format(
        len(pds.states), len(pds.alphabet), len(pds.rules))]
    for rule in pds.rules:
        origin = reduced.provenance.get(rule)
        lines.append(render_pds_rule(rule))
        if origin is not None:
            lines.append("    # from {0} with symbol {1} and state relation {2}".format(
                reduced.source.rule_name(origin.source), origin.symbol, origin.relation))
    return "\n".join(lines) + "\n"


def render_graph(graph):
    lines = []
    for n, c in enumerate(graph.nodes):
        atoms = ",".join(sorted(graph.labels[n]))
        targets = " ".join("n{0}".format(t) for t in graph.successors[n]) or "deadlock"
        lines.append("n{0} {1} {{{2}}} -> {3}".format(n, render_id(c), atoms, targets))
    return "\n".join(lines) + "\n"


def render_lasso(lasso, render=render_id):
    lines = []
    for c, letter in zip(lasso.stem, lasso.stem_labels):
        lines.append("  {0} {{{1}}}".format(render(c), ",".join(sorted(letter))))
    lines.append("  loop:")
    for c, letter in zip(lasso.loop, lasso.loop_labels):
        lines.append("  {0} {{{1}}}".format(render(c), ",".join(sorted(letter))))
    return "\n".join(lines)


def _lines(text):
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield number, raw, line.strip()


def _column(raw, token):
    position = raw.find(token)
    return position + 1 if position >= 0 else 1


def _parse_machine(text, path, automaton):
    k, states, initial, accepting = None, None, None, []
    rules, names = [], {}
    for number, raw, line in _lines(text):
        keyword = line.split()[0]

        def fail(message, token=keyword):
            raise FormatError(message, path, number, _column(raw, token))

        if K_RE.match(line):
            if k is not None:
                fail("k is defined twice")
            k = int(K_RE.match(line).group(1))
            if k < 1:
                fail("k must be positive")
        elif keyword == "states":
            states = line.split()[1:]
            if len(states) == 0:
                fail("no states listed")
        elif keyword == "initial":
            if not automaton:
                fail("'initial' is only allowed in automaton files")
            initial = line.split()[1:]
        elif keyword == "accept":
            if not automaton:
                fail("'accept' is only allowed in automaton files")
            if k is None:
                fail("k must be defined first")
            parts = line.split(None, 2)
            if len(parts) < 2:
                fail("expected 'accept <state> <relation>'")
            relation = parts[2] if len(parts) > 2 else ""
            if relation.strip() == "*":
                accepting.extend((parts[1], psi) for psi in enumerate_reg(k))
            else:
                try:
                    accepting.append((parts[1], parse_reg_partition(relation, k)))
                except ValueError as error:
                    fail(str(error), relation or parts[1])
        elif keyword == "rule":
            if k is None:
                fail("k must be defined first")
            match = RULE_RE.match(line)
            if match is None:
                fail("expected 'rule [<name>:] <p> <relation> -> <q> <command>'")
            name, source, relation, target, command_text = match.groups()
            words = command_text.split()
            if words == ["pop"]:
                command = POP
            elif words == ["skip"] and not automaton:
                command = SKIP
            elif len(words) == 2 and words[0] == "push" and words[1].isdigit() and not automaton:
                command = push(int(words[1]))
                if not 1 <= command.arg <= k:
                    fail("register {0} out of range".format(command.arg), words[1])
            elif automaton and words == []:
                command = POP
            else:
                fail("unknown command '{0}'".format(command_text), command_text or target)
            if relation.strip() == "*":
                guards = enumerate_phi(k)
            else:
                try:
                    guards = [parse_partition(relation, k)]
                except ValueError as error:
                    fail(str(error), relation)
            for guard in guards:
                rule = Rule(source, guard, target, command)
                rules.append(rule)
                if name and len(guards) == 1:
                    names[rule] = name
        else:
            fail("unknown keyword '{0}'".format(keyword))
    if k is None:
        raise FormatError("missing 'k=<n>' line", path)
    if states is None:
        raise FormatError("missing 'states' line", path)
    try:
        m = Rpds(k, states, rules, names)
    except ValueError as error:
        raise FormatError(str(error), path)
    if not automaton:
        return m
    if initial is None:
        raise FormatError("missing 'initial' line", path)
    try:
        return Ra(m, initial, accepting)
    except ValueError as error:
        raise FormatError(str(error), path)


def parse_rpds(text, path=None):
    return _parse_machine(text, path, automaton=False)


def parse_ra(text, path=None):
    """ Parse an automaton file; rules may omit the pop command.
    """
    return _parse_machine(text, path, automaton=True)


ID_RE = re.compile(r"^\(\s*(" + NAME + r")\s*,\s*\[([^\]]*)\]\s*,(.*)\)$", re.S)
CELL_RE = re.compile(r"\(\s*(" + NAME + r")\s*,\s*\[([^\]]*)\]\s*\)")


class ValueNames(object):
    """ Map data value names to distinct naturals: d<n> is n and other names
    take the next unused naturals.
    """
    def __init__(self):
        self.values = {}

    def __call__(self, name):
        if name not in self.values:
            match = VALUE_RE.match(name)
            if match is not None:
                value = int(match.group(1))
            else:
                value = max([-1] + [v for v in self.values.values()]) + 1
            if value in self.values.values():
                value = max(self.values.values()) + 1
            self.values[name] = value
        return self.values[name]


def parse_id(text, k=None, path=None):
    """ Parse an ID such as (p1,[d2,d0],(d2,[d2,d0])(d0,[d1,d0])).
    """
    body = " ".join(line for _, _, line in _lines(text))
    match = ID_RE.match(body)
    if match is None:
        raise FormatError("expected '(<state>,[<values>],<cells>)'", path, 1, 1)
    state, theta_text, cells_text = match.groups()
    names = ValueNames()

    def values(listing):
        items = [item.strip() for item in listing.split(",") if item.strip()]
        for item in items:
            if not re.match(NAME + "$", item):
                raise FormatError("bad data value '{0}'".format(item), path, 1,
                                  _column(body, item))
        return [names(item) for item in items]

    theta = values(theta_text)
    cells, end = [], 0
    cells_text = cells_text.strip()
    if cells_text not in ("", "ε", "eps"):
        for cell in CELL_RE.finditer(cells_text):
            if cells_text[end:cell.start()].strip():
                raise FormatError("unexpected '{0}'".format(cells_text[end:cell.start()].strip()),
                                  path, 1, _column(body, cells_text[end:cell.start()].strip()))
            end = cell.end()
            cells.append((values(cell.group(1))[0], values(cell.group(2))))
        if cells_text[end:].strip():
            raise FormatError("unexpected '{0}'".format(cells_text[end:].strip()), path, 1,
                              _column(body, cells_text[end:].strip()))
    k = len(theta) if k is None else k
    for assignment in [theta] + [saved for _, saved in cells]:
        if len(assignment) != k:
            raise FormatError("expected {0} registers, got {1}".format(k, len(assignment)),
                              path, 1, 1)
    return make_id(state, theta, cells)


def _read(path):
    with open(path, "rt", encoding="utf-8") as of:
        return of.read()


def load_rpds(path):
    return parse_rpds(_read(path), path)


def load_ra(path):
    return parse_ra(_read(path), path)


def load_id(path, k=None):
    return parse_id(_read(path), k, path)
