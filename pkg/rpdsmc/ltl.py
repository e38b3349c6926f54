# -*- coding: utf-8 -*-
"""
LTL formulas: abstract syntax, parser, lasso semantics and translation to
Buchi automata.
"""

# System import
import re
import logging
import itertools
from collections import deque
from dataclasses import dataclass

# Third party import
import numpy as np
import networkx as nx

# Package import
from .utils import LtlSyntaxError


# Global parameters
logger = logging.getLogger("rpdsmc")


class Ltl(object):
    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class TrueConst(Ltl):
    pass


@dataclass(frozen=True)
class Atom(Ltl):
    name: str


@dataclass(frozen=True)
class Not(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class And(Ltl):
    left: Ltl
    right: Ltl


@dataclass(frozen=True)
class Next(Ltl):
    operand: Ltl


@dataclass(frozen=True)
class Until(Ltl):
    left: Ltl
    right: Ltl


def neg(f):
    if isinstance(f, Not):
        return f.operand
    return Not(f)


def lor(left, right):
    return neg(And(neg(left), neg(right)))


def eventually(f):
    return Until(TrueConst(), f)


def always(f):
    return neg(eventually(neg(f)))


def _wrap(f):
    text = to_string(f)
    if isinstance(f, (And, Until)):
        return "(" + text + ")"
    return text


def to_string(f):
    if isinstance(f, TrueConst):
        return "tt"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "!" + _wrap(f.operand)
    if isinstance(f, Next):
        return "X " + _wrap(f.operand)
    if isinstance(f, And):
        return _wrap(f.left) + " & " + _wrap(f.right)
    if isinstance(f, Until):
        return _wrap(f.left) + " U " + _wrap(f.right)
    raise ValueError("Unknown formula: {0!r}.".format(f))


def atoms(f):
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, TrueConst):
        return frozenset()
    if isinstance(f, (Not, Next)):
        return atoms(f.operand)
    return atoms(f.left) | atoms(f.right)


TOKEN_RE = re.compile(r"\s*(?:([()!&|])|([A-Za-z_][A-Za-z0-9_-]*))")
KEYWORDS = ("tt", "X", "U", "F", "G")


class _Parser(object):
    """ Recursive descent parser; unary operators bind tightest, then U
    (right associative), then & and |.
    """
    def __init__(self, text):
        self.text = text
        self.tokens = []
        position = 0
        while position < len(text):
            match = TOKEN_RE.match(text, position)
            if match is None or match.end() == position:
                if text[position:].strip() == "":
                    break
                offset = len(text) - len(text[position:].lstrip())
                raise LtlSyntaxError("Unexpected character '{0}'".format(text[offset]), offset)
            token = match.group(1) or match.group(2)
            self.tokens.append((token, match.start(1) if match.group(1) else match.start(2)))
            position = match.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def position(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def take(self, expected=None):
        token = self.peek()
        if token is None:
            raise LtlSyntaxError("Unexpected end of formula", self.position())
        if expected is not None and token != expected:
            raise LtlSyntaxError("Expected '{0}' but found '{1}'".format(expected, token),
                                 self.position())
        self.index += 1
        return token

    def parse(self):
        if len(self.tokens) == 0:
            raise LtlSyntaxError("Empty formula", 0)
        f = self.disjunction()
        if self.peek() is not None:
            raise LtlSyntaxError("Unexpected '{0}'".format(self.peek()), self.position())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = lor(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        f = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self):
        token = self.peek()
        if token == "!":
            self.take()
            return Not(self.unary())
        if token == "X":
            self.take()
            return Next(self.unary())
        if token == "F":
            self.take()
            return eventually(self.unary())
        if token == "G":
            self.take()
            return always(self.unary())
        return self.primary()

    def primary(self):
        position = self.position()
        token = self.take()
        if token == "(":
            f = self.disjunction()
            self.take(")")
            return f
        if token == "tt":
            return TrueConst()
        if token in KEYWORDS or not re.match(r"[A-Za-z_]", token):
            raise LtlSyntaxError("Unexpected '{0}'".format(token), position)
        return Atom(token)


def parse_ltl(text):
    """ Parse a formula: tt, atoms, !, &, |, X, U, F, G and parentheses.
    """
    return _Parser(text).parse()


def eval_word(f, stem, cycle):
    """ Evaluate a formula on the ultimately periodic word stem.cycle^w.

    Parameters
    ----------
    f: Ltl
        the formula.
    stem, cycle: sequences of sets of str
        the letters: the atoms true at each position; the cycle must not
        be empty.

    Returns
    -------
    holds: bool
        whether the word satisfies the formula.
    """
    if len(cycle) == 0:
        raise ValueError("The cycle of a lasso cannot be empty.")
    letters = list(stem) + list(cycle)
    n = len(letters)
    succ = np.arange(1, n + 1)
    succ[-1] = len(stem)
    memo = {}

    def evaluate(g):
        if g in memo:
            return memo[g]
        if isinstance(g, TrueConst):
            values = np.ones(n, dtype=bool)
        elif isinstance(g, Atom):
            values = np.array([g.name in letter for letter in letters], dtype=bool)
        elif isinstance(g, Not):
            values = ~evaluate(g.operand)
        elif isinstance(g, And):
            values = evaluate(g.left) & evaluate(g.right)
        elif isinstance(g, Next):
            values = evaluate(g.operand)[succ]
        elif isinstance(g, Until):
            left, right = evaluate(g.left), evaluate(g.right)
            values = right.copy()
            while True:
                update = right | (left & values[succ])
                if np.array_equal(update, values):
                    break
                values = update
        else:
            raise ValueError("Unknown formula: {0!r}.".format(g))
        memo[g] = values
        return values

    return bool(evaluate(f)[0])


def _closure(f):
    """ Subformulas other than negations, children first.
    """
    order, seen = [], set()

    def visit(g):
        if isinstance(g, Not):
            visit(g.operand)
            return
        if g in seen:
            return
        if isinstance(g, (Next, )):
            visit(g.operand)
        elif isinstance(g, (And, Until)):
            visit(g.left)
            visit(g.right)
        seen.add(g)
        order.append(g)

    visit(f)
    return order


class BuchiAutomaton(object):
    """ A Buchi automaton over letters encoded as bit sets of `atoms`.

    A transition (mask, value, target) is enabled by a letter L when
    L & mask == value.
    """
    def __init__(self, atoms, states, initial, accepting, transitions):
        self.atoms = tuple(atoms)
        self.states = tuple(states)
        self.initial = frozenset(initial)
        self.accepting = frozenset(accepting)
        self.transitions = transitions
        self._bits = {atom: 1 << i for i, atom in enumerate(self.atoms)}

    def __len__(self):
        return len(self.states)

    def letter(self, true_atoms):
        bits = 0
        for atom in true_atoms:
            bits |= self._bits.get(atom, 0)
        return bits

    def successors(self, state, letter):
        return [target for mask, value, target in self.transitions.get(state, ())
                if letter & mask == value]

    def accepts_lasso(self, stem, cycle):
        """ Decide whether the automaton accepts stem.cycle^w.
        """
        if len(cycle) == 0:
            raise ValueError("The cycle of a lasso cannot be empty.")
        letters = [self.letter(letter) for letter in list(stem) + list(cycle)]
        n = len(letters)

        def succ(position):
            return position + 1 if position + 1 < n else len(stem)

        graph = nx.DiGraph()
        todo = deque((0, q) for q in self.initial)
        graph.add_nodes_from(todo)
        while todo:
            position, state = todo.popleft()
            for target in self.successors(state, letters[position]):
                node = (succ(position), target)
                if node not in graph:
                    todo.append(node)
                graph.add_edge((position, state), node)
        for component in nx.strongly_connected_components(graph):
            node = next(iter(component))
            if len(component) == 1 and not graph.has_edge(node, node):
                continue
            if any(state in self.accepting for _, state in component):
                return True
        return False


def to_buchi(f, alphabet=None):
    """ Translate a formula into a Buchi automaton accepting its models.

    The states are the consistent sets of subformulas; transitions read the
    atoms of their source set. The generalized acceptance sets (one per
    until subformula) are merged with a counter.

    Parameters
    ----------
    f: Ltl
        the formula.
    alphabet: iterable of str, default None
        the atoms letters range over; defaults to the atoms of f.

    Returns
    -------
    automaton: BuchiAutomaton
        the translation, restricted to states reachable from the initial
        states.
    """
    names = tuple(alphabet) if alphabet is not None else tuple(sorted(atoms(f)))
    closure = _closure(f)
    position = {g: i for i, g in enumerate(closure)}
    free = [g for g in closure if isinstance(g, (Atom, Next, Until))]
    untils = [g for g in closure if isinstance(g, Until)]
    nexts = [g for g in closure if isinstance(g, Next)]
    missing = [g.name for g in closure if isinstance(g, Atom) and g.name not in names]
    if missing:
        raise ValueError("Atoms {0} are not in the alphabet.".format(sorted(missing)))

    def value(bits, g):
        if isinstance(g, Not):
            return not value(bits, g.operand)
        return bits[position[g]]

    elementary = []
    for choice in itertools.product((False, True), repeat=len(free)):
        bits = [False] * len(closure)
        assigned = dict(zip(free, choice))
        for i, g in enumerate(closure):
            if isinstance(g, TrueConst):
                bits[i] = True
            elif isinstance(g, And):
                bits[i] = value(bits, g.left) and value(bits, g.right)
            else:
                bits[i] = assigned[g]
        consistent = True
        for g in untils:
            if value(bits, g.right) and not bits[position[g]]:
                consistent = False
            if bits[position[g]] and not value(bits, g.right) and not value(bits, g.left):
                consistent = False
        if consistent:
            elementary.append(tuple(bits))

    atom_bits = {name: 1 << i for i, name in enumerate(names)}
    atom_nodes = [g for g in closure if isinstance(g, Atom)]
    mask = 0
    for g in atom_nodes:
        mask |= atom_bits[g.name]

    def guard(bits):
        letter = 0
        for g in atom_nodes:
            if bits[position[g]]:
                letter |= atom_bits[g.name]
        return letter

    def step(src, dst):
        for g in nexts:
            if src[position[g]] != value(dst, g.operand):
                return False
        for g in untils:
            expected = value(src, g.right) or (value(src, g.left) and dst[position[g]])
            if src[position[g]] != expected:
                return False
        return True

    fair = [frozenset(b for b in elementary
                      if not b[position[g]] or value(b, g.right)) for g in untils]
    if len(fair) == 0:
        fair = [frozenset(elementary)]
    m = len(fair)

    initial = [(b, 0) for b in elementary if value(b, f)]
    ids, order, transitions = {}, [], {}
    todo = deque()
    for state in initial:
        ids[state] = len(order)
        order.append(state)
        todo.append(state)
    while todo:
        src, counter = todo.popleft()
        nxt = (counter + 1) % m if src in fair[counter] else counter
        edges = []
        for dst in elementary:
            if not step(src, dst):
                continue
            target = (dst, nxt)
            if target not in ids:
                ids[target] = len(order)
                order.append(target)
                todo.append(target)
            edges.append((mask, guard(src), ids[target]))
        transitions[ids[(src, counter)]] = edges
    accepting = [ids[s] for s in order if s[1] == 0 and s[0] in fair[0]]
    logger.debug("Buchi automaton of %s: %s states from %s elementary sets.",
                 to_string(f), len(order), len(elementary))
    return BuchiAutomaton(names, range(len(order)), [ids[s] for s in initial],
                          accepting, transitions)
