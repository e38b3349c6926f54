# -*- coding: utf-8 -*-
"""
LTL model checking of pushdown systems whose atoms are regular sets of
configurations.

The stack is annotated bottom-up with the states of a deterministic
backward automaton, so the atoms holding in a configuration only depend on
its control state and annotated top cell. The product with a Buchi
automaton of the negated formula is a Buchi pushdown system; it has an
accepting run iff some reachable head repeats through an accepting state,
which pre* saturation decides.
"""

# System import
import logging
from collections import namedtuple, defaultdict, deque, OrderedDict

# Third party import
import networkx as nx
from tqdm import tqdm

# Package import
from .ltl import Not, to_buchi, atoms as formula_atoms
from .machines import PdsId, push
from .utils import Limits, ResourceLimitError


# Global parameters
logger = logging.getLogger("rpdsmc")
HOLDS = "holds"
VIOLATED = "violated"
RESOURCE = "resource-bound-exceeded"
Verdict = namedtuple("Verdict", ["status", "witness", "statistics"],
                     defaults=(None, None))
# stem/loop: configurations; the word is stem_labels.loop_labels^w
Lasso = namedtuple("Lasso", ["stem", "loop", "stem_labels", "loop_labels"])
HeadExploration = namedtuple("HeadExploration", ["heads", "summaries", "empties", "frames"])


def explore_heads(rules_at, starts, progress=False):
    """ Compute the heads (control state, top symbol) reachable from some
    configurations.

    A frame is a control state and top symbol together with the level it
    belongs to: the n-th cell of a start stack, or the cell pushed when
    entering some head. Each entered head records the states in which it
    pops its cell, and the frames waiting below it.

    Parameters
    ----------
    rules_at: callable
        rules_at(state, symbol) returns (target state, Command) pairs.
    starts: iterable of (state, stack)
        the start configurations, stacks top first.
    progress: bool, default False
        display a progress bar.

    Returns
    -------
    exploration: HeadExploration
        the reachable heads, the pop summaries of the entered heads, and
        whether an empty stack is reachable.
    """
    starts = list(starts)
    heads, frames = set(), set()
    summaries = defaultdict(set)
    callers = defaultdict(set)
    todo = deque()
    empties = False

    def add(state, symbol, origin):
        frame = (state, symbol, origin)
        if frame not in frames:
            frames.add(frame)
            todo.append(frame)

    for index, (state, stack) in enumerate(starts):
        if len(stack) == 0:
            empties = True
        else:
            add(state, stack[0], ("init", index, 0))
    with tqdm(desc="heads", disable=not progress) as pbar:
        while todo:
            state, symbol, origin = todo.popleft()
            pbar.update(1)
            heads.add((state, symbol))
            for target, command in rules_at(state, symbol):
                if command.op == "skip":
                    add(target, symbol, origin)
                elif command.op == "push":
                    entry = (target, command.arg)
                    add(target, command.arg, ("call", entry))
                    if (symbol, origin) not in callers[entry]:
                        callers[entry].add((symbol, origin))
                        for exit_state in list(summaries[entry]):
                            add(exit_state, symbol, origin)
                elif origin[0] == "call":
                    entry = origin[1]
                    if target not in summaries[entry]:
                        summaries[entry].add(target)
                        for below, below_origin in list(callers[entry]):
                            add(target, below, below_origin)
                else:
                    _, index, depth = origin
                    stack = starts[index][1]
                    if depth + 1 < len(stack):
                        add(target, stack[depth + 1], ("init", index, depth + 1))
                    else:
                        empties = True
    return HeadExploration(heads, dict(summaries), empties, len(frames))


class Annotator(object):
    """ Deterministic backward automaton over stack symbols.

    A state holds, for each atom, the set of states of its automaton from
    which the stack read so far (bottom-up) can be emptied into a final
    state. States are numbered in order of discovery; 0 is the empty stack.
    """
    def __init__(self, valuation, max_states=2 ** 16):
        self.atoms = tuple(valuation)
        self.automata = tuple(valuation[atom] for atom in self.atoms)
        self.max_states = max_states
        self._pre, self._post = [], []
        for nfa in self.automata:
            pre, post = defaultdict(set), defaultdict(set)
            for rule in nfa.base.rules:
                pre[(rule.guard, rule.target)].add(rule.source)
                post[(rule.source, rule.guard)].add(rule.target)
            self._pre.append(pre)
            self._post.append(post)
        bottom = tuple(frozenset(nfa.final) for nfa in self.automata)
        self.states = [bottom]
        self._ids = {bottom: 0}
        self._steps = {}

    def __len__(self):
        return len(self.states)

    def step(self, a, symbol):
        """ The state after reading `symbol` above a stack in state `a`.
        """
        key = (a, symbol)
        if key in self._steps:
            return self._steps[key]
        state = tuple(frozenset(source for target in drained
                                for source in pre.get((symbol, target), ()))
                      for pre, drained in zip(self._pre, self.states[a]))
        if state not in self._ids:
            if len(self.states) >= self.max_states:
                raise ResourceLimitError(
                    "annotator", "More than {0} annotator states.".format(self.max_states))
            self._ids[state] = len(self.states)
            self.states.append(state)
        self._steps[key] = self._ids[state]
        return self._steps[key]

    def annotate(self, stack):
        """ Annotate a stack, top first, with the state of the stack below
        each cell.
        """
        annotated, a = [], 0
        for symbol in reversed(stack):
            annotated.append((symbol, a))
            a = self.step(a, symbol)
        return tuple(reversed(annotated))

    def label(self, state, symbol, a):
        """ The atoms holding in a configuration with top cell (symbol, a).
        """
        holding = []
        for atom, nfa, post, drained in zip(self.atoms, self.automata, self._post,
                                            self.states[a]):
            if state in nfa.initial and post.get((state, symbol), set()) & drained:
                holding.append(atom)
        return frozenset(holding)

    def label_empty(self, state):
        return frozenset(atom for atom, nfa in zip(self.atoms, self.automata)
                         if state in nfa.initial and state in nfa.final)


def backward_determinize(valuation, max_states=2 ** 16, alphabet=None):
    """ Build the annotator of a valuation.

    Parameters
    ----------
    valuation: dict
        atom name -> Nfa.
    max_states: int, default 2**16
        guard on the number of annotator states.
    alphabet: iterable, default None
        if given, explore every state reachable over these symbols now
        instead of on demand.

    Returns
    -------
    annotator: Annotator
        the annotator.
    """
    annotator = Annotator(valuation, max_states=max_states)
    if alphabet is not None:
        alphabet = list(alphabet)
        todo, seen = deque([0]), {0}
        while todo:
            a = todo.popleft()
            for symbol in alphabet:
                b = annotator.step(a, symbol)
                if b not in seen:
                    seen.add(b)
                    todo.append(b)
    return annotator


def label(annotator, pds_state, annotated_stack, check=False):
    """ The atoms holding in a configuration given by its annotated stack.
    """
    if check:
        a = 0
        for symbol, below in reversed(annotated_stack):
            if below != a:
                raise ValueError("Inconsistent annotation at symbol {0}.".format(symbol))
            a = annotator.step(a, symbol)
    if len(annotated_stack) == 0:
        return annotator.label_empty(pds_state)
    symbol, a = annotated_stack[0]
    return annotator.label(pds_state, symbol, a)


class BuchiPds(object):
    """ A pushdown system with accepting control states, given by the rules
    of its reachable heads.
    """
    def __init__(self, rules, accepting, initial):
        self.rules = rules
        self.accepting = frozenset(accepting)
        self.initial = list(initial)

    def rules_at(self, state, symbol):
        return self.rules.get((state, symbol), ())

    def __len__(self):
        return sum(len(out) for out in self.rules.values())


def build_product(pds, annotator, buchi, start, max_rules=2 ** 20, progress=False):
    """ Build the product of a PDS with a Buchi automaton, labelling the
    configurations through the annotator, from the heads reachable from
    `start`.

    Returns
    -------
    product: BuchiPds
        the product; its control states are (PDS state, Buchi state) and its
        stack symbols (PDS symbol, annotator state).
    exploration: HeadExploration
        the head exploration of the product.
    """
    rules, count = {}, [0]

    def rules_at(state, symbol):
        key = (state, symbol)
        if key in rules:
            return rules[key]
        p, b = state
        gamma, a = symbol
        letter = buchi.letter(annotator.label(p, gamma, a))
        targets = buchi.successors(b, letter)
        out = []
        for rule in pds.rules_at(p, gamma):
            if rule.command.op == "push":
                command = push((rule.command.arg, annotator.step(a, gamma)))
            else:
                command = rule.command
            for b2 in targets:
                out.append(((rule.target, b2), command))
        count[0] += len(out)
        if count[0] > max_rules:
            raise ResourceLimitError(
                "rules", "More than {0} product rules.".format(max_rules))
        rules[key] = out
        return out

    annotated = annotator.annotate(start.stack)
    initial = [((start.state, b0), annotated) for b0 in sorted(buchi.initial)]
    exploration = explore_heads(rules_at, initial, progress=progress)
    accepting = {head[0] for head in exploration.heads if head[0][1] in buchi.accepting}
    return BuchiPds(rules, accepting, initial), exploration


class PAutomaton(object):
    """ A finite automaton over stack symbols whose states include the
    control states; a configuration (p, w) is accepted when w leads from p
    to a final state. Transitions carry a bit.
    """
    def __init__(self, final=()):
        self.final = set(final)
        self.out = defaultdict(dict)

    def add(self, src, symbol, dst, bit=False):
        """ Add a transition; returns True if it is new or its bit grew.
        """
        targets = self.out[(src, symbol)]
        old = targets.get(dst)
        if old is None or (bit and not old):
            targets[dst] = bool(bit)
            return True
        return False

    def transitions(self):
        for (src, symbol), targets in self.out.items():
            for dst, bit in targets.items():
                yield src, symbol, dst, bit

    def __len__(self):
        return sum(len(targets) for targets in self.out.values())

    def accepts(self, state, word):
        current = {state}
        for symbol in word:
            current = {dst for src in current for dst in self.out.get((src, symbol), {})}
            if not current:
                return False
        return bool(current & self.final)


def prestar(bpds, automaton):
    """ Saturate a P-automaton into one accepting the predecessors of its
    configurations. A transition bit records that some path it summarizes
    visits an accepting control state.

    Parameters
    ----------
    bpds: BuchiPds
        the pushdown system.
    automaton: PAutomaton
        the automaton, saturated in place.

    Returns
    -------
    automaton: PAutomaton
        the saturated automaton.
    """
    skips = defaultdict(dict)
    pushes = defaultdict(list)
    todo = deque(automaton.transitions())
    for (p, gamma), out in bpds.rules.items():
        bit = p in bpds.accepting
        for q, command in out:
            if command.op == "pop":
                todo.append((p, gamma, q, bit))
            elif command.op == "skip":
                skips[(q, gamma)][p] = skips[(q, gamma)].get(p, False) or bit
            else:
                pushes[(q, command.arg)].append((p, gamma, bit))
    processed = {}
    while todo:
        q, gamma, s, bit = todo.popleft()
        old = processed.get((q, gamma, s))
        if old is not None and (old or not bit):
            continue
        processed[(q, gamma, s)] = bit
        automaton.add(q, gamma, s, bit)
        for p, rule_bit in list(skips.get((q, gamma), {}).items()):
            todo.append((p, gamma, s, rule_bit or bit))
        for p, below, rule_bit in pushes.get((q, gamma), ()):
            # (p, below) -> (q, gamma below) now behaves as (p, below) -> (s, below)
            derived = skips[(s, below)]
            new_bit = rule_bit or bit
            if p in derived and (derived[p] or not new_bit):
                continue
            derived[p] = derived.get(p, False) or new_bit
            for s2, bit2 in list(automaton.out.get((s, below), {}).items()):
                if (s, below, s2) in processed:
                    todo.append((p, below, s2, derived[p] or bit2))
    return automaton


def repeating_heads(bpds, summaries):
    """ The heads lying on a cycle of the head graph that visits an
    accepting control state.

    Parameters
    ----------
    bpds: BuchiPds
        the pushdown system.
    summaries: PAutomaton
        the pre* of the empty configurations: (p, g, q) means (p, g) can
        pop its cell reaching q.

    Returns
    -------
    heads: set
        the repeating heads.
    graph: networkx.DiGraph
        the head graph, edges labelled with an `accepting` bit.
    """
    graph = nx.DiGraph()

    def edge(u, v, bit):
        if graph.has_edge(u, v):
            graph[u][v]["accepting"] = graph[u][v]["accepting"] or bit
        else:
            graph.add_edge(u, v, accepting=bit)

    for (p, gamma), out in bpds.rules.items():
        graph.add_node((p, gamma))
        bit = p in bpds.accepting
        for q, command in out:
            if command.op == "skip":
                edge((p, gamma), (q, gamma), bit)
            elif command.op == "push":
                edge((p, gamma), (q, command.arg), bit)
                for s, bit2 in summaries.out.get((q, command.arg), {}).items():
                    edge((p, gamma), (s, gamma), bit or bit2)
    heads = set()
    for component in nx.strongly_connected_components(graph):
        sub = graph.subgraph(component)
        if any(data["accepting"] for _, _, data in sub.edges(data=True)):
            heads |= set(component)
    return heads, graph


def _successors(bpds, config):
    state, stack = config
    if len(stack) == 0:
        return []
    result = []
    for target, command in bpds.rules_at(state, stack[0]):
        if command.op == "pop":
            result.append((target, stack[1:]))
        elif command.op == "skip":
            result.append((target, stack))
        else:
            result.append((target, (command.arg, ) + stack))
    return result


def _find_stem(bpds, heads, max_nodes):
    parents = {}
    todo = deque()
    for config in bpds.initial:
        parents[config] = None
        todo.append(config)
    while todo:
        config = todo.popleft()
        if len(config[1]) > 0 and (config[0], config[1][0]) in heads:
            path = [config]
            while parents[path[-1]] is not None:
                path.append(parents[path[-1]])
            return list(reversed(path))
        for nxt in _successors(bpds, config):
            if nxt not in parents and len(parents) < max_nodes:
                parents[nxt] = config
                todo.append(nxt)
    return None


def _find_loop(bpds, config, max_nodes):
    """ A path of length >= 1 from `config` back to its head that never pops
    the head cell and visits an accepting state.
    """
    state, stack = config
    below = stack[1:]
    start = (state, stack[:1], False)
    parents = {start: None}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        current, local, seen = node
        seen = seen or current in bpds.accepting
        for target, new_stack in _successors(bpds, (current, local + below)):
            local2 = new_stack[:len(new_stack) - len(below)]
            if len(local2) == 0:
                continue
            if target == state and local2[0] == stack[0] and seen:
                path = [node]
                while parents[path[-1]] is not None:
                    path.append(parents[path[-1]])
                return [(s, l + below) for s, l, _ in reversed(path)]
            nxt = (target, local2, seen)
            if nxt not in parents and len(parents) < max_nodes:
                parents[nxt] = node
                todo.append(nxt)
    return None


def find_witness(bpds, annotator, heads, max_nodes=20000):
    """ Search a lasso reaching a repeating head and pumping it.

    Returns
    -------
    lasso: Lasso
        the PDS configurations and their atoms, or None if the bounded
        search gives up.
    """
    stem = _find_stem(bpds, heads, max_nodes)
    if stem is None:
        return None
    loop = _find_loop(bpds, stem[-1], max_nodes)
    if loop is None:
        return None

    def project(config):
        (p, _), stack = config
        return PdsId(p, tuple(symbol for symbol, _ in stack))

    def labels(config):
        (p, _), stack = config
        return label(annotator, p, stack)

    stem = stem[:-1]
    return Lasso([project(c) for c in stem], [project(c) for c in loop],
                 [labels(c) for c in stem], [labels(c) for c in loop])


def model_check_pds(m, valuation, f, start, limits=None, witness=True, history=None,
                    progress=False):
    """ Decide whether every infinite run of a PDS from `start` satisfies a
    formula.

    Parameters
    ----------
    m: Pds
        the pushdown system.
    valuation: dict
        atom name -> Nfa whose initial states include the control states
        of m.
    f: Ltl
        the formula.
    start: PdsId
        the start configuration, with a non empty stack.
    limits: Limits, default None
        the resource guards.
    witness: bool, default True
        search a lasso when the formula is violated.
    history: History, default None
        records the statistics of the phases.
    progress: bool, default False
        display progress bars.

    Returns
    -------
    verdict: Verdict
        holds, or violated with an optional lasso of PDS configurations.
    """
    limits = limits or Limits()
    if len(start.stack) == 0:
        raise ValueError("The start configuration needs a non empty stack.")
    valuation = OrderedDict(valuation)
    unknown = formula_atoms(f) - set(valuation)
    if unknown:
        raise ValueError("No automaton for atoms {0}.".format(sorted(unknown)))
    for atom, nfa in valuation.items():
        if not set(m.states) <= set(nfa.initial):
            raise ValueError("The initial states of atom {0} miss some "
                             "control states.".format(atom))
    annotator = Annotator(valuation, max_states=limits.max_annotator_states)
    buchi = to_buchi(Not(f), alphabet=tuple(valuation))
    product, exploration = build_product(m, annotator, buchi, start,
                                         max_rules=limits.max_product_rules,
                                         progress=progress)
    summaries = prestar(product, PAutomaton(final={s for s, _ in exploration.heads} |
                                            {s for out in product.rules.values()
                                             for s, _ in out}))
    heads, graph = repeating_heads(product, summaries)

    sink = ("accept", )
    target = PAutomaton(final=[sink])
    symbols = {symbol for _, symbol in graph.nodes} | {
        symbol for _, stack in product.initial for symbol in stack}
    for state, symbol in heads:
        target.add(state, symbol, sink)
    for symbol in symbols:
        target.add(sink, symbol, sink)
    prestar(product, target)
    violated = any(target.accepts(state, stack) for state, stack in product.initial)
    assert violated == bool(heads), "Reachable repeating heads disagree with pre*"

    statistics = OrderedDict([
        ("buchi_states", len(buchi)), ("annotator_states", len(annotator)),
        ("product_heads", len(exploration.heads)), ("product_rules", len(product)),
        ("summaries", len(summaries)), ("repeating_heads", len(heads))])
    if history is not None:
        history.log("check", **statistics)
    logger.info("Checked %s: %s repeating heads among %s.", f, len(heads),
                len(exploration.heads))
    if not violated:
        return Verdict(HOLDS, None, statistics)
    lasso = None
    if witness:
        lasso = find_witness(product, annotator, heads, max_nodes=limits.witness_nodes)
        if lasso is None:
            logger.warning("No witness found within %s nodes.", limits.witness_nodes)
    return Verdict(VIOLATED, lasso, statistics)
