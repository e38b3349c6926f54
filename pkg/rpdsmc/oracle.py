# -*- coding: utf-8 -*-
"""
Explicit-state reference checker: bounded exploration of the canonical IDs
of an RPDS and nested depth-first search of its product with a Buchi
automaton.
"""

# System import
import logging
from collections import deque, OrderedDict

# Third party import
from tqdm import tqdm

# Package import
from .ltl import Not, to_buchi, atoms as formula_atoms
from .machines import ra_accepts, rpds_successors
from .pdsmc import Verdict, Lasso, HOLDS, VIOLATED
from .utils import ResourceLimitError


# Global parameters
logger = logging.getLogger("rpdsmc")


class KripkeGraph(object):
    """ The explored IDs, their successors and the atoms holding in them.
    Nodes are numbered in breadth-first order, the start ID being 0.
    """
    def __init__(self, atoms):
        self.atoms = tuple(atoms)
        self.nodes = []
        self.index = {}
        self.successors = []
        self.labels = []

    def __len__(self):
        return len(self.nodes)

    def add(self, c, letter):
        self.index[c] = len(self.nodes)
        self.nodes.append(c)
        self.successors.append([])
        self.labels.append(frozenset(letter))
        return self.index[c]

    @property
    def deadlocks(self):
        return [n for n, successors in enumerate(self.successors) if not successors]


def explore(m, valuation, start, max_nodes=10 ** 5, max_stack=32, progress=False):
    """ Explore the IDs reachable from `start` with canonical fresh values.

    Parameters
    ----------
    m: Rpds
        the system.
    valuation: dict
        atom name -> Ra whose initial states are the control states of m.
    start: RpdsId
        the start ID.
    max_nodes: int, default 10**5
        guard on the number of explored IDs.
    max_stack: int, default 32
        guard on the stack height.
    progress: bool, default False
        display a progress bar.

    Returns
    -------
    graph: KripkeGraph
        the explored graph.
    """
    valuation = OrderedDict(valuation)
    for atom, ra in valuation.items():
        if set(ra.initial) != set(m.states):
            raise ValueError("The initial states of atom {0} differ from the "
                             "control states.".format(atom))

    def letter(c):
        return [atom for atom, ra in valuation.items() if ra_accepts(ra, c)]

    graph = KripkeGraph(valuation)
    graph.add(start, letter(start))
    todo = deque([start])
    with tqdm(desc="IDs", disable=not progress) as pbar:
        while todo:
            c = todo.popleft()
            pbar.update(1)
            source = graph.index[c]
            for _, target in rpds_successors(m, c):
                if target not in graph.index:
                    if len(target.stack) > max_stack:
                        raise ResourceLimitError(
                            "stack", "Stack height above {0}.".format(max_stack))
                    if len(graph) >= max_nodes:
                        raise ResourceLimitError(
                            "nodes", "More than {0} IDs.".format(max_nodes))
                    graph.add(target, letter(target))
                    todo.append(target)
                graph.successors[source].append(graph.index[target])
    logger.info("Explored %s IDs, %s deadlocks.", len(graph), len(graph.deadlocks))
    return graph


def check_finite(graph, f, start=None):
    """ Decide whether every infinite path of the graph from `start`
    satisfies a formula; deadlocked paths are ignored.

    Returns
    -------
    verdict: Verdict
        holds, or violated with a lasso of IDs.
    """
    start = graph.nodes[0] if start is None else start
    if start not in graph.index:
        raise ValueError("The start ID is not in the graph.")
    unknown = formula_atoms(f) - set(graph.atoms)
    if unknown:
        raise ValueError("No automaton for atoms {0}.".format(sorted(unknown)))
    buchi = to_buchi(Not(f), alphabet=graph.atoms)
    letters = [buchi.letter(labels) for labels in graph.labels]

    def succ(node):
        n, q = node
        return [(n2, q2) for q2 in buchi.successors(q, letters[n])
                for n2 in graph.successors[n]]

    visited, on_stack, flagged = set(), set(), set()

    def inner(seed):
        stack, path = [(seed, iter(succ(seed)))], [seed]
        while stack:
            node, successors = stack[-1]
            nxt = next(successors, None)
            if nxt is None:
                stack.pop()
                path.pop()
                continue
            if nxt in on_stack:
                return path, nxt
            if nxt not in flagged:
                flagged.add(nxt)
                stack.append((nxt, iter(succ(nxt))))
                path.append(nxt)
        return None

    for init in sorted((graph.index[start], q0) for q0 in buchi.initial):
        if init in visited:
            continue
        visited.add(init)
        on_stack.add(init)
        stack, path = [(init, iter(succ(init)))], [init]
        while stack:
            node, successors = stack[-1]
            nxt = next(successors, None)
            if nxt is not None:
                if nxt not in visited:
                    visited.add(nxt)
                    on_stack.add(nxt)
                    stack.append((nxt, iter(succ(nxt))))
                    path.append(nxt)
                continue
            if node[1] in buchi.accepting:
                found = inner(node)
                if found is not None:
                    inner_path, target = found
                    at = path.index(target)
                    stem = [n for n, _ in path[:at]]
                    loop = [n for n, _ in path[at:] + inner_path[1:]]
                    lasso = Lasso([graph.nodes[n] for n in stem], [graph.nodes[n] for n in loop],
                                  [graph.labels[n] for n in stem],
                                  [graph.labels[n] for n in loop])
                    return Verdict(VIOLATED, lasso, {"product_nodes": len(visited)})
            stack.pop()
            path.pop()
            on_stack.discard(node)
    return Verdict(HOLDS, None, {"product_nodes": len(visited)})
