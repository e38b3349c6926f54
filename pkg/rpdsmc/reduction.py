# -*- coding: utf-8 -*-
"""
Reduction of register pushdown systems to pushdown systems.

The PDS control state (q, acc) remembers how the current registers relate
to the topmost stored cell; a stack symbol remembers how the assignment
saved in a cell relates to the assignment saved in the cell below it.
"""

# System import
import logging
from collections import namedtuple, defaultdict

# Third party import
from joblib import Parallel, delayed

# Package import
from .eqrel import (enumerate_phi, pre_view, post_view, compose, compose_top,
                    eqj, induced, lat)
from .machines import (Rule, PdsId, Pds, Nfa, POP, SKIP, push, is_proper,
                       rpds_successors, pds_successors)
from .pdsmc import explore_heads
from .utils import ImproperIdError


# Global parameters
logger = logging.getLogger("rpdsmc")


class ReducedState(namedtuple("ReducedState", ["base", "acc"])):
    __slots__ = ()

    def __str__(self):
        return "({0},{1})".format(self.base, self.acc)


# the RPDS rule with the stack symbol and state relation it was applied to
Provenance = namedtuple("Provenance", ["source", "symbol", "relation"])
BisimReport = namedtuple("BisimReport", ["clean", "clause", "rpds_id", "pds_id",
                                         "witness", "checked"],
                         defaults=(True, None, None, None, None, 0))


class ReducedSystem(object):
    """ The PDS of a reduction with the provenance of its rules.
    """
    def __init__(self, pds, provenance, source, phis):
        self.pds = pds
        self.provenance = provenance
        self.source = source
        self.phis = phis

    def __len__(self):
        return len(self.pds.rules)


def _index(phis):
    by_post, by_post_top = defaultdict(list), defaultdict(list)
    for phi in phis:
        by_post[post_view(phi)].append(phi)
        by_post_top[post_view(phi, with_top=True)].append(phi)
    return by_post, by_post_top


def _derive(rule, by_post, by_post_top):
    """ The PDS rules simulating one RPDS rule.
    """
    q, guard, target, command = rule
    derived = []
    for relation in by_post_top.get(pre_view(guard, with_top=True), ()):
        acc = compose_top(relation, guard)
        for symbol in by_post.get(pre_view(relation), ()):
            head = ReducedState(q, relation)
            if command.op == "pop":
                new = Rule(head, symbol, ReducedState(target, compose(symbol, acc)), POP)
            elif command.op == "skip":
                new = Rule(head, symbol, ReducedState(target, acc), SKIP)
            else:
                new = Rule(head, symbol, ReducedState(target, eqj(guard, command.arg)),
                           push(acc))
            derived.append((new, Provenance(rule, symbol, relation)))
    return derived


def _derive_all(rules, phis, n_jobs):
    by_post, by_post_top = _index(phis)
    if n_jobs is not None and n_jobs != 1 and len(rules) > 1:
        chunks = Parallel(n_jobs=n_jobs)(
            delayed(_derive)(rule, by_post, by_post_top) for rule in rules)
    else:
        chunks = [_derive(rule, by_post, by_post_top) for rule in rules]
    derived = [item for chunk in chunks for item in chunk]
    return [item[0] for item in derived], dict(derived)


def reduce_rpds(m, start=None, max_k=3, n_jobs=1):
    """ Build the PDS simulating an RPDS.

    Parameters
    ----------
    m: Rpds
        the system.
    start: RpdsId, default None
        if given, keep only the rules whose head is reachable from the
        image of this ID.
    max_k: int, default 3
        guard on the number of registers.
    n_jobs: int, default 1
        number of workers deriving the rules.

    Returns
    -------
    reduced: ReducedSystem
        the PDS and the provenance of each of its rules.
    """
    phis = enumerate_phi(m.k, max_k=max_k)
    rules, provenance = _derive_all(m.rules, phis, n_jobs)
    states = [ReducedState(q, phi) for q in m.states for phi in phis]
    assert len(rules) <= len(m.rules) * len(phis) ** 2
    logger.info("Reduced %s rules to %s rules over %s states.", len(m.rules),
                len(rules), len(states))
    pds = Pds(states, phis, rules)
    if start is not None:
        image = map_id(start, check=True)
        exploration = explore_heads(
            lambda state, symbol: [(r.target, r.command) for r in pds.rules_at(state, symbol)],
            [(image.state, image.stack)])
        heads = exploration.heads
        rules = [rule for rule in rules if (rule.source, rule.guard) in heads]
        keep = {image.state} | {r.source for r in rules} | {r.target for r in rules}
        states = [state for state in states if state in keep]
        provenance = {rule: provenance[rule] for rule in rules}
        logger.info("Kept %s rules reachable from the start ID.", len(rules))
        pds = Pds(states, phis, rules)
    return ReducedSystem(pds, provenance, m, phis)


def reduce_ra(a, rpds_states=None, max_k=3, n_jobs=1):
    """ Build the pop-only automaton accepting the images of the IDs a
    register automaton accepts.

    Parameters
    ----------
    a: Ra
        the automaton; its initial states must be the control states of the
        RPDS it labels.
    rpds_states: iterable of str, default None
        the control states of that RPDS, checked against the initial states.

    Returns
    -------
    nfa: Nfa
        initial states are every (p, phi) with p initial; final states are
        the (q, phi) whose after-step registers satisfy an acceptance pair of q.
    """
    if rpds_states is not None and set(rpds_states) != set(a.initial):
        raise ValueError("Automaton initial states {0} differ from the system "
                         "states {1}.".format(sorted(a.initial), sorted(rpds_states)))
    phis = enumerate_phi(a.k, max_k=max_k)
    rules, _ = _derive_all(a.base.rules, phis, n_jobs)
    states = [ReducedState(q, phi) for q in a.states for phi in phis]
    initial = [state for state in states if state.base in a.initial]
    accepting = set(a.accepting)
    final = [state for state in states if (state.base, lat(state.acc)) in accepting]
    return Nfa(Pds(states, phis, rules), initial, final)


def map_id(c, bottom=None, check=False):
    """ The PDS ID simulating an RPDS ID.

    Parameters
    ----------
    c: RpdsId
        a proper ID.
    bottom: StackCell, default None
        the bottom cell of the run's start ID, needed only when the stack
        of `c` is empty.
    check: bool, default False
        check that the ID is proper.

    Returns
    -------
    image: PdsId
        the control state (q, acc) and the stack symbols, top first.
    """
    if check and not is_proper(c):
        raise ImproperIdError("ID {0} is not proper.".format(c))
    cells = list(reversed(c.stack))
    if len(cells) == 0:
        if bottom is None:
            raise ValueError("Mapping an empty stack needs the bottom cell.")
        acc = induced(bottom.saved, bottom.value, c.theta)
        return PdsId(ReducedState(c.state, acc), ())
    symbols = [induced(cells[0].saved, cells[0].value, cells[0].saved)]
    for below, above in zip(cells, cells[1:]):
        symbols.append(induced(below.saved, below.value, above.saved))
    acc = induced(cells[-1].saved, cells[-1].value, c.theta)
    return PdsId(ReducedState(c.state, acc), tuple(reversed(symbols)))


def bisim_probe(m, rm, c, depth):
    """ Check on the IDs reachable from `c` within `depth` steps that every
    RPDS step maps to a PDS step (clause 1) and that every PDS step from an
    image is matched by an RPDS step (clause 2).

    Returns
    -------
    report: BisimReport
        clean, or the first violated clause with the offending IDs.
    """
    pds = rm.pds if isinstance(rm, ReducedSystem) else rm
    bottom = c.stack[-1] if c.stack else None
    frontier, seen, checked = [c], set(), 0
    for _ in range(depth):
        nxt = []
        for current in frontier:
            if current in seen:
                continue
            seen.add(current)
            if len(current.stack) == 0:
                continue
            image = map_id(current, bottom)
            pds_steps = {target for _, target in pds_successors(pds, image)}
            images = set()
            for rule, target in rpds_successors(m, current):
                target_image = map_id(target, bottom)
                images.add(target_image)
                if target_image not in pds_steps:
                    logger.debug("Step by %s has no PDS counterpart.", rule)
                    return BisimReport(False, 1, current, image, target_image, checked)
                nxt.append(target)
            for target in pds_steps:
                if target not in images:
                    return BisimReport(False, 2, current, image, target, checked)
            checked += 1
        frontier = nxt
    return BisimReport(True, None, None, None, None, checked)


def lift_path(m, c, images):
    """ Follow a sequence of PDS IDs from the image of `c` with RPDS steps
    whose images match.

    Returns
    -------
    path: list of RpdsId
        the RPDS IDs, starting at `c`, or None when a step cannot be
        matched.
    """
    bottom = c.stack[-1] if c.stack else None
    if len(images) == 0:
        return [c]
    if map_id(c, bottom) != images[0]:
        return None
    path = [c]
    for image in images[1:]:
        matches = [target for _, target in rpds_successors(m, path[-1])
                   if map_id(target, bottom) == image]
        if len(matches) == 0:
            return None
        path.append(matches[0])
    return path
