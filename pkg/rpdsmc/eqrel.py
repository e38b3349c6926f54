# -*- coding: utf-8 -*-
"""
Equivalence relations over register symbols.

A relation over x1..xk (registers before a step), x1'..xk' (registers after
the step) and top (the data value read on the stack) is stored as a
canonical tuple `rep`: position s holds the least position of its block.
Positions are x_i -> i-1, x'_i -> k+i-1 and top -> 2k.
"""

# System import
import re
import logging
import functools
from collections import namedtuple

# Package import
from .utils import ResourceLimitError


# Global parameters
logger = logging.getLogger("rpdsmc")
Symbol = namedtuple("Symbol", ["kind", "index"], defaults=(None, ))
SYMBOL_RE = re.compile(r"^(x)(\d+)('?)$|^(top)$")


def reg(i, k):
    return i - 1


def primed(i, k):
    return k + i - 1


def top(k):
    return 2 * k


def symbol_position(symbol, k):
    """ Map a symbol (a Symbol, a name like "x2'" or a position) to its
    position.
    """
    if isinstance(symbol, int):
        position = symbol
    elif isinstance(symbol, Symbol):
        if symbol.kind == "top":
            position = top(k)
        elif symbol.index is None or not 1 <= symbol.index <= k:
            raise ValueError("Register index out of range: {0}.".format(symbol))
        elif symbol.kind == "reg":
            position = reg(symbol.index, k)
        elif symbol.kind == "primed":
            position = primed(symbol.index, k)
        else:
            raise ValueError("Unknown symbol kind: {0}.".format(symbol.kind))
    else:
        match = SYMBOL_RE.match(str(symbol).strip())
        if match is None:
            raise ValueError("Unknown symbol: '{0}'.".format(symbol))
        if match.group(4):
            position = top(k)
        else:
            index = int(match.group(2))
            if not 1 <= index <= k:
                raise ValueError("Register index out of range: '{0}'.".format(symbol))
            position = primed(index, k) if match.group(3) else reg(index, k)
    if not 0 <= position <= 2 * k:
        raise ValueError("Symbol position out of range: {0}.".format(position))
    return position


def symbol_name(position, k):
    if position == top(k):
        return "top"
    if position >= k:
        return "x{0}'".format(position - k + 1)
    return "x{0}".format(position + 1)


def _canonical(labels):
    """ Canonical representative tuple from any per-position labelling.
    """
    first = {}
    return tuple(first.setdefault(label, position)
                 for position, label in enumerate(labels))


class _Relation(object):
    """ Shared behaviour of the canonical relation tuples.
    """
    def related(self, a, b):
        return self.rep[a] == self.rep[b]

    def blocks(self):
        blocks = {}
        for position, rep in enumerate(self.rep):
            blocks.setdefault(rep, []).append(position)
        return [tuple(blocks[rep]) for rep in sorted(blocks)]

    def _names(self, position):
        raise NotImplementedError

    def __str__(self):
        return "".join("{" + ",".join(self._names(s) for s in block) + "}"
                       for block in self.blocks())

    def __repr__(self):
        return "{0}(k={1}, {2})".format(self.__class__.__name__, self.k, self)

    def __eq__(self, other):
        return (type(self) is type(other) and self.k == other.k and
                self.rep == other.rep)

    def __hash__(self):
        return hash((self.__class__.__name__, self.k, self.rep))

    def __lt__(self, other):
        return (self.k, self.rep) < (other.k, other.rep)

    def __reduce__(self):
        return (self.__class__, (self.k, self.rep))


class Partition(_Relation):
    """ An equivalence relation over the 2k+1 symbols of a step.
    """
    __slots__ = ("k", "rep")

    def __init__(self, k, rep):
        assert k >= 1, "Number of registers must be positive, got %s" % k
        assert len(rep) == 2 * k + 1, "Expected %s positions" % (2 * k + 1)
        self.k = k
        self.rep = _canonical(rep)

    def _names(self, position):
        return symbol_name(position, self.k)


class RegPartition(_Relation):
    """ An equivalence relation over the registers x1..xk.
    """
    __slots__ = ("k", "rep")

    def __init__(self, k, rep):
        assert k >= 1, "Number of registers must be positive, got %s" % k
        assert len(rep) == k, "Expected %s positions" % k
        self.k = k
        self.rep = _canonical(rep)

    def _names(self, position):
        return symbol_name(position, self.k)


def _from_blocks(cls, size, blocks, k):
    labels = list(range(size))
    seen = set()
    for block in blocks:
        positions = [symbol_position(s, k) for s in block]
        for position in positions:
            if position >= size:
                raise ValueError("Symbol '{0}' not allowed here.".format(
                    symbol_name(position, k)))
            if position in seen:
                raise ValueError("Symbol '{0}' appears in two blocks.".format(
                    symbol_name(position, k)))
            seen.add(position)
        for position in positions:
            labels[position] = size + min(positions)
    return cls(k, labels)


def make_partition(blocks, k):
    """ Build a Partition from blocks of symbols; unlisted symbols are
    singletons.
    """
    return _from_blocks(Partition, 2 * k + 1, blocks, k)


def make_reg_partition(blocks, k):
    return _from_blocks(RegPartition, k, blocks, k)


BLOCK_RE = re.compile(r"\{([^{}]*)\}")


def _parse_blocks(text):
    text = text.strip()
    if text in ("", "{}"):
        return []
    blocks, end = [], 0
    for match in BLOCK_RE.finditer(text):
        if text[end:match.start()].strip():
            raise ValueError("Unexpected text '{0}' in relation.".format(
                text[end:match.start()].strip()))
        end = match.end()
        names = [name.strip() for name in match.group(1).split(",")
                 if name.strip()]
        blocks.append(names)
    if text[end:].strip():
        raise ValueError("Unexpected text '{0}' in relation.".format(
            text[end:].strip()))
    return blocks


def parse_partition(text, k):
    """ Parse the text syntax '{x1,top}{x2,x2'}'.
    """
    return make_partition(_parse_blocks(text), k)


def parse_reg_partition(text, k):
    return make_reg_partition(_parse_blocks(text), k)


def induced(theta, d, theta_prime):
    """ The relation induced by a step from `theta` to `theta_prime` reading
    the data value `d`.
    """
    assert len(theta) == len(theta_prime), "Assignment lengths differ"
    return Partition(len(theta), tuple(theta) + tuple(theta_prime) + (d, ))


def induced_reg(theta):
    return RegPartition(len(theta), tuple(theta))


def models_triple(theta, d, theta_prime, phi):
    """ Check (theta, d, theta') |= phi: the induced relation is exactly phi.
    """
    if len(theta) != phi.k or len(theta_prime) != phi.k:
        raise ValueError("Assignments of {0} and {1} registers for a relation over {2}.".format(
            len(theta), len(theta_prime), phi.k))
    return induced(theta, d, theta_prime) == phi


def models_reg(theta, psi):
    if len(theta) != psi.k:
        raise ValueError("Assignment of {0} registers for a relation over {1}.".format(
            len(theta), psi.k))
    return induced_reg(theta) == psi


@functools.lru_cache(maxsize=None)
def pre_view(phi, with_top=False):
    """ Restriction of phi to x1..xk (and top), as canonical labels.
    """
    k = phi.k
    positions = list(range(k)) + ([top(k)] if with_top else [])
    return _canonical([phi.rep[s] for s in positions])


@functools.lru_cache(maxsize=None)
def post_view(phi, with_top=False):
    """ Restriction of phi to x1'..xk' (and top), as canonical labels.
    """
    k = phi.k
    positions = list(range(k, 2 * k)) + ([top(k)] if with_top else [])
    return _canonical([phi.rep[s] for s in positions])


@functools.lru_cache(maxsize=None)
def lat(phi):
    """ The register relation phi establishes after the step.
    """
    return RegPartition(phi.k, post_view(phi))


def _same_arity(phi1, phi2):
    if phi1.k != phi2.k:
        raise ValueError("Relations over {0} and {1} registers.".format(phi1.k, phi2.k))


def composable(phi1, phi2):
    _same_arity(phi1, phi2)
    return post_view(phi1) == pre_view(phi2)


def composable_top(phi1, phi2):
    _same_arity(phi1, phi2)
    return post_view(phi1, with_top=True) == pre_view(phi2, with_top=True)


def _from_relation(k, related):
    """ Build the Partition of a predicate over positions and check the
    predicate is an equivalence.
    """
    size = 2 * k + 1
    labels = [next(b for b in range(a + 1) if b == a or related(a, b))
              for a in range(size)]
    phi = Partition(k, labels)
    for a in range(size):
        for b in range(a):
            assert phi.related(a, b) == bool(related(a, b)), (
                "Relation is not transitive on %s, %s" % (
                    symbol_name(a, k), symbol_name(b, k)))
    return phi


def _glue(phi1, phi2, through_top):
    k = phi1.k
    t = top(k)

    def before(s):
        return s < k or s == t

    def mixed(a, b):
        # a ranges over x1..xk and top, b over x1'..xk'
        if any(phi1.related(a, primed(l, k)) and phi2.related(reg(l, k), b)
               for l in range(1, k + 1)):
            return True
        return through_top and phi1.related(a, t) and phi2.related(t, b)

    def related(a, b):
        if before(a) and before(b):
            return phi1.related(a, b)
        if not before(a) and not before(b):
            return phi2.related(a, b)
        if before(a):
            return mixed(a, b)
        return mixed(b, a)

    return _from_relation(k, related)


@functools.lru_cache(maxsize=None)
def compose(phi1, phi2):
    """ Compose two consecutive steps that read different data values.

    Parameters
    ----------
    phi1, phi2: Partition
        the relations of the first and of the second step, such that the
        registers after phi1 relate like the registers before phi2.

    Returns
    -------
    phi: Partition
        the relation from the registers and value of phi1 to the registers
        after phi2.
    """
    if not composable(phi1, phi2):
        raise ValueError("Relations {0} and {1} are not composable.".format(
            phi1, phi2))
    return _glue(phi1, phi2, through_top=False)


@functools.lru_cache(maxsize=None)
def compose_top(phi1, phi2):
    """ Compose two consecutive steps that read the same data value.
    """
    if not composable_top(phi1, phi2):
        raise ValueError("Relations {0} and {1} are not top-composable.".format(
            phi1, phi2))
    return _glue(phi1, phi2, through_top=True)


@functools.lru_cache(maxsize=None)
def eqj(phi, j):
    """ The relation of a freshly pushed cell holding register j of the
    assignment phi produces.
    """
    k = phi.k
    if not 1 <= j <= k:
        raise ValueError("Register index out of range: {0}.".format(j))

    def source(s):
        if s == top(k):
            return primed(j, k)
        return s if s >= k else s + k

    return Partition(k, [phi.rep[source(s)] for s in range(2 * k + 1)])


def bell_number(n):
    """ Number of partitions of an n element set (Bell triangle).
    """
    row = [1]
    for _ in range(n):
        new_row = [row[-1]]
        for value in row:
            new_row.append(new_row[-1] + value)
        row = new_row
    return row[0]


def _growth_strings(size):
    """ Restricted growth strings of the given length.
    """
    if size == 0:
        yield ()
        return
    stack = [(0, )]
    while stack:
        prefix = stack.pop()
        if len(prefix) == size:
            yield prefix
            continue
        for label in range(max(prefix) + 1, -1, -1):
            stack.append(prefix + (label, ))


@functools.lru_cache(maxsize=8)
def _enumerate(k):
    return tuple(sorted(Partition(k, labels)
                        for labels in _growth_strings(2 * k + 1)))


def enumerate_phi(k, max_k=3):
    """ Every relation over the 2k+1 symbols exactly once.

    Parameters
    ----------
    k: int
        the number of registers.
    max_k: int, default 3
        guard on k: |Phi_k| grows as the Bell numbers.

    Returns
    -------
    phis: tuple of Partition
        the relations sorted by canonical tuple.
    """
    if k < 1:
        raise ValueError("Number of registers must be positive, got {0}.".format(k))
    if k > max_k:
        raise ResourceLimitError(
            "phi", "k={0} would enumerate {1} relations (limit k={2}).".format(
                k, bell_number(2 * k + 1), max_k))
    phis = _enumerate(k)
    assert len(phis) == bell_number(2 * k + 1)
    logger.debug("Enumerated %s relations for k=%s.", len(phis), k)
    return phis


def enumerate_reg(k):
    if k < 1:
        raise ValueError("Number of registers must be positive, got {0}.".format(k))
    return tuple(sorted(RegPartition(k, labels) for labels in _growth_strings(k)))
