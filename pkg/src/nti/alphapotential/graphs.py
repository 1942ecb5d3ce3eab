#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Interaction graphs and the decay of weight asymmetries along them.

Players are the vertices of a simple undirected graph. The asymmetry
``|q_ij - q_ji|`` of a crowd game's interaction weights is at most
``w * decay(c(i, j))`` where ``c`` is the shortest-path distance;
vertices in different components interact symmetrically. Given only
that envelope and the maximum degree ``d`` of the graph,
:func:`zeta_asymptotic_bound` bounds the normalized asymmetry
``zeta_N`` of every table consistent with it.

The bound comes from rebalancing: listing the vertices by their
distance from a root and refilling them level by level into a
``d``-ary tree (:func:`rebalance_tree`) never increases a depth, and
level ``l`` of such a tree holds at most ``d**l`` vertices.
"""

from __future__ import print_function, absolute_import, division
__docformat__ = "restructuredtext en"

logger = __import__('logging').getLogger(__name__)

import math

import networkx as nx
import numpy as np
from scipy.sparse import csgraph

from zope.cachedescriptors.property import Lazy

from .interfaces import ConfigError
from .interfaces import DomainError

__all__ = [
    'ExponentialDecay',
    'PowerDecay',
    'GraphSpec',
    'ZetaBound',
    'read_edge_list',
    'balanced_tree',
    'random_bounded_tree',
    'rebalance_tree',
    'tree_levels',
    'zeta_asymptotic_bound',
    'sample_interaction_table',
    'decay_interaction_table',
]

#: Products ``rho * d`` this close to one are the critical regime.
CRITICAL_TOLERANCE = 1e-12


class ExponentialDecay(object):
    """
    ``rho ** c`` for ``0 < rho < 1``.
    """

    __slots__ = ('rate',)

    kind = 'exponential'

    def __init__(self, rate):
        rate = float(rate)
        if not 0 < rate < 1:
            raise DomainError("The decay rate must lie in (0, 1), not %r" % (rate,))
        self.rate = rate

    @property
    def parameter(self):
        return self.rate

    def __call__(self, distance):
        distance = np.asarray(distance, dtype=float)
        finite = np.isfinite(distance)
        return np.where(finite, self.rate ** np.where(finite, distance, 0.0), 0.0)

    def __eq__(self, other):
        return type(other) is type(self) and other.rate == self.rate

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.kind, self.rate))

    def __repr__(self):
        return '%s(%r)' % (type(self).__name__, self.rate)


class PowerDecay(object):
    """
    ``c ** -beta`` for ``beta > 0``.
    """

    __slots__ = ('beta',)

    kind = 'power'

    def __init__(self, beta):
        beta = float(beta)
        if not beta > 0 or not np.isfinite(beta):
            raise DomainError("The decay exponent must be positive, not %r" % (beta,))
        self.beta = beta

    @property
    def parameter(self):
        return self.beta

    def __call__(self, distance):
        distance = np.asarray(distance, dtype=float)
        usable = np.isfinite(distance) & (distance > 0)
        return np.where(usable, np.where(usable, distance, 1.0) ** -self.beta, 0.0)

    def __eq__(self, other):
        return type(other) is type(self) and other.beta == self.beta

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.kind, self.beta))

    def __repr__(self):
        return '%s(%r)' % (type(self).__name__, self.beta)


def _as_graph(graph):
    if isinstance(graph, nx.Graph):
        if graph.is_directed() or graph.is_multigraph():
            raise DomainError("Interaction graphs are simple and undirected")
        graph = nx.Graph(graph)
    else:
        graph = nx.Graph(list(graph))
    if nx.number_of_selfloops(graph):
        raise DomainError("Interaction graphs cannot have self loops")
    return graph


class GraphSpec(object):
    """
    An interaction graph with a decay law for the weight asymmetries.

    Vertices are relabeled ``0 .. N-1`` in sorted order of the original
    labels, which are kept in :attr:`labels`.

    :param graph: A :class:`networkx.Graph` or an iterable of edges.
    :param decay: An :class:`ExponentialDecay` or :class:`PowerDecay`,
        or None when only distances are needed.
    :param float amplitude: The uniform bound ``w`` on the asymmetry
        amplitudes.
    """

    def __init__(self, graph, decay=None, amplitude=1.0):
        graph = _as_graph(graph)
        try:
            ordering = 'sorted'
            self.labels = sorted(graph.nodes())
        except TypeError:
            ordering = 'default'
            self.labels = list(graph.nodes())
        self.graph = nx.convert_node_labels_to_integers(graph, ordering=ordering)
        amplitude = float(amplitude)
        if not amplitude > 0 or not np.isfinite(amplitude):
            raise DomainError("The asymmetry amplitude must be positive, not %r" % (amplitude,))
        self.amplitude = amplitude
        self.decay = decay

    @classmethod
    def from_edge_list(cls, path, decay=None, amplitude=1.0, vertices=None):
        return cls(read_edge_list(path, vertices), decay, amplitude)

    @property
    def n_vertices(self):
        return self.graph.number_of_nodes()

    @property
    def edges(self):
        return sorted(tuple(sorted(e)) for e in self.graph.edges())

    @Lazy
    def max_degree(self):
        "The maximum vertex degree ``d_G``."
        degrees = [degree for _, degree in self.graph.degree()]
        return max(degrees) if degrees else 0

    @Lazy
    def distances(self):
        """
        The ``N x N`` shortest-path distances, ``inf`` between
        components.
        """
        N = self.n_vertices
        adjacency = nx.to_scipy_sparse_array(self.graph, nodelist=range(N), format='csr')
        result = csgraph.shortest_path(adjacency, method='D', directed=False, unweighted=True)
        result.flags.writeable = False
        return result

    def envelope(self):
        """
        The largest asymmetry ``w * decay(c(i, j))`` each pair allows,
        zero on the diagonal and between components.
        """
        if self.decay is None:
            raise DomainError("No decay law was declared for %r" % (self,))
        result = self.amplitude * self.decay(self.distances)
        np.fill_diagonal(result, 0.0)
        return result

    def __repr__(self):
        return '<%s N=%d edges=%d d_G=%d decay=%r amplitude=%r>' % (
            type(self).__name__, self.n_vertices, self.graph.number_of_edges(),
            self.max_degree, self.decay, self.amplitude)


def read_edge_list(path, vertices=None):
    """
    Read a whitespace-separated edge list of integer vertex labels.
    Lines starting with ``#`` are comments.

    :keyword int vertices: If given, vertices ``0 .. vertices - 1`` are
        added so that isolated players can be declared.
    :raises ConfigError: If a line cannot be parsed.
    """
    try:
        graph = nx.read_edgelist(path, nodetype=int, data=False, comments='#')
    except (TypeError, ValueError) as e:
        raise ConfigError("Malformed edge list %s: %s" % (path, e))
    if vertices is not None:
        graph.add_nodes_from(range(int(vertices)))
    return graph


def balanced_tree(branching, levels):
    """
    The complete *branching*-ary tree whose leaves are *levels* edges
    below the root. The root is vertex 0 and vertices are numbered
    breadth first.
    """
    return nx.balanced_tree(int(branching), int(levels))


def random_bounded_tree(n, max_degree, rng):
    """
    A random tree on *n* vertices in which no vertex has more than
    *max_degree* neighbors. Each new vertex attaches to a uniformly
    chosen earlier vertex that still has room.
    """
    if max_degree < 2 and n > 2:
        raise DomainError("A tree on %d vertices needs a degree of at least 2" % n)
    graph = nx.Graph()
    graph.add_node(0)
    degree = np.zeros(n, dtype=int)
    for vertex in range(1, n):
        open_ = np.flatnonzero(degree[:vertex] < max_degree)
        parent = int(open_[rng.integers(len(open_))])
        graph.add_edge(parent, vertex)
        degree[parent] += 1
        degree[vertex] += 1
    return graph


def tree_levels(vertex_count, branching):
    """
    The least ``L`` with ``1 + d + ... + d**L >= vertex_count``.
    """
    if branching < 2:
        raise DomainError("The branching factor must be at least 2, not %r" % (branching,))
    levels = 0
    capacity = 1
    width = 1
    while capacity < vertex_count:
        levels += 1
        width *= branching
        capacity += width
    return levels


def rebalance_tree(graph, root, branching=None):
    """
    Refill the vertices reachable from *root* into a complete
    *branching*-ary tree (by default ``d_G``), level by level in order
    of their distance from *root* (ties by vertex number).

    Level ``l`` receives at most ``branching ** l`` vertices, and no
    vertex ends up deeper than its distance from *root* whenever that
    many vertices can be at each distance.

    :return: A dict from vertex to its rebalanced depth. Vertices in
        other components are left out.
    """
    if not isinstance(graph, GraphSpec):
        graph = GraphSpec(graph)
    branching = graph.max_degree if branching is None else int(branching)
    if branching < 2:
        raise DomainError("The branching factor must be at least 2, not %r" % (branching,))
    if not 0 <= root < graph.n_vertices:
        raise DomainError("Root %r is not a vertex" % (root,))
    row = graph.distances[root]
    reachable = np.flatnonzero(np.isfinite(row))
    order = sorted(reachable.tolist(), key=lambda v: (row[v], v))
    depths = {}
    depth = 0
    room = 1
    for vertex in order:
        if room == 0:
            depth += 1
            room = branching ** depth
        depths[vertex] = depth
        room -= 1
    return depths


class ZetaBound(object):
    """
    The result of :func:`zeta_asymptotic_bound`.

    Iterating gives ``(regime, bound, rate_exponent)``.

    .. attribute:: regime

       The growth of ``zeta_N`` in ``N``: ``'N^(ln rho/ln d)'``,
       ``'(ln N)/N'``, ``'1/N'`` or ``'(ln ln N)/(ln N)^beta'``.

    .. attribute:: rate_exponent

       For the exponential regimes, the power of ``N`` (negative). For
       power decay, the power of ``ln N`` in the denominator, ``beta``.

    .. attribute:: constant

       ``w * N / (N - 1)``, so that ``bound = constant / N * sum``.
    """

    __slots__ = ('regime', 'bound', 'rate_exponent', 'levels', 'split',
                 'constant', 'n_vertices', 'branching')

    def __init__(self, regime, bound, rate_exponent, levels, split, constant,
                 n_vertices, branching):
        self.regime = regime
        self.bound = float(bound)
        self.rate_exponent = float(rate_exponent)
        self.levels = levels
        self.split = split
        self.constant = float(constant)
        self.n_vertices = n_vertices
        self.branching = branching

    def __iter__(self):
        return iter((self.regime, self.bound, self.rate_exponent))

    def to_dict(self):
        return {
            'regime': self.regime,
            'bound': self.bound,
            'rate_exponent': self.rate_exponent,
            'levels': self.levels,
            'split': self.split,
            'constant': self.constant,
            'n_vertices': self.n_vertices,
            'max_degree': self.branching,
        }

    def __repr__(self):
        return '<%s %s bound=%r exponent=%r>' % (
            type(self).__name__, self.regime, self.bound, self.rate_exponent)


def _exponential_bound(rate, d, L, scale):
    ratio = rate * d
    total = math.fsum(ratio ** level for level in range(1, L + 1))
    if abs(ratio - 1.0) <= CRITICAL_TOLERANCE:
        return '(ln N)/N', scale * total, -1.0
    if ratio > 1.0:
        return 'N^(ln rho/ln d)', scale * total, math.log(rate) / math.log(d)
    return '1/N', scale * total, -1.0


def _power_split(beta, d, L):
    if L < 1:
        return 0
    levels = math.floor(math.log(L) / math.log(d))
    if beta > 1:
        levels = math.floor(beta * math.log(L) / math.log(d))
    return min(max(int(levels), 0), L)


def _power_bound(beta, d, L, scale):
    split = _power_split(beta, d, L)
    head = L - split
    total = math.fsum(level ** -beta for level in range(1, head + 1)) * float(d) ** head
    if split:
        # log(d**l / l**beta) is convex, so the tail maximum is at an end.
        peak = max(float(d) ** level / level ** beta for level in (head + 1, L))
        total += split * peak
    return '(ln ln N)/(ln N)^beta', scale * total, beta, split


def zeta_asymptotic_bound(graph):
    """
    Bound ``zeta_N`` for every interaction table whose asymmetries obey
    the decay law of *graph*.

    With ``L`` from :func:`tree_levels` and ``d = d_G``, exponential
    decay gives ``w/(N-1) * sum_{l<=L} (rho d)**l``; power decay splits
    the levels at ``M`` and gives
    ``w/(N-1) * (d**(L-M) * sum_{l<=L-M} l**-beta + M * max d**l/l**beta)``
    with the maximum over the last ``M`` levels.

    :rtype: ZetaBound
    :raises DomainError: If ``d_G < 2``, there are fewer than two
        vertices, or no decay law is declared.
    """
    if not isinstance(graph, GraphSpec):
        raise DomainError("A GraphSpec is required, not %r" % (graph,))
    if graph.decay is None:
        raise DomainError("No decay law was declared for %r" % (graph,))
    N = graph.n_vertices
    d = graph.max_degree
    if N < 2:
        raise DomainError("At least two players are required")
    if d < 2:
        raise DomainError("The maximum degree must be at least 2, not %d" % d)
    L = tree_levels(N, d)
    scale = graph.amplitude / (N - 1)
    split = None
    if isinstance(graph.decay, ExponentialDecay):
        regime, bound, exponent = _exponential_bound(graph.decay.rate, d, L, scale)
    else:
        regime, bound, exponent, split = _power_bound(graph.decay.beta, d, L, scale)
    result = ZetaBound(regime, bound, exponent, L, split,
                       graph.amplitude * N / (N - 1), N, d)
    logger.debug("Asymmetry bound for %r: %r", graph, result)
    return result


def sample_interaction_table(graph, rng, base=1.0):
    """
    A random interaction table consistent with the decay law of
    *graph*.

    A symmetric part uniform on ``[0, base)`` is shared by each pair;
    one member of each pair, chosen at random, adds an asymmetry
    uniform on ``[0, envelope)``.
    """
    N = graph.n_vertices
    envelope = graph.envelope()
    shared = rng.uniform(0.0, base, (N, N))
    shared = np.triu(shared, 1)
    shared = shared + shared.T
    extra = np.triu(rng.uniform(0.0, 1.0, (N, N)) * envelope, 1)
    forward = np.triu(rng.random((N, N)) < 0.5, 1)
    q = shared + np.where(forward, extra, 0.0) + np.where(forward, 0.0, extra).T
    np.fill_diagonal(q, 0.0)
    return q


def decay_interaction_table(graph):
    """
    The extremal table: ``q_ij`` is the full envelope for ``i < j``
    and zero for ``i > j``.
    """
    return np.triu(graph.envelope(), 1)
