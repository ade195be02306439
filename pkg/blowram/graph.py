"""
Graphs, blowups and the counting primitives the rest of blowram builds on.

Graphs are stored as per-vertex adjacency bitrows: bit ``j`` of
``adjacency[i]`` is set exactly when ``i`` and ``j`` are adjacent.
Vertices are numbered from 0. In a blowup ``G[t_1, ..., t_k]`` the vertex in
class ``i`` and slot ``j`` is numbered ``t_1 + ... + t_{i-1} + j``.

Copies are unlabelled subgraphs, injective homomorphisms are labelled, and
``copy_count(H, G) * automorphism_count(H) == inj_count(H, G)``.
"""
from __future__ import annotations

import dataclasses
import functools
import itertools
import logging
import pathlib
import re
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

import networkx as nx

from .utils import (GraphError, GraphParseError, PatternMismatchError,
                    UndefinedQuantityError, iter_bits, mask_of, normalize_choice,
                    popcount)

logger = logging.getLogger(__name__)

Edge = tuple[int, int]

GRAPH_FORMATS = ('edgelist', 'graph6')
_NAMED_GRAPH = re.compile(r'^\s*([kcp])(\d+)\s*$', re.IGNORECASE)


@dataclasses.dataclass(frozen=True)
class Graph:
    """
    A finite simple graph.

    Parameters
    ----------
    vertex_count : int
        Number of vertices, numbered ``0 .. vertex_count - 1``.
    adjacency : tuple of int
        One bitrow per vertex.
    label : str, optional
        A display name. Not part of equality.
    """

    vertex_count: int
    adjacency: tuple[int, ...]
    label: Optional[str] = dataclasses.field(default=None, compare=False)

    def __post_init__(self):
        n = self.vertex_count
        if n < 0:
            raise GraphError(f'Vertex count must be nonnegative, got {n}')
        if len(self.adjacency) != n:
            raise GraphError(
                f'Expected {n} adjacency rows, got {len(self.adjacency)}'
            )
        full = (1 << n) - 1
        for vertex, row in enumerate(self.adjacency):
            if row < 0 or row & ~full:
                raise GraphError(
                    f'Row {vertex} references a vertex outside 0..{n - 1}'
                )
            if row >> vertex & 1:
                raise GraphError(f'Vertex {vertex} has a loop')
            for other in iter_bits(row):
                if not self.adjacency[other] >> vertex & 1:
                    raise GraphError(
                        f'Adjacency is not symmetric at ({vertex}, {other})'
                    )

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        edges: Iterable[Edge],
        label: Optional[str] = None,
    ) -> Graph:
        """Build a graph from an edge iterable, rejecting loops and repeats."""
        rows = [0] * vertex_count
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GraphError(
                    f'Edge ({u}, {v}) references a vertex outside '
                    f'0..{vertex_count - 1}'
                )
            if u == v:
                raise GraphError(f'Edge ({u}, {v}) is a loop')
            if rows[u] >> v & 1:
                raise GraphError(f'Edge ({u}, {v}) appears twice')
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(vertex_count, tuple(rows), label)

    @classmethod
    def empty(cls, vertex_count: int) -> Graph:
        return cls(vertex_count, (0,) * vertex_count, f'e{vertex_count}')

    @classmethod
    def complete(cls, vertex_count: int) -> Graph:
        full = (1 << vertex_count) - 1
        rows = tuple(full ^ (1 << v) for v in range(vertex_count))
        return cls(vertex_count, rows, f'k{vertex_count}')

    @classmethod
    def cycle(cls, vertex_count: int) -> Graph:
        if vertex_count < 3:
            raise GraphError(f'A cycle needs 3 or more vertices, got {vertex_count}')
        edges = [(v, (v + 1) % vertex_count) for v in range(vertex_count)]
        return cls.from_edges(vertex_count, edges, f'c{vertex_count}')

    @classmethod
    def path(cls, vertex_count: int) -> Graph:
        """The path on ``vertex_count`` vertices."""
        edges = [(v, v + 1) for v in range(vertex_count - 1)]
        return cls.from_edges(vertex_count, edges, f'p{vertex_count}')

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> Graph:
        edges = [(u, a + v) for u in range(a) for v in range(b)]
        return cls.from_edges(a + b, edges, f'k{a},{b}')

    @classmethod
    def from_networkx(cls, graph: nx.Graph, label: Optional[str] = None) -> Graph:
        """Convert a networkx graph, relabelling its nodes in sorted order."""
        nodes = sorted(graph.nodes)
        index = {node: i for i, node in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in graph.edges if u != v]
        return cls.from_edges(len(nodes), edges, label)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges)
        return graph

    @functools.cached_property
    def edges(self) -> tuple[Edge, ...]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return tuple(
            (u, v)
            for u, row in enumerate(self.adjacency)
            for v in iter_bits(row >> (u + 1) << (u + 1))
        )

    @functools.cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {edge: i for i, edge in enumerate(self.edges)}

    @property
    def edge_count(self) -> int:
        return sum(popcount(row) for row in self.adjacency) // 2

    @functools.cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(popcount(row) for row in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def neighbours(self, vertex: int) -> list[int]:
        return list(iter_bits(self.adjacency[vertex]))

    def edge_id(self, u: int, v: int) -> int:
        """Index of edge ``{u, v}`` in :attr:`edges`."""
        try:
            return self.edge_index[(min(u, v), max(u, v))]
        except KeyError:
            raise GraphError(f'({u}, {v}) is not an edge of {self.name}') from None

    def induced(self, vertices: Sequence[int]) -> Graph:
        """The subgraph induced on ``vertices``, renumbered in the given order."""
        position = {v: i for i, v in enumerate(vertices)}
        edges = [
            (position[u], position[v])
            for u, v in self.edges
            if u in position and v in position
        ]
        return Graph.from_edges(len(vertices), edges)

    def remove_vertex(self, vertex: int) -> Graph:
        """``G - v``, with the higher vertices shifted down by one."""
        keep = [v for v in range(self.vertex_count) if v != vertex]
        return self.induced(keep)

    def same_structure(self, other: Graph) -> bool:
        return (self.vertex_count == other.vertex_count
                and self.adjacency == other.adjacency)

    @property
    def name(self) -> str:
        return self.label or f'graph({self.vertex_count}, {self.edge_count})'

    def __repr__(self):
        return (f'<Graph {self.name}: {self.vertex_count} vertices, '
                f'{self.edge_count} edges>')


def named_graph(name: str) -> Graph:
    """
    Resolve a built-in graph name.

    ``kN`` is the complete graph, ``cN`` the cycle and ``pN`` the path on
    ``N`` vertices.

    Raises
    ------
    ValueError
        If ``name`` is not of that form.
    """
    match = _NAMED_GRAPH.match(name)
    if match is None:
        raise ValueError(
            f'{name!r} is not a built-in graph name. The allowed forms are '
            '"kN" (complete), "cN" (cycle) and "pN" (path).'
        )
    kind, size = match.group(1).lower(), int(match.group(2))
    if size < 1:
        raise ValueError(f'{name!r} has no vertices')
    if kind == 'k':
        return Graph.complete(size)
    if kind == 'c':
        return Graph.cycle(size)
    return Graph.path(size)


def parse_graph(text: str, label: Optional[str] = None) -> Graph:
    """
    Parse an edge list or a graph6 line.

    The edge-list format is a header ``n m`` followed by ``m`` lines ``u v``
    with ``u < v``.
    A description whose first character is not a digit is read as graph6.

    Parameters
    ----------
    text : str
        The graph description.
    label : str, optional
        Label attached to the resulting graph.

    Returns
    -------
    graph : Graph

    Raises
    ------
    GraphParseError
        On malformed lines, out-of-range vertices, loops, edges listed as
        ``v u`` or repeated edges.
    """
    lines = text.splitlines()
    first = next((i for i, line in enumerate(lines) if line.strip()), None)
    if first is None:
        raise GraphParseError('empty graph description', line=1)

    head = lines[first].strip()
    if not head[0].isdigit():
        return _parse_graph6(lines, first, label)

    header = head.split()
    if len(header) != 2 or not all(item.isdigit() for item in header):
        raise GraphParseError(
            f'expected header "n m", got {head!r}', line=first + 1
        )
    vertex_count, edge_count = map(int, header)

    rows = [0] * vertex_count
    seen = 0
    for number, raw in enumerate(lines[first + 1:], start=first + 2):
        line = raw.strip()
        if not line:
            continue
        if seen == edge_count:
            raise GraphParseError(
                f'more than the {edge_count} edges the header declares',
                line=number,
            )
        fields = line.split()
        if len(fields) != 2 or not all(item.isdigit() for item in fields):
            raise GraphParseError(f'expected "u v", got {line!r}', line=number)
        u, v = map(int, fields)
        if u >= vertex_count or v >= vertex_count:
            raise GraphParseError(
                f'vertex index {max(u, v)} is not below n = {vertex_count}',
                line=number,
            )
        if u == v:
            raise GraphParseError(f'loop at vertex {u}', line=number)
        if u > v:
            raise GraphParseError(
                f'edge ({u}, {v}) must list the smaller vertex first',
                line=number,
            )
        if rows[u] >> v & 1:
            raise GraphParseError(f'duplicate edge ({u}, {v})', line=number)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
        seen += 1

    if seen != edge_count:
        raise GraphParseError(
            f'header declares {edge_count} edges but {seen} were given',
            line=len(lines),
        )
    return Graph(vertex_count, tuple(rows), label)


def _parse_graph6(lines: list[str], first: int, label: Optional[str]) -> Graph:
    rest = [i for i, line in enumerate(lines) if i > first and line.strip()]
    if rest:
        raise GraphParseError('expected a single graph6 line', line=rest[0] + 1)
    line = lines[first].strip()
    if line.startswith('>>graph6<<'):
        line = line[len('>>graph6<<'):]
    try:
        graph = nx.from_graph6_bytes(line.encode('ascii'))
    except (nx.NetworkXError, ValueError, UnicodeEncodeError) as ex:
        raise GraphParseError(f'invalid graph6 data: {ex}', line=first + 1) from ex
    return Graph.from_networkx(graph, label)


def serialize_graph(graph: Graph, fmt: str = 'edgelist') -> str:
    """Render ``graph`` as an edge list (default) or a graph6 line."""
    fmt = normalize_choice(fmt, GRAPH_FORMATS, 'graph format')
    if fmt == 'graph6':
        data = nx.to_graph6_bytes(graph.to_networkx(), header=False)
        return data.decode('ascii').strip() + '\n'
    lines = [f'{graph.vertex_count} {graph.edge_count}']
    lines.extend(f'{u} {v}' for u, v in graph.edges)
    return '\n'.join(lines) + '\n'


def load_graph(path: Union[str, pathlib.Path]) -> Graph:
    path = pathlib.Path(path)
    logger.debug('Loading graph from %s', path)
    return parse_graph(path.read_text(), label=path.stem)


@dataclasses.dataclass(frozen=True)
class BlowupGraph:
    """
    A subgraph of the blowup ``base[t_1, ..., t_k]``.

    Each base vertex ``i`` becomes an independent class of ``class_sizes[i]``
    vertices. ``graph`` holds the edges actually present; they may only join
    classes that are adjacent in ``base``.
    """

    base: Graph
    class_sizes: tuple[int, ...]
    graph: Graph

    def __post_init__(self):
        if len(self.class_sizes) != self.base.vertex_count:
            raise GraphError(
                f'Expected {self.base.vertex_count} class sizes, '
                f'got {len(self.class_sizes)}'
            )
        if any(size < 1 for size in self.class_sizes):
            raise GraphError(f'Class sizes must be positive: {self.class_sizes}')
        if self.graph.vertex_count != sum(self.class_sizes):
            raise GraphError(
                f'Host has {self.graph.vertex_count} vertices, classes '
                f'account for {sum(self.class_sizes)}'
            )
        for u, v in self.graph.edges:
            cu, cv = self.class_of[u], self.class_of[v]
            if not self.base.has_edge(cu, cv):
                raise GraphError(
                    f'Edge ({u}, {v}) joins classes {cu} and {cv}, which are '
                    'not adjacent in the base graph'
                )

    @functools.cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(self.class_sizes, initial=0))[:-1]

    @functools.cached_property
    def class_of(self) -> tuple[int, ...]:
        return tuple(
            cls for cls, size in enumerate(self.class_sizes) for _ in range(size)
        )

    @functools.cached_property
    def class_masks(self) -> tuple[int, ...]:
        return tuple(
            ((1 << size) - 1) << offset
            for offset, size in zip(self.offsets, self.class_sizes)
        )

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.graph.edges

    @property
    def class_count(self) -> int:
        return len(self.class_sizes)

    def vertex(self, cls: int, slot: int) -> int:
        if not 0 <= slot < self.class_sizes[cls]:
            raise GraphError(f'Class {cls} has no slot {slot}')
        return self.offsets[cls] + slot

    def slot_of(self, vertex: int) -> int:
        return vertex - self.offsets[self.class_of[vertex]]

    def class_vertices(self, cls: int) -> range:
        offset = self.offsets[cls]
        return range(offset, offset + self.class_sizes[cls])

    def full_edge_count(self) -> int:
        """Edge count of the full blowup over the same classes."""
        return sum(
            self.class_sizes[u] * self.class_sizes[v] for u, v in self.base.edges
        )

    def with_edges(self, edges: Iterable[Edge]) -> BlowupGraph:
        """Same classes, with exactly ``edges`` present."""
        graph = Graph.from_edges(self.graph.vertex_count, edges)
        return BlowupGraph(self.base, self.class_sizes, graph)

    def without_edges(self, edges: Iterable[Edge]) -> BlowupGraph:
        drop = {(min(u, v), max(u, v)) for u, v in edges}
        return self.with_edges(e for e in self.graph.edges if e not in drop)


def blowup(base: Graph, sizes: Union[int, Sequence[int]]) -> BlowupGraph:
    """
    The full blowup ``base[t_1, ..., t_k]``.

    Parameters
    ----------
    base : Graph
        The graph whose vertices are blown up.
    sizes : int or sequence of int
        One positive size per base vertex, or a single size for all of them.

    Returns
    -------
    host : BlowupGraph
        With ``sum(sizes)`` vertices and ``sum(t_i * t_j)`` edges over the
        base edges ``ij``.
    """
    if isinstance(sizes, int):
        sizes = [sizes] * base.vertex_count
    sizes = tuple(int(size) for size in sizes)
    if len(sizes) != base.vertex_count:
        raise GraphError(
            f'Expected {base.vertex_count} class sizes, got {len(sizes)}'
        )
    if any(size < 1 for size in sizes):
        raise GraphError(f'Class sizes must be positive: {sizes}')

    offsets = list(itertools.accumulate(sizes, initial=0))
    masks = [((1 << size) - 1) << offsets[i] for i, size in enumerate(sizes)]
    rows = []
    for cls, size in enumerate(sizes):
        row = 0
        for other in iter_bits(base.adjacency[cls]):
            row |= masks[other]
        rows.extend([row] * size)
    label = f'{base.name}[{",".join(map(str, sizes))}]'
    return BlowupGraph(base, sizes, Graph(offsets[-1], tuple(rows), label))


def iter_canonical_copies(host: BlowupGraph) -> Iterator[tuple[int, ...]]:
    """
    Yield every canonical copy of ``host.base`` present in ``host``.

    A copy is a tuple of vertices, the ``i``-th taken from class ``i``.
    Copies are produced in lexicographic order of their slots.
    """
    base = host.base
    k = base.vertex_count
    earlier = [
        [j for j in iter_bits(base.adjacency[i]) if j < i] for i in range(k)
    ]
    rows = host.graph.adjacency
    masks = host.class_masks
    chosen = [0] * k

    def extend(cls):
        candidates = masks[cls]
        for other in earlier[cls]:
            candidates &= rows[chosen[other]]
        for vertex in iter_bits(candidates):
            chosen[cls] = vertex
            if cls + 1 == k:
                yield tuple(chosen)
            else:
                yield from extend(cls + 1)

    if k == 0:
        yield ()
        return
    yield from extend(0)


def count_canonical_copies(pattern: Graph, host: BlowupGraph) -> int:
    """
    Count the canonical copies of ``pattern`` in a blowup over ``pattern``.

    Raises
    ------
    PatternMismatchError
        If ``host.base`` is not ``pattern``.
    """
    if not host.base.same_structure(pattern):
        raise PatternMismatchError(
            f'Host is a blowup of {host.base.name}, not of {pattern.name}'
        )
    k = pattern.vertex_count
    if k == 0:
        return 1
    earlier = [
        [j for j in iter_bits(pattern.adjacency[i]) if j < i] for i in range(k)
    ]
    rows = host.graph.adjacency
    masks = host.class_masks
    chosen = [0] * k

    def count(cls):
        candidates = masks[cls]
        for other in earlier[cls]:
            candidates &= rows[chosen[other]]
        if cls + 1 == k:
            return popcount(candidates)
        total = 0
        for vertex in iter_bits(candidates):
            chosen[cls] = vertex
            total += count(cls + 1)
        return total

    return count(0)


def _embedding_order(pattern: Graph) -> list[int]:
    """Pattern vertices ordered so each has many already-placed neighbours."""
    remaining = set(range(pattern.vertex_count))
    placed = 0
    order = []
    degrees = pattern.degrees
    while remaining:
        vertex = max(
            remaining,
            key=lambda v: (popcount(pattern.adjacency[v] & placed), degrees[v], -v),
        )
        order.append(vertex)
        remaining.discard(vertex)
        placed |= 1 << vertex
    return order


def _embeddings(pattern: Graph, host: Graph, count_only: bool):
    k = pattern.vertex_count
    if k > host.vertex_count:
        return 0 if count_only else iter(())
    order = _embedding_order(pattern)
    placed_before = [
        [u for u in order[:step] if pattern.has_edge(u, order[step])]
        for step in range(k)
    ]
    full = (1 << host.vertex_count) - 1
    degree_ok = [
        mask_of(v for v, d in enumerate(host.degrees) if d >= pattern.degrees[h])
        for h in range(k)
    ]
    image = [0] * k
    rows = host.adjacency

    def candidates(step, used):
        vertex = order[step]
        mask = full & ~used & degree_ok[vertex]
        for other in placed_before[step]:
            mask &= rows[image[other]]
        return vertex, mask

    def count(step, used):
        vertex, mask = candidates(step, used)
        if step + 1 == k:
            return popcount(mask)
        total = 0
        for target in iter_bits(mask):
            image[vertex] = target
            total += count(step + 1, used | 1 << target)
        return total

    def generate(step, used):
        vertex, mask = candidates(step, used)
        for target in iter_bits(mask):
            image[vertex] = target
            if step + 1 == k:
                yield tuple(image)
            else:
                yield from generate(step + 1, used | 1 << target)

    if k == 0:
        return 1 if count_only else iter([()])
    return count(0, 0) if count_only else generate(0, 0)


def iter_embeddings(pattern: Graph, host: Graph) -> Iterator[tuple[int, ...]]:
    """
    Yield every injective homomorphism from ``pattern`` into ``host``.

    Each embedding is a tuple whose ``i``-th entry is the image of pattern
    vertex ``i``.
    """
    return _embeddings(pattern, host, count_only=False)


def inj_count(pattern: Graph, host: Graph) -> int:
    """Number of injective homomorphisms from ``pattern`` into ``host``."""
    return _embeddings(pattern, host, count_only=True)


def automorphism_count(pattern: Graph) -> int:
    """Size of the automorphism group, by pruned permutation search."""
    if pattern.vertex_count > 10:
        logger.debug(
            'Counting automorphisms of %s by exhaustive search (%d vertices)',
            pattern.name, pattern.vertex_count,
        )
    return inj_count(pattern, pattern)


def copy_count(pattern: Graph, host: Graph) -> int:
    """Number of subgraphs of ``host`` isomorphic to ``pattern``."""
    return inj_count(pattern, host) // automorphism_count(pattern)


def iter_copies(pattern: Graph, host: Graph) -> Iterator[tuple[int, ...]]:
    """
    Yield one embedding per unlabelled copy of ``pattern`` in ``host``.

    Two embeddings describe the same copy when they share both the vertex
    image and the edge image.
    """
    seen = set()
    for image in iter_embeddings(pattern, host):
        key = (
            frozenset(image),
            frozenset(
                (min(image[u], image[v]), max(image[u], image[v]))
                for u, v in pattern.edges
            ),
        )
        if key not in seen:
            seen.add(key)
            yield image


def copy_edge_sets(pattern: Graph, host: Graph) -> list[tuple[int, ...]]:
    """The copies of ``pattern`` in ``host`` as sorted tuples of edge ids."""
    return [
        tuple(sorted(host.edge_id(image[u], image[v]) for u, v in pattern.edges))
        for image in iter_copies(pattern, host)
    ]


@dataclasses.dataclass(frozen=True)
class DensityReport:
    """Exact density parameters of a pattern graph."""

    average_degree: Fraction
    max_density: Fraction
    two_density: Fraction
    max_degree: int

    @property
    def d(self) -> Fraction:
        return self.average_degree

    @property
    def m(self) -> Fraction:
        return self.max_density

    @property
    def m2(self) -> Fraction:
        return self.two_density

    def to_json(self) -> dict:
        return {
            'd': str(self.average_degree),
            'm': str(self.max_density),
            'm2': str(self.two_density),
            'max_degree': self.max_degree,
        }


def _is_connected(graph: Graph, subset: int) -> bool:
    start = subset & -subset
    reached = start
    frontier = start
    while frontier:
        grown = 0
        for vertex in iter_bits(frontier):
            grown |= graph.adjacency[vertex]
        frontier = grown & subset & ~reached
        reached |= frontier
    return reached == subset


def density_stats(pattern: Graph) -> DensityReport:
    """
    Average degree, maximum density and 2-density of ``pattern``.

    The maximum density is ``max e(J)/v(J)`` and the 2-density is
    ``max (e(J) - 1)/(v(J) - 2)`` over subgraphs ``J`` with three or more
    vertices, with ``1/2`` for a single edge. Both maxima are attained on
    induced subgraphs, and the 2-density on connected ones, so vertex subsets
    are enumerated.

    Raises
    ------
    UndefinedQuantityError
        If ``pattern`` has no edges.
    """
    n = pattern.vertex_count
    edges = pattern.edge_count
    if edges == 0:
        raise UndefinedQuantityError(
            f'{pattern.name} has no edges; its 2-density is undefined'
        )

    max_density = Fraction(0)
    two_density = Fraction(1, 2)
    rows = pattern.adjacency
    for subset in range(1, 1 << n):
        size = popcount(subset)
        inside = sum(popcount(rows[v] & subset) for v in iter_bits(subset)) // 2
        max_density = max(max_density, Fraction(inside, size))
        if size >= 3 and inside >= 1 and _is_connected(pattern, subset):
            two_density = max(two_density, Fraction(inside - 1, size - 2))

    return DensityReport(
        average_degree=Fraction(2 * edges, n),
        max_density=max_density,
        two_density=two_density,
        max_degree=pattern.max_degree,
    )
