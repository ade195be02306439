"""
Exact search over edge colourings.

Every decision and optimization here runs the same depth-first search over
the edges of a host graph, in a fixed edge order. Edges that lie in many
pattern copies come first. Each node extends the partial colouring by one
edge, and the search prunes on:

* monochromatic copies completed so far, compared against an incumbent
  (``limit``): 1 for decisions, the best count found so far for
  minimization;
* colour symmetry: colours are introduced in order, so the first edge is
  coloured 1 and colour ``c`` appears only after ``c - 1``;
* optionally, host automorphisms: a partial colouring is dropped when an
  automorphism maps its prefix onto itself and the image is smaller.

Subtrees below a short prefix are independent and can be handed to a thread
pool sharing one incumbent.
"""
from __future__ import annotations

import dataclasses
import enum
import itertools
import logging
import pathlib
import threading
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import entrypoints

from . import utils
from .graph import (BlowupGraph, Graph, blowup, copy_count, copy_edge_sets,
                    iter_copies, iter_embeddings)
from .utils import (BlowramException, GraphError, GraphParseError,
                    SearchBudgetExceeded, UndefinedQuantityError, iter_bits,
                    normalize_choice, popcount)

logger = logging.getLogger(__name__)

BACKEND_ENTRY_POINT_KEY = 'blowram.backends'
SIGNS = ('positive', 'negative')

# Automorphisms considered for symmetry pruning
MAX_SYMMETRIES = 256


@dataclasses.dataclass(frozen=True)
class EdgeColouring:
    """
    An assignment of a colour in ``1..r`` to every edge of ``host``.

    ``colours[i]`` is the colour of ``host.edges[i]``.
    """

    host: Graph
    colours: tuple[int, ...]
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError(f'Colour count must be positive, got {self.r}')
        if len(self.colours) != self.host.edge_count:
            raise GraphError(
                f'{len(self.colours)} colours given for '
                f'{self.host.edge_count} edges'
            )
        for edge, colour in zip(self.host.edges, self.colours):
            if not 1 <= colour <= self.r:
                raise GraphError(
                    f'Edge {edge} has colour {colour}, outside 1..{self.r}'
                )

    @classmethod
    def uniform(cls, host: Graph, r: int, colour: int = 1) -> EdgeColouring:
        return cls(host, (colour,) * host.edge_count, r)

    @classmethod
    def from_mapping(cls, host: Graph, mapping: dict, r: int) -> EdgeColouring:
        """Build from ``{(u, v): colour}``; every edge must be present."""
        normalized = {(min(u, v), max(u, v)): c for (u, v), c in mapping.items()}
        missing = [edge for edge in host.edges if edge not in normalized]
        if missing:
            raise GraphError(f'No colour given for edges {missing[:5]}')
        return cls(host, tuple(normalized[edge] for edge in host.edges), r)

    def colour_of(self, u: int, v: int) -> int:
        return self.colours[self.host.edge_id(u, v)]

    def colour_class(self, colour: int) -> Graph:
        """The spanning subgraph formed by the edges of one colour."""
        edges = [e for e, c in zip(self.host.edges, self.colours) if c == colour]
        return Graph.from_edges(self.host.vertex_count, edges)

    def blown_up(self, host: BlowupGraph) -> EdgeColouring:
        """
        Lift a colouring of ``host.base`` to the blowup ``host``.

        Every edge between two classes takes the colour of the base edge
        joining them.
        """
        if not host.base.same_structure(self.host):
            raise GraphError('Blowup is not over the coloured graph')
        class_of = host.class_of
        colours = tuple(
            self.colour_of(class_of[u], class_of[v]) for u, v in host.graph.edges
        )
        return EdgeColouring(host.graph, colours, self.r)

    def to_text(self) -> str:
        """Serialize as a header ``n m r`` followed by ``u v c`` lines."""
        lines = [f'{self.host.vertex_count} {self.host.edge_count} {self.r}']
        lines.extend(
            f'{u} {v} {c}' for (u, v), c in zip(self.host.edges, self.colours)
        )
        return '\n'.join(lines) + '\n'

    @classmethod
    def parse(cls, text: str) -> EdgeColouring:
        """
        Parse the text written by :meth:`to_text`.

        Raises
        ------
        GraphParseError
            On malformed lines or an inconsistent header.
        """
        numbered = [
            (i, line.split()) for i, line in enumerate(text.splitlines(), 1)
            if line.strip()
        ]
        if not numbered:
            raise GraphParseError('empty colouring', line=1)
        number, header = numbered[0]
        if len(header) != 3 or not all(item.isdigit() for item in header):
            raise GraphParseError('expected header "n m r"', line=number)
        vertex_count, edge_count, r = map(int, header)
        if len(numbered) - 1 != edge_count:
            raise GraphParseError(
                f'header declares {edge_count} edges but '
                f'{len(numbered) - 1} were given', line=number,
            )
        mapping = {}
        edges = []
        for number, fields in numbered[1:]:
            if len(fields) != 3 or not all(item.isdigit() for item in fields):
                raise GraphParseError('expected "u v c"', line=number)
            u, v, c = map(int, fields)
            edge = (min(u, v), max(u, v))
            if edge in mapping:
                raise GraphParseError(f'duplicate edge {edge}', line=number)
            mapping[edge] = c
            edges.append(edge)
        try:
            host = Graph.from_edges(vertex_count, edges)
            return cls.from_mapping(host, mapping, r)
        except GraphError as ex:
            raise GraphParseError(str(ex)) from ex

    def save(self, path: Union[str, pathlib.Path]) -> None:
        pathlib.Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: Union[str, pathlib.Path]) -> EdgeColouring:
        return cls.parse(pathlib.Path(path).read_text())


def count_monochromatic_copies(colouring: EdgeColouring, pattern: Graph) -> int:
    """
    Count monochromatic copies of ``pattern`` by direct enumeration.

    Independent of the search kernel; used to re-score witnesses.
    """
    host = colouring.host
    total = 0
    for image in iter_copies(pattern, host):
        colours = {
            colouring.colour_of(image[u], image[v]) for u, v in pattern.edges
        }
        total += len(colours) == 1
    return total


def count_monochromatic_canonical_copies(
    colouring: EdgeColouring,
    host: BlowupGraph,
    pattern: Graph,
    t: int,
) -> int:
    """
    Count monochromatic canonical copies of ``pattern[t]`` in a coloured blowup.

    Enumerates every copy of ``pattern`` in ``host.base`` and every choice of
    ``t`` vertices per class. Only suitable for small instances.
    """
    if t > min(host.class_sizes, default=0):
        return 0
    total = 0
    for image in iter_copies(pattern, host.base):
        choices = [
            itertools.combinations(host.class_vertices(cls), t) for cls in image
        ]
        for parts in itertools.product(*map(list, choices)):
            colours = set()
            for u, v in pattern.edges:
                for x in parts[u]:
                    for y in parts[v]:
                        if not host.graph.has_edge(x, y):
                            colours.add(None)
                        else:
                            colours.add(colouring.colour_of(x, y))
            total += len(colours) == 1 and None not in colours
    return total


@dataclasses.dataclass
class SearchOutcome:
    """
    Result of an exhaustive or budget-truncated colouring search.

    Attributes
    ----------
    verdict : bool or None
        The arrowing verdict; ``None`` when the budget ran out first.
    count : int, optional
        For minimization, the monochromatic copy count of ``witness``; a
        proven minimum when ``exact``, otherwise an upper bound.
    witness : EdgeColouring, optional
        A colouring without a monochromatic copy, or an extremal colouring.
    explored : int
        Search nodes visited.
    exact : bool
        Whether the search finished.
    note : str
        Short provenance of the verdict, if it did not come from the search.
    """

    verdict: Optional[bool]
    count: Optional[int] = None
    witness: Optional[EdgeColouring] = None
    explored: int = 0
    exact: bool = True
    note: str = ''

    def to_json(self, witness_path: Optional[str] = None) -> dict:
        return {
            'verdict': self.verdict,
            'count': self.count,
            'exact': self.exact,
            'explored': self.explored,
            'note': self.note,
            'witness_path': witness_path,
        }


class _Problem:
    """
    Static description of one search: edge order, copies and symmetries.

    Positions index the edges in search order. ``completing[p]`` lists the
    copies, as position bitmasks, whose last edge sits at position ``p``.
    """

    def __init__(
        self,
        host: Graph,
        r: int,
        copies: Sequence[Sequence[int]],
        weights: Optional[Sequence[int]] = None,
        symmetries: Sequence[Sequence[int]] = (),
    ):
        self.host = host
        self.r = r
        self.m = host.edge_count
        if weights is None:
            weights = [0] * self.m
            for copy in copies:
                for edge in copy:
                    weights[edge] += 1
        self.order = sorted(
            range(self.m), key=lambda e: (-weights[e], host.edges[e])
        )
        self.position = [0] * self.m
        for pos, edge in enumerate(self.order):
            self.position[edge] = pos

        self.completing = [[] for _ in range(self.m)]
        for copy in copies:
            positions = [self.position[edge] for edge in copy]
            self.completing[max(positions)].append(utils.mask_of(positions))
        self.copy_total = len(copies)

        self.checks = [[] for _ in range(self.m)]
        for perm in symmetries:
            self._add_symmetry(perm)
        logger.debug(
            'Search over %d edges, %d copies, %d symmetry checks',
            self.m, self.copy_total, sum(map(len, self.checks)),
        )

    def _add_symmetry(self, edge_perm: Sequence[int]) -> None:
        perm = [self.position[edge_perm[edge]] for edge in self.order]
        high = -1
        for length in range(1, self.m + 1):
            high = max(high, perm[length - 1])
            if high == length - 1 and perm[:length] != list(range(length)):
                self.checks[length - 1].append(tuple(perm[:length]))

    def lex_leader(self, colours: list[int], pos: int) -> bool:
        """False if some symmetry maps the prefix to a smaller colouring."""
        for perm in self.checks[pos]:
            relabel = {}
            for i, target in enumerate(perm):
                image = relabel.setdefault(colours[target], len(relabel) + 1)
                if image != colours[i]:
                    if image < colours[i]:
                        return False
                    break
        return True

    def colouring(self, colours: Sequence[int]) -> EdgeColouring:
        """Convert position-ordered colours into an :class:`EdgeColouring`."""
        by_edge = [0] * self.m
        for pos, colour in enumerate(colours):
            by_edge[self.order[pos]] = colour
        return EdgeColouring(self.host, tuple(by_edge), self.r)

    def rgs_prefixes(self, depth: int) -> list[tuple[int, ...]]:
        """All colour prefixes of ``depth`` edges in introduction order."""
        prefixes = [()]
        for _ in range(depth):
            prefixes = [
                prefix + (colour,)
                for prefix in prefixes
                for colour in range(1, min(max(prefix, default=0) + 1, self.r) + 1)
            ]
        return prefixes


class _Shared:
    """Incumbent, stop flag and node counter shared by the walkers."""

    def __init__(self, limit: int, budget: Optional[int]):
        self.lock = threading.Lock()
        self.limit = limit
        self.best: Optional[tuple[int, int, tuple[int, ...]]] = None
        self.stop = False
        self.explored = 0
        self.budget = budget
        self.exhausted = False
        if budget is None:
            self.flush_every = 1024
        else:
            self.flush_every = max(1, min(1024, budget // 16))

    def add_nodes(self, count: int) -> None:
        with self.lock:
            self.explored += count
            if self.budget is not None and self.explored > self.budget:
                self.exhausted = True
                self.stop = True

    def offer(self, value: int, task: int, colours: tuple[int, ...]) -> None:
        """Record a leaf; only strict improvements lower the limit."""
        with self.lock:
            key = (value, task)
            if self.best is None or key < self.best[:2]:
                self.best = (value, task, colours)
            if value < self.limit:
                self.limit = value


class _Walker:
    """Depth-first search below one prefix."""

    def __init__(self, problem: _Problem, shared: _Shared, task: int,
                 on_leaf: Callable[[_Walker, int], None]):
        self.problem = problem
        self.shared = shared
        self.task = task
        self.on_leaf = on_leaf
        self.masks = [0] * (problem.r + 1)
        self.colours = [0] * problem.m
        self.pending = 0

    def place(self, pos: int, colour: int) -> None:
        self.masks[colour] |= 1 << pos
        self.colours[pos] = colour

    def unplace(self, pos: int, colour: int) -> None:
        self.masks[colour] &= ~(1 << pos)
        self.colours[pos] = 0

    def gain(self, pos: int, colour: int) -> int:
        mask = self.masks[colour]
        return sum(1 for copy in self.problem.completing[pos] if copy & mask == copy)

    def tick(self) -> None:
        self.pending += 1
        if self.pending >= self.shared.flush_every:
            self.shared.add_nodes(self.pending)
            self.pending = 0

    def run(self, prefix: Sequence[int] = ()) -> None:
        mono = 0
        used = 0
        try:
            for pos, colour in enumerate(prefix):
                self.place(pos, colour)
                mono += self.gain(pos, colour)
                used = max(used, colour)
                if mono >= self.shared.limit:
                    return
                if not self.problem.lex_leader(self.colours, pos):
                    return
            self.search(len(prefix), used, mono)
        finally:
            if self.pending:
                self.shared.add_nodes(self.pending)
                self.pending = 0

    def search(self, pos: int, used: int, mono: int) -> None:
        if self.shared.stop:
            return
        self.tick()
        problem = self.problem
        if pos == problem.m:
            self.on_leaf(self, mono)
            return

        options = []
        for colour in range(1, min(used + 1, problem.r) + 1):
            self.place(pos, colour)
            options.append((self.gain(pos, colour), colour))
            self.unplace(pos, colour)
        options.sort()

        for gain, colour in options:
            total = mono + gain
            if total >= self.shared.limit:
                break
            self.place(pos, colour)
            if problem.lex_leader(self.colours, pos):
                self.search(pos + 1, max(used, colour), total)
            self.unplace(pos, colour)
            if self.shared.stop:
                return


def _split_depth(problem: _Problem, threads: int) -> int:
    depth = 0
    while depth < min(problem.m, 12) and len(problem.rgs_prefixes(depth)) < 4 * threads:
        depth += 1
    return depth


def _explore(
    problem: _Problem,
    shared: _Shared,
    on_leaf: Callable[[_Walker, int], None],
    threads: int = 1,
    walker_cls: type = _Walker,
) -> None:
    """Run the search, inline or split into prefix subtrees on a pool."""
    if threads <= 1:
        walker_cls(problem, shared, 0, on_leaf).run()
        return

    prefixes = problem.rgs_prefixes(_split_depth(problem, threads))
    logger.debug('Splitting search into %d subtrees', len(prefixes))

    def task(indexed):
        index, prefix = indexed
        if shared.stop:
            return
        walker_cls(problem, shared, index, on_leaf).run(prefix)

    utils.run_tasks(task, list(enumerate(prefixes)), threads)


def _edge_symmetries(host: Graph, limit: int = MAX_SYMMETRIES) -> list[list[int]]:
    """Automorphisms of ``host`` as edge permutations (identity excluded)."""
    perms = []
    identity = tuple(range(host.vertex_count))
    for image in itertools.islice(iter_embeddings(host, host), limit + 1):
        if image == identity:
            continue
        perms.append([host.edge_id(image[u], image[v]) for u, v in host.edges])
        if len(perms) >= limit:
            break
    return perms


def _validate(pattern: Graph, r: int) -> None:
    if r < 1:
        raise ValueError(f'Colour count must be at least 1, got {r}')
    if pattern.edge_count == 0:
        raise UndefinedQuantityError(
            f'Pattern {pattern.name} has no edges; every colouring would '
            'contain it'
        )


def _copies_problem(host: Graph, pattern: Graph, r: int, symmetry: bool):
    copies = copy_edge_sets(pattern, host)
    symmetries = _edge_symmetries(host) if symmetry else ()
    return _Problem(host, r, copies, symmetries=symmetries)


def _backtrack_arrows(
    host: Graph,
    pattern: Graph,
    r: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> SearchOutcome:
    problem = _copies_problem(host, pattern, r, symmetry)
    if problem.copy_total == 0:
        return SearchOutcome(
            False, witness=EdgeColouring.uniform(host, r),
            note=f'{host.name} contains no copy of {pattern.name}',
        )

    shared = _Shared(limit=1, budget=budget)

    def on_leaf(walker, mono):
        shared.offer(mono, walker.task, tuple(walker.colours))
        shared.stop = True

    _explore(problem, shared, on_leaf, threads)
    if shared.best is not None:
        witness = problem.colouring(shared.best[2])
        return SearchOutcome(False, count=0, witness=witness,
                             explored=shared.explored)
    if shared.exhausted:
        logger.warning('Arrowing search exhausted its budget of %s nodes', budget)
        return SearchOutcome(None, explored=shared.explored, exact=False)
    return SearchOutcome(True, explored=shared.explored)


def get_backends() -> dict[str, Callable[..., SearchOutcome]]:
    """
    Arrowing backends by name.

    Includes the built-in ``backtrack`` search and any callable registered
    under the ``blowram.backends`` entry point group. A backend is called as
    ``backend(G, H, r, budget=...)`` and returns a :class:`SearchOutcome`.
    """
    backends = {'backtrack': _backtrack_arrows}
    for entry in entrypoints.get_group_all(BACKEND_ENTRY_POINT_KEY):
        try:
            backends[entry.name] = entry.load()
        except Exception:
            msg = (f'Failed to load {BACKEND_ENTRY_POINT_KEY} '
                   f'entry: {entry.name}.')
            logger.error(msg)
            logger.debug(msg, exc_info=True)
    return backends


def arrows(
    G: Graph,
    H: Graph,
    r: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
    backend: Optional[str] = None,
) -> SearchOutcome:
    """
    Decide whether every ``r``-colouring of ``G`` has a monochromatic ``H``.

    Parameters
    ----------
    G, H : Graph
        Host and pattern.
    r : int
        Number of colours.
    budget : int, optional
        Node budget; when exceeded the verdict is ``None``.
    threads : int, optional
        Worker count for the subtree split.
    symmetry : bool, optional
        Prune with automorphisms of ``G`` as well as colour permutations.
    backend : str, optional
        Name of an arrowing backend, see :func:`get_backends`.

    Returns
    -------
    outcome : SearchOutcome
        ``verdict`` is True when ``G`` arrows ``H``; otherwise ``witness``
        is a colouring without a monochromatic copy.
    """
    _validate(H, r)
    budget = budget if budget is not None else utils.DEFAULT_BUDGET
    name = backend or utils.DEFAULT_BACKEND
    if name == 'backtrack':
        outcome = _backtrack_arrows(G, H, r, budget, threads, symmetry)
    else:
        backends = get_backends()
        if name not in backends:
            raise ValueError(
                f'{name!r} is not a known arrowing backend. The available '
                f'backends are {sorted(backends)}.'
            )
        outcome = backends[name](G, H, r, budget=budget)
    if utils.DEBUG_MODE and outcome.verdict is False:
        found = count_monochromatic_copies(outcome.witness, H)
        if found:
            raise BlowramException(
                f'Backend {name!r} returned a witness with {found} '
                'monochromatic copies'
            )
    return outcome


def _greedy(problem: _Problem) -> tuple[int, tuple[int, ...]]:
    """Colour edges in search order, each with its cheapest colour."""
    walker = _Walker(problem, _Shared(problem.copy_total + 1, None), 0, None)
    total = 0
    for pos in range(problem.m):
        best = None
        for colour in range(1, problem.r + 1):
            walker.place(pos, colour)
            gain = walker.gain(pos, colour)
            walker.unplace(pos, colour)
            if best is None or gain < best[0]:
                best = (gain, colour)
        walker.place(pos, best[1])
        total += best[0]
    return total, tuple(walker.colours)


def multiplicity(
    G: Graph,
    H: Graph,
    r: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> SearchOutcome:
    """
    Minimum number of monochromatic copies of ``H`` over ``r``-colourings of ``G``.

    Branch and bound, seeded with a greedy colouring as the first incumbent.
    When the budget runs out, ``exact`` is False and ``count`` is the best
    upper bound found.
    """
    _validate(H, r)
    budget = budget if budget is not None else utils.DEFAULT_BUDGET
    problem = _copies_problem(G, H, r, symmetry)
    if problem.copy_total == 0:
        return SearchOutcome(False, count=0,
                             witness=EdgeColouring.uniform(G, r))

    value, colours = _greedy(problem)
    shared = _Shared(limit=value, budget=budget)
    shared.best = (value, -1, colours)
    logger.debug('Greedy incumbent for %s: %d', G.name, value)

    def on_leaf(walker, mono):
        shared.offer(mono, walker.task, tuple(walker.colours))
        if mono == 0:
            shared.stop = True

    if value > 0:
        _explore(problem, shared, on_leaf, threads)

    count, _, colours = shared.best
    exact = not shared.exhausted
    if not exact:
        logger.warning(
            'Multiplicity search exhausted its budget of %s nodes; %d is an '
            'upper bound', budget, count,
        )
    return SearchOutcome(
        verdict=(count >= 1) if exact else (False if count == 0 else None),
        count=count,
        witness=problem.colouring(colours),
        explored=shared.explored,
        exact=exact,
    )


def robustness(
    G: Graph,
    H: Graph,
    r: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> Fraction:
    """
    ``Mult_r(H; G) / Mult_1(H; G)`` as an exact rational.

    Raises
    ------
    UndefinedQuantityError
        If ``G`` contains no copy of ``H``.
    SearchBudgetExceeded
        If the multiplicity search did not finish; the partial outcome is
        attached.
    """
    value, _ = robustness_with_outcome(G, H, r, budget=budget, threads=threads,
                                       symmetry=symmetry)
    return value


def robustness_with_outcome(
    G: Graph,
    H: Graph,
    r: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> tuple[Fraction, SearchOutcome]:
    """:func:`robustness` along with the extremal multiplicity outcome."""
    copies = copy_count(H, G)
    if copies == 0:
        raise UndefinedQuantityError(
            f'{G.name} contains no copy of {H.name}; robustness is undefined'
        )
    outcome = multiplicity(G, H, r, budget=budget, threads=threads,
                           symmetry=symmetry)
    if not outcome.exact:
        raise SearchBudgetExceeded(
            f'Robustness is at most {Fraction(outcome.count, copies)}; the '
            'search budget ran out', outcome,
        )
    return Fraction(outcome.count, copies), outcome


class _CanonicalProblem(_Problem):
    """
    Search over colourings of ``G[n]`` for monochromatic canonical ``H[t]``.

    ``entries[(a, b)]`` lists ``(image, i, j)`` for every copy of ``H`` in
    ``G`` with an edge ``ij`` of ``H`` mapped onto classes ``a`` and ``b``.
    """

    def __init__(self, host: BlowupGraph, pattern: Graph, r: int, t: int,
                 symmetry: bool):
        self.blowup = host
        self.pattern = pattern
        self.t = t
        self.k = pattern.vertex_count
        self.pattern_neighbours = [
            list(iter_bits(row)) for row in pattern.adjacency
        ]
        images = list(iter_copies(pattern, host.base))
        self.entries: dict[tuple[int, int], list] = {}
        base_weight = [0] * host.base.edge_count
        for image in images:
            for i, j in pattern.edges:
                self.entries.setdefault((image[i], image[j]), []).append((image, i, j))
                self.entries.setdefault((image[j], image[i]), []).append((image, j, i))
                base_weight[host.base.edge_id(image[i], image[j])] += 1
        class_of = host.class_of
        weights = [
            base_weight[host.base.edge_id(class_of[u], class_of[v])]
            for u, v in host.graph.edges
        ]
        symmetries = _slot_swaps(host) if symmetry else ()
        super().__init__(host.graph, r, (), weights=weights,
                         symmetries=symmetries)
        self.endpoints = [host.graph.edges[edge] for edge in self.order]


def _slot_swaps(host: BlowupGraph) -> list[list[int]]:
    """Transpositions of neighbouring slots within a class, on edges."""
    perms = []
    graph = host.graph
    for cls in range(host.class_count):
        vertices = host.class_vertices(cls)
        for a, b in zip(vertices, vertices[1:]):
            swap = {a: b, b: a}
            perms.append([
                graph.edge_id(swap.get(u, u), swap.get(v, v))
                for u, v in graph.edges
            ])
    return perms


class _CanonicalWalker(_Walker):
    """Walker that detects monochromatic canonical blowups of the pattern."""

    def __init__(self, problem: _CanonicalProblem, shared, task, on_leaf):
        super().__init__(problem, shared, task, on_leaf)
        n = problem.host.vertex_count
        self.rows = [[0] * n for _ in range(problem.r + 1)]

    def place(self, pos, colour):
        super().place(pos, colour)
        u, v = self.problem.endpoints[pos]
        self.rows[colour][u] |= 1 << v
        self.rows[colour][v] |= 1 << u

    def unplace(self, pos, colour):
        super().unplace(pos, colour)
        u, v = self.problem.endpoints[pos]
        self.rows[colour][u] &= ~(1 << v)
        self.rows[colour][v] &= ~(1 << u)

    def gain(self, pos, colour):
        problem = self.problem
        u, v = problem.endpoints[pos]
        class_of = problem.blowup.class_of
        for image, i, j in problem.entries.get((class_of[u], class_of[v]), ()):
            if self._blowup_through(image, i, u, j, v, colour):
                return 1
        return 0

    def _blowup_through(self, image, i, x, j, y, colour) -> bool:
        """Is there a canonical ``H[t]`` of one colour using edge ``xy``?"""
        problem = self.problem
        rows = self.rows[colour]
        masks = problem.blowup.class_masks
        neighbours = problem.pattern_neighbours
        avail = [masks[image[w]] for w in range(problem.k)]
        chosen = [0] * problem.k
        for w, vertex in ((i, x), (j, y)):
            chosen[w] = 1
            avail[w] &= ~(1 << vertex)
            for other in neighbours[w]:
                avail[other] &= rows[vertex]
        return self._fill(avail, chosen, rows)

    def _fill(self, avail: list[int], chosen: list[int], rows: list[int]) -> bool:
        """Complete the per-class choices by candidate-set refinement."""
        t = self.problem.t
        target = None
        for w, count in enumerate(chosen):
            room = popcount(avail[w])
            if count + room < t:
                return False
            if count < t and (target is None or room < target[1]):
                target = (w, room)
        if target is None:
            return True

        w = target[0]
        neighbours = self.problem.pattern_neighbours[w]
        for vertex in iter_bits(avail[w]):
            # later picks in this class come from higher slots only
            nxt = list(avail)
            nxt[w] = avail[w] >> (vertex + 1) << (vertex + 1)
            for other in neighbours:
                nxt[other] &= rows[vertex]
            grown = list(chosen)
            grown[w] += 1
            if self._fill(nxt, grown, rows):
                return True
        return False


def _canonical_search(
    G: Graph,
    H: Graph,
    r: int,
    t: int,
    n: int,
    budget: Optional[int],
    threads: int,
    symmetry: bool,
) -> SearchOutcome:
    host = blowup(G, n)
    problem = _CanonicalProblem(host, H, r, t, symmetry)
    shared = _Shared(limit=1, budget=budget)

    def on_leaf(walker, mono):
        shared.offer(mono, walker.task, tuple(walker.colours))
        shared.stop = True

    _explore(problem, shared, on_leaf, threads, walker_cls=_CanonicalWalker)
    if shared.best is not None:
        return SearchOutcome(False, count=0,
                             witness=problem.colouring(shared.best[2]),
                             explored=shared.explored)
    if shared.exhausted:
        logger.warning('Canonical search at n=%d exhausted its budget', n)
        return SearchOutcome(None, explored=shared.explored, exact=False)
    return SearchOutcome(True, explored=shared.explored)


def canonical_arrows(
    G: Graph,
    H: Graph,
    r: int,
    t: int,
    n: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> SearchOutcome:
    """
    Decide whether every ``r``-colouring of ``G[n]`` has a monochromatic
    canonical ``H[t]``.

    A canonical ``H[t]`` is the ``t``-blowup of a copy of ``H`` in ``G``
    with each part inside one class of ``G[n]``.

    Parameters
    ----------
    G, H : Graph
        Base host and pattern.
    r, t, n : int
        Colours, pattern part size and host class size.
    budget : int, optional
        Node budget; when exceeded the verdict is ``None``.
    threads : int, optional
        Worker count for the subtree split.
    symmetry : bool, optional
        Prune with slot permutations inside each class.

    Returns
    -------
    outcome : SearchOutcome
        With a witness colouring of ``G[n]`` whenever the verdict is False.
    """
    _validate(H, r)
    if n < 1 or t < 1:
        raise ValueError(f'Class size and part size must be positive, got n={n}, t={t}')
    budget = budget if budget is not None else utils.DEFAULT_BUDGET
    host = blowup(G, n)

    if t > n:
        return SearchOutcome(False, count=0,
                             witness=EdgeColouring.uniform(host.graph, r),
                             note='no canonical copy exists')
    if copy_count(H, G) == 0:
        return SearchOutcome(False, count=0,
                             witness=EdgeColouring.uniform(host.graph, r),
                             note=f'{G.name} contains no copy of {H.name}')

    # A colouring of G without a monochromatic H lifts to G[n]
    base = arrows(G, H, r, budget=budget, threads=threads, symmetry=symmetry)
    if base.verdict is False:
        return SearchOutcome(False, count=0, witness=base.witness.blown_up(host),
                             explored=base.explored,
                             note=f'lifted from a colouring of {G.name}')

    outcome = _canonical_search(G, H, r, t, n, budget, threads, symmetry)
    outcome.explored += base.explored
    if base.verdict is None and outcome.verdict is True:
        outcome.exact = False
    return outcome


class BlowupRamseyStatus(str, enum.Enum):
    found = 'found'
    infinite = 'infinite'
    above_cap = 'above_cap'
    unknown = 'unknown'


@dataclasses.dataclass
class BlowupRamseyResult:
    """
    The least ``n`` with ``G[n]`` canonically arrowing ``H[t]``.

    ``value`` is set only when ``status`` is ``found``. ``outcomes`` maps
    every scanned ``n`` to its search outcome.
    """

    status: BlowupRamseyStatus
    value: Optional[int] = None
    outcomes: dict[int, SearchOutcome] = dataclasses.field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            'status': self.status.value,
            'value': self.value,
            'scanned': {str(n): o.verdict for n, o in self.outcomes.items()},
        }


def blowup_ramsey_number(
    G: Graph,
    H: Graph,
    r: int,
    t: int,
    n_cap: int,
    budget: Optional[int] = None,
    threads: int = 1,
    symmetry: bool = True,
) -> BlowupRamseyResult:
    """
    Scan ``n = t, t + 1, ..., n_cap`` for the blowup Ramsey number.

    When ``G`` does not arrow ``H`` no blowup of ``G`` canonically arrows a
    blowup of ``H``, and the result is ``infinite``.
    """
    _validate(H, r)
    base = arrows(G, H, r, budget=budget, threads=threads, symmetry=symmetry)
    if base.verdict is False:
        logger.info('%s does not %d-arrow %s; the number is infinite',
                    G.name, r, H.name)
        return BlowupRamseyResult(BlowupRamseyStatus.infinite)
    if base.verdict is None:
        return BlowupRamseyResult(BlowupRamseyStatus.unknown)

    result = BlowupRamseyResult(BlowupRamseyStatus.above_cap)
    for n in range(t, n_cap + 1):
        outcome = canonical_arrows(G, H, r, t, n, budget=budget,
                                   threads=threads, symmetry=symmetry)
        result.outcomes[n] = outcome
        logger.info('n=%d: canonical arrowing %s (%d nodes)', n,
                    {True: 'holds', False: 'fails', None: 'undecided'}[outcome.verdict],
                    outcome.explored)
        if outcome.verdict is None:
            result.status = BlowupRamseyStatus.unknown
            return result
        if outcome.verdict:
            result.status = BlowupRamseyStatus.found
            result.value = n
            return result
    return result


def normalize_sign(sign: str) -> str:
    return normalize_choice(sign, SIGNS, 'signal sign')


@dataclasses.dataclass
class SignalSenderReport:
    """
    Verdict of a signal-sender check.

    ``violated`` names the failing clause: ``"arrows"`` when ``S`` arrows
    ``H``, ``"agreement"`` when a colouring without a monochromatic ``H``
    breaks the required relation between the two edges; that colouring is
    ``counterexample``.
    """

    holds: Optional[bool]
    violated: Optional[str] = None
    counterexample: Optional[EdgeColouring] = None
    mono_free_seen: int = 0
    explored: int = 0
    exact: bool = True

    @property
    def diagnostics(self) -> str:
        if self.holds is None:
            return 'undecided: search budget exhausted'
        if self.holds:
            return f'holds over {self.mono_free_seen} colourings'
        if self.violated == 'arrows':
            return 'clause (i) violated: every colouring has a monochromatic copy'
        return 'clause (ii) violated: counterexample colouring found'

    def to_json(self) -> dict:
        return {
            'holds': self.holds,
            'violated': self.violated,
            'diagnostics': self.diagnostics,
            'mono_free_seen': self.mono_free_seen,
            'explored': self.explored,
            'exact': self.exact,
        }


def verify_signal_sender(
    S: Graph,
    e: tuple[int, int],
    f: tuple[int, int],
    r: int,
    H: Graph,
    sign: str = 'positive',
    budget: Optional[int] = None,
) -> SignalSenderReport:
    """
    Check that ``(S, e, f)`` is a positive or negative signal sender.

    ``S`` must not ``r``-arrow ``H``, and every colouring of ``S`` without a
    monochromatic ``H`` must give ``e`` and ``f`` the same colour (positive)
    or different colours (negative). Colourings are enumerated up to colour
    permutation, which preserves both clauses.

    Raises
    ------
    GraphError
        If ``e`` or ``f`` is not an edge of ``S``.
    """
    _validate(H, r)
    sign = normalize_sign(sign)
    budget = budget if budget is not None else utils.DEFAULT_BUDGET
    edge_e, edge_f = S.edge_id(*e), S.edge_id(*f)

    problem = _Problem(S, r, copy_edge_sets(H, S))
    pos_e, pos_f = problem.position[edge_e], problem.position[edge_f]
    shared = _Shared(limit=1, budget=budget)
    report = SignalSenderReport(holds=True)

    def on_leaf(walker, mono):
        report.mono_free_seen += 1
        agree = walker.colours[pos_e] == walker.colours[pos_f]
        if agree != (sign == 'positive'):
            report.holds = False
            report.violated = 'agreement'
            report.counterexample = problem.colouring(walker.colours)
            shared.stop = True

    _explore(problem, shared, on_leaf)
    report.explored = shared.explored
    if report.holds and shared.exhausted:
        report.holds = None
        report.exact = False
    elif report.holds and report.mono_free_seen == 0:
        report.holds = False
        report.violated = 'arrows'
    return report
