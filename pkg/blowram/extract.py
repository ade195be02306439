"""
Constructive extraction of canonical blowups from dense copy families.

The recursion follows the classic density-increment scheme. The pattern
vertex ``v`` (the pivot) is set aside, and copies whose projection onto
``H - v`` has too few extensions are pruned. A blowup of ``H - v`` covered
by the projected family is found recursively. Finally a biclique is
extracted between disjoint copies inside that cover and the pivot class.
"""
from __future__ import annotations

import collections
import dataclasses
import decimal
import itertools
import logging
import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from . import utils
from .colouring import EdgeColouring
from .graph import (BlowupGraph, Graph, blowup, count_canonical_copies,
                    iter_canonical_copies, iter_copies)
from .utils import (ExtractionError, GraphError, NoMonochromaticCopyError,
                    iter_bits, popcount)

logger = logging.getLogger(__name__)

Copy = tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class CopyFamily:
    """A set of canonical copies of ``host.base`` inside ``host``."""

    host: BlowupGraph
    copies: frozenset[Copy]

    def __post_init__(self):
        graph = self.host.graph
        base = self.host.base
        class_of = self.host.class_of
        for copy in self.copies:
            if len(copy) != base.vertex_count:
                raise GraphError(f'Copy {copy} does not have one vertex per class')
            if any(class_of[vertex] != cls for cls, vertex in enumerate(copy)):
                raise GraphError(f'Copy {copy} leaves its classes')
            for i, j in base.edges:
                if not graph.has_edge(copy[i], copy[j]):
                    raise GraphError(f'Copy {copy} misses edge ({copy[i]}, {copy[j]})')

    @classmethod
    def all_copies(cls, host: BlowupGraph) -> CopyFamily:
        """Every canonical copy present in ``host``."""
        return cls(host, frozenset(iter_canonical_copies(host)))

    def __len__(self):
        return len(self.copies)

    def __iter__(self):
        return iter(sorted(self.copies))

    def projections(self, pivot: int) -> set[Copy]:
        return {_drop(copy, pivot) for copy in self.copies}


def _drop(copy: Copy, position: int) -> Copy:
    return copy[:position] + copy[position + 1:]


@dataclasses.dataclass(frozen=True)
class ExtractionParams:
    """
    Sizes the extraction is guaranteed to reach.

    ``t = floor(rho^k 4^(k - k^2) ln n)`` for the small classes and
    ``t_prime = ceil(n^(1 - rho^(k-1)))`` for the pivot class. ``s`` is
    the biclique side size used at the base of the recursion, equal to ``t``.
    """

    rho: Fraction
    k: int
    n: int
    s: int
    t: int
    t_prime: int
    ln_t_prime: float

    @property
    def vacuous(self) -> bool:
        return self.t == 0


def guaranteed_sizes(rho: Union[Fraction, float], k: int, n: int) -> ExtractionParams:
    """
    The formula guarantee for density ``rho``, ``k`` classes of size ``n``.

    Raises
    ------
    ValueError
        If ``rho`` is outside ``(0, 1]``, ``k < 2`` or ``n < 1``.
    """
    rho = Fraction(rho)
    if not 0 < rho <= 1:
        raise ValueError(f'Density must lie in (0, 1], got {rho}')
    if k < 2 or n < 1:
        raise ValueError(f'Need k >= 2 and n >= 1, got k={k}, n={n}')
    ln_n = math.log(n)
    t = math.floor(float(rho ** k * Fraction(1, 4 ** (k * k - k))) * ln_n)
    ln_t_prime = float(1 - rho ** (k - 1)) * ln_n
    with decimal.localcontext() as context:
        context.prec = 60
        t_prime = int(
            decimal.Decimal(ln_t_prime).exp().to_integral_value(decimal.ROUND_CEILING)
        )
    return ExtractionParams(
        rho=rho, k=k, n=n, s=t, t=t, t_prime=max(t_prime, 1),
        ln_t_prime=ln_t_prime,
    )


@dataclasses.dataclass(frozen=True)
class Bipartite:
    """A bipartite graph with ``rows[a]`` the bitmask of ``a``'s neighbours in B."""

    a_size: int
    b_size: int
    rows: tuple[int, ...]

    @classmethod
    def from_pairs(cls, a_size: int, b_size: int,
                   pairs: Iterable[tuple[int, int]]) -> Bipartite:
        rows = [0] * a_size
        for a, b in pairs:
            if not (0 <= a < a_size and 0 <= b < b_size):
                raise GraphError(f'Pair ({a}, {b}) is outside the parts')
            rows[a] |= 1 << b
        return cls(a_size, b_size, tuple(rows))

    def common_neighbourhood(self, subset: Iterable[int]) -> int:
        mask = (1 << self.b_size) - 1
        for a in subset:
            mask &= self.rows[a]
        return mask

    @property
    def edge_count(self) -> int:
        return sum(popcount(row) for row in self.rows)


@dataclasses.dataclass(frozen=True)
class Biclique:
    a0: tuple[int, ...]
    b0: tuple[int, ...]
    exact: bool = True


def _tally_chunk(args) -> collections.Counter:
    columns, s = args
    tally = collections.Counter()
    for neighbours in columns:
        tally.update(itertools.combinations(neighbours, s))
    return tally


def extract_biclique(
    F: Bipartite,
    s: int,
    tally_budget: Optional[int] = None,
    threads: int = 1,
) -> Biclique:
    """
    ``s`` vertices of A with the largest common neighbourhood in B.

    Every ``b`` in B adds each ``s``-subset of its neighbourhood to a tally;
    the most frequent subset wins, ties going to the lexicographically
    smallest. When the tally would exceed ``tally_budget`` subsets, A is
    grown greedily instead and the result is marked inexact.

    Raises
    ------
    ValueError
        If ``s`` is not in ``1..|A|``.
    """
    if not 1 <= s <= F.a_size:
        raise ValueError(f'Biclique side must lie in 1..{F.a_size}, got {s}')
    tally_budget = utils.TALLY_BUDGET if tally_budget is None else tally_budget

    columns = [
        tuple(a for a in range(F.a_size) if F.rows[a] >> b & 1)
        for b in range(F.b_size)
    ]
    size = sum(math.comb(len(column), s) for column in columns)
    if size > tally_budget:
        logger.warning(
            'Biclique tally of %d subsets exceeds the budget of %d; using the '
            'greedy fallback', size, tally_budget,
        )
        return _greedy_biclique(F, s)

    chunks = [
        (columns[start::max(threads, 1)], s) for start in range(max(threads, 1))
    ]
    tally = collections.Counter()
    for part in utils.run_tasks(_tally_chunk, chunks, threads):
        tally.update(part)

    if tally:
        a0 = min(tally, key=lambda subset: (-tally[subset], subset))
    else:
        a0 = tuple(range(s))
    b0 = tuple(iter_bits(F.common_neighbourhood(a0)))
    return Biclique(tuple(a0), b0, exact=True)


def _greedy_biclique(F: Bipartite, s: int) -> Biclique:
    alive = (1 << F.b_size) - 1
    chosen = []
    for _ in range(s):
        best = max(
            (a for a in range(F.a_size) if a not in chosen),
            key=lambda a: (popcount(alive & F.rows[a]), -a),
        )
        chosen.append(best)
        alive &= F.rows[best]
    return Biclique(tuple(sorted(chosen)), tuple(iter_bits(alive)), exact=False)


def prune_family(M: CopyFamily, v: int, theta: Union[Fraction, float]) -> CopyFamily:
    """
    Drop every copy whose projection onto ``H - v`` has under ``theta`` extensions.

    Removing the extensions of one projection leaves the extension counts of
    all other projections unchanged, so one sweep reaches the fixed point of
    the repeated deletion.
    """
    if not 0 <= v < M.host.base.vertex_count:
        raise ValueError(f'{v} is not a vertex of {M.host.base.name}')
    kept = _prune(M.copies, v, theta)
    return CopyFamily(M.host, frozenset(kept))


def _prune(copies: Iterable[Copy], v: int, theta) -> set[Copy]:
    copies = set(copies)
    extensions = collections.Counter(_drop(copy, v) for copy in copies)
    return {copy for copy in copies if extensions[_drop(copy, v)] >= theta}


@dataclasses.dataclass
class ExtractionResult:
    """
    A canonical blowup found inside a host.

    ``class_subsets[i]`` are the chosen vertices of class ``i``; ``pivot`` is
    the class that received the large side, the last one when unset.
    """

    class_subsets: tuple[tuple[int, ...], ...]
    colour: Optional[int] = None
    covered_by: Optional[CopyFamily] = None
    params: Optional[ExtractionParams] = None
    rho: Optional[Fraction] = None
    pruned_rho: Optional[Fraction] = None
    exact: bool = True
    notes: list[str] = dataclasses.field(default_factory=list)
    pivot: Optional[int] = None

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(subset) for subset in self.class_subsets)

    @property
    def guarantee_met(self) -> str:
        if self.params is None or self.params.vacuous:
            return 'vacuous'
        sizes = list(self.sizes)
        pivot = len(sizes) - 1 if self.pivot is None else self.pivot
        large = sizes.pop(pivot)
        if min(sizes) >= self.params.t and large >= self.params.t_prime:
            return 'yes'
        return 'no'

    def to_json(self) -> dict:
        return {
            'sizes': list(self.sizes),
            'classes': [list(subset) for subset in self.class_subsets],
            'colour': self.colour,
            'guarantee_met': self.guarantee_met,
        }


def validate_extraction(
    result: ExtractionResult,
    host: BlowupGraph,
    pattern: Graph,
    colouring: Optional[EdgeColouring] = None,
) -> None:
    """
    Check that ``result`` is a canonical blowup of ``pattern`` in ``host``.

    Each subset must lie inside one class, the classes must form a copy of
    ``pattern`` in ``host.base``, every pair across adjacent classes must be
    an edge, and with a colouring and ``result.colour`` set, that edge must
    carry the colour.

    Raises
    ------
    ExtractionError
        Naming the first violation.
    """
    subsets = result.class_subsets
    if len(subsets) != pattern.vertex_count:
        raise ExtractionError(
            f'{len(subsets)} subsets for a pattern on {pattern.vertex_count} vertices'
        )
    if any(not subset for subset in subsets):
        raise ExtractionError(f'Empty class subset in sizes {result.sizes}')
    classes = []
    for subset in subsets:
        owners = {host.class_of[vertex] for vertex in subset}
        if len(owners) != 1:
            raise ExtractionError(f'Subset {subset} spans classes {sorted(owners)}')
        classes.append(owners.pop())
    if len(set(classes)) != len(classes):
        raise ExtractionError(f'Subsets share classes: {classes}')
    for i, j in pattern.edges:
        if not host.base.has_edge(classes[i], classes[j]):
            raise ExtractionError(
                f'Classes {classes[i]} and {classes[j]} are not adjacent'
            )
        for x in subsets[i]:
            for y in subsets[j]:
                if not host.graph.has_edge(x, y):
                    raise ExtractionError(f'Missing edge ({x}, {y})')
                if colouring is not None and result.colour is not None:
                    if colouring.colour_of(x, y) != result.colour:
                        raise ExtractionError(
                            f'Edge ({x}, {y}) is not in colour {result.colour}'
                        )


def covers(family: CopyFamily, result: ExtractionResult) -> bool:
    """
    Whether ``family`` covers the blowup ``result``.

    Every edge of the blowup must lie in a member copy that stays inside the
    blowup, and ``min(sizes)`` pairwise disjoint such members must exist.
    """
    subsets = [set(subset) for subset in result.class_subsets]
    inside = [
        copy for copy in family.copies
        if all(vertex in subsets[i] for i, vertex in enumerate(copy))
    ]
    base = family.host.base
    covered = {
        (min(copy[i], copy[j]), max(copy[i], copy[j]))
        for copy in inside for i, j in base.edges
    }
    for i, j in base.edges:
        for x in subsets[i]:
            for y in subsets[j]:
                if (min(x, y), max(x, y)) not in covered:
                    return False
    used = set()
    disjoint = 0
    for copy in sorted(inside):
        if used.isdisjoint(copy):
            used.update(copy)
            disjoint += 1
    return disjoint >= min(result.sizes)


class _Extraction:
    """One run of the recursive extraction over vertex tuples."""

    def __init__(self, pattern: Graph, rho: Fraction, target: Optional[int],
                 tally_budget: Optional[int], threads: int):
        self.pattern = pattern
        self.rho = rho
        self.target = target
        self.tally_budget = tally_budget
        self.threads = threads
        self.exact = True
        self.notes: list[str] = []
        self.top_family: Optional[set[Copy]] = None

    def cover(self, copies: set[Copy], classes: list[tuple[int, ...]],
              depth: int = 0) -> list[tuple[int, ...]]:
        k = len(classes)
        if k == 2:
            if depth == 0:
                self.top_family = copies
            return self._biclique_step(
                [(a,) for a in classes[0]], classes[1], copies,
            )

        pivot_class = classes[-1]
        theta = self.rho / 2 * len(pivot_class)
        family = _prune(copies, k - 1, theta)
        if not family:
            self.notes.append(
                f'pruning at {k} classes removed every copy; kept the '
                'unpruned family'
            )
            logger.warning('Pruning with theta=%s emptied the family', theta)
            family = copies
        if depth == 0:
            self.top_family = family

        projected = {copy[:-1] for copy in family}
        inner = self.cover(projected, classes[:-1], depth + 1)
        width = min(len(subset) for subset in inner)
        sorted_inner = [sorted(subset) for subset in inner]
        disjoint = [tuple(subset[i] for subset in sorted_inner) for i in range(width)]
        return self._biclique_step(disjoint, pivot_class, family)

    def _biclique_step(self, copies_a: list[Copy], pivot_class: Sequence[int],
                       family: set[Copy]) -> list[tuple[int, ...]]:
        """Biclique between partial copies ``copies_a`` and the pivot class."""
        slot = {vertex: index for index, vertex in enumerate(pivot_class)}
        index_a = {copy: index for index, copy in enumerate(copies_a)}
        pairs = [
            (index_a[copy[:-1]], slot[copy[-1]])
            for copy in family if copy[:-1] in index_a
        ]
        F = Bipartite.from_pairs(len(copies_a), len(pivot_class), pairs)
        best = self._choose(F)
        chosen = [copies_a[a] for a in best.a0]
        k_minus = len(copies_a[0])
        subsets = [tuple(sorted(copy[i] for copy in chosen)) for i in range(k_minus)]
        subsets.append(tuple(pivot_class[b] for b in best.b0))
        return subsets

    def _choose(self, F: Bipartite) -> Biclique:
        if self.target is not None:
            s = min(self.target, F.a_size)
            while True:
                best = extract_biclique(F, s, self.tally_budget, self.threads)
                self.exact &= best.exact
                if best.b0 or s == 1:
                    return best
                s -= 1

        best = None
        best_key = None
        for s in range(1, F.a_size + 1):
            found = extract_biclique(F, s, self.tally_budget, self.threads)
            self.exact &= found.exact
            # the best common neighbourhood only shrinks as s grows
            if not found.b0:
                break
            key = (min(s, len(found.b0)), s * len(found.b0))
            if best_key is None or key > best_key:
                best, best_key = found, key
        if best is None:
            best = extract_biclique(F, 1, self.tally_budget, self.threads)
        return best


def extract_canonical_blowup(
    sub: BlowupGraph,
    target: Optional[Union[int, tuple[int, int]]] = None,
    pivot: Optional[int] = None,
    tally_budget: Optional[int] = None,
    threads: int = 1,
    keep_cover: bool = False,
) -> ExtractionResult:
    """
    Find a large canonical blowup of ``sub.base`` inside ``sub``.

    Parameters
    ----------
    sub : BlowupGraph
        A subgraph of ``H[n]`` with ``H = sub.base`` on two or more vertices.
    target : int or (int, int), optional
        Requested size of the small classes; the pivot class is always made
        as large as possible. By default the sizes are chosen to maximize the
        smallest class, then the product with the pivot class.
    pivot : int, optional
        The pattern vertex whose class receives the large side; defaults to
        the last one.
    tally_budget : int, optional
        Passed to :func:`extract_biclique`.
    threads : int, optional
        Worker count for the biclique tally.
    keep_cover : bool, optional
        Attach the top-level pruned family as ``covered_by``.

    Returns
    -------
    result : ExtractionResult
        With ``class_subsets`` in pattern-vertex order, the formula guarantee
        in ``params``, and ``rho`` the density of canonical copies.

    Raises
    ------
    NoMonochromaticCopyError
        If ``sub`` has no canonical copy.
    """
    pattern = sub.base
    k = pattern.vertex_count
    if k < 2:
        raise ValueError(f'The pattern needs two or more vertices, got {k}')
    if isinstance(target, tuple):
        target = target[0]
    pivot = k - 1 if pivot is None else pivot
    order = [w for w in range(k) if w != pivot] + [pivot]

    copies = {
        tuple(copy[w] for w in order) for copy in iter_canonical_copies(sub)
    }
    if not copies:
        raise NoMonochromaticCopyError(
            f'{sub.graph.name} holds no canonical copy of {pattern.name}',
            max_count=0,
        )
    n = max(sub.class_sizes)
    rho = Fraction(len(copies), n ** k)
    params = guaranteed_sizes(rho, k, n)
    logger.debug('Extracting from %d copies, rho=%s, guarantee t=%d',
                 len(copies), rho, params.t)

    run = _Extraction(pattern, rho, target, tally_budget, threads)
    classes = [tuple(sub.class_vertices(w)) for w in order]
    found = run.cover(copies, classes)

    subsets = [()] * k
    for position, w in enumerate(order):
        subsets[w] = found[position]

    covered_by = None
    if keep_cover:
        members = frozenset(
            tuple(copy[order.index(w)] for w in range(k))
            for copy in run.top_family
        )
        covered_by = CopyFamily(sub, members)

    result = ExtractionResult(
        class_subsets=tuple(subsets),
        covered_by=covered_by,
        params=params,
        rho=rho,
        pruned_rho=Fraction(len(run.top_family), n ** k),
        exact=run.exact,
        notes=run.notes,
        pivot=pivot,
    )
    validate_extraction(result, sub, pattern)
    return result


@dataclasses.dataclass
class MonochromaticExtraction:
    """The colour, the copy of ``H`` in ``G`` and the blowup found in it."""

    colour: int
    copy: tuple[int, ...]
    count: int
    result: ExtractionResult

    def to_json(self) -> dict:
        data = self.result.to_json()
        data.update(copy=list(self.copy), count=self.count)
        return data

    def witness(self, colouring: EdgeColouring, pattern: Graph) -> EdgeColouring:
        """
        The found blowup as a coloured ``pattern[sizes]`` of its own.

        Slot ``a`` of class ``i`` is the ``a``-th vertex of
        ``result.class_subsets[i]``; every edge keeps its colour from
        ``colouring``, so a valid extraction is coloured ``self.colour``
        throughout.
        """
        subsets = self.result.class_subsets
        found = blowup(pattern, self.result.sizes)
        colours = {}
        for i, j in pattern.edges:
            for a, x in enumerate(subsets[i]):
                for b, y in enumerate(subsets[j]):
                    colours[found.vertex(i, a), found.vertex(j, b)] = (
                        colouring.colour_of(x, y)
                    )
        return EdgeColouring(
            found.graph,
            tuple(colours[min(u, v), max(u, v)] for u, v in found.graph.edges),
            colouring.r,
        )


def _colour_sub_blowup(colouring: EdgeColouring, host: BlowupGraph,
                       pattern: Graph, image: Copy, colour: int) -> BlowupGraph:
    """Blowup of ``pattern`` on the classes ``image`` using one colour."""
    sizes = tuple(host.class_sizes[cls] for cls in image)
    offsets = list(itertools.accumulate(sizes, initial=0))
    edges = []
    for i, j in pattern.edges:
        for a, x in enumerate(host.class_vertices(image[i])):
            for b, y in enumerate(host.class_vertices(image[j])):
                if host.graph.has_edge(x, y) and colouring.colour_of(x, y) == colour:
                    edges.append((offsets[i] + a, offsets[j] + b))
    graph = Graph.from_edges(offsets[-1], edges)
    return BlowupGraph(pattern, sizes, graph)


def extract_monochromatic(
    colouring: EdgeColouring,
    host: BlowupGraph,
    pattern: Graph,
    target: Optional[Union[int, tuple[int, int]]] = None,
    threads: int = 1,
    tally_budget: Optional[int] = None,
) -> MonochromaticExtraction:
    """
    A monochromatic canonical blowup of ``pattern`` in a coloured ``G[n]``.

    Counts the monochromatic canonical copies for every colour and every copy
    of ``pattern`` in ``G = host.base``, keeps the richest pair, and runs
    :func:`extract_canonical_blowup` on it. The result is translated back to
    vertices of ``host`` and validated before it is returned.

    Raises
    ------
    NoMonochromaticCopyError
        If no colour contains a canonical copy.
    """
    if not colouring.host.same_structure(host.graph):
        raise GraphError('The colouring is not of the given blowup')
    images = list(iter_copies(pattern, host.base))
    if not images:
        raise NoMonochromaticCopyError(
            f'{host.base.name} contains no copy of {pattern.name}', max_count=0,
        )

    jobs = [
        (colour, image)
        for colour in range(1, colouring.r + 1)
        for image in images
    ]

    def count(job):
        colour, image = job
        sub = _colour_sub_blowup(colouring, host, pattern, image, colour)
        return count_canonical_copies(pattern, sub), sub

    counted = utils.run_tasks(count, jobs, threads)
    best = max(range(len(jobs)), key=lambda index: (counted[index][0], -index))
    total, sub = counted[best]
    colour, image = jobs[best]
    if total == 0:
        raise NoMonochromaticCopyError(
            'No monochromatic canonical copy exists (max count found: 0)',
            max_count=0,
        )
    logger.debug('Colour %d on copy %s holds %d canonical copies',
                 colour, image, total)

    local = extract_canonical_blowup(sub, target=target, threads=threads,
                                     tally_budget=tally_budget)
    subsets = []
    for i, subset in enumerate(local.class_subsets):
        offset = host.offsets[image[i]] - sub.offsets[i]
        subsets.append(tuple(vertex + offset for vertex in subset))
    result = dataclasses.replace(
        local, class_subsets=tuple(subsets), colour=colour, covered_by=None,
    )
    validate_extraction(result, host, pattern, colouring)
    return MonochromaticExtraction(colour, tuple(image), total, result)
