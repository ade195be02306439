"""
Seeded random-graph experiments.

Randomness comes from numpy's PCG64 generator seeded through
:class:`numpy.random.SeedSequence`. Sample ``s`` of an experiment with seed
``seed`` uses ``SeedSequence(seed, spawn_key=(s,))``, and edge ``i`` (in
lexicographic order) is present when the ``i``-th uniform draw of that
stream is below ``p``. Every probability in a sweep therefore reuses the
same draws, so the sampled graphs grow monotonically with ``p``.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import itertools
import json
import logging
import math
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm

from . import utils
from .colouring import EdgeColouring, arrows, multiplicity
from .graph import Graph, copy_count, copy_edge_sets, density_stats
from .utils import UndefinedQuantityError

logger = logging.getLogger(__name__)

CSV_HEADER = ('p', 'arrow_freq', 'undecided_frac', 'samples', 'seed')
SIDEWAYS_CAP = 100


def _generator(seed: int, sample: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(sample,))
    return np.random.Generator(np.random.PCG64(sequence))


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0 <= p <= 1:
        raise ValueError(f'Edge probability must lie in [0, 1], got {p}')
    return p


def _edge_draws(n: int, seed: int, sample: int) -> np.ndarray:
    return _generator(seed, sample).random(n * (n - 1) // 2)


def _graph_from_draws(n: int, draws: np.ndarray, p: float) -> Graph:
    pairs = itertools.combinations(range(n), 2)
    present = draws < p
    edges = [pair for pair, keep in zip(pairs, present) if keep]
    return Graph.from_edges(n, edges, label=f'G({n},{p:g})')


def sample_gnp(n: int, p: float, seed: int, sample: int = 0) -> Graph:
    """
    A sample of the binomial random graph ``G(n, p)``.

    Parameters
    ----------
    n : int
        Vertex count.
    p : float
        Edge probability in ``[0, 1]``.
    seed : int
        Experiment seed.
    sample : int, optional
        Index of the sample stream under ``seed``.
    """
    p = _check_probability(p)
    return _graph_from_draws(n, _edge_draws(n, seed, sample), p)


def threshold_scale(H: Graph, n: int) -> float:
    """The edge probability ``n^(-1/m2(H))`` at which ``H`` becomes Ramsey."""
    m2 = density_stats(H).two_density
    return float(n) ** (-1 / float(m2))


def random_colouring(host: Graph, r: int, seed: int) -> EdgeColouring:
    """A uniformly random ``r``-colouring of the edges of ``host``."""
    if r < 1:
        raise ValueError(f'Colour count must be positive, got {r}')
    colours = _generator(seed, 0).integers(1, r + 1, size=host.edge_count)
    return EdgeColouring(host, tuple(int(c) for c in colours), r)


def _local_search(G: Graph, H: Graph, r: int, budget: int,
                  rng: np.random.Generator) -> int:
    """
    Restarted single-edge recolouring descent on the monochromatic copy count.

    Strict improvements are always taken; up to :data:`SIDEWAYS_CAP`
    consecutive sideways moves are allowed. ``budget`` counts evaluated moves.
    """
    copies = copy_edge_sets(H, G)
    m = G.edge_count
    through = [[] for _ in range(m)]
    for index, copy in enumerate(copies):
        for edge in copy:
            through[edge].append(index)
    sizes = [len(copy) for copy in copies]
    best = len(copies)

    while budget > 0:
        colours = rng.integers(1, r + 1, size=m).tolist()
        counts = [[0] * (r + 1) for _ in copies]
        for index, copy in enumerate(copies):
            for edge in copy:
                counts[index][colours[edge]] += 1
        value = sum(1 for index in range(len(copies))
                    if max(counts[index]) == sizes[index])
        best = min(best, value)
        sideways = 0
        improved = True
        while improved and budget > 0 and best > 0:
            improved = False
            moves = [(e, c) for e in range(m) for c in range(1, r + 1)
                     if c != colours[e]]
            rng.shuffle(moves)
            for edge, colour in moves:
                if budget <= 0:
                    break
                budget -= 1
                old = colours[edge]
                delta = 0
                for index in through[edge]:
                    delta -= counts[index][old] == sizes[index]
                    delta += counts[index][colour] + 1 == sizes[index]
                if delta < 0 or (delta == 0 and sideways < SIDEWAYS_CAP):
                    sideways = sideways + 1 if delta == 0 else 0
                    for index in through[edge]:
                        counts[index][old] -= 1
                        counts[index][colour] += 1
                    colours[edge] = colour
                    value += delta
                    best = min(best, value)
                    improved = True
                    break
        if best == 0:
            break
    return best


def estimate_robustness(
    G: Graph,
    H: Graph,
    r: int,
    budget: int,
    seed: int = 0,
    threads: int = 1,
) -> tuple[Fraction, bool]:
    """
    Robustness of ``H`` in ``G``, exactly if the budget allows.

    The exact branch-and-bound search runs first with ``budget`` nodes. If it
    does not finish, a restarted local search with another ``budget`` move
    evaluations looks for a better colouring. The inexact value is the
    monochromatic share of the best colouring seen, an upper bound on the
    robustness.

    Returns
    -------
    value, exact : Fraction, bool
    """
    copies = copy_count(H, G)
    if copies == 0:
        raise UndefinedQuantityError(
            f'{G.name} contains no copy of {H.name}; robustness is undefined'
        )
    outcome = multiplicity(G, H, r, budget=budget, threads=threads)
    if outcome.exact:
        return Fraction(outcome.count, copies), True
    found = _local_search(G, H, r, budget, _generator(seed, 0))
    best = min(found, outcome.count)
    logger.debug('Search bound %d, local search %d over %d copies',
                 outcome.count, found, copies)
    return Fraction(best, copies), False


@dataclasses.dataclass(frozen=True)
class ExperimentRow:
    p: float
    arrow_freq: float
    undecided_frac: float
    samples: int
    seed: int
    mean_robustness_bound: Optional[float] = None

    @property
    def exact_fraction(self) -> float:
        return 1 - self.undecided_frac


@dataclasses.dataclass
class Experiment:
    """An arrowing-frequency sweep over edge probabilities."""

    H: Graph
    r: int
    n: int
    p_grid: tuple[float, ...]
    samples: int
    seed: int
    results: list[ExperimentRow] = dataclasses.field(default_factory=list)

    @property
    def undecided(self) -> bool:
        return any(row.undecided_frac > 0 for row in self.results)

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for row in self.results:
            writer.writerow([
                format(row.p, 'g'), format(row.arrow_freq, 'g'),
                format(row.undecided_frac, 'g'), row.samples, row.seed,
            ])
        return buffer.getvalue()

    def to_json(self) -> str:
        data = {
            'pattern': self.H.name,
            'r': self.r,
            'n': self.n,
            'samples': self.samples,
            'seed': self.seed,
            'results': [
                {
                    'p': row.p,
                    'arrow_freq': row.arrow_freq,
                    'undecided_frac': row.undecided_frac,
                    'exact_fraction': row.exact_fraction,
                    'mean_robustness_bound': row.mean_robustness_bound,
                }
                for row in self.results
            ],
        }
        return json.dumps(data, indent=2, sort_keys=True) + '\n'


def arrow_experiment(
    H: Graph,
    r: int,
    n: int,
    p_grid: Sequence[float],
    samples: int,
    seed: int,
    budget: Optional[int] = None,
    threads: int = 1,
    robustness: bool = False,
    progress: bool = False,
) -> Experiment:
    """
    Fraction of ``G(n, p)`` samples that ``r``-arrow ``H``, for each ``p``.

    Samples whose search runs out of budget count as undecided, never as
    arrowing. Exhaustive decisions stay practical up to about ``n = 9`` for
    triangles in two colours.

    Parameters
    ----------
    H : Graph
        The pattern.
    r, n : int
        Colours and vertex count.
    p_grid : sequence of float
        Edge probabilities.
    samples : int
        Samples per probability.
    seed : int
        Experiment seed.
    budget : int, optional
        Node budget per decision.
    threads : int, optional
        Samples decided concurrently.
    robustness : bool, optional
        Also average :func:`estimate_robustness` upper bounds over samples
        containing ``H``; needs ``budget``.
    progress : bool, optional
        Show a line-rate counter on stderr.
    """
    grid = tuple(_check_probability(p) for p in p_grid)
    if samples < 1:
        raise ValueError(f'Sample count must be positive, got {samples}')
    draws = [_edge_draws(n, seed, sample) for sample in range(samples)]
    experiment = Experiment(H, r, n, grid, samples, seed)

    def decide(job):
        p, sample = job
        graph = _graph_from_draws(n, draws[sample], p)
        verdict = arrows(graph, H, r, budget=budget).verdict
        bound = None
        if robustness and copy_count(H, graph):
            bound, _ = estimate_robustness(graph, H, r, budget or 10_000,
                                           seed=seed)
        return verdict, bound

    for p in tqdm(grid, desc='p grid', unit='p', disable=not progress):
        outcomes = utils.run_tasks(
            decide, [(p, sample) for sample in range(samples)], threads,
        )
        verdicts = [verdict for verdict, _ in outcomes]
        bounds = [float(bound) for _, bound in outcomes if bound is not None]
        row = ExperimentRow(
            p=p,
            arrow_freq=sum(v is True for v in verdicts) / samples,
            undecided_frac=sum(v is None for v in verdicts) / samples,
            samples=samples,
            seed=seed,
            mean_robustness_bound=(
                math.fsum(bounds) / len(bounds) if bounds else None
            ),
        )
        logger.info('p=%g: arrow frequency %g (%g undecided)', p,
                    row.arrow_freq, row.undecided_frac)
        experiment.results.append(row)
    return experiment
