"""
A collection of benchmarks to run for blowram.

These are standalone callables so they can be handed to pytest-benchmark or
run under the profiler from the command line.
"""
from __future__ import annotations

import logging
from typing import Any, Callable, Optional, Sequence

from ..bounds import lll_max_n
from ..colouring import arrows, canonical_arrows, multiplicity
from ..extract import extract_monochromatic
from ..graph import Graph, blowup
from ..lab import arrow_experiment, random_colouring

logger = logging.getLogger(__name__)


def arrow_k6_triangle():
    return arrows(Graph.complete(6), Graph.complete(3), 2)


def multiplicity_k6_triangle():
    return multiplicity(Graph.complete(6), Graph.complete(3), 2)


def canonical_edge_blowup():
    edge = Graph.complete(2)
    return canonical_arrows(edge, edge, 2, t=2, n=5)


def lll_edge_t30():
    edge = Graph.complete(2)
    return lll_max_n(edge, edge, 2, (30, 30))


def extract_triangle_blowup():
    triangle = Graph.complete(3)
    host = blowup(triangle, 8)
    colouring = random_colouring(host.graph, 2, seed=0)
    return extract_monochromatic(colouring, host, triangle)


def gnp_triangle_sweep():
    return arrow_experiment(Graph.complete(3), 2, n=7, p_grid=(0.5, 0.9),
                            samples=4, seed=0)


benchmarks: dict[str, Callable[[], Any]] = {
    'arrow_k6_k3': arrow_k6_triangle,
    'mult_k6_k3': multiplicity_k6_triangle,
    'canonical_k2_n5': canonical_edge_blowup,
    'lll_k2_t30': lll_edge_t30,
    'extract_k3_n8': extract_triangle_blowup,
    'gnp_k3_n7': gnp_triangle_sweep,
}


def get_benchmark(name: str) -> Callable[[], Any]:
    try:
        return benchmarks[name]
    except KeyError:
        raise ValueError(f'{name} is not a valid benchmark. '
                         'The full list of valid benchmarks is '
                         f'{list(benchmarks)}') from None


def run_benchmarks(names: Optional[Sequence[str]] = None) -> list:
    """Run the named benchmarks, or all of them, returning their results."""
    selected = list(names) if names else list(benchmarks)
    cases = [get_benchmark(name) for name in selected]
    results = []
    for name, case in zip(selected, cases):
        logger.info('Running benchmark %s', name)
        results.append(case())
    return results
