import dataclasses
import decimal
import itertools
import math
from fractions import Fraction

import pytest

from blowram.colouring import EdgeColouring
from blowram.extract import (Bipartite, CopyFamily, ExtractionResult,
                             covers, extract_biclique,
                             extract_canonical_blowup, extract_monochromatic,
                             guaranteed_sizes, prune_family,
                             validate_extraction)
from blowram.graph import BlowupGraph, Graph, blowup
from blowram.lab import random_colouring
from blowram.utils import (ExtractionError, GraphError,
                           NoMonochromaticCopyError)


def naive_prune(copies, v, theta):
    """Delete under-extended projections one at a time until nothing changes."""
    copies = set(copies)
    while True:
        for copy in sorted(copies):
            projection = copy[:v] + copy[v + 1:]
            extensions = [c for c in copies if c[:v] + c[v + 1:] == projection]
            if len(extensions) < theta:
                copies.difference_update(extensions)
                break
        else:
            return copies


def brute_force_biclique(F, s):
    return max(
        bin(F.common_neighbourhood(subset)).count('1')
        for subset in itertools.combinations(range(F.a_size), s)
    )


def random_bipartite(rng, a_size, b_size, p=0.5):
    pairs = [(a, b) for a in range(a_size) for b in range(b_size)
             if rng.random() < p]
    return Bipartite.from_pairs(a_size, b_size, pairs)


def test_guaranteed_sizes_first_example():
    n = math.ceil(math.exp(16))
    params = guaranteed_sizes(1, 2, n)
    assert (params.t, params.t_prime) == (1, 1)
    assert not params.vacuous


def test_guaranteed_sizes_quarter_density():
    with decimal.localcontext() as context:
        context.prec = 150
        n = int(decimal.Decimal(256).exp().to_integral_value(decimal.ROUND_CEILING))
    params = guaranteed_sizes(Fraction(1, 4), 2, n)
    assert params.ln_t_prime == pytest.approx(192)
    assert math.log(params.t_prime) == pytest.approx(192)
    above = guaranteed_sizes(Fraction(1, 4), 2, 10 ** 112)
    assert above.t == 1


def test_guaranteed_sizes_vacuous():
    params = guaranteed_sizes(Fraction(1, 2), 3, 1)
    assert params.t == 0
    assert params.vacuous


@pytest.mark.parametrize('k, n', [(3, 10 ** 6), (3, 2 ** 60), (4, 10 ** 9)])
def test_guaranteed_sizes_vacuous_at_desk_scale(k, n):
    assert guaranteed_sizes(1, k, n).t <= 1


@pytest.mark.parametrize('rho, k, n', [(0, 2, 5), (Fraction(3, 2), 2, 5),
                                       (1, 1, 5), (1, 2, 0)])
def test_guaranteed_sizes_rejects(rho, k, n):
    with pytest.raises(ValueError):
        guaranteed_sizes(rho, k, n)


def test_biclique_complete_bipartite():
    F = Bipartite.from_pairs(3, 4, itertools.product(range(3), range(4)))
    found = extract_biclique(F, 2)
    assert found.a0 == (0, 1)
    assert found.b0 == (0, 1, 2, 3)
    assert found.exact


def test_biclique_eight_cycle():
    pairs = [(i, i) for i in range(4)] + [(i, (i + 1) % 4) for i in range(4)]
    F = Bipartite.from_pairs(4, 4, pairs)
    assert len(extract_biclique(F, 2).b0) == 1


def test_biclique_matching():
    F = Bipartite.from_pairs(3, 3, [(i, i) for i in range(3)])
    assert len(extract_biclique(F, 1).b0) == 1
    assert extract_biclique(F, 2).b0 == ()


@pytest.mark.parametrize('s', [0, 4])
def test_biclique_rejects_side(s):
    F = Bipartite.from_pairs(3, 3, [(0, 0)])
    with pytest.raises(ValueError):
        extract_biclique(F, s)


def test_biclique_matches_brute_force(rng):
    for _ in range(200):
        a_size = int(rng.integers(1, 9))
        F = random_bipartite(rng, a_size, int(rng.integers(1, 11)))
        s = int(rng.integers(1, a_size + 1))
        found = extract_biclique(F, s)
        assert len(found.a0) == s
        assert found.b0 == tuple(
            b for b in range(F.b_size)
            if F.common_neighbourhood(found.a0) >> b & 1
        )
        assert len(found.b0) == brute_force_biclique(F, s)


def test_biclique_threads_agree(rng):
    F = random_bipartite(rng, 8, 10, p=0.6)
    for s in (1, 2, 3):
        assert extract_biclique(F, s, threads=3) == extract_biclique(F, s)


def test_biclique_greedy_fallback(rng):
    F = random_bipartite(rng, 8, 10, p=0.6)
    found = extract_biclique(F, 3, tally_budget=1)
    assert not found.exact
    assert len(found.a0) == 3
    assert found.b0 == tuple(
        b for b in range(F.b_size) if F.common_neighbourhood(found.a0) >> b & 1
    )


def test_biclique_single_side_meets_degree_guarantee(rng):
    # With s = 1 the best side is a vertex of maximum degree
    for _ in range(50):
        F = random_bipartite(rng, 6, 10, p=0.7)
        if F.edge_count == 0:
            continue
        rho = Fraction(F.edge_count, F.a_size * F.b_size)
        found = extract_biclique(F, 1)
        assert len(found.b0) >= F.b_size ** float(1 - rho)


def test_prune_keeps_full_blowup(k3):
    host = blowup(k3, 4)
    family = CopyFamily.all_copies(host)
    assert len(family) == 64
    assert prune_family(family, 2, 2).copies == family.copies


def test_prune_single_copy(k3):
    host = blowup(k3, 4)
    family = CopyFamily(host, frozenset({(0, 4, 8)}))
    assert len(prune_family(family, 0, 2)) == 0


def test_prune_rejects_vertex(k3):
    family = CopyFamily.all_copies(blowup(k3, 2))
    with pytest.raises(ValueError):
        prune_family(family, 3, 1)


def test_prune_matches_fixed_point_oracle(rng, k3):
    host = blowup(k3, 4)
    everything = sorted(CopyFamily.all_copies(host).copies)
    for _ in range(500):
        keep = rng.random(len(everything)) < rng.uniform(0.2, 0.9)
        copies = frozenset(c for c, kept in zip(everything, keep) if kept)
        if not copies:
            continue
        family = CopyFamily(host, copies)
        v = int(rng.integers(3))
        theta = Fraction(int(rng.integers(1, 5)), int(rng.integers(1, 3)))
        pruned = prune_family(family, v, theta)
        assert pruned.copies == naive_prune(copies, v, theta)
        assert prune_family(pruned, v, theta).copies == pruned.copies
        assert len(pruned) > len(family) - theta * len(family.projections(v))


def test_copy_family_rejects_foreign_copy(k3):
    host = blowup(k3, 2)
    with pytest.raises(GraphError):
        CopyFamily(host, frozenset({(0, 1, 4)}))


def test_extract_full_blowup_with_target(k3):
    host = blowup(k3, 4)
    result = extract_canonical_blowup(host, target=2)
    assert result.sizes == (2, 2, 4)
    assert result.rho == 1
    validate_extraction(result, host, k3)


def test_extract_full_blowup_auto(k3):
    host = blowup(k3, 4)
    result = extract_canonical_blowup(host, keep_cover=True)
    assert result.sizes == (4, 4, 4)
    assert covers(result.covered_by, result)


def test_extract_two_classes_is_a_biclique(k2):
    # Class 2 has only its first four slots joined to class 1
    host = blowup(k2, 8)
    half = host.with_edges(
        [(x, y) for x in range(8) for y in range(8, 12)]
    )
    result = extract_canonical_blowup(half, target=2)
    assert result.class_subsets[1] == (8, 9, 10, 11)
    assert len(result.class_subsets[0]) == 2
    assert extract_canonical_blowup(half).sizes == (8, 4)


@pytest.mark.parametrize('sizes, pivot, expected', [
    ((4, 2), None, (4, 2)),
    ((3, 7), 0, (3, 7)),
    ((3, 7), None, (3, 7)),
    ((5, 5), None, (5, 5)),
])
def test_extract_auto_sizing_takes_whole_blowup(k2, sizes, pivot, expected):
    result = extract_canonical_blowup(blowup(k2, sizes), pivot=pivot)
    assert result.sizes == expected


def test_extract_auto_sizing_beats_every_other_side(rng, k2):
    for _ in range(30):
        a_size, b_size = (int(x) for x in rng.integers(2, 7, size=2))
        host = blowup(k2, (a_size, b_size))
        edges = [(x, y) for x, y in host.graph.edges if rng.random() < 0.7]
        sub = host.with_edges(edges)
        if not edges:
            continue
        found = extract_canonical_blowup(sub).sizes
        F = Bipartite.from_pairs(
            a_size, b_size, [(x, y - a_size) for x, y in edges]
        )
        best = max(
            (min(s, c), s * c)
            for s in range(1, a_size + 1)
            for c in [brute_force_biclique(F, s)] if c
        )
        assert (min(found), found[0] * found[1]) == best


def test_guarantee_met_reads_the_pivot_class():
    params = guaranteed_sizes(1, 2, math.ceil(math.exp(16)))
    params = dataclasses.replace(params, t_prime=5)
    result = ExtractionResult(((0, 1, 2, 3, 4, 5, 6), (7,)), params=params,
                              pivot=0)
    assert result.guarantee_met == 'yes'
    assert dataclasses.replace(result, pivot=None).guarantee_met == 'no'
    assert dataclasses.replace(result, pivot=1).guarantee_met == 'no'


def test_extract_pivot_choice(k3):
    host = blowup(k3, 3)
    result = extract_canonical_blowup(host, target=1, pivot=0)
    assert result.sizes == (3, 1, 1)


def test_extract_without_copies(k2):
    empty = blowup(k2, 3).with_edges([])
    with pytest.raises(NoMonochromaticCopyError):
        extract_canonical_blowup(empty)


def test_validate_extraction_catches_missing_edge(k2):
    host = blowup(k2, 2)
    sparse = host.without_edges([(0, 2)])
    bad = ExtractionResult(class_subsets=((0, 1), (2, 3)))
    validate_extraction(bad, host, k2)
    with pytest.raises(ExtractionError):
        validate_extraction(bad, sparse, k2)
    with pytest.raises(ExtractionError):
        validate_extraction(ExtractionResult(((0,), (1,))), host, k2)


def test_monochromatic_uniform_triangle_blowup(k3):
    host = blowup(k3, 5)
    colouring = EdgeColouring.uniform(host.graph, 2, colour=1)
    found = extract_monochromatic(colouring, host, k3, target=3)
    assert found.colour == 1
    assert found.result.sizes == (3, 3, 5)
    assert found.count == 125


def test_monochromatic_edge_blowup_of_four(k2):
    host = blowup(k2, 4)
    colouring = EdgeColouring.uniform(host.graph, 2, colour=2)
    found = extract_monochromatic(colouring, host, k2, target=2)
    assert found.colour == 2
    assert found.result.sizes[0] == 2
    assert found.result.sizes[1] >= 2


def test_monochromatic_edge_blowup_of_five(k2):
    host = blowup(k2, 5)
    for seed in range(40):
        colouring = random_colouring(host.graph, 2, seed)
        found = extract_monochromatic(colouring, host, k2, target=2)
        assert found.result.sizes[0] == 2
        assert found.result.sizes[1] >= 2
        validate_extraction(found.result, host, k2, colouring)


def test_monochromatic_threads_agree(k3):
    host = blowup(k3, 4)
    colouring = random_colouring(host.graph, 2, seed=11)
    assert (extract_monochromatic(colouring, host, k3, threads=3).to_json()
            == extract_monochromatic(colouring, host, k3).to_json())


def test_monochromatic_random_triangle_blowups(k3):
    host = blowup(k3, 6)
    for seed in range(20):
        colouring = random_colouring(host.graph, 2, seed)
        found = extract_monochromatic(colouring, host, k3)
        assert min(found.result.sizes) >= 1
        validate_extraction(found.result, host, k3, colouring)


@pytest.mark.slow
def test_monochromatic_random_triangle_blowups_large(k3):
    host = blowup(k3, 12)
    for seed in range(1000):
        colouring = random_colouring(host.graph, 2, seed)
        found = extract_monochromatic(colouring, host, k3)
        assert min(found.result.sizes) >= 1
        validate_extraction(found.result, host, k3, colouring)


def test_monochromatic_without_pattern_copy(k3):
    host = blowup(Graph.cycle(5), 2)
    colouring = EdgeColouring.uniform(host.graph, 2)
    with pytest.raises(NoMonochromaticCopyError) as info:
        extract_monochromatic(colouring, host, k3)
    assert info.value.max_count == 0


def test_monochromatic_rejects_foreign_colouring(k2, k3):
    host = blowup(k3, 2)
    colouring = EdgeColouring.uniform(blowup(k3, 3).graph, 2)
    with pytest.raises(GraphError):
        extract_monochromatic(colouring, host, k2)


def test_blowup_graph_construction_for_colour_class(k2):
    graph = Graph.from_edges(4, [(0, 2), (1, 3)])
    sub = BlowupGraph(k2, (2, 2), graph)
    result = extract_canonical_blowup(sub)
    assert result.sizes == (1, 1)
    assert result.guarantee_met in ('yes', 'no', 'vacuous')


def test_monochromatic_witness_is_the_found_blowup(k3):
    host = blowup(k3, 5)
    colouring = random_colouring(host.graph, 2, seed=4)
    found = extract_monochromatic(colouring, host, k3)
    witness = found.witness(colouring, k3)
    assert witness.host.same_structure(blowup(k3, found.result.sizes).graph)
    assert set(witness.colours) == {found.colour}
    assert witness.r == 2
