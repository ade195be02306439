import math
from fractions import Fraction

import pytest

from blowram.bounds import (LogValue, asymmetric_nonarrow_bound,
                            asymptotic_lower, burr_rosta_bound,
                            find_lll_max_n, ln_binomial, lll_condition,
                            lll_max_n, upper_constant)
from blowram.colouring import robustness
from blowram.graph import Graph, inj_count
from blowram.utils import UndefinedQuantityError


def exact_holds(G, H, r, t_vec, n):
    """Exact evaluation of the local-lemma condition, independent of the module."""
    products = [t_vec[i] * t_vec[j] for i, j in H.edges]
    e_tilde = sum(products)
    q = Fraction(inj_count(H, G) * e_tilde * max(products),
                 n * n * r ** (e_tilde - 1))
    for t in t_vec:
        q *= math.comb(n, t)
    if q == 0:
        return True
    return 1 + math.log(q.numerator) - math.log(q.denominator) <= 0


def test_upper_constant_edge(k2):
    report = upper_constant(k2, k2, 2)
    assert report.robustness_used == 1
    assert report.ln_c == 64
    assert report.ln_c0 == 32
    assert report.to_json()['ln_c'] == '64'


def test_upper_constant_triangle_in_k6(k6, k3):
    report = upper_constant(k6, k3, 2, robustness=Fraction(1, 10))
    assert report.ln_c == 32_768_000
    assert report.ln_c0 == report.ln_c * (1 - Fraction(1, 20) ** 2)
    assert 0 < report.ln_c0 < report.ln_c
    assert 'canonically 2-arrows' in report.claim


def test_upper_constant_computes_robustness(k6, k3):
    assert upper_constant(k6, k3, 2).ln_c == 32_768_000


def test_upper_constant_one_colour(k3):
    report = upper_constant(k3, k3, 1)
    assert report.ln_c == 4096
    assert report.ln_c0 == 0


def test_upper_constant_original_variant(k2):
    report = upper_constant(k2, k2, 2, variant='orig')
    assert report.variant == 'original'
    assert report.ln_c == 4 * 2 ** 4


def test_upper_constant_undefined(k5, k3):
    with pytest.raises(UndefinedQuantityError):
        upper_constant(k5, k3, 2)


def test_upper_constant_antitone_in_robustness(k6, k3):
    values = [Fraction(1, 20), Fraction(1, 10), Fraction(1, 4), Fraction(1, 2)]
    constants = [upper_constant(k6, k3, 2, robustness=R).ln_c for R in values]
    assert constants == sorted(constants, reverse=True)


def test_burr_rosta_bound(k6, k3):
    assert burr_rosta_bound(k3, 2) == Fraction(1, 4)
    assert robustness(k6, k3, 2) <= burr_rosta_bound(k3, 2)


@pytest.mark.slow
def test_robustness_grows_towards_burr_rosta(k3):
    values = [robustness(Graph.complete(n), k3, 2) for n in (5, 6, 7)]
    assert values == [0, Fraction(1, 10), Fraction(4, 35)]
    assert values[-1] <= burr_rosta_bound(k3, 2)


def test_ln_binomial():
    assert ln_binomial(10, 3) == pytest.approx(math.log(120))
    assert ln_binomial(5, 0) == 0
    assert ln_binomial(3, 4) == -math.inf
    huge = 10 ** 40
    assert ln_binomial(huge, 2) == pytest.approx(
        math.log(huge) + math.log(huge - 1) - math.log(2)
    )


def test_lll_condition_edge_small(k2):
    certificate = lll_condition(k2, k2, 2, (2, 2), 4)
    assert not certificate.holds
    assert certificate.ln_lhs == pytest.approx(1 + math.log(9))
    assert certificate.delta == 4
    assert certificate.e_tilde == 4


def test_lll_condition_edge_large(k2):
    certificate = lll_condition(k2, k2, 2, (40, 40), 10 ** 6)
    assert certificate.holds
    assert certificate.ln_lhs < 0
    assert certificate.to_json()['holds'] is True


def test_lll_condition_without_copies(k3):
    certificate = lll_condition(Graph.cycle(4), k3, 2, (1, 1, 1), 50)
    assert certificate.holds
    assert certificate.ln_lhs == -math.inf


def test_lll_condition_no_canonical_copy(k2):
    certificate = lll_condition(k2, k2, 2, (5, 5), 3)
    assert certificate.holds
    assert certificate.reason == 'no canonical copy'


def test_lll_condition_rejects_wrong_length(k2):
    with pytest.raises(ValueError):
        lll_condition(k2, k2, 2, (2, 2, 2), 10)


def test_lll_condition_rational_near_boundary(k2):
    # Largest certified n sits right at the boundary for small parts
    n = lll_max_n(k2, k2, 2, (12, 12))
    assert n > 0
    for m in (n, n + 1):
        certificate = lll_condition(k2, k2, 2, (12, 12), m)
        if abs(certificate.ln_lhs) < 0.01:
            assert certificate.exactness == 'rational'
        assert certificate.holds == exact_holds(k2, k2, 2, (12, 12), m)


def agreement_checks(rng, trials):
    hosts = [Graph.complete(3), Graph.complete(4), Graph.cycle(5)]
    patterns = [Graph.complete(2), Graph.path(3), Graph.complete(3)]
    checked = 0
    for _ in range(trials):
        G = hosts[rng.integers(len(hosts))]
        H = patterns[rng.integers(len(patterns))]
        r = int(rng.integers(2, 4))
        t_vec = tuple(int(t) for t in rng.integers(1, 6, size=H.vertex_count))
        n = int(rng.integers(max(t_vec), 400))
        certificate = lll_condition(G, H, r, t_vec, n)
        if abs(certificate.ln_lhs) < 0.01:
            continue
        assert certificate.holds == exact_holds(G, H, r, t_vec, n)
        checked += 1
    return checked


def test_log_and_exact_evaluations_agree(rng):
    assert agreement_checks(rng, 300) > 100


@pytest.mark.slow
def test_log_and_exact_evaluations_agree_large(rng):
    assert agreement_checks(rng, 10_000) > 3000


def test_lll_max_n_edge_never_holds(k2):
    assert lll_max_n(k2, k2, 2, (2, 2)) == 0


def test_lll_max_n_cap_below_parts(k2):
    assert lll_max_n(k2, k2, 2, (40, 40), n_cap=39) == 0


@pytest.mark.parametrize('t', [16, 24, 30])
def test_lll_max_n_is_the_boundary(k2, t):
    search = find_lll_max_n(k2, k2, 2, (t, t))
    assert search.monotone
    assert search.certificate.holds
    assert lll_condition(k2, k2, 2, (t, t), search.n).holds
    assert not lll_condition(k2, k2, 2, (t, t), search.n + 1).holds


def test_lll_max_n_respects_cap(k2):
    free = lll_max_n(k2, k2, 2, (20, 20))
    assert lll_max_n(k2, k2, 2, (20, 20), n_cap=free // 2) == free // 2


def test_lll_max_n_matches_leading_order(k2):
    ratios = [
        lll_max_n(k2, k2, 2, (t, t)) / (t * 2 ** (t / 2))
        for t in (30, 40, 50)
    ]
    # Converges slowly from below towards sqrt(2) / e
    assert all(0.46 <= ratio <= 0.53 for ratio in ratios)
    assert ratios == sorted(ratios)
    assert ratios[-1] < math.sqrt(2) / math.e


@pytest.mark.parametrize('H, t, expected', [
    (Graph.complete(3), 10, 2 ** (2 / 3) / math.e * 10 * 2 ** 10),
    (Graph.complete(2), 10, math.sqrt(2) / math.e * 10 * 2 ** 5),
])
def test_asymptotic_lower_examples(H, t, expected):
    bound = asymptotic_lower(H, 2, t)
    assert bound.value == pytest.approx(expected)


def test_asymptotic_lower_growth_base(k3, k2):
    assert asymptotic_lower(k3, 2, 5).growth_base == pytest.approx(2)
    assert asymptotic_lower(k2, 2, 5).growth_base == pytest.approx(math.sqrt(2))


def test_asymptotic_lower_first_moment(k3):
    lll = asymptotic_lower(k3, 2, 10)
    plain = asymptotic_lower(k3, 2, 10, method='first-moment')
    assert plain.method == 'first-moment'
    assert lll.ln - plain.ln == pytest.approx(2 / 3 * math.log(2))


def test_asymptotic_lower_rendering(k3):
    bound = asymptotic_lower(k3, 2, 10)
    assert bound.rendering == '5.98e3'
    assert asymptotic_lower(k3, 2, 5000).value == math.inf
    assert asymptotic_lower(k3, 2, 5000).rendering.endswith('e1508')


def test_asymmetric_bound_per_t_exponent(k2):
    bound = asymmetric_nonarrow_bound(k2, 2, 10, 32)
    assert bound.per_t_exponent == pytest.approx(math.log(2) + 32)
    assert round(bound.per_t_exponent, 2) == 32.69
    assert bound.ln == pytest.approx(math.log(10) - 1 + 10 * (math.log(2) + 32))


def test_asymmetric_bound_small(k2):
    bound = asymmetric_nonarrow_bound(k2, 2, 1, math.log(2))
    assert bound.ln == pytest.approx(-1 + 2 * math.log(2))


def test_asymmetric_bound_degenerates_to_symmetric_exponent(k3):
    bound = asymmetric_nonarrow_bound(k3, 2, 10, 1e-12)
    assert bound.per_t_exponent == pytest.approx(2 * math.log(2))


def test_asymmetric_bound_rejects_nonpositive_ln_k(k2):
    with pytest.raises(ValueError):
        asymmetric_nonarrow_bound(k2, 2, 10, 0)


@pytest.mark.parametrize('ln, rendering', [
    (math.log(1000), '1e3'),
    (-math.inf, '0'),
    (math.inf, 'inf'),
])
def test_log_value_rendering(ln, rendering):
    assert LogValue(ln).rendering == rendering
