from .bounds import (asymmetric_nonarrow_bound, asymptotic_lower,
                     burr_rosta_bound, find_lll_max_n, lll_condition,
                     lll_max_n, upper_constant)
from .colouring import (EdgeColouring, SearchOutcome, arrows,
                        blowup_ramsey_number, canonical_arrows,
                        count_monochromatic_canonical_copies,
                        count_monochromatic_copies, multiplicity, robustness,
                        robustness_with_outcome, verify_signal_sender)
from .extract import (CopyFamily, ExtractionResult, extract_biclique,
                      extract_canonical_blowup, extract_monochromatic,
                      guaranteed_sizes, prune_family, validate_extraction)
from .graph import (BlowupGraph, Graph, automorphism_count, blowup,
                    count_canonical_copies, density_stats, inj_count,
                    load_graph, named_graph, parse_graph, serialize_graph)
from .lab import (arrow_experiment, estimate_robustness, sample_gnp,
                  threshold_scale)
from .utils import BlowramException
from .version import __version__  # noqa: F401

__all__ = [
    'BlowramException',
    'BlowupGraph',
    'CopyFamily',
    'EdgeColouring',
    'ExtractionResult',
    'Graph',
    'SearchOutcome',
    'arrow_experiment',
    'arrows',
    'asymmetric_nonarrow_bound',
    'asymptotic_lower',
    'automorphism_count',
    'blowup',
    'blowup_ramsey_number',
    'burr_rosta_bound',
    'canonical_arrows',
    'count_canonical_copies',
    'count_monochromatic_canonical_copies',
    'count_monochromatic_copies',
    'density_stats',
    'estimate_robustness',
    'extract_biclique',
    'extract_canonical_blowup',
    'extract_monochromatic',
    'find_lll_max_n',
    'guaranteed_sizes',
    'inj_count',
    'lll_condition',
    'lll_max_n',
    'load_graph',
    'multiplicity',
    'named_graph',
    'parse_graph',
    'prune_family',
    'robustness',
    'robustness_with_outcome',
    'sample_gnp',
    'serialize_graph',
    'threshold_scale',
    'upper_constant',
    'validate_extraction',
]
