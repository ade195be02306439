"""This module defines the ``blowram`` command line utility"""
from __future__ import annotations

import argparse
import json
import logging
import re
import signal
import sys
import types
from contextlib import nullcontext
from typing import Callable, Optional

import coloredlogs

from . import __version__ as blowram_version
from . import utils
from .benchmark.cases import run_benchmarks
from .benchmark.profile import has_line_profiler, profiler_context
from .bounds import (CONSTANT_VARIANTS, LOWER_METHODS, DEFAULT_N_CAP,
                     asymmetric_nonarrow_bound, asymptotic_lower,
                     burr_rosta_bound, find_lll_max_n, lll_condition,
                     upper_constant)
from .colouring import (SIGNS, BlowupRamseyStatus, EdgeColouring, arrows,
                        blowup_ramsey_number, multiplicity,
                        robustness_with_outcome, verify_signal_sender)
from .extract import extract_monochromatic
from .graph import Graph, blowup, density_stats, load_graph, named_graph
from .lab import arrow_experiment, random_colouring
from .utils import (BlowramException, NoMonochromaticCopyError,
                    SearchBudgetExceeded, UndefinedQuantityError,
                    parse_int_list)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

_GRAPH_NAME = re.compile(r'[kcp]\d+', re.IGNORECASE)


class BlowramArguments(types.SimpleNamespace):
    """Type hints for ``blowram`` CLI entrypoint arguments."""

    command: Optional[str]
    version: bool
    verbose: bool
    profile_modules: Optional[list[str]]
    profile_output: Optional[str]
    benchmark: Optional[list[str]]
    graph: Optional[str]
    pattern: Optional[str]
    r: int
    t: Optional[int]
    t_vec: Optional[str]
    n: Optional[int]
    n_cap: Optional[int]
    budget: Optional[int]
    seed: Optional[int]
    threads: int
    json: bool
    witness: Optional[str]
    p_grid: Optional[str]
    samples: int
    variant: str
    method: str
    ln_k: Optional[float]
    colouring: Optional[str]
    save_colouring: Optional[str]
    edge_e: Optional[str]
    edge_f: Optional[str]
    sign: str
    robustness: bool
    progress: bool


# Argument Parser Setup
parser = argparse.ArgumentParser(
    prog='blowram',
    description='Compute and certify blowup Ramsey quantities.',
)
parser.add_argument(
    '--version',
    '-V',
    action='store_true',
    help='Current version and location of the blowram installation.',
)
parser.add_argument(
    '--verbose',
    '-v',
    action='store_true',
    help='Show the debug logging stream.',
)
parser.add_argument(
    '--profile-modules',
    nargs='*',
    help=(
        'Submodules to profile with line_profiler. With no names given, '
        'the graph, colouring, bounds, extraction and random modules are '
        'profiled.'
    ),
)
parser.add_argument(
    '--profile-output',
    help='Write the profiling table to this file instead of the screen.',
)
parser.add_argument(
    '--benchmark',
    nargs='*',
    help=(
        'Run the named benchmark cases under the profiler. With no names '
        'given, every case is run.'
    ),
)

subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')


def _graph_args(sub, graph=True, pattern=True, colours=True):
    if graph:
        sub.add_argument('--graph', required=True, metavar='PATH|NAME',
                         help='Host graph: a built-in name such as k6 or a file.')
    if pattern:
        sub.add_argument('--pattern', required=True, metavar='PATH|NAME',
                         help='Pattern graph: a built-in name or a file.')
    if colours:
        sub.add_argument('-r', type=int, default=2,
                         help='Number of colours (default 2).')


def _search_args(sub, witness=True):
    sub.add_argument('--budget', type=int, default=utils.DEFAULT_BUDGET,
                     help='Node budget of the search; unlimited by default.')
    sub.add_argument('--threads', type=int, default=utils.DEFAULT_THREADS,
                     help='Worker threads (default: machine parallelism).')
    sub.add_argument('--json', action='store_true',
                     help='Emit a JSON record instead of a report line.')
    if witness:
        sub.add_argument('--witness', metavar='PATH',
                         help='Write the witness colouring to this file.')


def _t_args(sub, required=False):
    group = sub.add_mutually_exclusive_group(required=required)
    group.add_argument('-t', type=int,
                       help='Part size used for every pattern vertex.')
    group.add_argument('--t-vec', metavar='a,b,c',
                       help='One part size per pattern vertex.')


sub = subparsers.add_parser('arrow', help='Decide G -> (H)_r.')
_graph_args(sub)
_search_args(sub)

sub = subparsers.add_parser(
    'mult', help='Least number of monochromatic copies over all colourings.',
)
_graph_args(sub)
_search_args(sub)

sub = subparsers.add_parser(
    'robustness', help='Multiplicity divided by the number of copies.',
)
_graph_args(sub)
_search_args(sub)

sub = subparsers.add_parser(
    'blowup-ramsey', help='Least n with G[n] canonically arrowing H[t].',
)
_graph_args(sub)
sub.add_argument('-t', type=int, required=True, help='Pattern part size.')
sub.add_argument('--n-cap', type=int, default=8,
                 help='Largest class size scanned (default 8).')
_search_args(sub)

sub = subparsers.add_parser(
    'lll', help='Evaluate or maximize the local-lemma condition.',
)
_graph_args(sub)
_t_args(sub, required=True)
sub.add_argument('-n', type=int,
                 help='Class size to evaluate; the largest one is searched '
                      'when omitted.')
sub.add_argument('--n-cap', type=int, default=DEFAULT_N_CAP,
                 help='Upper end of the search for the largest class size.')
sub.add_argument('--json', action='store_true',
                 help='Emit a JSON record instead of a report line.')

sub = subparsers.add_parser(
    'bounds', help='Upper constants and asymptotic lower bounds.',
)
_graph_args(sub)
sub.add_argument('-t', type=int,
                 help='Part size for the lower bounds; skipped when omitted.')
sub.add_argument('--variant', default='blowup',
                 help=f'Upper constant, one of {", ".join(CONSTANT_VARIANTS)}.')
sub.add_argument('--method', default='lll',
                 help=f'Lower bound method, one of {", ".join(LOWER_METHODS)}.')
sub.add_argument('--ln-k', type=float,
                 help='ln k for the asymmetric non-arrowing bound; needs -t.')
_search_args(sub, witness=False)

sub = subparsers.add_parser(
    'extract', help='Monochromatic canonical blowup in a coloured G[n].',
)
_graph_args(sub)
sub.add_argument('-n', type=int,
                 help='Class size; read from --colouring when omitted.')
sub.add_argument('-t', type=int,
                 help='Requested size of the small classes.')
sub.add_argument('--colouring', metavar='PATH',
                 help='Colouring of G[n]; a random one needs --seed.')
sub.add_argument('--seed', type=int, help='Seed of the random colouring.')
sub.add_argument('--save-colouring', metavar='PATH',
                 help='Write the searched colouring of G[n] to this file.')
_search_args(sub)

sub = subparsers.add_parser(
    'gnp', help='Arrowing frequency of G(n, p) over a grid of p.',
)
_graph_args(sub, graph=False)
sub.add_argument('-n', type=int, required=True, help='Vertex count.')
sub.add_argument('--p-grid', required=True, metavar='CSV',
                 help='Comma-separated edge probabilities.')
sub.add_argument('--samples', type=int, default=20,
                 help='Samples per probability (default 20).')
sub.add_argument('--seed', type=int, required=True, help='Experiment seed.')
sub.add_argument('--robustness', action='store_true',
                 help='Also report mean robustness upper bounds.')
sub.add_argument('--progress', action='store_true',
                 help='Show a line-rate counter on stderr.')
_search_args(sub, witness=False)

sub = subparsers.add_parser(
    'sender', help='Check a positive or negative signal sender.',
)
_graph_args(sub)
sub.add_argument('--edge-e', required=True, metavar='u,v',
                 help='First signal edge.')
sub.add_argument('--edge-f', required=True, metavar='u,v',
                 help='Second signal edge.')
sub.add_argument('--sign', default='positive',
                 help=f'One of {", ".join(SIGNS)} (default positive).')
_search_args(sub)

sub = subparsers.add_parser(
    'densities', help='Average degree, max density and 2-density.',
)
_graph_args(sub, graph=False, colours=False)
sub.add_argument('--json', action='store_true',
                 help='Emit a JSON record instead of a report line.')

del sub

__doc__ += '\n::\n\n    ' + parser.format_help().replace('\n', '\n    ')


def blowram_cli_setup(args: BlowramArguments) -> None:
    """Setup logging."""
    logging.getLogger().addHandler(logging.NullHandler())
    shown_logger = logging.getLogger('blowram')
    if args.verbose:
        level = "DEBUG"
        log_fmt = (
            '[%(asctime)s] - %(levelname)s - Thread (%(thread)d - '
            '%(threadName)s ) - %(name)s -> %(message)s'
        )
    else:
        level = "INFO"
        log_fmt = '[%(asctime)s] - %(levelname)s - %(message)s'
    coloredlogs.install(level=level, logger=shown_logger, fmt=log_fmt,
                        stream=sys.stderr)
    logger.debug("Set logging level of %r to %r", shown_logger.name, level)


def resolve_graph(value: str) -> Graph:
    """A built-in graph name such as ``k6``, or a graph file."""
    if _GRAPH_NAME.fullmatch(value):
        return named_graph(value)
    if value[:1].isdigit():
        raise ValueError(
            f'{value!r} is neither a built-in graph name nor a usable path; '
            'graph file names must not start with a digit'
        )
    return load_graph(value)


def _parse_edge(text: str) -> tuple[int, int]:
    values = parse_int_list(text)
    if len(values) != 2:
        raise ValueError(f'An edge is two vertices "u,v", got {text!r}')
    return values[0], values[1]


def _t_vec(args: BlowramArguments, pattern: Graph) -> list[int]:
    if args.t_vec is not None:
        return parse_int_list(args.t_vec)
    return [args.t] * pattern.vertex_count


def _emit(data: dict) -> None:
    print(json.dumps(data, indent=2, sort_keys=True))


def _save_witness(colouring: Optional[EdgeColouring], path: Optional[str]):
    if path is None or colouring is None:
        return None
    colouring.save(path)
    logger.info('Wrote colouring to %s', path)
    return path


def _yes_no(verdict: Optional[bool]) -> str:
    return {True: 'yes', False: 'no', None: 'unknown'}[verdict]


def _verdict_code(verdict: Optional[bool]) -> int:
    return {True: EXIT_OK, False: EXIT_NEGATIVE, None: EXIT_BUDGET}[verdict]


def run_arrow(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    outcome = arrows(G, H, args.r, budget=args.budget, threads=args.threads)
    path = _save_witness(outcome.witness, args.witness)
    if args.json:
        _emit(outcome.to_json(path))
    else:
        print(f'ARROWS: {_yes_no(outcome.verdict)}')
    return _verdict_code(outcome.verdict)


def run_mult(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    outcome = multiplicity(G, H, args.r, budget=args.budget,
                           threads=args.threads)
    path = _save_witness(outcome.witness, args.witness)
    if args.json:
        _emit(outcome.to_json(path))
    elif outcome.exact:
        print(f'MULTIPLICITY: {outcome.count}')
    else:
        print(f'MULTIPLICITY: <= {outcome.count} (budget exhausted)')
    return EXIT_OK if outcome.exact else EXIT_BUDGET


def run_robustness(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    try:
        value, outcome = robustness_with_outcome(
            G, H, args.r, budget=args.budget, threads=args.threads,
        )
    except SearchBudgetExceeded as ex:
        outcome = ex.outcome
        path = _save_witness(outcome.witness, args.witness)
        if args.json:
            _emit(dict(outcome.to_json(path), robustness=None))
        else:
            print(f'ROBUSTNESS: unknown ({ex})')
        return EXIT_BUDGET
    if args.json:
        _emit({'robustness': utils.format_fraction(value), 'exact': True})
    else:
        print(f'ROBUSTNESS: {utils.format_fraction(value)}')
    _save_witness(outcome.witness, args.witness)
    return EXIT_OK


def run_blowup_ramsey(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    result = blowup_ramsey_number(G, H, args.r, args.t, args.n_cap,
                                  budget=args.budget, threads=args.threads)
    failing = [n for n, o in result.outcomes.items() if o.verdict is False]
    path = None
    if failing:
        path = _save_witness(result.outcomes[max(failing)].witness,
                             args.witness)
    if args.json:
        _emit(dict(result.to_json(), witness_path=path))
    else:
        shown = {
            BlowupRamseyStatus.found: str(result.value),
            BlowupRamseyStatus.infinite: 'infinite',
            BlowupRamseyStatus.above_cap: f'> {args.n_cap}',
            BlowupRamseyStatus.unknown: 'unknown',
        }[result.status]
        print(f'BLOWUP RAMSEY NUMBER: {shown}')
    return {
        BlowupRamseyStatus.found: EXIT_OK,
        BlowupRamseyStatus.infinite: EXIT_NEGATIVE,
        BlowupRamseyStatus.above_cap: EXIT_NEGATIVE,
        BlowupRamseyStatus.unknown: EXIT_BUDGET,
    }[result.status]


def run_lll(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    t_vec = _t_vec(args, H)
    if args.n is not None:
        certificate = lll_condition(G, H, args.r, t_vec, args.n)
        if args.json:
            _emit(certificate.to_json())
        else:
            state = 'holds' if certificate.holds else 'fails'
            print(f'LLL CONDITION: {state} (ln lhs = {certificate.ln_lhs:.6g})')
        return EXIT_OK if certificate.holds else EXIT_NEGATIVE

    search = find_lll_max_n(G, H, args.r, t_vec, n_cap=args.n_cap)
    if args.json:
        _emit({
            'n': str(search.n),
            'probes': search.probes,
            'monotone': search.monotone,
            'certificate': (search.certificate.to_json()
                            if search.certificate else None),
        })
    else:
        print(f'LLL MAX N: {search.n}')
    return EXIT_OK if search.n else EXIT_NEGATIVE


def run_bounds(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    if args.ln_k is not None and args.t is None:
        raise ValueError('--ln-k needs a part size -t')
    try:
        report = upper_constant(G, H, args.r, variant=args.variant,
                                budget=args.budget)
    except UndefinedQuantityError as ex:
        if args.json:
            _emit({'ln_c': None, 'ln_c0': None, 'reason': str(ex)})
        else:
            print(f'BOUNDS: undefined ({ex})')
        return EXIT_NEGATIVE

    data = report.to_json()
    data['burr_rosta'] = utils.format_fraction(burr_rosta_bound(H, args.r))
    lines = [
        f'LN C: {data["ln_c"]}',
        f'LN C0: {data["ln_c0"]}',
        f'ROBUSTNESS USED: {data["robustness"]}',
    ]
    if args.t is not None:
        lower = asymptotic_lower(H, args.r, args.t, method=args.method)
        data['lower'] = lower.to_json()
        lines.append(
            f'LOWER BOUND: {lower.rendering} ({lower.method}, growth base '
            f'{lower.growth_base:g})'
        )
        if args.ln_k is not None:
            asym = asymmetric_nonarrow_bound(H, args.r, args.t, args.ln_k)
            data['asymmetric'] = asym.to_json()
            lines.append(
                f'ASYMMETRIC BOUND: {asym.rendering} (per-t exponent '
                f'{asym.per_t_exponent:.4g})'
            )
    if args.json:
        _emit(data)
    else:
        print('\n'.join(lines))
    return EXIT_OK


def run_extract(args: BlowramArguments) -> int:
    G, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    if args.colouring is not None:
        colouring = EdgeColouring.load(args.colouring)
        n = args.n or colouring.host.vertex_count // G.vertex_count
        host = blowup(G, n)
    elif args.seed is None:
        raise ValueError('A random colouring needs --seed')
    elif args.n is None:
        raise ValueError('A random colouring needs a class size -n')
    else:
        host = blowup(G, args.n)
        colouring = random_colouring(host.graph, args.r, args.seed)
    _save_witness(colouring, args.save_colouring)

    try:
        found = extract_monochromatic(colouring, host, H, target=args.t,
                                      threads=args.threads)
    except NoMonochromaticCopyError as ex:
        if args.json:
            _emit({'sizes': None, 'max_count': ex.max_count, 'reason': str(ex)})
        else:
            print(f'EXTRACTED: none ({ex})')
        return EXIT_NEGATIVE

    path = _save_witness(found.witness(colouring, H), args.witness)
    if args.json:
        _emit(dict(found.to_json(), witness_path=path))
    else:
        sizes = ', '.join(str(size) for size in found.result.sizes)
        print(f'EXTRACTED: colour {found.colour}, sizes ({sizes}), '
              f'guarantee met: {found.result.guarantee_met}')
    return EXIT_OK


def run_gnp(args: BlowramArguments) -> int:
    H = resolve_graph(args.pattern)
    grid = [float(p) for p in args.p_grid.split(',') if p.strip()]
    experiment = arrow_experiment(
        H, args.r, args.n, grid, args.samples, args.seed,
        budget=args.budget, threads=args.threads,
        robustness=args.robustness, progress=args.progress,
    )
    if args.json:
        sys.stdout.write(experiment.to_json())
    else:
        sys.stdout.write(experiment.to_csv())
    return EXIT_BUDGET if experiment.undecided else EXIT_OK


def run_sender(args: BlowramArguments) -> int:
    S, H = resolve_graph(args.graph), resolve_graph(args.pattern)
    report = verify_signal_sender(
        S, _parse_edge(args.edge_e), _parse_edge(args.edge_f), args.r, H,
        sign=args.sign, budget=args.budget,
    )
    path = _save_witness(report.counterexample, args.witness)
    if args.json:
        _emit(dict(report.to_json(), witness_path=path))
    else:
        state = {True: 'holds', False: 'fails', None: 'unknown'}[report.holds]
        print(f'SIGNAL SENDER: {state} ({report.diagnostics})')
    return _verdict_code(report.holds)


def run_densities(args: BlowramArguments) -> int:
    H = resolve_graph(args.pattern)
    report = density_stats(H)
    if args.json:
        _emit(report.to_json())
    else:
        data = report.to_json()
        print(f'DENSITIES: d={data["d"]} m={data["m"]} m2={data["m2"]} '
              f'max_degree={data["max_degree"]}')
    return EXIT_OK


COMMANDS: dict[str, Callable[[BlowramArguments], int]] = {
    'arrow': run_arrow,
    'mult': run_mult,
    'robustness': run_robustness,
    'blowup-ramsey': run_blowup_ramsey,
    'lll': run_lll,
    'bounds': run_bounds,
    'extract': run_extract,
    'gnp': run_gnp,
    'sender': run_sender,
    'densities': run_densities,
}


def run_command(args: BlowramArguments) -> int:
    """Run one subcommand, mapping failures onto exit codes."""
    try:
        return COMMANDS[args.command](args)
    except SearchBudgetExceeded as ex:
        logger.error('%s', ex)
        return EXIT_BUDGET
    except (BlowramException, ValueError, OSError) as ex:
        logger.error('%s', ex)
        logger.debug('%s failed', args.command, exc_info=True)
        return EXIT_USAGE


def dispatch(argv: list[str]) -> int:
    """Command Line Application for blowram, returning the exit code."""
    try:
        args = parser.parse_args(argv, BlowramArguments())
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_USAGE

    if args.version:
        blowram_file = sys.modules["blowram"].__file__
        print(f'blowram: Version {blowram_version} from {blowram_file}')
        return EXIT_OK

    if args.command is None and args.benchmark is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    if any(
        (
            args.profile_modules is not None,
            args.profile_output,
            args.benchmark is not None,
        )
    ):
        if not has_line_profiler:
            logger.error('Profiling needs the optional line_profiler package')
            return EXIT_USAGE
        context = profiler_context(
            module_names=args.profile_modules or None,
            filename=args.profile_output,
        )
    else:
        context = nullcontext()

    with context:
        blowram_cli_setup(args)
        if args.benchmark is not None:
            run_benchmarks(args.benchmark)
            return EXIT_OK
        return run_command(args)


def _sigint_handler(signal, frame):
    logger.info("Caught Ctrl-C (SIGINT); exiting.")
    sys.exit(1)


def main():
    """Execute the ``blowram`` command line with command line arguments."""
    signal.signal(signal.SIGINT, _sigint_handler)
    sys.exit(dispatch(sys.argv[1:]))
