import json

import pytest

from blowram import colouring
from blowram.benchmark.profile import has_line_profiler
from blowram.cli import (EXIT_BUDGET, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE,
                         dispatch, resolve_graph)
from blowram.colouring import EdgeColouring, count_monochromatic_copies
from blowram.graph import Graph, blowup
from blowram.lab import random_colouring


def run(capsys, *argv):
    code = dispatch(list(argv))
    return code, capsys.readouterr().out


def test_version(capsys):
    code, out = run(capsys, '--version')
    assert code == EXIT_OK
    assert out.startswith('blowram: Version ')


def test_no_command(capsys):
    assert dispatch([]) == EXIT_USAGE


def test_unknown_command(capsys):
    assert dispatch(['frobnicate']) == EXIT_USAGE


def test_help(capsys):
    code, out = run(capsys, '--help')
    assert code == EXIT_OK
    assert 'blowup-ramsey' in out


def test_resolve_graph(square_path):
    assert resolve_graph('K6') == Graph.complete(6)
    assert resolve_graph(str(square_path)) == Graph.cycle(4)


def test_path_starting_with_digit(capsys):
    assert dispatch(['arrow', '--graph', '5cycle.txt', '--pattern', 'k3']) == EXIT_USAGE


def test_missing_graph_file(capsys, tmp_path):
    missing = str(tmp_path / 'missing.txt')
    assert dispatch(['densities', '--pattern', missing]) == EXIT_USAGE


def test_arrow_yes(capsys):
    code, out = run(capsys, 'arrow', '--graph', 'k6', '--pattern', 'k3', '-r', '2')
    assert code == EXIT_OK
    assert out.strip() == 'ARROWS: yes'


def test_arrow_no_writes_witness(capsys, tmp_path, k3):
    path = tmp_path / 'k5.col'
    code, out = run(capsys, 'arrow', '--graph', 'k5', '--pattern', 'k3',
                    '--witness', str(path))
    assert code == EXIT_NEGATIVE
    assert out.strip() == 'ARROWS: no'
    witness = EdgeColouring.load(path)
    assert witness.host.same_structure(Graph.complete(5))
    assert count_monochromatic_copies(witness, k3) == 0


def test_arrow_budget(capsys):
    code, out = run(capsys, 'arrow', '--graph', 'k6', '--pattern', 'k3',
                    '--budget', '5')
    assert code == EXIT_BUDGET
    assert out.strip() == 'ARROWS: unknown'


def test_arrow_json(capsys):
    code, out = run(capsys, 'arrow', '--graph', 'k6', '--pattern', 'k3', '--json')
    assert code == EXIT_OK
    assert json.loads(out)['verdict'] is True


def test_mult(capsys):
    code, out = run(capsys, 'mult', '--graph', 'k6', '--pattern', 'k3')
    assert code == EXIT_OK
    assert out.strip() == 'MULTIPLICITY: 2'


def test_mult_budget(capsys):
    code, out = run(capsys, 'mult', '--graph', 'k6', '--pattern', 'k3',
                    '--budget', '5')
    assert code == EXIT_BUDGET
    assert 'budget exhausted' in out


def test_robustness(capsys):
    code, out = run(capsys, 'robustness', '--graph', 'k6', '--pattern', 'k3')
    assert code == EXIT_OK
    assert out.strip() == 'ROBUSTNESS: 1/10'


def test_robustness_budget(capsys):
    code, out = run(capsys, 'robustness', '--graph', 'k6', '--pattern', 'k3',
                    '--budget', '5')
    assert code == EXIT_BUDGET
    assert out.startswith('ROBUSTNESS: unknown')


def test_robustness_undefined(capsys):
    assert dispatch(['robustness', '--graph', 'c6', '--pattern', 'k3']) == EXIT_USAGE


def test_robustness_witness_reuses_search(capsys, tmp_path, monkeypatch, k3):
    calls = []
    search = colouring.multiplicity

    def counted(*args, **kwargs):
        calls.append(args)
        return search(*args, **kwargs)

    monkeypatch.setattr(colouring, 'multiplicity', counted)
    path = tmp_path / 'k6.col'
    code, out = run(capsys, 'robustness', '--graph', 'k6', '--pattern', 'k3',
                    '--witness', str(path))
    assert code == EXIT_OK
    assert len(calls) == 1
    assert count_monochromatic_copies(EdgeColouring.load(path), k3) == 2


def test_blowup_ramsey(capsys):
    code, out = run(capsys, 'blowup-ramsey', '--graph', 'k2', '--pattern', 'k2',
                    '-t', '2', '--n-cap', '6')
    assert code == EXIT_OK
    assert out.strip() == 'BLOWUP RAMSEY NUMBER: 5'


def test_blowup_ramsey_infinite(capsys):
    code, out = run(capsys, 'blowup-ramsey', '--graph', 'k5', '--pattern', 'k3',
                    '-t', '1', '--n-cap', '2')
    assert code == EXIT_NEGATIVE
    assert out.strip() == 'BLOWUP RAMSEY NUMBER: infinite'


def test_blowup_ramsey_above_cap(capsys):
    code, out = run(capsys, 'blowup-ramsey', '--graph', 'k2', '--pattern', 'k2',
                    '-t', '2', '--n-cap', '3')
    assert code == EXIT_NEGATIVE
    assert out.strip() == 'BLOWUP RAMSEY NUMBER: > 3'


def test_lll_condition_fails(capsys):
    code, out = run(capsys, 'lll', '--graph', 'k2', '--pattern', 'k2', '-t', '2',
                    '-n', '4')
    assert code == EXIT_NEGATIVE
    assert out.startswith('LLL CONDITION: fails')


def test_lll_max_n(capsys):
    code, out = run(capsys, 'lll', '--graph', 'k2', '--pattern', 'k2',
                    '--t-vec', '16,16')
    assert code == EXIT_OK
    assert int(out.split(':')[1]) > 16


def test_lll_max_n_json_never_holds(capsys):
    code, out = run(capsys, 'lll', '--graph', 'k2', '--pattern', 'k2', '-t', '2',
                    '--json')
    assert code == EXIT_NEGATIVE
    assert json.loads(out)['n'] == '0'


def test_lll_requires_part_sizes(capsys):
    assert dispatch(['lll', '--graph', 'k2', '--pattern', 'k2']) == EXIT_USAGE


def test_bounds_json(capsys):
    code, out = run(capsys, 'bounds', '--graph', 'k6', '--pattern', 'k3',
                    '-r', '2', '--json')
    assert code == EXIT_OK
    data = json.loads(out)
    assert data['ln_c'] == '32768000'
    assert data['robustness'] == '1/10'
    assert data['burr_rosta'] == '1/4'
    assert '"ln_c": "32768000"' in out


def test_bounds_text_with_lower_bounds(capsys):
    code, out = run(capsys, 'bounds', '--graph', 'k2', '--pattern', 'k2',
                    '-t', '10', '--ln-k', '32')
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[:3] == ['LN C: 64', 'LN C0: 32', 'ROBUSTNESS USED: 1']
    assert lines[3].startswith('LOWER BOUND: 1.66e2')
    assert 'per-t exponent 32.69' in lines[4]


def test_bounds_undefined(capsys):
    code, out = run(capsys, 'bounds', '--graph', 'k5', '--pattern', 'k3')
    assert code == EXIT_NEGATIVE
    assert out.startswith('BOUNDS: undefined')


def test_bounds_ln_k_needs_t(capsys):
    assert dispatch(['bounds', '--graph', 'k2', '--pattern', 'k2',
                     '--ln-k', '3']) == EXIT_USAGE


def test_extract_random_colouring(capsys):
    code, out = run(capsys, 'extract', '--graph', 'k3', '--pattern', 'k3',
                    '-n', '4', '--seed', '1')
    assert code == EXIT_OK
    assert out.startswith('EXTRACTED: colour ')


def test_extract_from_colouring_file(capsys, tmp_path):
    path = tmp_path / 'uniform.col'
    EdgeColouring.uniform(blowup(Graph.complete(2), 4).graph, 2).save(path)
    code, out = run(capsys, 'extract', '--graph', 'k2', '--pattern', 'k2',
                    '--colouring', str(path), '-t', '2', '--json')
    assert code == EXIT_OK
    data = json.loads(out)
    assert data['colour'] == 1
    assert data['sizes'] == [2, 4]


def test_extract_writes_found_blowup(capsys, tmp_path, k3):
    witness = tmp_path / 'found.col'
    searched = tmp_path / 'searched.col'
    code, out = run(capsys, 'extract', '--graph', 'k3', '--pattern', 'k3',
                    '-n', '4', '--seed', '1', '--json',
                    '--witness', str(witness), '--save-colouring', str(searched))
    assert code == EXIT_OK
    data = json.loads(out)
    assert data['witness_path'] == str(witness)
    host = blowup(k3, 4)
    assert EdgeColouring.load(searched) == random_colouring(host.graph, 2, 1)
    found = EdgeColouring.load(witness)
    assert found.host.same_structure(blowup(k3, data['sizes']).graph)
    assert set(found.colours) == {data['colour']}


def test_extract_needs_seed(capsys):
    assert dispatch(['extract', '--graph', 'k3', '--pattern', 'k3',
                     '-n', '3']) == EXIT_USAGE


def test_gnp_csv(capsys):
    code, out = run(capsys, 'gnp', '--pattern', 'k3', '-n', '6',
                    '--p-grid', '0.0,1.0', '--samples', '3', '--seed', '1')
    assert code == EXIT_OK
    assert out.splitlines() == [
        'p,arrow_freq,undecided_frac,samples,seed',
        '0,0,0,3,1',
        '1,1,0,3,1',
    ]


def test_gnp_undecided(capsys):
    code, _ = run(capsys, 'gnp', '--pattern', 'k3', '-n', '6', '--p-grid', '1',
                  '--samples', '2', '--seed', '0', '--budget', '5')
    assert code == EXIT_BUDGET


def test_sender(capsys):
    code, out = run(capsys, 'sender', '--graph', 'p3', '--pattern', 'p3',
                    '--edge-e', '0,1', '--edge-f', '1,2', '--sign', 'negative')
    assert code == EXIT_OK
    assert out.startswith('SIGNAL SENDER: holds')


def test_sender_bad_edge(capsys):
    assert dispatch(['sender', '--graph', 'p3', '--pattern', 'p3',
                     '--edge-e', '0,1,2', '--edge-f', '1,2']) == EXIT_USAGE


def test_densities(capsys, square_path):
    code, out = run(capsys, 'densities', '--pattern', 'k4')
    assert code == EXIT_OK
    assert out.strip() == 'DENSITIES: d=3 m=3/2 m2=5/2 max_degree=3'
    code, out = run(capsys, 'densities', '--pattern', str(square_path), '--json')
    assert json.loads(out) == {'d': '2', 'm': '1', 'm2': '3/2', 'max_degree': 2}


@pytest.mark.skipif(not has_line_profiler, reason='line_profiler is not installed')
def test_benchmark_under_profiler(capsys, tmp_path):
    output = tmp_path / 'profile.txt'
    code = dispatch(['--benchmark', 'lll_k2_t30', '--profile-modules',
                     'blowram.bounds', '--profile-output', str(output)])
    assert code == EXIT_OK
    assert output.exists()


@pytest.mark.skipif(has_line_profiler, reason='line_profiler is installed')
def test_profiler_missing(capsys):
    assert dispatch(['--benchmark', 'lll_k2_t30']) == EXIT_USAGE
