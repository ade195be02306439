from fractions import Fraction

import pytest

from ..utils import (BlowramException, GraphError, GraphParseError,
                     format_fraction, iter_bits, mask_of, normalize_choice,
                     parse_int_list, popcount, run_tasks)


def test_bit_helpers():
    mask = mask_of([0, 3, 5])
    assert mask == 0b101001
    assert popcount(mask) == 3
    assert list(iter_bits(mask)) == [0, 3, 5]
    assert list(iter_bits(0)) == []


@pytest.mark.parametrize('value, text', [
    (Fraction(1, 10), '1/10'),
    (Fraction(64), '64'),
    (3, '3'),
])
def test_format_fraction(value, text):
    assert format_fraction(value) == text


def test_parse_int_list():
    assert parse_int_list('2, 2,3') == [2, 2, 3]
    assert parse_int_list('7,') == [7]
    for bad in ('', 'a,b', '1.5'):
        with pytest.raises(ValueError):
            parse_int_list(bad)


@pytest.mark.parametrize('value, expected', [
    ('blowup', 'blowup'),
    ('ORIG', 'original'),
    ('first_moment', 'first-moment'),
    ('f', 'first-moment'),
])
def test_normalize_choice(value, expected):
    choices = ('blowup', 'original', 'lll', 'first-moment')
    assert normalize_choice(value, choices, 'option') == expected


@pytest.mark.parametrize('value', ['', 'x', 'l'])
def test_normalize_choice_rejects(value):
    with pytest.raises(ValueError) as info:
        normalize_choice(value, ('lll', 'lower'), 'method')
    assert 'method' in str(info.value)


@pytest.mark.parametrize('threads', [1, 4])
def test_run_tasks_keeps_order(threads):
    assert run_tasks(lambda x: x * x, list(range(20)), threads) == [
        x * x for x in range(20)
    ]


def test_run_tasks_reraises():
    def task(x):
        if x == 3:
            raise KeyError(x)
        return x

    with pytest.raises(KeyError):
        run_tasks(task, list(range(6)), threads=3)


def test_exception_hierarchy():
    error = GraphParseError('bad count', line=4)
    assert isinstance(error, GraphError)
    assert isinstance(error, BlowramException)
    assert isinstance(error, ValueError)
    assert error.line == 4
    assert str(error) == 'line 4: bad count'
    assert GraphParseError('empty').line is None
