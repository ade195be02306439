"""
Utility functions and shared configuration for blowram
"""
from __future__ import annotations

import concurrent.futures
import logging
import os
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

DEBUG_MODE = bool(os.environ.get('BLOWRAM_DEBUG', False))

# Search settings:
# BLOWRAM_BUDGET (int): default node budget of exhaustive searches, 0 means
# unlimited
DEFAULT_BUDGET = int(os.environ.get('BLOWRAM_BUDGET', '0')) or None

# BLOWRAM_THREADS (int): worker count used by the command line, 0 means
# machine parallelism
DEFAULT_THREADS = (
    int(os.environ.get('BLOWRAM_THREADS', '0')) or os.cpu_count() or 1
)

# BLOWRAM_BACKEND (str): the arrowing backend used when none is requested
DEFAULT_BACKEND = os.environ.get('BLOWRAM_BACKEND', 'backtrack').strip()

# Extraction settings:
# BLOWRAM_TALLY_BUDGET (int): subsets tallied by the exact biclique search
# before switching to the greedy fallback
TALLY_BUDGET = int(os.environ.get('BLOWRAM_TALLY_BUDGET', '2000000'))

# Bound settings:
# BLOWRAM_EXACTNESS_MARGIN (float): log-space distance from the LLL boundary
# below which the verdict is recomputed with exact rationals
EXACTNESS_MARGIN = float(os.environ.get('BLOWRAM_EXACTNESS_MARGIN', '0.01'))


class BlowramException(Exception):
    ...


class GraphError(BlowramException, ValueError):
    """A graph or blowup was constructed from inconsistent data."""


class GraphParseError(GraphError):
    """
    Text could not be parsed as a graph or colouring.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        The 1-based line number of the offending line.
    """

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class PatternMismatchError(BlowramException, ValueError):
    """A blowup host was paired with a pattern other than its base."""


class UndefinedQuantityError(BlowramException, ValueError):
    """The requested quantity does not exist for these inputs."""


class SearchBudgetExceeded(BlowramException):
    """
    A search ran out of nodes before it could give an exact answer.

    The partial result is available as ``outcome``.
    """

    def __init__(self, message: str, outcome):
        super().__init__(message)
        self.outcome = outcome


class NoMonochromaticCopyError(BlowramException):
    """No colour class holds a single canonical copy of the pattern."""

    def __init__(self, message: str, max_count: int = 0):
        super().__init__(message)
        self.max_count = max_count


class ExtractionError(BlowramException):
    """An extracted blowup failed its validity check."""


def popcount(mask: int) -> int:
    """Number of set bits of ``mask``."""
    return mask.bit_count()


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask with the given indices set."""
    mask = 0
    for index in indices:
        mask |= 1 << index
    return mask


def format_fraction(value: Fraction) -> str:
    """Render an exact rational the way reports store it: ``p`` or ``p/q``."""
    return str(Fraction(value))


def parse_int_list(text: str) -> list[int]:
    """
    Parse a comma-separated list of integers such as ``2,2,3``.

    Raises
    ------
    ValueError
        If any element is not an integer.
    """
    items = [item.strip() for item in text.split(',') if item.strip()]
    if not items:
        raise ValueError(f'Expected a comma-separated list of integers, got {text!r}')
    try:
        return [int(item) for item in items]
    except ValueError as ex:
        raise ValueError(
            f'Expected a comma-separated list of integers, got {text!r}'
        ) from ex


def normalize_choice(value: str, choices: Sequence[str], what: str) -> str:
    """
    Normalize a string option, accepting any unique prefix of a choice.

    Raises
    ------
    ValueError
        If ``value`` matches none or several of ``choices``.
    """
    value = str(value).strip().lower().replace('_', '-')
    if value in choices:
        return value
    matches = [choice for choice in choices if choice.startswith(value)]
    if value and len(matches) == 1:
        return matches[0]
    allowed = ', '.join(repr(choice) for choice in choices)
    raise ValueError(
        f'{value!r} is not a valid {what}. The allowed values are {allowed}.'
    )


def run_tasks(
    func: Callable[[T], R],
    items: Sequence[T],
    threads: int = 1,
) -> list[R]:
    """
    Map ``func`` over ``items``, optionally on a thread pool.

    Results are returned in input order regardless of completion order.
    Exceptions raised by a task are logged and re-raised.

    Parameters
    ----------
    func : callable
        Called once per item.
    items : sequence
        The work units.
    threads : int, optional
        Worker count; 1 (the default) runs inline.
    """
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(func, item) for item in items]
        results = []
        for index, future in enumerate(futures):
            try:
                results.append(future.result())
            except Exception:
                logger.error('Worker task %d of %d failed', index, len(items))
                logger.debug('Worker task %d failed', index, exc_info=True)
                for pending in futures:
                    pending.cancel()
                raise
        return results
