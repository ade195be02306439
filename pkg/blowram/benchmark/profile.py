"""
Line-by-line profiling of blowram searches with line_profiler.

The searches spend nearly all their time in a handful of inner loops, so the
default scope is the computational modules rather than the whole package, and
every report opens with the functions ranked by total time.
"""
from __future__ import annotations

import io
import logging
import sys
import warnings
from contextlib import contextmanager
from typing import Iterator, Optional, Sequence, TextIO

from .utils import get_native_functions, get_submodules

logger = logging.getLogger(__name__)

try:
    from line_profiler import LineProfiler
    has_line_profiler = True
except ImportError:
    LineProfiler = None
    has_line_profiler = False
    logger.debug('line_profiler is not installed; profiling is unavailable')

DEFAULT_MODULES = (
    'blowram.graph',
    'blowram.colouring',
    'blowram.bounds',
    'blowram.extract',
    'blowram.lab',
)
# Report times in milliseconds
OUTPUT_UNIT = 1e-3
SUMMARY_SIZE = 10


class SearchProfiler:
    """
    A line profiler bound to the functions of some blowram modules.

    Parameters
    ----------
    module_names : sequence of str, optional
        Packages or modules whose functions and methods are timed. Defaults
        to :data:`DEFAULT_MODULES`.
    """

    def __init__(self, module_names: Optional[Sequence[str]] = None):
        if not has_line_profiler:
            raise ImportError(
                'Profiling needs the optional line_profiler package'
            )
        self.module_names = tuple(module_names or DEFAULT_MODULES)
        self.line_profiler = LineProfiler()
        functions = set()
        for module_name in self.module_names:
            for module in get_submodules(module_name):
                functions.update(get_native_functions(module))
        # line_profiler warns about functions it cannot instrument
        with warnings.catch_warnings():
            warnings.simplefilter('ignore')
            for function in functions:
                self.line_profiler.add_function(function)
        self.function_count = len(functions)
        logger.debug('Profiling %d functions from %s', self.function_count,
                     ', '.join(self.module_names))

    @contextmanager
    def running(self) -> Iterator[SearchProfiler]:
        self.line_profiler.enable_by_count()
        try:
            yield self
        finally:
            self.line_profiler.disable_by_count()

    def ranked(self) -> list[tuple[str, float]]:
        """``(function, seconds)`` pairs, slowest first, zero-time ones dropped."""
        stats = self.line_profiler.get_stats()
        totals = []
        for (filename, lineno, name), lines in stats.timings.items():
            seconds = sum(time for _, _, time in lines) * stats.unit
            if seconds > 0:
                totals.append((f'{name} ({filename}:{lineno})', seconds))
        return sorted(totals, key=lambda item: item[1], reverse=True)

    def report(self, stream: Optional[TextIO] = None) -> None:
        """Write the ranked summary followed by the per-line tables."""
        stream = stream if stream is not None else sys.stdout
        ranked = self.ranked()
        stream.write(f'Slowest of {len(ranked)} timed functions:\n')
        for name, seconds in ranked[:SUMMARY_SIZE]:
            stream.write(f'  {seconds / OUTPUT_UNIT:12.3f} ms  {name}\n')
        stream.write('\n')
        self.line_profiler.print_stats(stream, output_unit=OUTPUT_UNIT,
                                       stripzeros=True)

    def report_text(self) -> str:
        buffer = io.StringIO()
        self.report(buffer)
        return buffer.getvalue()


@contextmanager
def profiler_context(
    module_names: Optional[Sequence[str]] = None,
    filename: Optional[str] = None,
) -> Iterator[SearchProfiler]:
    """
    Profile the enclosed block, then report to ``filename`` or stdout.

    The report is written even when the block raises.
    """
    profiler = SearchProfiler(module_names)
    try:
        with profiler.running():
            yield profiler
    finally:
        if filename is None:
            profiler.report()
        else:
            with open(filename, 'w') as fd:
                profiler.report(fd)
            logger.info('Wrote profile of %s to %s',
                        ', '.join(profiler.module_names), filename)
