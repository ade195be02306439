"""
Module introspection used to register functions with the profiler.
"""
from __future__ import annotations

import importlib
import inspect
import logging
import pkgutil
from types import ModuleType

logger = logging.getLogger(__name__)


def is_native(obj, module: ModuleType) -> bool:
    """Whether ``obj`` was defined in ``module`` or one of its submodules."""
    try:
        return obj.__module__.startswith(module.__name__)
    except (AttributeError, TypeError):
        return False


def get_native_functions(module: ModuleType) -> set:
    """All functions and methods defined in ``module``, classes included."""
    found = set()
    seen = set()
    pending = [module]
    while pending:
        owner = pending.pop()
        for _, obj in inspect.getmembers(owner):
            try:
                if obj in seen:
                    continue
                seen.add(obj)
            except TypeError:
                continue
            if not is_native(obj, module):
                continue
            if inspect.isclass(obj):
                pending.append(obj)
            elif inspect.isfunction(obj) or inspect.ismethod(obj):
                found.add(obj)
    return found


def get_submodule_names(module_name: str) -> list[str]:
    """``module_name`` followed by every importable submodule name."""
    module = importlib.import_module(module_name)
    names = [module_name]
    path = getattr(module, '__path__', None)
    if path is None:
        return names
    for info in pkgutil.walk_packages(path, prefix=module_name + '.'):
        if info.name.endswith('__main__') or '.tests' in info.name:
            continue
        names.append(info.name)
    return names


def get_submodules(module_name: str) -> list[ModuleType]:
    """Import ``module_name`` and its submodules, skipping broken ones."""
    modules = []
    for name in get_submodule_names(module_name):
        try:
            modules.append(importlib.import_module(name))
        except ImportError:
            logger.debug('Skipping %s', name, exc_info=True)
    return modules
