"""Lazily resolved package version, backed by setuptools_scm."""
from __future__ import annotations

import logging
from collections import UserString
from importlib import metadata
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

UNKNOWN_VERSION = '0.0.unknown'


def _version_from_checkout() -> Optional[str]:
    root = Path(__file__).resolve().parent.parent
    if not any((root / name).exists() for name in ('.git', '.git_archival.txt')):
        return None
    try:
        from setuptools_scm import get_version
        return get_version(root='..', relative_to=__file__)
    except (ImportError, LookupError):
        logger.debug('setuptools_scm could not read %s', root, exc_info=True)
        return None


def _version_from_build() -> Optional[str]:
    try:
        from ._version import version
    except ImportError:
        return None
    return version


def _version_from_metadata() -> Optional[str]:
    try:
        return metadata.version('blowram')
    except metadata.PackageNotFoundError:
        return None


class VersionProxy(UserString):
    """
    A string that looks up the blowram version the first time it is read.

    Sources are tried in order: a git checkout or archive through
    setuptools_scm, the ``_version.py`` written at build time, then the
    installed distribution metadata.
    """

    def __init__(self):
        self._version: Optional[str] = None

    @property
    def data(self) -> str:
        if self._version is None:
            for source in (_version_from_checkout, _version_from_build,
                           _version_from_metadata):
                self._version = source()
                if self._version:
                    break
            else:
                self._version = UNKNOWN_VERSION
        return self._version


__version__ = version = VersionProxy()
