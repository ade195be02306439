#!/usr/bin/env python3
#
# blowram documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.
import os
import sys
from datetime import datetime

import sphinx_rtd_theme  # NOQA

module_path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "../../")
sys.path.insert(0, module_path)


# -- General configuration ------------------------------------------------

extensions = [
    "sphinxcontrib.jquery",
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.autosummary",
    "sphinx.ext.mathjax",
    "docs_versions_menu",
    "sphinx.ext.githubpages",
]

templates_path = ["_templates"]

autosummary_generate = True
source_suffix = ".rst"

# The master toctree document.
master_doc = "index"

# General information about the project.
project = "blowram"
copyright = f"{datetime.now().year}, SLAC National Accelerator Laboratory"
author = "SLAC National Accelerator Laboratory"

import blowram  # NOQA

version = str(blowram.__version__)
# The full version, including alpha/beta/rc tags.
release = str(blowram.__version__)

language = "en"
exclude_patterns = []
pygments_style = "sphinx"
todo_include_todos = False


# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = []
htmlhelp_basename = "blowramdoc"


# -- Options for manual page output ---------------------------------------

man_pages = [(master_doc, "blowram", "blowram Documentation", [author], 1)]


intersphinx_mapping = {
    "networkx": ("https://networkx.org/documentation/stable/", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "python": ("https://docs.python.org/3", None),
}
