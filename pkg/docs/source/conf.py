# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#project-information

import os
import sys

# Make the package importable from the repository root
sys.path.insert(0, os.path.abspath("../../"))

project = "Chain Equilibrium"
copyright = "2024, Chain Equilibrium developers"
author = "Chain Equilibrium developers"
release = "0.1.0"

# -- General configuration ---------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#general-configuration

extensions = [
    "sphinx.ext.autodoc",  # API pages from docstrings
    "sphinx.ext.napoleon",  # NumPy-style docstrings
    "sphinx.ext.viewcode",  # Links to the source
    "sphinx_autodoc_typehints",  # Type hints in signatures
]

templates_path = ["_templates"]
exclude_patterns = []


# -- Options for HTML output -------------------------------------------------
# https://www.sphinx-doc.org/en/master/usage/configuration.html#options-for-html-output

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
