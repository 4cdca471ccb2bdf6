#
# cogsense documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import os
import sys

# Make the package importable for autodoc.
sys.path.insert(0, os.path.abspath(".."))

extensions = []

templates_path = ["_templates"]

source_suffix = ".rst"

master_doc = "toc"

project = "cogsense"
copyright = "The cogsense developers"

version = "0.1"
release = "0.1.0"

exclude_trees = ["_build"]

pygments_style = "sphinx"

htmlhelp_basename = "Cogsensedoc"

latex_documents = [
    ("index", "cogsense.tex", "cogsense Documentation", "The cogsense developers", "manual")
]
