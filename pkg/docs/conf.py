from shilov_eq._version import __version__

# Configuration file for the Sphinx documentation builder.
#
# For the full list of built-in configuration values, see the documentation:
# https://www.sphinx-doc.org/en/master/usage/configuration.html

# -- Project information -----------------------------------------------------

project = "shilov-eq"
copyright = "2026, the shilov-eq authors"
author = "the shilov-eq authors"
release = __version__

# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc"]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]

autodoc_typehints = "both"
autodoc_typehints_format = "short"
autodoc_type_aliases = (
    {x: f"shilov_eq.hahn.{x}" for x in ["Rat", "Log_Val", "Term"]}
    | {x: f"shilov_eq.polys.{x}" for x in ["Exp_Vec", "Sparse_Entries"]}
    | {x: f"shilov_eq.geometry.{x}" for x in ["Affine", "Vertex", "Cell"]}
    | {"Direction": "shilov_eq.metrics.Direction"}
    | {"Entries": "shilov_eq.linalg.Entries"}
    | {"Method": "shilov_eq.equidistribution.Method"}
    | {x: f"shilov_eq.solver.{x}" for x in ["Shifts", "Weights"]}
    | {"Config_Format": "shilov_eq.config.Config_Format"}
    | {"Check": "shilov_eq.properties.Check"}
)
