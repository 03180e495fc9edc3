# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html
import sys
import os

sys.path.append(os.path.abspath('..'))

project = 'hankel-indet'
copyright = '2025, sviat'
author = 'sviat'
release = '0.1.0'

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.mathjax']

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

autodoc_member_order = 'bysource'
autodoc_typehints = 'description'
autodoc_default_options = {
    'members': True,
    'show-inheritance': True,
}
add_module_names = False

html_theme = 'nature'
html_title = 'hankel-indet'
html_static_path = ['_static']
