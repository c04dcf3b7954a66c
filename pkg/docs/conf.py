# Sphinx configuration for the foodgap API pages.

project = 'foodgap'
author = 'foodgap developers'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
]

language = 'en'
exclude_patterns = ['_build']

html_theme = 'sphinxdoc'
