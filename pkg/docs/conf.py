# -*- coding: utf-8 -*-
#
# specforge documentation build configuration file.
#
# Only the values that differ from the Sphinx defaults are set here.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'specforge'
copyright = u'2026, specforge'
author = u'specforge'

# The short X.Y version.
version = u'0.1.0'
# The full version, including alpha/beta/rc tags.
release = u'0.1.0'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'


# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_static_path = []
htmlhelp_basename = 'specforgedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (master_doc, 'specforge.tex', u'specforge Documentation',
     u'specforge', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'specforge', u'specforge Documentation',
     [author], 1)
]
