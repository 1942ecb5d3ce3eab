# -*- coding: utf-8 -*-
#
# nti.alphapotential documentation build configuration file.

import os
import sys
import pkg_resources

sys.path.append(os.path.abspath('../src'))
rqmt = pkg_resources.require('nti.alphapotential')[0]

# Figures in doctests never need a display.
os.environ.setdefault('MPLBACKEND', 'Agg')

needs_sphinx = "1.8"

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.intersphinx',
    'sphinx.ext.todo',
    'sphinx.ext.extlinks',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'repoze.sphinx.autointerface',
]

source_suffix = '.rst'
master_doc = 'index'

project = u'nti.alphapotential'
copyright = u'2025, nti.alphapotential contributors'
author = u'nti.alphapotential contributors'

version = '%s.%s' % tuple(map(int, rqmt.version.split('.')[:2]))
release = rqmt.version

exclude_patterns = ['_build']

default_role = 'obj'
add_module_names = False
pygments_style = 'perldoc'
modindex_common_prefix = ['nti.alphapotential.']
todo_include_todos = True

import sphinx_rtd_theme
html_theme = 'sphinx_rtd_theme'
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]
htmlhelp_basename = 'nti.alphapotentialdoc'

intersphinx_mapping = {
    'python': ('https://docs.python.org/3/', None),
    'transaction': ('https://transaction.readthedocs.io/en/latest/', None),
    'perfmetrics': ('https://perfmetrics.readthedocs.io/en/latest/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'networkx': ('https://networkx.org/documentation/stable/', None),
}

extlinks = {
    'issue': ('https://github.com/NextThought/nti.alphapotential/issues/%s', 'issue #%s'),
    'pr': ('https://github.com/NextThought/nti.alphapotential/pull/%s', 'pull request #%s'),
}

autodoc_default_options = {
    'members': None,
    'show-inheritance': None,
}
autodoc_member_order = 'bysource'
autoclass_content = 'both'
