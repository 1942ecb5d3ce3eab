# -*- coding: utf-8 -*-
# This is a namespace package shared by several distributions.
__path__ = __import__('pkgutil').extend_path(__path__, __name__)
