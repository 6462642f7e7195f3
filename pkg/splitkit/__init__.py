"""
splitkit - forking independence in free groups via graphs of groups

Decides the envelope-intersection criterion for tuples over a parameter set
on a given normalized decomposition, builds chain certificates and
automorphism witnesses, and renders decompositions as DOT.
"""

__version__ = "0.1.0"
__author__ = "splitkit contributors"
__description__ = "Graph-of-groups toolkit for independence over a free factor"
