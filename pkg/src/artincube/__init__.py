"""Cube complexes for Artin groups.

Submodules:

* ``coxeter``: matrices, local obstructions, the classification verdict.
* ``words``: positive-monoid word problem and group-word presentations.
* ``cubes``: cube complexes, vertex links and the link condition.
* ``median``: hyperplanes, medians and cubulation of median algebras.
* ``minset``: lattice isometries, translation lengths and skewering.
* ``constructions``: explicit cubulations and fundamental-group checks.
"""
from .coxeter import CoxeterMatrix, classify, parse_coxeter
from .constructions import build, verify_pi1_is_artin
from .cubes import is_locally_cat0

__version__ = "0.1.0"

__all__ = ["CoxeterMatrix", "classify", "parse_coxeter", "build", "verify_pi1_is_artin",
           "is_locally_cat0", "__version__"]
