"""Reduced odd Khovanov homology and classical link invariants.

Submodules
----------
diagram      PD codes, orientations, resolutions and checkerboard colorings
linalg       sparse integer matrices, Smith normal form, chain complex homology
goeritz      Goeritz matrix, signature, determinant, branched cover H1, Jones
oddkh        the odd Khovanov cube complex and its homology
specseq      spectral sequences of filtered complexes; triangle lemma checker
orientcalc   composition calculus for homology orientations
cli          the ``oddkh-lab`` command
"""

__version__ = "0.1.0"

from .corpus import get_link, link_names
from .diagram import PlanarDiagram, parse_pd
from .goeritz import branched_h1, determinant, jones, signature_nullity
from .oddkh import build_complex, reduced_odd_khovanov

__all__ = [
    "__version__",
    "PlanarDiagram",
    "branched_h1",
    "build_complex",
    "determinant",
    "get_link",
    "jones",
    "link_names",
    "parse_pd",
    "reduced_odd_khovanov",
    "signature_nullity",
]
