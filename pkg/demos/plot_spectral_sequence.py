"""
Pages of a filtered complex
===========================

The cube complex is filtered by the number of 1-smoothings |v|.  Its
differential raises |v| by exactly one, so d^0 = 0, E^1 is the whole
complex, and the sequence collapses at E^2 to the homology.
"""

import random

from oddkh_lab import get_link
from oddkh_lab.oddkh import build_complex
from oddkh_lab.specseq import brute_force_page_dims, converged, page, random_filtered_complex

fc = build_complex(get_link("figure_eight")).filtered(characteristic=0)
for r in range(4):
    p = page(fc, r)
    print("E^%d total %2d  by level %s" % (r, p.total_dim(), p.dims_by_level()))

###############################################################################
# A random filtered complex has longer-range differentials.  Each page is
# checked against a dense subquotient computation and against the homology
# of the previous page.

rng = random.Random(1)
fc = random_filtered_complex(rng, characteristic=5, max_dim=10, max_levels=4)
prev = None
for r in range(5):
    p = page(fc, r)
    oracle = brute_force_page_dims(fc, r)
    recursion = prev.homology_dims() if prev is not None else p.dims
    print("E^%d %s  oracle agrees: %s  recursion agrees: %s" % (r, p.dims, p.dims == oracle, p.dims == recursion))
    prev = p
print("E^inf by degree:", converged(fc).dims_by_degree(), " H:", fc.homology_dims())
