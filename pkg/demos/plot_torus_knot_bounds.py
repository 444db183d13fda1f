"""
Rank bounds from torus knots
============================

For T(3,5) the branched double cover is the Poincare sphere, whose framed
instanton homology has rank 1 in grading 0, so the reduced odd Khovanov
homology must have rank at least 1 in delta# grading 0.  For T(3,7) the
cover is the Brieskorn sphere Sigma(2,3,7), giving a bound of (1,0,1,1).

Pass ``--skip-t37`` to leave out the 14-crossing knot (about 20 s).
"""

import sys
import time

from oddkh_lab import get_link
from oddkh_lab.oddkh import reduced_odd_khovanov

names = ["T(3,4)", "T(3,5)"]
if "--skip-t37" not in sys.argv:
    names += ["T(3,7)", "T(3,7)_mirror"]

for name in names:
    start = time.perf_counter()
    table = reduced_odd_khovanov(get_link(name))
    print("%-14s rank %2d  torsion %-5s delta# ranks %s  (%.1f s)" % (
        name, table.total_rank(), table.has_torsion(), table.delta_sharp_ranks(),
        time.perf_counter() - start))

###############################################################################
# Chirality matters for the T(3,7) bound: mirroring a knot sends delta# to
# -delta#, swapping the ranks in gradings 1 and 3.  The bound (1,0,1,1)
# holds pointwise for the mirror, (1,0,2,2), but not for the positive knot,
# (1,2,2,0).
