"""
The trefoil, step by step
=========================

From a PD code to reduced odd Khovanov homology and its mod 4 grading.
Everything here runs in well under a second.
"""

import itertools

from oddkh_lab import get_link, jones, signature_nullity, determinant, branched_h1
from oddkh_lab.diagram import crossing_signs, resolve
from oddkh_lab.oddkh import build_complex, reduced_odd_khovanov, graded_euler, vertex_space

# The corpus stores the right-handed trefoil as X[1,5,2,4] X[3,1,4,6] X[5,3,6,2].
d = get_link("trefoil")
print(d)
print("crossing signs (n+, n-):", crossing_signs(d))

###############################################################################
# The cube of resolutions
# -----------------------
# Each vertex v of {0,1}^3 smooths every crossing one way or the other.
# The arc space V_v has rank #circles - 1, and the vertex contributes the
# exterior algebra on it, of dimension 2^k.

total = 0
for v in itertools.product((0, 1), repeat=d.m):
    r = resolve(d, v)
    k = vertex_space(r).k
    total += 2 ** k
    print(v, "circles:", r.n_circles, "arcs:", [(a.start, a.end) for a in r.arcs], "k =", k)
print("total rank of the cube complex:", total)

###############################################################################
# Signs and homology
# ------------------
# The edge assignment makes the signed differential square to zero.  The
# homology splits by quantum grading q.

cx = build_complex(d)
print("faces:", cx.assignment.stats)
table = reduced_odd_khovanov(d)
for t, q, free, tors in table.rows():
    print("t=%d q=%d  rank %d  torsion %s  delta# %d" % (t, q, free, tors, table.delta_sharp_of(t, q)))

###############################################################################
# Cross-checks
# ------------
# The graded Euler characteristic is the Jones polynomial, and the total
# rank equals det = |H_1| of the branched double cover.

print("Euler characteristic:", graded_euler(table))
print("Jones polynomial:    ", jones(d))
print("sigma, nu:", signature_nullity(d), " det:", determinant(d), " H_1:", branched_h1(d))
print("delta# ranks (j = 0..3):", table.delta_sharp_ranks())
