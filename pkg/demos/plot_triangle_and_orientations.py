"""
Exact triangles and homology orientations
=========================================

Two pieces of algebra that sit next to the knot computations: the checker
for the triangle detection lemma, and the sign rule for composing
homology orientations.
"""

import random

from oddkh_lab.fieldmat import Field
from oddkh_lab.orientcalc import (
    check_associativity,
    compose,
    identity_triple,
    random_gluing,
    random_triple,
)
from oddkh_lab.specseq import cone_triangle, corrupt_triangle, random_cone_triangle, verify_triangle

# The mapping cone of the identity on a one-dimensional complex.
f = Field(0)
ti = cone_triangle(f, [[f(0)]], [0], [[f(0)]], [0], [[f(1)]])
print("cone of identity:", verify_triangle(ti))

# A random cone triangle over F_2, then the same data with one homotopy entry changed.
rng = random.Random(4)
ti = random_cone_triangle(rng, characteristic=2)
while not (ti.dim(0) and ti.dim(1)):
    ti = random_cone_triangle(rng, characteristic=2)
print("random cone ok:", verify_triangle(ti).ok)
print("corrupted:", verify_triangle(corrupt_triangle(ti, rng)).failures)

###############################################################################
# Orientation calculus
# --------------------
# A triple (A, B, C, mu) records dimensions and a sign.  Gluing along a map
# A2 -> B1 + B2 produces a new triple; the identity triples act as units
# and gluing is associative.

for a in range(4):
    print("identity of dimension", a, "has sign", identity_triple(a).sign)

t1, t2, t3 = (random_triple(rng) for _ in range(3))
f12 = random_gluing(rng, t1.b, t2.b, t2.a)
f23 = random_gluing(rng, t2.b, t3.b, t3.a)
print("t2 o t1 =", compose(t1, t2, f12).triple)
report = check_associativity(t1, t2, t3, f12, f23)
print("left:", report.left, " right:", report.right, " transported sign:", report.transported_sign)
