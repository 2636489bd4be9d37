"""
The triangle class cancels against the theta class
==================================================

Adding a hair sends the triangle L3 to three times the hairy triangle T.
The hairy theta H satisfies (delta + Delta) H = T + Theta, so
chi(L3) - (-3) Theta is exact and the two classes pair with c = -3.
"""

from gch.complexes import Window, cancellation_pair
from gch.graphs import decode
from gch.operators import Delta, GraphVector, chi, delta

L3 = decode("G 3 3 0 | 1>2 1>3 2>3 |")
theta = decode("G 2 3 0 | 1>2 1>2 1>2 |")
H = decode("G 2 2 1 | 1>2 1>2 | 2")

print("delta(L3)      =", delta(L3))
print("chi(L3)        =", chi(L3))
print("(delta+Delta)H =", delta(H) + Delta(H))

# the solver finds the same relation without being told about H
cert = cancellation_pair(GraphVector.basis(L3), Window(4, 5, 2))
print("coefficient", cert.coefficient)
print("witness    ", cert.witness)
print(cert.to_json())

# the certificate checks itself from the JSON alone
from gch.complexes import Certificate
print("re-verified:", Certificate.from_json(cert.to_json()).verify())
