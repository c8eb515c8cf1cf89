"""Characters: exact Laurent sums with half-integer exponents.

Walks through the basic algebra: building characters, conjugation, rank and
determinant, chamber splits, floor pairings, and the multiplicative
functionals s_hat and the exterior Euler class, ending with the identity
that ties them together.
"""

from fractions import Fraction

from stablimits import Character

half = Fraction(1, 2)

# A character is a finite integer combination of monomials.
V = Character.from_text("2*a + 1*a^2 + -1*a^-1")
print("V                =", V.to_text())
print("conjugate(V)     =", V.conjugate().to_text())
print("rank(V)          =", V.rank())
print("det(V)           =", V.determinant().to_text())

# Chamber splits grade the equivariant exponents by a direction.
pos, zero, neg = V.chamber_split({"a": Fraction(-1)})
print("\nchamber direction -1:")
print("  positive part  =", pos.to_text() or "0")
print("  zero part      =", zero.to_text())
print("  negative part  =", neg.to_text())

# Floor pairing with a rational weight, extended linearly with signs.
print("\nfloor pairing with w = 1/2:", V.floor_pairing({"a": half}))
print("symmetrized floor with w = 1/2:", V.symmetric_floor_pairing({"a": half}))
print("invariant part for w = 1/2:", V.invariant_part({"a": half}).to_text())

# s_hat multiplies (m^(1/2) - m^(-1/2)) over terms; exterior_euler multiplies
# (1 - m).  The two are linked through the rank and the determinant:
#
#     s_hat(V) = (-1)^rank(V) * det(V)^(-1/2) * euler(V)
W = Character.from_text("1*a + 1*b^2 + -1*a*b")
lhs = W.s_hat()
rhs = W.exterior_euler().times_monomial(W.determinant().sqrt().inverse())
if W.rank() % 2:
    rhs = -rhs
print("\nW                =", W.to_text())
print("s_hat(W)         =", lhs)
print("bridge identity holds:", lhs == rhs)

# Serialization round-trips bit-exactly in both the text and JSON forms.
blob = V.to_json()
print("\nJSON form:", blob)
print("round trip exact:", Character.from_json(blob) == V)
