"""Fixed-point combinatorics on diagrams: characters, components, exponents.

Per diagram: contents and hooks, the polarization character and its two
structural identities, the residue classification of components under the
order-b cyclic subgroup, and the m-exponents entering the diagonal
conjugation matrices.  Ends with the convention calibration scan.
"""

from fractions import Fraction

from stablimits import (
    ConventionSet,
    YoungDiagram,
    calibrate,
    conjugation_matrices,
    contents,
    d_lambda,
    enumerate_components,
    hooks,
    index_exponent,
    m_hilbert,
    partitions,
    polarization,
    sigma,
)

conv = ConventionSet("i-j", "neg")
half = Fraction(1, 2)

print("diagrams of size 4:", ", ".join(str(d) for d in partitions(4)))

d = YoungDiagram((2, 1))
P = polarization(d, conv)
print(f"\ndiagram {d}:")
print("  contents:", contents(d, conv))
print("  hooks:   ", hooks(d))
print("  d        =", d_lambda(d, conv))
print("  sigma    =", sigma(d, conv))
print("  P        =", P.to_text(("a",)))
print("  P + conj(P) = sum a^(+-hook):",
      (P + P.conjugate()).to_text(("a",)))
print("  det(P) exponent equals sigma:", P.determinant().exponent("a") == sigma(d, conv))

print("\nresidue components of size-4 diagrams mod 2:")
for component, diagrams in sorted(enumerate_components(4, 2, conv).items()):
    print(f"  {component}: {', '.join(str(x) for x in diagrams)}")

# The diagonal conjugation data for the n = 2 component at w = 1/2:
comp = [YoungDiagram((2,)), YoungDiagram((1, 1))]
data = conjugation_matrices(comp, half, conv)
print("\nconjugation diagonals for the size-2 component at w = 1/2:")
print("  z-exponents (w*d):     ", data.z_exponents)
print("  H signs:               ", data.h_signs)
print("  H exponents (m form):  ", data.h_exponents)
print("  exact limit exponents: ", data.limit_exponents)
print("  m-differences are twice the limit-exponent differences:",
      data.h_exponents[0] - data.h_exponents[1]
      == 2 * (data.limit_exponents[0] - data.limit_exponents[1]))

# m-values on a small grid; the identity m_general = m_hilbert + w n^2 is
# checked in the test suite for every diagram up to size 10.
print("\nm values at w = 1/2:")
for dg in partitions(3):
    print(f"  {str(dg):8} m = {m_hilbert(dg, half, conv)}  "
          f"index exponent = {index_exponent(dg, half, conv)}")

# Calibration: both attract=neg conventions satisfy the difference identity,
# both attract=pos fail it; the default resolves to (i-j, neg).
result = calibrate(n_max=5)
print("\ncalibration scan:")
print("  passing:", ", ".join(str(c) for c in result.passing))
print("  failing:", ", ".join(str(c) for c in result.failing))
print("  default:", result.default)
conv_bad = result.failing[0]
d1, d2, w, lhs, rhs = result.counterexamples[conv_bad]
print(f"  counterexample for {conv_bad}: pair {d1} / {d2} at w = {w}: "
      f"exponent difference {lhs} vs half m-difference {rhs}")
