"""Balanced sections and the two-stage limit.

The running example is the two-term section

    theta(az)/(theta(a)theta(z)) + theta(a^2 z)theta(a)/(theta(a^2)theta(az)),

balanced in a, balanced in z, but not in (a, z) jointly.  Its q -> 0 limit
after the shift a -> a q^w exists for every rational w, and the
quasiperiod-corrected Kahler limits exist in both chamber directions.
"""

from fractions import Fraction

from stablimits import (
    BalancedExpression,
    BalancedTerm,
    KahlerChamber,
    Monomial,
    VariableSet,
    chamber_correction,
    double_limit,
    is_balanced_in,
    q_limit,
    quasiperiod_pairing,
    theta,
    z_limit,
)

VARS = VariableSet(("a",), "hbar", ("z",))
ONE = Monomial()

section = BalancedExpression(
    (
        BalancedTerm(ONE, (theta({"a": 1, "z": 1}),), (theta({"a": 1}), theta({"z": 1}))),
        BalancedTerm(
            ONE,
            (theta({"a": 2, "z": 1}), theta({"a": 1})),
            (theta({"a": 2}), theta({"a": 1, "z": 1})),
        ),
    )
)

print("balanced in a:      ", is_balanced_in(section, ("a",)))
print("balanced in z:      ", is_balanced_in(section, ("z",)))
print("balanced in (a, z): ", is_balanced_in(section, ("a", "z")))
print("quasiperiod pairing:", quasiperiod_pairing(section, VARS))

for w in (Fraction(0), Fraction(1, 2)):
    norm, value = q_limit(section, {"a": w}, VARS)
    print(f"\nq -> 0 limit at w = {w}:")
    print("  normalization:", norm.to_text() or "1")
    print("  value:        ", value)

# The corrected Kahler limits in both directions, w = 0:
for direction in ("zero", "infinity"):
    out = double_limit(section, {"a": Fraction(0)}, KahlerChamber({"z": direction}), VARS)
    print(f"\nz -> {direction} limit at w = 0:", out)

# The same machinery piece by piece, with the correction shown explicitly.
w = {"a": Fraction(1, 2)}
pairing = quasiperiod_pairing(section, VARS)
norm, value = q_limit(section, w, VARS)
chamber = KahlerChamber({"z": "zero"})
corr = chamber_correction(pairing, w, norm, chamber)
print("\nat w = 1/2 the correction monomial is", (corr * norm).to_text() or "1")
print("corrected z -> 0 limit:", z_limit(value, chamber, corr * norm))
