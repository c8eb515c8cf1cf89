"""The odd theta function as an exact q-series and its q -> 0 limit law.

theta(x) = (x^(1/2) - x^(-1/2)) prod_{i>=1} (1 - x q^i)(1 - q^i/x)

The expansion engine carries exact rational q-exponents and Character
coefficients, so functional equations can be checked coefficient-exactly,
and the closed-form leading behavior drives exact ratio limits.
"""

from fractions import Fraction

from stablimits import (
    Monomial,
    ThetaArgument,
    numeric_theta,
    theta_ratio_limit,
    theta_series,
    verify_oddness,
    verify_quasiperiod,
)

a = Monomial.variable("a")
z = Monomial.variable("z")
half = Fraction(1, 2)

print("expansion of theta(a) below q^2:")
print("  ", theta_series(ThetaArgument(a), 2))

print("\nexpansion of theta(a q^(1/2)) below q^1 (note the q^(-1/4) valuation):")
print("  ", theta_series(ThetaArgument(a, half), 1))

print("\nfunctional equations, coefficient-exact to order 20:")
print("  theta(1/x) = -theta(x):        ", verify_oddness(20))
print("  theta(xq) = -theta(x)/(x q^.5):", verify_quasiperiod(20))

# The two-branch limit law for theta(z a q^w)/theta(a q^w) as q -> 0:
# a monomial z-power for fractional w, and the extra (1-az)/(1-a) for
# integral w.
print("\nlimit of theta(zaq^w)/theta(aq^w) as q -> 0:")
for w in (half, Fraction(0), Fraction(-3, 2), Fraction(2)):
    lim = theta_ratio_limit([ThetaArgument(z * a, w)], [ThetaArgument(a, w)])
    pre = lim.prefactor.to_text() or "1"
    print(f"  w = {str(w):>4}: prefactor {pre:10}  value {lim.value}")

# The numeric evaluator agrees with the exact series.
x, q = 2.0, 1e-4
series_value = theta_series(ThetaArgument(a), 4)
from stablimits import NumericContext

ctx = NumericContext.from_values({"a": x})
print("\nnumeric theta(2) at q=1e-4:", numeric_theta(x, q))
print("exact series evaluated:    ", series_value.evaluate(ctx, q).real)
