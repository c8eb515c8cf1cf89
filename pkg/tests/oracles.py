"""Arbitrary-precision numeric oracles for the exact engine.

Theta values at shifted arguments span hundreds of orders of magnitude before
their ratios cancel, so the oracle runs on mpmath with a fixed working
precision and one quarter-root branch choice per variable, matching the
formal m^(1/2) of the exact engine.
"""

from fractions import Fraction

import mpmath as mp

from stablimits.balanced import BalancedExpression
from stablimits.chars import Character, Monomial, RationalExpr
from stablimits.qseries import ThetaArgument

DPS = 60


def quarter_roots(values: dict[str, complex], dps: int = DPS) -> dict[str, mp.mpc]:
    with mp.workdps(dps):
        return {v: mp.power(mp.mpc(x), mp.mpf(1) / 4) for v, x in values.items()}


def mp_monomial(m: Monomial, quarters) -> mp.mpc:
    out = mp.mpc(1)
    for v, e in m.exponents().items():
        out *= quarters[v] ** int(4 * e)
    return out


def mp_monomial_sqrt(m: Monomial, quarters) -> mp.mpc:
    out = mp.mpc(1)
    for v, e in m.exponents().items():
        out *= quarters[v] ** int(2 * e)
    return out


def mp_character(ch: Character, quarters) -> mp.mpc:
    return sum((c * mp_monomial(m, quarters) for m, c in ch.items()), mp.mpc(0))


def mp_rational(expr: RationalExpr, quarters) -> mp.mpc:
    return mp_character(expr.num, quarters) / mp_character(expr.den, quarters)


def mp_qpow(q, e: Fraction):
    return mp.power(q, mp.mpf(e.numerator) / e.denominator)


def mp_theta_argument(arg: ThetaArgument, q, quarters) -> mp.mpc:
    """theta(m q^s) with the context's square-root branch."""
    root = mp_monomial_sqrt(arg.monomial, quarters) * mp_qpow(q, arg.qshift / 2)
    x = mp_monomial(arg.monomial, quarters) * mp_qpow(q, arg.qshift)
    out = root - 1 / root
    i = 1
    eps = mp.mpf(10) ** (-mp.mp.dps + 5)
    while True:
        d1 = mp_qpow(q, Fraction(i)) * x
        d2 = mp_qpow(q, Fraction(i)) / x
        if abs(d1) < eps and abs(d2) < eps:
            return out
        out *= (1 - d1) * (1 - d2)
        i += 1
        if i > 100_000:
            raise RuntimeError("theta product did not stabilize")


def mp_evaluate(expr: BalancedExpression, q, quarters) -> mp.mpc:
    total = mp.mpc(0)
    for term in expr.terms:
        val = mp_monomial(term.prefactor, quarters)
        for a in term.numerator:
            val *= mp_theta_argument(a, q, quarters)
        for a in term.denominator:
            val /= mp_theta_argument(a, q, quarters)
        total += val
    return total
