"""Truncated q-series with rational exponents and the odd theta function.

The expansion engine is exact: q-exponents are Fractions, coefficients are
Characters, and a series carries the order below which its coefficients are
complete.  The q->0 behavior of a theta factor is also available in closed
form (valuation, sign, monomial, optional binomial), which is what the limit
law consumes; the series engine doubles as an independent check.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .chars import (
    Character,
    ExponentError,
    Monomial,
    NumericContext,
    ONE,
    Rat,
    RationalExpr,
    rat_from_str,
    rat_to_str,
)


class LimitUndefined(ArithmeticError):
    """The requested q->0 limit does not exist (pole or degenerate factor)."""


class NonConvergence(ArithmeticError):
    """Numeric theta evaluation outside the convergence disc."""


@dataclass(frozen=True)
class ThetaArgument:
    """The argument monomial * q**qshift of one theta factor."""

    monomial: Monomial
    qshift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "qshift", Fraction(self.qshift))

    def shifted(self, weight: Mapping[str, Rat]) -> "ThetaArgument":
        """Shift equivariant parameters a -> a q^w: the q-shift grows by <exp, w>."""
        return ThetaArgument(self.monomial, self.qshift + self.monomial.pairing(weight))

    def to_json(self) -> dict:
        return {"exp": self.monomial.to_json(), "qshift": rat_to_str(self.qshift)}

    @classmethod
    def from_json(cls, data: Mapping) -> "ThetaArgument":
        return cls(Monomial.from_json(data["exp"]), rat_from_str(data.get("qshift", 0)))


class QSeries:
    """Sparse q-series: coefficients complete for exponents < order."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Mapping[Fraction, Character], order: Rat):
        self.order = Fraction(order)
        self.coeffs: dict[Fraction, Character] = {
            Fraction(e): c for e, c in coeffs.items() if not c.is_zero and Fraction(e) < self.order
        }

    @classmethod
    def zero(cls, order: Rat) -> "QSeries":
        return cls({}, order)

    @classmethod
    def constant(cls, ch: Character, order: Rat) -> "QSeries":
        return cls({Fraction(0): ch}, order)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> Fraction | None:
        """Smallest exponent with nonzero coefficient, None if zero so far."""
        return min(self.coeffs) if self.coeffs else None

    def leading(self) -> tuple[Fraction, Character]:
        if not self.coeffs:
            raise ValueError("zero series has no leading term")
        e = min(self.coeffs)
        return e, self.coeffs[e]

    def coefficient(self, e: Rat) -> Character:
        return self.coeffs.get(Fraction(e), Character.zero())

    def truncate(self, order: Rat) -> "QSeries":
        order = min(Fraction(order), self.order)
        return QSeries({e: c for e, c in self.coeffs.items() if e < order}, order)

    def __add__(self, other: "QSeries") -> "QSeries":
        order = min(self.order, other.order)
        acc = dict(self.coeffs)
        for e, c in other.coeffs.items():
            acc[e] = acc.get(e, Character.zero()) + c
        return QSeries(acc, order)

    def __neg__(self) -> "QSeries":
        return QSeries({e: -c for e, c in self.coeffs.items()}, self.order)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + (-other)

    def __mul__(self, other: "QSeries") -> "QSeries":
        # The product is complete below min over the two cross valuations.
        val_s = self.valuation()
        val_o = other.valuation()
        bound_s = other.order + (val_s if val_s is not None else Fraction(0))
        bound_o = self.order + (val_o if val_o is not None else Fraction(0))
        if self.is_zero and other.is_zero:
            order = self.order + other.order
        elif self.is_zero:
            order = bound_o
        elif other.is_zero:
            order = bound_s
        else:
            order = min(bound_s, bound_o)
        acc: dict[Fraction, Character] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e < order:
                    acc[e] = acc.get(e, Character.zero()) + c1 * c2
        return QSeries(acc, order)

    def scale(self, ch: Character) -> "QSeries":
        return QSeries({e: c * ch for e, c in self.coeffs.items()}, self.order)

    def scale_monomial(self, m: Monomial) -> "QSeries":
        return QSeries({e: c.times_monomial(m) for e, c in self.coeffs.items()}, self.order)

    def shift_q(self, delta: Rat) -> "QSeries":
        d = Fraction(delta)
        return QSeries({e + d: c for e, c in self.coeffs.items()}, self.order + d)

    def agrees_with(self, other: "QSeries", order: Rat) -> bool:
        """Coefficient-exact equality for exponents < order."""
        order = Fraction(order)
        if self.order < order or other.order < order:
            raise ValueError("series not complete to the comparison order")
        exps = {e for e in self.coeffs if e < order} | {e for e in other.coeffs if e < order}
        return all(self.coefficient(e) == other.coefficient(e) for e in exps)

    def evaluate(self, ctx: NumericContext, q: complex) -> complex:
        out = 0j
        for e, c in self.coeffs.items():
            out += ctx.character(c) * _qpow(q, e)
        return out

    def __str__(self) -> str:
        if not self.coeffs:
            return f"0 + O(q^{rat_to_str(self.order)})"
        parts = [
            f"q^{rat_to_str(e)}*({self.coeffs[e].to_text()})" for e in sorted(self.coeffs)
        ]
        return " + ".join(parts) + f" + O(q^{rat_to_str(self.order)})"


def _qpow(q: complex, e: Fraction) -> complex:
    if q == 0:
        if e == 0:
            return 1.0
        if e > 0:
            return 0.0
        raise ZeroDivisionError("q**negative at q=0")
    return cmath.exp(complex(e) * cmath.log(q))


_Poly = dict[Fraction, Character]


def _theta_factor_polys(arg: ThetaArgument, order: Fraction) -> list[_Poly]:
    """Exact polynomial factors of the theta product, enough for the order.

    Returns the two-term prefactor and the finitely many product factors that
    can touch exponents below ``order``; every omitted factor is 1 + O(q^e)
    with e large enough not to matter.
    """
    m, s = arg.monomial, arg.qshift
    root = m.sqrt()

    prefactor: _Poly = {}
    for e, c in ((s / 2, Character.monomial(root)), (-s / 2, Character.monomial(root.inverse(), -1))):
        prefactor[e] = prefactor.get(e, Character.zero()) + c
    factors = [prefactor]

    # Valuation of the full product: negative contributions come from the
    # prefactor and from factors whose q-exponent s+i or i-s is negative.
    def factor_val(i: int) -> Fraction:
        return min(Fraction(0), s + i) + min(Fraction(0), i - s)

    n = 1
    base_val = min(s / 2, -s / 2)
    while True:
        val = base_val + sum(factor_val(i) for i in range(1, n + 1))
        smallest_omitted = min(s + n + 1, Fraction(n + 1) - s)
        if smallest_omitted > 0 and val + smallest_omitted >= order:
            break
        n += 1

    minv = m.inverse()

    def binomial_factor(exponent: Fraction, mono: Monomial) -> _Poly:
        poly: _Poly = {Fraction(0): Character.one()}
        bump = Character.monomial(mono, -1)
        poly[exponent] = poly.get(exponent, Character.zero()) + bump
        return {e: c for e, c in poly.items() if not c.is_zero}

    for i in range(1, n + 1):
        factors.append(binomial_factor(s + i, m))
        factors.append(binomial_factor(Fraction(i) - s, minv))
    return factors


def theta_series(arg: ThetaArgument, order: Rat) -> QSeries:
    """Exact expansion of theta(m * q^s) for q-exponents below ``order``.

    theta(x) = (x^(1/2) - x^(-1/2)) * prod_{i>=1} (1 - x q^i)(1 - q^i / x).
    """
    order = Fraction(order)
    m, s = arg.monomial, arg.qshift
    if m.is_trivial and s.denominator == 1:
        # theta vanishes identically on integral powers of q.
        return QSeries.zero(order)
    factors = _theta_factor_polys(arg, order)

    def val(poly: _Poly) -> Fraction:
        return min(poly) if poly else Fraction(0)

    # Multiply negative-valuation factors first; while factors with negative
    # exponents remain pending, keep intermediate terms down to order minus
    # what those factors can still subtract.
    factors.sort(key=val)
    pending_neg = sum((min(val(f), Fraction(0)) for f in factors), Fraction(0))
    acc: _Poly = {Fraction(0): Character.one()}
    for f in factors:
        pending_neg -= min(val(f), Fraction(0))
        cutoff = order - pending_neg
        new: _Poly = {}
        for e1, c1 in acc.items():
            for e2, c2 in f.items():
                e = e1 + e2
                if e < cutoff:
                    new[e] = new.get(e, Character.zero()) + c1 * c2
        acc = {e: c for e, c in new.items() if not c.is_zero}
    return QSeries(acc, order)


def verify_oddness(order: Rat) -> bool:
    """Check theta(1/x) == -theta(x) coefficient-exactly below ``order``."""
    x = Monomial.variable("x")
    lhs = theta_series(ThetaArgument(x.inverse()), order)
    rhs = -theta_series(ThetaArgument(x), order)
    return lhs.agrees_with(rhs, order)


def verify_quasiperiod(order: Rat) -> bool:
    """Check theta(x q) == -(x sqrt(q))^(-1) theta(x) below ``order``."""
    order = Fraction(order)
    x = Monomial.variable("x")
    lhs = theta_series(ThetaArgument(x, Fraction(1)), order)
    base = theta_series(ThetaArgument(x), order + Fraction(1, 2))
    rhs = (-base).scale_monomial(x.inverse()).shift_q(Fraction(-1, 2))
    return lhs.agrees_with(rhs, order)


@dataclass(frozen=True)
class ThetaLeading:
    """Closed-form leading behavior of one theta factor as q -> 0.

    theta(m q^s) = sign * monomial * (1 - binomial_of) * q^valuation * (1 + O(q^{>0}))
    with the binomial present exactly when the shift s is an integer.
    """

    valuation: Fraction
    sign: int
    monomial: Monomial
    binomial_of: Monomial | None


def theta_leading(arg: ThetaArgument) -> ThetaLeading:
    m, s = arg.monomial, arg.qshift
    if m.is_trivial and s.denominator == 1:
        raise LimitUndefined(f"theta(q^{rat_to_str(s)}) vanishes identically")
    k = s.numerator // s.denominator  # floor
    r = s - k
    try:
        root = m.sqrt()
    except ExponentError as exc:
        raise LimitUndefined(
            f"theta argument {m.to_text() or '1'} has no half-integer square root"
        ) from exc
    if r == 0:
        # theta(m q^s) = (-1)^(s+1) m^(-s-1/2) (1 - m) q^(-s^2/2) (1 + ...)
        return ThetaLeading(
            valuation=Fraction(-s * s, 2),
            sign=-1 if s % 2 == 0 else 1,
            monomial=(m ** (-k)) * root.inverse(),
            binomial_of=m,
        )
    # s = k + r with 0 < r < 1:
    # theta(m q^s) = (-1)^(k+1) m^(-k-1/2) q^(-kr - k^2/2 - r/2) (1 + ...)
    return ThetaLeading(
        valuation=-k * r - Fraction(k * k, 2) - r / 2,
        sign=-1 if k % 2 == 0 else 1,
        monomial=(m ** (-k)) * root.inverse(),
        binomial_of=None,
    )


@dataclass(frozen=True)
class LimitResult:
    """q->0 limit of a theta ratio: prefactor monomial times a rational value."""

    prefactor: Monomial
    value: RationalExpr

    def combined(self) -> RationalExpr:
        return self.value.times_monomial(self.prefactor)


def theta_ratio_limit(
    numerator: Iterable[ThetaArgument], denominator: Iterable[ThetaArgument]
) -> LimitResult:
    """Exact q->0 limit of prod theta(num) / prod theta(den).

    Raises LimitUndefined when the total q-valuation is negative (a pole) or a
    factor is identically zero.  A positive total valuation gives limit 0.
    """
    valuation = Fraction(0)
    sign = 1
    monomial = ONE
    num_binoms: list[Monomial] = []
    den_binoms: list[Monomial] = []
    for arg in numerator:
        lead = theta_leading(arg)
        valuation += lead.valuation
        sign *= lead.sign
        monomial = monomial * lead.monomial
        if lead.binomial_of is not None:
            num_binoms.append(lead.binomial_of)
    for arg in denominator:
        lead = theta_leading(arg)
        valuation -= lead.valuation
        sign *= lead.sign  # sign is +-1, division == multiplication
        monomial = monomial / lead.monomial
        if lead.binomial_of is not None:
            den_binoms.append(lead.binomial_of)
    if valuation < 0:
        raise LimitUndefined(
            f"theta ratio has a q-pole of order {rat_to_str(-valuation)}"
        )
    if valuation > 0:
        return LimitResult(ONE, RationalExpr.zero())
    num = Character.one() * sign
    for b in num_binoms:
        num = num * Character({ONE: 1, b: -1})
    den = Character.one()
    for b in den_binoms:
        den = den * Character({ONE: 1, b: -1})
    return LimitResult(monomial, RationalExpr(num, den))


def numeric_theta(x: complex, q: complex, tolerance: float = 1e-12) -> complex:
    """Floating-point theta via the defining product, principal branch for x^(1/2)."""
    if abs(q) >= 1:
        raise NonConvergence(f"|q| = {abs(q)} is not inside the unit disc")
    if x == 0:
        raise ZeroDivisionError("theta argument must be nonzero")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    root = cmath.sqrt(x)
    out = root - 1 / root
    qi = q
    while True:
        d1 = qi * x
        d2 = qi / x
        if abs(d1) < tolerance and abs(d2) < tolerance:
            break
        out *= (1 - d1) * (1 - d2)
        qi *= q
        if abs(qi) < 1e-300:
            break
    return out


def numeric_theta_argument(
    arg: ThetaArgument, q: complex, ctx: NumericContext, tolerance: float = 1e-12
) -> complex:
    """Numeric theta(m q^s) with the square-root branch taken from the context.

    Matches the exact engine's formal m^(1/2) choice, so series and product
    agree without branch ambiguity.
    """
    if abs(q) >= 1:
        raise NonConvergence(f"|q| = {abs(q)} is not inside the unit disc")
    m_val = ctx.monomial(arg.monomial)
    root = ctx.monomial_sqrt(arg.monomial)
    qs = _qpow(q, arg.qshift)
    qs_half = _qpow(q, arg.qshift / 2)
    x = m_val * qs
    out = root * qs_half - 1 / (root * qs_half)
    i = 1
    while True:
        d1 = _qpow(q, Fraction(i)) * x
        d2 = _qpow(q, Fraction(i)) / x
        if abs(d1) < tolerance and abs(d2) < tolerance:
            break
        out *= (1 - d1) * (1 - d2)
        i += 1
        if i > 10_000:
            raise NonConvergence("theta product did not stabilize")
    return out
