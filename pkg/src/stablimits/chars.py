"""Exact algebra of equivariant characters.

Characters are finite integer-multiplicity sums of monomials in named
variables with half-integer exponents.  Everything here is immutable and
exact: exponents are stored as doubled integers, coefficients are plain
ints, and rational functions of characters compare by cross-multiplication.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Iterable, Iterator, Mapping

Rat = int | Fraction


class ExponentError(ValueError):
    """An exponent fell outside the half-integer lattice."""


class ZeroFactorError(ZeroDivisionError):
    """A multiplicative functional hit the zero factor (trivial monomial)."""


def _as_doubled(e: Rat) -> int:
    f = Fraction(e)
    if f.denominator not in (1, 2):
        raise ExponentError(f"exponent {f} is not a half-integer")
    return int(f * 2)


def rat_to_str(r: Rat) -> str:
    """Serialize a rational as 'p' or 'p/q'."""
    f = Fraction(r)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def rat_from_str(s: str | int | float) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, float):
        if not s.is_integer():
            raise ExponentError(f"non-integral float {s!r} in rational position")
        return Fraction(int(s))
    return Fraction(s)


class Monomial:
    """A product of named variables raised to half-integer powers.

    Absent variables carry exponent zero; two monomials are equal iff their
    exponent maps are equal.
    """

    __slots__ = ("_exp2", "_hash")

    def __init__(self, exponents: Mapping[str, Rat] | None = None):
        items = []
        if exponents:
            for var, e in exponents.items():
                e2 = _as_doubled(e)
                if e2:
                    items.append((var, e2))
        items.sort()
        self._exp2: tuple[tuple[str, int], ...] = tuple(items)
        self._hash = hash(self._exp2)

    @classmethod
    def _raw(cls, items: Iterable[tuple[str, int]]) -> "Monomial":
        m = object.__new__(cls)
        m._exp2 = tuple(sorted((v, e) for v, e in items if e))
        m._hash = hash(m._exp2)
        return m

    @classmethod
    def variable(cls, name: str, exponent: Rat = 1) -> "Monomial":
        return cls({name: exponent})

    def exponent(self, var: str) -> Fraction:
        for v, e2 in self._exp2:
            if v == var:
                return Fraction(e2, 2)
        return Fraction(0)

    def exponents(self) -> dict[str, Fraction]:
        return {v: Fraction(e2, 2) for v, e2 in self._exp2}

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self._exp2)

    @property
    def is_trivial(self) -> bool:
        return not self._exp2

    def __mul__(self, other: "Monomial") -> "Monomial":
        acc = dict(self._exp2)
        for v, e2 in other._exp2:
            acc[v] = acc.get(v, 0) + e2
        return Monomial._raw(acc.items())

    def __pow__(self, n: int) -> "Monomial":
        return Monomial._raw((v, e2 * n) for v, e2 in self._exp2)

    def inverse(self) -> "Monomial":
        return Monomial._raw((v, -e2) for v, e2 in self._exp2)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        return self * other.inverse()

    def sqrt(self) -> "Monomial":
        """Halve all exponents; requires every exponent to be integral."""
        if any(e2 % 2 for _, e2 in self._exp2):
            raise ExponentError(f"square root of {self} leaves the half-integer lattice")
        return Monomial._raw((v, e2 // 2) for v, e2 in self._exp2)

    def restrict(self, variables: Collection[str]) -> "Monomial":
        return Monomial._raw((v, e2) for v, e2 in self._exp2 if v in variables)

    def drop(self, variables: Collection[str]) -> "Monomial":
        return Monomial._raw((v, e2) for v, e2 in self._exp2 if v not in variables)

    def pairing(self, weight: Mapping[str, Rat]) -> Fraction:
        """Sum of exponent(v) * weight[v] over the weight's variables."""
        total = Fraction(0)
        for v, e2 in self._exp2:
            w = weight.get(v)
            if w is not None:
                total += Fraction(e2, 2) * Fraction(w)
        return total

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Monomial) and self._exp2 == other._exp2

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self, variable_order: tuple[str, ...] | None = None) -> tuple:
        if variable_order is None:
            variable_order = self.variables()
        known = {v: i for i, v in enumerate(variable_order)}
        vec = [0] * len(variable_order)
        extra = []
        for v, e2 in self._exp2:
            if v in known:
                vec[known[v]] = e2
            else:
                extra.append((v, e2))
        return (tuple(vec), tuple(extra))

    def __repr__(self) -> str:
        return f"Monomial({self.to_text() or '1'})"

    def to_text(self) -> str:
        parts = []
        for v, e2 in self._exp2:
            e = Fraction(e2, 2)
            parts.append(v if e == 1 else f"{v}^{rat_to_str(e)}")
        return "*".join(parts)

    def to_json(self) -> dict[str, str | int]:
        out: dict[str, str | int] = {}
        for v, e2 in self._exp2:
            e = Fraction(e2, 2)
            out[v] = int(e) if e.denominator == 1 else rat_to_str(e)
        return out

    @classmethod
    def from_json(cls, data: Mapping[str, str | int | float]) -> "Monomial":
        return cls({v: rat_from_str(e) for v, e in data.items()})


ONE = Monomial()


_TERM_RE = re.compile(r"^(?P<coef>[+-]?\d+)(?P<rest>(\*[A-Za-z_][A-Za-z_0-9]*(\^-?\d+(/\d+)?)?)*)$")


class Character:
    """Finite sum of monomials with nonzero integer multiplicities."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        if terms:
            self._terms: dict[Monomial, int] = {m: c for m, c in terms.items() if c}
        else:
            self._terms = {}

    @classmethod
    def zero(cls) -> "Character":
        return cls()

    @classmethod
    def one(cls) -> "Character":
        return cls({ONE: 1})

    @classmethod
    def monomial(cls, m: Monomial, mult: int = 1) -> "Character":
        return cls({m: mult})

    @classmethod
    def variable(cls, name: str, exponent: Rat = 1, mult: int = 1) -> "Character":
        return cls({Monomial.variable(name, exponent): mult})

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Monomial, int]]) -> "Character":
        acc: dict[Monomial, int] = {}
        for m, c in terms:
            acc[m] = acc.get(m, 0) + c
        return cls(acc)

    def items(self) -> Iterator[tuple[Monomial, int]]:
        return iter(self._terms.items())

    def multiplicity(self, m: Monomial) -> int:
        return self._terms.get(m, 0)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def term_count(self) -> int:
        return len(self._terms)

    def __add__(self, other: "Character") -> "Character":
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return Character(acc)

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def __neg__(self) -> "Character":
        return Character({m: -c for m, c in self._terms.items()})

    def __mul__(self, other: "Character | int") -> "Character":
        if isinstance(other, int):
            return Character({m: c * other for m, c in self._terms.items()})
        acc: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                acc[m] = acc.get(m, 0) + c1 * c2
        return Character(acc)

    __rmul__ = __mul__

    def times_monomial(self, m: Monomial) -> "Character":
        return Character({t * m: c for t, c in self._terms.items()})

    def conjugate(self) -> "Character":
        """Negate every exponent of every variable (an involution)."""
        return Character({m.inverse(): c for m, c in self._terms.items()})

    def rank(self) -> int:
        """Signed sum of multiplicities."""
        return sum(self._terms.values())

    def determinant(self) -> Monomial:
        """Product over terms of monomial**multiplicity."""
        acc: dict[str, int] = {}
        for m, c in self._terms.items():
            for v, e2 in m._exp2:
                acc[v] = acc.get(v, 0) + e2 * c
        return Monomial._raw(acc.items())

    def chamber_split(self, direction: Mapping[str, Rat]) -> tuple["Character", "Character", "Character"]:
        """Partition terms by the sign of the pairing with a chamber direction.

        Only variables named in ``direction`` grade the sign; all others
        (hbar, Kahler parameters) are invisible to the chamber.
        """
        pos: dict[Monomial, int] = {}
        zer: dict[Monomial, int] = {}
        neg: dict[Monomial, int] = {}
        for m, c in self._terms.items():
            p = m.pairing(direction)
            (pos if p > 0 else neg if p < 0 else zer)[m] = c
        return Character(pos), Character(zer), Character(neg)

    def floor_pairing(self, weight: Mapping[str, Rat]) -> int:
        """Sum of mult * floor(<exponent, weight>), extended linearly."""
        return sum(c * math.floor(m.pairing(weight)) for m, c in self._terms.items())

    def symmetric_floor_pairing(self, weight: Mapping[str, Rat]) -> Fraction:
        """Sum of mult * (floor + ceil)/2 of the pairings.

        Unlike the plain floor, the symmetrized floor is odd under negation,
        so this extension to virtual characters is canonical: conjugating the
        character flips the sign exactly.
        """
        total = Fraction(0)
        for m, c in self._terms.items():
            p = m.pairing(weight)
            total += c * Fraction(math.floor(p) + math.ceil(p), 2)
        return total

    def invariant_part(self, weight: Mapping[str, Rat]) -> "Character":
        """Terms whose exponents pair integrally with the weight vector."""
        return Character(
            {m: c for m, c in self._terms.items() if m.pairing(weight).denominator == 1}
        )

    def s_hat(self) -> "RationalExpr":
        """Product over terms of (m^(1/2) - m^(-1/2))**mult."""
        num = Character.one()
        den = Character.one()
        for m, c in self._terms.items():
            if m.is_trivial:
                if c < 0:
                    raise ZeroFactorError("s_hat of the trivial monomial vanishes in a denominator")
                if c > 0:
                    return RationalExpr(Character.zero(), Character.one())
                continue
            root = m.sqrt()
            binom = Character({root: 1, root.inverse(): -1})
            for _ in range(abs(c)):
                if c > 0:
                    num = num * binom
                else:
                    den = den * binom
        return RationalExpr(num, den)

    def exterior_euler(self) -> "RationalExpr":
        """Product over terms of (1 - m)**mult."""
        num = Character.one()
        den = Character.one()
        for m, c in self._terms.items():
            if m.is_trivial:
                if c < 0:
                    raise ZeroFactorError("(1 - 1) appears in a denominator")
                if c > 0:
                    return RationalExpr(Character.zero(), Character.one())
                continue
            binom = Character({ONE: 1, m: -1})
            for _ in range(abs(c)):
                if c > 0:
                    num = num * binom
                else:
                    den = den * binom
        return RationalExpr(num, den)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Character) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def sorted_terms(self, variable_order: tuple[str, ...] | None = None) -> list[tuple[Monomial, int]]:
        if variable_order is None:
            seen: list[str] = []
            for m in self._terms:
                for v in m.variables():
                    if v not in seen:
                        seen.append(v)
            variable_order = tuple(sorted(seen))
        return sorted(self._terms.items(), key=lambda mc: mc[0].sort_key(variable_order))

    def __repr__(self) -> str:
        return f"Character({self.to_text()})"

    def to_text(self, variable_order: tuple[str, ...] | None = None) -> str:
        """Canonical text form: terms like ``-2*a^3/2*hbar^-1`` joined by ' + '."""
        if self.is_zero:
            return "0"
        parts = []
        for m, c in self.sorted_terms(variable_order):
            txt = m.to_text()
            parts.append(f"{c}*{txt}" if txt else str(c))
        return " + ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "Character":
        text = text.strip()
        if text == "0":
            return cls.zero()
        acc: dict[Monomial, int] = {}
        for chunk in text.split(" + "):
            chunk = chunk.strip()
            match = _TERM_RE.match(chunk)
            if match is None:
                if re.fullmatch(r"[+-]?\d+", chunk):
                    coef, rest = int(chunk), ""
                else:
                    raise ValueError(f"cannot parse character term {chunk!r}")
            else:
                coef = int(match.group("coef"))
                rest = match.group("rest")
            exps: dict[str, Fraction] = {}
            for factor in filter(None, rest.split("*")):
                if "^" in factor:
                    var, _, e = factor.partition("^")
                    exps[var] = exps.get(var, Fraction(0)) + Fraction(e)
                else:
                    exps[factor] = exps.get(factor, Fraction(0)) + 1
            m = Monomial(exps)
            acc[m] = acc.get(m, 0) + coef
        return cls(acc)

    def to_json(self) -> dict:
        terms = [
            {"exp": m.to_json(), "mult": c}
            for m, c in self.sorted_terms(None)
        ]
        return {"terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Character":
        acc: dict[Monomial, int] = {}
        for t in data["terms"]:
            m = Monomial.from_json(t["exp"])
            acc[m] = acc.get(m, 0) + int(t["mult"])
        return cls(acc)


@dataclass(frozen=True)
class VariableSet:
    """Session-wide variable names: equivariant, hbar, and Kahler symbols."""

    equivariant: tuple[str, ...]
    hbar: str = "hbar"
    kahler: tuple[str, ...] = ()

    def __post_init__(self):
        names = self.all_names
        if len(set(names)) != len(names):
            raise ValueError(f"variable names must be distinct, got {names}")

    @property
    def all_names(self) -> tuple[str, ...]:
        return self.equivariant + (self.hbar,) + self.kahler

    def is_equivariant(self, name: str) -> bool:
        return name in self.equivariant

    def is_kahler(self, name: str) -> bool:
        return name in self.kahler


@dataclass(frozen=True)
class Chamber:
    """A cone direction in the equivariant weight space, one rational per variable."""

    direction: Mapping[str, Fraction]

    def __post_init__(self):
        if not any(Fraction(v) for v in self.direction.values()):
            raise ValueError("chamber direction must be nonzero")

    def pairing(self, m: Monomial) -> Fraction:
        return m.pairing(self.direction)

    def opposite(self) -> "Chamber":
        return Chamber({v: -Fraction(d) for v, d in self.direction.items()})


class RationalExpr:
    """Quotient of two characters, compared by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: Character, den: Character | None = None):
        if den is None:
            den = Character.one()
        if den.is_zero:
            raise ZeroDivisionError("zero denominator in RationalExpr")
        self.num = num
        self.den = den

    @classmethod
    def zero(cls) -> "RationalExpr":
        return cls(Character.zero())

    @classmethod
    def one(cls) -> "RationalExpr":
        return cls(Character.one())

    @classmethod
    def from_monomial(cls, m: Monomial, sign: int = 1) -> "RationalExpr":
        return cls(Character.monomial(m, sign))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __mul__(self, other: "RationalExpr | Character | int") -> "RationalExpr":
        if isinstance(other, RationalExpr):
            return RationalExpr(self.num * other.num, self.den * other.den)
        return RationalExpr(self.num * other, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalExpr") -> "RationalExpr":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __add__(self, other: "RationalExpr") -> "RationalExpr":
        if self.den == other.den:
            return RationalExpr(self.num + other.num, self.den)
        return RationalExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalExpr") -> "RationalExpr":
        return self + (-other)

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(-self.num, self.den)

    def inverse(self) -> "RationalExpr":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero expression")
        return RationalExpr(self.den, self.num)

    def times_monomial(self, m: Monomial) -> "RationalExpr":
        return RationalExpr(self.num.times_monomial(m), self.den)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalExpr):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:  # weak but consistent: hash of nothing structural
        return hash(("RationalExpr", self.num.is_zero))

    def as_scaled_monomial(self) -> tuple[Fraction, Monomial] | None:
        """If both numerator and denominator are single terms, return (ratio, monomial)."""
        if self.num.term_count() != 1 or self.den.term_count() != 1:
            return None
        (mn, cn), = self.num.items()
        (md, cd), = self.den.items()
        return Fraction(cn, cd), mn / md

    def degree_span(self, variables: Collection[str]) -> tuple[Fraction, Fraction] | None:
        """[min, max] exponent span in the given variables, num minus den endpoint-wise."""
        if self.is_zero:
            return None

        def span(ch: Character) -> tuple[Fraction, Fraction]:
            degs = [sum((m.exponent(v) for v in variables), Fraction(0)) for m, _ in ch.items()]
            return min(degs), max(degs)

        lo_n, hi_n = span(self.num)
        lo_d, hi_d = span(self.den)
        return lo_n - lo_d, hi_n - hi_d

    def __repr__(self) -> str:
        return f"RationalExpr(({self.num.to_text()}) / ({self.den.to_text()}))"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalExpr":
        return cls(Character.from_json(data["num"]), Character.from_json(data["den"]))


class NumericContext:
    """Consistent numeric specialization of monomials with half-integer exponents.

    Stores a fourth root per variable so that both m and sqrt(m) evaluate with
    one fixed branch choice everywhere.
    """

    def __init__(self, quarter_roots: Mapping[str, complex]):
        self._q = dict(quarter_roots)

    @classmethod
    def from_values(cls, values: Mapping[str, complex]) -> "NumericContext":
        return cls({v: complex(x) ** 0.25 for v, x in values.items()})

    def monomial(self, m: Monomial) -> complex:
        out = 1.0 + 0.0j
        for v, e in m.exponents().items():
            out *= self._q[v] ** int(4 * e)
        return out

    def monomial_sqrt(self, m: Monomial) -> complex:
        out = 1.0 + 0.0j
        for v, e in m.exponents().items():
            out *= self._q[v] ** int(2 * e)
        return out

    def character(self, ch: Character) -> complex:
        return sum((c * self.monomial(m) for m, c in ch.items()), 0.0 + 0.0j)

    def rational(self, expr: RationalExpr) -> complex:
        return self.character(expr.num) / self.character(expr.den)
