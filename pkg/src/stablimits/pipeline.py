"""Restriction-matrix pipeline: validation, the shifted double limit, and
the structural checks on the resulting matrix.

A restriction matrix holds one balanced expression per (row, column) pair of
fixed-point labels, normalized so the diagonal is 1 and triangular with
respect to a declared order.  The pipeline shifts equivariant parameters by
q^w, takes the exact q->0 limit entrywise, applies the quasiperiod-derived
Kahler correction, and sends the Kahler parameters to their chamber limits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .balanced import (
    BalancedExpression,
    DivergentLimit,
    InconsistentBundle,
    KahlerChamber,
    NormalizationMismatch,
    chamber_correction,
    has_separated_poles,
    is_balanced_in,
    q_limit,
    quasiperiod_pairing,
    z_limit,
)
from .chars import (
    Character,
    Monomial,
    ONE,
    Rat,
    RationalExpr,
    VariableSet,
    rat_from_str,
    rat_to_str,
)
from .hilbert import (
    ConventionSet,
    DiagonalMatrices,
    YoungDiagram,
    conjugation_matrices,
    d_lambda,
)
from .qseries import LimitUndefined, ThetaArgument, theta_ratio_limit


class MalformedInput(ValueError):
    """The matrix JSON or metadata cannot be interpreted."""


class EntryLimitError(RuntimeError):
    """A limit failed for one entry; carries the (row, col) address."""

    def __init__(self, row: str, col: str, cause: Exception):
        super().__init__(f"entry ({row}, {col}): {cause}")
        self.row = row
        self.col = col
        self.cause = cause


@dataclass
class CheckRecord:
    """One line of a report: passed is None when the check was skipped."""

    name: str
    subject: str
    passed: bool | None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "check": self.name,
            "subject": self.subject,
            "status": "skipped" if self.passed is None else ("pass" if self.passed else "fail"),
            "detail": self.detail,
        }


@dataclass
class Report:
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name: str, subject: str, passed: bool | None, detail: str = ""):
        self.records.append(CheckRecord(name, subject, passed, detail))

    @property
    def ok(self) -> bool:
        return all(r.passed is not False for r in self.records)

    def counts(self) -> dict[str, int]:
        run = sum(1 for r in self.records if r.passed is not None)
        passed = sum(1 for r in self.records if r.passed is True)
        failed = sum(1 for r in self.records if r.passed is False)
        skipped = sum(1 for r in self.records if r.passed is None)
        return {"checks": run, "passed": passed, "failed": failed, "skipped": skipped}

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.passed is False]


@dataclass
class MatrixMetadata:
    """Declared context for a restriction matrix.

    Optional fields unlock optional checks; everything exact.  The declared
    order lists labels from the bottom of the attraction order upward: a
    nonzero entry (row, col) requires col to appear no later than row.
    """

    variables: VariableSet
    convention: ConventionSet | None = None
    order: tuple[str, ...] | None = None
    polarizations: dict[str, Character] | None = None
    d_values: dict[str, int] | None = None
    slopes: dict[str, Fraction] | None = None
    unnormalized_diagonal: dict[str, RationalExpr] | None = None

    def to_json(self) -> dict:
        out: dict = {
            "variables": {
                "equivariant": list(self.variables.equivariant),
                "hbar": self.variables.hbar,
                "kahler": list(self.variables.kahler),
            }
        }
        if self.convention is not None:
            out["convention"] = {"content": self.convention.content, "attract": self.convention.attract}
        if self.order is not None:
            out["order"] = list(self.order)
        if self.polarizations is not None:
            out["polarizations"] = {k: v.to_json() for k, v in self.polarizations.items()}
        if self.d_values is not None:
            out["d_values"] = dict(self.d_values)
        if self.slopes is not None:
            out["slopes"] = {k: rat_to_str(v) for k, v in self.slopes.items()}
        if self.unnormalized_diagonal is not None:
            out["unnormalized_diagonal"] = {
                k: v.to_json() for k, v in self.unnormalized_diagonal.items()
            }
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "MatrixMetadata":
        try:
            v = data["variables"]
            variables = VariableSet(
                tuple(v["equivariant"]), v.get("hbar", "hbar"), tuple(v.get("kahler", ()))
            )
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad variables block: {exc}") from exc
        convention = None
        if "convention" in data:
            c = data["convention"]
            convention = ConventionSet(c.get("content", "i-j"), c.get("attract", "neg"))
        polarizations = None
        if "polarizations" in data:
            polarizations = {
                k: Character.from_json(v) for k, v in data["polarizations"].items()
            }
        slopes = None
        if "slopes" in data:
            slopes = {k: rat_from_str(v) for k, v in data["slopes"].items()}
        diag = None
        if "unnormalized_diagonal" in data:
            diag = {
                k: RationalExpr.from_json(v)
                for k, v in data["unnormalized_diagonal"].items()
            }
        return cls(
            variables=variables,
            convention=convention,
            order=tuple(data["order"]) if "order" in data else None,
            polarizations=polarizations,
            d_values={k: int(v) for k, v in data["d_values"].items()} if "d_values" in data else None,
            slopes=slopes,
            unnormalized_diagonal=diag,
        )


@dataclass
class RestrictionMatrix:
    """Labels, one balanced expression per ordered label pair, metadata.

    Absent entries are zero; the diagonal must be the constant expression 1.
    """

    labels: tuple[str, ...]
    entries: dict[tuple[str, str], BalancedExpression]
    metadata: MatrixMetadata

    @classmethod
    def identity(cls, labels: Iterable[str], metadata: MatrixMetadata) -> "RestrictionMatrix":
        labels = tuple(labels)
        return cls(
            labels,
            {(l, l): BalancedExpression.one() for l in labels},
            metadata,
        )

    def entry(self, row: str, col: str) -> BalancedExpression:
        return self.entries.get((row, col), BalancedExpression.zero())

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "entries": [
                {"row": r, "col": c, "expr": e.to_json()}
                for (r, c), e in sorted(self.entries.items())
            ],
            "metadata": self.metadata.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RestrictionMatrix":
        try:
            labels = tuple(str(l) for l in data["labels"])
            metadata = MatrixMetadata.from_json(data.get("metadata", {}))
            entries = {}
            for rec in data.get("entries", ()):
                row, col = str(rec["row"]), str(rec["col"])
                if row not in labels or col not in labels:
                    raise MalformedInput(f"entry ({row}, {col}) uses unknown labels")
                entries[(row, col)] = BalancedExpression.from_json(rec["expr"])
        except MalformedInput:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad restriction matrix JSON: {exc}") from exc
        return cls(labels, entries, metadata)

    @classmethod
    def load(cls, path) -> "RestrictionMatrix":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedInput(f"cannot read matrix JSON: {exc}") from exc
        return cls.from_json(data)


def _diagram_labels(matrix: RestrictionMatrix) -> dict[str, YoungDiagram] | None:
    try:
        return {l: YoungDiagram.from_string(l) for l in matrix.labels}
    except ValueError:
        return None


def validate_section(matrix: RestrictionMatrix) -> Report:
    """Per-entry section checks: balance in the equivariant and Kahler
    variables, pole separation, quasiperiod consistency, unit diagonal, and
    (for diagram labels with declared d-values or a convention) the pairing
    cross-check against the label degrees."""
    report = Report()
    variables = matrix.metadata.variables
    avars = variables.equivariant
    zvars = variables.kahler

    diagrams = _diagram_labels(matrix)
    d_of: dict[str, int] | None = None
    if matrix.metadata.d_values is not None:
        d_of = dict(matrix.metadata.d_values)
    elif diagrams is not None and matrix.metadata.convention is not None:
        d_of = {l: d_lambda(d, matrix.metadata.convention) for l, d in diagrams.items()}

    for label in matrix.labels:
        diag = matrix.entry(label, label)
        is_unit = len(diag.terms) == 1 and not diag.terms[0].numerator and not diag.terms[
            0
        ].denominator and diag.terms[0].prefactor == ONE
        report.add(
            "unit-diagonal", label, is_unit, "" if is_unit else "diagonal entry is not 1"
        )

    for (row, col), expr in sorted(matrix.entries.items()):
        if row == col or expr.is_zero:
            continue
        subject = f"({row}, {col})"
        report.add("balanced-equivariant", subject, is_balanced_in(expr, avars))
        report.add("balanced-kahler", subject, is_balanced_in(expr, zvars))
        report.add("separated-poles", subject, has_separated_poles(expr, variables))
        try:
            pairing = quasiperiod_pairing(expr, variables)
        except InconsistentBundle as exc:
            report.add("quasiperiod-consistency", subject, False, str(exc))
            continue
        report.add("quasiperiod-consistency", subject, True)
        if d_of is not None and row in d_of and col in d_of and len(avars) == 1 and len(zvars) == 1:
            expected = d_of[col] - d_of[row]
            got = pairing.get((avars[0], zvars[0]), 0)
            report.add(
                "pairing-vs-degrees",
                subject,
                got == expected,
                f"pairing {got}, degree difference {expected}",
            )
    return report


@dataclass
class KMatrixCandidate:
    """Entrywise limit of a normalized restriction matrix: rational functions
    of the equivariant variables and hbar, diagonal 1."""

    labels: tuple[str, ...]
    entries: dict[tuple[str, str], RationalExpr]

    def entry(self, row: str, col: str) -> RationalExpr:
        if row == col:
            return RationalExpr.one()
        return self.entries.get((row, col), RationalExpr.zero())

    def is_identity(self) -> bool:
        return all(
            self.entry(r, c).is_zero
            for r in self.labels
            for c in self.labels
            if r != c
        )

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "entries": [
                {"row": r, "col": c, "value": e.to_json()}
                for (r, c), e in sorted(self.entries.items())
                if not e.is_zero or r == c
            ],
        }


@dataclass
class LimitOutcome:
    matrix: KMatrixCandidate
    conjugation: DiagonalMatrices | None  # present for diagram labels
    validation: Report


def apply_limit_theorem(
    matrix: RestrictionMatrix,
    w: Rat | Mapping[str, Rat],
    chamber: KahlerChamber | str,
) -> LimitOutcome:
    """Shift, q-limit, correct, and Kahler-limit every entry.

    ``w`` may be a single rational (one equivariant variable) or a mapping
    from equivariant names to rationals.  ``chamber`` may be a KahlerChamber
    or the uniform direction 'zero' / 'infinity'.
    """
    variables = matrix.metadata.variables
    if isinstance(w, (int, Fraction)):
        if len(variables.equivariant) != 1:
            raise MalformedInput("scalar w needs exactly one equivariant variable")
        weight: Mapping[str, Rat] = {variables.equivariant[0]: Fraction(w)}
    else:
        weight = {k: Fraction(v) for k, v in w.items()}
    if isinstance(chamber, str):
        chamber = KahlerChamber.uniform(variables.kahler, chamber)

    # Kahler-side diagnostics (balance in z, pole separation, degree pairing)
    # stay report-level: synthetic sections may fail them and still have
    # perfectly good corrected limits.  Equivariant balance, bundle
    # consistency and the unit diagonal are non-negotiable.
    validation = validate_section(matrix)
    hard = ("balanced-equivariant", "quasiperiod-consistency", "unit-diagonal")
    blocking = [r for r in validation.failures() if r.name in hard]
    if blocking:
        failed = ", ".join(f"{r.name}{r.subject}" for r in blocking)
        raise MalformedInput(f"section validation failed: {failed}")

    diagrams = _diagram_labels(matrix)
    conj = None
    if diagrams is not None and matrix.metadata.convention is not None and len(weight) == 1:
        wval = next(iter(weight.values()))
        conj = conjugation_matrices(
            [diagrams[l] for l in matrix.labels], Fraction(wval), matrix.metadata.convention
        )

    entries: dict[tuple[str, str], RationalExpr] = {}
    for (row, col), expr in sorted(matrix.entries.items()):
        if row == col or expr.is_zero:
            continue
        try:
            pairing = quasiperiod_pairing(expr, variables)
            normalization, value = q_limit(expr, weight, variables)
            correction = chamber_correction(pairing, weight, normalization, chamber)
            limit = z_limit(value, chamber, correction * normalization)
        except (LimitUndefined, DivergentLimit, NormalizationMismatch) as exc:
            raise EntryLimitError(row, col, exc) from exc
        if not limit.is_zero:
            entries[(row, col)] = limit
    candidate = KMatrixCandidate(matrix.labels, entries)
    return LimitOutcome(candidate, conj, validation)


def euler_arguments(
    V: Character, weight: Mapping[str, Rat] | None = None
) -> tuple[list[ThetaArgument], list[ThetaArgument]]:
    """Theta arguments of the multiplicative Euler class of a character,
    optionally with equivariant parameters already shifted by q^w."""
    num: list[ThetaArgument] = []
    den: list[ThetaArgument] = []
    for m, mult in V.items():
        shift = m.pairing(weight) if weight else Fraction(0)
        arg = ThetaArgument(m, shift)
        (num if mult > 0 else den).extend([arg] * abs(mult))
    return num, den


def euler_ratio_limit(
    P: Character, N_minus: Character, weight: Rat | Mapping[str, Rat]
) -> RationalExpr:
    """Exact q->0 limit of Theta(N^-) / Theta(P) with a -> a q^w.

    The output is a monomial times a ratio of products of (1 - monomial)
    binomials; no q survives and no fractional equivariant exponents appear
    beyond the monomial prefactor.
    """
    if isinstance(weight, (int, Fraction)):
        weight = {"a": Fraction(weight)}
    num_n, den_n = euler_arguments(N_minus, weight)
    num_p, den_p = euler_arguments(P, weight)
    result = theta_ratio_limit(num_n + den_p, den_n + num_p)
    return result.combined()


def normal_negative(P: Character, direction: Mapping[str, Rat], hbar: str = "hbar") -> Character:
    """Repelling half of the tangent character: P_neg + hbar * conj(P_pos)."""
    pos, _, neg = P.chamber_split(direction)
    return neg + pos.conjugate().times_monomial(Monomial.variable(hbar))


class ImpureNormalization(ArithmeticError):
    """The Euler-ratio limit is not a monomial multiple of its invariant part."""


def diagonal_exponent(
    P: Character,
    weight: Rat | Mapping[str, Rat],
    direction: Mapping[str, Rat],
    hbar: str = "hbar",
) -> tuple[int, Fraction]:
    """Sign and hbar-exponent of the monomial relating the exact limit of the
    shifted Euler-class ratio to its invariant-part value:

        lim_q [Theta(N^-)/Theta(P)]|shift == sign * hbar^E * s_hat(N^-_inv)/s_hat(P_inv)

    The equality is verified by cross-multiplication; the sign always equals
    (-1)^(rank of the moving part of the index), and E has the closed form
    given by the symmetrized floor pairing of the index.
    """
    if isinstance(weight, (int, Fraction)):
        weight = {"a": Fraction(weight)}
    N_minus = normal_negative(P, direction, hbar)
    limit = euler_ratio_limit(P, N_minus, weight)
    invariant_value = (
        N_minus.invariant_part(weight).s_hat() / P.invariant_part(weight).s_hat()
    )
    span_l = limit.degree_span((hbar,))
    span_s = invariant_value.degree_span((hbar,))
    if span_l is None or span_s is None:
        raise ImpureNormalization("degenerate limit or invariant part")
    lo = span_l[0] - span_s[0]
    hi = span_l[1] - span_s[1]
    if lo != hi:
        raise ImpureNormalization(f"hbar content is not a pure power: span [{lo}, {hi}]")
    ind, _, _ = P.chamber_split(direction)
    sign = -1 if (ind.rank() - ind.invariant_part(weight).rank()) % 2 else 1
    candidate = invariant_value * RationalExpr.from_monomial(Monomial({hbar: lo}), sign)
    if not (limit == candidate):
        raise ImpureNormalization(
            "limit does not factor as a signed hbar power times the invariant value"
        )
    return sign, lo


def expected_diagonal(
    P: Character,
    weight: Rat | Mapping[str, Rat],
    direction: Mapping[str, Rat],
    hbar: str = "hbar",
) -> RationalExpr:
    """Forward-computed unnormalized diagonal of the limit class:

        Euler(conj(P^inv)) * lim_q [Theta(N^-)/Theta(P)]|shift * det(P_0)^(1/2)

    built entirely from the polarization restriction, the chamber, and w.
    """
    if isinstance(weight, (int, Fraction)):
        weight = {"a": Fraction(weight)}
    N_minus = normal_negative(P, direction, hbar)
    core = euler_ratio_limit(P, N_minus, weight)
    invariant = P.invariant_part(weight)
    euler = invariant.conjugate().exterior_euler()
    _, zero_part, _ = P.chamber_split(direction)
    det_half = zero_part.determinant().sqrt()
    return (core * euler).times_monomial(det_half)


def closed_form_diagonal(
    P: Character,
    weight: Rat | Mapping[str, Rat],
    direction: Mapping[str, Rat],
    hbar: str = "hbar",
) -> RationalExpr:
    """The closed-form diagonal (sign * hbar-power / det(ind) * Euler part).

    Kept for comparison; its monomial bookkeeping matches the forward
    computation only up to convention-dependent monomial factors, which is
    exactly what the calibration scan quantifies.
    """
    if isinstance(weight, (int, Fraction)):
        weight = {"a": Fraction(weight)}
    ind, _, _ = P.chamber_split(direction)
    ind_inv = ind.invariant_part(weight)
    sign = -1 if (ind.rank() - ind_inv.rank()) % 2 else 1
    floor_sum = ind.floor_pairing(weight)
    hbar_exp = Fraction(floor_sum) + Fraction(ind.rank(), 2)
    if hbar_exp.denominator not in (1, 2):
        raise ValueError("hbar exponent left the half-integer lattice")
    N_minus = normal_negative(P, direction, hbar)
    euler = N_minus.invariant_part(weight).conjugate().exterior_euler()
    prefactor = Monomial.variable(hbar, hbar_exp) / ind.determinant()
    return (euler * sign).times_monomial(prefactor)


def check_stab_axioms(
    candidate: KMatrixCandidate,
    metadata: MatrixMetadata,
    w: Rat | Mapping[str, Rat] | None = None,
) -> Report:
    """Structural checks on a limit candidate.

    (i)  support: triangularity with respect to the declared order;
    (ii) normalization: supplied unnormalized diagonals match the forward
         computation from the polarization data (skipped without data);
    (iii) degree window: equivariant degree spans sit inside the diagonal
         span shifted by slope-degree differences (skipped without slopes).
    """
    report = Report()
    order = metadata.order or candidate.labels
    position = {label: i for i, label in enumerate(order)}

    for (row, col), entry in sorted(candidate.entries.items()):
        if entry.is_zero:
            continue
        ok = position.get(col, -1) <= position.get(row, -1)
        report.add(
            "support-triangularity",
            f"({row}, {col})",
            ok,
            "" if ok else f"nonzero entry above the declared order ({col} after {row})",
        )

    variables = metadata.variables
    direction = (
        metadata.convention.chamber_direction(variables.equivariant[0])
        if metadata.convention is not None and len(variables.equivariant) == 1
        else None
    )
    can_forward = (
        metadata.polarizations is not None and direction is not None and w is not None
    )
    for label in candidate.labels:
        if not can_forward:
            report.add("diagonal-normalization", label, None, "needs polarizations, convention, w")
            continue
        P = metadata.polarizations.get(label)
        if P is None:
            report.add("diagonal-normalization", label, None, "no polarization supplied")
            continue
        expected = expected_diagonal(P, w, direction, variables.hbar)
        supplied = (metadata.unnormalized_diagonal or {}).get(label)
        if supplied is None:
            report.add("diagonal-normalization", label, None, "no unnormalized diagonal supplied")
            continue
        same = supplied == expected
        detail = "" if same else (
            f"supplied {supplied!r}, expected {expected!r}"
        )
        report.add("diagonal-normalization", label, same, detail)

    slopes = metadata.slopes
    for (row, col), entry in sorted(candidate.entries.items()):
        subject = f"({row}, {col})"
        if entry.is_zero:
            continue
        if slopes is None or row not in slopes or col not in slopes:
            report.add("degree-window", subject, None, "no slope data")
            continue
        if not can_forward or metadata.polarizations.get(col) is None:
            report.add("degree-window", subject, None, "needs diagonal span data")
            continue
        span = entry.degree_span(variables.equivariant)
        diag = expected_diagonal(
            metadata.polarizations[col], w, direction, variables.hbar
        )
        base = diag.degree_span(variables.equivariant)
        shift = slopes[row] - slopes[col]
        lo, hi = base[0] + shift, base[1] + shift
        ok = lo <= span[0] and span[1] <= hi
        report.add(
            "degree-window",
            subject,
            ok,
            f"span [{rat_to_str(span[0])}, {rat_to_str(span[1])}] vs window "
            f"[{rat_to_str(lo)}, {rat_to_str(hi)}]",
        )
    return report
