"""End to end: a restriction matrix through validation, the double limit,
and the structural checks, with the JSON interchange format.

The matrix is synthetic (unit diagonal, one off-diagonal balanced entry with
diagram labels), small enough that every number can be checked by hand.
"""

import json
from fractions import Fraction

from stablimits import (
    BalancedExpression,
    ConventionSet,
    MatrixMetadata,
    RestrictionMatrix,
    VariableSet,
    YoungDiagram,
    apply_limit_theorem,
    check_stab_axioms,
    expected_diagonal,
    polarization,
    theta,
    validate_section,
)

VARS = VariableSet(("a",), "hbar", ("z",))
conv = ConventionSet("i-j", "neg")
half = Fraction(1, 2)

# Labels are diagrams; d("2") = -1 and d("1,1") = +1, so the entry at
# (row "2", col "1,1") must carry quasiperiod pairing d_col - d_row = 2.
P2 = polarization(YoungDiagram((2,)), conv)
P11 = polarization(YoungDiagram((1, 1)), conv)
direction = conv.chamber_direction()
meta = MatrixMetadata(
    variables=VARS,
    convention=conv,
    order=("1,1", "2"),
    polarizations={"2": P2, "1,1": P11},
    unnormalized_diagonal={
        "2": expected_diagonal(P2, half, direction),
        "1,1": expected_diagonal(P11, half, direction),
    },
)
matrix = RestrictionMatrix.identity(("1,1", "2"), meta)
matrix.entries[("2", "1,1")] = BalancedExpression.single(
    (theta({"a": 1, "z": 2}),),
    (theta({"a": 1}), theta({"z": 2})),
)

report = validate_section(matrix)
print("validation:")
for rec in report.records:
    status = {True: "pass", False: "FAIL", None: "skip"}[rec.passed]
    print(f"  [{status}] {rec.name} {rec.subject}")

outcome = apply_limit_theorem(matrix, half, "zero")
print("\nlimit at w = 1/2, chamber z -> 0:")
for (row, col), value in sorted(outcome.matrix.entries.items()):
    print(f"  K[{row}, {col}] = {value}")
print("  (all other off-diagonal entries are zero, diagonal is 1)")
print("conjugation data:", json.dumps(outcome.conjugation.to_json(), indent=2))

axioms = check_stab_axioms(outcome.matrix, meta, half)
print("\naxiom checks:")
for rec in axioms.records:
    status = {True: "pass", False: "FAIL", None: "skip"}[rec.passed]
    print(f"  [{status}] {rec.name} {rec.subject} {rec.detail}")

# The JSON interchange format round-trips exactly; the same file drives the
# command line:  stablimits limit-apply --input matrix.json --w 1/2 --chamber zero
blob = matrix.to_json()
assert RestrictionMatrix.from_json(blob).to_json() == blob
print("\nmatrix JSON (for the CLI):")
print(json.dumps(blob, indent=2)[:400], "...")
