"""The integral hyperplane arrangement on the framing coordinates.

A rational point w sits on the hyperplanes w_i - w_j = n; those hyperplanes
cut the index set into blocks, the blocks split the framing, and the fixed
components are the ways of distributing the dimension vector across blocks.
"""

from fractions import Fraction

from stablimits import (
    Character,
    FramingPoint,
    QuiverFrame,
    active_hyperplanes,
    cyclic_order,
    enumerate_fixed_components,
    index_blocks,
    invariant_polarization_split,
    normal_character_crosses_blocks,
)
from stablimits.framing import framing_split

F = Fraction
point = FramingPoint((F(0), F(1), F(1, 2)))

print("point w =", [str(c) for c in point.coordinates])
print("active hyperplanes (i, j, n):", active_hyperplanes(point))
blocks = index_blocks(point)
print("blocks:", blocks.blocks)
print("cyclic order b:", cyclic_order(point))

# a_i/a_j appears in the normal bundle exactly across blocks
for (i, j) in ((1, 2), (1, 3)):
    crossing = normal_character_crosses_blocks(i, j, blocks)
    print(f"a{i}/a{j} crosses blocks (normal-bundle character): {crossing}")

# Tensor-product components for a one-vertex frame with 3 framing coordinates
frame = QuiverFrame((3,), (2,))
print("\nframe: framing dims", frame.framing_dims, "dimension vector", frame.dims)
print("framing split by blocks:", framing_split(frame, blocks))
components = enumerate_fixed_components(frame, blocks)
print(f"{len(components)} fixed components:")
for comp in components:
    print("  " + "  x  ".join(f"n={list(n)}" for n in comp))

# The invariance criterion in action on a polarization-like character.
P = Character.from_text("1*a1*a3^-1 + 1*a3*a1^-1 + 1*a1*a2^-1")
invariant, moving = invariant_polarization_split(P, point, ("a1", "a2", "a3"))
print("\nP                =", P.to_text())
print("invariant part   =", invariant.to_text())
print("moving part      =", moving.to_text())
