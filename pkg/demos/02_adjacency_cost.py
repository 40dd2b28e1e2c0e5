"""Score layouts with the hard adjacency cost.

Four room-type-specific charges, all distances in meters:
  entrance  -> front door
  kitchen   -> mean over its assigned entrance/dining rooms
  bathroom  -> mean over its assigned entrance/living/master/second rooms
  balcony   -> nearest preferred neighbor (kitchen/dining/living/master/
               second/study)
A plan's cost is the mean charge over all charged rooms; 0 means every
desired adjacency is satisfied. The metric is invariant under grid
isometries and scales linearly with the meters-per-cell factor.
"""

from ergoplan.dataset import SynthConfig, mirror_plan, rotate_plan, synth_plan
from ergoplan.ergocost import ergonomic_cost
from ergoplan.plan import ScaleConfig

scale = ScaleConfig(1.0)  # report in cell units for readability

good = synth_plan(7, SynthConfig(de_ergonomize_fraction=0.0))
bad = synth_plan(7, SynthConfig(de_ergonomize_fraction=1.0))

for name, plan in (("ergonomic layout", good), ("de-ergonomized twin", bad)):
    report = ergonomic_cost(plan, scale)
    print(f"\n{name}:")
    for idx, kind, charge in report.entries:
        print(f"  room {idx} {kind.name:<12} charge {charge:7.2f}")
    print(f"  total {report.total:.3f}  perfect={report.perfect}")

# The de-ergonomized twin has the same geometry; only the kitchen/bathroom
# type labels moved to far leaves, so only the cost changes.
assert {r.vertices for r in good.rooms} == {r.vertices for r in bad.rooms}

# Isometries preserve every distance exactly.
base = ergonomic_cost(bad, scale).total
print("\ncost under rotations:", [ergonomic_cost(rotate_plan(bad, k), scale).total for k in range(4)])
print("cost under mirror:   ", ergonomic_cost(mirror_plan(bad), scale).total)
assert all(ergonomic_cost(rotate_plan(bad, k), scale).total == base for k in range(4))

# Doubling the physical scale doubles the cost exactly.
assert ergonomic_cost(bad, ScaleConfig(2.0)).total == 2.0 * base
print("doubling meters-per-cell doubles the cost, exactly.")
