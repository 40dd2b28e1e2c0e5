"""Build a floor plan by hand and poke at the exact geometry kernels.

Plans live on an integer cell grid. The boundary and every room are
rectilinear vertex loops; the front door is an axis-aligned segment on the
boundary. All the geometric predicates below run in exact integer
arithmetic, so areas and containment questions have exact answers.
"""

from ergoplan import geometry
from ergoplan.plan import (
    DoorSegment,
    FloorPlan,
    RoomPolygon,
    RoomType,
    ScaleConfig,
    serialize_plan,
    validate_plan,
)

# An L-shaped apartment: the boundary is a 24x24 square with the top-right
# 8x8 corner bitten off.
boundary = ((0, 0), (24, 0), (24, 16), (16, 16), (16, 24), (0, 24))

plan = FloorPlan(
    resolution=256,
    boundary=boundary,
    door=DoorSegment((0, 4), (0, 8)),
    rooms=(
        RoomPolygon(RoomType.Entrance, ((0, 0), (8, 0), (8, 8), (0, 8))),
        RoomPolygon(RoomType.Kitchen, ((8, 0), (24, 0), (24, 8), (8, 8))),
        RoomPolygon(RoomType.LivingRoom, ((0, 8), (16, 8), (16, 24), (0, 24))),
        RoomPolygon(RoomType.Bathroom, ((16, 8), (24, 8), (24, 16), (16, 16))),
    ),
)
validate_plan(plan)
print("the plan as JSON:")
print(serialize_plan(plan))

# Areas come from the shoelace formula; the boundary splits into slabs of
# axis-aligned rectangles whose areas always add up exactly.
print("\nboundary area:", geometry.polygon_area(plan.boundary), "cells^2")
rects = geometry.rect_decompose(plan.boundary)
print("slab decomposition:", rects)
print("decomposed area:  ", sum((x1 - x0) * (y1 - y0) for x0, y0, x1, y1 in rects))

# The rooms tile the apartment: full coverage, zero overlap.
print("\nrooms union: ", geometry.union_area(plan.rooms), "cells^2")
print("rooms overlap:", geometry.pairwise_overlap_area(plan.rooms), "cells^2")

# Distances are boundary-to-boundary minima, zero on contact. The scale
# config converts cells to meters only at the very end.
scale = ScaleConfig()  # ~0.07 m per cell
entrance, kitchen, bathroom = plan.rooms[0], plan.rooms[1], plan.rooms[3]
print("\nentrance-kitchen distance: ", geometry.min_distance(entrance, kitchen, scale), "m (adjacent)")
print("entrance-bathroom distance:", round(geometry.min_distance(entrance, bathroom, scale), 3), "m")
print("entrance-door distance:    ", geometry.min_distance(entrance, plan.door, scale), "m")
