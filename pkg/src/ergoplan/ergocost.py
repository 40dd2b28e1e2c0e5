"""Hard (non-differentiable) ergonomic cost of a floor plan.

Four distance-based terms, all in meters:
  * each entrance room is charged its distance to the front door;
  * each entrance/dining room is assigned to its nearest kitchen, and each
    kitchen is charged the mean distance to its assigned rooms;
  * bathrooms likewise, with entrance/living/master/second rooms as clients;
  * each balcony is charged its minimum distance to any preferred neighbor.
The total is the mean charge over all charged rooms; zero means every
desired adjacency is satisfied exactly.
"""

import json
from dataclasses import dataclass

from .geometry import min_distance
from .plan import RoomType, ScaleConfig, rooms_of_type

KITCHEN_CLIENTS = (RoomType.Entrance, RoomType.DiningRoom)
BATHROOM_CLIENTS = (
    RoomType.Entrance,
    RoomType.LivingRoom,
    RoomType.MasterRoom,
    RoomType.SecondRoom,
)
BALCONY_NEIGHBORS = (
    RoomType.Kitchen,
    RoomType.DiningRoom,
    RoomType.LivingRoom,
    RoomType.MasterRoom,
    RoomType.SecondRoom,
    RoomType.StudyRoom,
)

TERMS = ("entrances", "kitchens", "bathrooms", "balconies")


@dataclass(frozen=True)
class ErgoReport:
    """Per-room cost entries plus the plan-level mean."""

    entries: tuple  # of (room_index, RoomType, cost_meters)
    applicable_terms: dict  # term name -> bool
    total: float | None  # None when no term applies
    perfect: bool

    @property
    def applicable(self):
        return self.total is not None

    def to_dict(self):
        return {
            "rooms": [
                {"index": i, "type": kind.name, "cost": cost}
                for i, kind, cost in self.entries
            ],
            "applicable_terms": dict(self.applicable_terms),
            "total": self.total,
            "perfect": self.perfect,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _client_indices(plan, client_types):
    out = []
    for kind in client_types:
        out.extend(rooms_of_type(plan, kind))
    return sorted(out)


def nearest_assignment(plan, client_types, target_type, scale):
    """Map each client room index to its nearest target room index.

    Ties break toward the lowest target index in plan order, which keeps the
    assignment deterministic.
    """
    targets = rooms_of_type(plan, target_type)
    assignment = {}
    if not targets:
        return assignment
    for ci in _client_indices(plan, client_types):
        best = min(
            targets, key=lambda ti: (min_distance(plan.rooms[ci], plan.rooms[ti], scale), ti)
        )
        assignment[ci] = best
    return assignment


def entrance_cost(plan, scale=None):
    """[(entrance_index, meters to the front door)] for every entrance room."""
    scale = scale or ScaleConfig()
    return [
        (i, min_distance(plan.rooms[i], plan.door, scale))
        for i in rooms_of_type(plan, RoomType.Entrance)
    ]


def _assigned_cost(plan, client_types, target_type, scale):
    assignment = nearest_assignment(plan, client_types, target_type, scale)
    per_target = {}
    for ci, ti in assignment.items():
        per_target.setdefault(ti, []).append(ci)
    out = []
    for ti in rooms_of_type(plan, target_type):
        clients = per_target.get(ti)
        if not clients:  # unassigned targets carry no charge and are omitted
            continue
        dists = [min_distance(plan.rooms[ti], plan.rooms[ci], scale) for ci in clients]
        out.append((ti, sum(dists) / len(dists)))
    return out


def kitchen_cost(plan, scale=None):
    """[(kitchen_index, mean meters to its assigned entrance/dining rooms)]."""
    return _assigned_cost(plan, KITCHEN_CLIENTS, RoomType.Kitchen, scale or ScaleConfig())


def bathroom_cost(plan, scale=None):
    """[(bathroom_index, mean meters to its assigned client rooms)]."""
    return _assigned_cost(plan, BATHROOM_CLIENTS, RoomType.Bathroom, scale or ScaleConfig())


def balcony_cost(plan, scale=None):
    """[(balcony_index, meters to the nearest preferred neighbor room)].

    Empty when the plan has no room of a preferred neighbor type.
    """
    scale = scale or ScaleConfig()
    neighbor_indices = _client_indices(plan, BALCONY_NEIGHBORS)
    if not neighbor_indices:
        return []
    return [
        (
            bi,
            min(min_distance(plan.rooms[bi], plan.rooms[ni], scale) for ni in neighbor_indices),
        )
        for bi in rooms_of_type(plan, RoomType.Balcony)
    ]


def ergonomic_cost(plan, scale=None):
    """Full ErgoReport: the mean per-room charge over all four terms."""
    scale = scale or ScaleConfig()
    per_term = {
        "entrances": entrance_cost(plan, scale),
        "kitchens": kitchen_cost(plan, scale),
        "bathrooms": bathroom_cost(plan, scale),
        "balconies": balcony_cost(plan, scale),
    }
    entries = []
    for term in TERMS:
        for idx, cost in per_term[term]:
            entries.append((idx, plan.rooms[idx].kind, cost))
    applicable = {term: bool(per_term[term]) for term in TERMS}
    if entries:
        total = sum(cost for _, _, cost in entries) / len(entries)
    else:
        total = None
    return ErgoReport(
        entries=tuple(entries),
        applicable_terms=applicable,
        total=total,
        perfect=(total == 0.0),
    )
