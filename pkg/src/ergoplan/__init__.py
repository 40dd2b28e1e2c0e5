"""Ergonomics-guided floor-plan generation toolkit.

Submodules:
  plan       domain types, validation, JSON (de)serialization
  geometry   exact rectilinear kernels (areas, distances, decomposition)
  ergocost   hard adjacency cost metric and per-plan report
  ergoloss   differentiable soft-distance loss with exact gradients
  tokenizer  plan <-> token sequence codec with auxiliary index streams
  guidance   expected-token substitution and dynamic loss mixing
  model      numpy decoder-only transformer, training, generation
  dataset    corpora, deterministic splits, augmentation, synthesis
  metrics    generation-quality evaluation suite
  render     SVG output
  cli        command-line entry point
"""

from .plan import (
    DEFAULT_METERS_PER_CELL,
    DoorSegment,
    FloorPlan,
    RoomPolygon,
    RoomType,
    ScaleConfig,
    deserialize_plan,
    normalize_plan,
    normalize_polygon,
    serialize_plan,
    validate_plan,
)

__all__ = [
    "DEFAULT_METERS_PER_CELL",
    "DoorSegment",
    "FloorPlan",
    "RoomPolygon",
    "RoomType",
    "ScaleConfig",
    "deserialize_plan",
    "normalize_plan",
    "normalize_polygon",
    "serialize_plan",
    "validate_plan",
]

__version__ = "0.1.0"
