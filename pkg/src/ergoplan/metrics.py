"""Evaluation metrics over generated token sequences.

Per sequence: does it parse; are all polygons geometrically valid; do the
rooms cover the boundary; do rooms avoid overlapping; and the adjacency
cost plus its zero-cost rate. Binary metrics are computed per plan and
averaged. Denominators differ by metric and are reported alongside the
fractions: parsability over all sequences, the geometric checks over
parsed plans, the cost metrics over parsed valid plans where a cost term
applies.
"""

import json
import math
from dataclasses import dataclass, field

from . import ergocost, geometry, tokenizer
from .errors import ErgoplanError, ProtocolMismatch
from .plan import ScaleConfig


@dataclass(frozen=True)
class EvalConfig:
    resolution: int = 256
    scale: ScaleConfig = field(default_factory=ScaleConfig)
    coverage_tolerance: float = 0.02  # allowed uncovered interior fraction
    overlap_tolerance: float = 0.0  # allowed overlap, fraction of boundary area


@dataclass(frozen=True)
class EvalReport:
    parsability: float
    validity: float
    fully_covered: float
    no_room_overlapping: float
    ergonomic_cost: float | None
    perfect_ergonomic: float | None
    n_sequences: int
    n_parsed: int
    n_valid: int
    n_cost_applicable: int
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "parsability": self.parsability,
            "validity": self.validity,
            "fully_covered": self.fully_covered,
            "no_room_overlapping": self.no_room_overlapping,
            "ergonomic_cost": self.ergonomic_cost,
            "perfect_ergonomic": self.perfect_ergonomic,
            "counts": {
                "sequences": self.n_sequences,
                "parsed": self.n_parsed,
                "valid": self.n_valid,
                "cost_applicable": self.n_cost_applicable,
            },
            "config": self.config,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_markdown(self):
        rows = [
            ("Parsability", self.parsability, f"over {self.n_sequences} sequences"),
            ("Validity", self.validity, f"over {self.n_parsed} parsed"),
            ("Fully covered", self.fully_covered, f"over {self.n_parsed} parsed"),
            ("No room overlapping", self.no_room_overlapping, f"over {self.n_parsed} parsed"),
            (
                "Ergonomic cost [m]",
                self.ergonomic_cost,
                f"over {self.n_cost_applicable} applicable",
            ),
            ("Perfect ergonomic", self.perfect_ergonomic, f"over {self.n_cost_applicable} applicable"),
        ]
        lines = ["| metric | value | denominator |", "| --- | --- | --- |"]
        for name, value, denom in rows:
            shown = "n/a" if value is None else f"{value:.4f}"
            lines.append(f"| {name} | {shown} | {denom} |")
        return "\n".join(lines)


def plan_is_valid(plan):
    """All polygons (boundary and rooms) rectilinear, simple, nonzero area."""
    try:
        geometry.normalize_loop(plan.boundary)
        for room in plan.rooms:
            geometry.normalize_loop(room.vertices)
    except ErgoplanError:
        return False
    return True


def plan_coverage(plan):
    """(covered_fraction, overlap_fraction) of the boundary area."""
    boundary_area = geometry.polygon_area(plan.boundary)
    union = geometry.union_area(plan.rooms)
    overlap = geometry.pairwise_overlap_area(plan.rooms)
    return union / boundary_area, overlap / boundary_area


def _tally(sequences, cfg):
    """Per-chunk metric counters; merging tallies is order-independent
    except for the cost sums, which we keep in chunk order."""
    vocab = tokenizer.Vocabulary(cfg.resolution)
    tally = {
        "n": len(sequences),
        "parsed": 0,
        "valid": 0,
        "covered": 0,
        "no_overlap": 0,
        "costs": [],
        "perfect": 0,
    }
    for seq in sequences:
        outcome = tokenizer.decode(seq, vocab)
        if not outcome.ok:
            continue
        plan = outcome.plan
        tally["parsed"] += 1
        if not plan_is_valid(plan):
            # geometric checks cannot be computed; they count as failed
            continue
        tally["valid"] += 1
        covered, overlap = plan_coverage(plan)
        tally["covered"] += covered >= 1.0 - cfg.coverage_tolerance
        tally["no_overlap"] += overlap <= cfg.overlap_tolerance
        report = ergocost.ergonomic_cost(plan, cfg.scale)
        if report.total is not None:
            tally["costs"].append(report.total)
            tally["perfect"] += report.perfect
    return tally


def evaluate(sequences, cfg=None, reference_boundaries=None, threads=1):
    """EvalReport over raw token sequences (lists of ids or TokenSequences).

    reference_boundaries, when given, must match the corpus length; it is a
    protocol check for conditioned generation runs and is echoed in the
    report config. threads > 1 evaluates fixed chunks in a process pool and
    merges in chunk order, so results are identical to a serial run.
    """
    cfg = cfg or EvalConfig()
    if reference_boundaries is not None and len(reference_boundaries) != len(sequences):
        raise ProtocolMismatch(
            f"{len(sequences)} sequences vs {len(reference_boundaries)} reference boundaries"
        )
    sequences = [list(getattr(s, "tokens", s)) for s in sequences]
    n = len(sequences)
    if threads > 1 and n > 1:
        from concurrent.futures import ProcessPoolExecutor

        chunk = (n + threads - 1) // threads
        parts = [sequences[i : i + chunk] for i in range(0, n, chunk)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(_tally, parts, [cfg] * len(parts)))
    else:
        tallies = [_tally(sequences, cfg)]

    merged = {
        "n": sum(t["n"] for t in tallies),
        "parsed": sum(t["parsed"] for t in tallies),
        "valid": sum(t["valid"] for t in tallies),
        "covered": sum(t["covered"] for t in tallies),
        "no_overlap": sum(t["no_overlap"] for t in tallies),
        "costs": [c for t in tallies for c in t["costs"]],
        "perfect": sum(t["perfect"] for t in tallies),
    }
    n_parsed = merged["parsed"]
    costs = merged["costs"]
    return EvalReport(
        parsability=n_parsed / n if n else 0.0,
        validity=merged["valid"] / n_parsed if n_parsed else 0.0,
        fully_covered=merged["covered"] / n_parsed if n_parsed else 0.0,
        no_room_overlapping=merged["no_overlap"] / n_parsed if n_parsed else 0.0,
        # exact summation keeps the report identical under corpus reordering
        ergonomic_cost=math.fsum(costs) / len(costs) if costs else None,
        perfect_ergonomic=merged["perfect"] / len(costs) if costs else None,
        n_sequences=n,
        n_parsed=n_parsed,
        n_valid=merged["valid"],
        n_cost_applicable=len(costs),
        config={
            "resolution": cfg.resolution,
            "meters_per_cell": cfg.scale.meters_per_cell,
            "coverage_tolerance": cfg.coverage_tolerance,
            "overlap_tolerance": cfg.overlap_tolerance,
            "conditioned": reference_boundaries is not None,
        },
    )


_HIGHER_BETTER = (
    "parsability",
    "validity",
    "fully_covered",
    "no_room_overlapping",
    "perfect_ergonomic",
)


def compare(report_a, report_b):
    """Signed per-metric deltas (b minus a), with ergonomic cost negated so
    that positive always means b improves on a. Raises ProtocolMismatch when
    the corpora or configs differ."""
    if report_a.n_sequences != report_b.n_sequences:
        raise ProtocolMismatch(
            f"corpus sizes differ: {report_a.n_sequences} vs {report_b.n_sequences}"
        )
    if report_a.config != report_b.config:
        raise ProtocolMismatch("evaluation configs differ")
    deltas = {}
    for name in _HIGHER_BETTER:
        va, vb = getattr(report_a, name), getattr(report_b, name)
        deltas[name] = None if va is None or vb is None else vb - va
    ca, cb = report_a.ergonomic_cost, report_b.ergonomic_cost
    deltas["ergonomic_cost_improvement"] = None if ca is None or cb is None else ca - cb
    return deltas
