"""Render a small gallery of synthetic plans to SVG files.

Each room type has a fixed fill color; the door is the thick red tick on
the boundary. Output lands in demos/out/.
"""

from pathlib import Path

from ergoplan.dataset import SynthConfig, synth_plan
from ergoplan.ergocost import ergonomic_cost
from ergoplan.render import render_svg

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

for seed in range(6):
    clean = synth_plan(seed, SynthConfig(de_ergonomize_fraction=0.0))
    messy = synth_plan(seed, SynthConfig(de_ergonomize_fraction=1.0))
    for label, plan in (("clean", clean), ("messy", messy)):
        path = out_dir / f"plan-{seed}-{label}.svg"
        path.write_text(render_svg(plan))
        cost = ergonomic_cost(plan).total
        print(f"{path.name}: {len(plan.rooms)} rooms, cost {cost:.3f} m")
print(f"\nwrote {2 * 6} files to {out_dir}/")
