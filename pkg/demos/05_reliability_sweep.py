"""
Reliability versus vehicle count
================================

A miniature experiment matrix: three strategies across two densities and
a couple of seeds, written out as summary/detail CSVs plus a gnuplot
script. The full-scale matrix just uses more counts, seeds and runtime.
"""

import tempfile
from pathlib import Path

from twinroute import SweepSpec, Strategy, default_config, run_sweep

spec = SweepSpec(
    base=default_config(duration=60.0, connected_fraction=0.5),
    vehicle_counts=(10, 25),
    connected_fractions=(0.5,),
    strategies=tuple(Strategy),
    seeds=(1, 2),
)

out_dir = Path(tempfile.mkdtemp(prefix="twinroute-sweep-"))
rows = run_sweep(spec, out_dir)

print(f"{len(rows)} cells -> {out_dir}/summary.csv")
print((out_dir / "summary.csv").read_text().strip())
print(f"\nper-timestep files in {out_dir}/detail/, plot via: gnuplot {out_dir}/plots.gp")
