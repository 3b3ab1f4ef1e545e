"""Experiment sweeps: the Cartesian product of counts, fractions,
strategies and seeds, one independent run per cell, CSV outputs and an
emitted gnuplot script for reliability-vs-vehicle-count figures."""

from __future__ import annotations

import dataclasses
import multiprocessing
from dataclasses import dataclass
from pathlib import Path

import yaml

from .config import ScenarioConfig, load_config
from .engine import log, run_single, write_run_outputs
from .metrics import SUMMARY_HEADER, summary_row
from .model import Strategy, ValidationReport


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    vehicle_counts: tuple[int, ...] = (10, 20, 30)
    connected_fractions: tuple[float, ...] = (1.0, 0.5)
    strategies: tuple[Strategy, ...] = tuple(Strategy)
    seeds: tuple[int, ...] = tuple(range(1, 11))

    def validate(self) -> ValidationReport:
        bad = []
        for name in ("vehicle_counts", "connected_fractions", "strategies", "seeds"):
            if not getattr(self, name):
                bad.append((name, "must not be empty"))
        return ValidationReport(tuple(bad))

    def cells(self) -> list["SweepCell"]:
        out = []
        for count in self.vehicle_counts:
            for fraction in self.connected_fractions:
                for strategy in self.strategies:
                    for seed in self.seeds:
                        out.append(SweepCell(self.base, count, fraction, strategy, seed))
        return out


@dataclass(frozen=True)
class SweepCell:
    base: ScenarioConfig
    vehicle_count: int
    connected_fraction: float
    strategy: Strategy
    seed: int

    @property
    def cell_id(self) -> str:
        return (
            f"{self.strategy.value}_n{self.vehicle_count}"
            f"_f{self.connected_fraction:g}_s{self.seed}"
        )

    def config(self) -> ScenarioConfig:
        return dataclasses.replace(
            self.base,
            vehicle_count=self.vehicle_count,
            connected_fraction=self.connected_fraction,
            strategy=self.strategy,
            seed=self.seed,
        )


class SweepCellError(RuntimeError):
    def __init__(self, cell_id: str, cause: Exception):
        super().__init__(f"sweep cell {cell_id} failed: {cause}")
        self.cell_id = cell_id


def load_sweep_spec(path: str | Path) -> SweepSpec:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    allowed = {"base_config", "vehicle_counts", "connected_fractions", "strategies", "seeds"}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ValueError(f"unknown sweep key(s): {', '.join(unknown)}")
    if "base_config" not in data:
        raise ValueError("sweep spec needs base_config: <path to scenario file>")
    base_path = Path(path).parent / str(data["base_config"])
    base = load_config(base_path)
    spec = SweepSpec(base)
    if "vehicle_counts" in data:
        spec = dataclasses.replace(spec, vehicle_counts=tuple(int(v) for v in data["vehicle_counts"]))
    if "connected_fractions" in data:
        spec = dataclasses.replace(
            spec, connected_fractions=tuple(float(v) for v in data["connected_fractions"])
        )
    if "strategies" in data:
        spec = dataclasses.replace(
            spec, strategies=tuple(Strategy(str(s).lower()) for s in data["strategies"])
        )
    if "seeds" in data:
        spec = dataclasses.replace(spec, seeds=tuple(int(s) for s in data["seeds"]))
    return spec


def _run_cell(args: tuple[SweepCell, str]) -> tuple[str, str]:
    """Worker: run one cell, write its detail file, return the summary row."""
    cell, out_dir = args
    config = cell.config()
    result = run_single(config)
    write_run_outputs(result, config, out_dir, cell.cell_id)
    row = summary_row(result, cell.vehicle_count, cell.connected_fraction, cell.seed)
    return cell.cell_id, row


def run_sweep(spec: SweepSpec, out_dir: str | Path, jobs: int = 1) -> list[str]:
    """Run every cell, write summary.csv, detail files and plots.gp.

    Cells are independent; with ``jobs`` > 1 they run in parallel but the
    summary keeps product order, so output bytes do not depend on jobs.
    A failing cell aborts the sweep (completed detail files are kept) and
    raises SweepCellError naming the cell.
    """
    report = spec.validate()
    if not report.ok:
        raise ValueError(str(report))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = spec.cells()
    work = [(cell, str(out)) for cell in cells]

    rows: list[str] = []
    if jobs <= 1:
        for cell, args in zip(cells, work):
            log(f"running {cell.cell_id}")
            try:
                _, row = _run_cell(args)
            except Exception as exc:  # preserve completed outputs, name the cell
                raise SweepCellError(cell.cell_id, exc) from exc
            rows.append(row)
    else:
        with multiprocessing.Pool(processes=jobs) as pool:
            try:
                for cell_id, row in pool.imap(_run_cell, work):
                    log(f"finished {cell_id}")
                    rows.append(row)
            except Exception as exc:
                done = len(rows)
                failing = cells[done].cell_id if done < len(cells) else "unknown"
                raise SweepCellError(failing, exc) from exc

    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as f:
        f.write(SUMMARY_HEADER)
        f.writelines(rows)
    _write_plot_assets(rows, out)
    return rows


def _write_plot_assets(rows: list[str], out: Path) -> None:
    """Aggregate seed means and emit a gnuplot script next to them."""
    sums: dict[tuple[float, str, int], list[float]] = {}
    for row in rows:
        parts = row.strip().split(",")
        strategy, count, fraction, reliability = (
            parts[0],
            int(parts[1]),
            float(parts[2]),
            float(parts[4]),
        )
        sums.setdefault((fraction, strategy, count), []).append(reliability)

    fractions = sorted({k[0] for k in sums})
    strategies = sorted({k[1] for k in sums})
    with open(out / "plot_means.csv", "w", encoding="utf-8", newline="") as f:
        f.write("connected_fraction,strategy,vehicle_count,mean_reliability\n")
        for (fraction, strategy, count) in sorted(sums):
            vals = sums[(fraction, strategy, count)]
            f.write(f"{fraction!r},{strategy},{count},{sum(vals) / len(vals)!r}\n")

    lines = [
        "# reliability vs vehicle count, one panel per connected fraction",
        "# usage: gnuplot plots.gp  (writes plots.png)",
        "set datafile separator ','",
        "set terminal pngcairo size 1200,500",
        "set output 'plots.png'",
        "set key bottom left",
        "set yrange [0:1.05]",
        "set xlabel 'number of vehicles'",
        "set ylabel 'reliability'",
        f"set multiplot layout 1,{len(fractions)}",
    ]
    for fraction in fractions:
        lines.append(f"set title 'connected fraction {fraction:g}'")
        plots = []
        for strategy in strategies:
            cond = f"(strcol(2) eq '{strategy}' && column(1) == {fraction!r})"
            plots.append(
                f"'plot_means.csv' using ($3):({cond} ? $4 : 1/0) "
                f"with linespoints title '{strategy}'"
            )
        lines.append("plot \\\n  " + ", \\\n  ".join(plots))
    lines.append("unset multiplot")
    with open(out / "plots.gp", "w", encoding="utf-8", newline="") as f:
        f.write("\n".join(lines) + "\n")
