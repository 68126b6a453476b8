"""Link-cap sweeps over the benchmark models (count-only runs)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .engine import RunConfig, enumerate_paths
from .fixtures import DEFAULT_RUN, FixtureId, builtin_model


@dataclass(frozen=True)
class BenchRow:
    cap: int
    final_paths: int | None  # None when the run did not complete
    elapsed: float | None  # seconds; None when the cap was skipped
    completed: bool


@dataclass
class BenchReport:
    model: int
    rows: list[BenchRow] = field(default_factory=list)

    @property
    def completed(self) -> bool:
        return all(r.completed for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cap", "final_paths", "elapsed_ms", "completed"])
        for r in self.rows:
            w.writerow(
                [
                    r.cap,
                    "" if r.final_paths is None else r.final_paths,
                    "" if r.elapsed is None else f"{r.elapsed * 1000:.1f}",
                    "true" if r.completed else "false",
                ]
            )
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"model {self.model}", f"{'link cap':>8}  {'final paths':>12}  elapsed"]
        for r in self.rows:
            if r.completed:
                lines.append(f"{r.cap:>8}  {r.final_paths:>12}  {r.elapsed:.3f} s")
            elif r.elapsed is None:
                lines.append(f"{r.cap:>8}  {'did not complete':>12}  (skipped)")
            else:
                lines.append(f"{r.cap:>8}  {'did not complete':>12}  > {r.elapsed:.3f} s")
        return "\n".join(lines) + "\n"


def run_bench(model: int, caps: range, timeout: float | None = None) -> BenchReport:
    """Count final paths for each cap. Once a cap times out, larger caps are skipped."""
    fixture = FixtureId(f"model{model}")
    net = builtin_model(fixture)
    start, end = DEFAULT_RUN[fixture]
    report = BenchReport(model)
    timed_out = False
    for cap in caps:
        if timed_out:
            report.rows.append(BenchRow(cap, None, None, False))
            continue
        cfg = RunConfig(start, end, cap, trace_enabled=False, count_only=True, timeout=timeout)
        stats = enumerate_paths(net, cfg).stats
        if stats.completed:
            report.rows.append(BenchRow(cap, stats.final_paths, stats.elapsed, True))
        else:
            report.rows.append(BenchRow(cap, None, stats.elapsed, False))
            timed_out = True
    return report
