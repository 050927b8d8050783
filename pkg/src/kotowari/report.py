"""Benchmark result container and report rendering.

The bench subcommand measures tokenization wall time over a corpus; this
module renders the result both as delimited text (bench.tsv) and as a
matplotlib figure (bench.png) for quick visual comparison of runs.
"""

from dataclasses import dataclass
from pathlib import Path

__all__ = ["BenchReport", "format_bench_text", "write_bench_report"]


@dataclass(frozen=True, slots=True)
class BenchReport:
    corpus: str
    runs_ms: tuple  # wall time per run, milliseconds
    construction_ms: float
    token_count: int
    char_count: int

    @property
    def mean_ms(self) -> float:
        return sum(self.runs_ms) / len(self.runs_ms)

    @property
    def chars_per_sec(self) -> float:
        return self.char_count / (self.mean_ms / 1000.0)


def format_bench_text(report: BenchReport) -> str:
    lines = [f"corpus: {report.corpus} ({report.char_count} chars)"]
    lines.append(f"tagger construction: {report.construction_ms:.1f} ms")
    for i, ms in enumerate(report.runs_ms, start=1):
        lines.append(f"run {i}: {ms:.1f} ms")
    lines.append(f"mean: {report.mean_ms:.1f} ms over {len(report.runs_ms)} runs")
    lines.append(f"tokens: {report.token_count}")
    lines.append(f"throughput: {report.chars_per_sec:,.0f} chars/sec")
    return "\n".join(lines)


def write_bench_report(report: BenchReport, out_dir) -> list:
    """Write bench.tsv and bench.png into out_dir; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    tsv = out_dir / "bench.tsv"
    rows = ["run\tms"]
    rows += [f"{i}\t{ms:.3f}" for i, ms in enumerate(report.runs_ms, start=1)]
    rows.append(f"mean\t{report.mean_ms:.3f}")
    rows.append(f"construction\t{report.construction_ms:.3f}")
    rows.append(f"tokens\t{report.token_count}")
    rows.append(f"chars\t{report.char_count}")
    tsv.write_text("\n".join(rows) + "\n", encoding="utf-8")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 3.5))
    xs = range(1, len(report.runs_ms) + 1)
    ax.bar(xs, report.runs_ms, color="#4878a8")
    ax.axhline(report.mean_ms, color="#c44e52", linestyle="--",
               label=f"mean {report.mean_ms:.1f} ms")
    ax.set_xlabel("run")
    ax.set_ylabel("wall time (ms)")
    ax.set_title(f"tokenization time, {report.token_count} tokens/run")
    ax.set_xticks(list(xs))
    ax.legend()
    fig.tight_layout()
    png = out_dir / "bench.png"
    fig.savefig(png, dpi=120)
    plt.close(fig)

    return [tsv, png]
