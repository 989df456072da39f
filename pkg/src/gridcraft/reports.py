"""Corpus-level reporting: acquisition-order graphs and episode-length
histograms, with CSV and SVG emission.

Both reports are pure functions of the logs (each log is replayed through
``annotate``), so a corpus always yields the same tables and figures.
"""
from __future__ import annotations

import csv
import statistics
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .errors import ConfigurationError
from .evaluation import ScoreReport
from .tasks import TaskSpec
from .trajectory import PLAYER_SCRIPTED, TrajectoryLog, annotate
from .world import ItemId


@dataclass(frozen=True)
class PrecedenceGraph:
    """How often item A's first acquisition immediately preceded item B's."""

    nodes: frozenset[ItemId]
    edge_counts: dict[tuple[ItemId, ItemId], int]


@dataclass(frozen=True)
class LengthHistogram:
    bin_width: int
    counts: dict[int, int]  # bin lower bound (inclusive) -> number of logs
    expert_threshold: float


def precedence_graph(logs: list[TrajectoryLog],
                     spec: TaskSpec | None = None) -> PrecedenceGraph:
    """Count consecutive first-acquisition pairs across a corpus.

    Each log's milestones are sorted by tick; every adjacent pair (A, B)
    increments the A->B edge. Logs with fewer than two milestones add no
    edges (a single milestone still registers its node).
    """
    if not logs:
        raise ConfigurationError("precedence graph needs a non-empty corpus")
    nodes: set[ItemId] = set()
    edges: dict[tuple[ItemId, ItemId], int] = {}
    for log in logs:
        milestones = annotate(log, spec).milestones  # already tick-ordered
        nodes.update(item for item, _ in milestones)
        for (a, _), (b, _) in zip(milestones, milestones[1:]):
            edges[a, b] = edges.get((a, b), 0) + 1
    return PrecedenceGraph(frozenset(nodes), edges)


def length_histogram(logs: list[TrajectoryLog], bin_width: int
                     ) -> LengthHistogram:
    """Bin episode durations; flag the scripted-play duration ceiling.

    The threshold is 1.5x the median duration of scripted-player logs
    (0.0 when the corpus has none): anything longer is taken to be
    meaningfully slower than scripted play.
    """
    if not logs:
        raise ConfigurationError("length histogram needs a non-empty corpus")
    if bin_width <= 0:
        raise ConfigurationError(f"bin width must be positive, got {bin_width}")
    counts: dict[int, int] = {}
    scripted: list[int] = []
    for log in logs:
        duration = len(log.actions)
        start = (duration // bin_width) * bin_width
        counts[start] = counts.get(start, 0) + 1
        if log.player_kind == PLAYER_SCRIPTED:
            scripted.append(duration)
    threshold = 1.5 * statistics.median(scripted) if scripted else 0.0
    return LengthHistogram(bin_width, counts, threshold)


# --- CSV emission -------------------------------------------------------------


def write_precedence_csv(graph: PrecedenceGraph, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "target", "count"])
        for (a, b), count in sorted(graph.edge_counts.items()):
            writer.writerow([ItemId(a).name, ItemId(b).name, count])


def write_histogram_csv(hist: LengthHistogram, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_start", "bin_end", "count"])
        for start in sorted(hist.counts):
            writer.writerow([start, start + hist.bin_width,
                             hist.counts[start]])


def write_curve_csv(curve: list[tuple[int, float]], path) -> None:
    """Learning curve as (samples, mean_score) rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["samples", "mean_score"])
        for samples, mean_score in curve:
            writer.writerow([samples, f"{mean_score:.6f}"])


def read_curve_csv(path) -> list[tuple[int, float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return [(int(s), float(m)) for s, m in rows[1:]]


def write_leaderboard_csv(entries: list[tuple[str, ScoreReport]], path
                          ) -> None:
    """Ranked entries as (entry, mean, std, tie_break_episode, samples)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entry", "mean", "std", "tie_break_episode",
                         "samples"])
        for name, report in entries:
            writer.writerow([name, f"{report.mean:.6f}", f"{report.std:.6f}",
                             report.tie_break_episode,
                             report.samples_consumed_training])


# --- SVG figures --------------------------------------------------------------


def render_precedence_svg(graph: PrecedenceGraph, path) -> None:
    """Acquisition-order heatmap: rows are the earlier item, columns the
    later one, cell text the pair count."""
    items = sorted(graph.nodes)
    names = [ItemId(i).name for i in items]
    n = max(len(items), 1)
    matrix = [[graph.edge_counts.get((a, b), 0) for b in items]
              for a in items]
    fig, ax = plt.subplots(figsize=(1.0 + 0.55 * n, 1.0 + 0.55 * n))
    ax.imshow(matrix or [[0]], cmap="viridis")
    ax.set_xticks(range(len(items)), names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(items)), names, fontsize=7)
    ax.set_xlabel("item acquired next")
    ax.set_ylabel("item acquired first")
    for i in range(len(items)):
        for j in range(len(items)):
            if matrix[i][j]:
                ax.text(j, i, str(matrix[i][j]), ha="center", va="center",
                        color="white", fontsize=6)
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)


def render_histogram_svg(hist: LengthHistogram, path) -> None:
    starts = sorted(hist.counts)
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar([s + hist.bin_width / 2 for s in starts],
           [hist.counts[s] for s in starts],
           width=hist.bin_width * 0.9, color="#4878a8")
    if hist.expert_threshold > 0:
        ax.axvline(hist.expert_threshold, color="#b04030", linestyle="--",
                   label=f"scripted-play ceiling ({hist.expert_threshold:.0f})")
        ax.legend(fontsize=8)
    ax.set_xlabel("episode length (ticks)")
    ax.set_ylabel("episodes")
    fig.tight_layout()
    fig.savefig(Path(path), format="svg")
    plt.close(fig)
