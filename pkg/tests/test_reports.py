"""Acquisition-order graphs, length histograms, and their CSV/SVG emission."""
from __future__ import annotations

import csv

import pytest

from gridcraft.agents import ScriptedExpert
from gridcraft.errors import ConfigurationError
from gridcraft.reports import (
    length_histogram,
    precedence_graph,
    read_curve_csv,
    render_histogram_svg,
    render_precedence_svg,
    write_curve_csv,
    write_histogram_csv,
    write_leaderboard_csv,
    write_precedence_csv,
)
from gridcraft.evaluation import ScoreReport
from gridcraft.tasks import IRON_PICKAXE_SCHEDULE, TaskId, make_task
from gridcraft.trajectory import PLAYER_SCRIPTED, annotate, record
from gridcraft.world import Action, ItemId

TREECHOP = make_task(TaskId.Treechop)


def noop_log(ticks: int, player_kind: int | None = None):
    return record(TREECHOP, 5, [int(Action.Noop)] * ticks,
                  player_kind=player_kind, created_at=1)


def expert_log(task_id: TaskId, seed: int):
    spec = make_task(task_id)
    return record(spec, seed, ScriptedExpert(task_id), created_at=1)


class TestPrecedenceGraph:
    def test_empty_corpus_rejected(self):
        with pytest.raises(ConfigurationError):
            precedence_graph([])

    def test_no_milestones_no_graph(self):
        graph = precedence_graph([noop_log(30)])
        assert graph.nodes == frozenset()
        assert graph.edge_counts == {}

    def test_single_log_unit_edges(self):
        # One successful run acquires each milestone once, so every
        # consecutive pair appears exactly once.
        log = expert_log(TaskId.ObtainIronPickaxe, 3)
        milestones = annotate(log).milestones
        assert len(milestones) == len(IRON_PICKAXE_SCHEDULE)
        graph = precedence_graph([log])
        assert graph.edge_counts[ItemId.Log, ItemId.Planks] == 1
        assert all(count == 1 for count in graph.edge_counts.values())
        assert len(graph.edge_counts) == len(milestones) - 1
        assert graph.nodes == frozenset(item for item, _ in milestones)

    def test_expert_diamond_corpus_respects_gating(self):
        logs = [expert_log(TaskId.ObtainDiamond, seed) for seed in range(12)]
        graph = precedence_graph(logs)
        assert graph.edge_counts[ItemId.WoodenPickaxe, ItemId.Cobblestone] > 0
        # Nothing is ever collected after the terminal item.
        assert all(a != ItemId.Diamond for a, _ in graph.edge_counts)
        # Tool gating: a resource can't precede the tool that unlocks it.
        for blocked in [(ItemId.Cobblestone, ItemId.WoodenPickaxe),
                        (ItemId.IronOre, ItemId.StonePickaxe),
                        (ItemId.Diamond, ItemId.IronPickaxe)]:
            assert blocked not in graph.edge_counts

    def test_counts_accumulate_across_logs(self):
        log = expert_log(TaskId.ObtainIronPickaxe, 3)
        graph = precedence_graph([log, log, log])
        assert graph.edge_counts[ItemId.Log, ItemId.Planks] == 3


class TestLengthHistogram:
    def test_empty_corpus_rejected(self):
        with pytest.raises(ConfigurationError):
            length_histogram([], 50)

    def test_bad_bin_width_rejected(self):
        with pytest.raises(ConfigurationError):
            length_histogram([noop_log(10)], 0)

    def test_single_log_lands_in_its_bin(self):
        hist = length_histogram([noop_log(100)], 50)
        assert hist.counts == {100: 1}

    def test_counts_conserve_corpus_size(self):
        logs = [noop_log(t) for t in (10, 49, 50, 99, 100, 260)]
        hist = length_histogram(logs, 50)
        assert sum(hist.counts.values()) == len(logs)
        assert hist.counts[0] == 2 and hist.counts[50] == 2

    def test_equal_scripted_durations_set_threshold(self):
        logs = [noop_log(120, PLAYER_SCRIPTED) for _ in range(3)]
        hist = length_histogram(logs, 50)
        assert hist.expert_threshold == 180.0

    def test_even_count_median_averages(self):
        logs = [noop_log(100, PLAYER_SCRIPTED), noop_log(200, PLAYER_SCRIPTED)]
        assert length_histogram(logs, 50).expert_threshold == 225.0

    def test_no_scripted_logs_no_threshold(self):
        assert length_histogram([noop_log(80)], 50).expert_threshold == 0.0

    def test_agent_durations_ignored_by_threshold(self):
        logs = [noop_log(100, PLAYER_SCRIPTED), noop_log(5000)]
        assert length_histogram(logs, 50).expert_threshold == 150.0


class TestEmission:
    def test_precedence_csv_round_trip(self, tmp_path):
        graph = precedence_graph([expert_log(TaskId.ObtainIronPickaxe, 3)])
        out = tmp_path / "edges.csv"
        write_precedence_csv(graph, out)
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["source", "target", "count"]
        assert ["Log", "Planks", "1"] in rows
        assert len(rows) == 1 + len(graph.edge_counts)

    def test_histogram_csv_round_trip(self, tmp_path):
        hist = length_histogram([noop_log(100), noop_log(130)], 50)
        out = tmp_path / "hist.csv"
        write_histogram_csv(hist, out)
        rows = list(csv.reader(out.open()))
        assert rows == [["bin_start", "bin_end", "count"],
                        ["100", "150", "2"]]

    def test_curve_csv_round_trip(self, tmp_path):
        curve = [(5000, 12.25), (10000, 31.5)]
        out = tmp_path / "curve.csv"
        write_curve_csv(curve, out)
        assert read_curve_csv(out) == curve
        header = out.read_text().splitlines()[0]
        assert header == "samples,mean_score"

    def test_leaderboard_csv(self, tmp_path):
        report = ScoreReport(per_episode_scores=(1.0, 3.0), mean=2.0,
                             std=1.0, tie_break_episode=2,
                             samples_consumed_training=500, eval_id=9)
        out = tmp_path / "board.csv"
        write_leaderboard_csv([("bc", report)], out)
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["entry", "mean", "std", "tie_break_episode",
                           "samples"]
        assert rows[1] == ["bc", "2.000000", "1.000000", "2", "500"]

    def test_svg_files_render(self, tmp_path):
        graph = precedence_graph([expert_log(TaskId.ObtainIronPickaxe, 3)])
        hist = length_histogram([noop_log(100, PLAYER_SCRIPTED)], 50)
        for name, render, data in [("edges.svg", render_precedence_svg, graph),
                                   ("hist.svg", render_histogram_svg, hist)]:
            out = tmp_path / name
            render(data, out)
            text = out.read_text()
            assert text.lstrip().startswith("<?xml")
            assert "<svg" in text
