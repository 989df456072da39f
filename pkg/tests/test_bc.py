"""Behavioural cloning on stored demonstrations."""
from __future__ import annotations

import numpy as np
import pytest

from gridcraft.agents import BCConfig, ScriptedExpert, train_bc
from gridcraft.agents.features import featurize_arrays
from gridcraft.agents.nets import PLAIN_LAYERS, forward
from gridcraft.dataset import load_batches, write_trajectory
from gridcraft.errors import ConfigurationError
from gridcraft.tasks import TaskId, make_task
from gridcraft.trajectory import annotate, record
from gridcraft.world import Action, make_texture_pack

SPEC = make_task(TaskId.Treechop)
PACK = make_texture_pack(0)


def store_expert_demo(root, seed: int) -> str:
    log = record(SPEC, seed, ScriptedExpert(SPEC.task_id), PACK,
                 created_at=1 << 20)
    return write_trajectory(root, log, annotate(log, SPEC))


def training_accuracy(root, tid: str, params) -> float:
    hits = total = 0
    for batch in load_batches(root, [tid], PACK, 512, 0, SPEC):
        x = featurize_arrays(batch.pov, batch.inventory, batch.compass)
        predicted = forward(params, x).argmax(axis=1)
        hits += int((predicted == batch.actions).sum())
        total += len(batch)
    return hits / total


class TestBCConfig:
    def test_defaults_valid(self):
        BCConfig().validate()

    @pytest.mark.parametrize("overrides", [
        {"epochs": 0},
        {"batch_size": 0},
        {"learning_rate": 0.0},
        {"grad_clip": -1.0},
    ])
    def test_rejects_non_positive(self, overrides):
        with pytest.raises(ConfigurationError):
            BCConfig(**overrides).validate()


class TestTrainBC:
    def test_empty_corpus_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError):
            train_bc(tmp_path, [], PACK)

    def test_overfits_single_demo(self, tmp_path):
        # Capacity sanity: one demonstration should be memorizable almost
        # perfectly once the epoch budget is generous.
        tid = store_expert_demo(tmp_path, 24)
        policy, losses = train_bc(
            tmp_path, [tid], PACK, BCConfig(epochs=400), SPEC)
        assert len(policy.params) == PLAIN_LAYERS
        assert len(losses) == 400
        assert losses[-1] < losses[0] / 2
        assert training_accuracy(tmp_path, tid, policy.params) >= 0.99

    def test_noop_corpus_clones_noop(self, tmp_path):
        # A truncated all-noop log is a constant mapping; cloning it should
        # saturate, predicting noop on every frame it was trained on.
        log = record(SPEC, 5, [int(Action.Noop)] * 48, PACK, created_at=77)
        assert log.truncated
        tid = write_trajectory(tmp_path, log, annotate(log, SPEC))
        policy, _ = train_bc(tmp_path, [tid], PACK,
                             BCConfig(epochs=10), SPEC)
        for batch in load_batches(tmp_path, [tid], PACK, 512, 0, SPEC):
            x = featurize_arrays(batch.pov, batch.inventory, batch.compass)
            assert (forward(policy.params, x).argmax(axis=1)
                    == int(Action.Noop)).all()

    def test_reproducible_given_seeds(self, tmp_path):
        tid = store_expert_demo(tmp_path, 0)
        config = BCConfig(epochs=3)
        policy_a, losses_a = train_bc(tmp_path, [tid], PACK, config, SPEC)
        policy_b, losses_b = train_bc(tmp_path, [tid], PACK, config, SPEC)
        assert losses_a == losses_b
        for p, q in zip(policy_a.params, policy_b.params):
            assert np.array_equal(p, q)

    def test_shuffle_seed_changes_course(self, tmp_path):
        tid = store_expert_demo(tmp_path, 0)
        _, losses_a = train_bc(tmp_path, [tid], PACK,
                               BCConfig(epochs=2, shuffle_seed=0), SPEC)
        _, losses_b = train_bc(tmp_path, [tid], PACK,
                               BCConfig(epochs=2, shuffle_seed=1), SPEC)
        assert losses_a != losses_b
