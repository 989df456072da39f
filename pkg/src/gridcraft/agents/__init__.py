"""Baseline players: feature encoding, numpy nets, policies, a scripted
demonstrator, behavioural cloning, and DQN (with and without demonstration
pretraining)."""
from .features import (
    DOWNSAMPLE,
    INVENTORY_SCALE,
    feature_length,
    featurize,
    featurize_arrays,
    pov_to_gray16,
)
from .nets import (
    Adam,
    BLOB_MAGIC,
    BLOB_VERSION,
    DUELING_LAYERS,
    HIDDEN,
    PLAIN_LAYERS,
    clip_global_norm,
    cross_entropy_grads,
    decode_blob,
    encode_blob,
    forward,
    huber_q_grads,
    init_dueling,
    init_plain,
    load_blob,
    save_blob,
)
from .bc import BCConfig, train_bc
from .dqn import ReplayBuffer, TrainConfig, train_dqn, train_predqn
from .expert import ScriptedExpert
from .policy import GreedyNetPolicy, RandomPolicy, policy_from_params

__all__ = [
    "Adam", "BCConfig", "BLOB_MAGIC", "BLOB_VERSION", "DOWNSAMPLE",
    "DUELING_LAYERS", "GreedyNetPolicy", "HIDDEN", "INVENTORY_SCALE",
    "PLAIN_LAYERS", "RandomPolicy", "ReplayBuffer", "ScriptedExpert",
    "TrainConfig", "clip_global_norm", "cross_entropy_grads", "decode_blob",
    "encode_blob", "feature_length", "featurize", "featurize_arrays",
    "forward", "huber_q_grads", "init_dueling", "init_plain", "load_blob",
    "pov_to_gray16", "policy_from_params", "save_blob", "train_bc",
    "train_dqn", "train_predqn",
]
