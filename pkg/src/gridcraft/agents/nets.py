"""Small dense networks in plain numpy (float64), with hand-derived
gradients, Adam, Huber/cross-entropy losses, and a portable parameter-blob
file format.

Two parameter layouts share one trunk (input -> 128 relu -> 128 relu):

  * plain head (6 arrays)  [W1 b1 W2 b2 W3 b3]         -> action logits
  * dueling head (8 arrays) [W1 b1 W2 b2 Wv bv Wa ba]  -> Q = V + A - mean(A)

Biases are stored (1, n) so every parameter is a 2-D array, which is what
the blob format carries. The layer count alone identifies the layout
(0 = parameterless uniform-random policy, 6 = plain, 8 = dueling).

Blob file format (little-endian): magic ``MRLP``, u16 version=1, u32 layer
count, then per layer u32 rows, u32 cols, rows*cols f64 row-major.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import CorruptLog, IncompatibleVersion
from ..world import N_ACTIONS

HIDDEN = 128

BLOB_MAGIC = b"MRLP"
BLOB_VERSION = 1

PLAIN_LAYERS = 6
DUELING_LAYERS = 8

_BLOB_HEADER = struct.Struct("<4sHI")
_LAYER_HEADER = struct.Struct("<II")


def init_plain(input_len: int, seed: int) -> list[np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(seed))
    return [
        rng.standard_normal((input_len, HIDDEN)) * np.sqrt(2.0 / input_len),
        np.zeros((1, HIDDEN)),
        rng.standard_normal((HIDDEN, HIDDEN)) * np.sqrt(2.0 / HIDDEN),
        np.zeros((1, HIDDEN)),
        rng.standard_normal((HIDDEN, N_ACTIONS)) * np.sqrt(1.0 / HIDDEN),
        np.zeros((1, N_ACTIONS)),
    ]


def init_dueling(input_len: int, seed: int) -> list[np.ndarray]:
    rng = np.random.Generator(np.random.PCG64(seed))
    return [
        rng.standard_normal((input_len, HIDDEN)) * np.sqrt(2.0 / input_len),
        np.zeros((1, HIDDEN)),
        rng.standard_normal((HIDDEN, HIDDEN)) * np.sqrt(2.0 / HIDDEN),
        np.zeros((1, HIDDEN)),
        rng.standard_normal((HIDDEN, 1)) * np.sqrt(1.0 / HIDDEN),
        np.zeros((1, 1)),
        rng.standard_normal((HIDDEN, N_ACTIONS)) * np.sqrt(1.0 / HIDDEN),
        np.zeros((1, N_ACTIONS)),
    ]


def _trunk(params: list[np.ndarray], x: np.ndarray):
    w1, b1, w2, b2 = params[0], params[1], params[2], params[3]
    z1 = x @ w1 + b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w2 + b2
    h2 = np.maximum(z2, 0.0)
    return z1, h1, z2, h2


def forward(params: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    """Batch of feature rows -> per-action scores (logits or Q-values)."""
    x = np.atleast_2d(x)
    _, _, _, h2 = _trunk(params, x)
    if len(params) == PLAIN_LAYERS:
        return h2 @ params[4] + params[5]
    if len(params) == DUELING_LAYERS:
        v = h2 @ params[4] + params[5]
        a = h2 @ params[6] + params[7]
        return v + a - a.mean(axis=1, keepdims=True)
    raise ValueError(f"unsupported parameter count {len(params)}")


def _backprop_trunk(params, x, z1, h1, z2, dh2, grads):
    dz2 = dh2 * (z2 > 0.0)
    grads[2] = h1.T @ dz2
    grads[3] = dz2.sum(axis=0, keepdims=True)
    dh1 = dz2 @ params[2].T
    dz1 = dh1 * (z1 > 0.0)
    grads[0] = x.T @ dz1
    grads[1] = dz1.sum(axis=0, keepdims=True)


def cross_entropy_grads(params: list[np.ndarray], x: np.ndarray,
                        actions: np.ndarray
                        ) -> tuple[float, list[np.ndarray]]:
    """Mean softmax cross-entropy of demonstrated actions, with gradients."""
    x = np.atleast_2d(x)
    n = len(x)
    z1, h1, z2, h2 = _trunk(params, x)
    logits = h2 @ params[4] + params[5]
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    picked = probs[np.arange(n), actions]
    loss = float(-np.log(np.maximum(picked, 1e-300)).mean())

    dlogits = probs.copy()
    dlogits[np.arange(n), actions] -= 1.0
    dlogits /= n
    grads: list = [None] * PLAIN_LAYERS
    grads[4] = h2.T @ dlogits
    grads[5] = dlogits.sum(axis=0, keepdims=True)
    dh2 = dlogits @ params[4].T
    _backprop_trunk(params, x, z1, h1, z2, dh2, grads)
    return loss, grads


def huber_q_grads(params: list[np.ndarray], x: np.ndarray, actions: np.ndarray,
                  targets: np.ndarray) -> tuple[float, list[np.ndarray]]:
    """Mean Huber(delta=1) loss between Q(x)[action] and ``targets``, with
    gradients for the dueling layout."""
    x = np.atleast_2d(x)
    n = len(x)
    z1, h1, z2, h2 = _trunk(params, x)
    v = h2 @ params[4] + params[5]
    a = h2 @ params[6] + params[7]
    q = v + a - a.mean(axis=1, keepdims=True)

    err = q[np.arange(n), actions] - targets
    abs_err = np.abs(err)
    loss = float(np.where(abs_err <= 1.0, 0.5 * err * err,
                          abs_err - 0.5).mean())

    dq = np.zeros_like(q)
    dq[np.arange(n), actions] = np.clip(err, -1.0, 1.0) / n
    dv = dq.sum(axis=1, keepdims=True)
    da = dq - dq.mean(axis=1, keepdims=True)
    grads: list = [None] * DUELING_LAYERS
    grads[4] = h2.T @ dv
    grads[5] = dv.sum(axis=0, keepdims=True)
    grads[6] = h2.T @ da
    grads[7] = da.sum(axis=0, keepdims=True)
    dh2 = dv @ params[4].T + da @ params[6].T
    _backprop_trunk(params, x, z1, h1, z2, dh2, grads)
    return loss, grads


def clip_global_norm(grads: list[np.ndarray], max_norm: float) -> float:
    """Scale all gradients in place so their joint L2 norm is <= max_norm;
    returns the pre-clip norm."""
    total = float(np.sqrt(sum(float((g * g).sum()) for g in grads)))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for g in grads:
            g *= scale
    return total


@dataclass
class Adam:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def apply(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.learning_rate * (m / b1t) / (np.sqrt(v / b2t) + self.eps)


# --- parameter blob I/O -------------------------------------------------------


def encode_blob(params: list[np.ndarray]) -> bytes:
    chunks = [_BLOB_HEADER.pack(BLOB_MAGIC, BLOB_VERSION, len(params))]
    for p in params:
        if p.ndim != 2:
            raise ValueError("blob layers must be 2-D")
        chunks.append(_LAYER_HEADER.pack(p.shape[0], p.shape[1]))
        chunks.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return b"".join(chunks)


def decode_blob(data: bytes) -> list[np.ndarray]:
    if len(data) < _BLOB_HEADER.size:
        raise CorruptLog("parameter blob shorter than its header")
    magic, version, count = _BLOB_HEADER.unpack_from(data)
    if magic != BLOB_MAGIC:
        raise CorruptLog(f"bad blob magic {magic!r}")
    if version != BLOB_VERSION:
        raise IncompatibleVersion(f"blob version {version} unsupported")
    params = []
    at = _BLOB_HEADER.size
    for _ in range(count):
        if at + _LAYER_HEADER.size > len(data):
            raise CorruptLog("parameter blob truncated in a layer header")
        rows, cols = _LAYER_HEADER.unpack_from(data, at)
        at += _LAYER_HEADER.size
        nbytes = rows * cols * 8
        if at + nbytes > len(data):
            raise CorruptLog("parameter blob truncated in layer data")
        params.append(np.frombuffer(data[at:at + nbytes],
                                    dtype="<f8").reshape(rows, cols).copy())
        at += nbytes
    if at != len(data):
        raise CorruptLog(f"{len(data) - at} trailing bytes in parameter blob")
    return params


def save_blob(path, params: list[np.ndarray]) -> None:
    Path(path).write_bytes(encode_blob(params))


def load_blob(path) -> list[np.ndarray]:
    return decode_blob(Path(path).read_bytes())
