"""Relative representations: cosine similarities of a sample against an anchor set."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

NORM_EPS = 1e-12

Similarity = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def cosine_sim(a, b) -> float:
    """Cosine of the angle between ``a`` and ``b``; 0 if either is (numerically) zero."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < NORM_EPS or nb < NORM_EPS:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def cosine_matrix(x: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities, rows of ``x`` against rows of ``anchors``.

    Zero-norm rows on either side give a similarity of 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if x.shape[1] != anchors.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {anchors.shape[1]}")
    nx = np.linalg.norm(x, axis=1)
    na = np.linalg.norm(anchors, axis=1)
    inv_x = np.where(nx < NORM_EPS, 0.0, 1.0 / np.where(nx < NORM_EPS, 1.0, nx))
    inv_a = np.where(na < NORM_EPS, 0.0, 1.0 / np.where(na < NORM_EPS, 1.0, na))
    sims = (x * inv_x[:, None]) @ (anchors * inv_a[:, None]).T
    return np.clip(sims, -1.0, 1.0)


@dataclass(frozen=True)
class AnchorSet:
    """Ordered anchors shared by TX and RX. Order matters: decoders are positional."""

    id: str
    anchors: np.ndarray
    source_indices: tuple[int, ...] = ()

    def __post_init__(self):
        anchors = np.atleast_2d(np.asarray(self.anchors, dtype=float))
        if anchors.shape[0] < 1 or anchors.shape[1] < 1:
            raise ValueError("an anchor set needs at least one anchor of dimension >= 1")
        if not np.all(np.isfinite(anchors)):
            raise ValueError("anchors must be finite")
        object.__setattr__(self, "anchors", _frozen(anchors))
        object.__setattr__(self, "source_indices", tuple(int(i) for i in self.source_indices))

    @property
    def size(self) -> int:
        return self.anchors.shape[0]

    @property
    def dim(self) -> int:
        return self.anchors.shape[1]

    def with_anchors(self, anchors: np.ndarray) -> "AnchorSet":
        """Same identity and order, different absolute coordinates (e.g. another encoder)."""
        return AnchorSet(self.id, anchors, self.source_indices)


@dataclass(frozen=True)
class RelRep:
    scores: np.ndarray
    anchor_set_id: str

    def __post_init__(self):
        object.__setattr__(self, "scores", _frozen(self.scores))

    def __len__(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class RelativeEncoder:
    """Maps absolute embeddings to relative ones. ``similarity`` is pluggable;
    it must take ``(x: (m, d), anchors: (n, d))`` and return ``(m, n)``."""

    similarity: Similarity = field(default=cosine_matrix)

    def encode(self, x, anchor_set: AnchorSet) -> RelRep:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.shape[0] != anchor_set.dim:
            raise ValueError(f"dimension mismatch: {x.shape} vs anchors of dim {anchor_set.dim}")
        return RelRep(self.similarity(x[None, :], anchor_set.anchors)[0], anchor_set.id)

    def encode_batch(self, xs, anchor_set: AnchorSet) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return self.similarity(xs, anchor_set.anchors)


def encode_relative(x, anchor_set: AnchorSet) -> RelRep:
    return RelativeEncoder().encode(x, anchor_set)


def encode_relative_batch(xs, anchor_set: AnchorSet) -> np.ndarray:
    """Relative representations of many samples as an ``(m, n_anchors)`` array."""
    return RelativeEncoder().encode_batch(xs, anchor_set)


def select_anchors_uniform(dataset: Sequence, n: int, seed: int, set_id: str | None = None) -> AnchorSet:
    """Draw ``n`` distinct samples uniformly at random, without replacement."""
    data = np.atleast_2d(np.asarray(dataset, dtype=float))
    if not 1 <= n <= data.shape[0]:
        raise ValueError(f"anchor count {n} out of range [1, {data.shape[0]}]")
    rng = np.random.default_rng(seed)
    idx = rng.choice(data.shape[0], size=n, replace=False)
    return AnchorSet(set_id if set_id is not None else f"A{n}", data[idx], tuple(idx.tolist()))


# --- columnar text files: header "id,x0,...,x{d-1}", then one vector per row ---

def save_embeddings(path, ids: Sequence[str], vectors) -> None:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if len(ids) != vectors.shape[0]:
        raise ValueError("one id per vector required")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id"] + [f"x{j}" for j in range(vectors.shape[1])])
        for i, row in zip(ids, vectors):
            writer.writerow([i] + [repr(float(v)) for v in row])


def load_embeddings(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["id"]:
        raise ValueError(f"{path}: missing 'id,x0,...' header")
    d = len(rows[0]) - 1
    if d < 1:
        raise ValueError(f"{path}: header declares no coordinates")
    ids, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != d + 1:
            raise ValueError(f"{path}:{lineno}: expected {d + 1} fields, got {len(row)}")
        ids.append(row[0])
        values.append([float(v) for v in row[1:]])
    return ids, np.array(values, dtype=float).reshape(len(ids), d)


def save_anchor_set(path, anchor_set: AnchorSet) -> None:
    ids = [str(i) for i in anchor_set.source_indices] or [str(j) for j in range(anchor_set.size)]
    save_embeddings(path, ids, anchor_set.anchors)


def load_anchor_set(path, set_id: str | None = None) -> AnchorSet:
    ids, values = load_embeddings(path)
    try:
        src = tuple(int(i) for i in ids)
    except ValueError:
        src = ()
    return AnchorSet(set_id if set_id is not None else Path(path).stem, values, src)
