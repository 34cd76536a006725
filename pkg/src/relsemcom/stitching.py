"""Synthetic zero-shot stitching: heterogeneous encoders over one latent space,
relative decoders trained once, accuracy measured per (encoder, anchor size)."""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .relrep import AnchorSet, encode_relative_batch, select_anchors_uniform


def _stable_key(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


def random_orthogonal(d: int, seed: int) -> np.ndarray:
    """QR of a seeded Gaussian matrix, columns sign-fixed so that diag(R) > 0."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


@dataclass(frozen=True)
class SyntheticEncoder:
    """Stand-in for a pretrained encoder: ``x -> scale * transform @ x + noise``."""

    id: str
    transform: np.ndarray
    scale: float = 1.0
    noise_sigma: float = 0.0
    flops: float = 1.0

    def __post_init__(self):
        t = np.array(self.transform, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("transform must be square")
        if not np.allclose(t.T @ t, np.eye(t.shape[0]), atol=1e-9, rtol=0.0):
            raise ValueError(f"encoder {self.id!r}: transform is not orthogonal")
        if self.scale <= 0 or self.noise_sigma < 0 or self.flops <= 0:
            raise ValueError(f"encoder {self.id!r}: need scale > 0, noise_sigma >= 0, flops > 0")
        t.setflags(write=False)
        object.__setattr__(self, "transform", t)

    @property
    def dim(self) -> int:
        return self.transform.shape[0]

    @classmethod
    def random(cls, id: str, d: int, seed: int, scale: float = 1.0,
               noise_sigma: float = 0.0, flops: float = 1.0) -> "SyntheticEncoder":
        return cls(id, random_orthogonal(d, seed), scale, noise_sigma, flops)

    @classmethod
    def identity(cls, id: str, d: int, **kw) -> "SyntheticEncoder":
        return cls(id, np.eye(d), **kw)


def apply_encoder(enc: SyntheticEncoder, x, seed: int) -> np.ndarray:
    """Encode one latent. Noise is a pure function of ``(enc.id, seed)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (enc.dim,):
        raise ValueError(f"dimension mismatch: {x.shape} vs encoder dim {enc.dim}")
    out = enc.scale * (enc.transform @ x)
    if enc.noise_sigma > 0:
        rng = np.random.default_rng((_stable_key(enc.id), int(seed)))
        out = out + rng.normal(0.0, enc.noise_sigma, size=enc.dim)
    return out


def apply_encoder_batch(enc: SyntheticEncoder, xs, seeds: Sequence[int]) -> np.ndarray:
    """Row-wise :func:`apply_encoder`; row ``i`` uses ``seeds[i]``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if xs.shape[1] != enc.dim:
        raise ValueError(f"dimension mismatch: {xs.shape[1]} vs encoder dim {enc.dim}")
    if len(seeds) != xs.shape[0]:
        raise ValueError("one seed per row required")
    out = enc.scale * (xs @ enc.transform.T)
    if enc.noise_sigma > 0:
        key = _stable_key(enc.id)
        noise = np.stack([np.random.default_rng((key, int(s))).normal(0.0, enc.noise_sigma, size=enc.dim)
                          for s in seeds])
        out = out + noise
    return out


@dataclass(frozen=True)
class LabeledLatentDataset:
    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray
    num_classes: int

    def __post_init__(self):
        if len(self.train_y) == 0 or len(self.val_y) == 0:
            raise ValueError("both splits must be non-empty")
        for y in (self.train_y, self.val_y):
            if y.min() < 0 or y.max() >= self.num_classes:
                raise ValueError("labels out of range")

    @property
    def dim(self) -> int:
        return self.train_x.shape[1]

    # sample ids: train rows are 0..n_train-1, validation rows follow
    @property
    def train_ids(self) -> np.ndarray:
        return np.arange(len(self.train_y))

    @property
    def val_ids(self) -> np.ndarray:
        return len(self.train_y) + np.arange(len(self.val_y))


def generate_dataset(C: int, per_class: int, d: int, spread: float, seed: int,
                     val_fraction: float = 0.5) -> LabeledLatentDataset:
    """Gaussian blobs around class means drawn uniformly on the unit sphere.

    Each class is split into train/validation by ``val_fraction`` (at least one
    sample on each side).
    """
    if C < 2 or per_class < 2 or d < 2:
        raise ValueError("need C >= 2, per_class >= 2, d >= 2")
    if spread < 0:
        raise ValueError("spread must be >= 0")
    rng = np.random.default_rng(seed)
    means = rng.standard_normal((C, d))
    means /= np.linalg.norm(means, axis=1, keepdims=True)
    n_val = min(per_class - 1, max(1, int(round(per_class * val_fraction))))
    tx, ty, vx, vy = [], [], [], []
    for c in range(C):
        pts = means[c] + spread * rng.standard_normal((per_class, d))
        tx.append(pts[n_val:])
        vx.append(pts[:n_val])
        ty.append(np.full(per_class - n_val, c))
        vy.append(np.full(n_val, c))
    return LabeledLatentDataset(np.vstack(tx), np.concatenate(ty), np.vstack(vx), np.concatenate(vy), C)


@dataclass(frozen=True)
class RelativeDecoder:
    anchor_set_id: str
    weights: np.ndarray  # (C, n_anchors)
    bias: np.ndarray  # (C,)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    def scores(self, relreps) -> np.ndarray:
        return np.atleast_2d(relreps) @ self.weights.T + self.bias

    def predict(self, relreps) -> np.ndarray:
        # np.argmax returns the first maximum, i.e. ties go to the lowest class index
        return np.argmax(self.scores(relreps), axis=1)


def train_decoder(relreps, labels, ridge: float, num_classes: int | None = None,
                  anchor_set_id: str = "") -> RelativeDecoder:
    """One-vs-all ridge regression on one-hot targets (unpenalised bias).

    Solves the centred normal equations; with ``ridge == 0`` the least-squares
    solution of minimum norm is returned via the pseudo-inverse.
    """
    X = np.atleast_2d(np.asarray(relreps, dtype=float))
    y = np.asarray(labels, dtype=int)
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    C = int(num_classes) if num_classes is not None else int(y.max()) + 1
    counts = np.bincount(y, minlength=C)
    if np.any(counts == 0):
        raise ValueError(f"classes without training samples: {np.flatnonzero(counts == 0).tolist()}")
    T = np.eye(C)[y]
    x_mean = X.mean(axis=0)
    t_mean = T.mean(axis=0)
    Xc = X - x_mean
    Tc = T - t_mean
    gram = Xc.T @ Xc
    if ridge > 0:
        W = np.linalg.solve(gram + ridge * np.eye(X.shape[1]), Xc.T @ Tc)
    else:
        W = np.linalg.pinv(gram) @ (Xc.T @ Tc)
    weights = W.T
    bias = t_mean - weights @ x_mean
    return RelativeDecoder(anchor_set_id, weights, bias)


def evaluate_accuracy(decoder: RelativeDecoder, encoder: SyntheticEncoder, anchors: AnchorSet,
                      val_x, val_y, val_ids: Sequence[int] | None = None) -> float:
    """Fraction of validation samples whose predicted class equals the label.

    ``anchors`` must already be expressed in ``encoder``'s space (see
    :func:`encode_anchor_set`); validation latents are passed through ``encoder``.
    """
    if decoder.anchor_set_id != anchors.id:
        raise ValueError(f"decoder trained for anchors {decoder.anchor_set_id!r}, got {anchors.id!r}")
    val_y = np.asarray(val_y)
    if len(val_y) == 0:
        raise ValueError("empty validation split")
    ids = np.arange(len(val_y)) if val_ids is None else val_ids
    rel = encode_relative_batch(apply_encoder_batch(encoder, val_x, ids), anchors)
    return float(np.mean(decoder.predict(rel) == val_y))


def encode_anchor_set(encoder: SyntheticEncoder, anchors: AnchorSet) -> AnchorSet:
    """The anchor samples as seen through ``encoder``. Anchor noise is keyed by the
    anchors' dataset indices, so an anchor sample gets the same noise as when it
    is encoded as a regular training sample."""
    ids = anchors.source_indices or tuple(range(anchors.size))
    return anchors.with_anchors(apply_encoder_batch(encoder, anchors.anchors, ids))


def stitching_accuracy(dataset: LabeledLatentDataset, train_encoder: SyntheticEncoder,
                       eval_encoder: SyntheticEncoder, anchors: AnchorSet, ridge: float) -> float:
    """Train a relative decoder through ``train_encoder``; evaluate through ``eval_encoder``."""
    tx_anchors = encode_anchor_set(train_encoder, anchors)
    rel_train = encode_relative_batch(apply_encoder_batch(train_encoder, dataset.train_x, dataset.train_ids),
                                      tx_anchors)
    dec = train_decoder(rel_train, dataset.train_y, ridge, dataset.num_classes, anchors.id)
    return evaluate_accuracy(dec, eval_encoder, encode_anchor_set(eval_encoder, anchors),
                             dataset.val_x, dataset.val_y, dataset.val_ids)


def build_accuracy_profile(encoders: Sequence[SyntheticEncoder], anchor_sizes: Sequence[int],
                           dataset: LabeledLatentDataset, seeds: Sequence[int], ridge: float = 1e-3,
                           train_encoder: SyntheticEncoder | None = None) -> dict[tuple[str, int], float]:
    """Mean stitching accuracy per ``(encoder id, anchor size)`` over ``seeds``.

    Decoders are trained once per (anchor size, seed) through ``train_encoder``
    (default: the first encoder) and reused zero-shot for every encoder. The
    seed drives the anchor draw.
    """
    if not encoders:
        raise ValueError("no encoders")
    n_train = len(dataset.train_y)
    for n in anchor_sizes:
        if not 1 <= n <= n_train:
            raise ValueError(f"anchor size {n} exceeds train split size {n_train}")
    ref = train_encoder if train_encoder is not None else encoders[0]
    seeds = sorted(seeds)
    sums = {(e.id, int(n)): 0.0 for e in encoders for n in anchor_sizes}
    for n in anchor_sizes:
        for seed in seeds:
            anchors = select_anchors_uniform(dataset.train_x, int(n), seed, f"A{int(n)}")
            tx_anchors = encode_anchor_set(ref, anchors)
            rel_train = encode_relative_batch(
                apply_encoder_batch(ref, dataset.train_x, dataset.train_ids), tx_anchors)
            dec = train_decoder(rel_train, dataset.train_y, ridge, dataset.num_classes, anchors.id)
            for enc in encoders:
                sums[(enc.id, int(n))] += evaluate_accuracy(
                    dec, enc, encode_anchor_set(enc, anchors), dataset.val_x, dataset.val_y, dataset.val_ids)
    return {k: v / len(seeds) for k, v in sums.items()}
