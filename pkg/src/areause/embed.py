"""Area embedding model: one linear hidden layer trained with full-softmax
cross-entropy to predict a stay's temporal category from its area id.

After training, row i of the input weight matrix W is area i's embedding;
unit-normalizing those rows yields the vectors used for clustering.
Training is plain per-example SGD with a linearly decaying learning rate,
deterministic for a fixed seed.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .encoding import N_CATEGORIES, category_for_stay
from .holidays import JP_HOLIDAYS

LR_FLOOR_FRACTION = 1e-4


def default_dim(n_categories):
    """Embedding width: fourth root of the category count, rounded up."""
    if n_categories < 1:
        raise ValueError("need at least one category")
    return int(math.ceil(n_categories ** 0.25 - 1e-9))


@dataclass(frozen=True)
class ModelConfig:
    n_areas: int
    n_categories: int = N_CATEGORIES
    dim: int | None = None  # None -> default_dim(n_categories)
    learning_rate: float = 0.025
    epochs: int = 20
    seed: int = 0
    lr_decay: bool = True

    def __post_init__(self):
        if self.n_areas < 1 or self.n_categories < 1 or self.epochs < 1:
            raise ValueError("n_areas, n_categories, and epochs must be positive")
        if self.dim is not None and self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")

    @property
    def resolved_dim(self):
        return self.dim if self.dim is not None else default_dim(self.n_categories)


@dataclass
class AreaModel:
    W: np.ndarray      # n_areas x dim
    W_out: np.ndarray  # dim x n_categories

    @property
    def n_areas(self):
        return self.W.shape[0]

    @property
    def dim(self):
        return self.W.shape[1]

    @property
    def n_categories(self):
        return self.W_out.shape[1]


@dataclass(frozen=True)
class TrainingPair:
    area_id: int
    category_id: int


def build_training_pairs(stays, n_areas, tz_offset=540, holidays=JP_HOLIDAYS):
    """One (area id, category id) pair per stay carrying a retained area.

    Returns (pairs, skipped) where skipped counts stays without an area id.
    """
    pairs = []
    skipped = 0
    for s in stays:
        if s.area_id is None:
            skipped += 1
            continue
        if not (0 <= s.area_id < n_areas):
            raise ValueError(f"area id {s.area_id} outside vocabulary of {n_areas}")
        pairs.append(TrainingPair(s.area_id, category_for_stay(s, tz_offset, holidays)))
    return pairs, skipped


def _softmax(logits):
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / e.sum()


def forward(model, area_id):
    """Predicted category distribution for one area."""
    if not (0 <= area_id < model.n_areas):
        raise ValueError(f"area id out of range: {area_id}")
    return _softmax(model.W[area_id] @ model.W_out)


def loss_and_grads(model, batch):
    """Mean cross-entropy over a batch and its exact analytic gradients.

    Returns (loss, grad_W_rows, grad_W_out) where grad_W_rows maps
    area_id -> gradient of the mean loss w.r.t. that row of W.
    """
    if not batch:
        raise ValueError("empty batch")
    m = len(batch)
    loss = 0.0
    grad_rows = {}
    grad_out = np.zeros_like(model.W_out)
    for pair in batch:
        h = model.W[pair.area_id]
        p = _softmax(h @ model.W_out)
        loss -= math.log(p[pair.category_id])
        dlogits = p.copy()
        dlogits[pair.category_id] -= 1.0
        dlogits /= m
        grad_out += np.outer(h, dlogits)
        gh = model.W_out @ dlogits
        if pair.area_id in grad_rows:
            grad_rows[pair.area_id] += gh
        else:
            grad_rows[pair.area_id] = gh
    return loss / m, grad_rows, grad_out


def _as_index_arrays(pairs):
    areas = np.fromiter((p.area_id for p in pairs), dtype=np.int64, count=len(pairs))
    cats = np.fromiter((p.category_id for p in pairs), dtype=np.int64, count=len(pairs))
    return areas, cats


def init_model(config):
    """Uniform(-0.5/D, 0.5/D) input weights, zero output weights.

    Zero output weights make the initial prediction uniform, so the
    initial mean loss is exactly ln(n_categories).
    """
    rng = np.random.default_rng([config.seed, 0])
    d = config.resolved_dim
    W = rng.uniform(-0.5 / d, 0.5 / d, size=(config.n_areas, d))
    W_out = np.zeros((d, config.n_categories))
    return AreaModel(W, W_out)


def train(pairs, config, init=None):
    """SGD training over (area, category) pairs; deterministic per seed.

    Every area id in [0, n_areas) must occur in pairs (guaranteed upstream
    by the minimum-stay filter); the learning rate decays linearly over
    all updates down to a floor of 1e-4 of its initial value.  The
    initialization and shuffle-order random streams are independent, both
    derived from config.seed; ``init`` overrides the initial weights.
    """
    if not pairs:
        raise ValueError("no training pairs")
    areas, cats = _as_index_arrays(pairs)
    if areas.max() >= config.n_areas or cats.max() >= config.n_categories:
        raise ValueError("pair index outside model dimensions")
    if len(np.unique(areas)) != config.n_areas:
        raise ValueError("every area id must appear in the training pairs")

    model = init_model(config) if init is None else AreaModel(
        init.W.astype(float).copy(), init.W_out.astype(float).copy())
    rng = np.random.default_rng([config.seed, 1])
    W, W_out = model.W, model.W_out

    n = len(pairs)
    total = config.epochs * n
    lr0 = config.learning_rate
    lr_floor = LR_FLOOR_FRACTION * lr0
    step = 0
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for idx in order:
            a = areas[idx]
            c = cats[idx]
            if config.lr_decay:
                lr = max(lr0 * (1.0 - step / total), lr_floor)
            else:
                lr = lr0
            h = W[a]
            p = _softmax(h @ W_out)
            p[c] -= 1.0
            gh = W_out @ p
            W_out -= lr * np.outer(h, p)
            W[a] = h - lr * gh
            step += 1
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(W_out))):
            raise FloatingPointError(
                f"non-finite weights after {step} updates; lower the learning rate")
    return model


def mean_loss(model, pairs):
    """Mean cross-entropy of a pair set under a frozen model."""
    areas, cats = _as_index_arrays(pairs)
    logits = model.W[areas] @ model.W_out
    logits -= logits.max(axis=1, keepdims=True)
    logp = logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))
    return float(-logp[np.arange(len(pairs)), cats].mean())


def normalize_embeddings(model):
    """Rows of W scaled to unit Euclidean norm (the clustering input)."""
    norms = np.linalg.norm(model.W, axis=1)
    zero = np.where(norms == 0)[0]
    if zero.size:
        raise ValueError(f"zero-norm embedding for area id {int(zero[0])}")
    return model.W / norms[:, None]


def save_model(model, path, seed=None):
    """JSON container with exact float round-trip (repr-based doubles)."""
    payload = {
        "n_areas": model.n_areas,
        "n_categories": model.n_categories,
        "dim": model.dim,
        "seed": seed,
        "W": model.W.flatten().tolist(),
        "W_out": model.W_out.flatten().tolist(),
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f)


def load_model(path):
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    n, d, nc = payload["n_areas"], payload["dim"], payload["n_categories"]
    W = np.array(payload["W"], dtype=float).reshape(n, d)
    W_out = np.array(payload["W_out"], dtype=float).reshape(d, nc)
    return AreaModel(W, W_out)
