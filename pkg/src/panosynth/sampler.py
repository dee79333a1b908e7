"""Iterative masked-code sampling with a cosine keep schedule.

Generation starts from a code grid whose unknown positions hold the MASK
sentinel. Each step a predictor returns, for every masked position, a
probability vector over the K codes; one code is sampled per position,
and only the most confident samples are kept so that exactly
ceil(mask_ratio(t, T) * M0) positions remain masked after step t (M0 is
the initial mask count). Re-masked positions are re-predicted on the
next step; positions that were fixed in the input are never touched.

A predictor is any object with

    predict(codes, conditioning) -> (n_masked, K) float array

where rows are per-MASK-position distributions (non-negative, each
summing to 1 within 1e-6) in row-major position order. `conditioning`
is opaque context the caller threads through; the bundled baseline
predictors mostly ignore it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PROB_SUM_TOL = 1e-6


def mask_ratio(t: int, total_steps: int) -> float:
    """cos(pi/2 * t/T), decreasing from 1 at t=0 to exactly 0 at t=T."""
    if total_steps < 1:
        raise ValueError(f"total steps must be >= 1, got {total_steps}")
    if not 0 <= t <= total_steps:
        raise ValueError(f"step {t} outside [0, {total_steps}]")
    if t == total_steps:
        # cos(pi/2) in floats is ~6e-17, which ceil() would round up.
        return 0.0
    return math.cos(math.pi / 2.0 * t / total_steps)


def mask_count(t: int, total_steps: int, initial_masked: int) -> int:
    """Number of positions still masked after step t."""
    return math.ceil(mask_ratio(t, total_steps) * initial_masked)


def training_mask(codes: np.ndarray, r: float, mask_code: int,
                  rng: np.random.Generator) -> np.ndarray:
    """Randomly mask round(cos(pi/2 * r) * N) positions of a code grid.

    r is the uniform draw from [0, 1) that emulates one inference step's
    mask ratio; r = 0 masks everything, r -> 1 masks nothing.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError(f"mask parameter r must be in [0, 1), got {r}")
    codes = np.asarray(codes)
    n = codes.size
    n_mask = int(round(math.cos(math.pi / 2.0 * r) * n))
    out = codes.copy().reshape(-1)
    if n_mask:
        positions = rng.choice(n, size=n_mask, replace=False)
        out[positions] = mask_code
    return out.reshape(codes.shape)


@dataclass(frozen=True)
class SampleConfig:
    steps: int = 16
    temperature: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


def _validated_probs(probs: np.ndarray, n_masked: int, vocab: int) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    if probs.shape != (n_masked, vocab):
        raise ValueError(
            f"predictor returned shape {probs.shape}, "
            f"expected ({n_masked}, {vocab})")
    if np.any(probs < 0):
        raise ValueError("predictor returned negative probabilities")
    sums = probs.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > PROB_SUM_TOL):
        worst = float(np.abs(sums - 1.0).max())
        raise ValueError(
            f"predictor distributions not normalized (max |sum-1| = {worst:.3g})")
    return probs / sums[:, None]


def _categorical(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0])
    idx = (cdf <= u[:, None]).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


def sample(predictor, initial: np.ndarray, conditioning, cfg: SampleConfig,
           mask_code: int) -> np.ndarray:
    """Fill every MASK position of `initial`, returning a MASK-free grid.

    Deterministic given (predictor, inputs, cfg); temperature 0 disables
    the confidence noise entirely. Confidence ties break toward the
    lower row-major position.
    """
    initial = np.asarray(initial)
    if np.any(initial < 0) or np.any(initial > mask_code):
        raise ValueError(f"initial grid has codes outside [0, {mask_code}]")
    flat = initial.reshape(-1).copy()
    m0 = int((flat == mask_code).sum())
    if m0 == 0:
        return initial.copy()

    rng = np.random.default_rng(cfg.seed)
    for t in range(1, cfg.steps + 1):
        positions = np.flatnonzero(flat == mask_code)
        n_masked = positions.size
        if n_masked == 0:
            break
        probs = _validated_probs(
            predictor.predict(flat.reshape(initial.shape), conditioning),
            n_masked, mask_code)
        drawn = _categorical(probs, rng)
        conf = np.log(probs[np.arange(n_masked), drawn])
        if cfg.temperature > 0:
            anneal = 1.0 - t / cfg.steps
            conf = conf + cfg.temperature * anneal * rng.gumbel(size=n_masked)

        target = mask_count(t, cfg.steps, m0)
        keep_n = n_masked - target
        if keep_n > 0:
            order = np.argsort(-conf, kind="stable")
            kept = positions[order[:keep_n]]
            flat[kept] = drawn[order[:keep_n]]

    if (flat == mask_code).any():
        raise RuntimeError("sampling finished with MASK positions left")
    return flat.reshape(initial.shape)


class OraclePredictor:
    """Point masses on a known ground-truth grid; reproduces it exactly.

    `vocab` is the number of real codes K; positions holding the value K
    are treated as masked, matching the codebook's MASK sentinel.
    """

    def __init__(self, truth: np.ndarray, vocab: int):
        self.truth = np.asarray(truth)
        self.vocab = int(vocab)
        if self.truth.size and (self.truth.min() < 0
                                or self.truth.max() >= self.vocab):
            raise ValueError("oracle truth contains codes outside [0, vocab)")

    def predict(self, codes: np.ndarray, conditioning) -> np.ndarray:
        codes = np.asarray(codes)
        if codes.shape != self.truth.shape:
            raise ValueError(
                f"grid shape {codes.shape} does not match oracle truth "
                f"{self.truth.shape}")
        masked = self.truth.reshape(-1)[codes.reshape(-1) == self.vocab]
        probs = np.zeros((masked.size, self.vocab), dtype=np.float64)
        probs[np.arange(masked.size), masked] = 1.0
        return probs


class MarginalPredictor:
    """One corpus-wide code distribution, repeated for every position."""

    def __init__(self, probs: np.ndarray):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError("marginal distribution must be a 1-D vector")
        total = probs.sum()
        if total <= 0 or np.any(probs < 0):
            raise ValueError("marginal distribution must be non-negative "
                             "with positive mass")
        self.probs = probs / total
        self.vocab = probs.size

    @classmethod
    def uniform(cls, vocab: int) -> "MarginalPredictor":
        return cls(np.full(vocab, 1.0 / vocab))

    @classmethod
    def from_grids(cls, grids, vocab: int) -> "MarginalPredictor":
        counts = np.zeros(vocab, dtype=np.float64)
        for g in grids:
            counts += np.bincount(np.asarray(g).reshape(-1), minlength=vocab)
        if counts.sum() == 0:
            return cls.uniform(vocab)
        return cls(counts)

    def predict(self, codes: np.ndarray, conditioning) -> np.ndarray:
        n = int((np.asarray(codes).reshape(-1) == self.vocab).sum())
        return np.tile(self.probs, (n, 1))


class ContextCopyPredictor:
    """Per-position code frequencies estimated from a corpus of grids.

    Captures position-dependent structure (sky codes up top, ground
    codes at the bottom) without any learned model.
    """

    def __init__(self, table: np.ndarray):
        table = np.asarray(table, dtype=np.float64)
        if table.ndim != 3:
            raise ValueError("frequency table must be (rows, cols, vocab)")
        totals = table.sum(axis=2, keepdims=True)
        if np.any(totals <= 0) or np.any(table < 0):
            raise ValueError("every position needs positive total mass")
        self.table = table / totals
        self.vocab = table.shape[2]

    @classmethod
    def from_grids(cls, grids, vocab: int) -> "ContextCopyPredictor":
        grids = [np.asarray(g) for g in grids]
        if not grids:
            raise ValueError("need at least one grid")
        shape = grids[0].shape
        counts = np.zeros(shape + (vocab,), dtype=np.float64)
        rows, cols = np.indices(shape)
        for g in grids:
            if g.shape != shape:
                raise ValueError("all corpus grids must share one shape")
            counts[rows, cols, g] += 1.0
        return cls(counts)

    def predict(self, codes: np.ndarray, conditioning) -> np.ndarray:
        codes = np.asarray(codes)
        if codes.shape != self.table.shape[:2]:
            raise ValueError(
                f"grid shape {codes.shape} does not match frequency table "
                f"{self.table.shape[:2]}")
        flat = self.table.reshape(-1, self.vocab)
        return flat[codes.reshape(-1) == self.vocab]


class PerViewPredictor:
    """Dispatch to one predictor per view via conditioning['view_index']."""

    def __init__(self, predictors):
        self.predictors = list(predictors)

    def predict(self, codes: np.ndarray, conditioning) -> np.ndarray:
        if not isinstance(conditioning, dict) or "view_index" not in conditioning:
            raise ValueError("conditioning must carry a 'view_index' key")
        return self.predictors[conditioning["view_index"]].predict(
            codes, conditioning)
