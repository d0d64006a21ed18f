"""MC-dropout predictive sampling and epistemic-uncertainty scores.

For one input, T stochastic passes give a row-stochastic (T, C) matrix.
From it:

    predictive entropy   H(mean over rows)        total uncertainty
    expected entropy     mean of per-row H        aleatoric part
    mutual information   difference of the two    epistemic part (BALD)

Entropies are in nats with 0*log(0) = 0. The confidence filter keeps pool
samples whose MC-mean top probability clears the threshold (>=, "at least").
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .seeding import derive_seed
from .validation import check_image_batch, check_row_stochastic


@dataclass(frozen=True)
class UncertaintyConfig:
    t_draws: int = 25
    t_conf: float = 0.99
    base_mask_seed: int = 0


@dataclass(frozen=True)
class PredictiveSamples:
    """T stochastic class-probability rows for a single input."""

    probs: np.ndarray
    mask_seeds: tuple = field(default_factory=tuple)

    @property
    def t_draws(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class UncertaintyScores:
    predictive_entropy: float
    expected_entropy: float
    mutual_information: float


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    """Shannon entropy per row, nats, 0 log 0 := 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=-1)


def draw_mask_seeds(config: UncertaintyConfig) -> tuple:
    if config.t_draws < 1:
        raise InvalidConfig(f"t_draws must be >= 1, got {config.t_draws}")
    return tuple(derive_seed(config.base_mask_seed, i) for i in range(config.t_draws))


def mc_predict(classifier, x, config: UncertaintyConfig) -> PredictiveSamples:
    """T stochastic passes for one sample; draw i uses seed (base, i)."""
    x = check_image_batch(x)
    seeds = draw_mask_seeds(config)
    rows = [classifier.predict_proba_stochastic(x, s)[0] for s in seeds]
    return PredictiveSamples(np.asarray(rows, dtype=np.float64), seeds)


def mc_scores_batch(classifier, X, config: UncertaintyConfig, batch: int = 512) -> dict:
    """Streaming MC scores for a batch: one shared mask set per draw.

    Returns mean_probs (N, C), predictive_entropy, expected_entropy and
    mutual_information (N,) without materializing the (N, T, C) cube.
    """
    X = check_image_batch(X)
    seeds = draw_mask_seeds(config)
    n = len(X)
    mean_probs = None
    mean_row_entropy = np.zeros(n)
    for s in seeds:
        p = classifier.predict_proba_stochastic(X, s).astype(np.float64)
        mean_probs = p if mean_probs is None else mean_probs + p
        mean_row_entropy += _entropy_rows(p)
    mean_probs /= len(seeds)
    mean_row_entropy /= len(seeds)
    pred_entropy = _entropy_rows(mean_probs)
    return {
        "mean_probs": mean_probs,
        "predictive_entropy": pred_entropy,
        "expected_entropy": mean_row_entropy,
        "mutual_information": pred_entropy - mean_row_entropy,
    }


def uncertainty_scores(pred) -> UncertaintyScores:
    """Scores from a PredictiveSamples or any row-stochastic (T, C) matrix."""
    probs = pred.probs if isinstance(pred, PredictiveSamples) else pred
    probs = check_row_stochastic(probs)
    predictive = float(_entropy_rows(probs.mean(axis=0)))
    expected = float(_entropy_rows(probs).mean())
    return UncertaintyScores(predictive, expected, predictive - expected)


def confidence(pred) -> tuple[int, float]:
    """(predicted label, confidence) from the MC-mean row; ties -> lowest index."""
    probs = pred.probs if isinstance(pred, PredictiveSamples) else pred
    probs = check_row_stochastic(probs)
    mean = probs.mean(axis=0)
    label = int(np.argmax(mean))
    return label, float(mean[label])


@dataclass(frozen=True)
class ConfidentSet:
    """Pool samples that cleared the confidence threshold, ordered by id."""

    ids: np.ndarray
    predicted_labels: np.ndarray
    confidences: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


def filter_confident(
    pool,
    classifier,
    config: UncertaintyConfig,
    max_candidates: int | None = None,
    candidate_seed: int = 0,
) -> ConfidentSet:
    """Scan the pool (or a seeded candidate subset) for confident samples.

    Keeps samples with MC-mean top probability >= t_conf, returned in
    ascending id order. ``max_candidates`` caps the scan for desk-scale
    runs; the subset is drawn deterministically from ``candidate_seed``.
    """
    ids = pool.ids
    if max_candidates is not None and len(ids) > max_candidates:
        rng = np.random.default_rng(candidate_seed)
        ids = np.sort(rng.choice(ids, size=max_candidates, replace=False))
    if len(ids) == 0:
        empty = np.zeros(0)
        return ConfidentSet(ids, empty.astype(np.int64), empty)
    scores = mc_scores_batch(classifier, pool.images(ids), config)
    mean = scores["mean_probs"]
    conf = mean.max(axis=1)
    keep = conf >= config.t_conf
    return ConfidentSet(
        ids=ids[keep],
        predicted_labels=np.argmax(mean[keep], axis=1).astype(np.int64),
        confidences=conf[keep],
    )
