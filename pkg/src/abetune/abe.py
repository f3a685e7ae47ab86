"""Analogy retrieval and effort adaptation.

Retrieval ranks training projects by unweighted Euclidean distance over all
input features (categorical features contribute 0 on a label match and 1
otherwise).  A retrieved analogy's effort is then adjusted by the weighted
masked feature differences and the adjusted efforts are aggregated with the
ordered weighted mean, whose rank weights halve geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BoundsError
from .data import StandardizedDataset

EPS_EFFORT = 1e-6  # floor for adapted predictions before ratio metrics


@dataclass(frozen=True)
class Neighbor:
    index: int
    distance: float
    rank: int  # 1 = nearest


@dataclass(frozen=True)
class FeatureMask:
    """Binary feature-participation flags; at least one bit must be set."""

    bits: tuple

    def __post_init__(self):
        if len(self.bits) == 0 or not any(self.bits):
            raise BoundsError("feature mask must have at least one bit set")
        if any(b not in (0, 1) for b in self.bits):
            raise BoundsError("feature mask bits must be 0 or 1")

    def as_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=float)


def _feature_distance_sq(row_a: np.ndarray, row_b: np.ndarray, cat_mask: np.ndarray) -> float:
    diff = row_a - row_b
    num_sq = np.where(cat_mask, 0.0, diff * diff)
    cat_sq = np.where(cat_mask, (row_a != row_b).astype(float), 0.0)
    return float(np.sum(num_sq + cat_sq))


def distance(row_a: np.ndarray, row_b: np.ndarray, cat_mask: np.ndarray) -> float:
    """Euclidean distance over input features; categoricals mismatch as 1."""
    return float(np.sqrt(_feature_distance_sq(row_a, row_b, cat_mask)))


def project_distance(a, b, specs) -> float:
    """Distance between two projects given their (standardized) value tuples.

    `specs` lists the input FeatureSpecs aligned with the value tuples;
    categorical cells are compared as labels.
    """
    total = 0.0
    for va, vb, spec in zip(a.values, b.values, specs):
        if spec.role.name != "INPUT":
            continue
        if spec.kind.name == "CATEGORICAL":
            total += 0.0 if va == vb else 1.0
        else:
            total += (float(va) - float(vb)) ** 2
    return float(np.sqrt(total))


def distances_to(train: StandardizedDataset, target_row: np.ndarray) -> np.ndarray:
    """Distance from every training row to the target (vectorized)."""
    diff = train.matrix - target_row[None, :]
    cat = train.categorical_mask
    sq = np.where(cat[None, :], (train.matrix != target_row[None, :]).astype(float), diff * diff)
    return np.sqrt(sq.sum(axis=1))


def neighbor_order(train: StandardizedDataset, target_row: np.ndarray) -> np.ndarray:
    """Training indices sorted by (distance, original index) for determinism."""
    d = distances_to(train, target_row)
    return np.lexsort((np.arange(len(d)), d))


def retrieve(train: StandardizedDataset, target_row: np.ndarray, k: int) -> list[Neighbor]:
    """The k nearest training projects, ranks 1..k."""
    n = train.n
    if not 1 <= k <= n:
        raise BoundsError(f"k={k} out of range 1..{n}")
    d = distances_to(train, target_row)
    order = np.lexsort((np.arange(n), d))[:k]
    return [Neighbor(index=int(i), distance=float(d[i]), rank=r + 1) for r, i in enumerate(order)]


def mean_aggregate(efforts: Sequence[float]) -> float:
    if len(efforts) == 0:
        raise BoundsError("cannot aggregate an empty effort sequence")
    return float(np.mean(efforts))


def irwm_aggregate(efforts_by_rank: Sequence[float]) -> float:
    """Inverse ranked weighted mean: rank i out of k gets weight (k+1-i)."""
    k = len(efforts_by_rank)
    if k == 0:
        raise BoundsError("cannot aggregate an empty effort sequence")
    ranks = np.arange(1, k + 1)
    return float(np.sum((k + 1 - ranks) * np.asarray(efforts_by_rank, dtype=float)) / ranks.sum())


def owm_weights(k: int) -> np.ndarray:
    """Ordered-weighted-mean weights: nearest gets 2**(k-1)/(2**k - 1)."""
    if k < 1:
        raise BoundsError("k must be >= 1")
    exponents = np.arange(k - 1, -1, -1, dtype=float)
    return np.power(2.0, exponents) / (2.0 ** k - 1.0)


def owm_aggregate(adapted_efforts_by_rank: Sequence[float]) -> float:
    efforts = np.asarray(adapted_efforts_by_rank, dtype=float)
    return float(owm_weights(len(efforts)) @ efforts)


def adaptation_diff(target_row: np.ndarray, analogy_row: np.ndarray, cat_mask: np.ndarray) -> np.ndarray:
    """Per-feature difference target-minus-analogy; categoricals contribute 0."""
    return np.where(cat_mask, 0.0, target_row - analogy_row)


def adapt_effort(
    target_row: np.ndarray,
    analogy_row: np.ndarray,
    analogy_effort: float,
    weights_row: Sequence[float],
    mask: FeatureMask,
    cat_mask: np.ndarray,
) -> float:
    """Adjust an analogy's effort by its weighted masked feature differences.

    The divisor is the total number of input features, not the masked count.
    """
    d = adaptation_diff(target_row, analogy_row, cat_mask)
    w = np.asarray(weights_row, dtype=float)
    m = len(d)
    return float(analogy_effort + (w * mask.as_array() * d).sum() / m)


def predict_abe0(train: StandardizedDataset, target_row: np.ndarray, k: int) -> float:
    """Baseline prediction: mean effort of the k nearest analogies."""
    neighbors = retrieve(train, target_row, k)
    return mean_aggregate([float(train.effort_vec[nb.index]) for nb in neighbors])


def predict_adapted(train: StandardizedDataset, target_row: np.ndarray, sol) -> float:
    """Adapt each of the k nearest analogies with its rank's weight row, then
    aggregate with the ordered weighted mean.  Result is floored at EPS_EFFORT."""
    neighbors = retrieve(train, target_row, sol.k)
    adapted = [
        adapt_effort(
            target_row,
            train.matrix[nb.index],
            float(train.effort_vec[nb.index]),
            sol.weights[nb.rank - 1],
            sol.mask,
            train.categorical_mask,
        )
        for nb in neighbors
    ]
    return max(owm_aggregate(adapted), EPS_EFFORT)
