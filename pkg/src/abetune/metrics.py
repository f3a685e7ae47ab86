"""Evaluation measures for effort predictions.

Absolute error is the base quantity; the balanced relative error divides it
by the smaller of actual/predicted, the inverted form by the larger.
Standardized accuracy compares a model's mean absolute error against random
guessing (sampling another project's effort).  Predictions are floored at a
tiny epsilon before any ratio or log measure so that aggressive adaptations
cannot produce division by zero, while still being penalized hard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .abe import EPS_EFFORT
from .errors import BoundsError, UndefinedBaselineError


@dataclass(frozen=True)
class PredictionRecord:
    actual: float
    predicted: float

    def __post_init__(self):
        if not self.actual > 0:
            raise BoundsError(f"actual effort must be positive, got {self.actual}")


@dataclass(frozen=True)
class MetricSuite:
    mae: float
    sa: float
    mbre: float
    mibre: float
    lsd: float
    effect_size: float
    n: int


@dataclass(frozen=True)
class RandomGuessBaseline:
    """Expected MAE of guessing another project's effort, plus the spread
    (sample SD) of the individual guess errors."""

    mae_p0: float
    sp0: float
    mode: str  # "exact" or "sampled(runs,seed)"


def _clamp(predicted: float) -> float:
    return max(float(predicted), EPS_EFFORT)


def ae(r: PredictionRecord) -> float:
    return abs(r.actual - r.predicted)


def bre(r: PredictionRecord) -> float:
    p = _clamp(r.predicted)
    return abs(r.actual - p) / min(r.actual, p)


def ibre(r: PredictionRecord) -> float:
    p = _clamp(r.predicted)
    return abs(r.actual - p) / max(r.actual, p)


def lsd(records: Sequence[PredictionRecord]) -> float:
    """Logarithmic standard deviation of the log residuals, with the
    half-variance correction added to each residual."""
    if len(records) < 2:
        raise BoundsError("LSD needs at least 2 records")
    lam = np.array([math.log(r.actual) - math.log(_clamp(r.predicted)) for r in records])
    s2 = float(np.var(lam, ddof=1))
    return float(np.sqrt(np.sum((lam + s2 / 2.0) ** 2) / (len(records) - 1)))


def random_guess_baseline(efforts: Sequence[float], mode="exact", runs: int = 100_000,
                          seed: int = 0) -> RandomGuessBaseline:
    """Baseline error of predicting a project by another project's effort.

    Exact mode enumerates all ordered (target, guess) pairs; sampled mode
    draws `runs` full guessing passes with a seeded generator.
    """
    e = np.asarray(efforts, dtype=float)
    n = len(e)
    if n < 2:
        raise BoundsError("baseline needs at least 2 efforts")
    if mode == "exact":
        diff = np.abs(e[:, None] - e[None, :])
        off = diff[~np.eye(n, dtype=bool)]  # the n*(n-1) ordered pairs
        sd = float(np.std(off, ddof=1)) if len(off) > 1 else 0.0
        return RandomGuessBaseline(mae_p0=float(off.mean()), sp0=sd, mode="exact")
    if mode == "sampled":
        rng = np.random.default_rng(seed)
        # one run = guess every project once from the other n-1
        offsets = rng.integers(1, n, size=(runs, n))
        guess_idx = (np.arange(n)[None, :] + offsets) % n
        errs = np.abs(e[None, :] - e[guess_idx]).ravel()
        return RandomGuessBaseline(
            mae_p0=float(errs.mean()),
            sp0=float(np.std(errs, ddof=1)),
            mode=f"sampled({runs},{seed})",
        )
    raise BoundsError(f"unknown baseline mode {mode!r}")


def sa(mae: float, baseline: RandomGuessBaseline) -> float:
    """Standardized accuracy: 1 - MAE/MAE_p0 (fraction; reports show x100).

    A perfect predictor scores 1 on any dataset, even one whose efforts are
    all equal (where the guessing baseline itself is zero)."""
    if mae == 0:
        return 1.0
    if baseline.mae_p0 <= 0:
        raise UndefinedBaselineError("random-guess baseline MAE is zero")
    return 1.0 - mae / baseline.mae_p0


def effect_size(mae: float, baseline_mae: float, baseline_sd: float, signed: bool = False) -> float:
    """Improvement over a baseline in units of the baseline's SD.

    Reported as a magnitude by default; the raw signed value (negative when
    better than the baseline) is available with signed=True.
    """
    if baseline_sd <= 0:
        raise UndefinedBaselineError("baseline SD must be positive")
    delta = (mae - baseline_mae) / baseline_sd
    return delta if signed else abs(delta)


def aggregate(records: Sequence[PredictionRecord],
              baseline: RandomGuessBaseline | None = None) -> MetricSuite:
    """Mean AE/BRE/IBRE plus LSD, and SA/effect size when a baseline is given.

    LSD needs two records and SA needs a baseline; absent either, the field
    is NaN rather than an error so partial suites stay usable.
    """
    if len(records) == 0:
        raise BoundsError("cannot aggregate zero records")
    mae = float(np.mean([ae(r) for r in records]))
    mbre = float(np.mean([bre(r) for r in records]))
    mibre = float(np.mean([ibre(r) for r in records]))
    lsd_val = lsd(records) if len(records) >= 2 else math.nan
    if baseline is not None and (mae == 0 or baseline.mae_p0 > 0):
        sa_val = sa(mae, baseline)
        delta = effect_size(mae, baseline.mae_p0, baseline.sp0) if baseline.sp0 > 0 else math.nan
    else:
        sa_val = math.nan
        delta = math.nan
    return MetricSuite(mae=mae, sa=sa_val, mbre=mbre, mibre=mibre, lsd=lsd_val,
                       effect_size=delta, n=len(records))
