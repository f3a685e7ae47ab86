"""Solution encoding and the local/global tuning drivers.

A tuned solution is the triple (k, feature mask, weight matrix).  The swarm
works in a continuous box: one dimension for k, one for the integer-encoded
mask, and one per weight cell; fixed variables (per variant) are left out of
the box entirely.  Local tuning runs one optimizer per held-out project,
global tuning runs a single optimizer whose fitness is an internal
leave-one-out pass over the whole dataset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import abe, metrics, mopso
from .data import StandardizedDataset
from .errors import BoundsError


@dataclass(frozen=True)
class SolutionVector:
    """Decision triple: analogy count, feature mask, rank-by-feature weights.

    `weights` has one row per retrievable rank; only rows 1..k are consumed.
    Optimized solutions carry rows summing to 1; the equal-weight variants
    use literal all-ones rows instead.
    """

    k: int
    mask: abe.FeatureMask
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if self.k < 1:
            raise BoundsError(f"k must be >= 1, got {self.k}")
        if w.ndim != 2 or w.shape[1] != len(self.mask.bits):
            raise BoundsError("weights must be (rows, m) with m matching the mask")
        if w.shape[0] < self.k:
            raise BoundsError(f"need at least k={self.k} weight rows, got {w.shape[0]}")

    @property
    def mask_int(self) -> int:
        v = 0
        for b in self.mask.bits:
            v = (v << 1) | int(b)
        return v


@dataclass(frozen=True)
class VariantConfig:
    """Which decision variables the optimizer may move, and the tuning mode.

    mode: "local_oracle" scores a candidate on the held-out project's actual
    effort (reproduces the published protocol, which leaks the label);
    "local_honest" scores on an internal leave-one-out pass over the fold's
    training set; "global" tunes one shared solution per dataset.
    """

    optimize_k: bool = True
    optimize_features: bool = True
    optimize_weights: bool = True
    mode: str = "local_oracle"
    fixed_k: int = 1  # used only when optimize_k is off

    def __post_init__(self):
        if not (self.optimize_k or self.optimize_features or self.optimize_weights):
            raise BoundsError("at least one decision variable must be optimized")
        if self.mode not in ("local_oracle", "local_honest", "global"):
            raise BoundsError(f"unknown mode {self.mode!r}")


# Named variants: star variants pin the mask to all ones, plus variants pin
# the weights to literal ones, the k-only scan pins both.
def variant_lt(mode: str = "local_oracle") -> VariantConfig:
    return VariantConfig(mode=mode)


def variant_gt() -> VariantConfig:
    return VariantConfig(mode="global")


def variant_lt_star(mode: str = "local_oracle") -> VariantConfig:
    return VariantConfig(optimize_features=False, mode=mode)


def variant_gt_star() -> VariantConfig:
    return VariantConfig(optimize_features=False, mode="global")


def variant_lt_plus(mode: str = "local_oracle") -> VariantConfig:
    return VariantConfig(optimize_weights=False, mode=mode)


def variant_gt_plus() -> VariantConfig:
    return VariantConfig(optimize_weights=False, mode="global")


def variant_k_only(mode: str = "local_oracle") -> VariantConfig:
    return VariantConfig(optimize_features=False, optimize_weights=False, mode=mode)


def decode_mask(v: int, m: int) -> abe.FeatureMask:
    """m-bit big-endian expansion of v; the leftmost bit is feature 0."""
    if not 1 <= v <= 2 ** m - 1:
        raise BoundsError(f"v={v} outside 1..2^{m}-1")
    bits = tuple((v >> (m - 1 - j)) & 1 for j in range(m))
    return abe.FeatureMask(bits=bits)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SolutionSpace:
    """Continuous-box layout for one tuning problem."""

    n_rows: int  # weight rows == max analogy count
    m: int
    variant: VariantConfig

    @property
    def k_max(self) -> int:
        return self.n_rows

    @property
    def dim(self) -> int:
        d = 0
        if self.variant.optimize_k:
            d += 1
        if self.variant.optimize_features:
            d += 1
        if self.variant.optimize_weights:
            d += self.n_rows * self.m
        return d

    def bounds(self) -> mopso.Bounds:
        lower, upper = [], []
        if self.variant.optimize_k:
            lower.append(1.0)
            upper.append(float(self.k_max))
        if self.variant.optimize_features:
            lower.append(1.0)
            upper.append(float(2 ** self.m - 1))
        if self.variant.optimize_weights:
            lower.extend([0.0] * (self.n_rows * self.m))
            upper.extend([1.0] * (self.n_rows * self.m))
        return mopso.Bounds(lower=np.array(lower), upper=np.array(upper))

    def split(self, x: np.ndarray):
        """(x_k, x_v, x_w) with None for fixed variables."""
        i = 0
        x_k = x_v = x_w = None
        if self.variant.optimize_k:
            x_k = x[i]
            i += 1
        if self.variant.optimize_features:
            x_v = x[i]
            i += 1
        if self.variant.optimize_weights:
            x_w = x[i:i + self.n_rows * self.m]
        return x_k, x_v, x_w


def decode_position(x: np.ndarray, n_rows: int, m: int, variant: VariantConfig) -> SolutionVector:
    """Continuous position -> solution: k and v round half-up then clamp,
    weight rows clamp to [0,1] and renormalize to sum 1 (all-zero -> uniform)."""
    space = SolutionSpace(n_rows=n_rows, m=m, variant=variant)
    x_k, x_v, x_w = space.split(np.asarray(x, dtype=float))

    if variant.optimize_k:
        k = min(max(_round_half_up(float(x_k)), 1), n_rows)
    else:
        k = min(max(variant.fixed_k, 1), n_rows)

    if variant.optimize_features:
        v = min(max(_round_half_up(float(x_v)), 1), 2 ** m - 1)
        mask = decode_mask(v, m)
    else:
        mask = abe.FeatureMask(bits=(1,) * m)

    if variant.optimize_weights:
        w = np.clip(np.asarray(x_w, dtype=float).reshape(n_rows, m), 0.0, 1.0)
        sums = w.sum(axis=1, keepdims=True)
        uniform = np.full((1, m), 1.0 / m)
        w = np.where(sums > 0, w / np.where(sums > 0, sums, 1.0), uniform)
    else:
        w = np.ones((n_rows, m))

    return SolutionVector(k=k, mask=mask, weights=w)


def encode_position(sol: SolutionVector, variant: VariantConfig | None = None) -> np.ndarray:
    """Solution -> continuous position (inverse of decode_position up to the
    weight-row renormalization no-op)."""
    variant = variant or VariantConfig()
    parts = []
    if variant.optimize_k:
        parts.append(float(sol.k))
    if variant.optimize_features:
        parts.append(float(sol.mask_int))
    if variant.optimize_weights:
        parts.extend(np.asarray(sol.weights, dtype=float).ravel().tolist())
    return np.array(parts)


def lt_objectives(train: StandardizedDataset, target_row: np.ndarray, target_actual: float,
                  sol: SolutionVector) -> np.ndarray:
    """(AE, BRE, IBRE) of the single adapted prediction, all minimized."""
    pred = abe.predict_adapted(train, target_row, sol)
    rec = metrics.PredictionRecord(actual=target_actual, predicted=pred)
    return np.array([metrics.ae(rec), metrics.bre(rec), metrics.ibre(rec)])


def _sa_for_optimization(mae, mae_p0: float):
    """SA with the degenerate zero baseline floored so fitness stays finite;
    a perfect predictor still scores exactly 1."""
    return 1.0 - mae / max(mae_p0, abe.EPS_EFFORT)


def gt_objectives(ds: StandardizedDataset, sol: SolutionVector,
                  baseline: metrics.RandomGuessBaseline | None = None) -> np.ndarray:
    """(-SA, MBRE, MIBRE) from an internal leave-one-out pass over `ds`."""
    if baseline is None:
        baseline = metrics.random_guess_baseline(ds.efforts())
    records = []
    for i in range(ds.n):
        train, target_row, actual = ds.loocv_fold(i)
        pred = abe.predict_adapted(train, target_row, sol)
        records.append(metrics.PredictionRecord(actual=actual, predicted=pred))
    suite = metrics.aggregate(records)
    sa_val = _sa_for_optimization(suite.mae, baseline.mae_p0)
    return np.array([-sa_val, suite.mbre, suite.mibre])


def select_from_front(front: Sequence[tuple]) -> tuple:
    """Pick the entry with the best average per-objective rank.

    Ranks are ascending with average ranks on ties; remaining ties break on
    the first objective value, then on front order.
    """
    if len(front) == 0:
        raise BoundsError("cannot select from an empty front")
    objs = np.array([np.asarray(o, dtype=float) for _, o in front])
    n, n_obj = objs.shape
    ranks = np.zeros((n, n_obj))
    for j in range(n_obj):
        ranks[:, j] = _average_ranks(objs[:, j])
    avg = ranks.mean(axis=1)
    order = sorted(range(n), key=lambda i: (avg[i], objs[i, 0], i))
    return front[order[0]]


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ascending ranks starting at 1; tied values share their rank mean."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


# ---------------------------------------------------------------------------
# batched evaluation
# ---------------------------------------------------------------------------

class _BatchDecoder:
    """Vectorized decode_position over a swarm; mirrors decode_position."""

    def __init__(self, space: SolutionSpace):
        self.space = space
        self.variant = space.variant
        self.n_rows = space.n_rows
        self.m = space.m
        if self.m > 62:
            raise BoundsError("batched mask decode supports up to 62 features")

    def __call__(self, X: np.ndarray):
        """Return (K, mask_matrix, W) with shapes (p,), (p, m), (p, rows, m)."""
        X = np.asarray(X, dtype=float)
        pop = X.shape[0]
        v = self.variant
        i = 0
        if v.optimize_k:
            K = np.clip(np.floor(X[:, i] + 0.5).astype(int), 1, self.n_rows)
            i += 1
        else:
            K = np.full(pop, min(max(v.fixed_k, 1), self.n_rows), dtype=int)
        if v.optimize_features:
            vint = np.clip(np.floor(X[:, i] + 0.5).astype(np.int64), 1, 2 ** self.m - 1)
            shifts = np.arange(self.m - 1, -1, -1, dtype=np.int64)
            masks = ((vint[:, None] >> shifts[None, :]) & 1).astype(float)
            i += 1
        else:
            masks = np.ones((pop, self.m))
        if v.optimize_weights:
            W = X[:, i:i + self.n_rows * self.m].reshape(pop, self.n_rows, self.m).copy()
            np.minimum(W, 1.0, out=W)
            np.maximum(W, 0.0, out=W)
            sums = W.sum(axis=2, keepdims=True)
            zero = sums == 0.0
            if zero.any():
                np.copyto(sums, 1.0, where=zero)
                W /= sums
                np.copyto(W, 1.0 / self.m, where=zero)
            else:
                W /= sums
        else:
            W = np.ones((pop, self.n_rows, self.m))
        return K, masks, W


def _owm_matrix(K: np.ndarray, kmax: int) -> np.ndarray:
    """Per-particle ordered-weighted-mean weights, zero past each k."""
    ranks = np.arange(kmax)[None, :]
    exps = K[:, None] - 1.0 - ranks
    denom = np.power(2.0, K.astype(float))[:, None] - 1.0
    return np.where(ranks < K[:, None], np.power(2.0, exps) / denom, 0.0)


class _FoldContext:
    """Per-fold precomputation: rank order, efforts and adaptation diffs."""

    def __init__(self, train: StandardizedDataset, target_row: np.ndarray):
        order = abe.neighbor_order(train, target_row)
        self.efforts = train.effort_vec[order]
        diffs = target_row[None, :] - train.matrix[order]
        diffs[:, train.categorical_mask] = 0.0
        self.diffs = diffs

    def predict_batch(self, K, masks, W, kmax: int) -> np.ndarray:
        wv = W[:, :kmax, :] * masks[:, None, :]
        adj = np.einsum("pkm,km->pk", wv, self.diffs[:kmax]) / self.diffs.shape[1]
        adapted = self.efforts[None, :kmax] + adj
        owm = _owm_matrix(K, kmax)
        return np.maximum((owm * adapted).sum(axis=1), abe.EPS_EFFORT)


class LocalProblem:
    """Single held-out project scored on (AE, BRE, IBRE) with its actual."""

    def __init__(self, train: StandardizedDataset, target_row: np.ndarray,
                 target_actual: float, variant: VariantConfig):
        self.space = SolutionSpace(n_rows=train.n, m=train.m, variant=variant)
        self.bounds = self.space.bounds()
        self.decoder = _BatchDecoder(self.space)
        self.ctx = _FoldContext(train, target_row)
        self.actual = float(target_actual)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        K, masks, W = self.decoder(X)
        pred = self.ctx.predict_batch(K, masks, W, int(K.max()))
        ae_v = np.abs(self.actual - pred)
        bre_v = ae_v / np.minimum(self.actual, pred)
        ibre_v = ae_v / np.maximum(self.actual, pred)
        return np.stack([ae_v, bre_v, ibre_v], axis=1)

    def decode(self, x: np.ndarray) -> SolutionVector:
        return decode_position(x, self.space.n_rows, self.space.m, self.space.variant)


class GlobalProblem:
    """Shared solution scored on (-SA, MBRE, MIBRE) over an internal
    leave-one-out pass; also used fold-internally by the honest local mode."""

    def __init__(self, ds: StandardizedDataset, variant: VariantConfig,
                 baseline: metrics.RandomGuessBaseline | None = None):
        self.space = SolutionSpace(n_rows=ds.n - 1, m=ds.m, variant=variant)
        self.bounds = self.space.bounds()
        self.decoder = _BatchDecoder(self.space)
        self.actuals = ds.efforts().copy()
        self.baseline = baseline or metrics.random_guess_baseline(self.actuals)
        ctxs = [_FoldContext(*ds.loocv_fold(i)[:2]) for i in range(ds.n)]
        self.efforts = np.stack([c.efforts for c in ctxs])  # (n, n-1)
        self.diffs = np.stack([c.diffs for c in ctxs])      # (n, n-1, m)

    def predict_all(self, K, masks, W, kmax: int) -> np.ndarray:
        wv = W[:, :kmax, :] * masks[:, None, :]
        adj = np.einsum("pkm,fkm->pfk", wv, self.diffs[:, :kmax, :]) / self.diffs.shape[2]
        adapted = self.efforts[None, :, :kmax] + adj
        owm = _owm_matrix(K, kmax)
        return np.maximum(np.einsum("pfk,pk->pf", adapted, owm), abe.EPS_EFFORT)

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        K, masks, W = self.decoder(X)
        pred = self.predict_all(K, masks, W, int(K.max()))  # (pop, n)
        act = self.actuals[None, :]
        ae_v = np.abs(act - pred)
        mae = ae_v.mean(axis=1)
        sa_v = _sa_for_optimization(mae, self.baseline.mae_p0)
        mbre = (ae_v / np.minimum(act, pred)).mean(axis=1)
        mibre = (ae_v / np.maximum(act, pred)).mean(axis=1)
        return np.stack([-sa_v, mbre, mibre], axis=1)

    def decode(self, x: np.ndarray) -> SolutionVector:
        return decode_position(x, self.space.n_rows, self.space.m, self.space.variant)


# ---------------------------------------------------------------------------
# tuning drivers
# ---------------------------------------------------------------------------

@dataclass
class TuningResult:
    predictions: np.ndarray
    solutions: list  # one per project (local) or a single shared solution (global)
    fronts: list     # per optimizer run: list of (SolutionVector, objective vector)
    mode: str


def _fold_seed(base_seed: int, index: int) -> int:
    return (int(base_seed) ^ index) & 0xFFFFFFFFFFFFFFFF


def _archive_front(problem, archive: mopso.Archive) -> list:
    return [(problem.decode(pos), fit.copy())
            for pos, fit in zip(archive.positions, archive.fitnesses)]


def _run_lt_fold(ds: StandardizedDataset, i: int, variant: VariantConfig,
                 cfg: mopso.MopsoConfig):
    train, target_row, actual = ds.loocv_fold(i)
    if variant.mode == "local_oracle":
        problem = LocalProblem(train, target_row, actual, variant)
    else:
        problem = GlobalProblem(train, variant)
    fold_cfg = _replace_seed(cfg, _fold_seed(cfg.seed, i))
    archive = mopso.run(problem, fold_cfg)
    front = _archive_front(problem, archive)
    sol, _ = select_from_front(front)
    pred = abe.predict_adapted(train, target_row, sol)
    return pred, sol, front


def _replace_seed(cfg: mopso.MopsoConfig, seed: int) -> mopso.MopsoConfig:
    from dataclasses import replace

    return replace(cfg, seed=seed)


def run_lt(ds: StandardizedDataset, variant: VariantConfig, cfg: mopso.MopsoConfig,
           threads: int = 1) -> TuningResult:
    """One optimizer run per held-out project; fold seeds derive from the
    base seed by XOR with the project index, so fold order is immaterial."""
    if variant.mode not in ("local_oracle", "local_honest"):
        raise BoundsError("run_lt requires a local mode")
    results = [None] * ds.n
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = {i: pool.submit(_run_lt_fold, ds, i, variant, cfg) for i in range(ds.n)}
            for i, fut in futures.items():
                results[i] = fut.result()
    else:
        for i in range(ds.n):
            results[i] = _run_lt_fold(ds, i, variant, cfg)
    preds = np.array([r[0] for r in results])
    return TuningResult(predictions=preds,
                        solutions=[r[1] for r in results],
                        fronts=[r[2] for r in results],
                        mode=variant.mode)


def run_gt(ds: StandardizedDataset, variant: VariantConfig, cfg: mopso.MopsoConfig,
           threads: int = 1) -> TuningResult:
    """One optimizer run per dataset; the chosen shared solution is then
    applied to every project under leave-one-out to produce predictions."""
    if variant.mode != "global":
        raise BoundsError("run_gt requires the global mode")
    problem = GlobalProblem(ds, variant)
    archive = mopso.run(problem, cfg)
    front = _archive_front(problem, archive)
    sol, _ = select_from_front(front)
    preds = np.empty(ds.n)
    for i in range(ds.n):
        train, target_row, _ = ds.loocv_fold(i)
        preds[i] = abe.predict_adapted(train, target_row, sol)
    return TuningResult(predictions=preds, solutions=[sol], fronts=[front], mode="global")


def best_k_abe0(ds: StandardizedDataset) -> tuple[int, np.ndarray]:
    """Scan k = 1..n-1 and keep the k with the lowest leave-one-out MAE
    (smallest k on ties); returns (k, its predictions)."""
    n = ds.n
    if n < 3:
        raise BoundsError("need at least 3 projects")
    preds = np.empty((n, n - 1))  # fold x k
    for i in range(n):
        train, target_row, _ = ds.loocv_fold(i)
        order = abe.neighbor_order(train, target_row)
        sorted_eff = train.effort_vec[order]
        preds[i] = np.cumsum(sorted_eff) / np.arange(1, n)
    mae_per_k = np.abs(preds - ds.efforts()[:, None]).mean(axis=0)
    best = int(np.argmin(mae_per_k))  # first minimum = smallest k
    return best + 1, preds[:, best]
