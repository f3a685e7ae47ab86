"""Experiment orchestration: config, method registry, reports.

An experiment is a (datasets x methods) grid evaluated under leave-one-out
cross validation.  Every stochastic step is seeded from the single config
seed, reports are recomputed from the stored per-project prediction pairs
before emission, and the machine-format JSON report is byte-identical for a
given (config, seed) regardless of thread count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, datasets, metrics, stats, tuning
from .data import FeatureSpec, Kind, Role, StandardizedDataset, pipeline
from .errors import AbetuneError, BoundsError, ConfigError
from .mopso import MopsoConfig

MEASURES = ("sa", "mbre", "mibre", "lsd", "mae")

METHOD_ORDER = ("abe0", "lt", "gt", "lt_star", "gt_star", "lt_plus", "gt_plus")

DISPLAY_NAMES = {
    "abe0": "ABE0",
    "lt": "LT",
    "gt": "GT",
    "lt_star": "LT*",
    "gt_star": "GT*",
    "lt_plus": "LT+",
    "gt_plus": "GT+",
}

_VARIANTS = {
    "lt": tuning.variant_lt,
    "gt": lambda mode=None: tuning.variant_gt(),
    "lt_star": tuning.variant_lt_star,
    "gt_star": lambda mode=None: tuning.variant_gt_star(),
    "lt_plus": tuning.variant_lt_plus,
    "gt_plus": lambda mode=None: tuning.variant_gt_plus(),
}


@dataclass(frozen=True)
class DatasetConfig:
    name: str
    path: str | None = None  # None -> bundled dataset of that name
    effort_column: str | None = None
    categorical_columns: tuple = ()
    excluded_columns: tuple = ()

    def schema_for(self, header: list[str]) -> tuple:
        specs = []
        for col in header:
            if col == self.effort_column:
                specs.append(FeatureSpec(col, Kind.NUMERIC, Role.EFFORT))
            else:
                kind = Kind.CATEGORICAL if col in self.categorical_columns else Kind.NUMERIC
                role = Role.EXCLUDED if col in self.excluded_columns else Role.INPUT
                specs.append(FeatureSpec(col, kind, role))
        return tuple(specs)


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple
    methods: tuple
    mopso: MopsoConfig
    seed: int
    baseline: str = "exact"          # "exact" or "sampled"
    baseline_runs: int = 100_000
    mode: str = "oracle"             # oracle | honest (local tuning objective)
    output_dir: str = "out"

    def echo(self) -> dict:
        """Semantic config echo for the report; execution-only knobs
        (threads, output paths) are deliberately excluded so reports stay
        byte-identical across schedulers."""
        return {
            "datasets": [
                {
                    "name": d.name,
                    "path": d.path,
                    "effort_column": d.effort_column,
                    "categorical_columns": list(d.categorical_columns),
                    "excluded_columns": list(d.excluded_columns),
                }
                for d in self.datasets
            ],
            "methods": list(self.methods),
            "mopso": {
                "pop_size": self.mopso.pop_size,
                "max_iter": self.mopso.max_iter,
                "inertia": list(self.mopso.inertia),
                "c1": self.mopso.c1,
                "c2": self.mopso.c2,
                "mutation_fraction": self.mopso.mutation_fraction,
                "mutation_exponent": self.mopso.mutation_exponent,
                "archive_capacity": self.mopso.archive_capacity,
                "leader_fraction": self.mopso.leader_fraction,
                "classical_mutation": self.mopso.classical_mutation,
            },
            "seed": self.seed,
            "baseline": self.baseline,
            "baseline_runs": self.baseline_runs,
            "mode": self.mode,
        }


def parse_config(raw: dict, base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a JSON config dict into an ExperimentConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    if "seed" not in raw:
        raise ConfigError("config must set an explicit seed (no wall-clock seeding)")
    seed = raw["seed"]
    if not isinstance(seed, int) or seed < 0 or seed >= 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")

    ds_raw = raw.get("datasets") or []
    if not ds_raw:
        raise ConfigError("config needs at least one dataset")
    ds_cfgs = []
    for entry in ds_raw:
        if isinstance(entry, str):
            entry = {"name": entry}
        name = entry.get("name")
        path = entry.get("path")
        if not name and not path:
            raise ConfigError("dataset entries need a name or a path")
        if path is None and name not in datasets.BUNDLED:
            raise ConfigError(f"unknown bundled dataset {name!r}")
        if path is not None:
            path = str((base_dir / path) if base_dir and not Path(path).is_absolute() else Path(path))
            if not entry.get("effort_column"):
                raise ConfigError(f"dataset {name or path!r}: effort_column is required with a path")
        ds_cfgs.append(DatasetConfig(
            name=name or Path(path).stem,
            path=path,
            effort_column=entry.get("effort_column"),
            categorical_columns=tuple(entry.get("categorical_columns", ())),
            excluded_columns=tuple(entry.get("excluded_columns", ())),
        ))

    methods = tuple(raw.get("methods") or ())
    if not methods:
        raise ConfigError("config needs at least one method")
    unknown = [m for m in methods if m not in METHOD_ORDER]
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; choose from {list(METHOD_ORDER)}")

    mraw = raw.get("mopso", {})
    try:
        mopso_cfg = MopsoConfig(
            pop_size=mraw.get("pop_size", 100),
            max_iter=mraw.get("max_iter", 100),
            inertia=tuple(mraw.get("inertia", (0.9, 0.4))),
            c1=mraw.get("c1", 2.0),
            c2=mraw.get("c2", 2.0),
            mutation_fraction=mraw.get("mutation_fraction", 0.5),
            mutation_exponent=mraw.get("mutation_exponent", 5.0),
            archive_capacity=mraw.get("archive_capacity", 100),
            leader_fraction=mraw.get("leader_fraction", 0.10),
            classical_mutation=mraw.get("classical_mutation", False),
            seed=seed,
        )
    except BoundsError as exc:
        raise ConfigError(f"bad mopso settings: {exc}") from exc

    baseline = raw.get("baseline", "exact")
    baseline_runs = 100_000
    if isinstance(baseline, dict):
        if list(baseline) != ["sampled"]:
            raise ConfigError('baseline must be "exact" or {"sampled": runs}')
        baseline_runs = int(baseline["sampled"])
        baseline = "sampled"
    elif baseline != "exact":
        raise ConfigError('baseline must be "exact" or {"sampled": runs}')

    mode = raw.get("mode", "oracle")
    if mode not in ("oracle", "honest"):
        raise ConfigError('mode must be "oracle" or "honest"')

    return ExperimentConfig(
        datasets=tuple(ds_cfgs),
        methods=methods,
        mopso=mopso_cfg,
        seed=seed,
        baseline=baseline,
        baseline_runs=baseline_runs,
        mode=mode,
        output_dir=raw.get("output_dir", "out"),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return parse_config(raw, base_dir=path.parent)


def load_dataset_from_config(cfg: DatasetConfig) -> StandardizedDataset:
    if cfg.path is None:
        return datasets.load_bundled(cfg.name)
    import csv as _csv

    with open(cfg.path, newline="", encoding="utf-8") as fh:
        header = [h.strip() for h in next(_csv.reader(fh))]
    if cfg.effort_column not in header:
        raise ConfigError(f"dataset {cfg.name!r}: effort column {cfg.effort_column!r} not in header")
    return pipeline(cfg.path, schema=cfg.schema_for(header), name=cfg.name)


# ---------------------------------------------------------------------------
# method registry
# ---------------------------------------------------------------------------

@dataclass
class MethodResult:
    predictions: np.ndarray
    solutions: list
    mode: str


def run_method(name: str, ds: StandardizedDataset, cfg: MopsoConfig, mode: str = "oracle",
               threads: int = 1) -> MethodResult:
    if name == "abe0":
        k, preds = tuning.best_k_abe0(ds)
        return MethodResult(predictions=preds, solutions=[{"k": k}], mode="best_k_scan")
    if name not in _VARIANTS:
        raise ConfigError(f"unknown method {name!r}")
    local_mode = "local_oracle" if mode == "oracle" else "local_honest"
    variant = _VARIANTS[name](local_mode) if name.startswith("lt") else _VARIANTS[name]()
    if variant.mode == "global":
        result = tuning.run_gt(ds, variant, cfg, threads=threads)
    else:
        result = tuning.run_lt(ds, variant, cfg, threads=threads)
    return MethodResult(predictions=result.predictions,
                        solutions=[_solution_summary(s) for s in result.solutions],
                        mode=result.mode)


def _solution_summary(sol: tuning.SolutionVector) -> dict:
    return {
        "k": sol.k,
        "v": sol.mask_int,
        "mask": list(sol.mask.bits),
        "n_rows": int(sol.weights.shape[0]),
        "weights_used": [list(map(float, row)) for row in sol.weights[: sol.k]],
    }


def run_loocv(ds: StandardizedDataset, predictor) -> list[tuple[float, float]]:
    """Hold each project out in turn; `predictor(train, target_row) -> float`.
    Returns (actual, predicted) pairs in dataset order."""
    pairs = []
    for i in range(ds.n):
        train, target_row, actual = ds.loocv_fold(i)
        try:
            pred = predictor(train, target_row)
        except Exception as exc:
            raise AbetuneError(f"{ds.name}: fold {i} failed: {exc}") from exc
        pairs.append((actual, float(pred)))
    return pairs


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass
class EvaluationReport:
    engine_version: str
    config: dict
    results: dict       # dataset -> method -> cell dict
    comparisons: dict   # dataset -> list of comparison dicts
    win_tie_loss: dict  # dataset -> method -> measure -> {win,tie,loss}
    rank_summaries: dict  # measure -> list of {method, mean_rank, rank_sd}

    def to_json(self) -> str:
        payload = {
            "engine_version": self.engine_version,
            "config": self.config,
            "results": self.results,
            "comparisons": self.comparisons,
            "win_tie_loss": self.win_tie_loss,
            "rank_summaries": self.rank_summaries,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "EvaluationReport":
        payload = json.loads(text)
        return cls(
            engine_version=payload["engine_version"],
            config=payload["config"],
            results=payload["results"],
            comparisons=payload["comparisons"],
            win_tie_loss=payload["win_tie_loss"],
            rank_summaries=payload["rank_summaries"],
        )


def _suite_dict(suite: metrics.MetricSuite) -> dict:
    return {
        "mae": suite.mae,
        "sa": suite.sa,
        "mbre": suite.mbre,
        "mibre": suite.mibre,
        "lsd": suite.lsd,
        "effect_size": suite.effect_size,
        "n": suite.n,
    }


def _compute_suite(actuals, preds, baseline) -> metrics.MetricSuite:
    records = [metrics.PredictionRecord(a, p) for a, p in zip(actuals, preds)]
    return metrics.aggregate(records, baseline)


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> EvaluationReport:
    """Evaluate every (dataset, method) cell and assemble the full report."""
    results: dict = {}
    comparisons: dict = {}
    wtl: dict = {}
    measure_tables: dict = {m: {} for m in MEASURES}

    for ds_cfg in cfg.datasets:
        ds = load_dataset_from_config(ds_cfg)
        efforts = ds.efforts()
        if cfg.baseline == "exact":
            baseline = metrics.random_guess_baseline(efforts)
        else:
            baseline = metrics.random_guess_baseline(
                efforts, mode="sampled", runs=cfg.baseline_runs, seed=cfg.seed)

        cells = {}
        errors_by_method = {}
        measures_by_method = {}
        for method in cfg.methods:
            try:
                res = run_method(method, ds, cfg.mopso, mode=cfg.mode, threads=threads)
            except AbetuneError as exc:
                raise AbetuneError(f"dataset {ds.name!r}, method {method!r}: {exc}") from exc
            suite = _compute_suite(efforts, res.predictions, baseline)
            cells[method] = {
                "metrics": _suite_dict(suite),
                "actuals": [float(a) for a in efforts],
                "predictions": [float(p) for p in res.predictions],
                "solutions": res.solutions,
                "mode": res.mode,
            }
            errors_by_method[method] = np.abs(efforts - res.predictions)
            measures_by_method[method] = {
                m: cells[method]["metrics"][m] for m in MEASURES
            }
            for m in MEASURES:
                measure_tables[m].setdefault(ds.name, {})[method] = cells[method]["metrics"][m]
        results[ds.name] = cells

        if len(cfg.methods) >= 2:
            tallies, comps = stats.win_tie_loss(errors_by_method, measures_by_method)
            comparisons[ds.name] = [
                {
                    "method_a": c.method_a,
                    "method_b": c.method_b,
                    "p_value": c.p_value,
                    "outcomes": dict(c.outcomes),
                }
                for c in comps
            ]
            wtl[ds.name] = {
                m: {e: {"win": t.win, "tie": t.tie, "loss": t.loss}
                    for e, t in tallies[m].items()}
                for m in tallies
            }
        else:
            comparisons[ds.name] = []
            wtl[ds.name] = {}

    rank_summaries = {}
    if len(cfg.methods) >= 2:
        for m in MEASURES:
            table = measure_tables[m]
            summaries = stats.rank_methods(table, measure=m,
                                           higher_is_better=(m in stats.HIGHER_IS_BETTER))
            rank_summaries[m] = [
                {"method": s.method, "mean_rank": s.mean_rank, "rank_sd": s.rank_sd}
                for s in summaries
            ]

    report = EvaluationReport(
        engine_version=__version__,
        config=cfg.echo(),
        results=results,
        comparisons=comparisons,
        win_tie_loss=wtl,
        rank_summaries=rank_summaries,
    )
    _verify_report(report, cfg)
    return report


def _verify_report(report: EvaluationReport, cfg: ExperimentConfig) -> None:
    """Recompute every metric suite from the stored prediction pairs and
    insist on exact agreement before anything is emitted."""
    for ds_name, cells in report.results.items():
        for method, cell in cells.items():
            actuals = np.array(cell["actuals"])
            preds = np.array(cell["predictions"])
            if cfg.baseline == "exact":
                baseline = metrics.random_guess_baseline(actuals)
            else:
                baseline = metrics.random_guess_baseline(
                    actuals, mode="sampled", runs=cfg.baseline_runs, seed=cfg.seed)
            suite = _compute_suite(actuals, preds, baseline)
            stored = cell["metrics"]
            for key, val in _suite_dict(suite).items():
                prev = stored[key]
                same = (prev == val) or (isinstance(prev, float) and isinstance(val, float)
                                         and math.isnan(prev) and math.isnan(val))
                if not same:
                    raise AbetuneError(
                        f"report self-check failed: {ds_name}/{method}/{key}: "
                        f"{prev!r} != {val!r}")


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.4g}"


def _human_value(measure: str, value: float) -> str:
    if measure == "sa":
        return f"{100.0 * value:.1f}" if not math.isnan(value) else "nan"
    return _fmt(value)


def emit_report(report: EvaluationReport, out_dir, formats=("csv", "markdown", "json")) -> list:
    """Write the report files; returns the list of paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    ds_names = list(report.results)
    methods = list(next(iter(report.results.values()))) if ds_names else []

    if "json" in formats:
        path = out / "report.json"
        path.write_text(report.to_json(), encoding="utf-8")
        written.append(path)

    if "csv" in formats:
        header = ["dataset"] + [f"{m}_{e}" for m in methods for e in MEASURES]
        lines = [",".join(header)]
        for d in ds_names:
            row = [d]
            for m in methods:
                for e in MEASURES:
                    row.append(_human_value(e, report.results[d][m]["metrics"][e]))
            lines.append(",".join(row))
        path = out / "metrics.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

        lines = ["dataset,method_a,method_b,p_value," + ",".join(MEASURES)]
        for d in ds_names:
            for comp in report.comparisons[d]:
                row = [d, comp["method_a"], comp["method_b"], _fmt(comp["p_value"])]
                row += [comp["outcomes"].get(e, "") for e in MEASURES]
                lines.append(",".join(row))
        path = out / "comparisons.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

        lines = ["dataset,method,measure,win,tie,loss"]
        for d in ds_names:
            for m, per_measure in report.win_tie_loss[d].items():
                for e, t in per_measure.items():
                    lines.append(f"{d},{m},{e},{t['win']},{t['tie']},{t['loss']}")
        path = out / "win_tie_loss.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

        lines = ["dataset,method,project_index,actual,predicted"]
        for d in ds_names:
            for m in methods:
                cell = report.results[d][m]
                for i, (a, p) in enumerate(zip(cell["actuals"], cell["predictions"])):
                    lines.append(f"{d},{m},{i},{a!r},{p!r}")
        path = out / "predictions.csv"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)

        if report.rank_summaries:
            lines = ["measure,method,mean_rank,rank_sd"]
            for e, summaries in report.rank_summaries.items():
                for s in summaries:
                    lines.append(f"{e},{s['method']},{_fmt(s['mean_rank'])},{_fmt(s['rank_sd'])}")
            path = out / "ranks.csv"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(path)

        written.extend(_emit_k_histograms(report, out))

    if "markdown" in formats:
        path = out / "metrics.md"
        path.write_text(_markdown_metrics(report, ds_names, methods), encoding="utf-8")
        written.append(path)

    return written


def _emit_k_histograms(report: EvaluationReport, out: Path) -> list:
    """Gnuplot-style 'k count' files for methods with per-project solutions."""
    written = []
    for d, cells in report.results.items():
        for m, cell in cells.items():
            sols = cell["solutions"]
            if len(sols) < 2 or not all("k" in s for s in sols):
                continue
            counts: dict[int, int] = {}
            for s in sols:
                counts[s["k"]] = counts.get(s["k"], 0) + 1
            lines = [f"{k} {counts[k]}" for k in sorted(counts)]
            path = out / f"k_hist_{d}_{m}.dat"
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(path)
    return written


def _markdown_metrics(report: EvaluationReport, ds_names, methods) -> str:
    header = "| dataset | " + " | ".join(
        f"{DISPLAY_NAMES.get(m, m)} {e.upper()}" for m in methods for e in MEASURES) + " |"
    sep = "|" + "---|" * (1 + len(methods) * len(MEASURES))
    lines = [header, sep]
    for d in ds_names:
        row = [d]
        for m in methods:
            for e in MEASURES:
                row.append(_human_value(e, report.results[d][m]["metrics"][e]))
        lines.append("| " + " | ".join(row) + " |")
    mode_note = report.config.get("mode", "oracle")
    lines.append("")
    lines.append(f"SA shown as a percentage. Local tuning objective mode: {mode_note}.")
    return "\n".join(lines) + "\n"
