"""Scenario runners for the four FRS experiments and general sweeps.

Every scenario x seed pair is one simulation; all pairs of an experiment go
through a single batched kernel call and are reassembled by
(scenario index, seed index), so reports do not depend on execution order.

Directional claims about quality are reported as per-seed sign statistics,
never asserted. Checks are the mechanically forced properties of the model
(monotone stocks, exact t=0 rates, debias dominance).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .compiler import CompiledModel, compile_model
from .engine import RngPolicy, RunConfig, RunResult, simulate_batch
from .errors import SDSimError, UnknownOverride
from .expr import format_number
from .frs import (
    BIAS_INFLOW,
    BIAS_STOCK,
    DEBIAS_OUTFLOW,
    QUALITY,
    DISTRIBUTION_TABLE,
    Preset,
    build_frs_model,
    coefficient,
    preset,
)
from .output import render_chart, write_csv
from .stats import Exponential, Gamma, LogNormal, SampleSummary, describe, reduce_run, sample, skewness

DEFAULT_SEEDS = tuple(range(1, 21))
BASE_TRACKED = (BIAS_STOCK, "FRE", "HCI", "Performance", QUALITY)
REPORT_SCHEMA = "sdsim.experiment-report/1"


@dataclass
class ExperimentSpec:
    name: str
    scenarios: list[tuple[str, Preset]]
    seeds: list[int]
    reducer: str = "time-mean"
    tracked: list[str] = field(default_factory=lambda: list(BASE_TRACKED))
    metric: str = QUALITY

    def validate(self, model: CompiledModel) -> None:
        if not self.scenarios:
            raise ValueError("an experiment needs at least one scenario")
        if not self.seeds:
            raise ValueError("an experiment needs at least one seed")
        for s in self.seeds:
            if not 0 <= int(s) < 2**64:
                raise ValueError(f"seed {s} is not an unsigned 64-bit integer")
        for name in [*self.tracked, self.metric]:
            if name not in model.slot:
                raise KeyError(f"tracked variable {name!r} is not in the model")
        for _, p in self.scenarios:
            for name in p.overrides:
                if name not in model.constants and name not in model.flows:
                    raise UnknownOverride(name)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Claim:
    claim: str
    statistic: str
    count: int
    total: int
    threshold: Optional[int] = None

    @property
    def fraction(self) -> float:
        return self.count / self.total if self.total else 0.0

    @property
    def supported(self) -> bool:
        need = self.threshold if self.threshold is not None else self.total // 2 + 1
        return self.count >= need


@dataclass
class Comparison:
    a: str
    b: str
    mean_difference: float
    signs: list[int]

    @property
    def fraction_a_lower(self) -> float:
        return sum(1 for s in self.signs if s < 0) / len(self.signs)

    @property
    def consistent(self) -> bool:
        return len(set(self.signs)) == 1


@dataclass
class Figure:
    filename: str
    title: str
    series: dict[str, np.ndarray]
    times: np.ndarray
    normalize: bool = False
    ylabel: str = ""


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    runs: dict[str, list[RunResult]]
    metric_values: dict[str, list[float]]
    final_values: dict[str, list[float]]
    summaries: dict[str, SampleSummary]
    final_summaries: dict[str, SampleSummary]
    comparisons: list[Comparison] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    claims: list[Claim] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    figures: list[Figure] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.spec.scenarios]

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def claim(self, text: str) -> Claim:
        for c in self.claims:
            if c.claim == text:
                return c
        raise KeyError(text)

    def ensemble_mean(self, label: str, variable: str) -> np.ndarray:
        return np.mean([r[variable] for r in self.runs[label]], axis=0)


_MODEL: Optional[CompiledModel] = None


def frs_compiled() -> CompiledModel:
    global _MODEL
    if _MODEL is None:
        _MODEL = compile_model(build_frs_model())
    return _MODEL


def run_experiment(spec: ExperimentSpec, model: Optional[CompiledModel] = None,
                   extra_saved: Sequence[str] = ()) -> ExperimentReport:
    model = model or frs_compiled()
    spec.validate(model)
    save = sorted(set([*spec.tracked, spec.metric, *extra_saved]), key=model.slot.__getitem__)
    configs = [RunConfig(RngPolicy(global_seed=int(seed)), dict(p.overrides))
               for _, p in spec.scenarios for seed in spec.seeds]
    results = simulate_batch(model, configs, save=save)
    n = len(spec.seeds)
    runs = {label: results[i * n:(i + 1) * n] for i, (label, _) in enumerate(spec.scenarios)}
    metric_values = {k: [reduce_run(r, spec.metric, spec.reducer) for r in v] for k, v in runs.items()}
    final_values = {k: [r.final(spec.metric) for r in v] for k, v in runs.items()}
    return ExperimentReport(
        spec=spec,
        runs=runs,
        metric_values=metric_values,
        final_values=final_values,
        summaries={k: describe(v) for k, v in metric_values.items()},
        final_summaries={k: describe(v) for k, v in final_values.items()},
    )


def compare(report: ExperimentReport, a: str, b: str) -> Comparison:
    va = np.array(report.metric_values[a])
    vb = np.array(report.metric_values[b])
    signs = [int(np.sign(x - y)) for x, y in zip(va, vb)]
    comp = Comparison(a, b, float(np.mean(va - vb)), signs)
    report.comparisons.append(comp)
    return comp


def _seeds(seeds) -> list[int]:
    seeds = list(DEFAULT_SEEDS if seeds is None else seeds)
    if not seeds:
        raise ValueError("seed list must not be empty")
    return [int(s) for s in seeds]


def _strictly_increasing(a: np.ndarray) -> bool:
    return bool(np.all(np.diff(a) > 0))


# -- base run -------------------------------------------------------------------


def run_base(seeds=None) -> ExperimentReport:
    seeds = _seeds(seeds)
    model = frs_compiled()
    spec = ExperimentSpec("base", [("base", preset("base"))], seeds)
    report = run_experiment(spec, model)
    runs = report.runs["base"]

    bias_ok = True
    for r in runs:
        inc = np.diff(r[BIAS_STOCK])
        bias_ok &= bool(np.all(inc > 0) and np.all(np.diff(inc) < 0))
    report.checks.append(Check(
        "bias-growth-decelerates", bias_ok,
        "Distribution of Bias strictly increasing with strictly decreasing per-step increments"))
    report.checks.append(Check("fre-increasing", all(_strictly_increasing(r["FRE"]) for r in runs),
                               "FRE strictly increasing"))
    report.checks.append(Check("hci-increasing", all(_strictly_increasing(r["HCI"]) for r in runs),
                               "HCI strictly increasing"))
    desired = model.constants["Desired Interactions"]
    report.checks.append(Check("hci-below-desired", all(float(r["HCI"].max()) < desired for r in runs),
                               f"HCI < {format_number(desired)} throughout"))
    quiet = [s for s in model.stocks if not model.is_noisy(s)]
    same = all(np.array_equal(r[s], runs[0][s]) for r in runs for s in quiet if s in r.series)
    report.checks.append(Check("noise-free-stocks-seed-invariant", same,
                               "identical across seeds: " + ", ".join(quiet)))
    report.extras["noise_free_stocks"] = quiet
    report.extras["step1"] = {
        BIAS_STOCK: float(runs[0][BIAS_STOCK][1]) if len(runs[0].times) > 1 else None,
        "HCI": float(runs[0]["HCI"][1]) if len(runs[0].times) > 1 else None,
    }
    first = runs[0]
    report.figures.append(Figure(
        "base_stocks.svg", "Base run: bias distribution, FRE and HCI (seed %d)" % seeds[0],
        {BIAS_STOCK: first[BIAS_STOCK], "FRE": first["FRE"], "HCI": first["HCI"]},
        first.times, normalize=True))
    report.figures.append(Figure(
        "base_quality.svg", "Base run: Avg Quality, mean over seeds",
        {QUALITY: report.ensemble_mean("base", QUALITY)}, first.times, ylabel="quality/recommendations"))
    return report


# -- bias activation ------------------------------------------------------------

ACTIVATION = ("base", "inductive-x2", "user-x2", "all-bias-x5")


def run_activation(seeds=None) -> ExperimentReport:
    seeds = _seeds(seeds)
    spec = ExperimentSpec("activation", [(n, preset(n)) for n in ACTIVATION], seeds,
                          tracked=[BIAS_STOCK, "Performance", QUALITY])
    report = run_experiment(spec, extra_saved=[BIAS_INFLOW])
    base = report.runs["base"][0]
    x5 = report.runs["all-bias-x5"][0]
    inflow_base = float(base[BIAS_INFLOW][0])
    inflow_x5 = float(x5[BIAS_INFLOW][0])
    report.checks.append(Check(
        "x5-inflow-five-times-base", inflow_x5 == 5.0 * inflow_base,
        f"bias inflow at t=0: all-bias-x5 {inflow_x5!r}, base {inflow_base!r}"))
    dominates = all(
        bool(np.all(hi[BIAS_STOCK] >= lo[BIAS_STOCK]) and np.all(hi[BIAS_STOCK][1:] > lo[BIAS_STOCK][1:]))
        for hi, lo in zip(report.runs["all-bias-x5"], report.runs["base"]))
    report.checks.append(Check("x5-bias-dominates-base", dominates,
                               "all-bias-x5 Distribution of Bias >= base at every saved time (> after t=0)"))
    report.extras["inflow_t0"] = {"base": inflow_base, "all-bias-x5": inflow_x5}

    comp = compare(report, "inductive-x2", "user-x2")
    for other in ("inductive-x2", "user-x2", "all-bias-x5"):
        compare(report, other, "base")
    lower = sum(1 for s in comp.signs if s < 0)
    report.claims.append(Claim(
        "inductive bias lowers quality more than user bias",
        "seeds where time-mean Avg Quality(inductive-x2) < (user-x2)",
        lower, len(seeds), threshold=_three_quarters(len(seeds))))
    x5_lowest = sum(
        1 for i in range(len(seeds))
        if report.metric_values["all-bias-x5"][i] == min(report.metric_values[k][i] for k in ACTIVATION))
    report.claims.append(Claim(
        "all biases at five times base give the lowest quality",
        "seeds where all-bias-x5 has the lowest time-mean Avg Quality", x5_lowest, len(seeds)))
    t = base.times
    report.figures.append(Figure("activation_quality.svg", "Bias activation: Avg Quality, mean over seeds",
                                 {k: report.ensemble_mean(k, QUALITY) for k in ACTIVATION}, t,
                                 ylabel="quality/recommendations"))
    report.figures.append(Figure("activation_bias.svg", "Bias activation: Distribution of Bias",
                                 {k: report.runs[k][0][BIAS_STOCK] for k in ACTIVATION}, t,
                                 ylabel="bias/interactions"))
    return report


def _three_quarters(n: int) -> int:
    # 15 of 20 seeds
    return -(-3 * n // 4)


# -- bias distributions ---------------------------------------------------------

DISTRIBUTIONS = ("dist-exponential", "dist-lognormal", "dist-gamma2", "dist-gamma4")
SAMPLERS = (
    ("Exponential", Exponential(1.0)),
    ("Log Normal", LogNormal(0.0, 0.5)),
    ("Gamma with alpha = 2", Gamma(2.0, 1.0)),
    ("Gamma with alpha = 4", Gamma(4.0, 1.0)),
)


def sampler_skewness(n: int = 1_000_000, seed: int = 0) -> list[dict]:
    rows = []
    for (label, dist), (_, table_skew, rel) in zip(SAMPLERS, DISTRIBUTION_TABLE):
        xs = sample(dist, n, seed)
        rows.append({
            "distribution": label,
            "sampler": repr(dist),
            "n": n,
            "empirical_skewness": skewness(xs),
            "analytic_skewness": dist.analytic_skewness(),
            "table_skewness": table_skew,
            "table_relative_bias": rel,
        })
    return rows


def run_distributions(seeds=None, sampler_n: int = 1_000_000) -> ExperimentReport:
    seeds = _seeds(seeds)
    spec = ExperimentSpec("distributions", [(n, preset(n)) for n in DISTRIBUTIONS], seeds,
                          tracked=[BIAS_STOCK, "Performance", QUALITY])
    report = run_experiment(spec)
    report.extras["distribution_table"] = [
        {"distribution": d, "preset": p, "skewness": s, "relative_bias": rb}
        for (d, s, rb), p in zip(DISTRIBUTION_TABLE, DISTRIBUTIONS)
    ]
    report.extras["coefficients"] = {p: coefficient(preset(p)) for p in DISTRIBUTIONS}
    report.extras["ranking"] = sorted(DISTRIBUTIONS, key=lambda k: -report.summaries[k].mean)
    per_seed = []
    for i in range(len(seeds)):
        per_seed.append(sorted(DISTRIBUTIONS, key=lambda k: -report.metric_values[k][i]))
    report.extras["ranking_per_seed"] = per_seed
    report.extras["sampler_skewness"] = sampler_skewness(sampler_n)

    top = sum(1 for r in per_seed if r[0] == "dist-lognormal")
    report.claims.append(Claim("log-normal gives the highest average quality",
                               "seeds where dist-lognormal ranks first", top, len(seeds)))
    comp = compare(report, "dist-gamma2", "dist-gamma4")
    lower = sum(1 for s in comp.signs if s < 0)
    report.claims.append(Claim("lower gamma alpha gives lower average quality",
                               "seeds where dist-gamma2 < dist-gamma4", lower, len(seeds)))
    t = report.runs[DISTRIBUTIONS[0]][0].times
    report.figures.append(Figure("distributions_quality.svg", "Bias distributions: Avg Quality, mean over seeds",
                                 {k: report.ensemble_mean(k, QUALITY) for k in DISTRIBUTIONS}, t,
                                 ylabel="quality/recommendations"))
    return report


# -- interventions --------------------------------------------------------------

INTERVENTIONS = ("all-bias-x5", "intervention-research", "intervention-full")


def run_interventions(seeds=None) -> ExperimentReport:
    seeds = _seeds(seeds)
    spec = ExperimentSpec("interventions", [(n, preset(n)) for n in INTERVENTIONS], seeds,
                          tracked=[BIAS_STOCK, "Performance", QUALITY])
    report = run_experiment(spec, extra_saved=[DEBIAS_OUTFLOW])
    outflow = {k: float(report.runs[k][0][DEBIAS_OUTFLOW][0]) for k in INTERVENTIONS}
    report.extras["debias_outflow_t0"] = outflow
    report.checks.append(Check("baseline-debias-outflow-zero", outflow["all-bias-x5"] == 0.0,
                               f"all-bias-x5 outflow at t=0 = {outflow['all-bias-x5']!r}"))
    report.checks.append(Check("research-debias-outflow-five", outflow["intervention-research"] == 5.0,
                               f"intervention-research outflow at t=0 = {outflow['intervention-research']!r}"))
    for k in ("intervention-research", "intervention-full"):
        ok = all(
            bool(np.all(lo[BIAS_STOCK] <= hi[BIAS_STOCK]) and np.all(lo[BIAS_STOCK][1:] < hi[BIAS_STOCK][1:]))
            for lo, hi in zip(report.runs[k], report.runs["all-bias-x5"]))
        report.checks.append(Check(f"{k}-reduces-bias", ok,
                                   f"{k} Distribution of Bias below all-bias-x5 at every saved time after t=0"))

    deltas = {}
    for k in ("intervention-research", "intervention-full"):
        comp = compare(report, k, "all-bias-x5")
        deltas[k] = [a - b for a, b in zip(report.metric_values[k], report.metric_values["all-bias-x5"])]
        better = sum(1 for s in comp.signs if s > 0)
        report.claims.append(Claim(f"{k} improves quality over all-bias-x5",
                                   f"seeds where {k} time-mean Avg Quality > all-bias-x5", better, len(seeds)))
    report.extras["quality_deltas"] = deltas
    comp = compare(report, "intervention-full", "intervention-research")
    report.claims.append(Claim("comprehensive interventions beat research-only interventions",
                               "seeds where intervention-full > intervention-research",
                               sum(1 for s in comp.signs if s > 0), len(seeds)))
    t = report.runs[INTERVENTIONS[0]][0].times
    report.figures.append(Figure("interventions_quality.svg", "Interventions: Avg Quality, mean over seeds",
                                 {k: report.ensemble_mean(k, QUALITY) for k in INTERVENTIONS}, t,
                                 ylabel="quality/recommendations"))
    report.figures.append(Figure("interventions_bias.svg", "Interventions: Distribution of Bias",
                                 {k: report.runs[k][0][BIAS_STOCK] for k in INTERVENTIONS}, t,
                                 ylabel="bias/interactions"))
    return report


# -- sweeps -----------------------------------------------------------------------


def sweep(param: str, values: Sequence[float], seeds=None, model: Optional[CompiledModel] = None,
          metric: str = QUALITY) -> ExperimentReport:
    seeds = _seeds(seeds)
    model = model or frs_compiled()
    if param not in model.constants and param not in model.flows:
        raise UnknownOverride(param)
    if not values:
        raise ValueError("sweep needs at least one value")
    scenarios = []
    for v in values:
        label = f"{param}={format_number(float(v))}"
        scenarios.append((label, Preset(label, {param: float(v)}, f"{param} set to {format_number(float(v))}")))
    tracked = [n for n in BASE_TRACKED if n in model.slot] or [metric]
    spec = ExperimentSpec(f"sweep:{param}", scenarios, seeds, tracked=tracked, metric=metric)
    report = run_experiment(spec, model)
    means = [report.summaries[label].mean for label, _ in scenarios]
    report.extras["sweep"] = {"param": param, "values": [float(v) for v in values], "means": means,
                              "monotonicity": monotonicity(means)}
    t = report.runs[scenarios[0][0]][0].times
    report.figures.append(Figure("sweep_metric.svg", f"Sweep of {param}: {metric}, mean over seeds",
                                 {label: report.ensemble_mean(label, metric) for label, _ in scenarios}, t))
    return report


def monotonicity(values: Sequence[float]) -> str:
    d = np.diff(np.asarray(values, dtype=float))
    if d.size == 0 or np.all(d == 0):
        return "constant"
    if np.all(d >= 0):
        return "increasing"
    if np.all(d <= 0):
        return "decreasing"
    return "non-monotone"


RUNNERS = {
    "base": run_base,
    "activation": run_activation,
    "distributions": run_distributions,
    "interventions": run_interventions,
}


# -- serialization ----------------------------------------------------------------

_UNSAFE = re.compile(r"[^A-Za-z0-9_.=-]+")


def safe_label(label: str) -> str:
    return _UNSAFE.sub("_", label)


def run_filename(label: str, seed: int) -> str:
    return f"{safe_label(label)}__seed{seed}.csv"


def report_to_dict(report: ExperimentReport) -> dict:
    spec = report.spec
    scenarios = []
    for label, p in spec.scenarios:
        runs = []
        for seed, r, m, f in zip(spec.seeds, report.runs[label], report.metric_values[label],
                                 report.final_values[label]):
            runs.append({"seed": seed, "csv": f"runs/{run_filename(label, seed)}", "metric": m, "final": f})
        scenarios.append({
            "label": label,
            "preset": p.name,
            "description": p.description,
            "overrides": dict(p.overrides),
            "runs": runs,
            "summary": report.summaries[label].as_dict(),
            "final_summary": report.final_summaries[label].as_dict(),
        })
    return {
        "schema": REPORT_SCHEMA,
        "experiment": spec.name,
        "metric": spec.metric,
        "reducer": spec.reducer,
        "tracked": list(spec.tracked),
        "seeds": list(spec.seeds),
        "scenarios": scenarios,
        "comparisons": [
            {"a": c.a, "b": c.b, "mean_difference": c.mean_difference, "signs": c.signs,
             "fraction_a_lower": c.fraction_a_lower, "consistent": c.consistent}
            for c in report.comparisons
        ],
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks],
        "claims": [
            {"claim": c.claim, "statistic": c.statistic, "count": c.count, "total": c.total,
             "fraction": c.fraction, "supported": c.supported}
            for c in report.claims
        ],
        "extras": report.extras,
        "figures": [f.filename for f in report.figures],
    }


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n"


def summary_markdown(report: ExperimentReport) -> str:
    spec = report.spec
    lines = [f"# Experiment: {spec.name}", "",
             f"Seeds: {', '.join(str(s) for s in spec.seeds)}  ",
             f"Metric: {spec.reducer} of {spec.metric}", "",
             "| scenario | overrides | mean | sd | final-value mean |",
             "|---|---|---|---|---|"]
    for label, p in spec.scenarios:
        s, f = report.summaries[label], report.final_summaries[label]
        ov = ", ".join(f"{k}={format_number(v)}" for k, v in p.overrides.items()) or "(none)"
        lines.append(f"| {label} | {ov} | {s.mean:.6g} | {s.sd:.4g} | {f.mean:.6g} |")
    if report.checks:
        lines += ["", "## Checks", ""]
        lines += [f"- [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}" for c in report.checks]
    if report.claims:
        lines += ["", "## Claims (per-seed sign statistics)", ""]
        for c in report.claims:
            verdict = "supported" if c.supported else "NOT supported (discrepancy)"
            lines.append(f"- {c.claim}: {c.count}/{c.total} ({c.statistic}) -> {verdict}")
    if report.comparisons:
        lines += ["", "## Comparisons", "", "| a | b | mean(a - b) | a < b in |", "|---|---|---|---|"]
        for c in report.comparisons:
            lines.append(f"| {c.a} | {c.b} | {c.mean_difference:.6g} | "
                         f"{sum(1 for s in c.signs if s < 0)}/{len(c.signs)} |")
    ex = report.extras
    if "distribution_table" in ex:
        lines += ["", "## Distribution presets", "",
                  "| preset | skewness | relative bias | coefficient | mean quality | rank |",
                  "|---|---|---|---|---|---|"]
        for row in ex["distribution_table"]:
            p = row["preset"]
            lines.append(f"| {p} | {row['skewness']} | {row['relative_bias']} | {ex['coefficients'][p]:.6g} | "
                         f"{report.summaries[p].mean:.6g} | {ex['ranking'].index(p) + 1} |")
        lines += ["", "### Sampler skewness vs table values", "",
                  "| distribution | sampler | empirical | analytic | table |", "|---|---|---|---|---|"]
        for row in ex["sampler_skewness"]:
            lines.append(f"| {row['distribution']} | {row['sampler']} | {row['empirical_skewness']:.4f} | "
                         f"{row['analytic_skewness']:.4f} | {row['table_skewness']} |")
    if "quality_deltas" in ex:
        lines += ["", "## Per-seed quality deltas vs all-bias-x5", ""]
        for k, ds in ex["quality_deltas"].items():
            pos = sum(1 for d in ds if d > 0)
            lines.append(f"- {k}: mean {np.mean(ds):.6g}, positive in {pos}/{len(ds)} seeds")
    if "sweep" in ex:
        sw = ex["sweep"]
        lines += ["", f"## Sweep of {sw['param']}: {sw['monotonicity']}", ""]
        lines += [f"- {format_number(v)}: {m:.6g}" for v, m in zip(sw["values"], sw["means"])]
    if report.figures:
        lines += ["", "## Figures", ""] + [f"- {f.filename}: {f.title}" for f in report.figures]
    return "\n".join(lines) + "\n"


def write_report(report: ExperimentReport, outdir) -> Path:
    """Write report.json, summary.md, runs/*.csv and the figure SVGs."""
    out = Path(outdir)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    for label, _ in report.spec.scenarios:
        for seed, r in zip(report.spec.seeds, report.runs[label]):
            cols = [n for n in r.series if n in report.spec.tracked]
            write_csv(r, out / "runs" / run_filename(label, seed), names=cols)
    for fig in report.figures:
        render_chart(fig.series, out / fig.filename, times=fig.times, title=fig.title,
                     normalize=fig.normalize, ylabel=fig.ylabel)
    (out / "report.json").write_text(report_json(report), encoding="utf-8", newline="\n")
    (out / "summary.md").write_text(summary_markdown(report), encoding="utf-8", newline="\n")
    return out


__all__ = [
    "ExperimentSpec", "ExperimentReport", "Check", "Claim", "Comparison", "run_experiment",
    "run_base", "run_activation", "run_distributions", "run_interventions", "sweep",
    "write_report", "report_json", "SDSimError",
]
