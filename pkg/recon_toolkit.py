import argparse
import os
import sys
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from core.arma import (
    ArmaModel,
    fit,
    outlier_break_proximity,
    residual_diagnostics,
    select_order,
    simulate,
    whiten,
)
from core.arma.diagnostics import MIN_LENGTH
from core.ccf import cross_correlation, prewhitened_ccf, significant_lags
from core.errors import ToolkitError, UsageError
from core.io import (
    bar_chart,
    build_manifest,
    combine,
    dumps,
    line_chart,
    load_csv,
    result_document,
    save_csv,
    to_csv_text,
    to_jsonable,
    write_svg,
)
from core.lagmodel import (
    ConstantMeanBuilder,
    LagSpec,
    TransferBuilder,
    fit_transfer,
    holdout_eval,
    lag_scan,
    predict,
)
from core.logkit import configure_logging, get_logger
from core.pca import decompose, score_series
from core.segmentation import segment
from core.series import TimeSeries, difference, sample_acf, sample_pacf
from core.settings import get_settings
from core import simulate as fixtures

# --- CORE CONFIGURATION & SETUP ---
PROJECT_NAME = "Reconstruction Diagnostics Toolkit"
SETTINGS = get_settings()
log = get_logger("cli")

PREWHITEN_MODES = {"none": "raw", "x": "prewhitened-x", "both": "prewhitened-both"}
SYSTEMS = ("arma", "signal-plus-noise", "lag14", "lag3", "piecewise", "independent")


@dataclass
class Outcome:
    results: dict
    table: object = None
    svg: str | None = None
    inputs: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    alignment: dict | None = None


class ToolkitParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so `main` owns the exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- Helpers ---
def _floats(text: str | None) -> tuple[float, ...]:
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _term(text: str) -> LagSpec:
    label, sep, offsets = text.partition("=")
    if not sep or not label.strip():
        raise UsageError(f"--term expects LABEL=OFFSET[,OFFSET...], got {text!r}")
    try:
        return LagSpec(label.strip(), tuple(int(o) for o in offsets.split(",") if o.strip()))
    except ValueError as exc:
        raise UsageError(f"bad --term {text!r}: {exc}") from None


def _block(text: str) -> tuple[int, int]:
    a, sep, b = text.partition(":")
    try:
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"--block expects START:END, got {text!r}") from None


def _read_series(path: str, column: str | None = None) -> TimeSeries:
    return load_csv(path, "response", column).series


def _fit_summary(report) -> dict:
    m = report.model
    return {
        "order": list(report.order),
        "ar": list(m.ar),
        "ma": list(m.ma),
        "mean": m.mean,
        "noise_variance": m.noise_variance,
        "loglik": report.loglik,
        "aicc": report.aicc,
        "converged": report.converged,
        "iterations": report.iterations,
        "n": report.n,
    }


def _diagnostics_summary(residuals: TimeSeries) -> dict | None:
    if len(residuals) < MIN_LENGTH:
        return None
    d = residual_diagnostics(residuals)
    return {
        "outlier_times": list(d.outlier_times),
        "outlier_zscores": list(d.outlier_zscores),
        "robust_scale": d.robust_scale,
        "variance_ratio": d.variance_ratio,
        "variance_pvalue": d.variance_pvalue,
        "split_time": d.split_time,
        "ljung_box": {"statistic": d.ljung_box.statistic, "lags": d.ljung_box.lags,
                      "dof": d.ljung_box.dof, "pvalue": d.ljung_box.pvalue},
    }


def _pca_covariate(args, response: TimeSeries) -> tuple[TimeSeries, TimeSeries, dict]:
    """Response and PCA score restricted to the common years, plus the alignment record."""
    pan = load_csv(args.panel, "panel")
    data = combine(response, pan.panel)
    decomp = decompose(data.panel, args.pca_component + 1, standardize=not args.no_standardize)
    score = score_series(decomp, args.pca_component)
    info = {
        "alignment": data.provenance["alignment"],
        "explained_ratio": decomp.explained_ratio[args.pca_component],
        "imputed_cells": sum(decomp.imputed_counts.values()),
    }
    return data.response, score, info


def _resolve_pair(args) -> tuple[TimeSeries, TimeSeries, dict, list[str]]:
    """(response, covariate) from --covariate or --panel/--pca-component."""
    y = _read_series(args.response, args.response_column)
    if args.covariate:
        return y, _read_series(args.covariate, args.covariate_column), {}, [args.response, args.covariate]
    if args.panel:
        y, x, info = _pca_covariate(args, y)
        return y, x, info, [args.response, args.panel]
    raise UsageError("give either --covariate or --panel")


def _covariate_pool(args, y: TimeSeries) -> tuple[TimeSeries, dict[str, TimeSeries], list[str], dict | None]:
    """Named covariate series from --covariates (one per column) and the PCA score of --panel."""
    pool, inputs, alignment = {}, [args.response], None
    if args.covariates:
        panel = load_csv(args.covariates, "panel").panel
        for j, label in enumerate(panel.proxy_ids):
            pool[label] = TimeSeries(panel.start_time, panel.values[:, j], label)
        inputs.append(args.covariates)
    if args.panel:
        y, score, info = _pca_covariate(args, y)
        pool[score.name] = score
        inputs.append(args.panel)
        alignment = info["alignment"]
    return y, pool, inputs, alignment


def _specs(args, pool: dict[str, TimeSeries]) -> list[tuple[TimeSeries, LagSpec]]:
    out = []
    for spec in args.term or []:
        if spec.label not in pool:
            raise UsageError(f"--term names '{spec.label}' but the covariates are {sorted(pool)}")
        out.append((pool[spec.label], spec))
    return out


# --- SUBCOMMANDS ---
def cmd_diff(args) -> Outcome:
    series = _read_series(args.input, args.column)
    d = difference(series, args.lag)
    results = {"lag": args.lag, "start_time": d.start_time, "values": d.values, "name": d.name}
    svg = line_chart(d.times, {f"diff lag {args.lag}": d.values}, f"{d.name}: lag-{args.lag} difference")
    return Outcome(results, d, svg, [args.input])


def cmd_acf(args) -> Outcome:
    series = _read_series(args.input, args.column)
    if args.difference:
        series = difference(series, args.difference)
    acf = (sample_pacf if args.partial else sample_acf)(series, args.max_lag)
    kind = "PACF" if args.partial else "ACF"
    results = {
        "partial": acf.partial,
        "difference": args.difference,
        "n": acf.n,
        "bound": acf.bound,
        "lags": acf.lags,
        "correlations": acf.correlations,
        "exceedances": acf.exceedances(),
    }
    table = pd.DataFrame({"lag": acf.lags, "correlation": acf.correlations,
                          "significant": np.abs(acf.correlations) > acf.bound})
    svg = bar_chart(acf.lags, acf.correlations, f"{kind} of {series.name}", bound=acf.bound)
    return Outcome(results, table, svg, [args.input])


def cmd_fit_arma(args) -> Outcome:
    series = _read_series(args.input, args.column)
    if args.p is not None or args.q is not None:
        report = fit(series, args.p or 0, args.q or 0, include_mean=not args.no_mean)
        chosen = None
    else:
        choice = select_order(series, args.p_max, args.q_max, include_mean=not args.no_mean)
        report, chosen = choice.report, [choice.p, choice.q]
    if not report.converged:
        log.warning("ARMA%s fit did not converge; results are flagged", report.order)
    results = {"model": _fit_summary(report), "selected_order": chosen,
               "diagnostics": _diagnostics_summary(report.residuals)}
    svg = line_chart(report.residuals.times, {"residuals": report.residuals.values},
                     f"ARMA{tuple(report.order)} residuals of {series.name}")
    log.info("ARMA%s: loglik %.4f, AICc %.4f", report.order, report.loglik, report.aicc)
    return Outcome(results, report.residuals, svg, [args.input])


def cmd_whiten(args) -> Outcome:
    series = _read_series(args.input, args.column)
    choice = select_order(series, args.p_max, args.q_max)
    u = whiten(series, choice.report)
    results = {"model": _fit_summary(choice.report), "start_time": u.start_time, "values": u.values}
    svg = line_chart(u.times, {u.name: u.values}, f"whitened {series.name} (ARMA({choice.p},{choice.q}))")
    return Outcome(results, u, svg, [args.input])


def cmd_ccf(args) -> Outcome:
    y, x, info, inputs = _resolve_pair(args)
    mode = PREWHITEN_MODES[args.prewhiten]
    if mode == "raw":
        res = cross_correlation(x, y, args.max_lag)
    else:
        res = prewhitened_ccf(x, y, args.max_lag, args.p_max, args.q_max, mode=mode)
    hits = significant_lags(res)
    results = {
        "mode": res.mode,
        "convention": "correlation(h) = corr(y[t+h], x[t]); h > 0 means x leads y",
        "n": res.n,
        "bound": res.bound,
        "selected_order": res.selected_order,
        "lags": res.lags,
        "correlations": res.correlations,
        "significant_lags": [h for h, _ in hits],
        "significant": [{"lag": h, "correlation": c} for h, c in hits],
        **info,
    }
    table = pd.DataFrame({"lag": res.lags, "correlation": res.correlations,
                          "significant": np.abs(res.correlations) > res.bound})
    svg = bar_chart(res.lags, res.correlations, f"CCF ({res.mode}): {y.name} vs {x.name}", bound=res.bound)
    log.info("%d significant lag(s) at bound %.4f", len(hits), res.bound)
    return Outcome(results, table, svg, inputs, alignment=info.get("alignment"))


def cmd_pca(args) -> Outcome:
    panel = load_csv(args.panel, "panel").panel
    decomp = decompose(panel, args.k, standardize=not args.no_standardize)
    results = {
        "k": decomp.k,
        "standardized": decomp.standardized,
        "explained_variance": decomp.explained_variance,
        "explained_ratio": decomp.explained_ratio,
        "total_variance": decomp.total_variance,
        "imputed_counts": decomp.imputed_counts,
        "top_loadings": [
            [{"proxy": pid, "loading": w} for pid, w in decomp.top_loadings(c, args.top)]
            for c in range(decomp.k)
        ],
    }
    table = pd.DataFrame(decomp.scores, index=pd.Index(panel.times, name="year"),
                         columns=[f"pc{c}" for c in range(decomp.k)])
    svg = line_chart(panel.times, {f"pc{c}": decomp.scores[:, c] for c in range(decomp.k)},
                     f"principal component scores ({panel.n_proxies} proxies)")
    return Outcome(results, table, svg, [args.panel])


def _segmentation_results(seg) -> dict:
    return {
        "n": seg.n,
        "breakpoints": list(seg.breakpoints),
        "break_times": list(seg.break_times),
        "orders": list(seg.orders),
        "mdl": seg.mdl,
        "segments": [
            {"start_time": seg.start_time + s.start, "end_time": seg.start_time + s.end - 1,
             "order": s.order, "ar": list(s.ar), "mean": s.mean, "variance": s.variance}
            for s in seg.segments
        ],
    }


def cmd_segment(args) -> Outcome:
    series = _read_series(args.input, args.column)
    seg = segment(series, args.max_breaks, args.max_order, args.min_seg_len)
    results = _segmentation_results(seg)
    table = pd.DataFrame(results["segments"])
    svg = line_chart(series.times, {series.name: series.values}, f"MDL segmentation of {series.name}",
                     markers=seg.break_times)
    log.info("%d segment(s), breaks at %s", seg.m + 1, list(seg.break_times))
    return Outcome(results, table, svg, [args.input])


def cmd_lagscan(args) -> Outcome:
    y, x, info, inputs = _resolve_pair(args)
    scan = lag_scan(y, x, args.max_lag, prewhiten=args.prewhiten, p_max=args.p_max, q_max=args.q_max)
    top = scan.entries[:args.top] if args.top else scan.entries
    results = {
        "mode": scan.mode,
        "bound": scan.bound,
        "n": scan.n,
        "selected_order": scan.selected_order,
        "entries": [
            {"lag": e.lag, "regression_offset": e.regression_offset, "correlation": e.correlation,
             "significant": e.significant, "equation": e.equation(y.name, x.name)}
            for e in top
        ],
        **info,
    }
    table = pd.DataFrame(results["entries"])
    return Outcome(results, table, None, inputs, alignment=info.get("alignment"))


def cmd_transfer(args) -> Outcome:
    y = _read_series(args.response, args.response_column)
    y, pool, inputs, alignment = _covariate_pool(args, y)
    specs = _specs(args, pool)
    model = fit_transfer(y, specs, args.error_p, args.error_q, include_intercept=not args.no_intercept)
    results = {
        "equation": model.equation(),
        "fit_window": [model.fit_start, model.fit_end],
        "n": model.n,
        "intercept": model.intercept if model.include_intercept else None,
        "intercept_se": model.intercept_se if model.include_intercept else None,
        "terms": [
            {"label": t.label, "offset": t.offset, "regressor": t.name, "coefficient": t.coefficient,
             "std_error": t.std_error, "dropped": t.dropped}
            for t in model.terms
        ],
        "noise_model": {"ar": list(model.noise_model.ar), "ma": list(model.noise_model.ma),
                        "noise_variance": model.noise_model.noise_variance},
        "loglik": model.loglik,
        "r_squared": model.r_squared,
        "converged": model.converged,
        "rounds": model.rounds,
    }
    if alignment is not None:
        results["alignment"] = alignment
    table = pd.DataFrame(results["terms"])
    series = {y.name: model.response.values, "fitted": model.fitted().values}
    times = model.response.times
    if args.predict_start is not None and args.predict_end is not None:
        pred = predict(model, specs, range(args.predict_start, args.predict_end + 1))
        results["prediction"] = {"start_time": pred.mean.start_time, "mean": pred.mean.values,
                                 "std_error": pred.std_error.values, "in_window": pred.in_window}
        table = pd.DataFrame({"year": pred.mean.times, "mean": pred.mean.values,
                              "std_error": pred.std_error.values})
    svg = line_chart(times, series, model.equation())
    if not model.converged:
        log.warning("transfer fit flagged as not converged")
    return Outcome(results, table, svg, inputs, alignment=alignment)


def cmd_holdout(args) -> Outcome:
    y = _read_series(args.response, args.response_column)
    y, pool, inputs, alignment = _covariate_pool(args, y)
    if args.builder == "constant":
        builder = ConstantMeanBuilder()
    else:
        builder = TransferBuilder(_specs(args, pool), args.error_p, args.error_q,
                                  include_intercept=not args.no_intercept)
    if not args.block:
        raise UsageError("give at least one --block START:END")
    report = holdout_eval(y, builder, args.block, max_workers=SETTINGS.max_workers)
    results = {
        "builder": report.builder,
        "pooled_rmse": report.pooled_rmse,
        "n": report.n,
        "blocks": [{"start": b.start, "end": b.end, "rmse": b.rmse, "n": b.n} for b in report.blocks],
    }
    if alignment is not None:
        results["alignment"] = alignment
    return Outcome(results, pd.DataFrame(results["blocks"]), None, inputs, alignment=alignment)


def cmd_simulate(args) -> Outcome:
    outdir = args.outdir or SETTINGS.output_dir
    seed = args.seed
    if seed < 0:
        raise UsageError(f"--seed must be nonnegative, got {seed}")
    written = []

    def out(name: str, obj) -> None:
        written.append(save_csv(os.path.join(outdir, name), obj))

    results = {"system": args.system, "seed": seed}
    if args.system == "arma":
        model = ArmaModel(_floats(args.ar), _floats(args.ma), args.mean, args.noise_variance)
        s = simulate(model, args.n or 500, seed, allow_unit_root_ma=args.allow_unit_root_ma,
                     name="simulated", start_time=args.start_time)
        out("simulated.csv", s)
    elif args.system == "signal-plus-noise":
        out("temperature.csv", fixtures.signal_plus_noise(seed, n=args.n or 150))
    elif args.system == "lag14":
        system = fixtures.lagged_factor_panel(seed, n=args.n or 150)
        out("temperature.csv", system.response)
        out("proxies.csv", system.panel)
        results["lag"] = system.lag
    elif args.system == "lag3":
        system = fixtures.lagged_regression(seed, n=args.n or 200)
        out("response.csv", system.response)
        out("covariates.csv", system.covariate)
        results["lag"] = system.lag
    elif args.system == "piecewise":
        n = args.n or 1024
        out("piecewise.csv", fixtures.piecewise_ar(seed, n=n, break_at=n // 2))
        results["break_at"] = n // 2
    else:
        x, y = fixtures.independent_pair(seed, n=args.n or 150)
        out("x.csv", x)
        out("y.csv", y)
    results["files"] = list(written)
    return Outcome(results, pd.DataFrame({"file": written}), None, [], list(written))


def cmd_report(args) -> Outcome:
    """Differenced ACF, PCA score whitening and outliers, prewhitened CCF, segmentation."""
    outdir = args.outdir or SETTINGS.output_dir
    y = _read_series(args.response, args.response_column)
    artifacts = []

    dy = difference(y, 1)
    acf = sample_acf(dy, args.max_lag)
    artifacts.append(write_svg(os.path.join(outdir, "acf_diff.svg"),
                               bar_chart(acf.lags, acf.correlations, f"ACF of differenced {y.name}", acf.bound)))

    y_common, score, info = _pca_covariate(args, y)
    choice = select_order(score, args.p_max, args.q_max)
    u = whiten(score, choice.report)
    diag = _diagnostics_summary(u)

    res = prewhitened_ccf(score, y_common, args.max_lag, args.p_max, args.q_max, mode="prewhitened-x")
    hits = significant_lags(res)
    artifacts.append(write_svg(os.path.join(outdir, "ccf.svg"),
                               bar_chart(res.lags, res.correlations, f"prewhitened CCF: {y.name} vs {score.name}",
                                         res.bound)))

    seg = segment(y, args.max_breaks, args.max_order, args.min_seg_len)
    artifacts.append(write_svg(os.path.join(outdir, "segments.svg"),
                               line_chart(y.times, {y.name: y.values}, f"MDL segmentation of {y.name}",
                                          markers=seg.break_times)))
    outliers = diag["outlier_times"] if diag else []
    artifacts.append(write_svg(os.path.join(outdir, "score_residuals.svg"),
                               line_chart(u.times, {u.name: u.values}, f"whitened {score.name} residuals",
                                          markers=outliers)))

    results = {
        "differenced_acf": {"lag1": acf.at(1), "bound": acf.bound, "exceedances": acf.exceedances()},
        "score_model": _fit_summary(choice.report),
        "score_diagnostics": diag,
        "ccf": {"mode": res.mode, "bound": res.bound, "lag0": res.at(0),
                "significant_lags": [h for h, _ in hits],
                "significant": [{"lag": h, "correlation": c} for h, c in hits]},
        "segmentation": _segmentation_results(seg),
        "outlier_break_pairs": [
            {"outlier_time": t, "break_time": b, "distance": d}
            for t, b, d in outlier_break_proximity(outliers, seg.break_times, args.window)
        ],
        **info,
    }
    table = pd.DataFrame({"lag": res.lags, "correlation": res.correlations})
    return Outcome(results, table, None, [args.response, args.panel], artifacts, info["alignment"])


# --- CLI wiring ---
def build_parser() -> ToolkitParser:
    common = ToolkitParser(add_help=False)
    common.add_argument("--seed", type=int, default=SETTINGS.seed)
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--plot", default=None, help="write an SVG chart to this path")
    common.add_argument("--save", default=None, help="also write the result document to this path")
    common.add_argument("--log-level", default=SETTINGS.log_level)

    grid = ToolkitParser(add_help=False)
    grid.add_argument("--p-max", type=int, default=SETTINGS.p_max)
    grid.add_argument("--q-max", type=int, default=SETTINGS.q_max)

    single = ToolkitParser(add_help=False)
    single.add_argument("--input", required=True)
    single.add_argument("--column", default=None)

    pair = ToolkitParser(add_help=False)
    pair.add_argument("--response", required=True)
    pair.add_argument("--response-column", default=None)
    pair.add_argument("--covariate", default=None, help="covariate series CSV")
    pair.add_argument("--covariate-column", default=None)
    pair.add_argument("--panel", default=None, help="proxy panel CSV; the covariate is a PCA score")
    pair.add_argument("--pca-component", type=int, default=0)
    pair.add_argument("--no-standardize", action="store_true")
    pair.add_argument("--max-lag", type=int, default=40)

    lagged = ToolkitParser(add_help=False)
    lagged.add_argument("--response", required=True)
    lagged.add_argument("--response-column", default=None)
    lagged.add_argument("--covariates", default=None, help="CSV with one covariate per column")
    lagged.add_argument("--panel", default=None, help="proxy panel CSV; adds the PCA score as pc<K>")
    lagged.add_argument("--pca-component", type=int, default=0)
    lagged.add_argument("--no-standardize", action="store_true")
    lagged.add_argument("--term", type=_term, action="append", help="LABEL=OFFSET[,OFFSET]; regressor LABEL[t+OFFSET]")
    lagged.add_argument("--error-p", type=int, default=0)
    lagged.add_argument("--error-q", type=int, default=0)
    lagged.add_argument("--no-intercept", action="store_true")

    seg_opts = ToolkitParser(add_help=False)
    seg_opts.add_argument("--max-breaks", type=int, default=4)
    seg_opts.add_argument("--max-order", type=int, default=2)
    seg_opts.add_argument("--min-seg-len", type=int, default=10)

    parser = ToolkitParser(prog="recon_toolkit", description=f"{PROJECT_NAME}: time-series diagnostics for proxy reconstructions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ToolkitParser)

    p = sub.add_parser("diff", parents=[common, single], help="lag-d difference of a series")
    p.add_argument("--lag", type=int, default=1)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("acf", parents=[common, single], help="sample ACF/PACF with +/-1.96/sqrt(n) bounds")
    p.add_argument("--difference", type=int, default=0)
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--partial", action="store_true")
    p.set_defaults(func=cmd_acf)

    p = sub.add_parser("fit-arma", parents=[common, single, grid], help="exact-likelihood ARMA fit or AICc order selection")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--no-mean", action="store_true")
    p.set_defaults(func=cmd_fit_arma)

    p = sub.add_parser("whiten", parents=[common, single, grid], help="residuals of the AICc-selected ARMA model")
    p.set_defaults(func=cmd_whiten)

    p = sub.add_parser("ccf", parents=[common, pair, grid], help="raw or prewhitened cross-correlation")
    p.add_argument("--prewhiten", choices=tuple(PREWHITEN_MODES), default="x")
    p.set_defaults(func=cmd_ccf)

    p = sub.add_parser("pca", parents=[common], help="principal components of a proxy panel")
    p.add_argument("--panel", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--no-standardize", action="store_true")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("segment", parents=[common, single, seg_opts], help="MDL piecewise-AR segmentation")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("lagscan", parents=[common, pair, grid], help="rank lags by |cross-correlation|")
    p.add_argument("--prewhiten", action="store_true")
    p.add_argument("--top", type=int, default=0)
    p.set_defaults(func=cmd_lagscan)

    p = sub.add_parser("transfer", parents=[common, lagged], help="regression on lagged covariates with ARMA errors")
    p.add_argument("--predict-start", type=int, default=None)
    p.add_argument("--predict-end", type=int, default=None)
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("holdout", parents=[common, lagged], help="block holdout RMSE")
    p.add_argument("--builder", choices=("constant", "transfer"), default="transfer")
    p.add_argument("--block", type=_block, action="append")
    p.set_defaults(func=cmd_holdout)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic fixture to CSV")
    p.add_argument("--system", choices=SYSTEMS, default="arma")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--ar", default="")
    p.add_argument("--ma", default="")
    p.add_argument("--mean", type=float, default=0.0)
    p.add_argument("--noise-variance", type=float, default=1.0)
    p.add_argument("--allow-unit-root-ma", action="store_true")
    p.add_argument("--start-time", type=int, default=0)
    p.add_argument("--outdir", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", parents=[common, grid, seg_opts], help="full diagnostic pipeline with SVG panels")
    p.add_argument("--response", required=True)
    p.add_argument("--response-column", default=None)
    p.add_argument("--panel", required=True)
    p.add_argument("--pca-component", type=int, default=0)
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--max-lag", type=int, default=40)
    p.add_argument("--window", type=int, default=2, help="outlier/break proximity in years")
    p.add_argument("--outdir", default=None)
    p.set_defaults(func=cmd_report)
    return parser


def _params(args) -> dict:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        if isinstance(value, LagSpec):
            value = f"{value.label}={','.join(str(o) for o in value.offsets)}"
        elif isinstance(value, list):
            value = [f"{v.label}={','.join(str(o) for o in v.offsets)}" if isinstance(v, LagSpec) else v
                     for v in value]
        params[key] = value
    return params


def _write_text(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    log.ok("Wrote %s", path)


def run(args) -> str:
    """Execute one parsed subcommand and return the text written to stdout.

    CSV output carries no manifest of its own: it goes to `<save>.manifest.json`
    next to the saved table, or to stderr when nothing is saved.
    """
    outcome = args.func(args)
    artifacts = list(outcome.artifacts)
    if args.plot:
        if outcome.svg is None:
            log.warning("%s produces no chart; --plot ignored", args.command)
        else:
            artifacts.append(write_svg(args.plot, outcome.svg))
    params = _params(args)
    if args.out == "csv":
        if outcome.table is None:
            raise UsageError(f"{args.command} has no tabular output; use --out json")
        text = to_csv_text(outcome.table)
        if args.save:
            _write_text(args.save, text)
            artifacts.append(args.save)
    manifest = build_manifest(outcome.inputs, args.seed, artifacts, flags=params, alignment=outcome.alignment)
    if args.out == "csv":
        sidecar = dumps({"command": args.command, "manifest": to_jsonable(manifest)})
        if args.save:
            _write_text(f"{args.save}.manifest.json", sidecar)
        else:
            sys.stderr.write(sidecar)
        return text
    text = dumps(result_document(args.command, params, outcome.results, manifest))
    if args.save:
        _write_text(args.save, text)
    return text


def main(argv=None) -> int:
    configure_logging(SETTINGS.log_level)
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level)
        sys.stdout.write(run(args))
        return 0
    except ToolkitError as e:
        log.critical("%s", e)
        return e.exit_code


# --- Execution Block ---
if __name__ == "__main__":
    try:
        sys.exit(main())
    except Exception as e:
        print(f"[FATAL ERROR] {e}", file=sys.stderr)
        sys.exit(1)
