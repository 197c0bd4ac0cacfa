"""Command-line entry points.

Five subcommands: ``optimize`` runs the full nested protocol for one
method on one dataset, ``evaluate`` scores fixed weights or rejection
thresholds under the same protocol, ``derive-costs`` turns an optimized
weight and threshold pair into its equivalent-cost table, ``roc`` emits
the threshold-averaged validation curve and its convex hull, and
``benchmark`` sweeps several methods into one comparison table. All
outputs are plain CSV and Markdown, plus a rendered figure per report.
"""

from __future__ import annotations

import csv
import math
import os
import sys

import click

from .costs import check_feasibility, equivalent_rejection_costs
from .decision import ParamVector
from .harness import (
    CLASSIFIERS,
    METHODS,
    ExperimentPlan,
    ingest_csv,
    nested_cv_run,
    fixed_param_run,
    run_benchmark,
    validation_curves,
)
from .optimizer import PowellConfig
from .roc import auc, rocch, threshold_average


def _dataset_options(fn):
    fn = click.option(
        "--dataset",
        "dataset_path",
        required=True,
        type=click.Path(exists=True, dir_okay=False),
        help="CSV file with numeric features and a label column.",
    )(fn)
    fn = click.option(
        "--label-col",
        default=None,
        help="Label column by position or header name (default: last).",
    )(fn)
    fn = click.option(
        "--positive-class",
        default=None,
        help="Label value to treat as the positive class (binarizes).",
    )(fn)
    return fn


def _protocol_options(fn):
    fn = click.option(
        "--classifier",
        type=click.Choice(CLASSIFIERS),
        default="knn",
        show_default=True,
    )(fn)
    fn = click.option(
        "--k", default=11, show_default=True, help="Neighbor count for knn."
    )(fn)
    fn = click.option(
        "--r",
        default=10,
        show_default=True,
        help="Bandwidth neighbor rank for parzen.",
    )(fn)
    fn = click.option("--folds", default=3, show_default=True)(fn)
    fn = click.option("--reps", default=10, show_default=True)(fn)
    fn = click.option("--seed", default=0, show_default=True)(fn)
    fn = click.option(
        "--global-scaling",
        is_flag=True,
        help="Rescale the whole dataset once up front instead of per split.",
    )(fn)
    return fn


def _out_option(fn):
    return click.option(
        "--out",
        "out_dir",
        default=".",
        show_default=True,
        type=click.Path(file_okay=False),
        help="Directory for the output files.",
    )(fn)


def _restarts_option(fn):
    return click.option(
        "--restarts",
        default=8,
        show_default=True,
        help="Search restarts per inner optimization.",
    )(fn)


@click.group()
def main() -> None:
    """Class-imbalance learning by mutual-information maximization."""


def _load(dataset_path, label_col, positive_class):
    return ingest_csv(
        dataset_path, label_col=label_col, positive_class=positive_class
    )


def _plan(method, classifier, k, r, folds, reps, seed, global_scaling, restarts=8):
    return ExperimentPlan(
        method=method,
        classifier=classifier,
        k=k,
        r=r,
        folds=folds,
        repetitions=reps,
        seed=seed,
        optimizer=PowellConfig(restarts=restarts),
        global_scaling=global_scaling,
    )


def _write_run_outputs(dataset, result, out_dir, stem) -> str:
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(str(out_dir), f"{dataset.name}_{stem}")
    stats = result.metric_stats()

    with open(f"{base}_metrics.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric", "mean", "std"])
        for name, (mean, std) in stats.items():
            writer.writerow([name, f"{mean:.10g}", f"{std:.10g}"])

    param_stats = result.param_stats()
    if param_stats is not None:
        mean, std = param_stats
        with open(f"{base}_params.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["index", "mean", "std"])
            for i, (mu, sigma) in enumerate(zip(mean, std), start=1):
                writer.writerow([i, f"{mu:.10g}", f"{sigma:.10g}"])

    lines = [
        f"# {dataset.name}: {stem}",
        "",
        f"{dataset.n} instances, {dataset.d} features, class sizes "
        f"{'/'.join(str(c) for c in dataset.class_counts)}.",
        "",
        "| metric | mean(std) |",
        "|---|---|",
    ]
    for name, (mean, std) in stats.items():
        if math.isnan(mean):
            continue
        if name == "ni":
            lines.append(f"| {name} | {mean:.4f}({std:.4f}) |")
        else:
            lines.append(f"| {name} | {100 * mean:.2f}({100 * std:.2f}) |")
    if param_stats is not None:
        mean, std = param_stats
        rendered = ", ".join(
            f"{mu:.4f}({sigma:.4f})" for mu, sigma in zip(mean, std)
        )
        lines += ["", f"Parameters ({result.plan.param_kind}): {rendered}"]
    lines.append("")
    with open(f"{base}_summary.md", "w") as fh:
        fh.write("\n".join(lines))

    from .figures import save_rates_figure

    save_rates_figure(
        stats, result.m, f"{base}_rates.png", title=f"{dataset.name} ({stem})"
    )
    return base


@main.command()
@_dataset_options
@_protocol_options
@_restarts_option
@_out_option
@click.option(
    "--method",
    type=click.Choice(METHODS),
    default="ni",
    show_default=True,
)
def optimize(
    dataset_path,
    label_col,
    positive_class,
    method,
    classifier,
    k,
    r,
    folds,
    reps,
    seed,
    global_scaling,
    restarts,
    out_dir,
) -> None:
    """Run one method on one dataset; write params and metrics."""
    dataset = _load(dataset_path, label_col, positive_class)
    plan = _plan(
        method, classifier, k, r, folds, reps, seed, global_scaling, restarts
    )
    result = nested_cv_run(dataset, plan)
    base = _write_run_outputs(dataset, result, out_dir, method)
    stats = result.metric_stats()
    ni_mean, ni_std = stats["ni"]
    click.echo(
        f"{method} on {dataset.name}: NI {ni_mean:.4f}({ni_std:.4f}), "
        f"error {100 * stats['e'][0]:.2f}%, reject {100 * stats['rej'][0]:.2f}%"
    )
    param_stats = result.param_stats()
    if param_stats is not None:
        mean, _ = param_stats
        click.echo(
            "parameters: " + ", ".join(f"{v:.4f}" for v in mean)
        )
    click.echo(f"wrote {base}_metrics.csv and companions")


@main.command()
@_dataset_options
@_protocol_options
@_out_option
@click.option(
    "--weights",
    default=None,
    help="Comma-separated class weights, one per class (last one 1).",
)
@click.option(
    "--thresholds",
    default=None,
    help="Comma-separated rejection thresholds, one per class.",
)
def evaluate(
    dataset_path,
    label_col,
    positive_class,
    classifier,
    k,
    r,
    folds,
    reps,
    seed,
    global_scaling,
    out_dir,
    weights,
    thresholds,
) -> None:
    """Score fixed decision parameters under the evaluation protocol."""
    if (weights is None) == (thresholds is None):
        raise click.UsageError("pass exactly one of --weights or --thresholds")
    if weights is not None:
        values = _parse_floats(weights, "--weights")
        params = ParamVector.weights(values)
        stem = "fixed-weights"
    else:
        values = _parse_floats(thresholds, "--thresholds")
        params = ParamVector.rejection_thresholds(values)
        stem = "fixed-thresholds"
    dataset = _load(dataset_path, label_col, positive_class)
    plan = _plan(
        "plain", classifier, k, r, folds, reps, seed, global_scaling
    )
    result = fixed_param_run(dataset, plan, params)
    base = _write_run_outputs(dataset, result, out_dir, stem)
    stats = result.metric_stats()
    ni_mean, ni_std = stats["ni"]
    click.echo(
        f"fixed parameters on {dataset.name}: NI {ni_mean:.4f}({ni_std:.4f}), "
        f"error {100 * stats['e'][0]:.2f}%, reject {100 * stats['rej'][0]:.2f}%"
    )
    click.echo(f"wrote {base}_metrics.csv and companions")


def _parse_floats(text, flag) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise click.UsageError(f"{flag} expects comma-separated numbers")


@main.command("derive-costs")
@click.option("--alpha-n", required=True, type=float,
              help="Optimized weight of the negative (majority) class.")
@click.option("--trn", required=True, type=float,
              help="Optimized rejection threshold of the negative class.")
@click.option("--trp", required=True, type=float,
              help="Optimized rejection threshold of the positive class.")
@click.option("--out", "out_dir", default=None,
              type=click.Path(file_okay=False),
              help="Also write equivalent_costs.csv to this directory.")
def derive_costs(alpha_n, trn, trp, out_dir) -> None:
    """Equivalent-cost table for an optimized binary operating point.

    The weight doubles as the equivalent false-positive cost; the two
    rejection costs follow from the thresholds. The CSV goes to stdout.
    """
    lambda_rn, lambda_rp = equivalent_rejection_costs(alpha_n, trn, trp)
    feasibility = check_feasibility(alpha_n, trn, trp)

    rows = [
        ["alpha_n", "t_rn", "t_rp", "lambda_rn", "lambda_rp"],
        [
            f"{alpha_n:.6g}",
            f"{trn:.6g}",
            f"{trp:.6g}",
            f"{lambda_rn:.6g}",
            f"{lambda_rp:.6g}",
        ],
    ]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerows(rows)

    if feasibility.boundary:
        note = "note: operating point sits on a band edge; checks are vacuous"
    elif feasibility.consistent and feasibility.cost_bands_ok:
        note = "note: costs and thresholds lie inside their admissible bands"
    elif feasibility.consistent:
        note = "note: outside the admissible bands (consistently on both sides)"
    else:
        note = "note: cost and threshold bands disagree; check the inputs"
    click.echo(note, err=True)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(str(out_dir), "equivalent_costs.csv")
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
        click.echo(f"wrote {path}", err=True)


@main.command()
@_dataset_options
@_protocol_options
@_out_option
def roc(
    dataset_path,
    label_col,
    positive_class,
    classifier,
    k,
    r,
    folds,
    reps,
    seed,
    global_scaling,
    out_dir,
) -> None:
    """Threshold-averaged validation ROC curve and its convex hull."""
    dataset = _load(dataset_path, label_col, positive_class)
    plan = _plan("plain", classifier, k, r, folds, reps, seed, global_scaling)
    curves = validation_curves(dataset, plan)
    mean_curve = threshold_average(curves)
    hull = rocch(mean_curve)

    os.makedirs(out_dir, exist_ok=True)
    curve_path = os.path.join(str(out_dir), f"{dataset.name}_curve.csv")
    hull_path = os.path.join(str(out_dir), f"{dataset.name}_hull.csv")
    mean_curve.to_csv(curve_path)
    hull.to_csv(hull_path)

    from .figures import save_roc_figure

    figure_path = os.path.join(str(out_dir), f"{dataset.name}_roc.png")
    save_roc_figure(mean_curve, hull, figure_path, title=dataset.name)

    click.echo(
        f"{len(curves)} validation curves averaged; AUC {auc(mean_curve):.4f}, "
        f"hull AUC {auc(hull):.4f}, {len(hull)} hull vertices"
    )
    click.echo(f"wrote {curve_path}, {hull_path}, {figure_path}")


@main.command()
@_dataset_options
@_protocol_options
@_restarts_option
@_out_option
@click.option(
    "--method",
    "methods",
    type=click.Choice(METHODS),
    multiple=True,
    help="Methods to include (default: all).",
)
def benchmark(
    dataset_path,
    label_col,
    positive_class,
    classifier,
    k,
    r,
    folds,
    reps,
    seed,
    global_scaling,
    restarts,
    out_dir,
    methods,
) -> None:
    """Sweep methods on one dataset into a comparison table."""
    dataset = _load(dataset_path, label_col, positive_class)
    chosen = methods or METHODS
    plans = [
        _plan(
            method, classifier, k, r, folds, reps, seed, global_scaling, restarts
        )
        for method in chosen
    ]
    results = run_benchmark(dataset, plans, out_dir)
    base = os.path.join(str(out_dir), dataset.name)
    for method, result in results.items():
        ni_mean, ni_std = result.metric_stats()["ni"]
        click.echo(f"{method}: NI {ni_mean:.4f}({ni_std:.4f})")
    click.echo(f"wrote {base}.csv, {base}_std.csv, {base}_params.csv, "
               f"{base}.md, {base}.png")


if __name__ == "__main__":
    main()
