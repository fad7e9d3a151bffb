"""Command-line client over the core library.

Exit codes: 0 success, 1 verification mismatch, 2 bad flags, 3 data errors,
4 solver non-convergence.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .data import (
    Dataset,
    drop_columns,
    dump_json,
    inject_flips,
    load_csv,
    load_json,
    load_libsvm,
    sample,
    sensitive_values,
)
from .enumeration import EnumSession
from .errors import DataError, SolverConvergenceError, SvkbestError
from .kernels import KernelSpec
from .model_select import DEFAULT_GRID, cv_select_c
from .oracle import BRUTE_FORCE_MAX_N
from .records import record_line, stream_model_records
from .solver import SolverParams
from .verify import random_instance, verify_instance

_FORMATS = click.Choice(["csv", "libsvm", "json"])


def _load(path: str, fmt: str, label: str | None, positive: str | None,
          feature_columns: str | None) -> Dataset:
    if fmt == "csv":
        if not label or positive is None:
            raise click.UsageError("--format csv requires --label and --positive")
        cols = [c.strip() for c in feature_columns.split(",")] if feature_columns else None
        return load_csv(path, label, cols, positive)
    if fmt == "libsvm":
        return load_libsvm(path)
    return load_json(Path(path).read_text())


def _kernel(text: str) -> KernelSpec:
    return KernelSpec.from_json(text)


def _fail(exc: SvkbestError) -> "click.exceptions.Exit":
    click.echo(f"error: {exc}", err=True)
    code = 4 if isinstance(exc, SolverConvergenceError) else 3
    return click.exceptions.Exit(code)


@click.group()
def main():
    """Enumerate the best distinct-support SVM models of a dataset."""


@main.command("enumerate")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=_FORMATS, default="csv", show_default=True)
@click.option("--label", help="label column name (csv)")
@click.option("--positive", help="label value mapped to +1 (csv)")
@click.option("--feature-columns", help="comma-separated feature columns (csv; default: all others)")
@click.option("--c", "c_value", type=float, default=1.0, show_default=True)
@click.option("--kernel", "kernel_json", default='{"kind":"linear"}', show_default=True)
@click.option("--top-k", type=int, required=True)
@click.option("--test", "test_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sensitive", help="sensitive column for demographic parity (needs --test)")
@click.option("--exclude-sensitive", is_flag=True,
              help="drop the sensitive column from the feature matrix before training")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--seed", type=int, default=0,
              help="accepted for interface compatibility; enumeration is deterministic")
@click.option("--kkt-tol", type=float, default=None, help="solver KKT tolerance override")
@click.option("--max-updates", type=int, default=None, help="solver pair-update cap override")
def cli_enumerate(data_path, fmt, label, positive, feature_columns, c_value,
                  kernel_json, top_k, test_path, sensitive, exclude_sensitive,
                  seed, out_path, kkt_tol, max_updates):
    """Write the top-K models as JSON lines and print a summary table."""
    if top_k < 1:
        raise click.UsageError("--top-k must be >= 1")
    try:
        kernel = _kernel(kernel_json)
        train = _load(data_path, fmt, label, positive, feature_columns)
        test = _load(test_path, fmt, label, positive, feature_columns) if test_path else None
        z_values = None
        if sensitive:
            if test is None:
                raise DataError("--sensitive requires --test")
            z_values = sensitive_values(test, sensitive)
            if exclude_sensitive:
                train = drop_columns(train, [sensitive])
                test = drop_columns(test, [sensitive])
        elif exclude_sensitive:
            raise DataError("--exclude-sensitive requires --sensitive")

        params = None
        if kkt_tol or max_updates:
            params = SolverParams(kkt_tolerance=kkt_tol or 1e-6, max_updates=max_updates)
        session = EnumSession(train, c_value, kernel, params)
        rows = []
        with open(out_path, "w", encoding="utf-8") as fh:
            for record in stream_model_records(session, top_k, test, z_values):
                fh.write(record_line(record) + "\n")
                rows.append(record)
    except SvkbestError as exc:
        raise _fail(exc) from exc

    header = f"{'rank':>4}  {'objective':>14}  {'ratio':>8}  {'|supp|':>6}"
    if test is not None:
        header += f"  {'test_hinge':>10}  {'misclass':>8}"
        if z_values is not None:
            header += f"  {'dp':>6}"
    click.echo(header)
    for rec in rows:
        line = (f"{rec['rank']:>4}  {rec['objective']:>14.6f}  "
                f"{rec['objective_ratio']:>8.4f}  {rec['support_size']:>6}")
        met = rec["metrics"]
        if test is not None:
            line += f"  {met['test_hinge']:>10.4f}  {met['misclass']:>8.4f}"
            if z_values is not None:
                line += f"  {met['dp']:>6.3f}"
        click.echo(line)
    click.echo(f"wrote {len(rows)} models to {out_path}")


@main.command("cv-select-c")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=_FORMATS, default="csv", show_default=True)
@click.option("--label", help="label column name (csv)")
@click.option("--positive", help="label value mapped to +1 (csv)")
@click.option("--feature-columns", help="comma-separated feature columns (csv)")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--grid", default=",".join(str(c) for c in DEFAULT_GRID), show_default=True,
              help="comma-separated C grid")
@click.option("--kernel", "kernel_json", default='{"kind":"linear"}', show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def cli_cv_select_c(data_path, fmt, label, positive, feature_columns, folds,
                    grid, kernel_json, seed):
    """Pick C by k-fold cross validation on mean hinge loss; print it last."""
    try:
        values = [float(tok) for tok in grid.split(",") if tok.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --grid: {exc}") from exc
    try:
        ds = _load(data_path, fmt, label, positive, feature_columns)
        chosen, table = cv_select_c(ds, values, folds, seed, _kernel(kernel_json))
    except SvkbestError as exc:
        raise _fail(exc) from exc
    for c in sorted(table):
        marker = " *" if c == chosen else ""
        click.echo(f"C={c:g}: mean validation hinge {table[c]:.6f}{marker}")
    click.echo(f"{chosen:g}")


@main.command("verify")
@click.option("--n", type=int, default=6, show_default=True)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--d", type=int, default=2, show_default=True)
@click.option("--fault-invert-heap", is_flag=True, hidden=True,
              help="test-only: reverse the heap order to prove the check can fail")
def cli_verify(n, trials, seed, d, fault_invert_heap):
    """Cross-check enumeration against brute force on random instances."""
    if n > BRUTE_FORCE_MAX_N:
        raise click.UsageError(f"--n must be <= {BRUTE_FORCE_MAX_N} (brute-force cap)")
    if n < 2 or trials < 1:
        raise click.UsageError("need --n >= 2 and --trials >= 1")
    kernel = KernelSpec("linear")
    failures = 0
    for t in range(trials):
        C = (0.1, 1.0, 10.0)[t % 3]
        ds = random_instance(n, d, seed=seed * 100_003 + t)
        diffs = verify_instance(ds, C, kernel, fault_invert_heap=fault_invert_heap)
        status = "ok" if not diffs else "MISMATCH"
        click.echo(f"trial {t + 1}/{trials} n={n} C={C:g}: {status}")
        for diff in diffs:
            click.echo(f"  {diff}")
        failures += bool(diffs)
    if failures:
        click.echo(f"{failures}/{trials} trials mismatched", err=True)
        raise click.exceptions.Exit(1)
    click.echo(f"all {trials} trials agree with the oracle")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@click.option("--static", "static_dir", type=click.Path(exists=True, file_okay=False),
              help="directory of UI assets to serve at /")
@click.option("--data-dir", type=click.Path(file_okay=False),
              help="directory for dataset/session snapshots")
def cli_serve(host, port, static_dir, data_dir):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=data_dir, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("sample")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=_FORMATS, default="csv", show_default=True)
@click.option("--label", help="label column name (csv)")
@click.option("--positive", help="label value mapped to +1 (csv)")
@click.option("--feature-columns", help="comma-separated feature columns (csv)")
@click.option("--size", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cli_sample(data_path, fmt, label, positive, feature_columns, size, seed, out_path):
    """Uniform subsample written as a canonical JSON dataset."""
    try:
        ds = _load(data_path, fmt, label, positive, feature_columns)
        sub = sample(ds, size, seed)
    except SvkbestError as exc:
        raise _fail(exc) from exc
    Path(out_path).write_text(dump_json(sub))
    click.echo(f"wrote {sub.n} rows to {out_path}")


@main.command("inject-flips")
@click.option("--data", "data_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=_FORMATS, default="csv", show_default=True)
@click.option("--label", help="label column name (csv)")
@click.option("--positive", help="label value mapped to +1 (csv)")
@click.option("--feature-columns", help="comma-separated feature columns (csv)")
@click.option("--sensitive", required=True, help="sensitive column z")
@click.option("--flips", type=int, required=True, help="labels to negate among rows with y != z")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def cli_inject_flips(data_path, fmt, label, positive, feature_columns, sensitive,
                     flips, seed, out_path):
    """Flip labels of a uniform subset of the y != z stratum (attack protocol)."""
    try:
        ds = _load(data_path, fmt, label, positive, feature_columns)
        out = inject_flips(ds, sensitive, flips, seed)
    except SvkbestError as exc:
        raise _fail(exc) from exc
    Path(out_path).write_text(dump_json(out))
    click.echo(f"flipped {flips} labels, wrote {out.n} rows to {out_path}")


if __name__ == "__main__":
    main()
