"""Report serialization: machine CSV, aligned text, and plot data.

The CSV is the machine format and round-trips: ``parse_report_table`` rebuilds
the exact ReportTable that ``emit_reports`` wrote, including per-seed reports
and the selected seed's predictions (which live in the plot-data file).
Emission is pure serialization with no timestamps, so identical tables always
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .experiments import CellResult, ReportTable
from .metrics import EvalReport

__all__ = ["emit_reports", "parse_report_table", "render_text"]

FORMATS = ("csv", "text")

# how a table's cells display in the text rendering
_TABLE_STYLES = {
    "baseline": "full",            # MAE / score / violations
    "scheme_ablation": "mae_violations",
    "log_feature_check": "mae_violations",
    "epoch_ablation": "violations",
}


def _fmt_violations(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.1f}"


def _cell_text(cell: CellResult | None, style: str) -> str:
    if cell is None:
        return "-"
    if cell.error is not None:
        return "ERROR"
    r = cell.selected
    if style == "violations":
        return _fmt_violations(r.violations)
    if style == "mae_violations":
        return f"{r.mae:.4f} / {_fmt_violations(r.violations)}"
    return f"{r.mae:.3f} / {r.monotonicity_score:.3f} / {_fmt_violations(r.violations)}"


def render_text(table: ReportTable) -> str:
    """Aligned text table in the style of the published layout."""
    style = _TABLE_STYLES.get(table.name, "full")
    header = ["Algorithm" if table.name == "baseline" else "Row"] \
        + list(table.col_labels)
    lines = [header]
    if table.naive is not None:
        naive_text = (f"{table.naive.mae:.3f} / {table.naive.monotonicity_score:.3f}"
                      f" / {_fmt_violations(table.naive.violations)}")
        lines.append(["Naive reference"] + [naive_text] * len(table.col_labels))
    for label, row in zip(table.row_labels, table.cells):
        lines.append([label] + [_cell_text(c, style) for c in row])
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    out = []
    for i, line in enumerate(lines):
        out.append("  ".join(part.ljust(w) for part, w in zip(line, widths)).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def _seed_columns(seeds) -> list[str]:
    cols = []
    for s in seeds:
        cols += [f"seed{s}_mae", f"seed{s}_violations"]
    return cols


def _table_csv(table: ReportTable) -> str:
    seeds = None
    for row in table.cells:
        for cell in row:
            if cell is not None:
                seeds = cell.seeds
                break
        if seeds is not None:
            break
    if seeds is None:
        if table.naive is None:
            raise ConfigError(f"table {table.name!r} has no cells to serialize")
        seeds = ()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["status", "row", "column", "acceleration", "n", "true_ties",
              "selected_seed", "mae", "violations", "monotonicity_score",
              "error"] + _seed_columns(seeds)
    writer.writerow(header)
    blank_seeds = [""] * (2 * len(seeds))
    if table.naive is not None:
        nv = table.naive
        writer.writerow(["naive", "Naive reference", "", repr(nv.acceleration),
                         nv.n, nv.true_ties, "", repr(nv.mae),
                         repr(nv.violations), repr(nv.monotonicity_score), ""]
                        + blank_seeds)
    for label, row in zip(table.row_labels, table.cells):
        for col, cell in zip(table.col_labels, row):
            if cell is None:
                writer.writerow(["empty", label, col] + [""] * 8 + blank_seeds)
            elif cell.error is not None:
                writer.writerow(["error", label, col, repr(cell.acceleration),
                                 "", "", "", "", "", "", cell.error]
                                + blank_seeds)
            else:
                r = cell.selected
                per_seed = []
                for sr in cell.seed_reports:
                    per_seed += [repr(sr.mae), repr(sr.violations)]
                writer.writerow(["ok", label, col, repr(cell.acceleration),
                                 r.n, r.true_ties, cell.selected_seed,
                                 repr(r.mae), repr(r.violations),
                                 repr(r.monotonicity_score), ""] + per_seed)
    return buf.getvalue()


def _ranks(values: tuple[float, ...]) -> np.ndarray:
    order = np.argsort(np.asarray(values), kind="stable")
    ranks = np.empty(len(values), dtype=int)
    ranks[order] = np.arange(len(values))
    return ranks


def _plot_csv(table: ReportTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row", "column", "arch_id", "true_accuracy",
                     "predicted_accuracy", "true_rank", "predicted_rank"])
    for label, row in zip(table.row_labels, table.cells):
        for col, cell in zip(table.col_labels, row):
            if cell is None or cell.error is not None:
                continue
            tr = _ranks(cell.y_true)
            pr = _ranks(cell.y_pred)
            for i, arch in enumerate(cell.test_ids):
                writer.writerow([label, col, arch, repr(cell.y_true[i]),
                                 repr(cell.y_pred[i]), tr[i], pr[i]])
    return buf.getvalue()


def emit_reports(tables, formats=FORMATS, destination: str | Path = "reports"
                 ) -> list[Path]:
    """Write every table in every requested format; returns the paths."""
    if not tables:
        raise ConfigError("no tables to emit")
    unknown = set(formats) - set(FORMATS)
    if unknown:
        raise ConfigError(f"unknown report formats {sorted(unknown)}; "
                          f"available: {FORMATS}")
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
        written = []
        for table in tables:
            if "csv" in formats:
                path = dest / f"{table.name}.csv"
                path.write_text(_table_csv(table))
                written.append(path)
                plot = dest / f"{table.name}_plot_data.csv"
                plot.write_text(_plot_csv(table))
                written.append(plot)
            if "text" in formats:
                path = dest / f"{table.name}.txt"
                path.write_text(render_text(table))
                written.append(path)
        return written
    except OSError as exc:
        raise ConfigError(f"cannot write reports to {dest}: {exc}") from exc


def _report_from(mae: str, violations: str, score: str | None, n: int,
                 accel: float, true_ties: bool) -> EvalReport:
    v = float(violations)
    pairs = math.comb(n, 2)
    return EvalReport(
        mae=float(mae), violations=v,
        monotonicity_score=float(score) if score else 1.0 - v / pairs,
        n=n, acceleration=accel, num_pairs=pairs, true_ties=true_ties,
    )


def parse_report_table(destination: str | Path, name: str) -> ReportTable:
    """Rebuild a ReportTable from its emitted CSV pair."""
    dest = Path(destination)
    table_path = dest / f"{name}.csv"
    if not table_path.exists():
        raise DataError(f"no report table at {table_path}")
    with open(table_path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{table_path} is empty")
    header = rows[0]
    seeds = tuple(int(c[4:-4]) for c in header if c.endswith("_mae")
                  and c.startswith("seed"))
    idx = {c: i for i, c in enumerate(header)}

    plot: dict[tuple[str, str], list[tuple[int, float, float]]] = {}
    plot_path = dest / f"{name}_plot_data.csv"
    if plot_path.exists():
        with open(plot_path, newline="") as fh:
            for entry in list(csv.reader(fh))[1:]:
                plot.setdefault((entry[0], entry[1]), []).append(
                    (int(entry[2]), float(entry[3]), float(entry[4])))

    naive = None
    cells: dict[tuple[str, str], CellResult | None] = {}
    row_labels: list[str] = []
    col_labels: list[str] = []
    for entry in rows[1:]:
        status, label, col = entry[idx["status"]], entry[idx["row"]], entry[idx["column"]]
        if status == "naive":
            naive = _report_from(entry[idx["mae"]], entry[idx["violations"]],
                                 entry[idx["monotonicity_score"]],
                                 int(entry[idx["n"]]),
                                 float(entry[idx["acceleration"]]),
                                 entry[idx["true_ties"]] == "True")
            continue
        if label not in row_labels:
            row_labels.append(label)
        if col not in col_labels:
            col_labels.append(col)
        if status == "empty":
            cells[(label, col)] = None
            continue
        accel = float(entry[idx["acceleration"]])
        if status == "error":
            cells[(label, col)] = CellResult(
                row=label, column=col, acceleration=accel, seeds=seeds,
                seed_reports=(), selected=None, selected_seed=None,
                test_ids=(), y_true=(), y_pred=(), error=entry[idx["error"]])
            continue
        n = int(entry[idx["n"]])
        ties = entry[idx["true_ties"]] == "True"
        selected = _report_from(entry[idx["mae"]], entry[idx["violations"]],
                                entry[idx["monotonicity_score"]], n, accel, ties)
        seed_reports = tuple(
            _report_from(entry[idx[f"seed{s}_mae"]],
                         entry[idx[f"seed{s}_violations"]], None, n, accel, ties)
            for s in seeds)
        points = plot.get((label, col), [])
        cells[(label, col)] = CellResult(
            row=label, column=col, acceleration=accel, seeds=seeds,
            seed_reports=seed_reports, selected=selected,
            selected_seed=int(entry[idx["selected_seed"]]),
            test_ids=tuple(p[0] for p in points),
            y_true=tuple(p[1] for p in points),
            y_pred=tuple(p[2] for p in points))

    grid = tuple(tuple(cells.get((r, c)) for c in col_labels) for r in row_labels)
    return ReportTable(name=name, col_labels=tuple(col_labels),
                       row_labels=tuple(row_labels), cells=grid, naive=naive)
