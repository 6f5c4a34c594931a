"""Command-line interface.

Subcommands: enumerate, split, baseline, ablate-scheme, ablate-epochs,
log-check, naive.  Exit codes: 0 success, 1 configuration error, 2 data
error, 3 grid finished with failed cells.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .data import load_dataset, save_split, split_train_test
from .errors import ConfigError, DataError
from .experiments import (BaselineRow, DEFAULT_BASELINE_ROWS, ExperimentPlan,
                          ReportTable, run_baseline, run_epoch_ablation,
                          run_log_feature_check, run_naive, run_scheme_ablation)
from .recipe import TrainingRecipe, export_manifest
from .regressors.base import available_regressors
from .reports import FORMATS, emit_reports
from .schemes import (default_constraint_spec, enumerate_schemes,
                      load_constraint_spec, scheme_features)

_EXPERIMENT_KEYS = {"seeds", "epoch_budgets", "formats", "regressors"}


def _parse_rows(raw_rows) -> tuple[BaselineRow, ...]:
    known = available_regressors()
    rows = []
    for i, entry in enumerate(raw_rows):
        if not isinstance(entry, dict) or "family" not in entry:
            raise ConfigError(f"regressors[{i}] must be a mapping with a family")
        family = entry["family"]
        if family not in known:
            raise ConfigError(
                f"regressors[{i}]: unknown family {family!r}; "
                f"available: {sorted(known)}"
            )
        params = entry.get("params", {}) or {}
        unknown = set(params) - set(known[family])
        if unknown:
            raise ConfigError(
                f"regressors[{i}] ({family}): unknown hyperparameters "
                f"{sorted(unknown)}; known: {sorted(known[family])}"
            )
        rows.append(BaselineRow(entry.get("label", family), family, dict(params)))
    return tuple(rows)


def _build_plan(args) -> ExperimentPlan:
    raw: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        loaded = yaml.safe_load(path.read_text())
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        unknown = set(loaded) - _EXPERIMENT_KEYS
        if unknown:
            raise ConfigError(
                f"{path}: unknown keys {sorted(unknown)}; "
                f"known: {sorted(_EXPERIMENT_KEYS)}"
            )
        raw = loaded
    seeds = args.seeds if args.seeds else raw.get("seeds", (1, 2, 3, 4, 5))
    formats = args.formats if args.formats else raw.get("formats", ("csv", "text"))
    unknown_formats = set(formats) - set(FORMATS)
    if unknown_formats:
        raise ConfigError(f"unknown formats {sorted(unknown_formats)}; "
                          f"available: {FORMATS}")
    rows = _parse_rows(raw["regressors"]) if "regressors" in raw \
        else DEFAULT_BASELINE_ROWS
    return ExperimentPlan(
        dataset=args.dataset,
        output_dir=args.out,
        formats=tuple(formats),
        seeds=tuple(int(s) for s in seeds),
        epoch_budgets=tuple(int(k) for k in raw.get("epoch_budgets", (0, 3, 6, 9))),
        rows=rows,
    )


def _cmd_enumerate(args) -> int:
    spec = load_constraint_spec(args.config) if args.config \
        else default_constraint_spec()
    schemes = enumerate_schemes(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = out / "schemes.csv"
    with open(table, "w") as fh:
        fh.write("id,depth,num_stages,first_layer_width,last_layer_width,"
                 "num_params,log_num_params,num_macs,layers\n")
        for i, scheme in enumerate(schemes):
            f = scheme_features(scheme, spec.counting)
            layers = ";".join(
                f"k{l.kernel_size}w{l.width}s{l.stride}" + ("+skip" if l.skip else "")
                for l in scheme.layers)
            fh.write(f"{i},{f.depth},{f.num_stages},{f.first_layer_width},"
                     f"{f.last_layer_width},{f.num_params},"
                     f"{f.log_num_params!r},{f.num_macs},{layers}\n")
    manifest = out / "manifest.json"
    export_manifest(schemes, TrainingRecipe(), manifest)
    print(f"{len(schemes)} schemes -> {table}")
    print(f"training manifest -> {manifest}")
    return 0


def _cmd_split(args) -> int:
    result = load_dataset(args.dataset)
    split = split_train_test(result.records)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "split.json"
    save_split(split, path)
    note = " (accuracies rescaled from percent)" if result.percent_scaled else ""
    print(f"{len(split.train_ids)} train / {len(split.test_ids)} test -> {path}{note}")
    return 0


def _run_and_emit(args, runner) -> int:
    plan = _build_plan(args)
    table = runner(plan)
    paths = emit_reports([table], plan.formats, plan.output_dir)
    for p in paths:
        print(p)
    failed = table.failed_cells
    if failed:
        for cell in failed:
            print(f"FAILED {cell.row} @ {cell.column}: {cell.error}",
                  file=sys.stderr)
        return 3
    return 0


def _cmd_naive(args) -> int:
    plan = _build_plan(args)
    report = run_naive(plan)
    table = ReportTable(name="naive", col_labels=("result",), row_labels=(),
                        cells=(), naive=report)
    for p in emit_reports([table], plan.formats, plan.output_dir):
        print(p)
    print(f"naive reference: MAE {report.mae:.4f}, "
          f"violations {report.violations:g}, "
          f"score {report.monotonicity_score:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="naap440",
        description="Scheme enumeration and accuracy-prediction baselines "
                    "for the NAAP-440 benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dataset_required=True):
        p.add_argument("--dataset", required=dataset_required,
                       help="path to the tabular dataset CSV")
        p.add_argument("--config", help="experiment configuration YAML")
        p.add_argument("--out", default="reports", help="output directory")
        p.add_argument("--seeds", type=lambda s: [int(x) for x in s.split(",")],
                       help="comma-separated seed list (default 1,2,3,4,5)")
        p.add_argument("--formats",
                       type=lambda s: s.split(","),
                       help="comma-separated report formats (csv,text)")

    p_enum = sub.add_parser("enumerate",
                            help="enumerate the scheme space, write the "
                                 "scheme table and training manifest")
    p_enum.add_argument("--config", help="constraint specification YAML")
    p_enum.add_argument("--out", default="reports", help="output directory")
    p_enum.set_defaults(func=_cmd_enumerate)

    p_split = sub.add_parser("split", help="compute the train/test split")
    p_split.add_argument("--dataset", required=True)
    p_split.add_argument("--out", default="reports")
    p_split.set_defaults(func=_cmd_split)

    for name, runner, help_text in (
            ("baseline", run_baseline, "run the full regressor grid"),
            ("ablate-scheme", run_scheme_ablation,
             "scheme-feature ablation at zero epochs"),
            ("ablate-epochs", run_epoch_ablation,
             "epoch-budget by scheme-subset ablation"),
            ("log-check", run_log_feature_check,
             "raw versus log parameter-count check")):
        p_cmd = sub.add_parser(name, help=help_text)
        common(p_cmd)
        p_cmd.set_defaults(func=lambda a, r=runner: _run_and_emit(a, r))

    p_naive = sub.add_parser("naive", help="evaluate the naive reference")
    common(p_naive)
    p_naive.set_defaults(func=_cmd_naive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
