# SPDX-License-Identifier: MIT
"""Command-line front end: analyze, simulate, theory-check, validate-panel, synth-panel.

Exit codes: 0 success, 1 property or acceptance failure, 2 input error.
Results go to stdout; diagnostics go to stderr prefixed with ``error:`` or
``warning:``. Result files reference a separate ``manifest.json`` that holds
the wall-clock time, so the result files themselves are byte-identical on rerun.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import asdict
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt
import pandas as pd

from biaslab.assumptions import assumption_profile
from biaslab.bias import bias_report
from biaslab.config import configure_logging, load_seed, load_threads
from biaslab.errors import (
    BiasLabError,
    ConfigError,
    DimensionMismatch,
    IndexOutOfRange,
    InsufficientData,
    NotPositiveDefinite,
    PreconditionViolated,
    RankDeficient,
    SchemaError,
    UnknownPollutant,
)
from biaslab.jsonio import dumps, write_json
from biaslab.montecarlo import SimConfig, run_experiment
from biaslab.panel.dataset import PanelDataset, load_manifest, load_panel_csv, write_panel_csv
from biaslab.panel.synthetic import SynthPanelConfig, synth_panel
from biaslab.panel.validation import (
    STATISTICS,
    BootstrapConfig,
    BootstrapSummary,
    Combo,
    all_combos,
    cluster_bootstrap,
)
from biaslab.schema import (
    BiasReportDocument,
    RunManifest,
    load_config,
    load_document,
    validate_config,
)
from biaslab.theory import FAULTS, TheoryContext, TheoryEngine

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2

MANIFEST_NAME = "manifest.json"

# Share of trials allowed to fail structure generation.
MAX_FAILED_TRIAL_SHARE = 1e-3

INPUT_ERRORS: tuple[type[BiasLabError], ...] = (
    SchemaError,
    ConfigError,
    NotPositiveDefinite,
    DimensionMismatch,
    IndexOutOfRange,
    PreconditionViolated,
    UnknownPollutant,
    InsufficientData,
    RankDeficient,
)


def _version() -> str:
    try:
        return version("biaslab")
    except PackageNotFoundError:
        return "0+unknown"


def _error(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _warning(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _write_run(
    out_dir: Path,
    command: str,
    config: dict[str, Any],
    seed: int | None,
    started: float,
    files: dict[str, str],
    written: Sequence[str] = (),
) -> None:
    """Write result files plus the manifest that describes them.

    ``written`` names outputs the caller already wrote into ``out_dir``.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text, encoding="utf-8", newline="\n")
    manifest = RunManifest(
        command=command,
        config=config,
        seed=seed,
        version=_version(),
        wall_clock_seconds=time.perf_counter() - started,
        outputs=sorted([*files, *written]),
    )
    write_json(out_dir / MANIFEST_NAME, manifest)


# --- analyze ---


def _optional_list(values: npt.NDArray[np.float64] | None) -> Any:
    return None if values is None else values.tolist()


def cmd_analyze(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    doc = load_document(args.input)
    blocks, err = doc.to_blocks()
    beta = doc.coefficients()
    beta.check(blocks)
    k = doc.measured_pollutant
    if k is not None and k >= blocks.p:
        msg = f"measured_pollutant {k} out of range for {blocks.p} covariate(s)"
        raise IndexOutOfRange(msg)
    report = bias_report(blocks, beta, err)
    beta_pollutants = [*([] if k is None else [doc.beta_Z[k]]), *doc.beta_X]
    profile = assumption_profile(blocks.cov_zx(), blocks.p, beta_pollutants, k)
    out = BiasReportDocument(
        ovb=report.ovb.tolist(),
        meb_full=report.meb_full.tolist(),
        meb_Z=report.meb_Z.tolist(),
        meb_X=report.meb_X.tolist(),
        signs=report.signs(),
        omega=_optional_list(report.omega),
        attenuation_terms=_optional_list(report.attenuation_terms),
        additive_terms=_optional_list(report.additive_terms),
        assumptions=profile,
        sign_tolerance=report.sign_tolerance,
    )
    if args.out is None:
        print(dumps(out), end="")
        return EXIT_OK
    target = Path(args.out)
    out = out.model_copy(update={"manifest": MANIFEST_NAME})
    _write_run(
        target.parent,
        "analyze",
        {"input": str(args.input)},
        None,
        started,
        {target.name: dumps(out)},
    )
    return EXIT_OK


# --- simulate ---


def cmd_simulate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    base = load_config(SimConfig, args.config) if args.config else SimConfig()
    updates: dict[str, Any] = {"seed": load_seed(args.seed, default=base.seed)}
    if args.trials is not None:
        updates["n_trials"] = args.trials
    if args.exclude_z_pollutant:
        updates["include_z_pollutant"] = False
    config = validate_config(SimConfig, {**base.model_dump(), **updates}, "simulate flags")
    threads = load_threads(args.threads)

    tally = run_experiment(config, n_jobs=threads)
    print(tally.format_table())

    if args.out_dir is not None:
        result = {
            "config": config.model_dump(mode="json"),
            "manifest": MANIFEST_NAME,
            "tally": tally.to_dict(),
        }
        _write_run(
            Path(args.out_dir),
            "simulate",
            config.model_dump(mode="json"),
            config.seed,
            started,
            {"sim_tally.json": dumps(result), "sim_tally.csv": tally.to_csv()},
        )

    status = EXIT_OK
    attempted = tally.n_trials + tally.n_failed
    if attempted and tally.n_failed / attempted >= MAX_FAILED_TRIAL_SHARE:
        _error(f"{tally.n_failed} of {attempted} trials failed generation")
        status = EXIT_FAILURE
    if tally.measured_ovb_violations:
        shown = ", ".join(str(i) for i in tally.measured_ovb_violations[:10])
        _error(
            f"measured-pollutant OVB positive under Weak Partial PC+ in "
            f"{len(tally.measured_ovb_violations)} trial(s): {shown}"
        )
        status = EXIT_FAILURE
    return status


# --- theory-check ---


def cmd_theory_check(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    seed = load_seed(args.seed)
    ctx = TheoryContext(n_instances=args.instances, seed=seed)
    if args.inject_fault is not None:
        ctx.omega_fn = FAULTS[args.inject_fault]
    engine = TheoryEngine()
    results = engine.run(ctx)
    failures = engine.failures(results)
    report = {
        "fault": args.inject_fault,
        "n_instances": args.instances,
        "passed": not failures,
        "results": [asdict(r) for r in results],
        "seed": seed,
    }

    if args.format == "json":
        print(dumps(report), end="")
    else:
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            where = "" if r.instance is None else f" [instance {r.instance}]"
            print(f"{status} {r.check_id}{where}: {r.message}")
        print(f"{len(engine.check_ids)} checks, {len(failures)} failure(s)")

    if args.out is not None:
        target = Path(args.out)
        config = {"fault": args.inject_fault, "n_instances": args.instances}
        report["manifest"] = MANIFEST_NAME
        _write_run(target.parent, "theory-check", config, seed, started, {target.name: dumps(report)})

    if failures:
        violated = sorted({r.check_id for r in failures})
        _error(f"violated properties: {', '.join(violated)}")
        return EXIT_FAILURE
    return EXIT_OK


# --- validate-panel ---


def _load_panel(args: argparse.Namespace) -> tuple[PanelDataset, dict[str, Any], int]:
    """Panel, config echo and run seed.

    A synthetic config's ``seed`` is the default, as for ``synth-panel``, so
    ``--synthetic CONFIG`` sees the same panel that ``synth-panel CONFIG`` writes.
    """
    if args.synthetic is not None:
        config = load_config(SynthPanelConfig, args.synthetic)
        seed = load_seed(args.seed, default=config.seed)
        panel = synth_panel(config, seed=seed)
        return panel.dataset, {"synthetic": panel.manifest.config}, seed
    seed = load_seed(args.seed)
    manifest = load_manifest(args.manifest) if args.manifest else None
    echo = {"data": str(args.data), "manifest": None if args.manifest is None else str(args.manifest)}
    return load_panel_csv(args.data, manifest), echo, seed


def _requested_combos(args: argparse.Namespace, data: PanelDataset) -> list[Combo]:
    if args.combo:
        if args.main or args.control or args.crop:
            msg = "--combo cannot be combined with --main, --control or --crop"
            raise PreconditionViolated(msg)
        return sorted(set(args.combo))
    monitored = data.monitored_pollutants()
    return all_combos(
        args.crop or data.crops,
        mains=args.main or monitored,
        controls=args.control or monitored,
    )


def format_summary(summary: BootstrapSummary) -> str:
    """Plain-text rows of point estimates and the share of replicates not supporting them."""
    lines: list[str] = []
    for name, point in summary.point.items():
        n_reps = len(summary.replicates[name])
        lines.append(f"{name} ({point.n_combos} combos, {n_reps} replicates)")
        for stat in STATISTICS:
            value = getattr(point, stat)
            share = summary.fraction_not_supporting(name, stat)
            shown = "n/a" if math.isnan(share) else f"{100 * share:.1f}%"
            number = f"{value:d}" if isinstance(value, int) else f"{value:.6g}"
            lines.append(f"  {stat:<22}{number:>14}   not supporting: {shown}")
    return "\n".join(lines)


def replicate_frame(summary: BootstrapSummary) -> pd.DataFrame:
    """One row per (subset, replicate) with every summary statistic."""
    records = [
        {"subset": name, "replicate": k, "n_combos": s.n_combos, **{st: getattr(s, st) for st in STATISTICS}}
        for name, reps in summary.replicates.items()
        for k, s in enumerate(reps)
    ]
    return pd.DataFrame.from_records(
        records, columns=["subset", "replicate", "n_combos", *STATISTICS]
    )


def cmd_validate_panel(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    threads = load_threads(args.threads)
    data, source, seed = _load_panel(args)
    data = data.to_who_units()
    combos = _requested_combos(args, data)
    if not combos:
        msg = "no (main, control, crop) combos to run"
        raise InsufficientData(msg)
    config = validate_config(
        BootstrapConfig,
        {
            "n_reps": args.bootstrap,
            "seed": seed,
            "exclude_controls": args.exclude_control or (),
            "identity_resample": args.identity_resample,
        },
        "validate-panel flags",
    )

    summary = cluster_bootstrap(data, combos, config, n_jobs=threads)
    for label, reason in summary.skipped.items():
        _warning(f"combo {label} skipped: {reason}")
    print(format_summary(summary))

    if args.out_dir is not None:
        echo = {
            **source,
            "bootstrap": config.model_dump(mode="json"),
            "combos": [c.label for c in combos],
        }
        result = {"manifest": MANIFEST_NAME, **summary.to_dict()}
        replicates = replicate_frame(summary).to_csv(
            index=False, float_format="%.17g", lineterminator="\n"
        )
        _write_run(
            Path(args.out_dir),
            "validate-panel",
            echo,
            seed,
            started,
            {"panel_validation.json": dumps(result), "bootstrap_replicates.csv": str(replicates)},
        )

    if not summary.results:
        _error("every combo was skipped")
        return EXIT_INPUT
    return EXIT_OK


# --- synth-panel ---


def cmd_synth_panel(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    config = load_config(SynthPanelConfig, args.config)
    seed = load_seed(args.seed, default=config.seed)
    panel = synth_panel(config, seed=seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_panel_csv(panel.dataset, out_dir / "panel.csv")
    truth = {**panel.manifest.model_dump(mode="json"), "manifest": MANIFEST_NAME}
    _write_run(
        out_dir,
        "synth-panel",
        panel.manifest.config,
        seed,
        started,
        {"panel_manifest.json": dumps(truth)},
        written=["panel.csv"],
    )
    print(f"wrote {len(panel.dataset.frame)} rows to {out_dir / 'panel.csv'}")
    return EXIT_OK


# --- argument parsing ---


def _combo_arg(text: str) -> Combo:
    try:
        return Combo.parse(text)
    except (PreconditionViolated, UnknownPollutant) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        msg = f"must be >= 0, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biaslab",
        description="Omitted-variable and measurement-error bias for pollutant regressions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="Closed-form biases for one covariance structure")
    analyze.add_argument("input", help="JSON file with blocks (or cume) and coefficients")
    analyze.add_argument("--out", default=None, help="Write the report here instead of stdout")
    analyze.set_defaults(handler=cmd_analyze)

    simulate = sub.add_parser("simulate", help="Monte Carlo frequencies of the bias phenomena")
    simulate.add_argument("--config", default=None, help="SimConfig JSON file")
    simulate.add_argument("--trials", type=_non_negative, default=None)
    simulate.add_argument("--seed", type=_non_negative, default=None, help="Overrides BIASLAB_SEED")
    simulate.add_argument("--threads", type=int, default=None, help="Overrides BIASLAB_THREADS")
    simulate.add_argument("--out-dir", default=None)
    simulate.add_argument(
        "--exclude-z-pollutant",
        action="store_true",
        help="Leave the perfectly measured pollutant out of the correlation average",
    )
    simulate.set_defaults(handler=cmd_simulate)

    theory = sub.add_parser("theory-check", help="Randomized checks of the bias sign results")
    theory.add_argument("--instances", type=_non_negative, default=200)
    theory.add_argument("--seed", type=_non_negative, default=None, help="Overrides BIASLAB_SEED")
    theory.add_argument("--inject-fault", choices=sorted(FAULTS), default=None)
    theory.add_argument("--format", choices=["text", "json"], default="text")
    theory.add_argument("--out", default=None, help="Also write the JSON report here")
    theory.set_defaults(handler=cmd_theory_check)

    panel = sub.add_parser("validate-panel", help="Fixed-effects bias estimates and bootstrap")
    source = panel.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", default=None, help="Panel CSV")
    source.add_argument("--synthetic", default=None, help="SynthPanelConfig JSON file")
    panel.add_argument("--manifest", default=None, help="Units manifest for --data")
    panel.add_argument("--combo", type=_combo_arg, action="append", default=[], metavar="MAIN:CONTROL:CROP")
    panel.add_argument("--main", action="append", default=[])
    panel.add_argument("--control", action="append", default=[])
    panel.add_argument("--crop", action="append", default=[])
    panel.add_argument("--exclude-control", action="append", default=[])
    panel.add_argument("--bootstrap", type=_non_negative, default=0, help="Replicates (0: none)")
    panel.add_argument("--seed", type=_non_negative, default=None, help="Overrides BIASLAB_SEED")
    panel.add_argument("--threads", type=int, default=None, help="Overrides BIASLAB_THREADS")
    panel.add_argument("--out-dir", default=None)
    panel.add_argument("--identity-resample", action="store_true")
    panel.set_defaults(handler=cmd_validate_panel)

    synth = sub.add_parser("synth-panel", help="Write a synthetic panel and its ground truth")
    synth.add_argument("config", help="SynthPanelConfig JSON file")
    synth.add_argument("--out-dir", required=True)
    synth.add_argument("--seed", type=_non_negative, default=None, help="Overrides BIASLAB_SEED")
    synth.set_defaults(handler=cmd_synth_panel)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        configure_logging()
        return handler(args)
    except INPUT_ERRORS as exc:
        _error(str(exc))
        return EXIT_INPUT
    except BiasLabError as exc:
        _error(str(exc))
        return EXIT_FAILURE
    except OSError as exc:
        _error(f"cannot write output: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
