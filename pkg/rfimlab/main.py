import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from rfimlab.config import config, validate_epsilon
from rfimlab.exceptions import InvariantViolation, ParameterError
from rfimlab.experiments.acceptance_suite import PINNED_SEED, SUITE_NAMES, AcceptanceSuite
from rfimlab.models import Boundary, Diagnostic, Estimate, ExperimentKind, PerturbationMode, RunConfig, RunSummary
from rfimlab.physics.disagreement import LabelGrid, audit_labels
from rfimlab.physics.disorder import sample_field
from rfimlab.physics.groundstate import ground_state
from rfimlab.physics.lattice import box
from rfimlab.templates.summary_template import (
    ARTIFACTS_LINE,
    CHECK_LINE,
    ESTIMATE_ITEM,
    GROUP_LINE,
    GS_HEADER,
    RUN_BANNER,
    SUITE_LINE,
)
from rfimlab.utils.records import RECORDS_FILE, RecordWriter
from rfimlab.utils.registry import get_experiment, list_experiments
from rfimlab.utils.report import (
    SUMMARY_FILE,
    rebuild_summary,
    write_report,
    write_run_config,
    write_summary,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2
EXIT_IO = 3

# RunConfig fields settable from the command line, beyond the common flags
EXPERIMENT_FLAGS = (
    "gamma",
    "alpha",
    "alpha_prime",
    "delta",
    "K",
    "mode",
    "aspect",
    "factor",
    "N_prime",
    "shift_amplitude",
    "shift_region",
    "diagnostic",
)


class LabArgumentParser(argparse.ArgumentParser):
    """Argument errors surface as validation failures (exit 1) instead of argparse's exit 2."""

    def error(self, message: str):
        raise ParameterError(message)


def parse_list(cast: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    def parse(text: str) -> List[Any]:
        items = [item.strip() for item in text.split(",") if item.strip()]
        if not items:
            raise ValueError(f"empty list {text!r}")
        return [cast(item) for item in items]

    return parse


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration; flags override its values")
    p.add_argument("--seed", dest="master_seed", type=int, help="master seed (default RFIM_LAB_SEED)")
    p.add_argument("--samples", type=int)
    p.add_argument("--eps", dest="epsilon", type=parse_list(float), help="comma-separated disorder strengths")
    p.add_argument("--N", dest="N", type=parse_list(int), help="comma-separated box radii")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="output_dir", help="output directory (default RFIM_LAB_OUT)")


def _add_experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--alpha-prime", dest="alpha_prime", type=float)
    p.add_argument("--delta", type=float, help="override the shift size")
    p.add_argument("--K", dest="K", type=float, help="override the distance threshold")
    p.add_argument("--mode", choices=[m.value for m in PerturbationMode])
    p.add_argument("--aspect", type=int)
    p.add_argument("--factor", type=int)
    p.add_argument("--N-prime", dest="N_prime", type=int)
    p.add_argument("--shift-amplitude", dest="shift_amplitude", type=float)
    p.add_argument("--shift-region", dest="shift_region", choices=["quarter", "full"])
    p.add_argument("--diagnostic", choices=[d.value for d in Diagnostic])


def build_parser() -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog="rfimlab", description="Zero-temperature random field Ising laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    gs = sub.add_parser("gs", help="solve one sample and dump field, spins and labels")
    gs.add_argument("--N", type=int, default=4)
    gs.add_argument("--eps", type=float, default=1.0)
    gs.add_argument("--seed", type=int, default=None)
    gs.add_argument("--index", type=int, default=0, help="sample index")
    gs.add_argument("--out", default=None, help="also write the dumps to this directory")
    gs.set_defaults(handler=cmd_gs)

    for item in list_experiments():
        p = sub.add_parser(item["kind"], help=item["title"])
        _add_common(p)
        _add_experiment_flags(p)
        p.set_defaults(handler=cmd_experiment, kind=ExperimentKind(item["kind"]))

    verify = sub.add_parser("verify", help="run the acceptance suites at pinned seeds")
    verify.add_argument("--seed", type=int, default=PINNED_SEED)
    verify.add_argument("--workers", type=int, default=1)
    verify.add_argument("--quick", action="store_true", help="reduced sample counts")
    verify.add_argument("--inject-fault", action="store_true", help="corrupt solved states (negative control)")
    verify.add_argument("--suite", action="append", choices=SUITE_NAMES, help="run only this suite (repeatable)")
    verify.add_argument("--out", default=None, help="write verify.json to this directory")
    verify.set_defaults(handler=cmd_verify)

    report = sub.add_parser("report", help="rebuild summary, CSV and chart from a run directory")
    report.add_argument("run_dir", help="directory holding run_config.json and records.jsonl")
    report.set_defaults(handler=cmd_report)
    return parser


def _format_estimate(est: Estimate) -> str:
    if est.value is None:
        return "n/a"
    if est.stderr is None:
        return f"{est.value:.4g}"
    return f"{est.value:.4g}+-{est.stderr:.2g}"


def print_summary(summary: RunSummary) -> None:
    for g in summary.groups:
        items = [
            ESTIMATE_ITEM.format(name=name, value=_format_estimate(est))
            for name, est in {**g.probabilities, **g.means}.items()
        ]
        items += [ESTIMATE_ITEM.format(name=name, value=count) for name, count in g.counts.items()]
        print(GROUP_LINE.format(N=g.N, epsilon=g.epsilon, samples=g.samples, ties=g.ties, stats=" ".join(items)))
    for key, fit in summary.decay.items():
        if fit.rate is not None:
            print(f"   📉 eps={key} decay rate c={_format_estimate(fit.rate)}")
    for key, exp in summary.exponent.items():
        if exp.alpha_hat is not None:
            print(f"   📐 eps={key} alpha={exp.alpha_hat:.4g} [{exp.confidence_low:.4g}, {exp.confidence_high:.4g}]")
    for name, ok in summary.checks.items():
        print(CHECK_LINE.format(glyph="✅" if ok else "⚠️", name=name))


def cmd_experiment(args: argparse.Namespace) -> int:
    overrides: Dict[str, Any] = {
        name: getattr(args, name)
        for name in ("master_seed", "samples", "epsilon", "N", "workers", "output_dir") + EXPERIMENT_FLAGS
    }
    run = RunConfig.load(args.kind, args.config, **overrides)
    out_dir = Path(run.output_dir) / run.kind.value
    experiment = get_experiment(run)
    print(
        RUN_BANNER.format(
            kind=run.kind.value,
            title=experiment.title,
            N=run.N,
            epsilon=run.epsilon,
            samples=run.samples,
            seed=run.master_seed,
            workers=run.workers,
        )
    )
    write_run_config(run, out_dir)
    with RecordWriter(out_dir / RECORDS_FILE) as writer:
        summary = experiment.run(writer)
    write_summary(summary, out_dir)
    write_report(summary, out_dir)
    print_summary(summary)
    print(ARTIFACTS_LINE.format(path=out_dir))
    return EXIT_OK


def cmd_gs(args: argparse.Namespace) -> int:
    if args.N < 0:
        raise ParameterError(f"N must be nonnegative, got {args.N}")
    validate_epsilon(args.eps)
    seed = config.seed if args.seed is None else args.seed
    region = box(args.N)
    field = sample_field(region, args.eps, seed, args.index)
    plus = ground_state(field, region, Boundary.PLUS)
    minus = ground_state(field, region, Boundary.MINUS)
    lg = LabelGrid.from_states(plus, minus)
    audit = audit_labels(field, lg)

    dumps = {
        "field.txt": field.dump(),
        "spins_plus.txt": plus.dump(),
        "spins_minus.txt": minus.dump(),
        "labels.txt": lg.dump(),
    }
    header = dict(N=args.N, epsilon=args.eps, seed=seed, index=args.index)
    print(GS_HEADER.format(title="plus-boundary ground state", **header))
    print(dumps["spins_plus.txt"], end="")
    print(GS_HEADER.format(title="minus-boundary ground state", **header))
    print(dumps["spins_minus.txt"], end="")
    print(GS_HEADER.format(title="labels", **header))
    print(dumps["labels.txt"], end="")
    counts = {label.value: n for label, n in lg.counts().items()}
    print(f"🔍 labels {counts} energies +{plus.energy:.6g}/-{minus.energy:.6g} ties={lg.tie} components={audit.components}")

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for name, text in dumps.items():
            (out_dir / name).write_text(text, encoding="utf-8")
        print(ARTIFACTS_LINE.format(path=out_dir))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    suite = AcceptanceSuite(seed=args.seed, quick=args.quick, inject_fault=args.inject_fault, workers=args.workers)
    print(f"🧪 Running acceptance suites (seed={args.seed}{', quick' if args.quick else ''})")
    results = suite.run(args.suite)
    for result in results:
        print(SUITE_LINE.format(glyph="✅" if result.passed else "❌", name=result.name, detail=result.detail))
    if args.out:
        path = Path(args.out) / "verify.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = [result.model_dump() for result in results]
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(ARTIFACTS_LINE.format(path=path.parent))
    failed = [result.name for result in results if not result.passed]
    if failed:
        print(f"❌ {len(failed)} suite(s) failed: {', '.join(failed)}")
        return EXIT_INVARIANT
    print("✅ All suites passed")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    run_dir = Path(args.run_dir)
    summary = rebuild_summary(run_dir)
    stored = run_dir / SUMMARY_FILE
    fresh = summary.model_dump_json(indent=2) + "\n"
    if stored.exists():
        same = stored.read_text(encoding="utf-8") == fresh
        print("✅ Summary matches the records" if same else "⚠️ Stored summary differs from the records; rewritten")
    write_summary(summary, run_dir)
    write_report(summary, run_dir)
    print_summary(summary)
    print(ARTIFACTS_LINE.format(path=run_dir))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=logging.DEBUG if config.debug_mode else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = build_parser().parse_args(argv)
        return args.handler(args)
    except InvariantViolation as e:
        print(f"❌ Invariant violation {e}", file=sys.stderr)
        if e.details:
            print(f"   details: {e.details}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as e:
        print(f"❌ I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"❌ Invalid parameters: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
