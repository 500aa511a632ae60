"""
Command-line entry points.

    gen-debug   generate a validated debugging benchmark
    validate    re-run four-fold validation on a benchmark file
    eval        run an agent over a benchmark and report metrics
    gen-bias    generate newsvendor ID/OOD splits or a training curriculum
    eval-bias   score order decisions against a newsvendor dataset
    report      metrics table from an episode-record file
    replay      re-execute recorded episodes and compare state digests

Exit codes: 0 on success, 1 on a toolkit error or failed check (a JSON
error object goes to stderr), 2 on usage errors.
"""

import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .agents import DEFAULT_TIMEOUT, build_agent
from .bias import (CURRICULUM_PRESETS, POLICIES, build_curriculum, build_splits, evaluate_bias,
                   format_bias_report, parse_decision, read_decisions, read_scenarios,
                   render_prompt, write_decisions, write_scenarios)
from .env import DebugEnv, EnvConfig, run_actions
from .evaluation import (PRESETS, EvalConfig, compute_metrics, filter_sft_trajectories,
                         format_table, parse_strata, read_records, run_episodes,
                         stratified_sample, write_prm_labels, write_records)
from .exceptions import OrGymError
from .lp import SCHEMA_VERSION, dumps_canonical
from .manifest import RunManifest, manifest_path_for
from .saboteur import (ERROR_TYPES, FAMILIES, CrossCheckValidator, FourFoldValidator,
                       SabotageConfig, generate_benchmark, generate_pool, generation_stats,
                       parse_counts, read_benchmark, read_pool, write_benchmark,
                       write_pool)
from .seeding import resolve_seed, stream_rng
from .solver import SolverConfig

logger = logging.getLogger(__name__)

DEFAULT_COUNTS = ",".join(f"{t.value}=10" for t in ERROR_TYPES)


class CommandFailed(Exception):
    """A check ran to completion and did not pass."""


def _write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_canonical(data) + "\n")


# --- gen-debug -------------------------------------------------------------------

def cmd_gen_debug(args, manifest: RunManifest) -> None:
    solver_config = SolverConfig(timeout=args.solve_timeout)
    families = args.families.split(",") if args.families else list(FAMILIES)
    if args.pool:
        pool = read_pool(args.pool)
        manifest.add_inputs([args.pool])
    else:
        pool = generate_pool(args.pool_size, stream_rng(manifest.seed, "pool"), families,
                             solver_config)
    if args.pool_out:
        write_pool(args.pool_out, pool)

    cfg = SabotageConfig(alpha=args.alpha, max_regenerations=args.max_regenerations,
                         rng_seed=manifest.seed, calibrate=args.calibrate)
    counts = parse_counts(args.counts)
    manifest.config.update({"sabotage": cfg.to_dict(), "solver": solver_config.to_dict(),
                            "counts": {t.value: n for t, n in counts.items()},
                            "pool_size": len(pool), "pool": args.pool,
                            "families": None if args.pool else families})
    instances = generate_benchmark(pool, counts, cfg, solver_config, workers=args.workers)
    write_benchmark(args.out, instances)

    if args.lp_dir:
        from .solver.pulp_bridge import write_lp
        os.makedirs(args.lp_dir, exist_ok=True)
        for inst in instances:
            write_lp(inst.sabotaged, os.path.join(args.lp_dir, f"{inst.id}.lp"))

    stats = generation_stats(instances)
    manifest.stats.update(stats)
    manifest.add_outputs([args.out] + ([args.pool_out] if args.pool_out else []))
    print(f"Generated {stats['instances']} instances -> {args.out}")
    print(f"  first-try rate: {stats['first_try_rate']:.1%}")
    print(f"  difficulty: {stats['difficulty']}")


# --- validate --------------------------------------------------------------------

def cmd_validate(args, manifest: RunManifest) -> None:
    instances = read_benchmark(args.bench)
    manifest.add_inputs([args.bench])
    validators = [FourFoldValidator(SolverConfig(timeout=args.solve_timeout))]
    if args.cross_check:
        validators.append(CrossCheckValidator())

    failed = 0
    for inst in instances:
        for validator in validators:
            report = validator.check(inst)
            if not report.passed:
                failed += 1
                print(report)
                break
    passed = len(instances) - failed
    rate = 100.0 * passed / len(instances) if instances else 100.0
    manifest.stats.update({"instances": len(instances), "passed": passed,
                           "cross_check": args.cross_check})
    print("=" * 80)
    print(f"Validation: {passed}/{len(instances)} passed ({rate:.0f}% pass)")
    print("=" * 80)
    if failed:
        raise CommandFailed(f"{failed} instance(s) failed validation")


# --- eval ------------------------------------------------------------------------

def _select(instances, args, seed: int):
    if not args.sample:
        return instances
    if args.sample in PRESETS:
        key, counts = PRESETS[args.sample]
    else:
        key, counts = args.sample_key, parse_strata(args.sample)
    return stratified_sample(instances, counts, seed, key=key)


def _emit_metrics(records, k: int, report_path: Optional[str], figures: Optional[str],
                  manifest: RunManifest) -> None:
    table = compute_metrics(records, k)
    print(format_table(table))
    if report_path:
        _write_json(report_path, {"schema_version": SCHEMA_VERSION, **table.to_dict()})
        manifest.add_outputs([report_path])
    if figures:
        from .visualization import plot_error_type_breakdown, plot_recovery_curve
        plot_recovery_curve(table, figures)
        plot_error_type_breakdown(table, figures)
    manifest.stats.update({"rr": table.rr, "da_mean": table.da_mean,
                           "protocol_errors": table.protocol_errors})


def cmd_eval(args, manifest: RunManifest) -> None:
    instances = _select(read_benchmark(args.bench), args, manifest.seed)
    manifest.add_inputs([args.bench])
    cfg = EvalConfig(k=args.k, max_steps=args.max_steps, workers=args.workers,
                     agent_timeout=args.agent_timeout, per_solve_timeout=args.solve_timeout,
                     seed=manifest.seed)
    build_agent(args.agent, args.agent_timeout).close()
    manifest.config.update({"eval": cfg.to_dict(), "agent": args.agent, "sample": args.sample})

    records = run_episodes(lambda: build_agent(args.agent, args.agent_timeout), instances, cfg)
    write_records(args.out, records)
    outputs = [args.out]
    if args.prm_out:
        write_prm_labels(args.prm_out, records, {i.id: i.ground_truth for i in instances})
        outputs.append(args.prm_out)
    if args.sft_out:
        write_records(args.sft_out, filter_sft_trajectories(records))
        outputs.append(args.sft_out)
    manifest.add_outputs(outputs)
    _emit_metrics(records, args.report_k, args.report, args.figures, manifest)


# --- report / replay -------------------------------------------------------------

def cmd_report(args, manifest: RunManifest) -> None:
    records = read_records(args.records)
    manifest.add_inputs([args.records])
    _emit_metrics(records, args.k, args.json, args.figures, manifest)


def cmd_replay(args, manifest: RunManifest) -> None:
    instances = {inst.id: inst for inst in read_benchmark(args.bench)}
    records = read_records(args.records)
    manifest.add_inputs([args.bench, args.records])
    env_config = EnvConfig(max_steps=args.max_steps, per_solve_timeout=args.solve_timeout)

    mismatches = 0
    for record in records:
        inst = instances.get(record.instance_id)
        if inst is None:
            raise OrGymError("Record refers to an unknown instance", instance_id=record.instance_id)
        final, log = run_actions(DebugEnv(inst, env_config),
                                 [t.action for t in record.trajectory])
        expected = [t.state_digest for t in record.trajectory]
        if [t.state_digest for t in log] != expected or final.status is not record.final_status:
            mismatches += 1
            print(f"✗ {record.instance_id}#{record.attempt_index}: replay diverged")
    manifest.stats.update({"records": len(records), "mismatches": mismatches})
    print(f"Replayed {len(records)} episodes, {mismatches} mismatch(es)")
    if mismatches:
        raise CommandFailed(f"{mismatches} episode(s) did not replay identically")


# --- bias ------------------------------------------------------------------------

def cmd_gen_bias(args, manifest: RunManifest) -> None:
    if args.curriculum:
        scenarios = build_curriculum(args.curriculum, manifest.seed, args.per_level)
        manifest.config.update({"curriculum": args.curriculum, "per_level": args.per_level})
        manifest.stats["scenarios"] = len(scenarios)
    else:
        dataset = build_splits(args.n_id, args.n_ood, manifest.seed)
        scenarios = dataset.scenarios
        manifest.config.update({"n_id": args.n_id, "n_ood": args.n_ood})
        manifest.stats.update(dataset.metadata)
    write_scenarios(args.out, scenarios)
    outputs = [args.out]
    if args.prompts_out:
        with open(args.prompts_out, "w", encoding="utf-8", newline="\n") as fh:
            for sc in scenarios:
                fh.write(dumps_canonical({"schema_version": SCHEMA_VERSION,
                                          "scenario_id": sc.id,
                                          "prompt": render_prompt(sc)}) + "\n")
        outputs.append(args.prompts_out)
    manifest.add_outputs(outputs)
    print(f"Generated {len(scenarios)} scenarios -> {args.out}")


def cmd_eval_bias(args, manifest: RunManifest) -> None:
    scenarios = read_scenarios(args.dataset)
    inputs = [args.dataset]
    if args.decisions:
        decisions = read_decisions(args.decisions)
        inputs.append(args.decisions)
    else:
        policy = POLICIES[args.policy]
        responses = {sc.id: policy(sc) for sc in scenarios}
        decisions = [parse_decision(sid, r) for sid, r in responses.items()]
        if args.decisions_out:
            write_decisions(args.decisions_out, responses)
            manifest.add_outputs([args.decisions_out])
    manifest.add_inputs(inputs)
    manifest.config.update({"policy": None if args.decisions else args.policy})

    report = evaluate_bias(decisions, scenarios)
    print(format_bias_report(report))
    if args.report:
        _write_json(args.report, report.to_dict())
        manifest.add_outputs([args.report])
    if args.figures:
        from .visualization import plot_bias_by_bucket
        plot_bias_by_bucket(report, args.figures)
    manifest.stats.update({"rationality": report.rationality, "bias_diff": report.bias_diff,
                           "drift": report.drift})


# --- parser ----------------------------------------------------------------------

COMMANDS: Dict[str, Callable] = {
    "gen-debug": cmd_gen_debug,
    "validate": cmd_validate,
    "eval": cmd_eval,
    "gen-bias": cmd_gen_bias,
    "eval-bias": cmd_eval_bias,
    "report": cmd_report,
    "replay": cmd_replay,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="master seed (falls back to $ORGYM_SEED, then 0)")
    common.add_argument("--manifest", default=None, help="run manifest path")
    common.add_argument("--verbose", "-v", action="store_true")
    common.add_argument("--solve-timeout", type=float, default=10.0,
                        help="per-solve time limit in seconds")

    parser = argparse.ArgumentParser(prog="orgym", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-debug", parents=[common], help="generate a debugging benchmark")
    p.add_argument("--out", required=True)
    p.add_argument("--counts", default=DEFAULT_COUNTS, help='e.g. "A=10,B=10"')
    source = p.add_mutually_exclusive_group()
    source.add_argument("--pool-size", type=int, default=60)
    source.add_argument("--pool", default=None, help="seed models from a pool file")
    p.add_argument("--families", default=None, help=f"subset of {','.join(FAMILIES)}")
    p.add_argument("--alpha", type=float, default=None, help="Type E over-allocation factor")
    p.add_argument("--max-regenerations", type=int, default=3,
                   help="retries per slot before the pool counts as exhausted")
    p.add_argument("--no-calibrate", dest="calibrate", action="store_false",
                   help="accept injections whatever their IIS size")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--pool-out", default=None)
    p.add_argument("--lp-dir", default=None, help="also write sabotaged models as LP files")

    p = sub.add_parser("validate", parents=[common], help="validate a benchmark file")
    p.add_argument("--bench", required=True)
    p.add_argument("--cross-check", action="store_true", help="re-check statuses with CBC")

    p = sub.add_parser("eval", parents=[common], help="evaluate an agent")
    p.add_argument("--bench", required=True)
    p.add_argument("--agent", required=True, help="oracle | greedy | random | cmd:<command>")
    p.add_argument("--k", type=int, default=5, help="attempts per instance")
    p.add_argument("--max-steps", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--agent-timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--sample", default=None,
                   help=f"stratified sample: {' | '.join(PRESETS)} or 'name=count,...'")
    p.add_argument("--sample-key", default="tier", choices=["tier", "type", "difficulty"])
    p.add_argument("--report-k", type=int, default=5, help="largest k for RR@k")
    p.add_argument("--out", required=True, help="episode records (JSONL)")
    p.add_argument("--report", default=None, help="metrics report (JSON)")
    p.add_argument("--prm-out", default=None, help="PRM step labels (JSONL)")
    p.add_argument("--sft-out", default=None, help="SFT-filtered records (JSONL)")
    p.add_argument("--figures", default=None)

    p = sub.add_parser("gen-bias", parents=[common], help="generate newsvendor scenarios")
    p.add_argument("--out", required=True)
    p.add_argument("--n-id", type=int, default=400)
    p.add_argument("--n-ood", type=int, default=200)
    p.add_argument("--curriculum", choices=CURRICULUM_PRESETS, default=None)
    p.add_argument("--per-level", type=int, default=100)
    p.add_argument("--prompts-out", default=None, help="rendered prompts (JSONL)")

    p = sub.add_parser("eval-bias", parents=[common], help="score newsvendor decisions")
    p.add_argument("--dataset", required=True)
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--decisions", help="decisions JSONL")
    source.add_argument("--policy", choices=sorted(POLICIES), help="built-in decision policy")
    p.add_argument("--decisions-out", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--figures", default=None)

    p = sub.add_parser("report", parents=[common], help="metrics from episode records")
    p.add_argument("records")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--json", default=None)
    p.add_argument("--figures", default=None)

    p = sub.add_parser("replay", parents=[common], help="replay recorded episodes")
    p.add_argument("--bench", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--max-steps", type=int, default=50)

    return parser


def _default_manifest(args) -> str:
    for attr in ("out", "report", "json"):
        value = getattr(args, attr, None)
        if value:
            return manifest_path_for(value)
    source = getattr(args, "bench", None) or getattr(args, "records", None) or "run"
    stem, _ = os.path.splitext(source)
    return f"{stem}.{args.command}.manifest.json"


def _error_line(exc: Exception) -> str:
    if isinstance(exc, OrGymError):
        details = exc.to_dict()
        message = exc.base_message
    else:
        details = {"error": type(exc).__name__, "message": str(exc)}
        message = str(exc)
    return json.dumps({"error": type(exc).__name__, "message": message, "details": details})


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        seed = resolve_seed(args.seed)
    except OrGymError as exc:
        print(_error_line(exc), file=sys.stderr)
        return 1

    manifest = RunManifest(command=args.command, argv=argv, seed=seed)
    exit_code = 0
    try:
        COMMANDS[args.command](args, manifest)
    except CommandFailed as exc:
        logger.error("%s", exc)
        exit_code = 1
    except (OrGymError, OSError, ValueError) as exc:
        print(_error_line(exc), file=sys.stderr)
        exit_code = 1
    manifest.finish(exit_code)
    try:
        manifest.write(args.manifest or _default_manifest(args))
    except OSError as exc:
        logger.warning("could not write manifest: %s", exc)
    return exit_code


def main() -> None:
    sys.exit(cli_dispatch())
