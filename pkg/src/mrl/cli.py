"""Operator command line: run sessions, sweep step sizes, run group
experiments, analyze and replay logs, and serve the live trainer.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 replay mismatch.
The default output directory is the working directory unless MRL_LOG_DIR is
set. ``--no-timestamps`` freezes event timestamps so outputs are
byte-reproducible for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import analysis, experiment, store
from .catalog import CatalogError, builtin_catalog, default_engine_config
from .engine import ConfigurationError
from .novice import (
    Group,
    NoviceProfile,
    PhaseSchedule,
    guided_transfer_schedule,
    run_session,
    sharp_preference,
)
from .novice import profile_sampler as make_profile_sampler


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n\n{self.format_help()}")


def build_parser() -> _Parser:
    parser = _Parser(prog="mrl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--seed", type=int, default=0, help="master seed")
        p.add_argument("--out", type=Path, help="output path or directory")
        p.add_argument("--catalog", choices=["robot4", "tetris7"], help="reinforcer catalog")
        p.add_argument("--no-timestamps", action="store_true", help="freeze event timestamps")

    p_run = sub.add_parser("run", help="run one simulated session and write its event log")
    common(p_run)
    p_run.add_argument("--group", choices=[g.value for g in Group], help="experimental group")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="entropy trajectories across step sizes")
    common(p_sweep)
    p_sweep.add_argument("--alphas", default="0.01,0.015,0.05,0.07", help="comma-separated alphas")
    p_sweep.add_argument("--seeds", type=int, default=30, help="sessions per alpha")
    p_sweep.set_defaults(func=cmd_sweep)

    p_exp = sub.add_parser("experiment", help="three-group experiment with simulated novices")
    common(p_exp)
    p_exp.add_argument("--groups", default="none,random,learned", help="comma-separated groups")
    p_exp.add_argument("--subjects", type=int, default=30, help="subjects per group")
    p_exp.set_defaults(func=cmd_experiment)

    p_an = sub.add_parser("analyze", help="entropy/regret series and stats from event logs")
    common(p_an)
    p_an.add_argument("--log", type=Path, nargs="+", required=True, help="event log file(s)")
    p_an.set_defaults(func=cmd_analyze)

    p_rep = sub.add_parser("replay", help="verify an event log against the engine")
    common(p_rep)
    p_rep.add_argument("--log", type=Path, required=True, help="event log file")
    p_rep.set_defaults(func=cmd_replay)

    p_srv = sub.add_parser("serve", help="start the live trainer service")
    common(p_srv)
    p_srv.add_argument("--port", type=int, default=7477)
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def _out_dir(args) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get("MRL_LOG_DIR", "."))


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_bundle(args):
    """Config file plus flags -> (engine config, profile, schedule, group, catalog)."""
    doc = _load_config_file(args.config)
    catalog_name = args.catalog or doc.get("catalog", "tetris7")
    catalog = builtin_catalog(catalog_name)

    engine_doc = dict(doc.get("engine", {}))
    engine_doc.pop("n", None)
    engine_doc.pop("seed", None)
    config = default_engine_config(catalog, seed=args.seed, **engine_doc)

    if "novice" in doc:
        profile = NoviceProfile.from_dict(doc["novice"])
    else:
        profile = NoviceProfile(
            preference=sharp_preference(catalog.n, 0, peak=0.7),
            base_rectify=0.2,
            boost=0.6 / catalog.n,
            mistake_hazard=0.5,
        )
    if profile.n != catalog.n:
        raise ConfigurationError(
            f"novice preference has {profile.n} entries but catalog {catalog_name} has {catalog.n}"
        )

    if "schedule" in doc:
        schedule = PhaseSchedule.from_dict(doc["schedule"])
    else:
        schedule = guided_transfer_schedule()

    group = Group(getattr(args, "group", None) or doc.get("group", "learned"))
    return config, profile, schedule, group, catalog, doc


def _fixed_ts(args) -> int | None:
    return 0 if args.no_timestamps else None


def cmd_run(args) -> int:
    config, profile, schedule, group, catalog, _ = _resolve_bundle(args)
    out = _out_dir(args)
    if out.suffix:
        log_path = out
        log_path.parent.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)
        log_path = out / f"run-{group.value}-{args.seed}.log"
    with store.FileEventLog(log_path, fixed_timestamp=_fixed_ts(args)) as sink:
        summary = run_session(
            profile, schedule, group, config, event_sink=sink, catalog_name=catalog.name
        )
    print(f"session log: {log_path}")
    print(f"mistakes per phase: {summary.mistakes_per_phase}")
    print(f"interactions: {len(summary.records)}, total regret: {summary.total_regret:.4f}")
    if summary.identified_preference is not None:
        print(
            f"identified preference: {summary.identified_preference} "
            f"(true: {summary.true_preference})"
        )
    return 0


def cmd_sweep(args) -> int:
    config, profile, schedule, _, catalog, _ = _resolve_bundle(args)
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError as e:
        raise UsageError(f"bad --alphas value: {e}") from None
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    sweeps = analysis.alpha_sweep(alphas, profile, schedule, config, seeds=args.seeds)
    for alpha, series in sweeps.items():
        path = out / f"alpha_{alpha:g}.csv"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,entropy\n")
            for t, h in series.values:
                fh.write(f"{t},{h!r}\n")
        print(f"wrote {path} ({len(series)} points)")
    return 0


def cmd_experiment(args) -> int:
    config, profile, schedule, _, catalog, doc = _resolve_bundle(args)
    groups = [Group(g.strip()) for g in args.groups.split(",") if g.strip()]
    out = _out_dir(args)
    logs_dir = out / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)

    sampler_doc = doc.get("sampler", {})
    sampler = make_profile_sampler(
        catalog.n,
        concentration=sampler_doc.get("concentration", 0.5),
        base_rectify=sampler_doc.get("base_rectify", profile.base_rectify),
        boost_times_n=sampler_doc.get("boost_times_n", profile.boost * catalog.n),
        skill=sampler_doc.get("skill", profile.skill),
        learn_rate=sampler_doc.get("learn_rate", profile.learn_rate),
        hazard_range=tuple(sampler_doc.get("hazard_range", (0.3, 0.8))),
    )

    sinks = []

    def sink_factory(group, j):
        sink = store.FileEventLog(
            logs_dir / f"{group.value}-{j:03d}.log", fixed_timestamp=_fixed_ts(args)
        )
        sinks.append(sink)
        return sink

    stats = experiment.run_group_experiment(
        args.subjects, sampler, schedule, config, groups=groups, session_sink_factory=sink_factory
    )
    for sink in sinks:
        sink.close()

    report = stats.report()
    report_path = out / "report.txt"
    report_path.write_text(report, encoding="utf-8")
    print(report, end="")
    print(f"report: {report_path}; {len(sinks)} session logs in {logs_dir}")
    return 0


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    stats_lines = []
    for log_path in args.log:
        events = store.read_events(log_path)
        summary = store.replay_session(events)
        n = len(summary.records[0].weights_after) if summary.records else 2
        series = analysis.entropy_series_from_records(summary.records, n)
        stem = Path(log_path).stem
        with open(out / f"{stem}_entropy.csv", "w", encoding="utf-8") as fh:
            fh.write("t,entropy\n")
            for t, h in series.values:
                fh.write(f"{t},{h!r}\n")
        with open(out / f"{stem}_regret.csv", "w", encoding="utf-8") as fh:
            fh.write("t,regret\n")
            for rec in summary.records:
                fh.write(f"{rec.t},{rec.regret!r}\n")
        plateau = analysis.detect_plateau(series, 1e-6) if len(series) > 1 else None
        stats_lines.append(
            f"{stem}: mistakes={summary.total_mistakes} interactions={len(summary.records)} "
            f"final_entropy={series.entropies[-1]:.4f} total_regret={summary.total_regret:.4f} "
            f"plateau={plateau}"
        )
    stats_text = "\n".join(stats_lines) + "\n"
    (out / "stats.txt").write_text(stats_text, encoding="utf-8")
    print(stats_text, end="")
    return 0


def cmd_replay(args) -> int:
    events = store.read_events(args.log)
    summary = store.replay_session(events)
    print(
        f"replay OK: {len(events)} events, {len(summary.records)} interactions, "
        f"{summary.total_mistakes} mistakes"
    )
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    log_dir = args.out or os.environ.get("MRL_LOG_DIR")
    serve(port=args.port, log_dir=str(log_dir) if log_dir else None, host=args.host)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 1
    except store.ReplayMismatchError as e:
        print(f"replay mismatch: {e}", file=sys.stderr)
        return 3
    except (
        ConfigurationError,
        CatalogError,
        store.ProtocolError,
        store.StorageError,
        analysis.ValidationError,
        analysis.ConvergenceError,
        analysis.ResourceLimitError,
        ValueError,
        OSError,
        json.JSONDecodeError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
