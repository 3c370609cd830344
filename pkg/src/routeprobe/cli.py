"""Command-line entry point: ``routeprobe <command> ...``.

Exit status: 0 when every checked trace is accepted, 1 when any is rejected
(or, for ``report``, could not be checked), 2 on usage, configuration or I/O
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import codegen, monitor, synth
from .config import CONFIG_ENV, load_regions_file, resolve_probe
from .geometry import RegionConfigError
from .probe import ProbeDefinitionError
from .trace import TraceError, read_trace

EXIT_OK, EXIT_REJECTED, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _setup(args):
    try:
        rs = load_regions_file(args.regions)
    except OSError as exc:
        raise UsageError(f"cannot read regions file: {exc}") from None
    except RegionConfigError as exc:
        raise UsageError(f"invalid regions file: {exc}") from None
    try:
        probe = resolve_probe(args.probe, rs)
    except OSError as exc:
        raise UsageError(f"cannot read probe file: {exc}") from None
    except ProbeDefinitionError as exc:
        raise UsageError(f"invalid probe: {exc}") from None
    return rs, probe


def _read(path):
    try:
        return read_trace(path)
    except OSError as exc:
        raise UsageError(f"cannot read trace: {exc}") from None
    except TraceError as exc:
        raise UsageError(f"invalid trace {path}: {exc}") from None


def cmd_check(args) -> int:
    rs, probe = _setup(args)
    t = _read(args.trace)
    verdict, _ = monitor.run_probe(t, probe, rs)
    if args.format == "records":
        print(verdict.to_record())
    else:
        print(monitor.render_table(monitor.FleetReport((verdict,))), end="")
        print(verdict.result, end="")
        if verdict.error_event_index is not None:
            print(f" (error_event_index={verdict.error_event_index})", end="")
        print()
    return EXIT_OK if verdict.result == monitor.ACCEPTED else EXIT_REJECTED


def _trace_paths(items):
    paths = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths += sorted(q for q in p.iterdir() if q.suffix == ".csv" and q.name != "labels.csv")
        elif p.exists():
            paths.append(p)
        else:
            raise UsageError(f"no such trace file or directory: {item}")
    if not paths:
        raise UsageError("no traces given")
    return paths


def cmd_report(args) -> int:
    rs, probe = _setup(args)
    runs, failed = [], {}
    for i, path in enumerate(_trace_paths(args.traces)):
        try:
            runs.append((read_trace(path), probe))
        except (OSError, TraceError) as exc:
            failed[i] = monitor.RowError(path.stem, str(exc))
            runs.append(None)
    checked = iter(monitor.fleet_report([r for r in runs if r is not None], rs, args.jobs).rows)
    rows = tuple(failed[i] if r is None else next(checked) for i, r in enumerate(runs))
    report = monitor.FleetReport(rows)
    print(report.to_records() if args.format == "records" else report.to_table(), end="")
    return EXIT_OK if all(r.result == monitor.ACCEPTED for r in rows) else EXIT_REJECTED


def cmd_measures(args) -> int:
    rs, probe = _setup(args)
    t = _read(args.trace)
    verdict, history = monitor.run_probe(t, probe, rs)
    series = monitor.probe_measures(history) + [monitor.measure_max_attribute(t, "latitude")]
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for s in series:
            (out / f"{s.name}.csv").write_text(s.to_csv(), encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write measures: {exc}") from None
    for s in series:
        print(out / f"{s.name}.csv")
    return EXIT_OK if verdict.result == monitor.ACCEPTED else EXIT_REJECTED


def _load_yaml(path, what):
    try:
        return yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise UsageError(f"cannot load {what}: {exc}") from None


def cmd_synth(args) -> int:
    try:
        rs = load_regions_file(args.regions) if args.regions else None
        config = synth.FleetConfig()
        if args.route:
            config = synth.fleet_config_from_dict(_load_yaml(args.route, "route config"))
        faults = [synth.fault_from_dict({"kind": k}) for k in args.fault]
        if args.faults:
            doc = _load_yaml(args.faults, "fault config")
            items = doc.get("faults", []) if isinstance(doc, dict) else doc
            faults += [synth.fault_from_dict(d) for d in items]
        n_correct = args.count - len(faults)
        if n_correct < 0:
            raise UsageError(f"count {args.count} is smaller than the number of faults ({len(faults)})")
        fleet = synth.generate_fleet(n_correct, faults, args.seed, rs, config)
        paths = synth.write_fleet(fleet, args.out)
    except (synth.SynthError, RegionConfigError) as exc:
        raise UsageError(str(exc)) from None
    except OSError as exc:
        raise UsageError(f"cannot write fleet: {exc}") from None
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_codegen(args) -> int:
    t = _read(args.trace)
    if args.chunk_size < 1:
        raise UsageError("--chunk-size must be at least 1")
    try:
        codegen.write_component(t, args.out, args.chunk_size)
    except OSError as exc:
        raise UsageError(f"cannot write component: {exc}") from None
    return EXIT_OK


def cmd_validate(args) -> int:
    rs, probe = _setup(args)
    print(f"regions: {len(rs)} ok ({', '.join(rs.names)})")
    print(f"probe {probe.name}: {len(probe.states)} states, {len(probe.transitions)} transitions ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routeprobe",
        description="Check GPS vehicle traces against region-guarded probe automata.",
        epilog=f"The default regions file is read from ${CONFIG_ENV}/regions.yaml when set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def probe_opts(p):
        p.add_argument("--probe", default="loose", help="loose, strict, or a probe file")
        p.add_argument("--regions", help="region config file (default: shipped route-100 regions)")

    p = sub.add_parser("check", help="check one trace")
    p.add_argument("trace")
    probe_opts(p)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", help="check many traces and print a fleet table")
    p.add_argument("traces", nargs="+", help="trace files or directories of .csv traces")
    probe_opts(p)
    p.add_argument("--format", choices=("table", "records"), default="table")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("measures", help="write per-state and max-latitude series")
    p.add_argument("trace")
    probe_opts(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_measures)

    p = sub.add_parser("synth", help="generate a labelled synthetic fleet")
    p.add_argument("--route", help="fleet/route config file")
    p.add_argument("--faults", help="fault config file")
    p.add_argument("--fault", action="append", default=[],
                   choices=("detour", "jump", "oscillation"), help="add one default fault")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--regions")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("codegen", help="emit a trace as a straight-line component")
    p.add_argument("trace")
    p.add_argument("--chunk-size", type=int, default=1000)
    p.add_argument("--out", required=True, help="output file")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("validate", help="validate region and probe configs")
    probe_opts(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"routeprobe: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
