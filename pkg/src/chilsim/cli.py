"""Command-line interface.

Subcommands: run (execute a scenario and write trace/metrics/plot),
metrics (recompute a report from a trace CSV), plot (render signals from
a trace CSV), serve-plant (run the plant side and wait for an external
controller over TCP).

Exit codes: 0 success, 2 usage or configuration, 3 protocol failure,
4 plant divergence.
"""

import argparse
import os
import sys

from .errors import (
    ChilsimError,
    ConfigError,
    MetricsError,
    ProtocolError,
    SimulationDiverged,
    UsageError,
)
from .link import accept_plant_connection, open_plant_listener
from .metrics import compute_metrics
from .runner import run_scenario
from .scenario import load_scenario
from .svgplot import render_plot
from .traceio import read_trace_csv, write_trace_csv


def _parse_addr(text):
    host, sep, port = text.rpartition(":")
    if not sep:
        raise UsageError(f"address {text!r} must look like host:port")
    try:
        return host or "127.0.0.1", int(port)
    except ValueError:
        raise UsageError(f"bad port in address {text!r}") from None


def _write_outputs(out_dir, trace, report, ref_v, ref_i):
    os.makedirs(out_dir, exist_ok=True)
    write_trace_csv(trace, os.path.join(out_dir, "trace.csv"))
    with open(os.path.join(out_dir, "metrics.txt"), "w", encoding="utf-8") as fh:
        for line in report.lines():
            fh.write(line + "\n")
    render_plot(trace, ["vs", "is"], os.path.join(out_dir, "plot.svg"), ref_v, ref_i)


def _cmd_run(args):
    cfg = load_scenario(args.scenario)
    transport = None
    listener = None
    use_tcp = args.transport == "tcp" or (args.transport is None and cfg.transport == "tcp")
    if use_tcp:
        addr = args.listen or cfg.tcp_address or "127.0.0.1:0"
        host, port = _parse_addr(addr)
        listener = open_plant_listener(host, port)
        bound = listener.getsockname()
        print(f"listening on {bound[0]}:{bound[1]}, waiting for controller", flush=True)
        transport = accept_plant_connection(listener, timeout=args.accept_timeout)
    try:
        trace, report = run_scenario(cfg, transport)
    finally:
        if listener is not None:
            listener.close()
    _write_outputs(args.out, trace, report, cfg.supervisor.v_cv_ref, cfg.supervisor.i_cc_ref)
    for line in report.lines():
        print(line)
    print(f"wrote trace.csv, metrics.txt, plot.svg to {args.out}")
    return 0


def _cmd_serve_plant(args):
    cfg = load_scenario(args.scenario)
    host, port = _parse_addr(args.listen)
    listener = open_plant_listener(host, port)
    bound = listener.getsockname()
    print(f"plant listening on {bound[0]}:{bound[1]}", flush=True)
    try:
        transport = accept_plant_connection(listener, timeout=args.accept_timeout)
        trace, report = run_scenario(cfg, transport)
    finally:
        listener.close()
    if args.out:
        _write_outputs(args.out, trace, report, cfg.supervisor.v_cv_ref, cfg.supervisor.i_cc_ref)
    for line in report.lines():
        print(line)
    return 0


def _cmd_metrics(args):
    trace = read_trace_csv(args.trace)
    report = compute_metrics(trace, args.ref_v, args.ref_i, args.band)
    for line in report.lines():
        print(line)
    return 0


def _cmd_plot(args):
    trace = read_trace_csv(args.trace)
    signals = [s for s in args.signals.split(",") if s]
    render_plot(trace, signals, args.output, args.ref_v, args.ref_i)
    print(f"wrote {args.output}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chilsim",
        description="Boost battery-charger co-simulation with a lockstep controller link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write outputs")
    p_run.add_argument("--scenario", required=True, help="builtin name or JSON path")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--transport", choices=["inproc", "tcp"], default=None)
    p_run.add_argument("--listen", default=None, help="host:port for tcp transport")
    p_run.add_argument("--accept-timeout", type=float, default=30.0)
    p_run.set_defaults(func=_cmd_run)

    p_srv = sub.add_parser("serve-plant", help="await an external controller over TCP")
    p_srv.add_argument("--scenario", required=True)
    p_srv.add_argument("--listen", required=True, help="host:port to bind")
    p_srv.add_argument("--out", default=None, help="optional output directory")
    p_srv.add_argument("--accept-timeout", type=float, default=300.0)
    p_srv.set_defaults(func=_cmd_serve_plant)

    p_met = sub.add_parser("metrics", help="compute metrics from a trace CSV")
    p_met.add_argument("trace")
    p_met.add_argument("--ref-v", type=float, default=400.0)
    p_met.add_argument("--ref-i", type=float, default=23.0)
    p_met.add_argument("--band", type=float, default=0.02)
    p_met.set_defaults(func=_cmd_metrics)

    p_plot = sub.add_parser("plot", help="render signals from a trace CSV")
    p_plot.add_argument("trace")
    p_plot.add_argument("--signals", required=True, help="comma list, e.g. vs,is")
    p_plot.add_argument("-o", "--output", required=True)
    p_plot.add_argument("--ref-v", type=float, default=400.0)
    p_plot.add_argument("--ref-i", type=float, default=23.0)
    p_plot.set_defaults(func=_cmd_plot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulationDiverged as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 4
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, UsageError, MetricsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChilsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
