"""Command-line entry point.

Machine output (CSV rows, telemetry lines) goes to stdout; everything meant
for humans (warnings, summaries, errors) goes to stderr.  Exit codes: 0 on
success, 1 when inputs fail validation, 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Optional

from . import emfield, plotting, sweep as sweep_mod
from .oscillator import (
    DEFAULT_THRESHOLD_V,
    OscillatorDomainError,
    OscillatorParameterError,
    OscillatorParams,
    frequency,
    period,
    validity_report,
)
from .protocol import DEFAULT_KEYMAP, encode_telemetry, load_keymap
from .server import DEFAULT_HTTP_PORT, DEFAULT_TCP_PORT, TeleopServer
from .teleop import ScriptError, replay_script
from .world import ScenarioError, WorldScenario, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route that through the
    # validation exit code instead.
    def error(self, message: str):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _load_scenario_file(path: str, seed: Optional[int]) -> WorldScenario:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read scenario file: {exc}") from None
    scenario = load_scenario(text)
    if seed is not None:
        scenario = scenario.with_seed(seed)
    return scenario


def _build_parser() -> _Parser:
    parser = _Parser(prog="cabletracer", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand")

    p_sweep = sub.add_parser("sweep", help="trace the route and localize the fault")
    p_sweep.add_argument("--scenario", required=True, help="scenario file")
    p_sweep.add_argument("--step", type=float, default=0.5, help="sample interval (m)")
    p_sweep.add_argument("--full", action="store_true",
                         help="continue past the first fault sample to the route end")
    p_sweep.add_argument("--out", help="write CSV here instead of stdout")
    p_sweep.add_argument("--plot", help="also render the sweep figure to this image file")
    p_sweep.add_argument("--threshold-v", type=float, default=DEFAULT_THRESHOLD_V)
    p_sweep.add_argument("--seed", type=int, help="override the scenario noise seed")

    p_field = sub.add_parser("field", help="evaluate the field at one probe point")
    p_field.add_argument("--scenario", required=True)
    p_field.add_argument("--x", type=float, required=True)
    p_field.add_argument("--y", type=float, required=True)
    p_field.add_argument("--seed", type=int, help="override the scenario noise seed")

    p_osc = sub.add_parser("oscillator", help="detector tank period/frequency calculator")
    p_osc.add_argument("--r", type=float, required=True, help="timing resistor (Ohm)")
    p_osc.add_argument("--rs", type=float, required=True, help="series resistor (Ohm)")
    p_osc.add_argument("--c", type=float, required=True, help="timing capacitor (F)")
    p_osc.add_argument("--vdd", type=float, required=True, help="supply voltage (V)")
    p_osc.add_argument("--vd", type=float, required=True, help="diode forward voltage (V)")
    p_osc.add_argument("--vt", type=float, required=True, help="inverter threshold (V)")

    p_sim = sub.add_parser("simulate", help="replay a command script headlessly")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--script", required=True, help="command script file")
    p_sim.add_argument("--duration", type=float, help="log length in seconds")
    p_sim.add_argument("--out", help="write the telemetry log here instead of stdout")
    p_sim.add_argument("--seed", type=int, help="override the scenario noise seed")

    p_serve = sub.add_parser("serve", help="run the teleoperation server")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--tcp-port", type=int, default=DEFAULT_TCP_PORT)
    p_serve.add_argument("--http-port", type=int, default=DEFAULT_HTTP_PORT)
    p_serve.add_argument("--keymap", help="keymap file (default F/B/L/R/S)")
    p_serve.add_argument("--seed", type=int, help="override the scenario noise seed")

    return parser


def _cmd_sweep(args) -> int:
    scenario = _load_scenario_file(args.scenario, args.seed)
    records = sweep_mod.run_sweep(
        scenario, args.step, threshold_v=args.threshold_v, full=args.full
    )
    report = sweep_mod.localize(records)

    lines = ["distance_m,frequency_hz,fault"]
    for r in records:
        lines.append(f"{r.distance_m:.6f},{r.frequency_hz:.6f},{'Yes' if r.fault else 'No'}")
    if report.found:
        lines.append(
            f"# fault interval [{report.interval_low_m:.6f}, {report.interval_high_m:.6f}] m,"
            f" midpoint {report.midpoint_m:.6f} m"
        )
    else:
        lines.append("# no fault detected")
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(csv_text)
        print(f"wrote {len(records)} records to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(csv_text)
    if report.found:
        print(
            f"fault between {report.interval_low_m:g} m and {report.interval_high_m:g} m"
            f" (midpoint {report.midpoint_m:g} m)",
            file=sys.stderr,
        )
    else:
        print("no fault detected over the swept route", file=sys.stderr)
    if args.plot:
        plotting.render_sweep_figure(
            records, scenario.line_frequency_hz, args.plot, report=report
        )
        print(f"figure written to {args.plot}", file=sys.stderr)
    return EXIT_OK


def _cmd_field(args) -> int:
    scenario = _load_scenario_file(args.scenario, args.seed)
    sample = emfield.field_at(scenario, (args.x, args.y))
    sys.stdout.write(
        f"{sample.b_rms_t:.6e},{sample.induced_voltage_v:.6e},{sample.frequency_hz:.6f}\n"
    )
    return EXIT_OK


def _cmd_oscillator(args) -> int:
    params = OscillatorParams(
        r_ohm=args.r, rs_ohm=args.rs, c_f=args.c,
        v_dd=args.vdd, v_d=args.vd, v_t=args.vt,
    )
    t = period(params)
    f = frequency(params)
    for warning in validity_report(params):
        print(f"warning: {warning}", file=sys.stderr)
    sys.stdout.write(f"{t:.6e},{f:.6f}\n")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    scenario = _load_scenario_file(args.scenario, args.seed)
    try:
        with open(args.script, "r", encoding="utf-8") as handle:
            script_text = handle.read()
    except OSError as exc:
        raise _UsageError(f"cannot read script file: {exc}") from None
    frames = replay_script(scenario, script_text, duration_s=args.duration)
    log = "".join(encode_telemetry(frame) + "\n" for frame in frames)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(log)
        print(f"wrote {len(frames)} frames to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(log)
    return EXIT_OK


def _cmd_serve(args) -> int:
    scenario = _load_scenario_file(args.scenario, args.seed)
    keymap = DEFAULT_KEYMAP
    if args.keymap:
        try:
            with open(args.keymap, "r", encoding="utf-8") as handle:
                keymap = load_keymap(handle.read())
        except OSError as exc:
            raise _UsageError(f"cannot read keymap file: {exc}") from None
    server = TeleopServer(
        scenario, tcp_port=args.tcp_port, http_port=args.http_port, keymap=keymap
    )
    server.start()
    print(
        f"serving: tcp://{server.host}:{server.tcp_port}  "
        f"ws://{server.host}:{server.http_port}/bt",
        file=sys.stderr,
    )
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        print("stopping", file=sys.stderr)
    finally:
        server.stop()
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise _UsageError(parser.format_usage().rstrip())
        handler = {
            "sweep": _cmd_sweep,
            "field": _cmd_field,
            "oscillator": _cmd_oscillator,
            "simulate": _cmd_simulate,
            "serve": _cmd_serve,
        }[args.subcommand]
        return handler(args)
    except (
        _UsageError,
        ScenarioError,
        ScriptError,
        OscillatorParameterError,
        OscillatorDomainError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
