"""Command-line front end: ``catgate <subcommand> [options]``.

Exit status: 0 success, 1 validation failure (or failed sweep rows), 2 configuration
parse error, 3 numerical-accuracy failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import platform
import sys
import time
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import config as cfgmod
from .catstates import PAPER_STATES, InitialStateSpec
from .errors import (
    CatGateError,
    ConfigParseError,
    ConfigurationError,
    InputError,
    IntegratorAccuracyError,
    NumericalValidityError,
    TruncationError,
)
from .experiment import (
    CSV_COLUMNS,
    EXTRA_COLUMNS,
    ModelTier,
    SweepRecord,
    quality_factor_report,
    run_gate,
    sweep_kappa,
    tier_gaps,
    truth_table,
)
from .hilbert import SpaceDescriptor
from .model import derive, to_ghz, to_mhz, validate_regime

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_NUMERICAL = 3


def fmt(x) -> str:
    """Full-precision text for CSV cells (repr round-trips floats exactly)."""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def parse_grid(text: str) -> list[float]:
    """``"100,300"`` or ``"start:stop:count"`` (inclusive, linear) in µs."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            grid = [start] if count == 1 else list(np.linspace(start, stop, count))
        else:
            grid = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad kappa grid {text!r}; use a comma list or start:stop:count") from None
    if not grid:
        raise InputError("kappa grid must not be empty")
    for k in grid:
        if not k > 0:
            raise InputError(f"kappa_inv values must be positive, got {k}")
    return [float(k) for k in grid]


def parse_states(text: str) -> list[InitialStateSpec]:
    """``paper4``, named states (``pi4-pi3``) or ``th=0.785,ph=0.785``; ``;`` separates entries."""
    out: list[InitialStateSpec] = []
    for item in (s.strip() for s in text.split(";")):
        if not item:
            continue
        if item == "paper4":
            out.extend(PAPER_STATES.values())
        elif item in PAPER_STATES:
            out.append(PAPER_STATES[item])
        elif item.startswith("th="):
            try:
                kv = dict(part.split("=", 1) for part in item.split(","))
                out.append(InitialStateSpec(float(kv["th"]), float(kv["ph"])))
            except (KeyError, ValueError):
                raise InputError(f"bad state {item!r}; expected th=<rad>,ph=<rad>") from None
        else:
            raise InputError(f"unknown state {item!r}; known: paper4, {', '.join(PAPER_STATES)}, th=..,ph=..")
    if not out:
        raise InputError("no initial states given")
    return out


def parse_trunc(text: str) -> tuple[int, int]:
    try:
        parts = [int(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"bad --trunc {text!r}; expected N or N_A,N_B") from None
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 2:
        raise InputError(f"bad --trunc {text!r}; expected N or N_A,N_B with N >= 2")
    return parts[0], parts[1]


class Context:
    """Resolved configuration plus command-line overrides."""

    def __init__(self, args: argparse.Namespace):
        path = args.config or os.environ.get(cfgmod.ENV_CONFIG)
        self.config = cfgmod.load(path) if path else cfgmod.default_config()
        self.config_path = path
        if args.samples_per_period is not None:
            self.config = self.config.with_simulation(samples_per_period=args.samples_per_period)
        self.space = self.config.space()
        self.encoding = self.config.encoding()
        if args.trunc:
            n_a, n_b = parse_trunc(args.trunc)
            self.space = SpaceDescriptor(n_a, n_b)
            if n_a != n_b:
                raise InputError("cat encoding needs equal truncations on both resonators")
            self.encoding = type(self.encoding)(self.encoding.alpha, n_a, self.encoding.eps)
        self.params = self.config.system_params()
        self.noise = self.config.noise_params()
        self.integrator = self.config.integrator()
        self.leakage_bound = self.config.sim("leakage_bound")
        self.out = Path(args.out) if args.out else None
        self.jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
        self.seed = args.seed


def manifest(ctx: Context, command: str, extra: dict | None = None) -> dict:
    d = derive(ctx.params)
    return {
        "tool": "catgate",
        "version": __version__,
        "command": command,
        "argv": sys.argv[1:],
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config_source": ctx.config_path or "paper_defaults.toml",
        "config": ctx.config.as_dict(),
        "derived": {k: v for k, v in asdict(d).items()},
        "integrator": asdict(ctx.integrator),
        "space": {"n_a": ctx.space.n_a, "n_b": ctx.space.n_b, "dim": ctx.space.dim},
        "seed": ctx.seed,
        **(extra or {}),
    }


def write_manifest(path: Path, data: dict) -> None:
    side = path.with_name(path.stem + ".manifest.json")
    side.write_text(json.dumps(data, indent=2, default=_json_default) + "\n", encoding="utf-8")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(type(o).__name__)


def _json_float(x: float):
    # JSON has no inf/nan literals; write them as strings
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def write_records(path: Path, records: Sequence[SweepRecord]) -> None:
    cols = CSV_COLUMNS + EXTRA_COLUMNS
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in records:
            d = r.as_dict()
            w.writerow([fmt(d[c]) for c in cols])
    rows = [{c: _json_float(r.as_dict()[c]) for c in cols} for r in records]
    path.with_suffix(".json").write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")


def write_panels(path: Path, records: Sequence[SweepRecord]) -> list[Path]:
    """One (κ⁻¹, fidelity per tier) CSV per initial state, for plotting."""
    written = []
    states = sorted({(r.theta_rad, r.phi_rad) for r in records})
    tiers = sorted({r.tier for r in records})
    for i, (th, ph) in enumerate(states):
        sel = [r for r in records if (r.theta_rad, r.phi_rad) == (th, ph)]
        kappas = sorted({r.kappa_inv_us for r in sel})
        table = {(r.tier, r.kappa_inv_us): r.fidelity for r in sel}
        p = path.with_name(f"{path.stem}.panel{i}.csv")
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            fh.write(f"# theta_rad={th!r} phi_rad={ph!r}\n")
            w.writerow(["kappa_inv_us"] + [f"fidelity_{t}" for t in tiers])
            for k in kappas:
                w.writerow([fmt(k)] + [fmt(table.get((t, k), math.nan)) for t in tiers])
        written.append(p)
    return written


def cmd_validate(ctx: Context, args) -> int:
    d = derive(ctx.params)
    report = validate_regime(ctx.params, d, ctx.config.sim("pass_ratio"), ctx.config.sim("warn_ratio"))
    print(report.format())
    print("regime: OK" if report.ok else "regime: FAILED")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def derived_table(ctx: Context) -> list[tuple[str, float, str]]:
    d = derive(ctx.params)
    return [
        ("lambda_a/2pi", to_mhz(d.lambda_a), "MHz"),
        ("lambda_b/2pi", to_mhz(d.lambda_b), "MHz"),
        ("lambda/2pi", to_mhz(d.lam), "MHz"),
        ("lambda_a_t/2pi", to_mhz(d.lambda_a_t), "MHz"),
        ("chi/2pi", to_mhz(d.chi), "MHz"),
        ("Delta/2pi", to_ghz(d.Delta), "GHz"),
        ("g_t/2pi", to_mhz(d.g_t), "MHz"),
        ("t1", d.t1, "us"),
        ("t2", d.t2, "us"),
        ("stark_residual", d.stark_residual, "rad"),
    ]


def cmd_derive(ctx: Context, args) -> int:
    rows = derived_table(ctx)
    for name, value, unit in rows:
        print(f"{name:<18}{value:>24.15g}  {unit}")
    if ctx.out:
        with open(ctx.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "value", "unit"])
            for name, value, unit in rows:
                w.writerow([name, fmt(float(value)), unit])
        write_manifest(ctx.out, manifest(ctx, "derive"))
    return EXIT_OK


def cmd_truth_table(ctx: Context, args) -> int:
    tier = ModelTier.parse(args.tier)
    start = time.perf_counter()
    rows = truth_table(tier, ctx.encoding, ctx.params, ctx.noise, ctx.integrator, ctx.space)
    runtime = time.perf_counter() - start
    print(f"{'input':<8}{'phase_rad':>24}{'magnitude':>24}  reference")
    for r in rows:
        print(f"|{r.label}>   {r.phase:>24.15g}{r.magnitude:>24.15g}  {r.phase_reference}")
    if ctx.out:
        with open(ctx.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["tier", "input", "phase_rad", "magnitude", "phase_reference"])
            for r in rows:
                w.writerow([tier.value, r.label, fmt(r.phase), fmt(r.magnitude), r.phase_reference])
        write_manifest(ctx.out, manifest(ctx, "truth-table", {"tier": tier.value, "runtime_s": runtime}))
    return EXIT_OK


def cmd_run(ctx: Context, args) -> int:
    spec = parse_states(args.state)
    if len(spec) != 1:
        raise InputError("run takes exactly one initial state")
    noise = ctx.noise
    if args.kappa_inv is not None:
        noise = noise.with_kappa(1.0 / parse_grid(str(args.kappa_inv))[0])
    r = run_gate(args.tier, spec[0], ctx.encoding, ctx.params, noise, ctx.integrator, ctx.space, ctx.leakage_bound)
    rec = SweepRecord.from_result(r)
    for c in CSV_COLUMNS:
        print(f"{c:<14}{fmt(getattr(rec, c))}")
    if r.leakage_flag:
        print(f"warning: e/f leakage {r.leakage_ef:.3e} exceeds bound {ctx.leakage_bound:g}", file=sys.stderr)
    if ctx.out:
        write_records(ctx.out, [rec])
        write_manifest(ctx.out, manifest(ctx, "run", {"runtimes_s": [r.runtime_s]}))
    return EXIT_OK


def cmd_sweep(ctx: Context, args) -> int:
    grid = parse_grid(args.kappa_grid)
    specs = parse_states(args.states)
    tiers = [ModelTier.parse(t) for t in args.tiers.split(",") if t.strip()]
    records = sweep_kappa(
        grid, specs, tiers, ctx.encoding, ctx.params, ctx.noise, ctx.integrator, ctx.space, ctx.jobs,
        ctx.leakage_bound,
    )
    print(f"{'tier':<6}{'theta':>10}{'phi':>10}{'kappa_inv_us':>14}{'fidelity':>20}  status")
    for r in records:
        print(f"{r.tier:<6}{r.theta_rad:>10.4f}{r.phi_rad:>10.4f}{r.kappa_inv_us:>14.6g}{r.fidelity:>20.15g}  {r.status}")
    gaps = tier_gaps(records)
    for (th, ph, k), gap in sorted(gaps.items()):
        print(f"blue-red gap theta={th:.4f} phi={ph:.4f} kappa_inv={k:g}: {gap:.6g}")
    if ctx.out:
        write_records(ctx.out, records)
        panels = write_panels(ctx.out, records)
        write_manifest(
            ctx.out,
            manifest(
                ctx,
                "sweep",
                {
                    "jobs": ctx.jobs,
                    "runtimes_s": [r.runtime_s for r in records],
                    "panels": [p.name for p in panels],
                    "blue_red_gaps": [
                        {"theta_rad": th, "phi_rad": ph, "kappa_inv_us": k, "gap": g}
                        for (th, ph, k), g in sorted(gaps.items())
                    ],
                },
            ),
        )
    failed = [r for r in records if r.status != "ok"]
    for r in failed:
        print(f"error: {r.tier} theta={r.theta_rad:.4f} phi={r.phi_rad:.4f}: {r.status}: {r.message}", file=sys.stderr)
    if any(r.status == IntegratorAccuracyError.__name__ for r in failed):
        return EXIT_NUMERICAL
    return EXIT_VALIDATION if failed else EXIT_OK


def cmd_quality_report(ctx: Context, args) -> int:
    kappa_inv = args.kappa_inv
    if kappa_inv is None:
        kappa_inv = 1.0 / ctx.noise.kappa_a if ctx.noise.kappa_a > 0 else 300.0
    rows = quality_factor_report(ctx.params, kappa_inv)
    print(f"{'resonator':<10}{'freq_ghz':>10}{'Q':>14}{'quoted_Q':>12}  note")
    for r in rows:
        print(f"{r.resonator:<10}{r.frequency_ghz:>10.4g}{r.q:>14.6g}{r.quoted_q:>12.3g}  {r.note}")
    if ctx.out:
        with open(ctx.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["resonator", "frequency_ghz", "kappa_inv_us", "q", "quoted_frequency_ghz", "quoted_q", "note"])
            for r in rows:
                w.writerow([r.resonator, fmt(r.frequency_ghz), fmt(float(kappa_inv)), fmt(r.q),
                            fmt(r.quoted_frequency_ghz), fmt(r.quoted_q), r.note])
        write_manifest(ctx.out, manifest(ctx, "quality-report"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        help=f"TOML config (default: ${cfgmod.ENV_CONFIG} if set, else the bundled defaults)",
    )
    common.add_argument("--out", help="output file; a .manifest.json sidecar is written next to it")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps (default: CPU count)")
    common.add_argument("--seed", type=int, default=None, help="reserved; the engine is deterministic")
    common.add_argument("--trunc", help="Fock truncation N or N_A,N_B (overrides simulation.n_trunc)")
    common.add_argument("--samples-per-period", type=int, default=None, help="RK4 samples per fastest period")

    parser = argparse.ArgumentParser(
        prog="catgate",
        description="Simulate the two-stage controlled-phase gate on two cat-state qubits.",
        epilog=f"Environment: {cfgmod.ENV_CONFIG}=PATH sets the default --config.",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the dispersive-regime conditions")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("derive", parents=[common], help="print derived coefficients and stage durations")
    p.set_defaults(func=cmd_derive)
    p = sub.add_parser("truth-table", parents=[common], help="gate action on the logical basis")
    p.add_argument("--tier", default="green", help="green, blue or red")
    p.set_defaults(func=cmd_truth_table)
    p = sub.add_parser("run", parents=[common], help="one gate run on one initial state")
    p.add_argument("--tier", default="green")
    p.add_argument("--state", default="pi4-pi4", help="named state or th=<rad>,ph=<rad>")
    p.add_argument("--kappa-inv", type=float, default=None, help="photon lifetime in us (both resonators)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", parents=[common], help="fidelity versus photon lifetime")
    p.add_argument("--tiers", default="green,blue,red")
    p.add_argument("--kappa-grid", default="300", help="comma list or start:stop:count, in us")
    p.add_argument("--states", default="paper4", help="paper4, named states or th=..,ph=.. joined by ';'")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("quality-report", parents=[common], help="resonator quality factors Q = omega / kappa")
    p.add_argument("--kappa-inv", type=float, default=None, help="photon lifetime in us")
    p.set_defaults(func=cmd_quality_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = Context(args)
        return args.func(ctx, args)
    except ConfigParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (IntegratorAccuracyError, NumericalValidityError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigurationError, InputError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except CatGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
