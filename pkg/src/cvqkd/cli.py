"""Batch front door: run scenario configs, sweep parameters, check reference figures.

Subcommands
-----------
``analytic <config>``
    Closed-form error-rate report for one scenario.
``simulate <config> --bits N --seed S``
    Adds a Monte Carlo report plus z-scores against the analytic values.
``scan <config> --param P --from A --to B --steps K [--csv PATH]``
    Sweep one of ``tap_fraction``, ``squeezing_db``, ``loss``.
``reproduce [--json PATH]``
    Recompute the recorded reference figures and annotate each PASS, FAIL,
    or DOCUMENTED-GAP.

Scenario configs are JSON documents with the fields of
:class:`cvqkd.protocol.Scenario`.  Exit code 0 means success (and, for
``reproduce``, no unexpected FAIL rows); usage and config errors exit 2.
Tables render at four significant digits; structured outputs keep full
precision.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .montecarlo import run_montecarlo, stream_bits
from .protocol import (
    BerReport,
    ConfigError,
    Scenario,
    run_analytic,
    scenario_from_json,
)
from .signaling import db_to_linear, simultaneous_snr, snr_to_ber

__all__ = ["main", "reference_rows"]

SCAN_PARAMETERS = ("tap_fraction", "squeezing_db", "loss")


def _fmt(value: float) -> str:
    return f"{value:.4g}"


def _pct(value: float | None) -> str:
    return "n/a" if value is None else f"{100.0 * value:.4g}%"


def _kv_table(pairs: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in pairs)


def _scenario_summary(scenario: Scenario) -> str:
    parts = [scenario.source]
    if scenario.squeezing_db:
        parts.append(f"{_fmt(scenario.squeezing_db)} dB squeezing")
    parts.append(f"loss {_fmt(scenario.loss)}")
    if scenario.eve == "tap":
        parts.append(f"eve tap({_fmt(scenario.tap_fraction)})")
    else:
        parts.append(f"eve {scenario.eve}")
    return ", ".join(parts)


def _report_pairs(report: BerReport) -> list[tuple[str, str]]:
    return [
        ("signal power Vs", _fmt(report.signal_power)),
        ("baseline BER", _pct(report.bob_baseline_ber)),
        ("bob test BER", _pct(report.bob_test_ber)),
        ("eve key BER", _pct(report.eve_key_ber)),
        ("verdict", report.verdict),
    ]


def _load_scenario(path: str) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from exc
    return scenario_from_json(text)


def _write_json(path: str, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_analytic(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config)
    report = run_analytic(scenario)
    print(_kv_table([("scenario", _scenario_summary(scenario))] + _report_pairs(report)))
    if args.json:
        _write_json(args.json, {"scenario": scenario.to_dict(), "analytic": report.to_dict()})
    return 0


def _binomial_z(empirical: float | None, analytic: float, count: int) -> float | None:
    if empirical is None or count == 0:
        return None
    sigma = np.sqrt(max(analytic * (1.0 - analytic), 1e-12) / count)
    return float((empirical - analytic) / sigma)


def cmd_simulate(args: argparse.Namespace) -> int:
    scenario = _load_scenario(args.config)
    n = scenario.n_bits if args.bits is None else args.bits
    seed = scenario.seed if args.seed is None else args.seed
    if n < 1:
        raise ConfigError("n_bits", f"must be positive, got {n}")
    analytic = run_analytic(scenario)
    empirical = run_montecarlo(scenario, n_bits=n, seed=seed)

    bases = stream_bits(seed, "bob_basis", n)
    schedule = stream_bits(seed, "test_schedule", n)
    n_test = int(np.count_nonzero(bases == schedule))
    n_key = n - n_test
    z_bob = _binomial_z(empirical.bob_test_ber, analytic.bob_test_ber, n_test)
    z_eve = _binomial_z(empirical.eve_key_ber, analytic.eve_key_ber, n_key)

    lines = [("scenario", _scenario_summary(scenario))]
    lines += [("[analytic] " + k, v) for k, v in _report_pairs(analytic)]
    wide = " (wide confidence interval)" if min(n_test, n_key) < 1000 else ""
    lines.append((f"[empirical] bits", f"{n} (seed {seed}){wide}"))
    lines.append(
        ("[empirical] bob test BER",
         _pct(empirical.bob_test_ber) + ("" if z_bob is None else f"  (z = {z_bob:+.2f})"))
    )
    lines.append(
        ("[empirical] eve key BER",
         _pct(empirical.eve_key_ber) + ("" if z_eve is None else f"  (z = {z_eve:+.2f})"))
    )
    lines.append(("[empirical] verdict", empirical.verdict))
    print(_kv_table(lines))
    if args.json:
        _write_json(
            args.json,
            {
                "scenario": scenario.to_dict(),
                "analytic": analytic.to_dict(),
                "empirical": empirical.to_dict(),
                "agreement": {"z_bob_test": z_bob, "z_eve_key": z_eve,
                              "n_test_slots": n_test, "n_key_slots": n_key},
            },
        )
    return 0


def _scan_scenario(base: Scenario, parameter: str, value: float) -> Scenario:
    if parameter == "tap_fraction":
        return base.with_updates(eve="tap", tap_fraction=float(value))
    if parameter == "squeezing_db":
        return base.with_updates(squeezing_db=float(value))
    if parameter == "loss":
        return base.with_updates(loss=float(value))
    raise ConfigError("param", f"unknown scan parameter {parameter!r}")


def cmd_scan(args: argparse.Namespace) -> int:
    if args.param not in SCAN_PARAMETERS:
        raise ConfigError("param", f"must be one of {SCAN_PARAMETERS}, got {args.param!r}")
    base = _load_scenario(args.config)
    if args.steps < 1:
        raise ConfigError("steps", f"must be >= 1, got {args.steps}")
    if args.steps == 1:
        grid = [args.start]
    else:
        grid = list(np.linspace(args.start, args.stop, args.steps))

    rows = []
    for value in grid:
        report = run_analytic(_scan_scenario(base, args.param, value))
        rows.append((float(value), report.bob_test_ber, report.eve_key_ber))

    header = (args.param, "bob_test_ber", "eve_key_ber")
    widths = [max(len(header[0]), 12), 12, 12]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for value, bob, eve in rows:
        print("  ".join(_fmt(x).ljust(w) for x, w in zip((value, bob, eve), widths)))
    if args.csv:
        lines = [",".join(header)]
        lines += [f"{value!r},{bob!r},{eve!r}" for value, bob, eve in rows]
        Path(args.csv).write_text("\n".join(lines) + "\n")
    return 0


@dataclass(frozen=True)
class ReferenceRow:
    """One recorded reference figure and how this model reproduces it.

    ``tolerance`` is the absolute band for a PASS; ``None`` marks a figure
    that is not derivable from this model's stated assumptions, reported
    transparently as DOCUMENTED-GAP rather than fitted.
    """

    key: str
    description: str
    reference: float
    computed: float
    tolerance: float | None

    @property
    def status(self) -> str:
        if self.tolerance is None:
            return "DOCUMENTED-GAP"
        return "PASS" if abs(self.computed - self.reference) <= self.tolerance else "FAIL"


def reference_rows() -> list[ReferenceRow]:
    """Recompute every recorded reference figure from the analytic engine."""
    coherent = Scenario(source="coherent")
    squeezed10 = Scenario(source="epr_squeezed", squeezing_db=10.0)
    loss_a = squeezed10.with_updates(loss=0.1)
    loss_b = Scenario(source="epr_squeezed", squeezing_db=6.0, loss=0.2)

    def analytic(base: Scenario, **changes) -> BerReport:
        return run_analytic(base.with_updates(**changes))

    factor = (
        simultaneous_snr(0.5, 1.0, 0.1, 1.0).linear / (1.0 / 0.1)
    )
    tap_a = analytic(loss_a, eve="tap", tap_fraction=0.29)
    tap_b = analytic(loss_b, eve="tap", tap_fraction=0.29)
    coh_tap = analytic(coherent, eve="tap", tap_fraction=0.16)
    sq_tap = analytic(squeezed10, eve="tap", tap_fraction=0.16)

    return [
        ReferenceRow(
            "guess-test-ber",
            "guess strategy: test-channel error rate",
            0.25,
            analytic(coherent, eve="guess").bob_test_ber,
            0.001,
        ),
        ReferenceRow(
            "baseline-13db",
            "calibrated receiver error rate at the 13 dB operating point",
            0.01,
            snr_to_ber(db_to_linear(13.0)),
            0.005,
        ),
        ReferenceRow(
            "coherent-simultaneous",
            "coherent carrier, simultaneous intercept: shared-data error rate",
            0.06,
            analytic(coherent, eve="simultaneous").eve_key_ber,
            0.005,
        ),
        ReferenceRow(
            "penalty-factor-10db",
            "simultaneous-measurement S/N factor at 10 dB squeezing",
            0.09,
            factor,
            0.005,
        ),
        ReferenceRow(
            "squeezed-simultaneous",
            "10 dB squeezing, simultaneous intercept: shared-data error rate",
            0.24,
            analytic(squeezed10, eve="simultaneous").eve_key_ber,
            0.015,
        ),
        ReferenceRow(
            "squeezed-simultaneous-10pc-loss",
            "10 dB squeezing, 10% loss, simultaneous intercept",
            0.15,
            analytic(loss_a, eve="simultaneous").eve_key_ber,
            0.02,
        ),
        ReferenceRow(
            "squeezed6-simultaneous-20pc-loss",
            "6 dB squeezing, 20% loss, simultaneous intercept",
            0.075,
            analytic(loss_b, eve="simultaneous").eve_key_ber,
            0.005,
        ),
        ReferenceRow(
            "coherent-tap-eve",
            "coherent carrier, 16% tap: interceptor error rate",
            0.25,
            coh_tap.eve_key_ber,
            0.015,
        ),
        ReferenceRow(
            "coherent-tap-bob",
            "coherent carrier, 16% tap: test-channel error rate",
            0.017,
            coh_tap.bob_test_ber,
            0.005,
        ),
        ReferenceRow(
            "squeezed-tap-eve",
            "10 dB squeezing, 16% tap: interceptor error rate",
            0.495,
            sq_tap.eve_key_ber,
            None,
        ),
        ReferenceRow(
            "squeezed-tap-bob",
            "10 dB squeezing, 16% tap: test-channel error rate",
            0.05,
            sq_tap.bob_test_ber,
            None,
        ),
        ReferenceRow(
            "squeezed-tap29-10pc-loss-eve",
            "10 dB squeezing, 10% loss, 29% tap: interceptor error rate",
            0.25,
            tap_a.eve_key_ber,
            None,
        ),
        ReferenceRow(
            "squeezed-tap29-10pc-loss-bob",
            "10 dB squeezing, 10% loss, 29% tap: test-channel error rate",
            0.20,
            tap_a.bob_test_ber,
            None,
        ),
        ReferenceRow(
            "squeezed6-tap29-20pc-loss-eve",
            "6 dB squeezing, 20% loss, 29% tap: interceptor error rate",
            0.25,
            tap_b.eve_key_ber,
            None,
        ),
        ReferenceRow(
            "squeezed6-tap29-20pc-loss-bob",
            "6 dB squeezing, 20% loss, 29% tap: test-channel error rate",
            0.11,
            tap_b.bob_test_ber,
            None,
        ),
    ]


def cmd_reproduce(args: argparse.Namespace) -> int:
    rows = reference_rows()
    desc_width = max(len(r.description) for r in rows)
    print(
        "  ".join(
            ["figure".ljust(desc_width), "reference".ljust(9), "computed".ljust(9),
             "tolerance".ljust(9), "status"]
        )
    )
    failed = False
    for row in rows:
        tol = "-" if row.tolerance is None else _fmt(row.tolerance)
        print(
            "  ".join(
                [row.description.ljust(desc_width), _fmt(row.reference).ljust(9),
                 _fmt(row.computed).ljust(9), tol.ljust(9), row.status]
            )
        )
        failed = failed or row.status == "FAIL"
    if args.json:
        _write_json(
            args.json,
            [
                {
                    "key": r.key,
                    "description": r.description,
                    "reference": r.reference,
                    "computed": r.computed,
                    "tolerance": r.tolerance,
                    "status": r.status,
                }
                for r in rows
            ],
        )
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvqkd",
        description="Quadrature-level key distribution simulator: analytic and Monte Carlo error rates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="closed-form report for one scenario config")
    p.add_argument("config", help="path to a JSON scenario document")
    p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo run with agreement statistics")
    p.add_argument("config")
    p.add_argument("--bits", type=int, default=None, metavar="N", help="slots to simulate")
    p.add_argument("--seed", type=int, default=None, metavar="S")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="sweep one parameter over a grid")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=SCAN_PARAMETERS)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--csv", metavar="PATH", help="write grid rows as CSV")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("reproduce", help="recompute the recorded reference figures")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
