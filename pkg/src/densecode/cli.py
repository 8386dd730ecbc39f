"""Command-line interface.

Commands: table, run, fig4, tomo, validate.
Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O failure.

Runs are configured by a single JSON document with optional ``spin_system``
and ``noise`` objects; every field has a default, so any run is reproducible
from one file plus a seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys as _sys

import numpy as np

from . import experiment, nmrsim, noise, protocol, qcore, tomo, validation
from .gates import BELL_VARIANT_ORDER, BellVariant

DEFAULT_EPSILON = validation.DEFAULT_EPSILON

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    return cfg


def spin_system_from_config(cfg: dict) -> tuple[nmrsim.SpinSystem, float]:
    sc = cfg.get("spin_system", {})
    system = nmrsim.SpinSystem(
        freq_a=sc.get("freq_a_mhz", nmrsim.DEFAULT_FREQ_A_MHZ),
        freq_b=sc.get("freq_b_mhz", nmrsim.DEFAULT_FREQ_B_MHZ),
        j_coupling=sc.get("j_hz", nmrsim.DEFAULT_J_HZ),
        t2_a=sc.get("t2_a_s", nmrsim.DEFAULT_T2_S),
        t2_b=sc.get("t2_b_s", nmrsim.DEFAULT_T2_S),
    )
    return system, float(sc.get("epsilon", DEFAULT_EPSILON))


def error_params_from_config(nc: dict) -> tuple[noise.ErrorParams, int]:
    base = noise.DEMO_PARAMS
    params = noise.ErrorParams(
        rf_spread=nc.get("rf_spread", base.rf_spread),
        calib_offset=nc.get("calib_offset", base.calib_offset),
        offset_spread_hz=nc.get("offset_spread_hz", base.offset_spread_hz),
        t2_a=nc.get("t2_a_s", base.t2_a),
        t2_b=nc.get("t2_b_s", base.t2_b),
        ensemble_size=int(nc.get("ensemble_size", base.ensemble_size)),
    )
    return params, int(nc.get("seed", noise.DEMO_SEED))


def _resolve_noise(args, cfg: dict) -> tuple[noise.ErrorParams | None, int]:
    """Noise params for run/tomo: enabled only by --noise, parameters from the
    given path, else the config's noise object, else the calibrated defaults."""
    enabled = args.noise is not None
    nc = cfg.get("noise", {})
    if args.noise:  # a path was given
        loaded = load_config(args.noise)
        nc = loaded.get("noise", loaded)
    params, seed = error_params_from_config(nc)
    if args.seed is not None:
        seed = args.seed
    return (params if enabled else None), seed


def _variant(value: str) -> BellVariant:
    try:
        return BellVariant(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown variant {value!r}; choose from "
            + ", ".join(v.value for v in BELL_VARIANT_ORDER)
        ) from None


def _write_output(text: str, out_path: str | None) -> int:
    try:
        if out_path:
            with open(out_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            _sys.stdout.write(text)
        return EXIT_OK
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=_sys.stderr)
        return EXIT_IO


def _state_entries(s: np.ndarray) -> list[dict]:
    return [
        {
            "basis": f"|{qcore.BASIS_LABELS[k]}>",
            "re": float(s[k].real),
            "im": float(s[k].imag),
            "probability": float(abs(s[k]) ** 2),
        }
        for k in range(4)
    ]


def _state_lines(title: str, s: np.ndarray) -> list[str]:
    lines = [title]
    for e in _state_entries(s):
        lines.append(
            f"  {e['basis']}  {e['re']:+.8f} {e['im']:+.8f}i   p={e['probability']:.9f}"
        )
    return lines


def _density_json(rho: np.ndarray) -> list[list[list[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(rho)]


# ---------------------------------------------------------------- table ----


def cmd_table(args) -> int:
    grid = protocol.table1()
    columns = [v.value for v in BELL_VARIANT_ORDER]
    if args.check:
        reference = validation._check_table()
        print(("PASS " if reference.passed else "FAIL ") + reference.detail)
        if not reference.passed:
            return EXIT_FAIL
    if args.format == "json":
        payload = {
            "columns": columns,
            "rows": [
                {
                    "message": m,
                    "bits": protocol.message_bits(m),
                    "cells": [
                        {"variant": columns[j], "ket": grid[i][j].ket,
                         "y": grid[i][j].y, "x": grid[i][j].x, "phase": grid[i][j].phase}
                        for j in range(4)
                    ],
                }
                for i, m in enumerate(protocol.MESSAGES)
            ],
        }
        return _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["message", "variant", "output"])
        for i, m in enumerate(protocol.MESSAGES):
            for j, col in enumerate(columns):
                writer.writerow([m, col, grid[i][j].ket])
        return _write_output(buf.getvalue(), args.out)
    width = max(len(c) for c in columns) + 2
    lines = ["start state:".ljust(8) + "".join(c.rjust(width) for c in columns)]
    for i, m in enumerate(protocol.MESSAGES):
        lines.append(
            f"U_a{m}    " + "".join(grid[i][j].ket.rjust(width) for j in range(4))
        )
    return _write_output("\n".join(lines) + "\n", args.out)


# ------------------------------------------------------------------ run ----


def cmd_run(args, parser: argparse.ArgumentParser) -> int:
    cfg = load_config(args.config)
    system, _ = spin_system_from_config(cfg)
    params, seed = _resolve_noise(args, cfg)
    if params is not None and args.layer == "ideal":
        parser.error("noise simulation requires --layer pulse")
    m, v = args.message, args.variant

    report: dict = {"layer": args.layer, "message": m, "bits": protocol.message_bits(m),
                    "variant": v.value}
    lines: list[str] = [f"layer={args.layer} message={m} ({protocol.message_bits(m)}) variant={v.value}"]

    if args.layer == "ideal":
        prepared = protocol.prepare_bell(v)
        encoded = protocol.encode(prepared, m)
        decoded = protocol.decode(encoded)
        out = protocol.readout(decoded)
        recovered = protocol.recover_message((out.y, out.x), v)
        report.update(
            prepared=_state_entries(prepared),
            encoded=_state_entries(encoded),
            decoded=_state_entries(decoded),
            readout={"y": out.y, "x": out.x, "phase": out.phase, "ket": out.ket},
            recovered_message=recovered,
        )
        lines += _state_lines("prepared state:", prepared)
        lines += _state_lines("encoded state:", encoded)
        lines += _state_lines("decoded state:", decoded)
        lines.append(f"readout: {out.ket}  bits={out.bits}")
        lines.append(f"recovered message: {recovered}")
    elif params is None:
        final = experiment.pulse_output_state(system, m, v)
        probs = qcore.probabilities(final)
        k = int(np.argmax(probs))
        recovered = protocol.recover_message((k >> 1, k & 1), v)
        report.update(
            populations={qcore.BASIS_LABELS[i]: float(probs[i]) for i in range(4)},
            dominant_state=f"|{qcore.BASIS_LABELS[k]}>",
            dominant_population=float(probs[k]),
            recovered_message=recovered,
        )
        lines += _state_lines("final pulse-layer state:", final)
        lines.append(f"dominant state: |{qcore.BASIS_LABELS[k]}>  population={probs[k]:.12f}")
        lines.append(f"recovered message: {recovered}")
    else:
        rho = experiment.noisy_output_density(system, params, m, v, seed=seed)
        probs = qcore.probabilities(rho)
        k = int(np.argmax(probs))
        recovered = protocol.recover_message((k >> 1, k & 1), v)
        ideal = experiment.ideal_output_density(m, v)
        fid = qcore.fidelity(rho, ideal)
        report.update(
            seed=seed,
            ensemble_size=params.ensemble_size,
            populations={qcore.BASIS_LABELS[i]: float(probs[i]) for i in range(4)},
            density_matrix=_density_json(rho),
            recovered_message=recovered,
            fidelity_vs_ideal=fid,
        )
        lines.append(f"noisy ensemble (size {params.ensemble_size}, seed {seed}) populations:")
        for i in range(4):
            lines.append(f"  |{qcore.BASIS_LABELS[i]}>  p={probs[i]:.6f}")
        lines.append(f"recovered message: {recovered}")
        lines.append(f"fidelity vs ideal output: {fid:.6f}")

    if args.format == "json":
        return _write_output(json.dumps(report, indent=2) + "\n", args.out)
    return _write_output("\n".join(lines) + "\n", args.out)


# ----------------------------------------------------------------- fig4 ----


def cmd_fig4(args) -> int:
    cfg = load_config(args.config)
    system, epsilon = spin_system_from_config(cfg)
    params, seed = error_params_from_config(cfg.get("noise", {}))
    if args.seed is not None:
        seed = args.seed
    panels = experiment.fig4_panels(system, epsilon, params, seed=seed)

    summary = {
        "seed": seed,
        "ensemble_size": params.ensemble_size,
        "noise": {
            "rf_spread": params.rf_spread,
            "calib_offset": params.calib_offset,
            "offset_spread_hz": params.offset_spread_hz,
            "t2_a_s": params.t2_a,
            "t2_b_s": params.t2_b,
        },
        "panels": [
            {
                "message": p.message,
                "experimental_panel": experiment.EXPERIMENTAL_PANELS[p.message - 1],
                "theory_panel": experiment.THEORY_PANELS[p.message - 1],
                "max_element_error_absolute": p.error.absolute,
                "max_element_error_relative": p.error.relative,
            }
            for p in panels
        ],
        "max_relative_error": max(p.error.relative for p in panels),
    }

    try:
        if args.format == "json":
            payload = dict(summary)
            payload["modulus_tables"] = {}
            for p in panels:
                exp_label = experiment.EXPERIMENTAL_PANELS[p.message - 1]
                th_label = experiment.THEORY_PANELS[p.message - 1]
                payload["modulus_tables"][exp_label] = tomo.ModulusTable(
                    np.abs(p.experimental)
                ).to_json_dict()
                payload["modulus_tables"][th_label] = tomo.element_modulus_table(
                    p.theory
                ).to_json_dict()
            path = f"{args.out}/fig4.json" if args.out else "fig4.json"
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
            written = [path]
        else:
            path = f"{args.out}/fig4.csv" if args.out else "fig4.csv"
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(["panel", "row", "col", "modulus"])
                for p in panels:
                    label = experiment.EXPERIMENTAL_PANELS[p.message - 1]
                    for j, k, val in tomo.ModulusTable(np.abs(p.experimental)).to_rows():
                        writer.writerow([label, j, k, f"{val:.12g}"])
                for p in panels:
                    label = experiment.THEORY_PANELS[p.message - 1]
                    for j, k, val in tomo.element_modulus_table(p.theory).to_rows():
                        writer.writerow([label, j, k, f"{val:.12g}"])
            err_path = f"{args.out}/fig4_errors.json" if args.out else "fig4_errors.json"
            with open(err_path, "w", encoding="utf-8") as fh:
                json.dump(summary, fh, indent=2)
                fh.write("\n")
            written = [path, err_path]
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=_sys.stderr)
        return EXIT_IO

    for p in panels:
        print(
            f"message {p.message}: max element error "
            f"{p.error.absolute:.4f} absolute, {p.error.relative:.4f} relative"
        )
    print(f"max relative error across panels: {summary['max_relative_error']:.4f}")
    print("wrote " + ", ".join(written))
    return EXIT_OK


# ----------------------------------------------------------------- tomo ----


def cmd_tomo(args, parser: argparse.ArgumentParser) -> int:
    cfg = load_config(args.config)
    system, _ = spin_system_from_config(cfg)
    params, seed = _resolve_noise(args, cfg)
    if params is not None and args.layer == "ideal":
        parser.error("noise simulation requires --layer pulse")
    m, v = args.message, args.variant

    if args.layer == "ideal":
        rho_in = experiment.ideal_output_density(m, v)
    elif params is None:
        rho_in = qcore.pure_density(experiment.pulse_output_state(system, m, v))
    else:
        rho_in = experiment.noisy_output_density(system, params, m, v, seed=seed)

    reconstructed = tomo.reconstruct(tomo.simulate_readouts(rho_in))
    table = tomo.element_modulus_table(reconstructed)
    roundtrip = float(np.max(np.abs(reconstructed - rho_in)))
    ideal = experiment.ideal_output_density(m, v)
    err = tomo.max_element_error(reconstructed, ideal)
    fid = qcore.fidelity(reconstructed, ideal)

    if args.format == "json":
        payload = {
            "message": m,
            "variant": v.value,
            "layer": args.layer,
            "noisy": params is not None,
            "modulus_table": table.to_json_dict(),
            "reconstruction_roundtrip_error": roundtrip,
            "max_element_error_absolute": err.absolute,
            "max_element_error_relative": err.relative,
            "fidelity_vs_ideal": fid,
        }
        return _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["row", "col", "modulus"])
        for j, k, val in table.to_rows():
            writer.writerow([j, k, f"{val:.12g}"])
        return _write_output(buf.getvalue(), args.out)
    lines = [f"tomography of message {m}, variant {v.value}, layer {args.layer}"
             + (" (noisy)" if params is not None else "")]
    lines.append("reconstructed element moduli (rows/cols |00>..|11>):")
    for j in range(4):
        lines.append("  " + "  ".join(f"{table.values[j, k]:.6f}" for k in range(4)))
    lines.append(f"reconstruction round-trip error: {roundtrip:.3e}")
    lines.append(f"max element error vs ideal: {err.absolute:.4f} absolute, {err.relative:.4f} relative")
    lines.append(f"fidelity vs ideal: {fid:.6f}")
    return _write_output("\n".join(lines) + "\n", args.out)


# ------------------------------------------------------------- validate ----


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    system, epsilon = spin_system_from_config(cfg)
    params, seed = error_params_from_config(cfg.get("noise", {}))
    if args.seed is not None:
        seed = args.seed
    if args.ensemble_size is not None:
        from dataclasses import replace

        params = replace(params, ensemble_size=args.ensemble_size)
    results = validation.run_validation(
        sys=system, epsilon=epsilon, params=params, seed=seed
    )
    if args.format == "json":
        payload = {
            "seed": seed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
            "passed": all(r.passed for r in results),
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [
            ("PASS " if r.passed else "FAIL ") + f"{r.name:<26s} {r.detail}"
            for r in results
        ]
        n_ok = sum(r.passed for r in results)
        lines.append(f"{n_ok}/{len(results)} checks passed")
        text = "\n".join(lines) + "\n"
    code = _write_output(text, args.out)
    if code != EXIT_OK:
        return code
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------- parser ----


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densecode",
        description="Two-spin dense-coding simulator: ideal circuit layer, "
        "NMR pulse layer, tomography and noise model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="print the message/start-state correspondence")
    p_table.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p_table.add_argument("--check", action="store_true",
                         help="verify the grid against a brute-force enumeration")
    p_table.add_argument("--out", metavar="PATH")

    p_run = sub.add_parser("run", help="run the protocol for one message")
    p_run.add_argument("-m", "--message", type=int, required=True, choices=(1, 2, 3, 4))
    p_run.add_argument("-v", "--variant", type=_variant, default=BellVariant.MINUS_PHI,
                       help="Bell start state (default minus-phi)")
    p_run.add_argument("--layer", choices=("ideal", "pulse"), default="ideal")
    p_run.add_argument("--config", metavar="PATH")
    p_run.add_argument("--noise", nargs="?", const="", metavar="PATH",
                       help="enable the error model (optionally from a JSON file)")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--format", choices=("text", "json"), default="text")
    p_run.add_argument("--out", metavar="PATH")

    p_fig4 = sub.add_parser("fig4", help="emit theory/experiment element-modulus tables")
    p_fig4.add_argument("--config", metavar="PATH")
    p_fig4.add_argument("--seed", type=int)
    p_fig4.add_argument("--format", choices=("csv", "json"), default="csv")
    p_fig4.add_argument("--out", metavar="DIR", help="output directory (default .)")

    p_tomo = sub.add_parser("tomo", help="tomograph a protocol output state")
    p_tomo.add_argument("-m", "--message", type=int, required=True, choices=(1, 2, 3, 4))
    p_tomo.add_argument("-v", "--variant", type=_variant, default=BellVariant.MINUS_PHI)
    p_tomo.add_argument("--layer", choices=("ideal", "pulse"), default="ideal")
    p_tomo.add_argument("--config", metavar="PATH")
    p_tomo.add_argument("--noise", nargs="?", const="", metavar="PATH")
    p_tomo.add_argument("--seed", type=int)
    p_tomo.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p_tomo.add_argument("--out", metavar="PATH")

    p_val = sub.add_parser("validate", help="run the full verification suite")
    p_val.add_argument("--config", metavar="PATH")
    p_val.add_argument("--seed", type=int)
    p_val.add_argument("--ensemble-size", type=int, dest="ensemble_size")
    p_val.add_argument("--format", choices=("text", "json"), default="text")
    p_val.add_argument("--out", metavar="PATH")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "table":
            return cmd_table(args)
        if args.command == "run":
            return cmd_run(args, parser)
        if args.command == "fig4":
            return cmd_fig4(args)
        if args.command == "tomo":
            return cmd_tomo(args, parser)
        if args.command == "validate":
            return cmd_validate(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_IO
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    raise AssertionError(f"unhandled command {args.command!r}")


def entry() -> None:
    raise SystemExit(main())
