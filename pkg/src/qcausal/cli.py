"""Command-line frontend emitting reproducible CSV/JSON artifacts.

Every command resolves its options as: built-in defaults, overridden by a
``--config`` key-value file, overridden by explicit flags. The resolved
configuration is echoed into every emitted file so a run can be reproduced
from its output alone. Identical flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bounds import commutator_front_norm, lr_velocity, xx_group_velocity
from .causalscan import ScanConfig, TimeGrid, arrival_scan, fit_velocity, qcmi_time_series
from .ccmi import SeriesEmbedding, ccmi_asymmetric_series, surrogate_baseline
from .exceptions import (
    EmptyConditioner,
    InsufficientData,
    InvalidInput,
    QcausalError,
)
from .infomeasures import Partition, asymmetric_qcmi, mutual_information_sites, symmetric_qcmi
from .instrument import apply_instrument, projective_z_instrument
from .qstate import PAULI_X, PAULI_Y, PAULI_Z, ghz_state, partial_trace, von_neumann_entropy
from .spinchain import ChainModel, build_model

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_INSUFFICIENT = 4

_PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

# One converter per config-file/flag key; commands pick the subset they use.
_OPTION_TYPES = {
    "model": str,
    "n": int,
    "j": float,
    "h": float,
    "initial": str,
    "protocol": str,
    "dt": float,
    "t-max": float,
    "threshold": float,
    "crossing": str,
    "site-a": int,
    "site-b": int,
    "distances": str,
    "op-a": str,
    "op-b": str,
    "driver": str,
    "response": str,
    "tau": int,
    "eta0": int,
    "bins": int,
    "surrogates": int,
    "seed": int,
}

_OPTION_CHOICES = {
    "model": ("tfim", "xx"),
    "protocol": ("measure-at-t", "quench-at-zero"),
    "crossing": ("first-sample", "interp"),
    "op-a": ("x", "y", "z"),
    "op-b": ("x", "y", "z"),
}

_MODEL_DEFAULTS = {"model": "xx", "n": 8, "j": 1.0, "h": 0.0}
_EVOLUTION_DEFAULTS = {"initial": "ground", "protocol": "measure-at-t", "dt": 0.02, "t-max": 5.0}
_DETECT_DEFAULTS = {"threshold": 0.03, "crossing": "first-sample"}

# Defaults of None are either required flags (checked in the handler) or
# derived from the other options after resolution.
COMMAND_OPTIONS = {
    "ghz-demo": {},
    "timeseries": {**_MODEL_DEFAULTS, **_EVOLUTION_DEFAULTS, "site-a": None, "site-b": None},
    "arrival-scan": {
        **_MODEL_DEFAULTS,
        **_EVOLUTION_DEFAULTS,
        **_DETECT_DEFAULTS,
        "initial": None,
        "distances": None,
    },
    "bounds": dict(_MODEL_DEFAULTS),
    "commutator-front": {
        **_MODEL_DEFAULTS,
        "site-a": None,
        "site-b": None,
        "op-a": "z",
        "op-b": "z",
        "dt": 0.02,
        "t-max": 5.0,
    },
    "ccmi": {
        "driver": None,
        "response": None,
        "tau": 1,
        "eta0": 1,
        "bins": 4,
        "surrogates": 0,
        "seed": 0,
    },
}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcausal",
        description="Directional QCMI diagnostics for exactly simulated spin chains.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="command")

    handlers = {
        "ghz-demo": cmd_ghz_demo,
        "timeseries": cmd_timeseries,
        "arrival-scan": cmd_arrival_scan,
        "bounds": cmd_bounds,
        "commutator-front": cmd_commutator_front,
        "ccmi": cmd_ccmi,
    }
    help_text = {
        "ghz-demo": "three-qubit worked example contrasting the two conditional forms",
        "timeseries": "QCMI time series for a fixed sender/receiver pair (CSV)",
        "arrival-scan": "per-distance arrival times and velocity fit (CSV + JSON)",
        "bounds": "analytic interaction-norm and group-velocity bounds (JSON)",
        "commutator-front": "exact commutator-norm light-cone probe (CSV)",
        "ccmi": "classical asymmetric CMI of two recorded series",
    }

    for command, options in COMMAND_OPTIONS.items():
        sub = subparsers.add_parser(command, help=help_text[command])
        for key in options:
            sub.add_argument(
                f"--{key}",
                dest=key.replace("-", "_"),
                type=_OPTION_TYPES[key],
                choices=_OPTION_CHOICES.get(key),
                default=None,
            )
        if command != "ghz-demo":
            sub.add_argument("--out", default=None, help="write primary output here")
            sub.add_argument("--config", default=None, help="key = value file of option defaults")
        if command == "arrival-scan":
            sub.add_argument("--json-out", dest="json_out", default=None,
                             help="write the JSON summary here")
        sub.set_defaults(handler=handlers[command])
    return parser


def _read_config_file(path: str, options: dict) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in options:
            raise InvalidInput(f"{path}:{lineno}: unknown option {key!r}")
        try:
            values[key] = _OPTION_TYPES[key](value)
        except ValueError as exc:
            raise InvalidInput(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
        choices = _OPTION_CHOICES.get(key)
        if choices and values[key] not in choices:
            raise InvalidInput(f"{path}:{lineno}: {key} must be one of {choices}")
    return values


def _resolve_options(args: argparse.Namespace) -> dict:
    options = COMMAND_OPTIONS[args.command]
    from_file = {}
    if getattr(args, "config", None):
        from_file = _read_config_file(args.config, options)
    resolved = {}
    for key, default in options.items():
        flag_value = getattr(args, key.replace("-", "_"))
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in from_file:
            resolved[key] = from_file[key]
        else:
            resolved[key] = default
    return resolved


def _require(resolved: dict, *keys: str) -> None:
    missing = [k for k in keys if resolved.get(k) is None]
    if missing:
        raise InvalidInput(f"missing required option(s): {', '.join('--' + k for k in missing)}")


def _chain_model(resolved: dict) -> ChainModel:
    return ChainModel(
        kind=resolved["model"],
        n_sites=resolved["n"],
        coupling=resolved["j"],
        field=resolved["h"],
    )


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(command: str, resolved: dict, columns, rows, extra_comments=()) -> str:
    lines = [f"# command: {command}"]
    echo = " ".join(f"{k}={_fmt(v)}" for k, v in sorted(resolved.items()))
    lines.append(f"# config: {echo}")
    for comment in extra_comments:
        lines.append(f"# {comment}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(cell) for cell in row))
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def cmd_ghz_demo(args, resolved) -> int:
    psi = ghz_state(3)
    rho = psi.density_matrix()
    partition = Partition((0,), (1,), (2,))
    instrument = projective_z_instrument(0, 3)

    def show(value: float) -> str:
        # Human-facing report: suppress eigensolver dust around exact values.
        return _fmt(round(value, 12))

    print("three-qubit GHZ state, computational-basis measurement on A")
    print(f"S(rho_ABC) = {show(von_neumann_entropy(rho))}")
    print(f"S(rho_C)   = {show(von_neumann_entropy(partial_trace(rho, (2,))))}")
    print(f"S(rho_AC)  = {show(von_neumann_entropy(partial_trace(rho, (0, 2))))}")
    print(f"S(rho_BC)  = {show(von_neumann_entropy(partial_trace(rho, (1, 2))))}")
    print(f"symmetric QCMI I(A:B|C) = {show(symmetric_qcmi(rho, partition))}")
    for branch in apply_instrument(rho, instrument):
        s_branch = von_neumann_entropy(branch.state)
        mi = mutual_information_sites(branch.state, (0,), (1,))
        print(
            f"outcome {branch.label}: p = {show(branch.probability)}, "
            f"S(rho_BC^x) = {show(s_branch)}, I(B:C) = {show(mi)}"
        )
    asym = asymmetric_qcmi(rho, partition, instrument)
    print(f"asymmetric QCMI I(A;B|C) = {show(asym)} (instrument: {instrument.describe})")
    return EXIT_OK


def cmd_timeseries(args, resolved) -> int:
    _require(resolved, "site-a", "site-b")
    config = ScanConfig(
        model=_chain_model(resolved),
        initial=resolved["initial"],
        protocol=resolved["protocol"],
        grid=TimeGrid(resolved["t-max"], resolved["dt"]),
        site_a=resolved["site-a"],
        site_b=resolved["site-b"],
    )
    series = qcmi_time_series(config)
    text = _csv_text(
        "timeseries",
        resolved,
        ("t", "qcmi_bits"),
        zip(series.times.tolist(), series.values.tolist()),
        extra_comments=(f"instrument: {series.instrument_label}",),
    )
    _emit(text, args.out)
    return EXIT_OK


def _parse_distances(text: str) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":")
        lo, hi = int(lo_text), int(hi_text)
    except ValueError as exc:
        raise InvalidInput(f"distances must look like 'lo:hi', got {text!r}") from exc
    return lo, hi


def cmd_arrival_scan(args, resolved) -> int:
    n = resolved["n"]
    if resolved["initial"] is None:
        # Arrival times track a single excitation injected at the sender.
        resolved["initial"] = "basis:1" + "0" * (n - 1)
    if resolved["distances"] is None:
        resolved["distances"] = f"2:{n - 1}"
    lo, hi = _parse_distances(resolved["distances"])
    config = ScanConfig(
        model=_chain_model(resolved),
        initial=resolved["initial"],
        protocol=resolved["protocol"],
        grid=TimeGrid(resolved["t-max"], resolved["dt"]),
        threshold=resolved["threshold"],
        crossing=resolved["crossing"],
        d_min=lo,
        d_max=hi,
    )
    table = arrival_scan(config)
    _emit(_csv_text("arrival-scan", resolved, ("d", "t_arr"), table.rows), args.out)

    try:
        fit = fit_velocity(table)
    except InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT

    summary = {
        "m": fit.slope,
        "b": fit.intercept,
        "v_eff": fit.v_eff,
        "v_lr": lr_velocity(config.model).v_lr,
        "v0": xx_group_velocity(resolved["j"]),
        "threshold": resolved["threshold"],
        "protocol": resolved["protocol"],
        "grid": {"dt": resolved["dt"], "t_max": resolved["t-max"]},
        "command": "arrival-scan",
        "config": dict(sorted(resolved.items())),
    }
    if fit.note:
        summary["note"] = fit.note
    _emit(_json_text(summary), args.json_out)
    return EXIT_OK


def cmd_bounds(args, resolved) -> int:
    model = _chain_model(resolved)
    estimate = lr_velocity(model)
    payload = {
        "g": estimate.g,
        "g_prop": estimate.g_prop,
        "v_lr": estimate.v_lr,
        "v0": xx_group_velocity(resolved["j"]),
        "command": "bounds",
        "config": dict(sorted(resolved.items())),
    }
    _emit(_json_text(payload), args.out)
    return EXIT_OK


def cmd_commutator_front(args, resolved) -> int:
    _require(resolved, "site-a", "site-b")
    hamiltonian = build_model(_chain_model(resolved))
    op_a = _PAULI[resolved["op-a"]]
    op_b = _PAULI[resolved["op-b"]]
    times = TimeGrid(resolved["t-max"], resolved["dt"]).times
    rows = []
    for t in times:
        norm = commutator_front_norm(
            hamiltonian, resolved["site-a"], op_a, resolved["site-b"], op_b, float(t)
        )
        rows.append((float(t), norm))
    _emit(_csv_text("commutator-front", resolved, ("t", "norm"), rows), args.out)
    return EXIT_OK


def _read_series(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read series file {path}: {exc}") from exc
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise InvalidInput(f"{path}:{lineno}: not a number: {line!r}") from exc
    return np.array(values)


def cmd_ccmi(args, resolved) -> int:
    _require(resolved, "driver", "response")
    driver = _read_series(resolved["driver"])
    response = _read_series(resolved["response"])
    try:
        emb = SeriesEmbedding(
            driver, response, horizon=resolved["tau"], delay=resolved["eta0"],
            bins=resolved["bins"],
        )
        value = ccmi_asymmetric_series(emb)
        payload = {
            "ccmi_bits": value,
            "n_samples": emb.n_samples,
            "surrogate_mean": None,
            "surrogate_std": None,
            "command": "ccmi",
            "config": dict(sorted(resolved.items())),
        }
        if resolved["surrogates"] > 0:
            baseline = surrogate_baseline(emb, resolved["surrogates"], seed=resolved["seed"])
            payload["surrogate_mean"] = float(baseline.mean())
            payload["surrogate_std"] = float(baseline.std())
    except InsufficientData as exc:
        # Short input is a data error here, not a scan with too few arrivals.
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(_json_text(payload), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        resolved = _resolve_options(args)
        return args.handler(args, resolved)
    except (InvalidInput, EmptyConditioner) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientData as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except QcausalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
