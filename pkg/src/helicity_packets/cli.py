"""Command-line front end.

Commands::

    helicity-packets fixed-points --family Phi --theta1 0.9 --phi1 0.7 --varpi 0.3 0.7 1.2 --out curves.csv
    helicity-packets invariance --seed 1 --n-lambdas 100 --out report.json
    helicity-packets measure --alpha 0.6 --beta 0.8j --varpi 0.9 --shots 10000 --seed 3
    helicity-packets compare --widths 0.1 0.2 0.3 --varpi 0.9 --out compare.csv

Every option can also come from a JSON file given with ``--config``; flags
win over the file.  Data goes to ``--out`` (or stdout), diagnostics to
stderr.  Exit codes: 0 success, 1 failed check, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import bell as bl
from . import kinematics as kin
from . import wavepacket as wp
from .errors import ConsistencyError, DomainError, NullOutcomeError, RangeError

THREADS_ENV = "HELICITY_PACKETS_THREADS"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("fixed-points", "invariance", "measure", "compare")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    out: str | None = None
    format: str | None = None
    threads: int = 1
    seed: int | None = 0
    # fixed-points
    family: str = "Phi"
    theta1: float = 0.9
    phi1: float = 0.7
    varpi: list = field(default_factory=lambda: [0.3, 0.7, 1.2])
    grid: int = 128
    # packets
    alpha: complex = complex(math.sqrt(0.5))
    beta: complex = complex(math.sqrt(0.5))
    envelope: str = "gaussian-cone"
    theta0: float = 0.8
    width: float = 0.3
    theta_max: float = 1.0
    sampling: str = "random"
    n_samples: int = 256
    equator_band: float = wp.DEFAULT_EQUATOR_BAND
    correlation: str = "Phi-a"
    # invariance
    n_lambdas: int = 100
    tol: float = 1e-10
    # measure
    lam: float = 0.0
    eta: float = 0.0
    shots: int = 0
    convention: str = "logical"
    # compare
    widths: list = field(default_factory=lambda: [0.1, 0.2, 0.3, 0.4, 0.5])
    etas: list = field(default_factory=list)
    pairs: list = field(default_factory=lambda: [[1.0, 0.0]])

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for f in fields(self):
            value = getattr(self, f.name)
            items = value if isinstance(value, list) else [value]
            for item in items:
                flat = item if isinstance(item, list) else [item]
                for x in flat:
                    if isinstance(x, (float, complex)) and not np.isfinite(x):
                        raise ConfigError(f"{f.name} must be finite")
        if self.grid < 2:
            raise ConfigError("grid must be >= 2")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.n_samples < 1 or self.n_lambdas < 0 or self.shots < 0:
            raise ConfigError("sample, transformation and shot counts must be non-negative")
        if self.seed is None and (self.command in ("invariance", "compare") or self.shots > 0):
            raise ConfigError("a seed is required when randomness is requested")
        allowed = {"fixed-points": ("csv", "json"), "invariance": ("json", "csv"), "measure": ("json",), "compare": ("csv", "json")}
        fmt = self.format or allowed[self.command][0]
        if fmt not in allowed[self.command]:
            raise ConfigError(f"{self.command} cannot write {fmt!r}")
        self.format = fmt
        if self.command == "fixed-points" and fmt == "csv" and not self.out:
            raise ConfigError("fixed-points CSV output needs --out (two files are written)")
        if self.command == "measure" and len(self.varpi) != 1:
            raise ConfigError("measure takes a single --varpi")
        if self.convention not in ("logical", "physical"):
            raise ConfigError("convention must be 'logical' or 'physical'")
        return self

    def envelope_for(self, width: float | None = None) -> wp.Envelope:
        return wp.Envelope(
            self.envelope,
            theta0=self.theta0,
            width=self.width if width is None else width,
            theta_max=self.theta_max,
            sampling=self.sampling,
        )


def parse_complex(text) -> complex:
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise ConfigError(f"complex value needs [re, im], got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex number {text!r}") from None


def _floats(name):
    def conv(values):
        if not isinstance(values, list):
            raise ConfigError(f"{name} must be a list")
        return [float(v) for v in values]

    return conv


_CONVERTERS = {
    "alpha": parse_complex,
    "beta": parse_complex,
    "varpi": _floats("varpi"),
    "widths": _floats("widths"),
    "etas": _floats("etas"),
    "pairs": lambda ps: [[parse_complex(a), parse_complex(b)] for a, b in ps],
}


def _coerce(name: str, value, default):
    if name in _CONVERTERS:
        return _CONVERTERS[name](value)
    if value is None:
        return None
    if isinstance(default, bool):
        return bool(value)
    if isinstance(default, int) or name == "seed":
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{name} must be an integer")
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helicity-packets", description=__doc__.split("\n")[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or 1)")
        p.add_argument("--seed", type=int)

    def packet(p):
        p.add_argument("--alpha", type=parse_complex)
        p.add_argument("--beta", type=parse_complex)
        p.add_argument("--envelope", choices=wp.SCHEMES)
        p.add_argument("--theta0", type=float)
        p.add_argument("--width", type=float)
        p.add_argument("--theta-max", dest="theta_max", type=float)
        p.add_argument("--sampling", choices=("random", "sobol"))
        p.add_argument("--n-samples", dest="n_samples", type=int)
        p.add_argument("--equator-band", dest="equator_band", type=float)
        p.add_argument("--correlation", choices=("Phi-a", bl.NO_TAG))

    p = sub.add_parser("fixed-points", help="Wigner-phase fixed-point curves", allow_abbrev=False)
    common(p)
    p.add_argument("--family", choices=("Phi", "Psi"))
    p.add_argument("--theta1", type=float)
    p.add_argument("--phi1", type=float)
    p.add_argument("--varpi", type=float, nargs="+")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("invariance", help="audit packet invariance over random transformations", allow_abbrev=False)
    common(p)
    packet(p)
    p.add_argument("--n-lambdas", dest="n_lambdas", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("measure", help="post-selected Gamma measurement of a transformed packet", allow_abbrev=False)
    common(p)
    packet(p)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--varpi", type=float, nargs=1)
    p.add_argument("--eta", type=float)
    p.add_argument("--shots", type=int)
    p.add_argument("--convention", choices=("logical", "physical"))

    p = sub.add_parser("compare", help="Bell vs single-mode distinguishability sweep", allow_abbrev=False)
    common(p)
    packet(p)
    p.add_argument("--widths", type=float, nargs="+")
    p.add_argument("--varpi", type=float, nargs="+")
    p.add_argument("--etas", type=float, nargs="+")
    return parser


def load_config(argv=None) -> RunConfig:
    """Defaults, then the ``--config`` file, then explicit flags."""
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    cfg = RunConfig(command)
    if command == "compare":
        cfg.varpi, cfg.theta0 = [0.9], 0.0
    elif command == "measure":
        cfg.varpi = [0.0]
    defaults = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    path = args.pop("config")
    if path:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in data.items():
            key = key.replace("-", "_")
            if key == "lambda":
                key = "lam"
            if key not in defaults or key == "command":
                raise ConfigError(f"unknown config key {key!r}")
            try:
                setattr(cfg, key, _coerce(key, value, defaults[key]))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from None
    for key, value in args.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.get("threads") is None and not (path and "threads" in data):
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                cfg.threads = int(env)
            except ValueError:
                raise ConfigError(f"{THREADS_ENV} must be an integer") from None
    return cfg.validate()


# --- writers ------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def json_text(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None, suffix_path: str | None = None):
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(suffix_path or out)
    with open(target, "w", newline="") as fh:
        fh.write(text)


def _points_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + "_points" + (p.suffix or ".csv")))


# --- commands -----------------------------------------------------------------


def cmd_fixed_points(cfg: RunConfig) -> int:
    curves = bl.fixed_point_curves(cfg.varpi, cfg.theta1, cfg.phi1, cfg.family, grid=cfg.grid, threads=cfg.threads)
    points = sorted(curves.points.items())
    if cfg.format == "json":
        doc = {
            "family": cfg.family,
            "theta1": cfg.theta1,
            "phi1": cfg.phi1,
            "grid": cfg.grid,
            "points": [{"label": k, "x": x, "y": y} for k, (x, y) in points],
            "curves": [
                {"varpi": v, "curve_id": cid, "x": line[:, 0].tolist(), "y": line[:, 1].tolist()}
                for v, cid, line in curves.curves
            ],
        }
        _emit(json_text(doc), cfg.out)
        return EXIT_OK
    rows = [(v, cid, x, y) for v, cid, line in curves.curves for x, y in line]
    _emit(csv_text(("varpi", "curve_id", "x", "y"), rows), cfg.out)
    _emit(csv_text(("label", "x", "y"), [(k, x, y) for k, (x, y) in points]), cfg.out, _points_path(cfg.out))
    print(f"{len(curves.curves)} curve segments, {len(points)} fixed points", file=sys.stderr)
    return EXIT_OK


def random_lorentz(rng: np.random.Generator, n: int) -> list[kin.LorentzTransform]:
    """n transformations rz(lam) ry(varpi) bz(eta), lam, varpi ~ U(-pi, pi), eta ~ U(-3, 3)."""
    params = np.column_stack([rng.uniform(-math.pi, math.pi, n), rng.uniform(-math.pi, math.pi, n), rng.uniform(-3, 3, n)])
    return [kin.normal_form(*row) for row in params.tolist()]


def _logical_amplitudes(packet: wp.WavePacketQubit) -> tuple[np.ndarray, np.ndarray]:
    c = packet.coefficients()
    return (c[:, 0] + c[:, 3]) * wp.SQRT_HALF, (c[:, 0] - c[:, 3]) * wp.SQRT_HALF


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cmd_invariance(cfg: RunConfig) -> int:
    packet = wp.build_packet(
        cfg.alpha, cfg.beta, cfg.envelope_for(), cfg.n_samples, cfg.seed,
        equator_band=cfg.equator_band, correlation=cfg.correlation,
    )
    before = wp.measure_packet(packet)
    lambdas = random_lorentz(np.random.default_rng(cfg.seed), cfg.n_lambdas)

    def audit(lorentz):
        moved = wp.transform_packet(packet, lorentz)
        a, b = _logical_amplitudes(moved)
        amp_dev = float(np.max(np.maximum(np.abs(a - packet.alpha), np.abs(b - packet.beta))))
        phase_dev = float(np.max(np.abs(moved.net_phase - 1.0)))
        prob_dev = abs(wp.measure_packet(moved).conditional_probs[0] - before.conditional_probs[0])
        ok = max(amp_dev, phase_dev, prob_dev) <= cfg.tol
        return {
            "lambda_desc": lorentz.describe(),
            "max_amplitude_deviation": amp_dev,
            "max_net_phase_deviation": phase_dev,
            "probability_deviation": prob_dev,
            "pass": ok,
        }

    rows = _map(audit, lambdas, cfg.threads)
    passed = all(r["pass"] for r in rows)
    if cfg.format == "csv":
        header = ("lambda_desc", "max_amplitude_deviation", "max_net_phase_deviation", "probability_deviation", "pass")
        _emit(csv_text(header, [tuple(r[h] for h in header) for r in rows]), cfg.out)
    else:
        doc = {
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "envelope": packet.envelope.to_dict(),
            "correlation": cfg.correlation,
            "n_samples": len(packet),
            "n_excluded": packet.meta["n_excluded"],
            "seed": cfg.seed,
            "tol": cfg.tol,
            "n_lambdas": len(rows),
            "max_amplitude_deviation": max((r["max_amplitude_deviation"] for r in rows), default=0.0),
            "max_net_phase_deviation": max((r["max_net_phase_deviation"] for r in rows), default=0.0),
            "pass": passed,
            "lambdas": rows,
        }
        _emit(json_text(doc), cfg.out)
    n_fail = sum(not r["pass"] for r in rows)
    print(f"invariance: {len(rows) - n_fail}/{len(rows)} transformations pass", file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_measure(cfg: RunConfig) -> int:
    packet = wp.build_packet(
        cfg.alpha, cfg.beta, cfg.envelope_for(), cfg.n_samples, cfg.seed,
        equator_band=cfg.equator_band, correlation=cfg.correlation,
    )
    lorentz = kin.normal_form(cfg.lam, cfg.varpi[0], cfg.eta)
    record = wp.measure_packet(wp.transform_packet(packet, lorentz), convention=cfg.convention)
    doc = {
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "lambda_desc": lorentz.describe(),
        "convention": record.convention,
        "n_samples": len(packet),
        "seed": cfg.seed,
        "detect_prob": record.detect_prob,
        "conditional_probs": {"Gamma1": record.conditional_probs[0], "Gamma2": record.conditional_probs[1]},
        "physical_conditional_probs": {
            "Gamma1": record.physical_conditional_probs[0],
            "Gamma2": record.physical_conditional_probs[1],
        },
    }
    if cfg.shots > 0:
        doc["empirical"] = wp.simulate_shots(record, cfg.shots, cfg.seed)
    _emit(json_text(doc), cfg.out)
    return EXIT_OK


def compare_lambdas(cfg: RunConfig) -> list[kin.LorentzTransform]:
    return [kin.identity()] + [kin.ry(v) for v in cfg.varpi] + [kin.bz(e) for e in cfg.etas]


def cmd_compare(cfg: RunConfig) -> int:
    lambdas = compare_lambdas(cfg)
    rows = []
    for width in cfg.widths:
        params = {
            "envelope": cfg.envelope_for(width),
            "n_samples": cfg.n_samples,
            "seed": cfg.seed,
            "equator_band": cfg.equator_band,
            "label": f"(width={width:.17g})",
        }
        rows += wp.distinguishability_report(cfg.pairs, lambdas, params, threads=cfg.threads)
    header = ("lambda_desc", "encoding", "error_prob", "detect_prob")
    if cfg.format == "json":
        _emit(json_text({"seed": cfg.seed, "rows": rows}), cfg.out)
    else:
        _emit(csv_text(header, [tuple(r[h] for h in header) for r in rows]), cfg.out)
    return EXIT_OK


HANDLERS = {
    "fixed-points": cmd_fixed_points,
    "invariance": cmd_invariance,
    "measure": cmd_measure,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    try:
        cfg = load_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[cfg.command](cfg)
    except (DomainError, RangeError, NullOutcomeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
