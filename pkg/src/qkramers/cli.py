"""Command line front end.

Parameters come from an optional YAML file (flat mapping) and are
overridden by flags. Exit codes: 0 ok, 1 usage, 2 parameter regime,
3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from . import __version__, _kernels
from .bath import Drude, Ohmic
from .dynamics import barrier_dynamics, s_asymptotic
from .errors import (
    CausticError,
    DegeneratePolesError,
    DomainError,
    KramersError,
    PoleError,
    QuadratureError,
    RegimeError,
    UnsupportedModelError,
)
from .fluxstate import flux_state, flux_profile, form_factor_t
from .matsubara import DEFAULT_N, SystemParams, build_table, theta_critical
from .propagator import a_asymptotic, grote_hynes
from .rate import (
    MATCHING_THRESHOLD,
    PLATEAU_C,
    THETA_MARGIN,
    decay_rate,
    drude_min_gamma,
    matching_condition,
    plateau_window,
)

EXIT_OK, EXIT_USAGE, EXIT_REGIME, EXIT_NUMERIC = 0, 1, 2, 3
SERIES_TOL = 1e-12  # relative tolerance of the tail integrals; fixed in the library


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    model: str = "ohmic"
    gamma: float = 0.0
    omega_d: float = None
    theta: list = field(default_factory=lambda: [1.0])
    epsilon: float = 0.1
    v_b: float = 10.0
    omega_w: float = 1.0
    N: int = DEFAULT_N
    quadrature_tol: float = 1e-9
    root_tol: float = 1e-10
    theta_margin: float = THETA_MARGIN
    matching_threshold: float = MATCHING_THRESHOLD
    plateau_c: float = PLATEAU_C
    omega0: float = None
    format: str = "json"
    out: str = None
    q_min: float = -6.0
    q_max: float = 6.0
    q_step: float = 0.05
    t_min: float = 10.0
    t_max: float = 30.0
    t_step: float = 1.0
    x_f: float = 0.0
    r_f: float = 0.0

    def damping(self):
        if self.model == "ohmic":
            return Ohmic(float(self.gamma))
        if self.model == "drude":
            if self.omega_d is None:
                raise UsageError("drude model needs omega_d")
            return Drude(float(self.gamma), float(self.omega_d))
        raise UsageError(f"unknown model {self.model!r}")

    def params(self, theta):
        return SystemParams(
            theta=theta, epsilon=self.epsilon, v_b=self.v_b, omega_w=self.omega_w
        )


def _frange(start, stop, step):
    if not step > 0:
        raise UsageError("range step must be positive")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count < 1:
        raise UsageError(f"empty range {start}:{stop}:{step}")
    return [round(start + k * step, 12) for k in range(count)]


def parse_theta(value):
    """Accept a number, a list, 'a,b,c', 'start:stop:step' or a {start, stop, step} mapping."""
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, dict):
        return _frange(float(value["start"]), float(value["stop"]), float(value["step"]))
    text = str(value).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"theta range must be start:stop:step, got {text!r}")
        return _frange(*(float(p) for p in parts))
    return [float(p) for p in text.split(",") if p.strip()]


_INT_KEYS = {"N"}
_STR_KEYS = {"model", "format", "out"}


def load_config(path, overrides):
    known = set(RunConfig.__dataclass_fields__)
    data = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            loaded = yaml.safe_load(fh) or {}
        if not isinstance(loaded, dict):
            raise UsageError("config file must hold a mapping")
        data.update(loaded)
    data.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    cfg = RunConfig()
    values = {}
    for key, val in data.items():
        if key == "theta":
            values[key] = parse_theta(val)
        elif key in _INT_KEYS:
            values[key] = int(val)
        elif key in _STR_KEYS:
            values[key] = str(val)
        else:
            values[key] = float(val)
    cfg = replace(cfg, **values)
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    if not cfg.theta or any(not (t > 0 and math.isfinite(t)) for t in cfg.theta):
        raise UsageError("theta values must be positive")
    if cfg.omega0 is not None and not cfg.omega0 > 0:
        raise UsageError("omega0 must be positive")
    return cfg


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def provenance(cfg, model, theta_c=None):
    return {
        "code_version": __version__,
        "backend": _kernels.BACKEND,
        "model": model.describe(),
        "N": cfg.N,
        "tolerances": {
            "series": SERIES_TOL,
            "quadrature": cfg.quadrature_tol,
            "root": cfg.root_tol,
        },
        "theta_margin": cfg.theta_margin,
        "theta_c": None if theta_c is None else _finite(theta_c),
    }


def _guard(cfg, theta, theta_c):
    limit = (1.0 - cfg.theta_margin) * theta_c
    if theta > limit:
        raise RegimeError(
            f"theta = {theta} exceeds {1 - cfg.theta_margin:.2f} theta_c = {limit:.6f} "
            f"(theta_c = {theta_c:.6f})",
            theta=theta, theta_c=theta_c,
        )


def cmd_rate(cfg):
    model = cfg.damping()
    theta_c = theta_critical(model, cfg.N, cfg.root_tol)
    results = []
    for theta in cfg.theta:
        _guard(cfg, theta, theta_c)
        report = decay_rate(
            build_table(model, theta, cfg.N), cfg.params(theta), theta_c=theta_c,
            theta_margin=cfg.theta_margin, matching_threshold=cfg.matching_threshold,
            plateau_c=cfg.plateau_c,
        )
        doc = report.as_dict()
        doc["validity"]["matching_ratio"] = _finite(doc["validity"]["matching_ratio"])
        if cfg.omega0 is not None:
            doc["gamma_rate_dimensional"] = report.gamma_rate * cfg.omega0
        results.append(doc)
    return {"command": "rate", "results": results, "provenance": provenance(cfg, model, theta_c)}


def cmd_flux_profile(cfg):
    model = cfg.damping()
    theta_c = theta_critical(model, cfg.N, cfg.root_tol)
    q = np.array(_frange(cfg.q_min, cfg.q_max, cfg.q_step))
    rows = []
    for theta in cfg.theta:
        _guard(cfg, theta, theta_c)
        state = flux_state(model, theta, cfg.N)
        for qv, g in flux_profile(state, q):
            rows.append((float(qv), theta, float(g)))
    return {
        "command": "flux-profile",
        "header": ["q", "theta", "g_diag"],
        "rows": rows,
        "provenance": provenance(cfg, model, theta_c),
    }


def cmd_critical_theta(cfg):
    model = cfg.damping()
    theta_c = theta_critical(model, cfg.N, cfg.root_tol)
    return {
        "command": "critical-theta",
        "theta_c": theta_c,
        "omega_r": grote_hynes(model),
        "model": model.describe(),
        "provenance": provenance(cfg, model, theta_c),
    }


def cmd_validity(cfg):
    model = cfg.damping()
    theta_c = theta_critical(model, cfg.N, cfg.root_tol)
    results = []
    for theta in cfg.theta:
        _guard(cfg, theta, theta_c)
        params = cfg.params(theta)
        table = build_table(model, theta, cfg.N)
        state = flux_state(model, theta, cfg.N)
        ratio, ok = matching_condition(state, table, params, cfg.matching_threshold)
        t_min, t_max = plateau_window(state, params, cfg.plateau_c)
        min_gamma = None
        if isinstance(model, Drude) and theta < math.pi:
            min_gamma = drude_min_gamma(model, theta, params, cfg.N)
        results.append({
            "theta": theta,
            "theta_over_theta_c": theta / theta_c,
            "matching_ratio": _finite(ratio),
            "matching_ok": ok,
            "matching": "ok" if ok else ("impossible" if math.isinf(ratio) else "violated"),
            "plateau": [t_min, t_max],
            "plateau_nonempty": bool(t_min < t_max),
            "drude_min_gamma": min_gamma,
        })
    return {"command": "validity", "results": results, "provenance": provenance(cfg, model, theta_c)}


def cmd_timeseries(cfg):
    model = cfg.damping()
    theta_c = theta_critical(model, cfg.N, cfg.root_tol)
    if len(cfg.theta) != 1:
        raise UsageError("timeseries takes a single theta")
    theta = cfg.theta[0]
    _guard(cfg, theta, theta_c)
    dyn = barrier_dynamics(model, theta, cfg.N, cfg.quadrature_tol)
    state = flux_state(model, theta, cfg.N, dynamics=dyn)
    rows = []
    for t in _frange(cfg.t_min, cfg.t_max, cfg.t_step):
        a = float(a_asymptotic(dyn.decomposition, t))
        s = float(s_asymptotic(dyn, t))
        try:
            g = complex(form_factor_t(state, dyn, cfg.x_f, cfg.r_f, t))
        except DomainError:
            g = complex(math.nan, math.nan)
        rows.append((t, dyn.omega_r * t, a, s, g.real, g.imag))
    return {
        "command": "timeseries",
        "header": ["t", "omega_r_t", "A", "S", "form_factor_re", "form_factor_im"],
        "rows": rows,
        "provenance": provenance(cfg, model, theta_c),
    }


COMMANDS = {
    "rate": cmd_rate,
    "flux-profile": cmd_flux_profile,
    "critical-theta": cmd_critical_theta,
    "validity": cmd_validity,
    "timeseries": cmd_timeseries,
}


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, out)
    else:
        out[prefix] = value


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def render(doc, fmt):
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if "rows" in doc:
        writer.writerow(doc["header"])
        writer.writerows([[_cell(v) for v in row] for row in doc["rows"]])
        return buf.getvalue()
    records = doc.get("results")
    if records is None:
        records = [{k: v for k, v in doc.items() if k not in ("command", "provenance")}]
    flat = []
    for rec in records:
        row = {}
        _flatten("", rec, row)
        flat.append(row)
    header = list(flat[0])
    writer.writerow(header)
    for row in flat:
        writer.writerow([_cell(row.get(k)) for k in header])
    return buf.getvalue()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML file with run parameters")
    common.add_argument("--model", choices=["ohmic", "drude"])
    common.add_argument("--gamma", type=float)
    common.add_argument("--omega-d", dest="omega_d", type=float)
    common.add_argument("--theta", help="value, list a,b,c or range start:stop:step")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--v-b", dest="v_b", type=float)
    common.add_argument("--omega-w", dest="omega_w", type=float)
    common.add_argument("--N", dest="N", type=int, help="Matsubara truncation")
    common.add_argument("--quadrature-tol", dest="quadrature_tol", type=float)
    common.add_argument("--root-tol", dest="root_tol", type=float)
    common.add_argument("--theta-margin", dest="theta_margin", type=float)
    common.add_argument("--matching-threshold", dest="matching_threshold", type=float)
    common.add_argument("--plateau-c", dest="plateau_c", type=float)
    common.add_argument("--omega0", type=float, help="dimensional barrier frequency for rate output")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="qkramers", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("rate", parents=[common], help="decay rate with validity report")
    fp = sub.add_parser("flux-profile", parents=[common], help="diagonal form factor as CSV")
    fp.add_argument("--q-min", dest="q_min", type=float)
    fp.add_argument("--q-max", dest="q_max", type=float)
    fp.add_argument("--q-step", dest="q_step", type=float)
    sub.add_parser("critical-theta", parents=[common], help="inverse temperature where Lambda vanishes")
    sub.add_parser("validity", parents=[common], help="matching, plateau and damping bounds")
    ts = sub.add_parser("timeseries", parents=[common], help="A(t), S(t) and finite-time form factor")
    ts.add_argument("--t-min", dest="t_min", type=float)
    ts.add_argument("--t-max", dest="t_max", type=float)
    ts.add_argument("--t-step", dest="t_step", type=float)
    ts.add_argument("--x-f", dest="x_f", type=float)
    ts.add_argument("--r-f", dest="r_f", type=float)
    return parser


_DEFAULT_FORMAT = {"flux-profile": "csv", "timeseries": "csv"}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if overrides.get("format") is None:
        overrides["format"] = _DEFAULT_FORMAT.get(args.command)
    try:
        cfg = load_config(args.config, overrides)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            doc = COMMANDS[args.command](cfg)
        text = render(doc, cfg.format)
    except (UsageError, OSError, yaml.YAMLError, KeyError, TypeError) as exc:
        print(f"qkramers: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegimeError as exc:
        print(f"qkramers: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except UnsupportedModelError as exc:
        print(f"qkramers: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (PoleError, QuadratureError, CausticError, DegeneratePolesError, ArithmeticError) as exc:
        print(f"qkramers: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, ValueError) as exc:
        print(f"qkramers: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KramersError as exc:
        print(f"qkramers: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK
