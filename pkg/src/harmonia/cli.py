"""Command line driver: transforms, solves and theorem-verification suites.

Configuration lives in a single JSON file (all keys optional, unknown keys
rejected); command line flags override file values. Exit codes: 0 all
checks pass, 1 check failure, 2 configuration error, 3 capability error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from . import abel, heat, operators, spherical, suites
from .errors import CapabilityError, ConfigError, ResonantSymbolError
from .grids import lambda_grid, line_grid, radial_grid
from .profiles import (LaplacePolynomial, load_radial_csv, save_line_csv,
                       save_radial_csv)
from .spaces import ModelSpace, parse_space, space_from_config


@dataclass
class ExperimentConfig:
    space_kind: str = "hyperbolic"
    n: int = 3
    p: int = 2
    q: int = 1
    rmax: float = 8.0
    radial_nodes: int = 257
    lambda_max: float = 40.0
    lambda_nodes: int = 2048
    smax: float = 16.0
    line_nodes: int = 2049
    sphere_theta: int = 64
    sphere_phi: int = 128
    circle_nodes: int = 512
    seed: int = 1234
    experiment: str = "default"
    out: str | None = None
    threads: int | None = None
    tolerances: dict = field(default_factory=dict)

    def space(self) -> ModelSpace:
        return space_from_config(self.space_kind, n=self.n, p=self.p, q=self.q)

    def validate(self):
        positive = ("rmax", "lambda_max", "smax")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        counts = ("radial_nodes", "lambda_nodes", "line_nodes",
                  "sphere_theta", "sphere_phi", "circle_nodes")
        for name in counts:
            if int(getattr(self, name)) < 8:
                raise ConfigError(f"{name} must be at least 8")
        if not isinstance(self.tolerances, dict):
            raise ConfigError("tolerances must be a mapping")
        for key, tol in self.tolerances.items():
            if not (0.0 < float(tol) < 1.0):
                raise ConfigError(f"tolerance {key}={tol} must lie in (0, 1)")
        self.space()  # validates the space selection
        return self


_CONFIG_KEYS = {
    "space.kind": "space_kind", "space.n": "n", "space.p": "p", "space.q": "q",
    **{f.name: f.name for f in fields(ExperimentConfig)},
}


def load_config(path: str | None, overrides: dict | None = None) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if path:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        for key, value in data.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, _CONFIG_KEYS[key], value)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg.validate()


def _apply_threads(config):
    cap = config.threads
    env = os.environ.get("HARMONIA_THREADS")
    if cap is None and env:
        cap = int(env)
    if cap:
        try:
            import numba

            numba.set_num_threads(max(1, int(cap)))
        except ImportError:
            pass


def _space_override(args) -> dict:
    if getattr(args, "space", None) is None:
        return {}
    sp = parse_space(args.space)
    return {"space_kind": sp.kind, "n": sp.n, "p": sp.p or 2, "q": sp.q or 1}


def _config_from_args(args) -> ExperimentConfig:
    overrides = _space_override(args)
    for name in ("rmax", "radial_nodes", "lambda_max", "lambda_nodes",
                 "smax", "line_nodes", "seed", "experiment", "threads"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    cfg = load_config(getattr(args, "config", None), overrides)
    _apply_threads(cfg)
    return cfg


def _grids(cfg):
    return (radial_grid(cfg.rmax, cfg.radial_nodes),
            lambda_grid(cfg.lambda_max, cfg.lambda_nodes),
            line_grid(cfg.smax, cfg.line_nodes))


def _parse_poly(text: str) -> LaplacePolynomial:
    return LaplacePolynomial([complex(v) for v in text.split(",")])


def _parse_times(text: str):
    if text.startswith("log:"):
        a, b, k = text[len("log:"):].split(":")
        return np.logspace(math.log10(float(a)), math.log10(float(b)), int(k)).tolist()
    if text.startswith("list:"):
        return [float(v) for v in text[len("list:"):].split(",")]
    return [float(v) for v in text.split(",")]


def _out_path(args):
    return args.out or "/dev/stdout"


def cmd_phi(args):
    cfg = _config_from_args(args)
    grid, _, _ = _grids(cfg)
    prof = spherical.spherical_function(cfg.space(), complex(args.lam), grid)
    save_radial_csv(_out_path(args), prof)
    return 0


def cmd_abel(args):
    cfg = _config_from_args(args)
    _, lgrid, sgrid = _grids(cfg)
    prof = load_radial_csv(args.input)
    out = abel.abel_transform(cfg.space(), prof, sgrid, lgrid)
    save_line_csv(_out_path(args), out)
    return 0


def cmd_conv(args):
    cfg = _config_from_args(args)
    _, lgrid, _ = _grids(cfg)
    u = load_radial_csv(args.a)
    v = load_radial_csv(args.b)
    out = abel.radial_convolve(cfg.space(), u, v, lgrid)
    save_radial_csv(_out_path(args), out)
    return 0


def cmd_fundsol(args):
    cfg = _config_from_args(args)
    _, _, sgrid = _grids(cfg)
    fund = operators.fundamental_solution(cfg.space(), _parse_poly(args.poly))
    save_line_csv(_out_path(args), fund.line_profile(sgrid))
    return 0


def cmd_solve(args):
    cfg = _config_from_args(args)
    _, lgrid, _ = _grids(cfg)
    f = load_radial_csv(args.rhs)
    u = operators.solve(cfg.space(), _parse_poly(args.poly), f, lgrid)
    save_radial_csv(_out_path(args), u)
    return 0


def cmd_identify(args):
    cfg = _config_from_args(args)
    grid, _, _ = _grids(cfg)
    space = cfg.space()
    op = operators.builtin_operator(space, args.op)
    poly = operators.identify_operator(space, op, args.mbound, grid, seed=cfg.seed)
    payload = {"operator": args.op,
               "coefficients": [[c.real, c.imag] for c in poly.coeffs]}
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_heat(args):
    cfg = _config_from_args(args)
    grid, lgrid, _ = _grids(cfg)
    kern = heat.heat_kernel(cfg.space(), args.t, grid, lgrid)
    save_radial_csv(_out_path(args), kern.profile)
    return 0


def cmd_heat_span(args):
    cfg = _config_from_args(args)
    grid, lgrid, _ = _grids(cfg)
    target = load_radial_csv(args.target)
    times = _parse_times(args.times)
    result = heat.heat_span_projection(cfg.space(), target, times, grid, lgrid)
    result["target"] = args.target
    text = json.dumps(result, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_verify(args):
    cfg = _config_from_args(args)
    report, code = suites.run_suite(cfg, args.suite)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for check in report["checks"]:
        mark = {"pass": "PASS", "fail": "FAIL", "skip": "SKIP"}[check["status"]]
        print(f"{mark} {check['check_name']} [{check['paper_anchor']}]", file=sys.stderr)
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="harmonia",
        description="Radial harmonic analysis on noncompact harmonic model spaces")
    parser.add_argument("--config", help="JSON configuration file")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--space", help="space selection, e.g. h3, e2, damek-ricci:2,1")
        p.add_argument("--rmax", type=float, default=None)
        p.add_argument("--radial-nodes", dest="radial_nodes", type=int, default=None)
        p.add_argument("--lambda-max", dest="lambda_max", type=float, default=None)
        p.add_argument("--lambda-nodes", dest="lambda_nodes", type=int, default=None)
        p.add_argument("--smax", type=float, default=None)
        p.add_argument("--line-nodes", dest="line_nodes", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--config", dest="config")
        if needs_out:
            p.add_argument("--out", required=False, default=None)

    p = sub.add_parser("phi", help="emit a spherical-function profile CSV")
    common(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.set_defaults(fn=cmd_phi)

    p = sub.add_parser("abel", help="Abel transform of a radial profile CSV")
    common(p)
    p.add_argument("--input", required=True)
    p.set_defaults(fn=cmd_abel)

    p = sub.add_parser("conv", help="radial convolution of two profile CSVs")
    common(p)
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=cmd_conv)

    p = sub.add_parser("fundsol", help="line-domain fundamental solution CSV")
    common(p)
    p.add_argument("--poly", required=True, help="coefficients low-to-high, e.g. '-1,1'")
    p.set_defaults(fn=cmd_fundsol)

    p = sub.add_parser("solve", help="solve P(Delta) u = f spectrally")
    common(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--rhs", required=True)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("identify", help="identify a black-box radial operator")
    common(p)
    p.add_argument("--op", required=True,
                   help="builtin:laplacian, builtin:laplacian2, builtin:shifted, "
                        "builtin:rsquare, or poly:<coeffs>")
    p.add_argument("--mbound", type=int, default=4)
    p.set_defaults(fn=cmd_identify)

    p = sub.add_parser("heat", help="heat kernel profile CSV")
    common(p)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(fn=cmd_heat)

    p = sub.add_parser("heat-span", help="project a target onto a heat-kernel span")
    common(p)
    p.add_argument("--target", required=True)
    p.add_argument("--times", required=True, help="log:a:b:k or list:t1,t2,...")
    p.set_defaults(fn=cmd_heat_span)

    p = sub.add_parser("verify", help="run a theorem-verification suite")
    common(p)
    p.add_argument("suite", choices=sorted(suites.SUITES) + ["all"])
    p.add_argument("--experiment", default=None)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (CapabilityError, ResonantSymbolError) as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
