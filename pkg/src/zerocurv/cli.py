"""Command-line front end.

Exit status: 0 on success, 1 on invalid input or configuration, 2 when a
numerical step fails.  Every output file starts with (CSV) or contains
(JSON, under ``"config"``) an echo of the full run configuration.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import formats
from .convexity import convexity_trials
from .errors import NumericalError, ValidationError
from .moduli import detect_transition, sweep_boundary, trace_branches
from .operators import (
    build_tfim,
    build_toric_code,
    family_from_json,
    load_json,
    pair_from_json,
)
from .simplex import CommutingFamily, convex_hull, verify_commuting
from .tfim_exact import exact_table

COMMANDS = ("sweep", "tfim-exact", "critical", "simplex", "convexity-test", "branches")
MODELS = ("tfim", "toric", "custom-json")


@dataclass
class RunConfig:
    command: str
    model: str = "tfim"
    sites: int = 8
    periodic: bool = True
    lx: int = 2
    ly: int = 2
    g_min: float = 0.2
    g_max: float = 3.0
    steps: int = 200
    seed: int = 0
    input: str | None = None
    out: str | None = None
    kappa_tol: float | None = None
    jump_tol: float | None = None
    k_max: int = 4
    trials: int = 1000
    dim: int = 16
    samples: int = 41
    method: str = "auto"

    def validate(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if self.model not in MODELS:
            raise ValidationError(f"unknown model {self.model!r}")
        if self.command in ("sweep", "tfim-exact", "branches") or (self.command == "critical" and not self.input):
            if not self.g_min < self.g_max:
                raise ValidationError("--g-min must be smaller than --g-max")
            if self.steps < 2:
                raise ValidationError("--steps must be at least 2")
        if self.command == "tfim-exact" and self.g_min <= 0:
            raise ValidationError("tfim-exact needs --g-min > 0")
        if self.model == "custom-json" and self.command in ("sweep", "branches", "critical") and not self.input:
            raise ValidationError("--model custom-json requires --in")
        if self.command == "simplex" and not self.input:
            raise ValidationError("simplex requires --in")
        if self.command == "critical" and (self.kappa_tol is None or self.kappa_tol <= 0):
            raise ValidationError("critical requires a positive --kappa-tol")
        if self.jump_tol is not None and self.jump_tol <= 0:
            raise ValidationError("--jump-tol must be positive or 'auto'")
        if self.command == "convexity-test" and (self.trials < 1 or self.dim < 2 or self.samples < 3):
            raise ValidationError("convexity-test needs --trials >= 1, --dim >= 2, --samples >= 3")
        if self.command == "branches" and self.k_max < 1:
            raise ValidationError("--k-max must be positive")

    def grid(self):
        return np.linspace(self.g_min, self.g_max, self.steps)


def _pair(cfg):
    if cfg.model == "tfim":
        return build_tfim(cfg.sites, periodic=cfg.periodic)
    if cfg.model == "toric":
        return build_toric_code(cfg.lx, cfg.ly)
    return pair_from_json(load_json(cfg.input))


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot write {out}: {exc}") from exc


def _echo(cfg):
    return asdict(cfg)


def cmd_sweep(cfg):
    curve = sweep_boundary(_pair(cfg), cfg.grid(), method=cfg.method)
    _emit(formats.render_boundary(curve, _echo(cfg)), cfg.out)


def cmd_tfim_exact(cfg):
    grid = cfg.grid()
    # the self-dual point is always sampled so the curvature zero is on the grid
    if cfg.g_min <= 1.0 <= cfg.g_max and not np.any(grid == 1.0):
        grid = np.sort(np.append(grid, 1.0))
    rows = exact_table(grid)
    _emit(formats.render_csv(formats.EXACT_HEADER, rows, _echo(cfg)), cfg.out)


def cmd_critical(cfg):
    if cfg.input:
        curve = formats.read_boundary(cfg.input)
    else:
        curve = sweep_boundary(_pair(cfg), cfg.grid(), method=cfg.method)
    report = detect_transition(curve, jump_tol=cfg.jump_tol, kappa_tol=cfg.kappa_tol)
    payload = report.to_dict()
    payload["config"] = _echo(cfg)
    _emit(formats.render_json(payload), cfg.out)


def cmd_simplex(cfg):
    obj = load_json(cfg.input)
    if isinstance(obj, dict) and "ops" in obj:
        ops = family_from_json(obj)
    else:
        pair = pair_from_json(obj)
        ops = [pair.h1, pair.h2]
    if len(ops) < 2:
        raise ValidationError("simplex needs at least two operators")
    ok, violation = verify_commuting(ops)
    if not ok:
        raise ValidationError(f"operators do not commute (max violation {violation:.3e})")
    family = CommutingFamily(tuple(ops))
    lam = family.lambda_matrix
    payload = {
        "vertices": [list(v) for v in convex_hull(lam[:2].T)],
        "commuting": True,
        "eigenpoints": lam.T.tolist(),
        "config": _echo(cfg),
    }
    _emit(formats.render_json(payload), cfg.out)


def cmd_convexity(cfg):
    report = convexity_trials(cfg.trials, cfg.dim, cfg.seed, n_samples=cfg.samples)
    report["config"] = _echo(cfg)
    _emit(formats.render_json(report), cfg.out)


def cmd_branches(cfg):
    branches = trace_branches(_pair(cfg), cfg.grid(), cfg.k_max, method=cfg.method)
    rows = []
    for b in branches:
        rows.extend((b.k, g, x, y, e) for g, x, y, e in zip(b.g, b.h1, b.h2, b.energy))
    echo = _echo(cfg)
    echo["note"] = branches[0].note
    _emit(formats.render_csv(formats.BRANCH_HEADER, rows, echo), cfg.out)


HANDLERS = {
    "sweep": cmd_sweep,
    "tfim-exact": cmd_tfim_exact,
    "critical": cmd_critical,
    "simplex": cmd_simplex,
    "convexity-test": cmd_convexity,
    "branches": cmd_branches,
}


def _jump_tol(s):
    if s == "auto":
        return None
    return float(s)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are validation errors: exit status 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="zerocurv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_args(p):
        p.add_argument("--model", choices=MODELS, default="tfim")
        p.add_argument("--sites", type=int, default=8)
        p.add_argument("--open", dest="periodic", action="store_false", help="open TFIM chain")
        p.add_argument("--lx", type=int, default=2)
        p.add_argument("--ly", type=int, default=2)
        p.add_argument("--in", dest="input", help="pair-JSON for --model custom-json")
        p.add_argument("--method", choices=("auto", "dense", "lanczos"), default="auto")

    def grid_args(p, g_min=0.2, g_max=3.0, steps=200):
        p.add_argument("--g-min", type=float, default=g_min)
        p.add_argument("--g-max", type=float, default=g_max)
        p.add_argument("--steps", type=int, default=steps)

    p = sub.add_parser("sweep", help="boundary CSV of the ground-state moduli")
    model_args(p)
    grid_args(p)
    p.add_argument("--out")

    p = sub.add_parser("tfim-exact", help="thermodynamic-limit TFIM boundary and curvature CSV")
    grid_args(p, 0.2, 5.0, 400)
    p.add_argument("--out")

    p = sub.add_parser("critical", help="detect and classify a transition")
    p.add_argument("--in", dest="input", help="boundary CSV; otherwise a sweep is run from the model flags")
    p.add_argument("--model", choices=MODELS, default="tfim")
    p.add_argument("--sites", type=int, default=8)
    p.add_argument("--open", dest="periodic", action="store_false")
    p.add_argument("--lx", type=int, default=2)
    p.add_argument("--ly", type=int, default=2)
    p.add_argument("--method", choices=("auto", "dense", "lanczos"), default="auto")
    grid_args(p)
    p.add_argument("--kappa-tol", type=float, required=True)
    p.add_argument("--jump-tol", type=_jump_tol, default=None, help="positive float or 'auto'")
    p.add_argument("--out")

    p = sub.add_parser("simplex", help="moduli polygon of a commuting pair or family")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")

    p = sub.add_parser("convexity-test", help="random checks of the convexity interpolation")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=41)
    p.add_argument("--out")

    p = sub.add_parser("branches", help="expectation curves of the lowest eigenstates")
    model_args(p)
    grid_args(p)
    p.add_argument("--k-max", type=int, default=4)
    p.add_argument("--out")
    return parser


def config_from_args(ns):
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in fields})


def run(cfg):
    """Execute one command; returns the process exit status."""
    try:
        cfg.validate()
        HANDLERS[cfg.command](cfg)
    except ValidationError as exc:
        print(f"zerocurv: error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"zerocurv: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
