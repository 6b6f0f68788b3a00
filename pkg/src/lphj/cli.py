"""Command-line entry point.

Subcommands: ``simulate``, ``check-hj``, ``verify-theorem`` and
``bracket-selftest``.  Exit status: 0 on success, 1 when a verification
fails or the numerics break down, 2 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dynamics import IntegratorChoice, diagnostics, integrate
from .errors import ConvergenceError, NonFiniteError
from .hamilton_jacobi import (
    MODES, CanonicalSection, body_constant_section, perturbed_section, scaled_inertia_section,
    section_from_momentum, verify_canonical, verify_equivalence,
)
from .lie import DualVector
from .poisson import INVARIANT_TOLERANCES, bracket_invariants
from .systems import HeavyTopParams, RigidBodyParams, canonical_system, heavy_top_system, rigid_body_system

SCHEMA_VERSION = 1
SYSTEMS = ("rigid-body", "heavy-top", "canonical")
SECTIONS = ("constant-momentum", "body-constant", "scaled-inertia-family", "exact", "perturbed")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a run needs.  Built from defaults, then the JSON config, then flags."""

    system: str = "rigid-body"
    inertia: list = field(default_factory=lambda: [1.0, 2.0, 3.0])
    mgh: float = 1.0
    chi: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    dimension: int = 1
    hamiltonian: str = "(p**2 + q**2)/2"
    integrator: str = "explicit-rk4"
    dt: float = 1e-3
    steps: int = 1000
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    with_group: bool = False
    pi0: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    gamma0: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    q0: Optional[list] = None
    p0: Optional[list] = None
    section: Optional[str] = None  # exact for canonical systems, else scaled-inertia-family
    mu: Optional[list] = None
    k: float = 1.0
    W: str = "(q*sqrt(1 - q**2) + asin(q))/2"
    base: str = "scaled-inertia-family"
    amplitude: float = 0.1
    section_seed: int = 0
    qmax: float = 0.9
    samples: int = 100
    tol: float = 1e-5
    mode: str = "independent"
    workers: int = 1
    seed: int = 0
    csv: str = "trajectory.csv"
    json: str = "report.json"

    @classmethod
    def build(cls, file_values, flag_values):
        known = {f.name for f in fields(cls)}
        merged = {}
        for source in (file_values, flag_values):
            for key, value in source.items():
                if key not in known:
                    raise ConfigError(f"unknown configuration key {key!r}")
                if value is not None:
                    merged[key] = value
        cfg = cls(**merged)
        cfg.validate()
        return cfg

    def validate(self):
        if self.system not in SYSTEMS:
            raise ConfigError(f"system must be one of {SYSTEMS}")
        if self.section is None:
            self.section = "exact" if self.system == "canonical" else "scaled-inertia-family"
        if self.section not in SECTIONS:
            raise ConfigError(f"section must be one of {SECTIONS}")
        if self.base not in SECTIONS:
            raise ConfigError(f"base section must be one of {SECTIONS}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.samples < 1 or not self.tol > 0 or self.steps < 0 or self.workers < 1:
            raise ConfigError("samples >= 1, tol > 0, steps >= 0 and workers >= 1 required")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")


def load_config_file(path):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    version = data.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config schema_version must be {SCHEMA_VERSION}, got {version!r}")
    return data


# ----------------------------------------------------------------- builders

def _vec(values, n, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size != n:
        raise ConfigError(f"{name} needs {n} components, got {arr.size}")
    return arr


def build_system(cfg):
    if cfg.system == "rigid-body":
        return rigid_body_system(RigidBodyParams(_vec(cfg.inertia, 3, "inertia")))
    if cfg.system == "heavy-top":
        chi = _vec(cfg.chi, 3, "chi")
        return heavy_top_system(HeavyTopParams(_vec(cfg.inertia, 3, "inertia"), float(cfg.mgh),
                                               chi / np.linalg.norm(chi)))
    H, grad = _sympy_hamiltonian(cfg.hamiltonian, cfg.dimension)
    return canonical_system(cfg.dimension, H, grad, label=f"canonical[{cfg.hamiltonian}]")


def _symbols(n):
    import sympy as sp
    if n == 1:
        return [sp.Symbol("q")], [sp.Symbol("p")]
    return list(sp.symbols(f"q1:{n + 1}")), list(sp.symbols(f"p1:{n + 1}"))


def _parse(expr, names):
    import sympy as sp
    try:
        return sp.sympify(expr, locals={s.name: s for s in names})
    except (sp.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"cannot parse expression {expr!r}: {exc}") from exc


def _sympy_hamiltonian(expr, n):
    import sympy as sp
    if n < 1:
        raise ConfigError("dimension must be >= 1")
    qs, ps = _symbols(n)
    H = _parse(expr, qs + ps)
    extra = H.free_symbols - set(qs + ps)
    if extra:
        raise ConfigError(f"Hamiltonian uses unknown symbols {sorted(map(str, extra))}")
    f = sp.lambdify(qs + ps, H, "numpy")
    dq = sp.lambdify(qs + ps, [sp.diff(H, s) for s in qs], "numpy")
    dp = sp.lambdify(qs + ps, [sp.diff(H, s) for s in ps], "numpy")
    return (lambda q, p: float(f(*q, *p)),
            lambda q, p: (np.array(dq(*q, *p), dtype=float), np.array(dp(*q, *p), dtype=float)))


def build_canonical_section(cfg):
    import sympy as sp
    n = cfg.dimension
    qs, _ = _symbols(n)
    W = _parse(cfg.W, qs)
    extra = W.free_symbols - set(qs)
    if extra:
        raise ConfigError(f"W uses unknown symbols {sorted(map(str, extra))}")
    dW = sp.lambdify(qs, [sp.diff(W, s) for s in qs], "numpy")

    def grad_w(q):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.array(dW(*q), dtype=float)

    exact = CanonicalSection(grad_w, n, f"exact[dW, W={cfg.W}]")
    if cfg.section == "exact":
        return exact
    if cfg.section == "perturbed":
        amp = float(cfg.amplitude)
        return CanonicalSection(lambda q: (1.0 + amp) * exact(q), n,
                                f"perturbed[dW*(1+{amp:g}), W={cfg.W}]")
    raise ConfigError(f"section {cfg.section!r} is not available for canonical systems")


def _default_mu(cfg, algebra):
    if cfg.mu is not None:
        return DualVector(algebra, _vec(cfg.mu, 3 if algebra == "so3" else 6, "mu"))
    if algebra == "so3":
        return DualVector("so3", [0.3, -0.5, 0.8])
    return DualVector("se3", [0.3, -0.5, 0.8, 0.0, 0.6, 0.8])


def build_group_section(cfg, sys, kind=None):
    kind = kind or cfg.section
    mu = _default_mu(cfg, sys.algebra)
    if kind == "constant-momentum":
        return section_from_momentum(mu)
    if kind == "body-constant":
        return body_constant_section(mu)
    if kind == "scaled-inertia-family":
        return scaled_inertia_section(mu, float(cfg.k), sys.params.I)
    if kind == "perturbed":
        if cfg.base == "perturbed":
            raise ConfigError("perturbed section needs a non-perturbed base")
        return perturbed_section(build_group_section(cfg, sys, cfg.base), float(cfg.amplitude),
                                 int(cfg.section_seed))
    raise ConfigError(f"section {kind!r} is only available for canonical systems")


def canonical_grid(cfg):
    if cfg.dimension == 1:
        return np.linspace(-cfg.qmax, cfg.qmax, cfg.samples).reshape(-1, 1)
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-cfg.qmax, cfg.qmax, size=(cfg.samples, cfg.dimension))


# ----------------------------------------------------------------- commands

def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_simulate(cfg, out):
    sys_ = build_system(cfg)
    choice = IntegratorChoice(cfg.integrator, cfg.dt, cfg.newton_tol, cfg.newton_max_iter)
    if sys_.is_canonical:
        n = cfg.dimension
        q0 = _vec(cfg.q0 if cfg.q0 is not None else [1.0] * n, n, "q0")
        p0 = _vec(cfg.p0 if cfg.p0 is not None else [0.0] * n, n, "p0")
        state0 = np.concatenate([q0, p0])
    elif sys_.algebra == "so3":
        state0 = DualVector("so3", _vec(cfg.pi0, 3, "pi0"))
    else:
        state0 = DualVector.se3(_vec(cfg.pi0, 3, "pi0"), _vec(cfg.gamma0, 3, "gamma0"))
    return lambda: _run_simulate(cfg, sys_, state0, choice, out)


def _run_simulate(cfg, sys_, state0, choice, out):
    traj = integrate(sys_, state0, choice, cfg.steps, with_group=cfg.with_group)
    report = diagnostics(traj, sys_)
    traj.write_csv(cfg.csv)
    payload = {
        "command": "simulate",
        "seed": cfg.seed,
        "system": sys_.label,
        "integrator": asdict(choice),
        "steps": cfg.steps,
        "columns": traj.columns(),
        "initial_state": [float(v) for v in traj.states[0]],
        "final_state": [float(v) for v in traj.states[-1]],
        "drift": report.as_dict(),
        "csv": Path(cfg.csv).name,
    }
    _write(cfg.json, _dump(payload))
    print(f"wrote {cfg.csv} ({len(traj)} rows) and {cfg.json}", file=out)
    print(f"energy drift max {report.energy_max:.3e}; casimir drift max "
          f"{', '.join(f'{v:.3e}' for v in report.casimir_max)}", file=out)
    return EXIT_OK


def _residual_setup(cfg):
    sys_ = build_system(cfg)
    if sys_.is_canonical:
        section = build_canonical_section(cfg)
        grid = canonical_grid(cfg)
        return lambda: verify_canonical(sys_, section, grid, cfg.tol)
    section = build_group_section(cfg, sys_)
    mu = _default_mu(cfg, sys_.algebra)
    return lambda: verify_equivalence(sys_, section, mu, cfg.samples, cfg.tol, cfg.seed,
                                      cfg.mode, cfg.workers)


def _report_payload(cfg, report, command):
    payload = report.as_dict()
    payload["command"] = command
    payload["seed"] = cfg.seed
    payload["schema_version"] = SCHEMA_VERSION
    return payload


def cmd_check_hj(cfg, out):
    run = _residual_setup(cfg)

    def go():
        report = run()
        _write(cfg.json, _dump(_report_payload(cfg, report, "check-hj")))
        ok = report.hj_max <= cfg.tol
        print(f"hj_max {report.hj_max:.3e} (tol {cfg.tol:g}): "
              f"{'SOLUTION' if ok else 'NOT A SOLUTION'}; wrote {cfg.json}", file=out)
        return EXIT_OK if ok else EXIT_FAIL
    return go


def cmd_verify(cfg, out):
    run = _residual_setup(cfg)

    def go():
        report = run()
        _write(cfg.json, _dump(_report_payload(cfg, report, "verify-theorem")))
        print(f"hj_max {report.hj_max:.3e}, relatedness_max {report.relatedness_max:.3e}, "
              f"closedness_max {report.closedness_max:.3e}, momentum_defect "
              f"{report.momentum_defect:.3e}: {report.verdict}; wrote {cfg.json}", file=out)
        return EXIT_OK if report.verdict == "CONSISTENT" else EXIT_FAIL
    return go


def cmd_selftest(cfg, out, count=100):
    def go():
        results = bracket_invariants(cfg.seed, count)
        ok = True
        for name, value in results.items():
            passed = value <= INVARIANT_TOLERANCES[name]
            ok &= passed
            print(f"{'PASS' if passed else 'FAIL'} {name}: max defect {value:.3e} "
                  f"(tol {INVARIANT_TOLERANCES[name]:g})", file=out)
        print(f"jacobi max defect {results['jacobi']:.3e}", file=out)
        return EXIT_OK if ok else EXIT_FAIL
    return go


# -------------------------------------------------------------------- parser

def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _common(p):
    p.add_argument("--config", help="JSON config file (flags override it)")
    p.add_argument("--seed", type=int)
    p.add_argument("--system", choices=SYSTEMS)
    p.add_argument("--inertia", type=_floats, help="I1,I2,I3")
    p.add_argument("--mgh", type=float)
    p.add_argument("--chi", type=_floats)
    p.add_argument("--dimension", type=int, help="canonical system dimension n")
    p.add_argument("--hamiltonian", help="canonical H in q, p (or q1..qn, p1..pn)")


def _section_args(p):
    p.add_argument("--section", choices=SECTIONS)
    p.add_argument("--mu", type=_floats, help="momentum level (3 or 6 numbers)")
    p.add_argument("--k", type=float, help="scale of the scaled-inertia family")
    p.add_argument("--W", help="generating function W(q) for exact canonical sections")
    p.add_argument("--base", choices=SECTIONS, help="base of a perturbed section")
    p.add_argument("--amplitude", type=float)
    p.add_argument("--section-seed", dest="section_seed", type=int)
    p.add_argument("--qmax", type=float, help="canonical grid half-width")
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="json", help="report JSON path")


def make_parser():
    parser = argparse.ArgumentParser(prog="lphj", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a system, write CSV + diagnostics JSON")
    _common(sim)
    sim.add_argument("--integrator", choices=("explicit-rk4", "implicit-midpoint",
                                              "coadjoint-splitting"))
    sim.add_argument("--dt", type=float)
    sim.add_argument("--steps", type=int)
    sim.add_argument("--newton-tol", dest="newton_tol", type=float)
    sim.add_argument("--newton-max-iter", dest="newton_max_iter", type=int)
    sim.add_argument("--with-group", dest="with_group", action="store_true", default=None)
    sim.add_argument("--pi0", type=_floats)
    sim.add_argument("--gamma0", type=_floats)
    sim.add_argument("--q0", type=_floats)
    sim.add_argument("--p0", type=_floats)
    sim.add_argument("--csv")
    sim.add_argument("--json", help="diagnostics JSON path")

    for name, text in (("check-hj", "evaluate HJ residuals of a section"),
                       ("verify-theorem", "compare HJ and relatedness residuals")):
        p = sub.add_parser(name, help=text)
        _common(p)
        _section_args(p)

    st = sub.add_parser("bracket-selftest", help="run the Lie-Poisson bracket invariant suite")
    st.add_argument("--seed", type=int)
    st.add_argument("--count", type=int, default=100)
    st.add_argument("--config")
    return parser


COMMANDS = {"simulate": cmd_simulate, "check-hj": cmd_check_hj, "verify-theorem": cmd_verify}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE

    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "count")}
    # setup: anything raised here is a usage/config problem
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = RunConfig.build(file_values, flags)
        if args.command == "bracket-selftest":
            run = cmd_selftest(cfg, out, args.count)
        else:
            run = COMMANDS[args.command](cfg, out)
    except (ValueError, TypeError, KeyError) as exc:
        print(f"lphj: configuration error: {exc}", file=err)
        return EXIT_USAGE

    try:
        return run()
    except (ConvergenceError, NonFiniteError, ValueError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"lphj: numerical failure: {exc}", file=err)
        return EXIT_FAIL


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
