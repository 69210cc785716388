"""Command-line entry point: ``polardirac <command> [options]``.

Exit codes: 0 success, 1 residual above ``--tol`` (with ``--assert``),
2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from dataclasses import field as dc_field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

from .clifford import ConfigurationError, basis_for
from .connections import InconsistentSampleError
from .report import ResidualReport
from .spinor import SingularSpinorError

COMMANDS = ("decompose", "residuals", "equivalence", "conserve", "nonrel", "trajectories", "schrodinger")
EXIT_OK, EXIT_RESIDUAL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
OUT_ENV = "POLARDIRAC_OUT"

DEFAULT_TOL = {
    "decompose": np.inf,
    "residuals": 1e-10,
    "equivalence": 1e-10,
    "conserve": 1e-7,
    "nonrel": 1e-2,
    "trajectories": 1e-5,
    "schrodinger": 1e-2,
}
DEFAULT_N = {"equivalence": 1000, "trajectories": 5}

# allowed keys per table and their expected types
SCHEMA = {
    "": {"command": str, "dim": int, "seed": int, "n": int, "tol": float, "out": str,
         "field": dict, "em": dict, "grid": dict, "trajectories": dict, "schrodinger": dict, "nonrel": dict},
    "field": {"kind": str, "mass": float, "modes": list, "path": str},
    "field.modes": {"p": list, "branch": int, "amplitude": (float, list), "spin_axis": list, "k2": float, "k3": float},
    "em": {"q": float, "A0": list, "B": float},
    "grid": {"h": float, "order": int},
    "trajectories": {"seeds": list, "steps": int, "dtau": float},
    "schrodinger": {"sigma": float, "k": float, "h": float, "dt": float, "steps": int, "extent": float, "mass": float},
    "nonrel": {"velocities": list, "mass": float},
}


@dataclass
class RunConfig:
    """Validated run parameters; tables keep their raw (checked) values."""

    command: str
    dim: int = 4
    seed: int = 0
    n: int | None = None
    tol: float | None = None
    out: str | None = None
    assert_: bool = False
    field: dict = dc_field(default_factory=dict)
    em: dict = dc_field(default_factory=dict)
    grid: dict = dc_field(default_factory=dict)
    trajectories: dict = dc_field(default_factory=dict)
    schrodinger: dict = dc_field(default_factory=dict)
    nonrel: dict = dc_field(default_factory=dict)

    @property
    def tolerance(self) -> float:
        return DEFAULT_TOL[self.command] if self.tol is None else self.tol

    @property
    def count(self) -> int:
        return DEFAULT_N.get(self.command, 20) if self.n is None else self.n

    @property
    def out_dir(self) -> Path | None:
        out = self.out or os.environ.get(OUT_ENV)
        return Path(out) if out else None


def _check_table(table: dict, name: str):
    allowed = SCHEMA[name]
    for key, value in table.items():
        path = f"{name}.{key}" if name else key
        if key not in allowed:
            raise ConfigurationError(f"unknown config key {path!r}")
        expected = allowed[key]
        types = expected if isinstance(expected, tuple) else (expected,)
        if float in types and isinstance(value, int) and not isinstance(value, bool):
            continue
        if not isinstance(value, types) or isinstance(value, bool):
            raise ConfigurationError(f"config key {path!r} has the wrong type")
        if isinstance(value, dict):
            _check_table(value, path)
        if key == "modes":
            for mode in value:
                if not isinstance(mode, dict):
                    raise ConfigurationError("config key 'field.modes' must be a list of tables")
                _check_table(mode, "field.modes")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"malformed config file: {exc}") from exc
    _check_table(data, "")
    return data


def build_config(args: argparse.Namespace) -> RunConfig:
    data = load_config(args.config)
    command = args.command or data.get("command")
    if command not in COMMANDS:
        raise ConfigurationError(f"unknown command {command!r}")
    cfg = RunConfig(command=command, **{k: v for k, v in data.items() if k not in ("command",)})
    for key in ("dim", "seed", "n", "tol", "out"):
        value = getattr(args, key)
        if value is not None:
            setattr(cfg, key, value)
    cfg.assert_ = args.assert_
    if cfg.dim not in (2, 3, 4):
        raise ConfigurationError("config key 'dim' must be 2, 3 or 4")
    if cfg.n is not None and cfg.n <= 0:
        raise ConfigurationError("config key 'n' must be positive")
    return cfg


# --------------------------------------------------------------------------
# field construction


def _amplitude(value) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigurationError("config key 'field.modes.amplitude' must be [re, im]")
        return complex(value[0], value[1])
    return complex(value)


def make_field(cfg: RunConfig):
    """Analytic field described by the ``field`` and ``em`` tables.

    Without a ``field`` table a seeded superposition of three
    positive-energy plane waves is used.
    """
    from .sources import PlaneWaveSpec, field_from_specs, landau_field

    basis = basis_for(cfg.dim)
    kind = cfg.field.get("kind", "random" if "modes" not in cfg.field else "plane-waves")
    mass = float(cfg.field.get("mass", 1.0))
    q = float(cfg.em.get("q", 0.0))
    A0 = cfg.em.get("A0")
    if A0 is not None and len(A0) != cfg.dim:
        raise ConfigurationError("config key 'em.A0' must have dim entries")
    B = float(cfg.em.get("B", 0.0))
    if kind == "file":
        return _lattice_field(cfg, basis, mass, q, A0)
    if kind == "landau":
        if cfg.dim != 4 or B == 0 or q == 0:
            raise ConfigurationError("config key 'field.kind' = landau needs dim 4 and nonzero em.B and em.q")
        modes = [(float(m.get("k2", 0.0)), float(m.get("k3", 0.0)), int(m.get("branch", 1)), _amplitude(m.get("amplitude", 1.0)))
                 for m in cfg.field.get("modes", [{}])]
        return landau_field(basis, B, q, mass, modes)
    if B != 0:
        raise ConfigurationError("config key 'em.B' requires field.kind = landau")
    if kind == "random":
        rng = np.random.default_rng(cfg.seed)
        specs = [PlaneWaveSpec.from_spatial(mass, 0.8 * rng.normal(size=cfg.dim - 1), 1,
                                            complex(rng.normal(), rng.normal())) for _ in range(3)]
    elif kind == "plane-waves":
        specs = []
        for m in cfg.field.get("modes", []):
            p = m.get("p", [0.0] * (cfg.dim - 1))
            if len(p) != cfg.dim - 1:
                raise ConfigurationError("config key 'field.modes.p' must have dim - 1 entries")
            specs.append(PlaneWaveSpec.from_spatial(mass, p, int(m.get("branch", 1)), _amplitude(m.get("amplitude", 1.0)), m.get("spin_axis")))
        if not specs:
            raise ConfigurationError("config key 'field.modes' is empty")
    else:
        raise ConfigurationError(f"config key 'field.kind' has unknown value {kind!r}")
    return field_from_specs(specs, basis, A0, q)


def _lattice_field(cfg: RunConfig, basis, mass, q, A0):
    from .sources import BASIS_TAGS, LatticeField, field_from_text

    if "path" not in cfg.field:
        raise ConfigurationError("config key 'field.path' is required when field.kind = file")
    try:
        text = Path(cfg.field["path"]).read_text()
    except OSError as exc:
        raise ConfigurationError(f"config key 'field.path': cannot read field file: {exc}") from exc
    grid, tag = field_from_text(text)
    if tag != BASIS_TAGS[cfg.dim]:
        raise ConfigurationError(f"config key 'field.path': basis tag {tag!r} does not match dim {cfg.dim}")
    return LatticeField(grid, basis, A0, q, mass)


def _points(cfg: RunConfig, field=None) -> np.ndarray:
    rng = np.random.default_rng(cfg.seed + 1)
    if hasattr(field, "nodes"):
        nodes = field.nodes()
        pick = np.sort(rng.choice(len(nodes), size=min(cfg.count, len(nodes)), replace=False))
        return nodes[pick]
    return rng.uniform(-2.0, 2.0, size=(cfg.count, cfg.dim))


def _analytic(cfg: RunConfig):
    f = make_field(cfg)
    if not hasattr(f, "evaluate"):
        raise ConfigurationError(f"config key 'field.kind' = file is not supported by '{cfg.command}'")
    return f


def _field_mass(field) -> float:
    m = getattr(field, "mass", None)
    if m is None:
        raise ConfigurationError("field modes must share one mass")
    return float(m)


# --------------------------------------------------------------------------
# commands; each returns (report, extra files)


def cmd_decompose(cfg):
    from .connections import decompose_derivative

    f = make_field(cfg)
    n = cfg.dim
    head = ["x%d" % k for k in range(n)] + ["phi2", "beta"] + [f"u{k}" for k in range(n)]
    head += [f"s{k}" for k in range(n)] if n == 4 else []
    head += [f"P{k}" for k in range(n)]
    rows = [",".join(head)]
    fits = []
    for x in _points(cfg, f):
        c = decompose_derivative(f.sample(x), f.basis)
        p = c.polar
        vals = list(x) + [p.phi2, 0.0 if p.beta is None else p.beta] + list(p.u)
        vals += list(p.s) if n == 4 else []
        vals += list(c.P)
        rows.append(",".join(f"{v:.12e}" for v in vals))
        fits.append(c.fit_residual)
    rep = ResidualReport(f"decompose-{n}", {"fit": max(fits)}, {"points": cfg.count, "seed": cfg.seed})
    return rep, {"decompose_points.csv": "\n".join(rows) + "\n"}


def cmd_residuals(cfg):
    from .madelung import dirac_polar_residuals, madelung_residuals, state_from_sample

    f = make_field(cfg)
    m = _field_mass(f)
    reps = []
    for x in _points(cfg, f):
        st = state_from_sample(f.sample(x), f.basis, m)
        reps.append(dirac_polar_residuals(st).merge(madelung_residuals(st)))
    rep = ResidualReport.reduce(f"residuals-{cfg.dim}", reps)
    rep.info["seed"] = cfg.seed
    return rep, {}


def cmd_equivalence(cfg):
    from .madelung import equivalence_backward, equivalence_forward

    fwd = equivalence_forward(cfg.dim, cfg.seed, cfg.count)
    bwd = equivalence_backward(cfg.dim, cfg.seed, cfg.count)
    res = {f"forward:{k}": v for k, v in fwd.residuals.items()}
    res.update({f"backward:{k}": v for k, v in bwd.residuals.items()})
    info = {"n": cfg.count, "seed": cfg.seed, "resampled": fwd.info["resampled"] + bwd.info["resampled"]}
    return ResidualReport(f"equivalence-{cfg.dim}", res, info), {}


def cmd_conserve(cfg):
    from .conservation import conservation_residuals, conservation_residuals_grid, em_of, navier_stokes_residual, second_order_residual

    f = _analytic(cfg)
    em = em_of(f)
    reps = []
    for x in _points(cfg):
        rep = conservation_residuals(f, x, em)
        if cfg.dim == 4:
            s = f.sample(x)
            rep = rep.merge(navier_stokes_residual(s, f.basis, em))
            rep = rep.merge(ResidualReport("", {"II": second_order_residual(s, f.basis, _field_mass(f))}))
        reps.append(rep)
    out = ResidualReport.reduce(f"conserve-{cfg.dim}", reps)
    if cfg.grid:
        h = float(cfg.grid.get("h", 0.02))
        order = int(cfg.grid.get("order", 2))
        g = conservation_residuals_grid(lambda y: f.evaluate(y)[0], f.basis, _points(cfg)[0], h, em, order)
        out.info.update({"grid_h": h, "grid_order": order, "grid_max": f"{g.max:.6e}"})
    out.info["seed"] = cfg.seed
    return out, {}


def cmd_nonrel(cfg):
    from .conservation import nonrel_packet_comparison

    vs = [float(v) for v in cfg.nonrel.get("velocities", [0.01, 0.02, 0.04])]
    mass = float(cfg.nonrel.get("mass", 1.0))
    rows = ["v,H_dirac,H_schrodinger,H_schrodinger_form,discrepancy"]
    res = {}
    disc = []
    for v in vs:
        c = nonrel_packet_comparison(v, mass)
        rows.append(f"{v:.6g},{c.H_dirac:.12e},{c.H_schrodinger:.12e},{c.H_schrodinger_form:.12e},{c.discrepancy:.6e}")
        res[f"discrepancy@v={v:g}"] = c.discrepancy
        disc.append(c.discrepancy)
    info = {"mass": mass}
    if len(vs) >= 2:
        info["exponent"] = f"{np.polyfit(np.log(vs), np.log(disc), 1)[0]:.4f}"
    return ResidualReport("nonrel-1", res, info), {"nonrel_packets.csv": "\n".join(rows) + "\n"}


def cmd_trajectories(cfg):
    from .trajectories import integrate, transport_check

    f = _analytic(cfg)
    tcfg = cfg.trajectories
    steps = int(tcfg.get("steps", 1000))
    dtau = float(tcfg.get("dtau", 1e-3))
    if "seeds" in tcfg:
        seeds = [np.concatenate([[0.0], np.atleast_1d(np.asarray(s, float))]) for s in tcfg["seeds"]]
        for s in seeds:
            if s.size != cfg.dim:
                raise ConfigurationError("config key 'trajectories.seeds' entries must have dim - 1 coordinates")
    else:
        seeds = [np.concatenate([[0.0], p[1:]]) for p in _points(cfg)]
    files, reps = {}, []
    terminated = 0
    for i, s in enumerate(seeds):
        tr = integrate(f, s, steps, dtau)
        terminated += tr.terminated
        files[f"trajectory_{i:03d}.csv"] = tr.to_text()
        if tr.tau.size >= 5 and tr.uniform:
            reps.append(transport_check(f, tr))
    rep = ResidualReport.reduce(f"trajectories-{cfg.dim}", reps)
    rep.info.update({"seeds": len(seeds), "terminated": terminated, "dtau": dtau, "steps": steps})
    return rep, files


def cmd_schrodinger(cfg):
    from .schrodinger import WaveFunction, evolve, free_width, gaussian_packet, madelung_residuals_nr, packet_width
    from .sources import GridField, field_to_text

    s = cfg.schrodinger
    sigma, k = float(s.get("sigma", 1.0)), float(s.get("k", 1.0))
    h, dt = float(s.get("h", 0.02)), float(s.get("dt", 0.01))
    steps, extent = int(s.get("steps", 100)), float(s.get("extent", 20.0))
    mass = float(s.get("mass", 1.0))
    if steps < 2:
        raise ConfigurationError("config key 'schrodinger.steps' must be at least 2")
    x = np.arange(-extent, extent + h / 2, h)
    states = evolve(WaveFunction((x,), gaussian_packet(x, 0.0, sigma, k), mass, dt), steps)
    norms = np.array([w.norm() for w in states])
    rep = madelung_residuals_nr(states[-3:])
    rep.residuals["norm-drift"] = float(np.abs(np.diff(norms)).max())
    rep.residuals["width"] = abs(packet_width(states[-1]) - free_width(sigma, mass, states[-1].t))
    rows = ["x,re,im"] + [f"{xi:.10e},{v.real:.12e},{v.imag:.12e}" for xi, v in zip(x, states[-1].values)]
    rep.info.update({"h": h, "dt": dt, "steps": steps})
    grid = GridField(np.array([x[0]]), np.array([h]), states[-1].values[:, None])
    return rep, {"schrodinger_wave.csv": "\n".join(rows) + "\n", "schrodinger_field.txt": field_to_text(grid, "schrodinger")}


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polardirac", description="Polar-form Dirac field diagnostics.")
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="diagnostic to run (or set 'command' in the config)")
    parser.add_argument("--dim", type=int, help="spacetime dimension: 2, 3 or 4")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--n", type=int, help="number of samples, configurations or seeds")
    parser.add_argument("--tol", type=float, help="residual threshold used with --assert")
    parser.add_argument("--assert", dest="assert_", action="store_true", help="exit 1 if the maximum residual reaches --tol")
    parser.add_argument("--out", help=f"output directory (default: ${OUT_ENV})")
    parser.add_argument("--config", help="TOML configuration file; flags override it")
    return parser


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    report, files = HANDLERS[cfg.command](cfg)
    text = report.to_text()
    stdout.write(text)
    out = cfg.out_dir
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{cfg.command}.csv").write_text(text)
        for name, content in files.items():
            (out / name).write_text(content)
    if cfg.assert_ and not report.passed(cfg.tolerance):
        return EXIT_RESIDUAL
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = build_config(args)
        return run(cfg)
    except ConfigurationError as exc:
        print(f"polardirac: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularSpinorError, InconsistentSampleError, FloatingPointError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"polardirac: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
