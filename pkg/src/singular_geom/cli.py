"""Command-line front end: surfaces, residual fields, sweeps, catenaries, descent.

Every command resolves its parameters as  defaults < --config JSON < flags,
logs the resolved configuration to stderr, and writes plain-text artifacts
(CSV fields and traces, JSON sweep reports, OBJ meshes) whose bytes depend
only on the flags and the seed.

Exit codes: 0 success; 1 bad flags or config; 2 halfspace exit during
catenary integration (partial polyline written); 3 degenerate metric or
non-spacelike point in a residual field (cell reported on stderr); 4 sweep
found counterexample candidates; 5 descent diverged.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import catenary as cat
from .algebra import Metric, Vec3
from .errors import (
    ConfigError,
    DegenerateMetric,
    Diverged,
    GeometryError,
    HalfspaceViolation,
    NotSpacelike,
)
from .ruled import DirectorClass, SweepConfig, falsification_sweep, helicoid, lightlike_reference
from .surface import ParamSurface, singular_residual
from .variational import HeightField, catenary_heights, descend, height_surface, trace_to_csv

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HALFSPACE = 2
EXIT_DEGENERATE = 3
EXIT_COUNTEREXAMPLE = 4
EXIT_DIVERGED = 5

SEED_ENV = "SINGULAR_GEOM_SEED"

_METRICS = {
    "euclid": Metric.EUCLIDEAN,
    "euclidean": Metric.EUCLIDEAN,
    "lorentz": Metric.LORENTZIAN,
    "lorentzian": Metric.LORENTZIAN,
}

# arclength budget per alpha for built-in catenary cylinders: negative alpha
# curves bend toward the halfplane floor, so they get shorter runs
def _catenary_length(alpha: float) -> float:
    if alpha >= -0.5:
        return 2.0
    if alpha >= -1.5:
        return 1.2
    return 1.0


class _Parser(argparse.ArgumentParser):
    """argparse with the exit-1-on-usage-error contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        return 0


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, --config JSON and explicit flags (flags win)."""
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as f:
                file_cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
    out = {}
    for key, default in defaults.items():
        val = getattr(args, key, None)
        if val is None:
            val = file_cfg.get(key, default)
        out[key] = val
    return out


def _log_config(command: str, cfg: dict) -> None:
    print(f"[{command}] resolved config: {json.dumps(cfg, sort_keys=True)}", file=sys.stderr)


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        if len(parts) == 1:
            n = int(parts[0])
            pair = (n, n)
        else:
            pair = (int(parts[0]), int(parts[1]))
    except ValueError:
        raise ConfigError(f"bad grid spec {text!r}")
    if pair[0] < 2 or pair[1] < 2:
        raise ConfigError(f"grid must be at least 2x2, got {text!r}")
    return pair


def _parse_vec(text: str) -> Vec3:
    try:
        x, y, z = (float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"bad vector spec {text!r}; expected x,y,z")
    return Vec3(x, y, z)


def _write_text(path: str, text: str) -> None:
    with open(path, "w") as f:
        f.write(text)


# ---------------------------------------------------------------------------
# built-in surfaces
# ---------------------------------------------------------------------------

def build_named_surface(name: str, metric: Metric, alpha: float,
                        file_path: str | None = None) -> ParamSurface:
    from .surface import Jet2

    if name == "catenary-cylinder":
        path = cat.integrate(cat.CatenaryState(0.0, 1.0, 0.0, 0.0), alpha,
                             _catenary_length(alpha), 5e-4)
        return cat.catenary_cylinder(path, Vec3(0, 0, 1), Vec3(0, 1, 0))
    if name == "helicoid":
        return helicoid(1.0).as_param_surface((-1.0, 1.0))
    if name == "sphere":
        def jet_fn(s: float, t: float) -> Jet2:
            cs, ss, ct, st = math.cos(s), math.sin(s), math.cos(t), math.sin(t)
            return Jet2(
                Vec3(cs * ct, ss * ct, st),
                Vec3(-ss * ct, cs * ct, 0.0),
                Vec3(-cs * st, -ss * st, ct),
                Vec3(-cs * ct, -ss * ct, 0.0),
                Vec3(ss * st, -cs * st, 0.0),
                Vec3(-cs * ct, -ss * ct, -st),
            )

        return ParamSurface.exact((0.0, 2.0 * math.pi, 0.2, 1.35), jet_fn)
    if name == "hyperboloid":
        def jet_fn(s: float, t: float) -> Jet2:
            r = math.sqrt(1.0 + s * s + t * t)
            r3 = r ** 3
            return Jet2(
                Vec3(s, t, r),
                Vec3(1.0, 0.0, s / r),
                Vec3(0.0, 1.0, t / r),
                Vec3(0.0, 0.0, (1.0 + t * t) / r3),
                Vec3(0.0, 0.0, -s * t / r3),
                Vec3(0.0, 0.0, (1.0 + s * s) / r3),
            )

        return ParamSurface.exact((-1.0, 1.0, -1.0, 1.0), jet_fn)
    if name == "lightlike-reference":
        return lightlike_reference().as_param_surface((-0.3, 0.3))
    if name == "file":
        if not file_path:
            raise ConfigError("--surface file requires --file <heightfield.csv>")
        with open(file_path) as f:
            field = HeightField.from_csv(f.read())
        return height_surface(field)
    raise ConfigError(f"unknown surface {name!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_catenary(args) -> int:
    cfg = _resolve(args, {"alpha": 1.0, "y0": 1.0, "theta0": 0.0, "length": 2.0,
                          "step": 1e-3, "out": "catenary.csv"})
    _log_config("catenary", cfg)
    if cfg["y0"] <= 0.0:
        print("error: --y0 must be positive (open upper halfplane)", file=sys.stderr)
        return EXIT_USAGE
    if cfg["step"] <= 0.0 or cfg["length"] <= 0.0:
        print("error: --length and --step must be positive", file=sys.stderr)
        return EXIT_USAGE
    path = cat.integrate(cat.CatenaryState(0.0, cfg["y0"], cfg["theta0"], 0.0),
                         cfg["alpha"], cfg["length"], cfg["step"])
    _write_text(cfg["out"], path.to_csv())
    if path.exited_halfspace:
        print(f"halfspace exit at s = {path.endpoint.s!r}; partial polyline written",
              file=sys.stderr)
        return EXIT_HALFSPACE
    return EXIT_OK


def cmd_residual(args) -> int:
    cfg = _resolve(args, {"surface": "catenary-cylinder", "metric": "euclid",
                          "alpha": 1.0, "v": "0,0,1", "grid": "50x50",
                          "out": "residual.csv", "file": None})
    _log_config("residual", cfg)
    metric = _METRICS.get(str(cfg["metric"]).lower())
    if metric is None:
        print(f"error: unknown metric {cfg['metric']!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        grid = _parse_grid(cfg["grid"])
        v = _parse_vec(cfg["v"])
        surf = build_named_surface(cfg["surface"], metric, cfg["alpha"], cfg["file"])
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    s0, s1, t0, t1 = surf.domain
    rows = ["s,t,residual"]
    worst = 0.0
    for s in np.linspace(s0, s1, grid[0]):
        for t in np.linspace(t0, t1, grid[1]):
            try:
                r = singular_residual(metric, surf, float(s), float(t), v, cfg["alpha"])
            except (DegenerateMetric, NotSpacelike, HalfspaceViolation) as exc:
                print(f"{type(exc).__name__} at cell s={float(s)!r}, t={float(t)!r}: {exc}",
                      file=sys.stderr)
                return EXIT_DEGENERATE
            rows.append(f"{float(s)!r},{float(t)!r},{r!r}")
            worst = max(worst, abs(r))
    _write_text(cfg["out"], "\n".join(rows) + "\n")
    print(f"max |residual| = {worst!r}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _resolve(args, {"metric": "euclid", "klass": None, "delta": 1, "n": 100,
                          "samples": 10, "seed": _default_seed(),
                          "alpha_min": -3.0, "alpha_max": 3.0, "out": "sweep.json"})
    _log_config("sweep", cfg)
    metric = _METRICS.get(str(cfg["metric"]).lower())
    if metric is None:
        print(f"error: unknown metric {cfg['metric']!r}", file=sys.stderr)
        return EXIT_USAGE
    klass_name = cfg["klass"]
    if klass_name is None:
        klass_name = "standard" if metric is Metric.EUCLIDEAN else "nondegenerate"
    classes = {
        "standard": DirectorClass.EUCLID_STANDARD,
        "nondegenerate": DirectorClass.LORENTZ_NONDEGENERATE,
        "lightlike": DirectorClass.LORENTZ_LIGHTLIKE,
    }
    if klass_name not in classes:
        print(f"error: unknown director class {klass_name!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        sweep_cfg = SweepConfig(
            n_surfaces=int(cfg["n"]),
            n_s_samples=int(cfg["samples"]),
            seed=int(cfg["seed"]),
            metric=metric,
            director_class=classes[klass_name],
            delta=int(cfg["delta"]),
            alpha_range=(float(cfg["alpha_min"]), float(cfg["alpha_max"])),
        )
        report = falsification_sweep(sweep_cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write_text(cfg["out"], report.to_json())
    n_flagged = len(report.counterexamples)
    print(f"surfaces={sweep_cfg.n_surfaces} counterexamples={n_flagged} "
          f"min_max_abs_coeff={report.min_max_abs_coeff!r}")
    return EXIT_COUNTEREXAMPLE if n_flagged else EXIT_OK


def cmd_export_mesh(args) -> int:
    cfg = _resolve(args, {"surface": "catenary-cylinder", "metric": "euclid",
                          "alpha": 1.0, "grid": "50x50", "out": "mesh.obj",
                          "file": None})
    _log_config("export-mesh", cfg)
    metric = _METRICS.get(str(cfg["metric"]).lower())
    if metric is None:
        print(f"error: unknown metric {cfg['metric']!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        grid = _parse_grid(cfg["grid"])
        surf = build_named_surface(cfg["surface"], metric, cfg["alpha"], cfg["file"])
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ns, nt = grid
    s0, s1, t0, t1 = surf.domain
    lines = []
    for s in np.linspace(s0, s1, ns):
        for t in np.linspace(t0, t1, nt):
            p = surf.jet(float(s), float(t)).X
            lines.append(f"v {p.x!r} {p.y!r} {p.z!r}")
    # quads split into two triangles, counterclockwise as seen from Xs x Xt
    for i in range(ns - 1):
        for j in range(nt - 1):
            a = i * nt + j + 1
            b = (i + 1) * nt + j + 1
            c = (i + 1) * nt + j + 2
            d = i * nt + j + 2
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    try:
        _write_text(cfg["out"], "\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: cannot write {cfg['out']}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"wrote {ns * nt} vertices, {2 * (ns - 1) * (nt - 1)} faces")
    return EXIT_OK


def cmd_variational(args) -> int:
    cfg = _resolve(args, {"alpha": 1.0, "grid": "65x33", "steps": 200, "rate": 0.1,
                          "init": "catenary", "noise": 0.01,
                          "seed": _default_seed(), "out_prefix": "variational"})
    _log_config("variational", cfg)
    if cfg["init"] not in ("flat", "catenary", "noisy"):
        print(f"error: unknown init {cfg['init']!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        grid = _parse_grid(cfg["grid"])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if int(cfg["steps"]) < 0 or float(cfg["rate"]) < 0.0:
        print("error: --steps and --rate must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    field = catenary_heights(shape=grid)
    if cfg["init"] == "flat":
        z = field.z.copy()
        z[1:-1, 1:-1] = 1.0
        field = field.with_z(z)
    elif cfg["init"] == "noisy":
        rng = np.random.default_rng(int(cfg["seed"]))
        z = field.z.copy()
        z[1:-1, 1:-1] *= 1.0 + float(cfg["noise"]) * rng.standard_normal(z[1:-1, 1:-1].shape)
        field = field.with_z(z)
    try:
        final, trace = descend(field, float(cfg["alpha"]), int(cfg["steps"]), float(cfg["rate"]))
    except Diverged as exc:
        _write_text(f"{cfg['out_prefix']}_trace.csv", trace_to_csv(exc.trace))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    _write_text(f"{cfg['out_prefix']}_field.csv", final.to_csv())
    _write_text(f"{cfg['out_prefix']}_trace.csv", trace_to_csv(trace))
    print(f"energy {trace[0]!r} -> {trace[-1]!r} in {len(trace) - 1} steps")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(p: _Parser) -> None:
    p.add_argument("--config", help="JSON file with the same keys as the flags")


def build_parser() -> _Parser:
    parser = _Parser(prog="singular-geom",
                     description="singular minimal/maximal surface toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catenary", parents=[], help="integrate a planar alpha-catenary")
    _add_common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--y0", type=float)
    p.add_argument("--theta0", type=float)
    p.add_argument("--length", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_catenary)

    p = sub.add_parser("residual", help="evaluate the curvature residual over a grid")
    _add_common(p)
    p.add_argument("--surface", choices=["catenary-cylinder", "helicoid", "sphere",
                                         "hyperboloid", "lightlike-reference", "file"])
    p.add_argument("--metric", choices=sorted(_METRICS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--v", help="direction as x,y,z")
    p.add_argument("--grid", help="NSxNT sample grid")
    p.add_argument("--file", help="height-field CSV for --surface file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("sweep", help="randomized coefficient-vanishing search")
    _add_common(p)
    p.add_argument("--metric", choices=sorted(_METRICS))
    p.add_argument("--class", dest="klass",
                   choices=["standard", "nondegenerate", "lightlike"])
    p.add_argument("--delta", type=int, choices=[-1, 1])
    p.add_argument("--n", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--alpha-min", dest="alpha_min", type=float)
    p.add_argument("--alpha-max", dest="alpha_max", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-mesh", help="write a surface grid as an OBJ mesh")
    _add_common(p)
    p.add_argument("--surface", choices=["catenary-cylinder", "helicoid", "sphere",
                                         "hyperboloid", "lightlike-reference", "file"])
    p.add_argument("--metric", choices=sorted(_METRICS))
    p.add_argument("--alpha", type=float)
    p.add_argument("--grid")
    p.add_argument("--file")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_mesh)

    p = sub.add_parser("variational", help="height-field gradient descent demo")
    _add_common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--grid")
    p.add_argument("--steps", type=int)
    p.add_argument("--rate", type=float)
    p.add_argument("--init", choices=["flat", "catenary", "noisy"])
    p.add_argument("--noise", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-prefix", dest="out_prefix")
    p.set_defaults(func=cmd_variational)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    raise SystemExit(code)


if __name__ == "__main__":
    main()
