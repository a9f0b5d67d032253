"""Command-line front end.

    voidcrack <mode> [flags] [--config file.json] [--out results.csv] [--plot out.svg]

Modes: solve, sweep, kernel-dump, symbol-dump, converge, thermo-solve.
Exit codes: 0 ok, 2 usage, 3 flagged SCF, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import crack, hsie, kernel, symbol, thermo
from .kernel import KernelConfig, KernelDomainError
from .material import MaterialError, MaterialParams, derive_groups
from .symbol import SymbolSpec

log = logging.getLogger("voidcrack")

MODES = ("solve", "sweep", "kernel-dump", "symbol-dump", "converge", "thermo-solve")
EXIT_OK, EXIT_USAGE, EXIT_FLAGGED, EXIT_NUMERIC = 0, 2, 3, 4
MATERIAL_KEYS = ("lambda", "mu", "alpha", "beta", "xi", "b", "m")
SWEEP_COLUMNS = ("axis", "value", "k", "ratio", "route_A", "route_B", "n", "residual_norm", "flagged")

# flag name -> (type, default)
OPTIONS = {
    "N": (float, None),
    "c2": (float, None),
    "lambda": (float, None),
    "mu": (float, None),
    "alpha": (float, None),
    "beta": (float, None),
    "xi": (float, None),
    "b": (float, None),
    "m": (float, None),
    "B": (float, None),
    "a": (float, 1.0),
    "load": (float, None),
    "sigma0": (float, None),
    "n": (int, 400),
    "spectral-m": (int, 32),
    "s-cut": (float, 200.0),
    "panel-tol": (float, 1e-10),
    "tail-order": (int, 2),
    "axis": (str, "N"),
    "values": (str, None),
    "ns": (str, "50,100,200,400"),
    "x-min": (float, 1e-3),
    "x-max": (float, 20.0),
    "s-max": (float, 100.0),
    "points": (int, 41),
    "flux": (str, None),
    "workers": (int, 1),
    "out": (str, None),
    "plot": (str, None),
    "profile": (str, None),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str
    spec: SymbolSpec
    a: float
    load: float
    n: int
    kernel: KernelConfig
    material: Optional[MaterialParams] = None
    B: Optional[float] = None
    spectral_m: int = 32
    axis: str = "N"
    values: tuple = ()
    ns: tuple = ()
    x_range: tuple = (1e-3, 20.0)
    s_max: float = 100.0
    points: int = 41
    flux: Optional[str] = None
    workers: int = 1
    out: Optional[Path] = None
    plot: Optional[Path] = None
    profile: Optional[Path] = None
    extra: dict = field(default_factory=dict, compare=False)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="voidcrack", description="Crack in a porous elastic medium.",
                                allow_abbrev=False)
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="JSON file whose keys mirror the long flag names")
    for name, (typ, _) in OPTIONS.items():
        p.add_argument(f"--{name}", dest=name, type=typ, default=argparse.SUPPRESS)
    return p


def _floats(text: str, key: str) -> tuple:
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"--{key}: expected a comma-separated list of numbers, got {text!r}") from None


def _load_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    out = {}
    for key, value in data.items():
        name = key.replace("_", "-") if key.replace("_", "-") in OPTIONS else key
        if name not in OPTIONS:
            raise ConfigError(f"unknown config key: {key!r}")
        typ = OPTIONS[name][0]
        if isinstance(value, list) and name in ("values", "ns"):
            value = ",".join(str(v) for v in value)
        try:
            out[name] = typ(value)
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r}: cannot interpret {value!r}") from None
    return out


def parse_config(argv=None) -> RunConfig:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:  # --help
            raise
        raise ConfigError("invalid command line") from exc
    given = vars(ns)
    mode = given.pop("mode")
    file_values = _load_file(given.pop("config")) if given.get("config") else {}
    given.pop("config", None)
    merged = {name: default for name, (_, default) in OPTIONS.items()}
    merged.update(file_values)
    merged.update(given)
    return _build(mode, merged)


def _build(mode: str, o: dict) -> RunConfig:
    material_given = [k for k in MATERIAL_KEYS if o[k] is not None]
    direct_given = [k for k in ("N", "c2") if o[k] is not None]
    if material_given and direct_given:
        raise ConfigError(f"material over-specified: --{direct_given[0]} and --{material_given[0]} "
                          "(give either raw constants or N and c2)")
    material = None
    B = o["B"]
    if material_given:
        missing = [k for k in ("lambda", "mu", "alpha", "beta", "xi") if o[k] is None]
        if missing:
            raise ConfigError(f"missing material constant --{missing[0]}")
        material = MaterialParams(lam=o["lambda"], mu=o["mu"], alpha=o["alpha"], beta=o["beta"], xi=o["xi"],
                                  b=o["b"], m=o["m"])
        try:
            groups = derive_groups(material)
        except MaterialError as exc:
            raise ConfigError(str(exc)) from None
        if groups.B is not None:
            if B is not None:
                raise ConfigError("thermal constant over-specified: --B together with --b/--m")
            B = groups.B
        N, c2 = groups.N, groups.c2
    else:
        if mode not in ("symbol-dump", "kernel-dump") or direct_given:
            for key in ("N", "c2"):
                if o[key] is None:
                    raise ConfigError(f"missing --{key} (or give raw material constants)")
        N = o["N"] if o["N"] is not None else 0.0
        c2 = o["c2"] if o["c2"] is not None else 0.2
    if not 0.0 <= N < 1.0:
        raise ConfigError(f"--N: coupling number out of range ({N}; need 0 <= N < 1)")
    if not 0.0 < c2 < 1.0:
        raise ConfigError(f"--c2: must lie in (0, 1), got {c2}")
    spec = SymbolSpec(c2, N)

    if o["sigma0"] is not None:
        if o["load"] is not None:
            raise ConfigError("load over-specified: --load together with --sigma0")
        if material is None:
            raise ConfigError("--sigma0 needs raw material constants (for mu); use --load with N, c2")
        load = o["sigma0"] / (2.0 * material.mu)
    else:
        load = o["load"] if o["load"] is not None else 0.5
    if not load > 0:
        raise ConfigError(f"--load: must be positive, got {load}")
    if not o["a"] > 0:
        raise ConfigError(f"--a: must be positive, got {o['a']}")
    if o["n"] < 50:
        raise ConfigError(f"--n: need at least 50 panels, got {o['n']}")
    try:
        kcfg = KernelConfig(spec, s_cut=o["s-cut"], panel_tol=o["panel-tol"], tail_order=o["tail-order"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    values = ()
    if mode == "sweep":
        if o["axis"] not in crack.AXES:
            raise ConfigError(f"--axis: must be one of {crack.AXES}, got {o['axis']!r}")
        if o["values"] is None:
            raise ConfigError("sweep needs --values")
        values = _floats(o["values"], "values")
    ns = ()
    if mode == "converge":
        ns = tuple(int(v) for v in _floats(o["ns"], "ns"))
        if any(v < 50 for v in ns):
            raise ConfigError("--ns: every grid needs at least 50 panels")
    if mode == "thermo-solve":
        if o["flux"] is None:
            raise ConfigError("thermo-solve needs --flux (constant:<value> or a CSV path)")
        if B is None:
            raise ConfigError("thermo-solve needs --B (or raw constants with --b and --m)")
    if o["x-min"] <= 0 or o["x-max"] <= o["x-min"] or o["x-max"] > kernel.X_MAX:
        raise ConfigError("--x-min/--x-max: need 0 < x-min < x-max <= 100")
    if o["points"] < 2:
        raise ConfigError("--points: need at least 2")
    if o["workers"] < 1:
        raise ConfigError("--workers: need at least 1")

    def path(key):
        return Path(o[key]) if o[key] else None

    return RunConfig(mode=mode, spec=spec, a=o["a"], load=load, n=o["n"], kernel=kcfg, material=material, B=B,
                     spectral_m=o["spectral-m"], axis=o["axis"], values=values, ns=ns,
                     x_range=(o["x-min"], o["x-max"]), s_max=o["s-max"], points=o["points"], flux=o["flux"],
                     workers=o["workers"], out=path("out"), plot=path("plot"), profile=path("profile"))


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value) + 0.0:.12g}"


def render_csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def svg_line_chart(xs, ys, xlabel: str, ylabel: str, title: str = "") -> str:
    width, height, pad = 480, 320, 56
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + [1.0]), max(ys + [1.0])
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    span = y1 - y0
    y0, y1 = y0 - 0.05 * span, y1 + 0.05 * span

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>']
    for i in range(5):
        xv = x0 + i * (x1 - x0) / 4
        yv = y0 + i * (y1 - y0) / 4
        parts.append(f'<text x="{px(xv):.1f}" y="{height - pad + 16}" text-anchor="middle">{xv:.3g}</text>')
        parts.append(f'<text x="{pad - 6}" y="{py(yv) + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    ref = py(1.0)
    parts.append(f'<line x1="{pad}" y1="{ref:.1f}" x2="{width - pad}" y2="{ref:.1f}" stroke="#999" '
                 'stroke-dasharray="4 3"/>')
    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="#1f4e9c"/>')
    parts.append(f'<text x="{width / 2}" y="{height - 14}" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{height / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {height / 2})">{ylabel}</text>')
    if title:
        parts.append(f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="13">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _base_problem(cfg: RunConfig) -> crack.CrackProblem:
    return crack.CrackProblem(cfg.spec, a=cfg.a, load=cfg.load)


def _scf_row(axis, value, res: crack.ScfResult, n, residual):
    return (axis, value, res.k, res.ratio, res.route_a, res.route_b, n, residual, res.flagged)


def _run_solve(cfg: RunConfig):
    problem = _base_problem(cfg)
    sol = crack.crack_opening(problem, cfg.kernel, cfg.n)
    res = crack.scf(sol, problem, cfg.kernel)
    if cfg.profile:
        write_atomic(cfg.profile, render_csv(("x", "opening"), zip(sol.grid.points, sol.g)))
    row = _scf_row("N", cfg.spec.N, res, cfg.n, sol.residual_norm)
    return SWEEP_COLUMNS, [row], [res.flagged]


def _run_sweep(cfg: RunConfig):
    rows = crack.sweep(_base_problem(cfg), cfg.kernel, cfg.axis, cfg.values, cfg.n, workers=cfg.workers)
    out = [(r.axis, r.value, r.k, r.ratio, r.route_a, r.route_b, r.n, r.residual_norm, r.flagged) for r in rows]
    if cfg.plot and rows:
        svg = svg_line_chart([r.value for r in rows], [r.ratio for r in rows], cfg.axis, "k / k0",
                             f"c2={cfg.spec.c2:g}, a={cfg.a:g}")
        write_atomic(cfg.plot, svg)
    return SWEEP_COLUMNS, out, [r.flagged for r in rows]


def _run_kernel_dump(cfg: RunConfig):
    xs = np.geomspace(*cfg.x_range, cfg.points)
    kr = kernel.regular_kernel(cfg.kernel, xs)
    full = kernel.full_kernel(cfg.kernel, xs)
    return ("x", "K_regular", "K"), list(zip(xs, kr, full)), []


def _run_symbol_dump(cfg: RunConfig):
    s = np.linspace(0.0, cfg.s_max, cfg.points)
    return ("s", "L", "L_minus_c0_s"), list(zip(s, symbol.L(cfg.spec, s), symbol.remainder(cfg.spec, s))), []


def _run_converge(cfg: RunConfig):
    problem = _base_problem(cfg)
    if cfg.spec.N == 0.0:
        reference = cfg.load / (1.0 - cfg.spec.c2) * cfg.a
    else:
        reference = float(crack.spectral_opening(problem, cfg.kernel, max(cfg.spectral_m, 48))(0.0))
    rows = []
    for n in cfg.ns:
        sol = crack.crack_opening(problem, cfg.kernel, n)
        g0 = crack.center_value(sol)
        res = crack.scf(sol, problem, cfg.kernel)
        rows.append((n, g0, reference, abs(g0 - reference) / abs(reference), res.ratio, sol.residual_norm))
    return ("n", "g0", "reference", "error", "ratio", "residual_norm"), rows, []


def _run_thermo(cfg: RunConfig):
    base = _base_problem(cfg)
    text = cfg.flux
    if text.startswith("constant:"):
        try:
            flux = thermo.FluxProfile.constant(float(text.split(":", 1)[1]), cfg.a)
        except ValueError:
            raise ConfigError(f"--flux: bad constant {text!r}") from None
    else:
        try:
            flux = thermo.FluxProfile.from_csv(text, cfg.a)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"--flux: {exc}") from None
    problem = thermo.ThermoCrackProblem(base, flux, cfg.B)
    hp = thermo.thermo_rhs(problem, cfg.kernel)
    sol = crack.as_opening(hsie.solve(hp, cfg.n))
    res = crack.scf(sol, base, cfg.kernel)
    if cfg.profile:
        write_atomic(cfg.profile, render_csv(("x", "opening"), zip(sol.grid.points, sol.g)))
    return SWEEP_COLUMNS, [_scf_row("N", cfg.spec.N, res, cfg.n, sol.residual_norm)], [res.flagged]


RUNNERS = {
    "solve": _run_solve,
    "sweep": _run_sweep,
    "kernel-dump": _run_kernel_dump,
    "symbol-dump": _run_symbol_dump,
    "converge": _run_converge,
    "thermo-solve": _run_thermo,
}


def run(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        header, rows, flags = RUNNERS[cfg.mode](cfg)
    except (hsie.HsieError, KernelDomainError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"voidcrack: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render_csv(header, rows)
    if cfg.out:
        write_atomic(cfg.out, text)
    for row in rows:
        print(" ".join(f"{h}={fmt(v)}" for h, v in zip(header, row)), file=stdout)
    return EXIT_FLAGGED if any(flags) else EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"voidcrack: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
