"""``rmprop`` command-line frontend.

Every command writes a table to stdout (or ``--out``) as CSV or JSON and
diagnostics to stderr.  Exit codes: 0 success, 2 configuration error,
3 domain error, 4 verification failure, 5 eigen-solver failure.

Parameters resolve as built-in defaults < ``--config FILE`` < command-line
flags.  The config file is either ``key = value`` lines or a JSON document
previously emitted by this tool (its ``config`` object is re-used), so JSON
output doubles as a regression fixture.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import momentum, operators, potentials
from .errors import DomainError, ParameterError, SolverError, ToleranceError
from .geometry import Hemisphere
from .potentials import PhysicalParams

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_VERIFY, EXIT_SOLVER = 0, 2, 3, 4, 5

COMMANDS = ("potential", "propagator", "fig1", "spectrum", "harmonic")

DEFAULTS = {
    "hbar": 1.0, "mu": 0.5, "G": 1.0, "kappa": 1.0, "l": 0,
    "q_min": 0.0, "q_max": None, "q_steps": 129,
    "chi_min": None, "chi_max": None, "chi_steps": None,
    "hemisphere": "north", "verify": False,
    "base_panels": 8, "panels_per_wavelength": 8, "abs_tol": 1e-8, "rel_tol": 1e-7,
    "kappas": "0.25,0.5,1,2,4",
    "k_max": 3, "n_levels": None, "threshold": 1e-3, "extrapolate": True,
    "grids": "200,400,800", "min_order": 1.9,
    "format": "csv",
}

# chi_steps means sample count for `potential` and grid size for `spectrum`
CHI_STEPS_DEFAULT = {"potential": 99, "spectrum": 1600}

FLOAT_KEYS = {"hbar", "mu", "G", "kappa", "q_min", "q_max", "chi_min", "chi_max",
              "abs_tol", "rel_tol", "threshold", "min_order"}
INT_KEYS = {"l", "q_steps", "chi_steps", "base_panels", "panels_per_wavelength",
            "k_max", "n_levels"}
BOOL_KEYS = {"verify", "extrapolate"}
STR_KEYS = {"hemisphere", "kappas", "grids", "format"}


class VerificationFailed(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: PhysicalParams
    options: dict
    output_format: str = "csv"
    out: str | None = None
    quad: momentum.QuadratureConfig = field(default_factory=momentum.QuadratureConfig)

    def echo(self) -> dict:
        return {"command": self.command, "params": self.params.as_dict(),
                "quad": {"base_panels": self.quad.base_panels,
                         "panels_per_wavelength": self.quad.panels_per_wavelength,
                         "abs_tol": self.quad.abs_tol, "rel_tol": self.quad.rel_tol},
                "options": dict(sorted(self.options.items())),
                "output": {"format": self.output_format}}


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in FLOAT_KEYS:
            return float(value)
        if key in INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if key in BOOL_KEYS:
            if isinstance(value, bool):
                return value
            token = str(value).strip().lower()
            if token in ("1", "true", "yes", "on"):
                return True
            if token in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if key in STR_KEYS:
            return str(value)
    except (TypeError, ValueError):
        raise ParameterError(f"config field {key!r}: cannot parse {value!r}") from None
    raise ParameterError(f"unknown config field {key!r}")


def read_config_file(path) -> dict:
    """Parse a ``key = value`` file or the ``config`` echo of a JSON output."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParameterError(f"config field 'config': cannot read {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
            echo = doc["config"]
        except (ValueError, KeyError, TypeError):
            raise ParameterError(f"config field 'config': {path} is not an rmprop JSON output") from None
        flat = {**echo.get("params", {}), **echo.get("quad", {}), **echo.get("options", {}),
                **echo.get("output", {})}
    else:
        flat = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"config field at line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            flat[key.replace("-", "_")] = value
    return {k: _coerce(k, v) for k, v in flat.items()}


def _add_common(parser: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    parser.add_argument("--config", default=s, metavar="FILE")
    parser.add_argument("--G", dest="G", type=float, default=s)
    parser.add_argument("--kappa", type=float, default=s)
    parser.add_argument("--hbar", type=float, default=s)
    parser.add_argument("--mu", type=float, default=s)
    parser.add_argument("--l", dest="l", type=int, default=s)
    parser.add_argument("--format", choices=("csv", "json"), default=s)
    parser.add_argument("--out", default=s, metavar="PATH")


def _add_momentum(parser: argparse.ArgumentParser):
    s = argparse.SUPPRESS
    parser.add_argument("--q-min", dest="q_min", type=float, default=s)
    parser.add_argument("--q-max", dest="q_max", type=float, default=s)
    parser.add_argument("--q-steps", dest="q_steps", type=int, default=s)
    parser.add_argument("--hemisphere", choices=("north", "south"), default=s)
    parser.add_argument("--base-panels", dest="base_panels", type=int, default=s)
    parser.add_argument("--panels-per-wavelength", dest="panels_per_wavelength", type=int, default=s)
    parser.add_argument("--abs-tol", dest="abs_tol", type=float, default=s)
    parser.add_argument("--rel-tol", dest="rel_tol", type=float, default=s)


def build_parser() -> argparse.ArgumentParser:
    s = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="rmprop",
        description="Trigonometric Rosen-Morse potential on S^3: position space, spectra, momentum space.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("potential", help="tabulate V, cot term and barrier over chi")
    _add_common(p)
    p.add_argument("--chi-min", dest="chi_min", type=float, default=s)
    p.add_argument("--chi-max", dest="chi_max", type=float, default=s)
    p.add_argument("--chi-steps", dest="chi_steps", type=int, default=s)

    p = sub.add_parser("propagator", help="closed-form momentum-space propagator, optionally verified")
    _add_common(p)
    _add_momentum(p)
    p.add_argument("--verify", action="store_true", default=s)

    p = sub.add_parser("fig1", help="propagator surface over (kappa, q) in long format")
    _add_common(p)
    _add_momentum(p)
    p.add_argument("--kappas", default=s, help="comma-separated curvature values")

    p = sub.add_parser("spectrum", help="S-equation levels and their SO(4) degeneracy spreads")
    _add_common(p)
    p.add_argument("--chi-steps", dest="chi_steps", type=int, default=s)
    p.add_argument("--k-max", dest="k_max", type=int, default=s)
    p.add_argument("--n-levels", dest="n_levels", type=int, default=s)
    p.add_argument("--threshold", type=float, default=s)
    p.add_argument("--no-extrapolate", dest="extrapolate", action="store_false", default=s)

    p = sub.add_parser("harmonic", help="convergence of the Laplacian residual of cot(chi)")
    _add_common(p)
    p.add_argument("--grids", default=s, help="comma-separated grid sizes")
    p.add_argument("--min-order", dest="min_order", type=float, default=s)
    return parser


def resolve_config(command: str, flags: dict) -> RunConfig:
    merged = dict(DEFAULTS)
    merged["chi_steps"] = CHI_STEPS_DEFAULT.get(command)
    if "config" in flags:
        merged.update(read_config_file(flags["config"]))
    merged.update({k: v for k, v in flags.items() if k != "config"})
    out = merged.pop("out", None)
    merged.pop("command", None)

    params = PhysicalParams(**{k: merged.pop(k) for k in ("hbar", "mu", "G", "kappa", "l")})
    quad = momentum.QuadratureConfig(
        **{k: merged.pop(k) for k in ("base_panels", "panels_per_wavelength", "abs_tol", "rel_tol")})
    fmt = merged.pop("format")
    if fmt not in ("csv", "json"):
        raise ParameterError(f"config field 'format': expected csv or json, got {fmt!r}")

    relevant = {
        "potential": ("chi_min", "chi_max", "chi_steps"),
        "propagator": ("q_min", "q_max", "q_steps", "hemisphere", "verify"),
        "fig1": ("q_min", "q_max", "q_steps", "hemisphere", "kappas"),
        "spectrum": ("chi_steps", "k_max", "n_levels", "threshold", "extrapolate"),
        "harmonic": ("grids", "min_order"),
    }[command]
    options = {k: merged[k] for k in relevant}
    if "hemisphere" in options and options["hemisphere"] not in ("north", "south"):
        raise ParameterError("config field 'hemisphere': expected north or south")
    if "q_max" in options and options["q_max"] is None:
        kappa_ref = max(_float_list(options["kappas"], "kappas")) if command == "fig1" else params.kappa
        options["q_max"] = 8 * math.pi * params.hbar * math.sqrt(kappa_ref)
    return RunConfig(command, params, options, fmt, out, quad)


def _float_list(text, name) -> list[float]:
    try:
        values = [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise ParameterError(f"config field {name!r}: cannot parse {text!r}") from None
    if not values:
        raise ParameterError(f"config field {name!r}: empty list")
    return values


def _q_grid(opts, params) -> momentum.MomentumGrid:
    if opts["q_steps"] < 1:
        raise ParameterError("config field 'q_steps': must be >= 1")
    if opts["q_min"] < 0 or opts["q_max"] < opts["q_min"]:
        raise ParameterError("config field 'q_min'/'q_max': need 0 <= q_min <= q_max")
    return momentum.MomentumGrid(np.linspace(opts["q_min"], opts["q_max"], opts["q_steps"]), params)


def cmd_potential(cfg: RunConfig) -> tuple[list[str], list[list]]:
    o, p = cfg.options, cfg.params
    n = o["chi_steps"]
    if n is None or n < 1:
        raise ParameterError("config field 'chi_steps': must be >= 1")
    if o["chi_min"] is None and o["chi_max"] is None:
        chi = np.arange(1, n + 1) * math.pi / (n + 1)
    else:
        lo = 0.0 if o["chi_min"] is None else o["chi_min"]
        hi = math.pi if o["chi_max"] is None else o["chi_max"]
        chi = np.linspace(lo, hi, n)
    cot = potentials.cot_term(chi, p)
    barrier = potentials.centrifugal_barrier(chi, p)
    v = potentials.rosen_morse(chi, p)
    rows = [list(r) for r in zip(chi, v, cot, barrier)]
    return ["chi", "V", "cot_term", "barrier"], rows


def cmd_propagator(cfg: RunConfig) -> tuple[list[str], list[list]]:
    o, p = cfg.options, cfg.params
    grid = _q_grid(o, p)
    sign = Hemisphere(o["hemisphere"]).sign
    closed = sign * momentum.propagator_curve(grid, p).values
    header = ["q", "x", "Pi_closed", "Pi_over_c"]
    rows = [[q, x, v, v / p.c if p.c else None] for q, x, v in zip(grid.q_values, grid.x, closed)]
    if not o["verify"]:
        return header, rows
    north = momentum.propagator_curve(grid, p, momentum.CurveMode.NORTHERN, cfg.quad).values
    south = momentum.propagator_curve(grid, p, momentum.CurveMode.SOUTHERN, cfg.quad).values
    mine = north if sign > 0 else south
    worst, failed = 0.0, False
    for row, pn, ps, pm, pc in zip(rows, north, south, mine, closed):
        err = abs(pm - pc)
        worst = max(worst, err)
        failed |= err > cfg.quad.tolerance(pc)
        row.extend([pn, ps, err])
    header += ["Pi_north", "Pi_south", "abs_err"]
    print(f"max abs_err = {worst:.3e}", file=sys.stderr)
    if failed:
        raise VerificationFailed(f"quadrature verification failed: max abs_err = {worst:.3e}",
                                 header, rows)
    return header, rows


def fig1_rows(kappas, q_values, base: PhysicalParams, hemisphere: str = "north") -> list[list]:
    """Long-format ``(kappa, q, Pi)`` rows of the closed-form surface."""
    sign = Hemisphere(hemisphere).sign
    rows = []
    for kappa in kappas:
        p = base.replace(kappa=float(kappa))
        values = sign * np.asarray(momentum.closed_form_propagator(q_values, p), dtype=float)
        rows.extend([float(kappa), float(q), float(v)] for q, v in zip(q_values, values))
    return rows


def cmd_fig1(cfg: RunConfig) -> tuple[list[str], list[list]]:
    o = cfg.options
    kappas = _float_list(o["kappas"], "kappas")
    if any(not (k > 0 and math.isfinite(k)) for k in kappas):
        raise ParameterError("config field 'kappas': values must be positive")
    grid = _q_grid(o, cfg.params)
    return ["kappa", "q", "Pi"], fig1_rows(kappas, grid.q_values, cfg.params, o["hemisphere"])


def cmd_spectrum(cfg: RunConfig) -> tuple[list[str], list[list]]:
    o, p = cfg.options, cfg.params
    grid = operators.ChiGrid(o["chi_steps"])
    k_max = o["k_max"]
    if k_max is None or k_max < 1:
        raise ParameterError("config field 'k_max': must be >= 1")
    levels = o["n_levels"] if o["n_levels"] is not None else k_max + 1
    if levels > grid.n_points // 4 or levels < 1:
        raise ParameterError(
            f"config field 'n_levels': {levels} exceeds n_points/4 = {grid.n_points // 4}")
    report = operators.degeneracy_report(p, k_max, grid, extrapolate=o["extrapolate"],
                                         n_levels=levels)
    rows_out = [[r.l, r.level_index, r.n, r.eigenvalue, r.spread] for r in report]
    worst = max(r.spread for r in report)
    header = ["l", "level_index", "n", "eigenvalue", "spread"]
    print(f"max spread = {worst:.3e}", file=sys.stderr)
    if worst >= o["threshold"]:
        raise VerificationFailed(f"degeneracy spread {worst:.3e} >= threshold {o['threshold']:.3e}",
                                 header, rows_out)
    return header, rows_out


def cmd_harmonic(cfg: RunConfig) -> tuple[list[str], list[list]]:
    o = cfg.options
    try:
        sizes = [int(float(t)) for t in _float_list(o["grids"], "grids")]
    except OverflowError:
        raise ParameterError("config field 'grids': invalid size") from None
    if len(sizes) < 2:
        raise ParameterError("config field 'grids': need at least two grid sizes for an order")
    grids = [operators.ChiGrid(n) for n in sizes]
    residuals = [operators.harmonicity_residual(g) for g in grids]
    rows = [[sizes[0], residuals[0], None]]
    for i in range(1, len(grids)):
        order = observed_order(residuals[i - 1], residuals[i], grids[i - 1].h, grids[i].h)
        rows.append([sizes[i], residuals[i], order])
    final = rows[-1][2]
    header = ["n_points", "residual", "observed_order"]
    if not (final >= o["min_order"]):
        raise VerificationFailed(f"observed order {final:.3f} below {o['min_order']}", header, rows)
    return header, rows


def observed_order(e_coarse: float, e_fine: float, h_coarse: float, h_fine: float) -> float:
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


HANDLERS = {"potential": cmd_potential, "propagator": cmd_propagator, "fig1": cmd_fig1,
            "spectrum": cmd_spectrum, "harmonic": cmd_harmonic}


def _fmt_csv(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def _fmt_json(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise DomainError(f"non-finite value {v!r} in output")
        text = format(v, ".17g")
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt_json(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def render(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    if cfg.output_format == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(_fmt_csv(v) for v in row) for row in rows)
        return "\n".join(lines) + "\n"
    records = [dict(zip(header, row)) for row in rows]
    body = ",\n".join("    " + _fmt_json(r) for r in records)
    return ('{\n  "config": ' + _fmt_json(cfg.echo()) + ',\n  "rows": [\n'
            + body + ("\n" if records else "") + "  ]\n}\n")


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    try:
        cfg = resolve_config(command, args)
        header, rows = HANDLERS[command](cfg)
    except VerificationFailed as exc:
        message, header, rows = exc.args
        _emit(cfg, render(cfg, header, rows))
        print(f"rmprop: {message}", file=sys.stderr)
        return EXIT_VERIFY
    except ParameterError as exc:
        print(f"rmprop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"rmprop: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ToleranceError as exc:
        print(f"rmprop: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except SolverError as exc:
        print(f"rmprop: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _emit(cfg, render(cfg, header, rows))
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
