"""Command-line front end.

Lengths on the command line are in units of ``1/k_F`` (``--lmin 0.1`` means
``k_F L = 0.1``); energies are internal units unless ``--units ev:<scale>``
is given together with the ``-ev`` flags.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import ConvergenceError, GeometryError, TunnelForceError
from .geometry import FilmPair, SemiInfinitePair
from .models import (
    SweepResult,
    critical_film_width,
    fermi_pressure,
    force_semiinfinite,
    force_thin_films,
    surface_energy,
    sweep_films,
    sweep_separation,
    sweep_work_function,
)
from .oracle import oracle_force, oracle_surface_energy
from .params import UnitSystem, from_internal, make_material, to_internal
from .quadrature import QuadratureSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_ORACLE = 4

SCHEMA = "tunnelforce.sweep/1"
ORACLE_TOLERANCE = 1e-3
UNITS_NOTE = "internal units hbar = 2m = 1 (E = k^2); F_normalized = (F/A) / (2 E_F k_F^3)"

# (label, W/E_F, film width k_F d or None for half spaces, k_F L)
ORACLE_MATRIX = (
    ("films d=1", 1.0, 1.0, 0.2),
    ("films d=2", 1.0, 2.0, 0.5),
    ("films d=4 W=2E_F", 2.0, 4.0, 0.3),
    ("half spaces", 1.0, None, 0.5),
    ("half spaces W=5E_F", 5.0, None, 0.2),
)
# half spaces are slabs of width k_F D averaged over PROXY_AVERAGE widths
PROXY_WIDTH = 40.0
PROXY_AVERAGE = 8


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- argument handling


def _add_material(p: argparse.ArgumentParser, need_w: bool = True):
    g = p.add_argument_group("material")
    g.add_argument("--units", default="internal", help="'internal' or 'ev:<eV per energy unit>'")
    ef = g.add_mutually_exclusive_group()
    ef.add_argument("--ef", type=float, help="Fermi energy (internal units)")
    ef.add_argument("--ef-ev", type=float, help="Fermi energy in eV (needs --units ev:<scale>)")
    if need_w:
        w = g.add_mutually_exclusive_group()
        w.add_argument("--w", type=float, help="work function (internal units)")
        w.add_argument("--wtilde", type=float, help="reduced work function W / 2E_F")
        w.add_argument("--w-ev", type=float, help="work function in eV")


def _add_numerics(p: argparse.ArgumentParser):
    g = p.add_argument_group("numerics and output")
    g.add_argument("--eta", type=float, default=None, help="imaginary energy shift (default 1e-6 E_F)")
    g.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def _add_range(p: argparse.ArgumentParser, lo=0.0, hi=1.0, n=101):
    g = p.add_argument_group("separation grid (units of 1/k_F)")
    g.add_argument("--lmin", type=float, default=lo)
    g.add_argument("--lmax", type=float, default=hi)
    g.add_argument("--ln", type=int, default=n, help="number of points")
    g.add_argument("--log", action="store_true", help="logarithmic spacing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunnelforce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", help="degenerate-gas pressure, closed form and flux integral")
    _add_material(p, need_w=True)
    _add_numerics(p)

    p = sub.add_parser("force-sweep", help="force between half spaces versus separation")
    _add_material(p)
    _add_range(p)
    _add_numerics(p)

    p = sub.add_parser("wf-sweep", help="force versus work function at fixed separation")
    _add_material(p, need_w=False)
    p.add_argument("--l", type=float, required=True, help="separation k_F L")
    wr = p.add_mutually_exclusive_group()
    wr.add_argument("--wrange", type=float, nargs=2, metavar=("WMIN", "WMAX"), help="raw W range")
    wr.add_argument("--wtrange", type=float, nargs=2, metavar=("WTMIN", "WTMAX"),
                    help="W / 2E_F range (default 0.05 10)")
    p.add_argument("--wn", type=int, default=101, help="number of work functions")
    _add_numerics(p)

    p = sub.add_parser("film-sweep", help="force between two films versus separation")
    _add_material(p)
    p.add_argument("--d", type=float, nargs="+", default=[0.5, 1.0, 2.0, 4.0, 8.0],
                   help="film widths k_F d")
    _add_range(p)
    _add_numerics(p)

    p = sub.add_parser("surface-energy", help="surface energy from the separation integral")
    _add_material(p)
    p.add_argument("--oracle", action="store_true", help="also run the bound-state oracle")
    _add_numerics(p)

    p = sub.add_parser("oracle-compare", help="flux route against bound-state finite differences")
    p.add_argument("--ef", type=float, default=1.0, help="Fermi energy (internal units)")
    p.add_argument("--quick", action="store_true", help="skip the half-space proxy configurations")
    _add_numerics(p)
    return parser


def _material(args, require_w=True):
    units = UnitSystem.parse(args.units)
    if args.ef is not None:
        ef = args.ef
    elif args.ef_ev is not None:
        if args.units.strip().lower() in ("internal", "natural", ""):
            raise ConfigError("--ef-ev needs --units ev:<scale>")
        ef = to_internal(args.ef_ev, units)
    else:
        raise ConfigError("one of --ef or --ef-ev is required")
    w = None
    if getattr(args, "w", None) is not None:
        w = args.w
    elif getattr(args, "wtilde", None) is not None:
        w = 2.0 * ef * args.wtilde
    elif getattr(args, "w_ev", None) is not None:
        w = to_internal(args.w_ev, units)
    if w is None and require_w and hasattr(args, "wtilde"):
        raise ConfigError("one of --w, --wtilde or --w-ev is required")
    return ef, w, units


def _spec(args, ef) -> QuadratureSpec:
    kw = {}
    if args.eta is not None:
        kw["eta"] = args.eta
    if args.tol is not None:
        kw["rel_tol"] = args.tol
    return QuadratureSpec(**kw)


def _grid(lo, hi, n, log):
    if n < 2:
        raise ConfigError("a sweep needs at least two points")
    if not hi > lo:
        raise ConfigError(f"sweep range must satisfy min < max, got [{lo}, {hi}]")
    if log:
        if lo <= 0:
            raise ConfigError("logarithmic sweeps need a positive lower bound")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


# ---------------------------------------------------------------- output


def _config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func")}


def _header(args) -> list[str]:
    return [
        f"tunnelforce {__version__} {args.command}",
        f"generated_utc: {datetime.now(timezone.utc).strftime('%Y-%m-%dT%H:%M:%SZ')}",
        f"units: {UNITS_NOTE}",
        "config: " + json.dumps(_config_echo(args), sort_keys=True),
    ]


def _fmt(x):
    if isinstance(x, str):
        return x
    return repr(float(x))


def _emit(args, columns, rows):
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "version": __version__,
            "command": args.command,
            "generated_utc": _header(args)[1].split(": ", 1)[1],
            "units": UNITS_NOTE,
            "config": _config_echo(args),
            "columns": list(columns),
            "rows": [[None if isinstance(v, float) and not math.isfinite(v) else v for v in r] for r in rows],
        }
        text = json.dumps(doc, indent=1) + "\n"
    else:
        buf = io.StringIO()
        for line in _header(args):
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep_rows(res: SweepResult, ef, lead):
    norm = 2.0 * ef * ef**1.5
    for i in range(len(res.axis)):
        yield lead(i) + [float(res.values[i]), float(res.values[i]) / norm, float(res.errors[i]),
                         float(res.eta_used[i]), res.status[i]]


# ---------------------------------------------------------------- commands


def cmd_pressure(args) -> int:
    ef, w, units = _material(args, require_w=False)
    # the bulk pressure does not depend on the work function
    mat = make_material(ef, 0.0 if w is None else w)
    res = fermi_pressure(mat, _spec(args, ef))
    rows = [[res.closed_form, res.numeric, res.rel_diff, res.error_estimate]]
    cols = ["closed_form", "numeric", "rel_diff", "abs_error"]
    if units.energy_scale != 1.0 or units.length_scale != 1.0:
        cols.append("numeric_eV_per_A3")
        rows[0].append(from_internal(res.numeric, units, energy_power=1, length_power=-3))
    _emit(args, cols, rows)
    return EXIT_OK


def cmd_force_sweep(args) -> int:
    ef, w, _ = _material(args)
    mat = make_material(ef, w)
    kf = mat.k_fermi
    xs = _grid(args.lmin, args.lmax, args.ln, args.log)
    res = sweep_separation(mat, mat, xs / kf, _spec(args, ef), args.jobs)
    rows = list(_sweep_rows(res, ef, lambda i: [float(xs[i])]))
    _emit(args, ["kF_L", "F_over_A", "F_normalized", "abs_error", "eta_used", "status"], rows)
    return EXIT_OK if res.ok else EXIT_CONVERGENCE


def cmd_wf_sweep(args) -> int:
    ef, _, _ = _material(args)
    if args.wrange is not None:
        ws = _grid(args.wrange[0], args.wrange[1], args.wn, False)
    else:
        lo, hi = args.wtrange if args.wtrange is not None else (0.05, 10.0)
        ws = 2.0 * ef * _grid(lo, hi, args.wn, False)
    if ws[0] < 0:
        raise ConfigError("work functions must be non-negative")
    L = args.l / math.sqrt(ef)
    res = sweep_work_function(ef, ws, L, _spec(args, ef), args.jobs)
    rows = list(_sweep_rows(res, ef, lambda i: [float(ws[i]), float(ws[i]) / (2.0 * ef)]))
    _emit(args, ["W", "W_tilde", "F_over_A", "F_normalized", "abs_error", "eta_used", "status"], rows)
    return EXIT_OK if res.ok else EXIT_CONVERGENCE


def cmd_film_sweep(args) -> int:
    ef, w, _ = _material(args)
    mat = make_material(ef, w)
    kf = mat.k_fermi
    xs = _grid(args.lmin, args.lmax, args.ln, args.log)
    spec = _spec(args, ef)
    rows, ok = [], True
    for d in args.d:
        if not d > 0:
            raise ConfigError(f"film widths must be positive, got {d}")
        res = sweep_films(mat, d / kf, xs / kf, spec, args.jobs)
        ok &= res.ok
        rows.extend(_sweep_rows(res, ef, lambda i, d=d: [d, float(xs[i])]))
    cols = ["kF_d", "kF_L", "F_over_A", "F_normalized", "abs_error", "eta_used", "status"]
    _emit(args, cols, rows)
    return EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_surface_energy(args) -> int:
    ef, w, _ = _material(args)
    mat = make_material(ef, w)
    res = surface_energy(mat, _spec(args, ef))
    cols = ["sigma", "work_of_separation", "sigma_analytic", "abs_error", "l_max", "kF_dc"]
    row = [res.sigma, res.work_of_separation, res.analytic, res.error_estimate, res.l_max,
           critical_film_width(mat) * mat.k_fermi]
    code = EXIT_OK
    if args.oracle:
        orc = oracle_surface_energy(mat)
        dev = abs(orc - res.sigma) / abs(res.sigma)
        cols += ["sigma_oracle", "oracle_rel_diff"]
        row += [orc, dev]
        if dev > ORACLE_TOLERANCE:
            code = EXIT_ORACLE
    _emit(args, cols, [row])
    return code


def oracle_comparison(ef: float = 1.0, spec: QuadratureSpec | None = None, quick: bool = False):
    """Rows ``(label, W, k_F d, k_F L, flux force, oracle force, relative deviation)``."""
    kf = math.sqrt(ef)
    rows = []
    for label, w_ratio, d, x in ORACLE_MATRIX:
        if quick and d is None:
            continue
        mat = make_material(ef, w_ratio * ef)
        L = x / kf
        if d is None:
            flux = force_semiinfinite(mat, mat, L, spec).value
            orc = oracle_force(SemiInfinitePair(mat, mat, L), proxy_width=PROXY_WIDTH / kf,
                               proxy_average=PROXY_AVERAGE).value
        else:
            flux = force_thin_films(mat, d / kf, d / kf, L, spec).value
            orc = oracle_force(FilmPair(mat, d / kf, d / kf, L)).value
        rows.append([label, w_ratio * ef, math.nan if d is None else d, x, flux, orc,
                     abs(flux - orc) / max(abs(orc), 1e-300)])
    return rows


def cmd_oracle_compare(args) -> int:
    rows = oracle_comparison(args.ef, _spec(args, args.ef), args.quick)
    worst = max(r[-1] for r in rows)
    _emit(args, ["config", "W", "kF_d", "kF_L", "F_flux", "F_oracle", "rel_dev"], rows)
    print(f"max relative deviation {worst:.3e} (tolerance {ORACLE_TOLERANCE:g})", file=sys.stderr)
    return EXIT_OK if worst <= ORACLE_TOLERANCE else EXIT_ORACLE


COMMANDS = {
    "pressure": cmd_pressure,
    "force-sweep": cmd_force_sweep,
    "wf-sweep": cmd_wf_sweep,
    "film-sweep": cmd_film_sweep,
    "surface-energy": cmd_surface_energy,
    "oracle-compare": cmd_oracle_compare,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be at least 1")
        return COMMANDS[args.command](args)
    except (ConfigError, GeometryError, ValueError) as exc:
        # DomainError is a ValueError
        print(f"tunnelforce: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"tunnelforce: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except TunnelForceError as exc:
        print(f"tunnelforce: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
