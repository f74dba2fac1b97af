"""Batch command-line front end.

Subcommands compute library results and emit CSV (one fixed header line,
floats at 17 significant digits, byte-deterministic for a given
configuration).  Physics inputs are dimensionless (m c^2 dt, p dx, E dt);
``--dx``/``--c`` optionally rescale the output columns of ``dispersion``
to physical units.  ``--plot`` renders a figure next to the CSV;
matplotlib is imported only on that path.

Exit codes: 0 success, 2 invalid configuration (no output written),
3 a numerical check failed (output is written first, when possible).

A config file of ``key = value`` lines (keys are long option names,
dashes or underscores) can supply defaults via ``--config``.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import circuits, fock, walk3d
from .errors import DomainError, NumericalCheckError
from .lattice import LatticeState, momentum_grid, step as lattice_step
from .walk1d import (
    DIRAC,
    MODIFIED,
    WalkParams,
    dispersion_scan,
    find_theta,
    gap_certificate,
)

NORM_DRIFT_LIMIT = 1e-9


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


def _write_csv(path: str | None, header: str, rows) -> None:
    text = header + "\n" + "".join(",".join(_fmt(v) for v in row) + "\n" for row in rows)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as handle:
            handle.write(text)


def _plot_path(out: str | None) -> str:
    if out is None:
        raise DomainError("--plot requires --out")
    stem = out[:-4] if out.endswith(".csv") else out
    return stem + ".png"


def _build_params(model: str, m_dt: float, theta: float | None) -> WalkParams:
    if m_dt is None:
        raise DomainError("--mdt is required")
    if m_dt < 0:
        raise DomainError("m c^2 dt must be non-negative")
    if model == DIRAC:
        return WalkParams.dirac(m_dt)
    if theta is None:
        raise DomainError("the modified model requires --theta")
    return WalkParams.modified(m_dt, theta)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_dispersion(args) -> int:
    if args.grid is None or args.grid < 1:
        raise DomainError("--grid must be a positive integer")
    params = _build_params(args.model, args.mdt, args.theta)
    p, e_plus_dt, e_minus_dt = dispersion_scan(params, args.grid, args.model)
    rescale = args.dx is not None or args.c is not None
    if rescale:
        dx = args.dx if args.dx is not None else 1.0
        c = args.c if args.c is not None else 1.0
        if dx <= 0 or c <= 0:
            raise DomainError("--dx and --c must be positive")
        dt = dx / c if args.model == DIRAC else 2.0 * math.cos(args.theta) * dx / c
        header = "p,E_plus,E_minus"
        rows = [
            (pk / dx, ep / dt, em / dt)
            for pk, ep, em in zip(p * params.dx, e_plus_dt, e_minus_dt)
        ]
    else:
        header = "p_dx,E_plus_dt,E_minus_dt"
        rows = list(zip(p * params.dx, e_plus_dt, e_minus_dt))
    _write_csv(args.out, header, rows)
    if args.plot:
        from . import plotting

        plotting.plot_dispersion(
            _plot_path(args.out),
            p * params.dx,
            e_plus_dt,
            e_minus_dt,
            title=f"{args.model} walk, m dt = {args.mdt:g}",
        )
    return 0


def cmd_gap_scan(args) -> int:
    if args.grid < 64:
        raise DomainError("--grid must be at least 64")
    m_dts = args.mdt_list if args.mdt_list else [args.mdt]
    if not m_dts or any(m is None for m in m_dts):
        raise DomainError("provide --mdt or --mdt-list")
    rows = []
    for m_dt in m_dts:
        if args.theta is None:
            theta = find_theta(m_dt, args.margin)  # DomainError when out of range
        else:
            theta = args.theta
        params = WalkParams.modified(m_dt, theta)
        cert = gap_certificate(params, args.grid)
        rows.append((m_dt, theta, cert.max_abs_energy * params.dt, cert.gapped))
    _write_csv(args.out, "mdt,theta,max_abs_E_dt,gapped", rows)
    if args.plot:
        from . import plotting

        plotting.plot_gap_scan(
            _plot_path(args.out),
            [r[0] for r in rows],
            [r[2] for r in rows],
            title="largest |E| dt over the zone",
        )
    return 0


def _parse_start(text: str, n_sites: int):
    parts = text.split(":")
    if parts[0] != "delta" or len(parts) not in (2, 3):
        raise DomainError("--start must look like delta:<site>[:r|l]")
    try:
        site = int(parts[1])
    except ValueError as exc:
        raise DomainError("--start site must be an integer") from exc
    if not 0 <= site < n_sites:
        raise DomainError("--start site out of range")
    component = 0
    if len(parts) == 3:
        if parts[2] not in ("r", "l"):
            raise DomainError("--start component must be r or l")
        component = 0 if parts[2] == "r" else 1
    return site, component


def cmd_evolve(args) -> int:
    if args.sites is None or args.sites < 2:
        raise DomainError("--sites must be at least 2")
    if args.steps is None or args.steps < 0:
        raise DomainError("--steps must be non-negative")
    if args.require_zone_edge and args.sites % 2 != 0:
        raise DomainError("--require-zone-edge needs an even site count")
    if args.norm_tol <= 0:
        raise DomainError("--norm-tol must be positive")
    params = _build_params(args.model, args.mdt, args.theta)
    site, component = _parse_start(args.start, args.sites)
    state = LatticeState.delta(args.sites, site, component)
    rows = []
    heat = []
    for step_index in range(args.steps + 1):
        probs = state.site_probabilities()
        norm = float(np.sqrt(probs.sum()))
        heat.append(probs.sum(axis=1))
        for n in range(args.sites):
            rows.append((step_index, n, probs[n, 0], probs[n, 1], norm))
        if step_index < args.steps:
            state = lattice_step(state, params)
    _write_csv(args.out, "step,site,prob_r,prob_l,norm", rows)
    if args.plot:
        from . import plotting

        plotting.plot_evolution(
            _plot_path(args.out), np.array(heat), title=f"{args.model} walk evolution"
        )
    final_norm = state.norm()
    if abs(final_norm - 1.0) > args.norm_tol:
        raise NumericalCheckError(
            f"norm drifted to {final_norm!r} after {args.steps} steps"
        )
    return 0


def cmd_circuit_verify(args) -> int:
    if args.sites is None or args.sites < 2 or args.sites % 2 != 0:
        raise DomainError("--sites must be an even integer >= 2")
    if args.sites > circuits.MAX_EQUIVALENCE_SITES:
        raise DomainError(
            f"--sites capped at {circuits.MAX_EQUIVALENCE_SITES} for the dense check"
        )
    params = _build_params(args.model, args.mdt, args.theta)
    report = circuits.equivalence_report(args.model, args.sites, params)
    theta_text = "" if args.theta is None else args.theta
    rows = [
        (args.model, args.sites, args.mdt, theta_text, "odd", report.deviation_odd),
        (args.model, args.sites, args.mdt, theta_text, "even", report.deviation_even),
    ]
    _write_csv(args.out, "model,sites,mdt,theta,sector,deviation", rows)
    if args.plot:
        from . import plotting

        plotting.plot_bars(
            _plot_path(args.out),
            ["odd", "even"],
            [report.deviation_odd, report.deviation_even],
            ylabel="max entrywise deviation",
            title=f"circuit vs reference, N = {args.sites}",
        )
    if report.max_deviation > args.tol:
        raise NumericalCheckError(
            f"circuit deviation {report.max_deviation:.3e} exceeds {args.tol:.1e}"
        )
    return 0


def cmd_sea(args) -> int:
    if args.sites is None or args.sites < 2:
        raise DomainError("--sites must be at least 2")
    if not (0 < args.eps1 < math.pi) or not (0 < args.eps2 < math.pi):
        raise DomainError("--eps1/--eps2 must lie in (0, pi) (units of 1/dt)")
    params = _build_params(args.model, args.mdt, args.theta)
    momenta = momentum_grid(args.sites, params.dx)
    e_plus_dt = np.array(
        [fock.band_energy(p, params, fock.PLUS) * params.dt for p in momenta]
    )
    e_minus_dt = np.array(
        [fock.band_energy(p, params, fock.MINUS) * params.dt for p in momenta]
    )

    def pair_delta(i_plus: int, i_minus: int) -> float:
        events = [
            fock.ModeEvent(fock.PLUS, float(momenta[i_plus]), fock.CREATE),
            fock.ModeEvent(fock.MINUS, float(momenta[i_minus]), fock.ANNIHILATE),
        ]
        return fock.modular_delta_e(events, params) * params.dt

    rows = []
    # pair creation just above/below E = 0
    i_p = int(np.argmin(np.abs(e_plus_dt - args.eps1)))
    i_m = int(np.argmin(np.abs(e_minus_dt + args.eps2)))
    rows.append(("low_pair", e_plus_dt[i_p], -e_minus_dt[i_m], pair_delta(i_p, i_m)))
    # pair creation across the fold boundary E = +-pi/dt
    i_p = int(np.argmin(np.abs((math.pi - e_plus_dt) - args.eps1)))
    i_m = int(np.argmin(np.abs((math.pi + e_minus_dt) - args.eps2)))
    rows.append(
        (
            "fold_pair",
            math.pi - e_plus_dt[i_p],
            math.pi + e_minus_dt[i_m],
            pair_delta(i_p, i_m),
        )
    )
    if args.scan:
        best = None
        for i in range(args.sites):
            for j in range(args.sites):
                delta = pair_delta(i, j)
                if best is None or delta < best[2]:
                    best = (i, j, delta)
        rows.append(("scan_min", e_plus_dt[best[0]], -e_minus_dt[best[1]], best[2]))
    _write_csv(args.out, "scenario,eps1_dt,eps2_dt,delta_e_dt", rows)
    if args.plot:
        from . import plotting

        plotting.plot_bars(
            _plot_path(args.out),
            [r[0] for r in rows],
            [r[3] for r in rows],
            ylabel="folded Delta E dt",
            title=f"pair creation, {args.model} model",
        )
    return 0


def _parse_fix(text: str):
    fixed = {}
    for item in text.split(","):
        if "=" not in item:
            raise DomainError("--fix must look like py=<val>,pz=<val>")
        key, _, value = item.partition("=")
        key = key.strip()
        if not (len(key) == 2 and key[0] == "p" and key[1] in "xyz"):
            raise DomainError(f"unknown momentum component {key!r}")
        try:
            fixed[key[1]] = float(value)
        except ValueError as exc:
            raise DomainError(f"bad value for {key!r}") from exc
    if len(fixed) != 2:
        raise DomainError("--fix must pin exactly two distinct components")
    return fixed


def cmd_dispersion3d(args) -> int:
    if args.grid < 2:
        raise DomainError("--grid must be at least 2")
    params = _build_params(args.model, args.mdt, args.theta)
    fixed = _parse_fix(args.fix)
    sweep_axis = next(a for a in "xyz" if a not in fixed)
    fixed_momenta = {a: v / params.dx for a, v in fixed.items()}  # values given as p dx
    sweep, energies = walk3d.band_slice(
        params, args.model, sweep_axis, fixed_momenta, args.grid
    )
    header = f"p_{sweep_axis}_dx,E1_dt,E2_dt,E3_dt,E4_dt"
    rows = [
        (sweep[i] * params.dx, *(energies[i] * params.dt)) for i in range(len(sweep))
    ]
    _write_csv(args.out, header, rows)
    if args.plot:
        from . import plotting

        plotting.plot_band_slice(
            _plot_path(args.out),
            sweep * params.dx,
            energies * params.dt,
            title=f"3-D {args.model} bands, sweep {sweep_axis}",
        )
    return 0


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated floats") from exc


def _add_common(parser, with_theta=True):
    parser.add_argument("--model", choices=[DIRAC, MODIFIED], default=DIRAC)
    parser.add_argument("--mdt", type=float, default=None, help="m c^2 dt")
    if with_theta:
        parser.add_argument("--theta", type=float, default=None, help="tilt angle")
    parser.add_argument("--out", default=None, help="CSV output path (default stdout)")
    parser.add_argument("--plot", action="store_true", help="render a PNG beside the CSV")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diracwalk", description="discrete-spacetime Dirac walk toolkit"
    )
    parser.add_argument("--config", default=None, help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)
    registry = {}

    p = sub.add_parser("dispersion", help="band energies over the Brillouin zone")
    _add_common(p)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--dx", type=float, default=None, help="rescale output to physical p")
    p.add_argument("--c", type=float, default=None, help="rescale output to physical E")
    p.set_defaults(func=cmd_dispersion)
    registry["dispersion"] = p

    p = sub.add_parser("gap-scan", help="certify max |E| dt < pi/2 for tilt angles")
    p.add_argument("--mdt", type=float, default=None)
    p.add_argument("--mdt-list", type=_float_list, default=None)
    p.add_argument("--theta", type=float, default=None, help="fixed tilt (default: auto)")
    p.add_argument("--margin", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--out", default=None)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_gap_scan)
    registry["gap-scan"] = p

    p = sub.add_parser("evolve", help="position-space evolution trace")
    _add_common(p)
    p.add_argument("--sites", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--start", default="delta:0:r")
    p.add_argument("--norm-tol", type=float, default=NORM_DRIFT_LIMIT)
    p.add_argument(
        "--require-zone-edge",
        action="store_true",
        help="fail unless the momentum grid contains the zone edge (even N)",
    )
    p.set_defaults(func=cmd_evolve)
    registry["evolve"] = p

    p = sub.add_parser("circuit-verify", help="gate circuit vs second-quantised step")
    _add_common(p)
    p.add_argument("--sites", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_circuit_verify)
    registry["circuit-verify"] = p

    p = sub.add_parser("sea", help="pair-creation energy bookkeeping scenarios")
    _add_common(p)
    p.add_argument("--sites", type=int, default=64)
    p.add_argument("--eps1", type=float, default=0.1, help="target particle energy * dt")
    p.add_argument("--eps2", type=float, default=0.15, help="target hole energy * dt")
    p.add_argument("--scan", action="store_true", help="add the exhaustive pair minimum")
    p.set_defaults(func=cmd_sea)
    registry["sea"] = p

    p = sub.add_parser("dispersion3d", help="band slice of the 3+1-D walk")
    _add_common(p)
    p.add_argument("--fix", default="py=0,pz=0", help="e.g. py=0,pz=3.14159")
    p.add_argument("--grid", type=int, default=128)
    p.set_defaults(func=cmd_dispersion3d)
    registry["dispersion3d"] = p

    return parser, registry


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as handle:
        for line in handle:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"bad config line: {line!r}")
            key, _, value = line.partition("=")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(registry, values: dict) -> None:
    for sub in registry.values():
        defaults = {}
        for action in sub._actions:
            if action.dest in values:
                raw = values[action.dest]
                if action.type is not None:
                    defaults[action.dest] = action.type(raw)
                elif isinstance(action, argparse._StoreTrueAction):
                    defaults[action.dest] = raw.lower() in ("1", "true", "yes")
                else:
                    defaults[action.dest] = raw
        if defaults:
            sub.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    # apply config-file defaults before the real parse
    if "--config" in argv:
        at = argv.index("--config")
        if at + 1 >= len(argv):
            parser.error("--config needs a path")
        try:
            _apply_config(registry, _load_config(argv[at + 1]))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    args = parser.parse_args(argv)
    if getattr(args, "plot", False) and getattr(args, "out", None) is None:
        print("error: --plot requires --out", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except NumericalCheckError as exc:
        print(f"numerical check failed: {exc}", file=sys.stderr)
        return 3
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
