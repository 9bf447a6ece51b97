"""Command-line front end.

Exit status: 0 on success, 2 for bad input, 3 when a computation could not
be trusted.  Errors go to stderr as a single line.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import analytic, spectrum, transfer, vacuum
from .dsl import load_potential
from .errors import DomainError, KleinError, NumericalFailure
from .output import to_csv, to_json, to_json_lines

BUILTINS = ("step", "barrier", "well", "sauter", "free")


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def _common(p: argparse.ArgumentParser, V: float = 5.0) -> None:
    p.add_argument("--m", type=float, default=1.0, help="fermion mass (default 1)")
    p.add_argument("--V", type=float, default=V, help=f"step/barrier height or well depth (default {V:g})")
    p.add_argument("--a", type=float, default=1.0, help="barrier or well half-width (default 1)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write output to this file instead of stdout")


def _potential_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--potential", default="step",
                   help="step, barrier, well, sauter, free, or a potential file")
    p.add_argument("--v", type=float, default=0.5, help="sauter field strength (default 0.5)")
    p.add_argument("--L", type=float, default=None, help="sauter ramp length (default 10/v)")
    p.add_argument("--n", type=int, default=400, help="sauter staircase segments (default 400)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="klein", description="1D Dirac scattering, bound states and pair production")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("scatter", help="R and T at one energy")
    _common(p)
    _potential_args(p)
    p.add_argument("--E", type=float, default=1.5)
    p.add_argument("--numeric", action="store_true", help="use the transfer-matrix engine")

    p = sub.add_parser("sweep", help="R(E), T(E) table")
    _common(p)
    _potential_args(p)
    p.add_argument("--emin", type=float, default=None)
    p.add_argument("--emax", type=float, default=None)
    p.add_argument("--esteps", type=int, default=200)
    p.add_argument("--numeric", action="store_true")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("spectrum", help="bound states and charge ledger")
    _common(p, V=3.0)
    p.add_argument("--well", action="store_true", help="square well (the default)")
    p.add_argument("--delta", action="store_true", help="delta well of strength --lam")
    p.add_argument("--lam", type=float, default=1.0)

    p = sub.add_parser("adiabatic", help="event log while the well deepens")
    _common(p, V=3.0)
    p.add_argument("--dV", type=float, default=0.01)
    p.add_argument("--delta", action="store_true")
    p.add_argument("--lam", type=float, default=7.0)
    p.add_argument("--dlam", type=float, default=0.01)

    p = sub.add_parser("current", help="vacuum pair-production current")
    _common(p)
    _potential_args(p)
    p.add_argument("--esteps", type=int, default=200, help="integrand grid for --format csv")
    p.add_argument("--mode-integrals", action="store_true",
                   help="also integrate the L and R mode currents (step only)")

    p = sub.add_parser("modes", help="Klein-zone L and R mode components on an x grid")
    _common(p)
    p.add_argument("--E", type=float, default=1.5)
    p.add_argument("--xmin", type=float, default=-5.0)
    p.add_argument("--xmax", type=float, default=5.0)
    p.add_argument("--xsteps", type=int, default=101)

    p = sub.add_parser("emission", help="supercritical emission estimates")
    _common(p, V=2.02)
    p.set_defaults(a=50.0)

    p = sub.add_parser("coulomb", help="Coulomb penetration ratio")
    p.add_argument("--Z", type=float, default=137.036)
    p.add_argument("--regime", choices=[r.value for r in analytic.CoulombRegime], default="relativistic")
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--f-prefactor", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=analytic.ALPHA_FS)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("resonances", help="barrier transmission resonances")
    _common(p)
    return ap


def _profile(args) -> transfer.PotentialProfile:
    name, m = args.potential, args.m
    if name == "step":
        return transfer.step_profile(args.V, m)
    if name == "barrier":
        return transfer.barrier_profile(args.V, args.a, m)
    if name == "well":
        return transfer.barrier_profile(-args.V, args.a, m)
    if name == "free":
        return transfer.build_profile(0.0, 0.0, (), m)
    if name == "sauter":
        if not args.v > 0:
            raise DomainError(f"--v must be positive, got {args.v}")
        L = args.L if args.L is not None else 10.0 / args.v
        return transfer.sauter_profile(args.v, L, args.n, m)
    try:
        return load_potential(name).profile()
    except OSError as exc:
        raise DomainError(f"cannot read potential '{name}': {exc.strerror}") from None


def _point(args, E: float):
    """(R, T, kappa) at E, closed form when available unless --numeric."""
    if not args.numeric:
        if args.potential == "step":
            r = analytic.step_scatter(E, args.V, args.m)
            return r.R, r.T, r.kappa, r.resonance
        if args.potential in ("barrier", "well"):
            V = args.V if args.potential == "barrier" else -args.V
            r = analytic.barrier_scatter(E, V, args.a, args.m)
            return r.R, r.T, r.kappa, r.resonance
    r = transfer.scatter_numeric(_profile(args), E)
    return r.R, r.T, r.kappa, r.resonance


def cmd_scatter(args):
    R, T, kappa, res = _point(args, args.E)
    rec = {"E": args.E, "kappa": kappa, "R": R, "T": T, "resonance": res,
           "method": "transfer" if args.numeric or args.potential not in ("step", "barrier", "well")
           else "closed-form"}
    if args.format == "csv":
        return to_csv(list(rec), [list(rec.values())])
    return to_json(rec)


def cmd_sweep(args):
    if args.esteps < 2:
        raise DomainError(f"--esteps must be at least 2, got {args.esteps}")
    emin = args.emin if args.emin is not None else args.m * 1.001
    emax = args.emax if args.emax is not None else args.m + 2.0 * abs(args.V) + 2.0 * args.m
    rows, skipped = [], []
    if args.numeric or args.potential not in ("step", "barrier", "well"):
        rep = transfer.transmission_sweep(_profile(args), emin, emax, args.esteps, workers=args.workers)
        rows = [(r.E, r.R, r.T) for r in rep.results]
        skipped = [(f.E, f.message) for f in rep.failures]
    else:
        for E in transfer.energy_grid(emin, emax, args.esteps):
            E = float(E)
            try:
                R, T, _, _ = _point(args, E)
            except DomainError as exc:
                skipped.append((E, str(exc)))
                continue
            rows.append((E, R, T))
    for E, msg in skipped:
        print(f"skipped E={E!r}: {msg}", file=sys.stderr)
    if args.format == "csv":
        return to_csv(["E", "R", "T"], rows)
    return to_json({"E": [r[0] for r in rows], "R": [r[1] for r in rows], "T": [r[2] for r in rows],
                    "skipped": [E for E, _ in skipped]})


def cmd_spectrum(args):
    if args.delta:
        parity, E = spectrum.delta_well_energy(args.lam, args.m)
        led = spectrum.delta_ledger(args.lam)
        states = [{"parity": parity.value, "level": 1, "energy": E}]
    else:
        found = spectrum.well_bound_states(args.V, args.a, args.m)
        led = spectrum.well_ledger(args.V, args.a, args.m)
        states = [{"index": s.index, "level": s.level, "parity": s.parity.value, "energy": s.energy,
                   "momentum": s.momentum} for s in found]
    if args.format == "csv":
        cols = list(states[0]) if states else ["index", "level", "parity", "energy", "momentum"]
        return to_csv(cols, [list(s.values()) for s in states])
    return to_json({"states": states, "count": len(states), "ledger": led})


def cmd_adiabatic(args):
    if args.delta:
        events = spectrum.adiabatic_sweep_delta(args.lam, args.dlam, args.m)
    else:
        events = spectrum.adiabatic_sweep(args.a, args.m, args.V, args.dV)
    if args.format == "csv":
        cols = ["V", "event", "parity", "N", "E", "Q_p", "Q_0", "Q_S", "Q_total"]
        return to_csv(cols, [[e.V, e.event, e.parity, e.N, e.E, e.ledger.Q_p, e.ledger.Q_0,
                              e.ledger.Q_S, e.ledger.Q_total] for e in events])
    return to_json_lines(events)


def cmd_current(args):
    if args.potential == "step":
        rep = vacuum.pair_current(args.V, args.m, mode_integrals=args.mode_integrals)
        T = lambda E: vacuum.step_transmission(E, args.V, args.m)
    else:
        prof = _profile(args)
        rep = vacuum.pair_current(profile=prof)
        T = lambda E: transfer.scatter_numeric(prof, E).T
    if args.format == "csv":
        lo, hi = rep.E_range
        if rep.subcritical:
            return to_csv(["E", "T", "integrand"], [])
        Es = lo + (hi - lo) * (np.arange(args.esteps) + 0.5) / args.esteps
        rows = []
        for E in Es:
            t = T(float(E))
            rows.append((float(E), t, -t / (2.0 * math.pi)))
        return to_csv(["E", "T", "integrand"], rows)
    return to_json(rep)


def cmd_modes(args):
    uL, uR = vacuum.klein_modes(args.E, args.V, args.m)
    if args.xsteps < 1:
        raise DomainError(f"--xsteps must be positive, got {args.xsteps}")
    xs = np.linspace(args.xmin, args.xmax, args.xsteps)
    rows = []
    for x in xs:
        x = float(x)
        a, b = uL.spinor_at(x), uR.spinor_at(x)
        rows.append([x, a.upper.real, a.upper.imag, a.lower.real, a.lower.imag,
                     b.upper.real, b.upper.imag, b.lower.real, b.lower.imag,
                     vacuum.mode_current(uL, x), vacuum.mode_current(uR, x)])
    cols = ["x", "L_up_re", "L_up_im", "L_lo_re", "L_lo_im",
            "R_up_re", "R_up_im", "R_lo_re", "R_lo_im", "j_L", "j_R"]
    if args.format == "csv":
        return to_csv(cols, rows)
    return to_json({"E": args.E, "V": args.V, "kappa": uL.kappa,
                    "rows": [dict(zip(cols, r)) for r in rows]})


def cmd_emission(args):
    est = vacuum.emission_estimates(args.V, args.a, args.m)
    if args.format == "csv":
        return to_csv(["N", "E_N"], [(i + 1, e) for i, e in enumerate(est.E_N)])
    return to_json(est)


def cmd_coulomb(args):
    r = analytic.coulomb_penetration(args.Z, args.regime, args.E, args.p, args.f_prefactor, args.alpha)
    if args.format == "csv":
        return to_csv(["Z", "alpha", "regime", "rho", "f"], [[r.Z, r.alpha, r.regime, r.rho, r.f]])
    return to_json(r)


def cmd_resonances(args):
    Es = analytic.resonance_energies(args.V, args.a, args.m)
    if args.format == "csv":
        return to_csv(["N", "E"], [(i + 1, e) for i, e in enumerate(Es)])
    return to_json({"V": args.V, "a": args.a, "resonances": [{"N": i + 1, "E": e} for i, e in enumerate(Es)]})


COMMANDS = {
    "scatter": cmd_scatter, "sweep": cmd_sweep, "spectrum": cmd_spectrum,
    "adiabatic": cmd_adiabatic, "current": cmd_current, "modes": cmd_modes,
    "emission": cmd_emission, "coulomb": cmd_coulomb, "resonances": cmd_resonances,
}


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    base = os.environ.get("KLEIN_OUTPUT_DIR")
    if base and not os.path.isabs(out):
        out = os.path.join(base, out)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _ArgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        text = COMMANDS[args.command](args)
        _write(text, args.out)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except KleinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # never show a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
