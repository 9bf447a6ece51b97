"""Bound states of delta and square wells, supercriticality and vacuum charge.

Sign convention: the well is ``V(x) = -V`` on |x| < a with ``V > 0``, so it
binds electrons.  A barrier of height V for electrons is the charge
conjugate of this well (it binds positrons); the formulas here carry over
with E -> -E.

Writing the even and odd conditions as

    even:  p a - phi_e(p) = j pi,   tan(phi_e) = sqrt((m-E)(E+V+m) / ((m+E)(E+V-m)))
    odd:   p a + phi_o(p) = j pi,   tan(phi_o) = sqrt((m+E)(E+V+m) / ((m-E)(E+V-m)))

gives one root per tangent branch.  Levels are labelled n = 2j + 1 (even)
and n = 2j (odd); level n leaves through E = -m at the critical depth
``supercritical_threshold(n, a)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import check_mass
from .errors import DomainError, NumericalFailure, SweepResolutionError


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class BoundState:
    """A square-well level.

    ``theta`` parametrizes the energy as ``E = -m cos(theta)``; it keeps
    ``m + E`` resolved even when that is far below the rounding of E itself
    (levels about to dive into the lower continuum).
    """

    parity: Parity
    index: int
    level: int
    energy: float
    momentum: float
    theta: float


@dataclass(frozen=True)
class ChargeLedger:
    """Charge bookkeeping in units where the electron charge is -1."""

    Q_p: int
    Q_0: int
    Q_S: int

    @property
    def Q_total(self) -> int:
        return self.Q_p + self.Q_0

    def to_dict(self) -> dict:
        return {"Q_p": self.Q_p, "Q_0": self.Q_0, "Q_S": self.Q_S, "Q_total": self.Q_total}


def bisect_secant(f: Callable[[float], float], lo: float, hi: float,
                  ftol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of ``f`` in a sign-changing bracket [lo, hi].

    Bisection shrinks the bracket by 2**-12, then secant steps take over;
    any secant step leaving the bracket falls back to bisection.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise DomainError(f"no sign change on [{lo}, {hi}]")
    width0 = hi - lo
    x_prev, f_prev = lo, flo
    x, fx = hi, fhi
    for it in range(maxiter):
        if it < 12 or hi - lo > width0 * 2.0 ** -12:
            x_new = 0.5 * (lo + hi)
        else:
            x_new = x - fx * (x - x_prev) / (fx - f_prev) if fx != f_prev else 0.5 * (lo + hi)
            if not lo < x_new < hi:
                x_new = 0.5 * (lo + hi)
        f_new = f(x_new)
        x_prev, f_prev, x, fx = x, fx, x_new, f_new
        if abs(f_new) < ftol or hi - lo <= 4.0 * math.ulp(max(abs(lo), abs(hi))):
            return x_new
        if (f_new > 0) == (flo > 0):
            lo, flo = x_new, f_new
        else:
            hi, fhi = x_new, f_new
    raise NumericalFailure(f"root refinement did not converge on [{lo}, {hi}]")


def _check_well(V: float, a: float, m: float) -> None:
    check_mass(m)
    if not V > 0:
        raise DomainError(f"well depth must be positive, got {V}")
    if not a > 0:
        raise DomainError(f"well half-width must be positive, got {a}")


def _momentum_range(V: float, m: float) -> tuple[float, float]:
    return math.sqrt(max(V * V - 2.0 * m * V, 0.0)), math.sqrt(V * V + 2.0 * m * V)


def _theta_range(V: float, m: float) -> tuple[float, float]:
    # E = -m cos(theta); bound energies run from max(-m, m - V) up to m
    if V >= 2.0 * m:
        return 0.0, math.pi
    return math.acos((V - m) / m), math.pi


def _phase(theta, V: float, a: float, m: float, parity: Parity):
    """Phase function of the even/odd condition with E = -m cos(theta).

    sqrt(m + E) and sqrt(m - E) are 2m sin^2 and 2m cos^2 of theta/2, so
    the phase stays smooth at both continuum edges.
    """
    s, c = np.sin(0.5 * theta), np.cos(0.5 * theta)
    evm = np.maximum(V - 2.0 * m * c * c, 0.0)
    evp = V + 2.0 * m * s * s
    p = np.sqrt(evm * evp)
    if parity is Parity.EVEN:
        return p * a - np.arctan2(c * np.sqrt(evp), s * np.sqrt(evm))
    return p * a + np.arctan2(s * np.sqrt(evp), c * np.sqrt(evm))


def _level(parity: Parity, j: int) -> int:
    return 2 * j + 1 if parity is Parity.EVEN else 2 * j


def _target(level: int) -> tuple[Parity, float]:
    if level % 2:
        return Parity.EVEN, (level - 1) // 2 * math.pi
    return Parity.ODD, level // 2 * math.pi


def bound_state_residual(state: BoundState, V: float, a: float, m: float = 1.0) -> float:
    """Residual of the even/odd tangent condition, scaled to be O(1).

    ``tan(p a) = A / B`` is checked as ``|sin(p a) B - cos(p a) A| / hypot(A, B)``
    so the poles of the tangent do not blow the residual up.  Everything is
    recomputed from ``state.theta``.
    """
    half = 0.5 * state.theta
    mpE, mmE = 2.0 * m * math.sin(half) ** 2, 2.0 * m * math.cos(half) ** 2
    evm, evp = max(V - mmE, 0.0), V + mpE
    p = math.sqrt(evm * evp)
    s, c = math.sin(p * a), math.cos(p * a)
    if state.parity is Parity.EVEN:
        A, B = math.sqrt(mmE * evp), math.sqrt(mpE * evm)
        return abs(s * B - c * A) / math.hypot(A, B)
    C, D = math.sqrt(mpE * evp), math.sqrt(mmE * evm)
    return abs(s * D + c * C) / math.hypot(C, D)


def _grid(V: float, a: float, m: float) -> np.ndarray:
    t_lo, t_hi = _theta_range(V, m)
    p_lo, p_hi = _momentum_range(V, m)
    n = max(257, 32 * int(math.ceil(p_hi * a / math.pi)) + 1)
    # uniform in p as well as in theta, so neither end is undersampled
    ps = np.linspace(p_lo, p_hi, n)
    cos_t = np.clip((V - np.sqrt(ps * ps + m * m)) / m, -1.0, 1.0)
    ts = np.concatenate([np.linspace(t_lo, t_hi, n), np.arccos(cos_t)])
    ts = np.unique(np.clip(ts, t_lo, t_hi))
    return ts


def _roots(V: float, a: float, m: float, parity: Parity) -> list[tuple[int, float]]:
    ts = _grid(V, a, m)
    n = len(ts)
    ph = _phase(ts, V, a, m, parity)
    j_first = 0 if parity is Parity.EVEN else 1
    j_min = max(j_first, int(math.ceil(ph.min() / math.pi)))
    j_max = int(math.floor(ph.max() / math.pi))
    out = []
    for j in range(j_min, j_max + 1):
        t = j * math.pi
        d = ph - t
        up = np.nonzero((d[:-1] < 0) & (d[1:] >= 0))[0]
        down = np.nonzero((d[:-1] > 0) & (d[1:] <= 0))[0]
        for i in sorted(np.concatenate([up, down])):
            if i + 1 == n - 1 and d[-1] == 0.0:
                continue  # root exactly on E = +m: not a bound state
            if d[i + 1] == 0.0:
                out.append((_level(parity, j), float(ts[i + 1])))
                continue
            f = lambda x: float(_phase(x, V, a, m, parity)) - t
            out.append((_level(parity, j), bisect_secant(f, float(ts[i]), float(ts[i + 1]))))
    return out


def well_bound_states(V: float, a: float, m: float = 1.0) -> list[BoundState]:
    """All bound states of the square well ``-V`` on |x| < a, highest energy first."""
    _check_well(V, a, m)
    found = []
    for parity in Parity:
        for level, theta in _roots(V, a, m, parity):
            E = -m * math.cos(theta)
            p = math.sqrt(max(E + V - m, 0.0) * (E + V + m))
            found.append((E, parity, level, p, theta))
    found.sort(key=lambda t: -t[0])
    return [BoundState(par, i + 1, lvl, E, p, th) for i, (E, par, lvl, p, th) in enumerate(found)]


def supercritical_threshold(N: int, a: float, m: float = 1.0) -> float:
    """Well depth at which level N reaches E = -m: m + sqrt(m^2 + N^2 pi^2 / 4a^2)."""
    check_mass(m)
    if N < 1:
        raise DomainError(f"level index must be >= 1, got {N}")
    if not a > 0:
        raise DomainError(f"well half-width must be positive, got {a}")
    return m + math.sqrt(m * m + (N * math.pi / (2.0 * a)) ** 2)


def supercritical_count(V: float, a: float, m: float = 1.0) -> int:
    """Closed form Int[(2a/pi) sqrt(V^2 - 2mV)], zero for V <= 2m."""
    if V <= 2.0 * m:
        return 0
    return int(math.floor(2.0 * a / math.pi * math.sqrt(V * V - 2.0 * m * V)))


def positron_bound(V: float, a: float, m: float = 1.0) -> int:
    """Int[(2a/pi) sqrt(V^2 - m^2)], which lies in [Q_p - 1, Q_p]."""
    if V <= m:
        return 0
    return int(math.floor(2.0 * a / math.pi * math.sqrt(V * V - m * m)))


def well_ledger(V: float, a: float, m: float = 1.0) -> ChargeLedger:
    """Charge ledger of the square well switched on adiabatically from the vacuum.

    Q_p counts bound levels below E = 0 plus the levels already gone through
    E = -m (the missing lowest labels); Q_S is the closed form.
    """
    states = well_bound_states(V, a, m)
    dived = min(s.level for s in states) - 1
    Q_p = sum(1 for s in states if s.energy < 0) + dived
    bound = positron_bound(V, a, m)
    if not Q_p - 1 <= bound <= Q_p:
        raise NumericalFailure(f"root count Q_p={Q_p} violates Q_p-1 <= {bound} <= Q_p")
    return ChargeLedger(Q_p, -Q_p, supercritical_count(V, a, m))


def delta_well_energy(lam: float, m: float = 1.0) -> tuple[Parity, float]:
    """Single bound state of -lam delta(x): even E = m cos lam, odd E = -m cos lam.

    The state is even while Int[lam/pi] is even; at each multiple of pi the
    level leaves through E = -m and a state of the other parity enters at
    E = +m.
    """
    check_mass(m)
    if not lam > 0:
        raise DomainError(f"delta strength must be positive, got {lam}")
    if math.floor(lam / math.pi) % 2 == 0:
        return Parity.EVEN, m * math.cos(lam)
    return Parity.ODD, -m * math.cos(lam)


def delta_ledger(lam: float) -> ChargeLedger:
    if lam < 0:
        raise DomainError(f"delta strength must be non-negative, got {lam}")
    Q_p = int(math.floor(lam / math.pi + 0.5))
    return ChargeLedger(Q_p, -Q_p, int(math.floor(lam / math.pi)))


class EventKind(enum.Enum):
    APPEARS = "state-appears"
    CROSSES_ZERO = "crosses-zero"
    SUPERCRITICAL = "goes-supercritical"


@dataclass(frozen=True)
class SweepEvent:
    """One spectral event; ``V`` is the well depth (lambda for the delta well)."""

    V: float
    event: EventKind
    parity: Parity
    N: int
    E: float
    ledger: ChargeLedger
    note: str = ""

    def to_dict(self) -> dict:
        d = {"V": self.V, "event": self.event.value, "parity": self.parity.value,
             "N": self.N, "E": self.E, "ledger": self.ledger.to_dict()}
        if self.note:
            d["note"] = self.note
        return d


_MAX_REFINE = 10


def _level_present(V: float, a: float, m: float, level: int) -> bool:
    if V <= 0:
        return level == 1
    parity, t = _target(level)
    t_lo, t_hi = _theta_range(V, m)
    return float(_phase(t_lo, V, a, m, parity)) < t < float(_phase(t_hi, V, a, m, parity))


def _level_negative(V: float, a: float, m: float, level: int) -> bool:
    if V <= m or not _level_present(V, a, m, level):
        return False
    parity, t = _target(level)
    return float(_phase(0.5 * math.pi, V, a, m, parity)) > t


def _locate(pred: Callable[[float], bool], lo: float, hi: float) -> float:
    """Smallest V in (lo, hi] where ``pred`` differs from pred(lo), by bisection."""
    base = pred(lo)
    for _ in range(200):
        if hi - lo <= 1e-13 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if pred(mid) == base:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass
class _SweepState:
    levels: dict[int, float] = field(default_factory=dict)
    Q_p: int = 0
    Q_S: int = 0

    def ledger(self) -> ChargeLedger:
        return ChargeLedger(self.Q_p, -self.Q_p, self.Q_S)


def _spectrum_map(V: float, a: float, m: float) -> dict[int, float]:
    return {s.level: s.energy for s in well_bound_states(V, a, m)}


def _diff(prev: dict[int, float], cur: dict[int, float]) -> list[tuple[EventKind, int]]:
    out = []
    top = max(prev) if prev else 0
    for lvl in cur:
        if lvl not in prev and lvl > top:
            out.append((EventKind.APPEARS, lvl))
            if cur[lvl] < 0:
                out.append((EventKind.CROSSES_ZERO, lvl))
    for lvl, E in prev.items():
        crossed_before = E < 0
        if lvl in cur:
            if not crossed_before and cur[lvl] < 0:
                out.append((EventKind.CROSSES_ZERO, lvl))
        else:
            if not crossed_before:
                out.append((EventKind.CROSSES_ZERO, lvl))
            out.append((EventKind.SUPERCRITICAL, lvl))
    return out


def adiabatic_sweep(a: float, m: float = 1.0, V_max: float = 3.0, dV: float = 0.01) -> list[SweepEvent]:
    """Switch the square well on from V = 0 to ``V_max`` and log spectral events.

    The ground state born with the well at V = 0+ is part of the initial
    configuration and is not logged.  Each step is checked for at most one
    event; crowded steps are halved up to ``dV/1024`` before giving up with
    :class:`SweepResolutionError`.  Event depths are then pinned by bisection.
    """
    check_mass(m)
    if not dV > 0:
        raise DomainError(f"step dV must be positive, got {dV}")
    if not a > 0:
        raise DomainError(f"well half-width must be positive, got {a}")
    events: list[SweepEvent] = []
    if V_max <= 0:
        return events
    state = _SweepState(levels={1: m})

    def emit(kind: EventKind, lvl: int, lo: float, hi: float) -> None:
        if kind is EventKind.CROSSES_ZERO:
            V = _locate(lambda v: _level_negative(v, a, m, lvl), lo, hi)
            state.Q_p += 1
            E = 0.0
        else:
            V = _locate(lambda v: _level_present(v, a, m, lvl), lo, hi)
            if kind is EventKind.SUPERCRITICAL:
                state.Q_S += 1
                E = -m
            else:
                E = float(m)
        parity, _ = _target(lvl)
        events.append(SweepEvent(V, kind, parity, lvl, E, state.ledger()))

    def step(lo: float, hi: float, prev: dict[int, float], depth: int) -> dict[int, float]:
        cur = _spectrum_map(hi, a, m)
        found = _diff(prev, cur)
        if len(found) <= 1:
            for kind, lvl in found:
                emit(kind, lvl, lo, hi)
            return cur
        if depth >= _MAX_REFINE:
            raise SweepResolutionError(
                f"{len(found)} events within [{lo}, {hi}] after {depth} refinements", diagnostic=hi - lo)
        mid = 0.5 * (lo + hi)
        prev = step(lo, mid, prev, depth + 1)
        return step(mid, hi, prev, depth + 1)

    n_steps = int(math.ceil(V_max / dV - 1e-12))
    prev = state.levels
    lo = 0.0
    for k in range(1, n_steps + 1):
        hi = min(k * dV, V_max)
        prev = step(lo, hi, prev, 0)
        lo = hi
    return events


def adiabatic_sweep_delta(lam_max: float, dlam: float = 0.01, m: float = 1.0) -> list[SweepEvent]:
    """Same bookkeeping for the delta well, parameterized by its strength lambda.

    At each multiple of pi the bound level reaches E = -m and the state of the
    other parity enters at E = +m; this is logged as one supercritical event
    with a parity-handover note.
    """
    check_mass(m)
    if not dlam > 0:
        raise DomainError(f"step must be positive, got {dlam}")
    events: list[SweepEvent] = []
    if lam_max <= 0:
        return events
    Q_p = Q_S = 0
    n_steps = int(math.ceil(lam_max / dlam - 1e-12))
    lo = 0.0
    prev_par, prev_E = Parity.EVEN, m
    for k in range(1, n_steps + 1):
        hi = min(k * dlam, lam_max)
        par, E = delta_well_energy(hi, m)
        dove = par is not prev_par
        crossed = (prev_E >= 0 and E < 0) or (dove and prev_E >= 0)
        if dove and crossed:
            raise SweepResolutionError(f"two events within [{lo}, {hi}]", diagnostic=hi - lo)
        if crossed:
            lam = _locate(lambda x: delta_well_energy(x, m)[1] < 0, lo, hi)
            Q_p += 1
            events.append(SweepEvent(lam, EventKind.CROSSES_ZERO, prev_par, Q_p, 0.0,
                                     ChargeLedger(Q_p, -Q_p, Q_S)))
        if dove:
            lam = _locate(lambda x: delta_well_energy(x, m)[0] is not prev_par, lo, hi)
            Q_S += 1
            events.append(SweepEvent(lam, EventKind.SUPERCRITICAL, prev_par, Q_S, -m,
                                     ChargeLedger(Q_p, -Q_p, Q_S),
                                     note=f"parity handover {prev_par.value}->{par.value}"))
        prev_par, prev_E = par, E
        lo = hi
    return events
