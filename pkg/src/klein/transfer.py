"""Transfer-matrix scattering through piecewise-constant potentials.

The profile is a left level, a list of contiguous flat segments and a right
level.  Spinor continuity is imposed at every interface (the equation is
first order, so no derivative matching).  The solution is built from the
right: a unit outgoing wave in the last region is carried leftwards one
interface at a time and the incident/reflected amplitudes are read off in
the first region.  Growth through evanescent segments is factored out and
accumulated as a logarithm, so arbitrarily wide barriers do not overflow.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import Channel, check_mass, momentum_branch, spinor_current
from .errors import (DomainError, KleinError, NoChannelError, NumericalFailure,
                     ProfileError, ThresholdError)

#: interface matrices worse than this are reported as a numerical failure
COND_LIMIT = 1e12


class Segment(NamedTuple):
    x_start: float
    x_end: float
    V: float


@dataclass(frozen=True)
class PotentialProfile:
    """Flat levels V(-inf) and V(+inf) joined by contiguous flat segments.

    With no segments the profile is a single step at x = 0.
    """

    left_level: float
    right_level: float
    segments: tuple[Segment, ...] = ()
    mass: float = 1.0

    @property
    def delta_V(self) -> float:
        return self.right_level - self.left_level

    @property
    def interfaces(self) -> list[float]:
        if not self.segments:
            return [0.0]
        return [self.segments[0].x_start] + [s.x_end for s in self.segments]

    @property
    def levels(self) -> list[float]:
        return [self.left_level] + [s.V for s in self.segments] + [self.right_level]

    def reversed(self) -> PotentialProfile:
        """Mirror image x -> -x (left and right levels exchanged)."""
        segs = tuple(Segment(-s.x_end, -s.x_start, s.V) for s in reversed(self.segments))
        return PotentialProfile(self.right_level, self.left_level, segs, self.mass)

    def potential(self, x: float) -> float:
        if not self.segments:
            return self.left_level if x < 0 else self.right_level
        if x < self.segments[0].x_start:
            return self.left_level
        for s in self.segments:
            if x < s.x_end:
                return s.V
        return self.right_level


def build_profile(left_level: float, right_level: float,
                  segments: Sequence[Sequence[float]] = (), mass: float = 1.0) -> PotentialProfile:
    """Validate and normalize a segment list into a :class:`PotentialProfile`.

    Segments are sorted by start; gaps, overlaps and reversed segments raise
    :class:`ProfileError` carrying the index of the offending segment in the
    caller's ordering.
    """
    check_mass(mass)
    for name, val in (("left level", left_level), ("right level", right_level)):
        if not math.isfinite(val):
            raise DomainError(f"{name} must be finite, got {val}")
    segs = []
    for i, s in enumerate(segments):
        if len(s) != 3:
            raise ProfileError(f"segment {i} needs (x_start, x_end, V), got {tuple(s)}", i)
        x0, x1, v = (float(t) for t in s)
        if not all(math.isfinite(t) for t in (x0, x1, v)):
            raise ProfileError(f"segment {i} has a non-finite entry", i)
        if not x0 < x1:
            raise ProfileError(f"segment {i} is reversed or empty ({x0} >= {x1})", i)
        segs.append((x0, x1, v, i))
    segs.sort(key=lambda t: (t[0], t[3]))
    for prev, cur in zip(segs, segs[1:]):
        if cur[0] < prev[1]:
            raise ProfileError(f"segment {cur[3]} overlaps segment {prev[3]}", cur[3])
        if cur[0] > prev[1]:
            raise ProfileError(f"gap between segment {prev[3]} and segment {cur[3]}", cur[3])
    return PotentialProfile(float(left_level), float(right_level),
                            tuple(Segment(x0, x1, v) for x0, x1, v, _ in segs), float(mass))


def staircase(x0: float, x1: float, V0: float, V1: float, n: int) -> list[Segment]:
    """n equal-width segments sampling the ramp V0 -> V1 at their midpoints."""
    if n < 1:
        raise DomainError(f"staircase needs at least one step, got {n}")
    if not x1 > x0:
        raise DomainError(f"staircase needs x1 > x0, got [{x0}, {x1}]")
    edges = [x0 + (x1 - x0) * i / n for i in range(n)] + [x1]
    return [Segment(edges[i], edges[i + 1], V0 + (V1 - V0) * (i + 0.5) / n) for i in range(n)]


def step_profile(V: float, m: float = 1.0) -> PotentialProfile:
    return build_profile(0.0, V, (), m)


def barrier_profile(V: float, a: float, m: float = 1.0) -> PotentialProfile:
    return build_profile(0.0, 0.0, [(-a, a, V)], m)


def sauter_profile(v: float, L: float, n: int, m: float = 1.0) -> PotentialProfile:
    """Staircase stand-in for the ramp V = v x on 0 < x < L."""
    return build_profile(0.0, v * L, staircase(0.0, L, 0.0, v * L, n), m)


@dataclass(frozen=True)
class TransferResult:
    """Numerical scattering result; amplitudes follow :class:`ScatteringResult`.

    Phases of ``B`` are referred to the first interface and those of ``F``
    to the last one.  ``flux_residual`` is |R + T - 1|, i.e. the mismatch
    between the currents in the outermost regions relative to the incident
    current.
    """

    E: float
    R: float
    T: float
    kappa: float | None
    B: complex
    F: complex
    resonance: bool
    matrix_cond: float
    n_segments: int
    klein: bool
    flux_residual: float


def _regions(profile: PotentialProfile, E: float):
    m = profile.mass
    out = []
    levels = profile.levels
    widths = [0.0] + [s.x_end - s.x_start for s in profile.segments] + [0.0]
    for idx, (V, w) in enumerate(zip(levels, widths)):
        q, ch = momentum_branch(E, V, m)
        if ch is Channel.THRESHOLD:
            raise ThresholdError(f"E={E} is on a threshold of region {idx} (V={V})", E, V)
        lo = E - V - m
        nrm = math.hypot(abs(q), lo)
        up = 1j * q / nrm
        lo = lo / nrm
        # right-moving (i q, lo) and left-moving (-i q, lo) columns
        out.append((q, ch, w, up, lo, nrm))
    return out


def scatter_numeric(profile: PotentialProfile, E: float) -> TransferResult:
    """R and T for a unit wave incident from the left at energy ``E``.

    "Incident" means positive group velocity, so a hole region on the left
    (or right) uses the negative-momentum branch.  R and T are ratios of the
    conserved current ``-psi^dagger sigma_y psi``.
    """
    regs = _regions(profile, E)
    ch0 = regs[0][1]
    if not ch0.propagating:
        raise NoChannelError(f"no propagating incident wave at E={E} (V_left={profile.left_level})")
    chN = regs[-1][1]

    a, b = 1.0 + 0j, 0j
    log_scale = 0.0
    worst = 1.0
    for r in range(len(regs) - 2, -1, -1):
        qn, chn, wn, upn, lon, _ = regs[r + 1]
        if chn.propagating:
            ph = cmath.exp(1j * qn.real * wn)
            ca, cb = a / ph, b * ph
        else:
            g = qn.imag * wn
            ca, cb = a, b * math.exp(-2.0 * g)
            log_scale += g
        # psi at the interface from the right-hand region
        c1 = (ca - cb) * upn
        c2 = (ca + cb) * lon
        _, _, _, up, lo, _ = regs[r]
        # M = [[up, -up], [lo, lo]] = diag(up, lo) [[1, -1], [1, 1]]
        cond = max(abs(up), abs(lo)) / min(abs(up), abs(lo))
        if cond > worst:
            worst = cond
        if cond > COND_LIMIT:
            raise NumericalFailure(f"ill-conditioned interface matrix at region {r} (cond={cond:.3g})",
                                   diagnostic=cond)
        det = 2.0 * up * lo
        a = (lo * c1 + up * c2) / det
        b = (-lo * c1 + up * c2) / det
        nrm = max(abs(a), abs(b))
        if nrm == 0.0 or not math.isfinite(nrm):
            raise NumericalFailure(f"transfer vector degenerated at region {r}", diagnostic=worst)
        a /= nrm
        b /= nrm
        log_scale += math.log(nrm)

    j0 = spinor_current(regs[0][3], regs[0][4])
    R = abs(b / a) ** 2
    if chN.propagating:
        jN = spinor_current(regs[-1][3], regs[-1][4])
        T = (jN / j0) * math.exp(-2.0 * (log_scale + math.log(abs(a))))
        flux = abs(R + T - 1.0)
    else:
        T = 0.0
        flux = abs(R - 1.0)
    B = b / a
    F = (regs[0][5] / regs[-1][5]) * math.exp(-log_scale) / a

    m = profile.mass
    kappa = None
    chans = [rg[1] for rg in regs]
    if chN.propagating:
        epsL = E - profile.left_level
        epsR = E - profile.right_level
        k2 = (epsR - m) * (epsL + m) / ((epsR + m) * (epsL - m))
        if k2 > 0:
            kappa = math.sqrt(k2)
    klein = (Channel.HOLE in chans) and (Channel.PARTICLE in chans)
    return TransferResult(E, R, T, kappa, complex(B), complex(F), abs(T - 1.0) <= 1e-9,
                          worst, len(profile.segments), klein, flux)


@dataclass(frozen=True)
class SweepFailure:
    E: float
    kind: str
    message: str


@dataclass
class SweepReport:
    results: list[TransferResult] = field(default_factory=list)
    failures: list[SweepFailure] = field(default_factory=list)


def _scatter_or_failure(profile: PotentialProfile, E: float):
    try:
        return scatter_numeric(profile, E)
    except ThresholdError as exc:
        return SweepFailure(E, "threshold", str(exc))
    except NoChannelError as exc:
        return SweepFailure(E, "no-channel", str(exc))
    except KleinError as exc:
        return SweepFailure(E, "numerical", str(exc))


def energy_grid(E_min: float, E_max: float, n_points: int) -> np.ndarray:
    if not E_min < E_max:
        raise DomainError(f"sweep needs E_min < E_max, got [{E_min}, {E_max}]")
    if n_points < 2:
        raise DomainError(f"sweep needs at least two points, got {n_points}")
    return np.linspace(E_min, E_max, n_points)


def transmission_sweep(profile: PotentialProfile, E_min: float, E_max: float,
                       n_points: int, workers: int | None = None) -> SweepReport:
    """Evaluate :func:`scatter_numeric` on an ascending uniform energy grid.

    Points that fail (thresholds, closed incident channel, numerical
    trouble) are collected in ``failures`` and do not stop the sweep.  With
    ``workers`` the points run on a thread pool; output order and values are
    identical to the sequential run.
    """
    Es = [float(E) for E in energy_grid(E_min, E_max, n_points)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(lambda E: _scatter_or_failure(profile, E), Es))
    else:
        outs = [_scatter_or_failure(profile, E) for E in Es]
    report = SweepReport()
    for o in outs:
        (report.failures if isinstance(o, SweepFailure) else report.results).append(o)
    return report


@dataclass(frozen=True)
class PhaseAverage:
    """Barrier transmission sampled over one period of the phase 2 p a."""

    harmonic_T: float
    arithmetic_T: float
    min_R: float
    period: float
    samples: int


def phase_averaged_transmission(E: float, V: float, a0: float, m: float = 1.0,
                                samples: int = 64) -> PhaseAverage:
    """Average numerical barrier T over half-widths a0 <= a < a0 + pi / 2p.

    The harmonic mean 1 / <1/T> is the average that corresponds to setting
    sin^2(2pa) to 1/2 in the closed form, i.e. the wide-barrier limit; the
    arithmetic mean of T is reported alongside and is larger.
    """
    q, ch = momentum_branch(E, V, m)
    if not ch.propagating:
        raise DomainError(f"no oscillation under the barrier at E={E}, V={V}")
    period = math.pi / (2.0 * abs(q.real))
    Ts, Rs = [], []
    for i in range(samples):
        a = a0 + period * (i + 0.5) / samples
        res = scatter_numeric(barrier_profile(V, a, m), E)
        Ts.append(res.T)
        Rs.append(res.R)
    Ts = np.array(Ts)
    return PhaseAverage(float(1.0 / np.mean(1.0 / Ts)), float(np.mean(Ts)),
                        float(min(Rs)), period, samples)


@dataclass(frozen=True)
class StaircaseConvergence:
    T: float
    n_star: int
    history: tuple[tuple[int, float], ...]


def converge_staircase(E: float, v: float, L: float, m: float = 1.0, n_start: int = 100,
                       tol: float = 1e-6, n_max: int = 1 << 18) -> StaircaseConvergence:
    """Double the staircase resolution until |T(2n) - T(n)| < tol.

    ``n_star`` is the first resolution whose transmission moved by less than
    ``tol`` from the previous (half as fine) one.
    """
    n = n_start
    hist = [(n, scatter_numeric(sauter_profile(v, L, n, m), E).T)]
    while True:
        n *= 2
        if n > n_max:
            raise NumericalFailure(f"staircase did not converge to {tol} by n={n_max}",
                                   diagnostic=abs(hist[-1][1] - hist[-2][1]) if len(hist) > 1 else None)
        T = scatter_numeric(sauter_profile(v, L, n, m), E).T
        hist.append((n, T))
        if abs(T - hist[-2][1]) < tol:
            return StaircaseConvergence(T, n, tuple(hist))
