"""Klein-zone normal modes, the pair-production current and emission estimates.

In the Klein zone m < E < V - m of a step of height V the vacuum carries a
steady current

    <0|j|0> = (1/2) int dE (-j_L + j_R) = -(1/2 pi) int dE T(E)

where j_L and j_R are the currents of the two energy-normalized modes with
no reflected wave.  The current is negative in the convention where the
electron charge is -1.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .analytic import resonance_energies
from .core import Spinor, check_mass, spinor_current
from .errors import DomainError, NumericalFailure, ThresholdError
from .spectrum import supercritical_count
from .transfer import PotentialProfile, scatter_numeric

#: continuity mismatch accepted at x = 0 away from the Klein-zone edges
CONTINUITY_TOL = 1e-12


class ModeKind(enum.Enum):
    L = "L"
    R = "R"


class ModeComponent(NamedTuple):
    """One plane wave ``(upper, lower) * exp(i q x)``."""

    q: float
    upper: complex
    lower: complex


@dataclass(frozen=True)
class KleinMode:
    """Energy-normalized Klein-zone mode of the step V(x) = V theta(x).

    ``L`` is fed from the left with no reflected wave on x < 0; ``R`` is fed
    from the right with nothing reflected on x > 0.  ``left`` and ``right``
    hold the plane waves on either side of the step, ``1/sqrt(2 pi)``
    included.
    """

    kind: ModeKind
    E: float
    V: float
    m: float
    k: float
    p_abs: float
    kappa: float
    left: tuple[ModeComponent, ...]
    right: tuple[ModeComponent, ...]

    def spinor_at(self, x: float) -> Spinor:
        up = lo = 0j
        for c in (self.left if x < 0 else self.right):
            ph = cmath.exp(1j * c.q * x)
            up += c.upper * ph
            lo += c.lower * ph
        return Spinor(up, lo)

    def continuity_residual(self) -> float:
        """|psi(0-) - psi(0+)| relative to the size of the waves being summed.

        Near the Klein-zone edges the waves on one side nearly cancel at
        x = 0, so |psi(0)| alone would turn rounding into a false mismatch.
        """
        a = (sum(c.upper for c in self.left), sum(c.lower for c in self.left))
        b = (sum(c.upper for c in self.right), sum(c.lower for c in self.right))
        diff = math.hypot(abs(a[0] - b[0]), abs(a[1] - b[1]))
        scale = max(math.hypot(abs(c.upper), abs(c.lower)) for c in self.left + self.right)
        return diff / scale

    def amplitude_ratio(self) -> complex:
        """Second-to-first amplitude ratio on the side with two waves."""
        c = self.right if self.kind is ModeKind.L else self.left
        return c[0].upper / c[1].upper


def _klein_zone(E: float, V: float, m: float) -> None:
    check_mass(m)
    if not m < E < V - m:
        raise DomainError(f"E={E} is outside the Klein range ({m}, {V - m})")


def klein_modes(E: float, V: float, m: float = 1.0) -> tuple[KleinMode, KleinMode]:
    """Build the L and R modes at energy E for a step of height V.

    On x < 0 the waves are ``(i, +-k/(E+m)) exp(+-i k x)``; on x > 0 they are
    ``(i, +-|p|/(E+m-V)) exp(+-i|p| x)``.  The x > 0 wave with ``exp(-i|p| x)``
    moves right (hole branch).
    """
    _klein_zone(E, V, m)
    k = math.sqrt((E - m) * (E + m))
    p = math.sqrt((V - E - m) * (V - E + m))
    kappa = math.sqrt((V - E + m) * (E + m) / ((V - E - m) * (E - m)))
    s = 1.0 / math.sqrt(2.0 * math.pi)
    t = math.sqrt(2.0 * kappa) / (kappa + 1.0)
    hole_lo = E + m - V

    def wave(q: float, c: float, lower_ratio: float) -> ModeComponent:
        return ModeComponent(q, 1j * c * s, lower_ratio * c * s)

    nl = math.sqrt((E + m) / (2.0 * k))
    nr = math.sqrt((V - E - m) / (2.0 * p))
    u_L = KleinMode(
        ModeKind.L, E, V, m, k, p, kappa,
        left=(wave(k, t * math.sqrt((E + m) / k), k / (E + m)),),
        right=(wave(p, (kappa - 1.0) / (kappa + 1.0) * nr, p / hole_lo),
               wave(-p, nr, -p / hole_lo)),
    )
    u_R = KleinMode(
        ModeKind.R, E, V, m, k, p, kappa,
        left=(wave(k, (1.0 - kappa) / (1.0 + kappa) * nl, k / (E + m)),
              wave(-k, nl, -k / (E + m))),
        right=(wave(p, t * math.sqrt((V - E - m) / p), p / hole_lo),),
    )
    # E - m and V - E - m lose relative accuracy near the zone edges
    tol = CONTINUITY_TOL * max(1.0, V / min(E - m, V - E - m))
    for mode in (u_L, u_R):
        r = mode.continuity_residual()
        if r > tol:
            raise NumericalFailure(f"{mode.kind.value} mode discontinuous at x=0 ({r:.3g})", diagnostic=r)
    return u_L, u_R


def mode_current(mode: KleinMode, x: float = 0.0) -> float:
    """Current ``-u^dagger sigma_y u`` of a Klein mode at position x."""
    psi = mode.spinor_at(x)
    return spinor_current(psi.upper, psi.lower)


def mode_current_magnitude(kappa: float) -> float:
    """(2 kappa / pi) / (kappa + 1)^2, the common size of the two mode currents."""
    return 2.0 * kappa / math.pi / (kappa + 1.0) ** 2


def _step_transmission(em: float, V: float, m: float) -> float:
    """Klein-step T = 4 kappa / (1 + kappa)^2 in terms of em = E - m.

    Written with 1/kappa, which goes to zero at both edges of the Klein zone.
    """
    E = m + em
    r = math.sqrt((V - E - m) * em / ((V - E + m) * (E + m)))
    return 4.0 * r / (1.0 + r) ** 2


def step_transmission(E: float, V: float, m: float = 1.0) -> float:
    _klein_zone(E, V, m)
    return _step_transmission(E - m, V, m)


@dataclass(frozen=True)
class CurrentReport:
    """Vacuum current of a supercritical step-like potential.

    ``j_L`` and ``j_R`` are the energy integrals of the two mode currents
    (step only, ``None`` otherwise); ``transmission_integral`` is int T dE.
    """

    j_vacuum: float
    E_range: tuple[float, float]
    quadrature_error: float
    subcritical: bool
    transmission_integral: float
    j_L: float | None = None
    j_R: float | None = None


_QUAD = dict(epsabs=0.0, epsrel=1e-12, limit=400)


def _edge_integral(f, lo: float, hi: float, m: float) -> tuple[float, float]:
    """int_lo^hi f(E) dE with E = lo + m (cosh u - 1) near lo and mirrored near hi.

    Each half is integrated in u, where the sqrt(E - edge) behaviour becomes
    linear.
    """
    mid = 0.5 * (lo + hi)
    u_max = math.acosh(1.0 + (mid - lo) / m)
    g_lo = lambda u: f(lo + 2.0 * m * math.sinh(0.5 * u) ** 2) * m * math.sinh(u)
    g_hi = lambda u: f(hi - 2.0 * m * math.sinh(0.5 * u) ** 2) * m * math.sinh(u)
    a, ea = integrate.quad(g_lo, 0.0, u_max, **_QUAD)
    b, eb = integrate.quad(g_hi, 0.0, u_max, **_QUAD)
    return a + b, ea + eb


def step_transmission_integral(V: float, m: float = 1.0, fold: bool = True) -> tuple[float, float]:
    """int T dE over the Klein zone of the step, with its error estimate.

    T(E) = T(V - E), so by default only the lower half is integrated and
    doubled; ``fold=False`` integrates both halves independently.
    """
    check_mass(m)
    if V <= 2.0 * m:
        return 0.0, 0.0
    half = 0.5 * V - m
    u_max = math.acosh(1.0 + half / m)
    g = lambda u: _step_transmission(2.0 * m * math.sinh(0.5 * u) ** 2, V, m) * m * math.sinh(u)
    if fold:
        val, err = integrate.quad(g, 0.0, u_max, **_QUAD)
        return 2.0 * val, 2.0 * err
    f = lambda E: _step_transmission(E - m, V, m)
    return _edge_integral(f, m, V - m, m)


def _mode_current_integrals(V: float, m: float) -> tuple[float, float]:
    def j(E: float, which: int) -> float:
        if not m < E < V - m:
            return 0.0
        return mode_current(klein_modes(E, V, m)[which])

    jl, _ = _edge_integral(lambda E: j(E, 0), m, V - m, m)
    jr, _ = _edge_integral(lambda E: j(E, 1), m, V - m, m)
    return jl, jr


def pair_current(V: float | None = None, m: float = 1.0, profile: PotentialProfile | None = None,
                 mode_integrals: bool = False) -> CurrentReport:
    """Vacuum pair-production current -(1/2 pi) int T dE over the Klein zone.

    Pass a step height ``V`` (closed-form T) or a ``profile`` (transfer
    engine T, Klein zone between the asymptotic levels).  A potential drop
    of 2m or less has no Klein zone: the result is exactly zero with
    ``subcritical=True``.
    """
    if (V is None) == (profile is None):
        raise DomainError("give exactly one of a step height V or a profile")
    if profile is not None:
        m = profile.mass
        if profile.delta_V < 0:
            profile = profile.reversed()
        lo, hi = profile.left_level + m, profile.right_level - m
    else:
        check_mass(m)
        lo, hi = m, V - m
    if not hi > lo:
        return CurrentReport(0.0, (lo, hi), 0.0, True, 0.0,
                             0.0 if profile is None else None, 0.0 if profile is None else None)
    if profile is None:
        integral, err = step_transmission_integral(V, m)
        jl = jr = None
        if mode_integrals:
            jl, jr = _mode_current_integrals(V, m)
        return CurrentReport(-integral / (2.0 * math.pi), (lo, hi), err / integral, False, integral, jl, jr)

    def T(E: float) -> float:
        if not lo < E < hi:
            return 0.0
        try:
            return scatter_numeric(profile, E).T
        except ThresholdError:
            # an inner segment sits exactly on a continuum edge; step off it
            return scatter_numeric(profile, E * (1.0 + 1e-10)).T

    integral, err = _edge_integral(T, lo, hi, m)
    if integral < 0:
        raise NumericalFailure(f"negative transmission integral {integral}")
    rel = err / integral if integral > 0 else 0.0
    return CurrentReport(-integral / (2.0 * math.pi), (lo, hi), rel, False, integral)


def riemann_current(V: float, m: float = 1.0, n: int = 1_000_000) -> float:
    """Midpoint-rule oracle for the Klein-step current on n uniform cells."""
    check_mass(m)
    if V <= 2.0 * m:
        return 0.0
    lo, hi = m, V - m
    h = (hi - lo) / n
    E = lo + h * (np.arange(n) + 0.5)
    r = np.sqrt((V - E - m) * (E - m) / ((V - E + m) * (E + m)))
    return -float(np.sum(4.0 * r / (1.0 + r) ** 2) * h) / (2.0 * math.pi)


@dataclass(frozen=True)
class EmissionEstimate:
    """Order-of-magnitude emission estimates for a slightly supercritical well.

    Depth V = 2m + Delta.  ``E_N`` are the energies |E_N| of the emitted
    positrons, one per supercritical level; ``valid`` is False once Delta
    exceeds 0.2 m, where the small-Delta estimates stop being reliable.
    """

    Delta: float
    Q_S: int
    Q_S_estimate: float
    tau: float
    p_bar: float
    tau_bar: float
    E_N: tuple[float, ...]
    valid: bool


def emission_estimates(V: float, a: float, m: float = 1.0) -> EmissionEstimate:
    check_mass(m)
    if not V > 2.0 * m:
        raise DomainError(f"well is not supercritical: V={V} <= 2m={2.0 * m}")
    if not a > 0:
        raise DomainError(f"well half-width must be positive, got {a}")
    delta = V - 2.0 * m
    Q_S = supercritical_count(V, a, m)
    E_N = tuple(V - math.sqrt(m * m + (N * math.pi / (2.0 * a)) ** 2) for N in range(1, Q_S + 1))
    return EmissionEstimate(
        Delta=delta,
        Q_S=Q_S,
        Q_S_estimate=2.0 * a / math.pi * math.sqrt(2.0 * m * delta),
        tau=2.0 * m * a * a / math.pi,
        p_bar=math.sqrt(m * delta / 2.0),
        tau_bar=a * math.sqrt(2.0 * m / delta),
        E_N=E_N,
        valid=delta <= 0.2 * m,
    )


def conjugate_barrier_resonances(V: float, a: float, m: float = 1.0) -> list[float]:
    """Resonance energies of the barrier of height V that is the charge conjugate of the well."""
    return resonance_energies(V, a, m)
