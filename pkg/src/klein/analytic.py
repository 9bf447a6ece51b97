"""Closed-form scattering, tunnelling and penetration formulas.

Everything here is a direct formula; the transfer-matrix engine in
:mod:`klein.transfer` is the independent numerical check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import Channel, check_mass, classify, momentum_branch
from .errors import DomainError, NoChannelError, ThresholdError

ALPHA_FS = 1.0 / 137.036

#: tolerance on |2 p a - N pi| for flagging a transmission resonance
RESONANCE_ATOL = 1e-9


@dataclass(frozen=True)
class ScatteringResult:
    """Reflection/transmission of an electron incident from the left.

    ``B`` and ``F`` multiply the spinors ``(-i k, E - m)`` and
    ``(i q, E - V - m)`` of the reflected and transmitted waves when the
    incident wave is ``(i k, E - m) exp(i k x)``.  They are ``None`` where
    only the coefficients are available in closed form.  ``kappa`` is
    ``None`` when it would be imaginary (evanescent transmitted region).
    """

    E: float
    R: float
    T: float
    kappa: float | None
    B: complex | None = None
    F: complex | None = None
    resonance: bool = False


def _incident_check(E: float, V: float, m: float) -> Channel:
    check_mass(m)
    if not E > m:
        raise NoChannelError(f"no incident electron for E={E} <= m={m}")
    if classify(E, 0.0, m) is Channel.THRESHOLD:
        raise ThresholdError(f"E={E} sits on the incident threshold", E, 0.0)
    ch = classify(E, V, m)
    if ch is Channel.THRESHOLD:
        raise ThresholdError(f"E={E} sits on a threshold of V={V} (E = V +/- m)", E, V)
    return ch


def kappa_squared(E: float, V: float, m: float = 1.0) -> float:
    """kappa**2 = (E - V - m)(E + m) / ((E - V + m)(E - m)).

    Positive when both regions propagate, negative when the region at
    potential ``V`` is evanescent.
    """
    return (E - V - m) * (E + m) / ((E - V + m) * (E - m))


def kinematic_factor(E: float, V: float, m: float = 1.0) -> float:
    """Positive kinematic factor kappa for a step of height ``V``.

    In the Klein zone ``m < E < V - m`` this is the group-velocity branch
    result ``sqrt((V-E+m)(E+m) / ((V-E-m)(E-m)))``, which is >= 1.
    """
    ch = _incident_check(E, V, m)
    if ch is Channel.HOLE:
        return math.sqrt((V - E + m) * (E + m) / ((V - E - m) * (E - m)))
    if ch is Channel.PARTICLE:
        return math.sqrt((E - V - m) * (E + m) / ((E - V + m) * (E - m)))
    raise DomainError(f"kappa is imaginary for V - m < E < V + m (E={E}, V={V})")


def step_scatter(E: float, V: float, m: float = 1.0) -> ScatteringResult:
    """Klein step: V(x) = 0 for x < 0 and V for x > 0.

    >>> r = step_scatter(1.5, 5.0)
    >>> round(r.kappa, 12), round(r.R, 12), round(r.T, 12)
    (3.0, 0.25, 0.75)
    """
    ch = _incident_check(E, V, m)
    if ch is Channel.EVANESCENT:
        k = math.sqrt((E - m) * (E + m))
        q, _ = momentum_branch(E, V, m)
        rho = (q / k) * (E - m) / (E - V - m)
        B = (1 - rho) / (1 + rho)
        F = (E - m) * (1 + B) / (E - V - m)
        return ScatteringResult(E, 1.0, 0.0, None, B, F)
    kappa = kinematic_factor(E, V, m)
    B = (kappa - 1.0) / (kappa + 1.0)
    R = B * B
    T = 4.0 * kappa / (1.0 + kappa) ** 2
    F = (E - m) * (1.0 + B) / (E - V - m)
    return ScatteringResult(E, R, T, kappa, complex(B), complex(F), abs(T - 1.0) <= RESONANCE_ATOL)


def _csch2(y: float) -> float:
    # 1/sinh(y)**2 for large y, where sinh itself would overflow
    e = math.exp(-2.0 * y)
    return 4.0 * e / math.expm1(-2.0 * y) ** 2


def barrier_scatter(E: float, V: float, a: float, m: float = 1.0) -> ScatteringResult:
    """Square barrier of height ``V`` on |x| < a.

    Uses ``T = 4 kappa^2 / (4 kappa^2 + (1 - kappa^2)^2 sin^2(2 p a))``.  Under
    the barrier (|E - V| < m) the same expression is evaluated through
    ``sigma = -kappa^2 > 0`` and ``sinh`` of the decay constant, so no complex
    intermediate appears.
    """
    ch = _incident_check(E, V, m)
    if a < 0:
        raise DomainError(f"barrier half-width must be non-negative, got {a}")
    if ch is Channel.EVANESCENT:
        q, _ = momentum_branch(E, V, m)
        y = 2.0 * q.imag * a
        if y == 0.0:
            return ScatteringResult(E, 0.0, 1.0, None, resonance=True)
        sigma = (m - (E - V)) * (E + m) / ((m + (E - V)) * (E - m))
        if y < 300.0:
            s2 = (1.0 + sigma) ** 2 * math.sinh(y) ** 2
            D = 4.0 * sigma + s2
            return ScatteringResult(E, s2 / D, 4.0 * sigma / D, None)
        w = 4.0 * sigma * _csch2(y)
        D = w + (1.0 + sigma) ** 2
        return ScatteringResult(E, (1.0 + sigma) ** 2 / D, w / D, None)
    k2 = kappa_squared(E, V, m)
    p = abs(momentum_branch(E, V, m)[0].real)
    phase = 2.0 * p * a
    s2 = math.sin(phase) ** 2
    num = (1.0 - k2) ** 2 * s2
    D = 4.0 * k2 + num
    N = round(phase / math.pi)
    resonance = N >= 1 and abs(phase - N * math.pi) <= RESONANCE_ATOL
    return ScatteringResult(E, num / D, 4.0 * k2 / D, math.sqrt(k2), resonance=resonance)


def _klein_zone_check(E: float, V: float, m: float) -> None:
    ch = _incident_check(E, V, m)
    if ch is not Channel.HOLE:
        raise DomainError(f"E={E} is outside the Klein zone ({m}, {V - m})")


def wide_barrier_limit(E: float, V: float, m: float = 1.0) -> tuple[float, float]:
    """Phase-averaged (R, T) of a very wide barrier, sin^2 replaced by 1/2.

    Note this averages the *denominator* of T, so it equals the harmonic mean
    of T over one oscillation period, not the arithmetic mean.
    """
    _klein_zone_check(E, V, m)
    k2 = kappa_squared(E, V, m)
    c = (1.0 - k2) ** 2
    return c / (8.0 * k2 + c), 8.0 * k2 / (8.0 * k2 + c)


def resonance_energies(V: float, a: float, m: float = 1.0) -> list[float]:
    """Klein-zone energies E_N = V - sqrt(m^2 + N^2 pi^2 / 4a^2), N = 1, 2, ...

    Returned in order of increasing N (so decreasing energy).
    """
    check_mass(m)
    if not a > 0:
        raise DomainError(f"barrier half-width must be positive, got {a}")
    out = []
    N = 1
    while True:
        E = V - math.sqrt(m * m + (N * math.pi / (2.0 * a)) ** 2)
        if not E > m:
            break
        out.append(E)
        N += 1
    return out


def sauter_transmission(v: float, m: float = 1.0) -> float:
    """Weak-field transmission exp(-pi m^2 / v) through a linear ramp of slope v.

    Only meaningful for v well below ~pi m^2; see :func:`sauter_weak_field`.
    """
    check_mass(m)
    if not v > 0:
        raise DomainError(f"field strength must be positive, got {v}")
    return math.exp(-math.pi * m * m / v)


def sauter_weak_field(v: float, m: float = 1.0) -> bool:
    """True when v is below the critical strength pi m^2."""
    return v < math.pi * m * m


class CoulombRegime(enum.Enum):
    NONRELATIVISTIC = "nonrelativistic"
    RELATIVISTIC = "relativistic"


@dataclass(frozen=True)
class CoulombRatio:
    """Positron/electron probability ratio at the origin of a Coulomb field."""

    Z: float
    alpha: float
    regime: CoulombRegime
    rho: float
    f: float = 1.0


def coulomb_penetration(Z: float, regime: CoulombRegime | str = CoulombRegime.RELATIVISTIC,
                        E: float | None = None, p: float | None = None,
                        f: float = 1.0, alpha: float = ALPHA_FS) -> CoulombRatio:
    """Penetration ratio rho of a positron through a nuclear Coulomb barrier.

    Nonrelativistic: ``exp(-2 pi Z alpha E / p)``.  Relativistic:
    ``f * exp(-2 pi Z alpha)``, where ``f`` (a ratio of complex gamma
    functions, close to 1 for large Z) is left to the caller.
    """
    regime = CoulombRegime(regime)
    if Z < 0:
        raise DomainError(f"nuclear charge must be non-negative, got {Z}")
    if not alpha > 0:
        raise DomainError(f"fine-structure constant must be positive, got {alpha}")
    if regime is CoulombRegime.NONRELATIVISTIC:
        if E is None or p is None:
            raise DomainError("nonrelativistic regime needs both E and p")
        if not p > 0:
            raise DomainError(f"exponent diverges for momentum p={p}")
        if not E > 0:
            raise DomainError(f"energy must be positive, got {E}")
        return CoulombRatio(Z, alpha, regime, math.exp(-2.0 * math.pi * Z * alpha * E / p), 1.0)
    if not f > 0:
        raise DomainError(f"prefactor f must be positive, got {f}")
    return CoulombRatio(Z, alpha, regime, f * math.exp(-2.0 * math.pi * Z * alpha), f)


def effective_potential(V: float, E: float, m: float = 1.0) -> float:
    """Schrodinger-equivalent potential (2 E V - V^2) / 2m."""
    check_mass(m)
    return (2.0 * E * V - V * V) / (2.0 * m)
