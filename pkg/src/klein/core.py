"""Kinematics and plane-wave solutions of the one-dimensional Dirac equation.

Conventions
-----------
Natural units (hbar = c = 1) with the fermion mass ``m`` setting the scale.
Two-component spinors with gamma_0 = sigma_z, gamma_1 = i sigma_x, so in a
region of constant potential V the Dirac equation reads

    (sigma_x d/dx - (E - V) sigma_z + m) psi = 0

and a plane wave ``(i q, (E - V) - m) exp(i q x)`` solves it whenever
``(E - V)**2 = q**2 + m**2``.  The conserved current is
``j = -psi^dagger sigma_y psi = -2 Im(conj(psi_1) psi_2)``.

Branch rule
-----------
For a propagating wave the *direction* is the sign of the group velocity
``q / (E - V)``, not the sign of ``q``.  Inside the hole continuum
(E - V < -m) a right-moving wave therefore carries negative momentum.
Evanescent momenta live on the positive imaginary axis; a right-moving
evanescent wave decays to the right.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .errors import DomainError, NormalizationSingularError, NumericalFailure

#: relative distance from |E - V| = m treated as sitting on the threshold
THRESHOLD_RTOL = 1e-12


class Direction(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


class Channel(enum.Enum):
    PARTICLE = "particle-propagating"
    HOLE = "hole-propagating"
    EVANESCENT = "evanescent"
    THRESHOLD = "evanescent-threshold"

    @property
    def propagating(self) -> bool:
        return self in (Channel.PARTICLE, Channel.HOLE)


class Normalization(enum.Enum):
    ENERGY = "energy"
    BOX = "box"
    NONE = "none"


@dataclass(frozen=True)
class ModelParams:
    """Global model parameters; only the mass so far."""

    m: float = 1.0

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"mass must be positive and finite, got {self.m!r}")


def check_mass(m: float) -> float:
    if not (m > 0 and math.isfinite(m)):
        raise DomainError(f"mass must be positive and finite, got {m!r}")
    return float(m)


@dataclass(frozen=True)
class Spinor:
    upper: complex
    lower: complex

    def __post_init__(self):
        if not (cmath.isfinite(self.upper) and cmath.isfinite(self.lower)):
            raise NumericalFailure(f"non-finite spinor ({self.upper}, {self.lower})")

    def scaled(self, c: complex) -> Spinor:
        return Spinor(self.upper * c, self.lower * c)

    def norm(self) -> float:
        return math.hypot(abs(self.upper), abs(self.lower))

    def current(self) -> float:
        """Probability current ``-psi^dagger sigma_y psi``."""
        return spinor_current(self.upper, self.lower)


def spinor_current(upper: complex, lower: complex) -> float:
    return -2.0 * (upper.conjugate() * lower).imag


def classify(E: float, V: float, m: float = 1.0) -> Channel:
    eps = E - V
    if abs(abs(eps) - m) <= THRESHOLD_RTOL * m:
        return Channel.THRESHOLD
    if eps > m:
        return Channel.PARTICLE
    if eps < -m:
        return Channel.HOLE
    return Channel.EVANESCENT


def momentum_branch(E: float, V: float, m: float = 1.0) -> tuple[complex, Channel]:
    """Right-moving momentum in a region of constant potential ``V``.

    Returns ``(q, channel)``.  For propagating channels ``q`` is real with the
    sign of ``E - V`` (negative inside the hole continuum, where a
    right-moving wave has negative momentum).  For evanescent regions ``q`` is
    ``i * sqrt(m**2 - (E - V)**2)``.  On a threshold ``q`` is exactly zero and
    the channel is :attr:`Channel.THRESHOLD`.

    >>> momentum_branch(1.5, 5.0)
    ((-3.3541019662496847+0j), <Channel.HOLE: 'hole-propagating'>)
    """
    check_mass(m)
    ch = classify(E, V, m)
    eps = E - V
    if ch is Channel.THRESHOLD:
        return 0j, ch
    if ch is Channel.EVANESCENT:
        # (m - |eps|)(m + |eps|) avoids cancellation near the edges
        return 1j * math.sqrt((m - abs(eps)) * (m + abs(eps))), ch
    k = math.sqrt((abs(eps) - m) * (abs(eps) + m))
    return complex(math.copysign(k, eps)), ch


@dataclass(frozen=True)
class PlaneWaveMode:
    """A single plane wave ``amplitude * exp(i q x)`` in a flat region."""

    energy: float
    potential: float
    mass: float
    q: complex
    direction: Direction
    channel: Channel
    amplitude: Spinor
    normalization: Normalization
    factor: float

    @property
    def epsilon(self) -> float:
        """Shifted magnitude |E - V| used by the normalization factors."""
        return abs(self.energy - self.potential)

    @property
    def group_velocity(self) -> float:
        if not self.channel.propagating:
            return 0.0
        return self.q.real / (self.energy - self.potential)

    def spinor_at(self, x: float) -> Spinor:
        return self.amplitude.scaled(cmath.exp(1j * self.q * x))

    def current(self, x: float = 0.0) -> float:
        return self.spinor_at(x).current()


def normalization_factor(E: float, V: float, m: float = 1.0,
                         normalization: Normalization = Normalization.ENERGY,
                         half_length: float = 1.0) -> float:
    """N_+ (particles) or N_- (holes) for the given convention.

    Box normalization uses a periodic box of length ``2 * half_length``;
    energy normalization replaces ``sqrt(2 L)`` by ``sqrt(2 pi)``.
    """
    ch = classify(E, V, m)
    if normalization is Normalization.NONE or ch is Channel.EVANESCENT:
        return 1.0
    if ch is Channel.THRESHOLD:
        raise NormalizationSingularError(
            f"normalization is singular at the threshold |E - V| = m (E={E}, V={V})",
            energy=E, potential=V)
    eps = abs(E - V)
    shift = eps - m if ch is Channel.PARTICLE else eps + m
    if normalization is Normalization.ENERGY:
        length = 2.0 * math.pi
    else:
        if not half_length > 0:
            raise DomainError("box half-length must be positive")
        length = 2.0 * half_length
    return 1.0 / (math.sqrt(length) * math.sqrt(2.0 * eps * shift))


def plane_wave(E: float, V: float, m: float = 1.0,
               direction: Direction = Direction.RIGHT,
               normalization: Normalization = Normalization.ENERGY,
               half_length: float = 1.0) -> PlaneWaveMode:
    """Plane-wave solution with spinor proportional to ``(i q, E - V - m)``.

    Evanescent modes are returned with unit factor whatever the requested
    normalization.  Raises :class:`NormalizationSingularError` on a threshold
    unless ``normalization`` is ``NONE``.
    """
    q, ch = momentum_branch(E, V, m)
    if direction is Direction.LEFT:
        q = -q
    factor = normalization_factor(E, V, m, normalization, half_length)
    amp = Spinor(1j * q * factor, (E - V - m) * factor)
    return PlaneWaveMode(E, V, m, q, direction, ch, amp, normalization, factor)


def dirac_residual(mode: PlaneWaveMode, x: float = 0.0) -> float:
    """Relative residual of the Dirac equation for ``mode`` at ``x``.

    The derivative is taken analytically (``d/dx -> i q``) and the norm of
    ``(sigma_x d/dx - (E - V) sigma_z + m) psi`` is divided by
    ``(|E - V| + |q| + m) * |psi(x)|`` so the result is scale free.
    """
    psi = mode.spinor_at(x)
    eps = mode.energy - mode.potential
    m = mode.mass
    iq = 1j * mode.q
    r1 = iq * psi.lower - (eps - m) * psi.upper
    r2 = iq * psi.upper + (eps + m) * psi.lower
    scale = (abs(eps) + abs(mode.q) + m) * psi.norm()
    if scale == 0.0:
        return 0.0
    return math.hypot(abs(r1), abs(r2)) / scale

