"""Relativistic scattering, bound states and pair production for the 1D Dirac equation."""

from .analytic import (ScatteringResult, barrier_scatter, coulomb_penetration, kinematic_factor,
                       resonance_energies, sauter_transmission, step_scatter, wide_barrier_limit)
from .core import Channel, Direction, Normalization, PlaneWaveMode, Spinor, momentum_branch, plane_wave
from .errors import (DomainError, KleinError, NoChannelError, NumericalFailure, ProfileError,
                     ThresholdError)
from .spectrum import (ChargeLedger, adiabatic_sweep, adiabatic_sweep_delta, delta_ledger,
                       delta_well_energy, supercritical_threshold, well_bound_states, well_ledger)
from .transfer import (PotentialProfile, barrier_profile, build_profile, sauter_profile,
                       scatter_numeric, step_profile, transmission_sweep)
from .vacuum import emission_estimates, klein_modes, mode_current, pair_current

__version__ = "0.1.0"
