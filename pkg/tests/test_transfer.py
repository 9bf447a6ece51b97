import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from klein import analytic, transfer
from klein.core import Channel, classify
from klein.errors import DomainError, NoChannelError, ProfileError, ThresholdError


def _ok(E, V, m=1.0):
    return E > m and classify(E, 0.0, m) is not Channel.THRESHOLD and classify(E, V, m) is not Channel.THRESHOLD


@given(st.floats(1.001, 30), st.floats(-30, 30))
def test_step_matches_closed_form(E, V):
    assume(_ok(E, V))
    c = analytic.step_scatter(E, V)
    n = transfer.scatter_numeric(transfer.step_profile(V), E)
    assert n.T == pytest.approx(c.T, abs=1e-10)
    assert n.R == pytest.approx(c.R, abs=1e-10)
    assert n.flux_residual <= 1e-10


@given(st.floats(1.001, 30), st.floats(-30, 30), st.floats(0.01, 30))
def test_barrier_matches_closed_form(E, V, a):
    assume(_ok(E, V))
    c = analytic.barrier_scatter(E, V, a)
    n = transfer.scatter_numeric(transfer.barrier_profile(V, a), E)
    assert n.T == pytest.approx(c.T, rel=1e-8, abs=1e-12)


def test_step_amplitudes():
    n = transfer.scatter_numeric(transfer.step_profile(5.0), 1.5)
    assert n.B == pytest.approx(0.5, abs=1e-12)
    assert n.F == pytest.approx(-1 / 6, abs=1e-12)
    assert n.klein


@given(st.floats(1.001, 20), st.lists(st.floats(-10, 10), min_size=1, max_size=6),
       st.floats(-10, 10))
@settings(max_examples=60)
def test_mirror_symmetry_of_transmission(E, levels, right):
    # T is the same from either side when both asymptotic regions propagate
    segs = [(i * 0.7, (i + 1) * 0.7, v) for i, v in enumerate(levels)]
    prof = transfer.build_profile(0.0, 0.0, segs)
    assume(all(classify(E, v) is not Channel.THRESHOLD for v in prof.levels))
    t1 = transfer.scatter_numeric(prof, E).T
    t2 = transfer.scatter_numeric(prof.reversed(), E).T
    assert t1 == pytest.approx(t2, rel=1e-8, abs=1e-14)


def test_reversed_step():
    # incident on the high side of a descending step into the hole region
    prof = transfer.build_profile(5.0, 0.0)
    assert prof.delta_V == -5.0
    r = transfer.scatter_numeric(prof.reversed(), 1.5)
    assert r.T == pytest.approx(0.75, abs=1e-12)


def test_wide_evanescent_barrier_no_overflow():
    n = transfer.scatter_numeric(transfer.barrier_profile(5.5, 300.0), 5.2)
    c = analytic.barrier_scatter(5.2, 5.5, 300.0)
    assert n.T == pytest.approx(c.T, abs=1e-300)
    assert n.R == pytest.approx(1.0)


def test_errors():
    with pytest.raises(NoChannelError):
        transfer.scatter_numeric(transfer.step_profile(5.0), 0.5)
    with pytest.raises(ThresholdError):
        transfer.scatter_numeric(transfer.step_profile(5.0), 4.0)
    with pytest.raises(ProfileError) as exc:
        transfer.build_profile(0, 0, [(0, 2, 1), (1, 3, 2)])
    assert exc.value.index == 1
    with pytest.raises(ProfileError) as exc:
        transfer.build_profile(0, 0, [(2, 3, 1), (0, 1, 2)])
    assert exc.value.index == 0  # sorted order: segment 1 then gap before segment 0
    with pytest.raises(ProfileError):
        transfer.build_profile(0, 0, [(1, 0, 1)])
    with pytest.raises(DomainError):
        transfer.staircase(0, 1, 0, 1, 0)


def test_staircase_midpoints():
    segs = transfer.staircase(0.0, 20.0, 0.0, 10.0, 200)
    assert len(segs) == 200
    assert segs[0].V == pytest.approx(0.025) and segs[-1].V == pytest.approx(9.975)
    assert segs[-1].x_end == 20.0
    assert all(a.x_end == b.x_start for a, b in zip(segs, segs[1:]))


def test_profile_potential_lookup():
    prof = transfer.barrier_profile(5.0, 1.0)
    assert prof.potential(-2) == 0 and prof.potential(0) == 5 and prof.potential(2) == 0
    assert prof.interfaces == [-1.0, 1.0]


def test_sweep_order_and_parallel_identity():
    prof = transfer.sauter_profile(0.5, 20.0, 100)
    a = transfer.transmission_sweep(prof, 1.2, 8.8, 40)
    b = transfer.transmission_sweep(prof, 1.2, 8.8, 40, workers=4)
    assert [r.E for r in a.results] == sorted(r.E for r in a.results)
    assert [(r.E, r.T, r.R) for r in a.results] == [(r.E, r.T, r.R) for r in b.results]


def test_sweep_collects_failures():
    rep = transfer.transmission_sweep(transfer.step_profile(5.0), 0.0, 8.0, 9)
    kinds = {f.kind for f in rep.failures}
    assert "no-channel" in kinds and "threshold" in kinds
    assert len(rep.results) + len(rep.failures) == 9


def test_phase_average_harmonic_vs_arithmetic():
    avg = transfer.phase_averaged_transmission(1.5, 5.0, 10.0, samples=128)
    _, T_inf = analytic.wide_barrier_limit(1.5, 5.0)
    assert avg.harmonic_T == pytest.approx(T_inf, abs=1e-6)
    # arithmetic mean of 1 / (1 + c sin^2) over a period is 1 / sqrt(1 + c)
    c = 64 / 36
    assert avg.arithmetic_T == pytest.approx(1 / math.sqrt(1 + c), abs=1e-6)


def test_staircase_convergence_monotone():
    conv = transfer.converge_staircase(5.0, 0.5, 20.0)
    diffs = [abs(b[1] - a[1]) for a, b in zip(conv.history, conv.history[1:])]
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
    assert conv.T == pytest.approx(math.exp(-2 * math.pi), rel=0.02)


def test_energy_grid():
    g = transfer.energy_grid(1.0, 2.0, 11)
    assert np.all(np.diff(g) > 0) and g[0] == 1.0 and g[-1] == 2.0
    with pytest.raises(DomainError):
        transfer.energy_grid(2.0, 1.0, 5)
