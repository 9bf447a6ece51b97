import math

import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from klein import spectrum
from klein.errors import DomainError
from klein.spectrum import EventKind, Parity


def test_root_finder_agrees_with_brentq():
    for f, lo, hi in ((lambda x: math.cos(x) - x, 0.0, 1.0),
                      (lambda x: x ** 3 - 2 * x - 5, 2.0, 3.0),
                      (lambda x: math.tan(x) - 3 * x, 1.0, 1.5)):
        ours = spectrum.bisect_secant(f, lo, hi)
        assert ours == pytest.approx(brentq(f, lo, hi, xtol=1e-15), abs=1e-11)
        assert abs(f(ours)) < 1e-12
    with pytest.raises(DomainError):
        spectrum.bisect_secant(lambda x: x * x + 1, -1.0, 1.0)


def test_delta_well_energy():
    assert spectrum.delta_well_energy(math.pi / 3) == (Parity.EVEN, pytest.approx(0.5))
    assert spectrum.delta_well_energy(math.pi / 2)[1] == pytest.approx(0.0, abs=1e-15)
    par, E = spectrum.delta_well_energy(1e-6)
    assert par is Parity.EVEN and 0.999 < E < 1.0
    par, E = spectrum.delta_well_energy(math.pi + 0.1)
    assert par is Parity.ODD and E == pytest.approx(math.cos(0.1))
    with pytest.raises(DomainError):
        spectrum.delta_well_energy(0.0)


@pytest.mark.parametrize("lam,Qp,QS", [(2.0, 1, 0), (0.1, 0, 0), (3.5, 1, 1)])
def test_delta_ledger(lam, Qp, QS):
    led = spectrum.delta_ledger(lam)
    assert (led.Q_p, led.Q_S, led.Q_0, led.Q_total) == (Qp, QS, -Qp, 0)


def test_known_levels_at_pi_over_2():
    a = math.pi / 2
    states = spectrum.well_bound_states(1.5, a)
    assert [s.level for s in states] == [3, 2, 1]
    assert [s.parity for s in states] == [Parity.EVEN, Parity.ODD, Parity.EVEN]
    assert [s.index for s in states] == [1, 2, 3]
    for s in states:
        assert s.momentum ** 2 == pytest.approx((s.energy + 1.5) ** 2 - 1)


@given(st.floats(0.05, 6.0), st.floats(0.05, 8.0))
@settings(max_examples=60, deadline=None)
def test_states_satisfy_equations(V, a):
    states = spectrum.well_bound_states(V, a)
    assert states  # a 1D well always binds
    Es = [s.energy for s in states]
    assert Es == sorted(Es, reverse=True)
    for s in states:
        assert -1.0 < s.energy < 1.0
        assert spectrum.bound_state_residual(s, V, a) < 1e-10
    # labels are consecutive and alternate in parity
    levels = sorted(s.level for s in states)
    assert levels == list(range(levels[0], levels[0] + len(levels)))
    assert all((s.level % 2 == 1) == (s.parity is Parity.EVEN) for s in states)


@given(st.floats(0.05, 6.0), st.floats(0.05, 8.0))
@settings(max_examples=40, deadline=None)
def test_level_count_closed_form(V, a):
    # levels n enter at p_max a = (n - 1) pi / 2 and leave once Q_S of them dived
    p_max = math.sqrt(V * V + 2 * V)
    top = math.ceil(2 * a * p_max / math.pi)
    QS = spectrum.supercritical_count(V, a)
    states = spectrum.well_bound_states(V, a)
    if abs(2 * a * p_max / math.pi - round(2 * a * p_max / math.pi)) > 1e-9:
        assert max(s.level for s in states) == top
    assert min(s.level for s in states) == QS + 1


def test_near_threshold_residuals():
    a = math.pi / 2
    for N in (1, 2, 3):
        Vc = spectrum.supercritical_threshold(N, a)
        for V in (Vc * (1 - 1e-10), Vc * (1 + 1e-10)):
            for s in spectrum.well_bound_states(V, a):
                assert spectrum.bound_state_residual(s, V, a) < 1e-10


def test_supercritical_threshold_accumulates_at_2m():
    vals = [spectrum.supercritical_threshold(1, a) for a in (1, 2, 4, 8, 16, 1e3)]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    assert all(v > 2.0 for v in vals) and vals[-1] - 2.0 < 1e-5
    with pytest.raises(DomainError):
        spectrum.supercritical_threshold(0, 1.0)


def test_well_ledger_examples():
    led = spectrum.well_ledger(3.0, 10.0)
    assert led.Q_S == 11 and led.Q_p == 18 and led.Q_total == 0
    assert spectrum.well_ledger(1.9, 100.0).Q_S == 0
    assert len(spectrum.well_bound_states(3.0, 10.0)) == 14


@given(st.floats(0.1, 5.0), st.floats(0.2, 6.0))
@settings(max_examples=30, deadline=None)
def test_ledger_invariants(V, a):
    led = spectrum.well_ledger(V, a)
    assert 0 <= led.Q_S <= led.Q_p
    assert led.Q_0 == -led.Q_p
    bound = spectrum.positron_bound(V, a)
    assert led.Q_p - 1 <= bound <= led.Q_p


def test_delta_limit_error_halves():
    lam = 1.0
    errs = []
    for a in (0.1, 0.05, 0.025):
        s = spectrum.well_bound_states(lam / (2 * a), a)
        assert len(s) == 1
        errs.append(abs(s[0].energy - math.cos(lam)))
    assert 1.4 <= errs[0] / errs[1] <= 2.6
    assert 1.4 <= errs[1] / errs[2] <= 2.6


def test_adiabatic_sweep_pi_over_2():
    a = math.pi / 2
    events = spectrum.adiabatic_sweep(a, 1.0, 3.0, 0.01)
    kinds = [(e.event, e.N) for e in events]
    assert kinds == [(EventKind.APPEARS, 2), (EventKind.APPEARS, 3), (EventKind.CROSSES_ZERO, 1),
                     (EventKind.CROSSES_ZERO, 2), (EventKind.APPEARS, 4),
                     (EventKind.SUPERCRITICAL, 1), (EventKind.CROSSES_ZERO, 3)]
    sc = [e for e in events if e.event is EventKind.SUPERCRITICAL][0]
    assert sc.V == pytest.approx(1 + math.sqrt(2), abs=1e-9)
    # levels appear at V = -m + sqrt(m^2 + ((n-1) pi / 2a)^2)
    for e in events:
        if e.event is EventKind.APPEARS:
            assert e.V == pytest.approx(-1 + math.sqrt(1 + (e.N - 1) ** 2), abs=1e-8)
    assert all(e.ledger.Q_total == 0 for e in events)
    final = spectrum.well_ledger(3.0, a)
    assert (events[-1].ledger.Q_p, events[-1].ledger.Q_S) == (final.Q_p, final.Q_S)


def test_adiabatic_coarse_step_refines():
    a = math.pi / 2
    fine = spectrum.adiabatic_sweep(a, 1.0, 3.0, 0.01)
    coarse = spectrum.adiabatic_sweep(a, 1.0, 3.0, 1.0)
    assert [(e.event, e.N) for e in coarse] == [(e.event, e.N) for e in fine]
    assert [e.V for e in coarse] == pytest.approx([e.V for e in fine], abs=1e-9)


def test_adiabatic_shallow_is_empty():
    assert spectrum.adiabatic_sweep(1.0, 1.0, 0.1, 0.01) == []
    assert spectrum.adiabatic_sweep(1.0, 1.0, 0.0, 0.01) == []
    with pytest.raises(DomainError):
        spectrum.adiabatic_sweep(1.0, 1.0, 1.0, 0.0)


def test_monotone_level_descent():
    a = 3.0
    prev = None
    for k in range(1, 120):
        V = 0.025 * k
        cur = {s.level: s.energy for s in spectrum.well_bound_states(V, a)}
        if prev:
            for lvl in set(cur) & set(prev):
                assert cur[lvl] < prev[lvl]
        prev = cur


@pytest.mark.parametrize("V,a", [(2.5, 3.0), (3.0, 10.0), (4.0, 2.0), (2.2, 20.0)])
def test_sweep_QS_matches_closed_form(V, a):
    events = spectrum.adiabatic_sweep(a, 1.0, V, 0.01)
    QS = events[-1].ledger.Q_S if events else 0
    assert QS == spectrum.supercritical_count(V, a)


def test_delta_sweep():
    events = spectrum.adiabatic_sweep_delta(3.5)
    assert [e.event for e in events] == [EventKind.CROSSES_ZERO, EventKind.SUPERCRITICAL]
    assert events[0].V == pytest.approx(math.pi / 2, abs=1e-10)
    assert events[1].V == pytest.approx(math.pi, abs=1e-10)
    assert "handover" in events[1].note
    assert events[-1].ledger == spectrum.delta_ledger(3.5)
    long = spectrum.adiabatic_sweep_delta(10.0)
    assert long[-1].ledger == spectrum.delta_ledger(10.0)
    assert all(e.ledger.Q_total == 0 for e in long)


def test_event_json_shape():
    e = spectrum.adiabatic_sweep_delta(2.0)[0]
    d = e.to_dict()
    assert list(d)[:6] == ["V", "event", "parity", "N", "E", "ledger"]
    assert d["event"] == "crosses-zero" and d["ledger"]["Q_total"] == 0
