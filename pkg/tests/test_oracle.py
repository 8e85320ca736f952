import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dressed_radiation.dipoles import adiabatic_dipoles, element_amplitudes, sudden_dipoles_exact
from dressed_radiation.dressed import SystemConfig, derive_params
from dressed_radiation.oracle import (
    FitError,
    ProfileKind,
    SwitchingProfile,
    analytic_partner,
    compare_components,
    default_window,
    extract_components,
    fit_lines,
    matrix_element_oracle,
    propagate,
    switching_verdict,
)
from reference import rabi_population

STEP = SwitchingProfile(ProfileKind.STEP)


def worst(matched):
    return max(d.relative for d in matched)


# --- profiles ------------------------------------------------------------------------

@pytest.mark.parametrize("kind", list(ProfileKind))
def test_envelope_is_monotone_unit_step(kind):
    prof = SwitchingProfile(kind, tau=0.7, t_on=1.0)
    t = np.linspace(-20, 30, 5001)
    f = prof.envelope(t)
    assert np.all((f >= 0) & (f <= 1))
    assert np.all(np.diff(f) >= 0)
    assert f[0] == pytest.approx(0.0, abs=1e-12) and f[-1] == pytest.approx(1.0, abs=1e-12)
    scalar = prof._scalar()
    np.testing.assert_allclose([scalar(x) for x in t[::50]], f[::50], atol=1e-15)


def test_profile_validation():
    with pytest.raises(ValueError):
        SwitchingProfile(ProfileKind.TANH, tau=0.0)
    with pytest.raises(ValueError):
        SwitchingProfile.from_delta_tau(1.0, 0.0)
    assert SwitchingProfile.from_delta_tau(-200.0, 2.0).tau == 100.0


def test_switching_verdict():
    assert switching_verdict(200) == "adiabatic"
    assert switching_verdict(-0.001) == "sudden"
    assert switching_verdict(1.0) == "intermediate"


# --- propagation ---------------------------------------------------------------------

def test_free_evolution_keeps_populations():
    cfg = SystemConfig.from_detuning(1.3, 0.0)
    init = np.array([0.6, 0.8j])
    traj = propagate(cfg, STEP, init, t_end=40.0, tol=1e-10)
    a = traj.column(0)
    np.testing.assert_allclose(np.abs(a[:, 0]) ** 2, 0.36, atol=1e-9)
    np.testing.assert_allclose(np.abs(a[:, 1]) ** 2, 0.64, atol=1e-9)
    np.testing.assert_allclose(a[:, 1], 0.8j * np.exp(-1.3j * traj.t), atol=1e-8)


@pytest.mark.parametrize("v_mag", [0.5, 1.0, 2.5])
def test_resonant_rabi_calibration(v_mag):
    cfg = SystemConfig.from_detuning(0.0, v_mag)
    traj = propagate(cfg, STEP, "psi1", t_end=30.0, tol=1e-10)
    pop = np.abs(traj.column(0)[:, 1]) ** 2
    assert np.max(np.abs(pop - rabi_population(v_mag, traj.t))) < 1e-8


@given(st.floats(-3, 3), st.floats(0.1, 3), st.sampled_from([1e-6, 1e-8, 1e-10]))
@settings(max_examples=12)
def test_norm_drift_bound(delta, v_mag, tol):
    cfg = SystemConfig.from_detuning(delta, v_mag)
    prof = SwitchingProfile(ProfileKind.TANH, tau=0.5)
    traj = propagate(cfg, prof, "both", t_end=60.0, tol=tol)
    assert traj.max_norm_drift < 10 * tol


def test_propagate_validation():
    cfg = SystemConfig.from_detuning(1.0, 0.5)
    with pytest.raises(ValueError, match="tol"):
        propagate(cfg, STEP, tol=1e-3)
    with pytest.raises(ValueError, match="normalized"):
        propagate(cfg, STEP, [1.0, 1.0])
    with pytest.raises(ValueError, match="initial"):
        propagate(cfg, STEP, "psi3")
    with pytest.raises(ValueError, match="t_end"):
        propagate(cfg, STEP, t_end=-1.0)


# --- fitting -------------------------------------------------------------------------

def test_fit_lines_recovers_synthetic_signal():
    t = np.linspace(3.0, 60.0, 2000)
    w = 1.7
    sig = 0.3 + (0.2 - 0.1j) * np.exp(1j * w * t) + 0.05j * np.exp(-1j * w * t)
    fit = fit_lines(t, sig, w * (1 + 2e-3), refine=True)
    # bounded Brent search resolves the frequency to ~sqrt(machine eps)
    assert fit.omega_rabi == pytest.approx(w, rel=1e-7)
    assert fit.c0 == pytest.approx(0.3, abs=1e-6)
    assert fit.c_plus == pytest.approx(0.2 - 0.1j, abs=1e-6)
    assert fit.c_minus == pytest.approx(0.05j, abs=1e-6)
    assert fit.residual < 1e-6


def test_ill_conditioned_fit_rejected():
    t = np.linspace(0.0, 0.05, 100)
    with pytest.raises(FitError, match="ill-conditioned"):
        fit_lines(t, np.ones_like(t), 1.0)


def test_short_window_rejected():
    cfg = SystemConfig.from_detuning(1.0, 0.5)
    traj = propagate(cfg, STEP, t_end=50.0)
    with pytest.raises(FitError, match="fewer than 16"):
        extract_components(traj, derive_params(cfg), fit_window=(10.0, 10.1))


# --- physics checks ------------------------------------------------------------------

def test_step_profile_recovers_rabi_frequency():
    cfg = SystemConfig.from_detuning(1.0, 0.5)
    p = derive_params(cfg)
    traj = propagate(cfg, STEP, "psi1", t_end=default_window(p, STEP)[1], tol=1e-10)
    res = extract_components(traj, p, default_window(p, STEP))
    assert res.omega_rabi_fitted == pytest.approx(1.4142, abs=2e-4)
    assert res.omega_rabi_fitted == pytest.approx(math.sqrt(2), rel=1e-7)


def test_sudden_diagonal_matches_exact_transform():
    cfg = SystemConfig.from_alpha(1.0)
    p = derive_params(cfg)
    prof = SwitchingProfile.from_delta_tau(0.001, p.delta)
    window = default_window(p, prof)
    traj = propagate(cfg, prof, "psi1", t_end=window[1], tol=1e-10)
    res = extract_components(traj, p, window)
    want = element_amplitudes(sudden_dipoles_exact(p), "11")
    for shift, label in ((0, "omega"), (-1, "omega-Omega"), (1, "omega+Omega")):
        expected = abs(want[(-1, shift)])
        assert abs(abs(res.amp_at[label]) - expected) / expected < 0.02


def test_adiabatic_diagonal_has_no_sidebands():
    cfg = SystemConfig.from_alpha(1.0)
    p = derive_params(cfg)
    prof = SwitchingProfile.from_delta_tau(200.0, p.delta)
    window = default_window(p, prof)
    traj = propagate(cfg, prof, "psi1", t_end=window[1], tol=1e-8)
    assert traj.max_norm_drift < 1e-7
    res = extract_components(traj, p, window)
    assert abs(res.amp_at["omega-Omega"]) < 1e-3 and abs(res.amp_at["omega+Omega"]) < 1e-3
    assert abs(res.amp_at["omega"]) == pytest.approx(p.v_mag / p.omega_rabi, rel=0.01)


def test_free_atom_off_diagonal_single_line():
    cfg = SystemConfig.from_detuning(1.0, 0.0)
    p = derive_params(cfg)
    m = matrix_element_oracle(cfg, STEP, tol=1e-10, refine=False)
    d12 = {k: v for k, v in m.amplitudes("12").items() if abs(v) > 1e-8}
    assert list(d12) == [(-1, 1)]  # emission at omega + Omega = E21
    assert abs(d12[(-1, 1)]) == pytest.approx(1.0, abs=1e-8)
    assert p.omega + p.omega_rabi == pytest.approx(101.0)


def test_sudden_off_diagonal_matches_exact_transform():
    cfg = SystemConfig.from_alpha(0.5, phi_field=0.4, phi1=1.1, phi2=0.2)
    p = derive_params(cfg)
    prof = SwitchingProfile.from_delta_tau(0.001, p.delta)
    m = matrix_element_oracle(cfg, prof, tol=1e-10)
    matched, leaks = compare_components(m.components, analytic_partner(p, "sudden"))
    off = [d for d in matched if d.element in ("12", "21")]
    assert len(off) == 12  # six lines in each of D'12 and D'21
    assert worst(off) < 0.02
    assert all(d.oracle < 1e-3 for d in leaks)


def test_adiabatic_negative_detuning_sideband_ratio():
    cfg = SystemConfig.from_alpha(2.0, delta=-1.0)
    p = derive_params(cfg)
    prof = SwitchingProfile.from_delta_tau(200.0, p.delta)
    m = matrix_element_oracle(cfg, prof, tol=1e-8)
    # psi1 ends in Phi2 for delta < 0, so the oracle's D21 is the analytic D12
    d = m.amplitudes("21")
    ratio = abs(d[(1, -1)]) / abs(d[(-1, 1)])
    r = p.delta / p.omega_rabi
    assert ratio == pytest.approx((1 - r) / (1 + r), rel=0.02)
    matched, leaks = compare_components(m.components, analytic_partner(p, "adiabatic"))
    assert worst(matched) < 0.02
    assert max(d.oracle for d in leaks) < 1e-3


def test_tolerance_convergence():
    cfg = SystemConfig.from_alpha(0.5)
    p = derive_params(cfg)
    prof = SwitchingProfile.from_delta_tau(0.001, p.delta)
    coarse = matrix_element_oracle(cfg, prof, tol=1e-8)
    fine = matrix_element_oracle(cfg, prof, tol=5e-9)
    for el in ("11", "12"):
        a, b = coarse.amplitudes(el), fine.amplitudes(el)
        for key, val in b.items():
            if abs(val) > 1e-4:
                assert abs(abs(a[key]) - abs(val)) / abs(val) < 0.02


def test_analytic_partner_swaps_labels_for_negative_detuning():
    plus = derive_params(SystemConfig.from_alpha(1.0))
    minus = derive_params(SystemConfig.from_alpha(1.0, delta=-1.0))
    assert analytic_partner(plus, "adiabatic") == adiabatic_dipoles(plus)
    swapped = analytic_partner(minus, "adiabatic")
    assert {c.element for c in swapped if c.shift == 0} == {"22", "11"}
    orig = element_amplitudes(adiabatic_dipoles(minus), "12")
    assert element_amplitudes(swapped, "21") == orig


def test_switching_sweep_interpolates_monotonically():
    cfg = SystemConfig.from_alpha(1.0)
    p = derive_params(cfg)
    labels = ("omega", "omega-Omega", "omega+Omega")
    rows = []
    for delta_tau in (0.001, 0.03, 0.3, 1.0, 3.0, 10.0, 200.0):
        prof = SwitchingProfile.from_delta_tau(delta_tau, p.delta)
        window = default_window(p, prof)
        traj = propagate(cfg, prof, "psi1", t_end=window[1], tol=1e-8)
        res = extract_components(traj, p, window)
        rows.append([abs(res.amp_at[k]) for k in labels])
    rows = np.array(rows)
    sudden = element_amplitudes(sudden_dipoles_exact(p), "11")
    adiabatic = element_amplitudes(adiabatic_dipoles(p), "11")
    for j, shift in enumerate((0, -1, 1)):
        start = abs(sudden[(-1, shift)])
        end = abs(adiabatic.get((-1, shift), 0j))
        steps = np.diff(rows[:, j]) * np.sign(end - start)
        assert np.all(steps > -1e-6)
        assert abs(rows[0, j] - start) <= 0.02 * start
        assert abs(rows[-1, j] - end) <= max(0.02 * end, 1e-3)
