import math
import sys
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dressed_radiation.dressed import (
    DegenerateDressingError,
    ModelValidityWarning,
    SystemConfig,
    basis_transform,
    derive_params,
    sideband_frequencies,
)
from reference import eigensystem

log_alpha = st.floats(min_value=-4, max_value=4)
signs = st.sampled_from([1.0, -1.0])
phases = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi)


def params_at(alpha, delta=1.0, **kw):
    return derive_params(SystemConfig.from_alpha(alpha, delta=delta, **kw))


def test_free_atom_zero_field():
    p = derive_params(SystemConfig.from_detuning(1.0, 0.0))
    assert p.omega_rabi == 1.0
    assert p.alpha == 0.0
    assert p.lambda1 == 0.0
    assert p.c1 == 1.0
    assert p.c2 == 0


def test_alpha_one_against_eigendecomposition():
    p = derive_params(SystemConfig.from_detuning(1.0, 0.5))
    energies, vectors = eigensystem(1.0, 0.5)
    assert p.alpha == pytest.approx(1.0)
    assert p.omega_rabi == pytest.approx(energies[1] - energies[0], rel=1e-14)
    assert p.omega_rabi == pytest.approx(1.4142136, abs=5e-8)
    assert p.lambda1 == pytest.approx(energies[0], abs=1e-14)
    assert p.lambda1 == pytest.approx(-0.2071068, abs=5e-8)
    assert p.c1 == pytest.approx(abs(vectors[0, 0]), abs=1e-14)
    assert abs(p.c2) == pytest.approx(abs(vectors[1, 0]), abs=1e-14)
    assert p.c1 == pytest.approx(0.9238795, abs=5e-8)
    assert abs(p.c2) == pytest.approx(0.3826834, abs=5e-8)


def test_alpha_ten_rabi_frequency():
    p = derive_params(SystemConfig.from_detuning(1.0, 5.0))
    assert p.alpha == pytest.approx(10.0)
    assert p.omega_rabi == pytest.approx(math.sqrt(101.0), rel=1e-15)
    assert p.omega_rabi == pytest.approx(10.0498756, abs=5e-8)


def test_zero_detuning_has_infinite_alpha():
    p = derive_params(SystemConfig.from_detuning(0.0, 0.75))
    assert p.alpha_infinite and math.isinf(p.alpha)
    assert p.omega_rabi == 1.5
    assert p.c1_sq == pytest.approx(0.5) and p.c2_sq == pytest.approx(0.5)


def test_degenerate_dressing_rejected():
    with pytest.raises(DegenerateDressingError, match="degenerate dressing"):
        derive_params(SystemConfig.from_detuning(0.0, 0.0))


@pytest.mark.parametrize("kwargs", [
    dict(e21=0.0, omega=1.0),
    dict(e21=1.0, omega=-1.0),
    dict(e21=1.0, omega=1.0, dipole_mag=0.0),
    dict(e21=1.0, omega=1.0, field_amp=-0.1),
    dict(e21=float("nan"), omega=1.0),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SystemConfig(**kwargs)


def test_validity_is_a_warning():
    cfg = SystemConfig(e21=1.0, omega=2.0, field_amp=0.1)
    with pytest.warns(ModelValidityWarning):
        p = derive_params(cfg)
    assert not p.within_validity
    assert p.near_resonance_ratio == pytest.approx(1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert derive_params(SystemConfig(e21=101.0, omega=100.0)).within_validity


def test_transform_identity_for_free_atom():
    u = basis_transform(params_at(0.0))
    np.testing.assert_array_equal(u, np.eye(2))


def test_transform_alpha_one():
    p = params_at(1.0)
    u = basis_transform(p)
    theta = np.angle(-p.lambda1 / p.v)
    expected = np.array([[0.9238795, 0.3826834 * np.exp(-1j * theta)],
                         [-0.3826834 * np.exp(1j * theta), 0.9238795]])
    np.testing.assert_allclose(u, expected, atol=5e-8)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-15)


def test_transform_rows_are_bare_states_on_eigenbasis():
    # row i of U holds the coordinates of the bare state i on (Phi1, Phi2)
    p = derive_params(SystemConfig.from_detuning(0.7, 0.9, phi_field=0.4, phi1=1.2, phi2=-0.3))
    _, vectors = eigensystem(p.delta, p.v_mag, p.phi0)
    u = basis_transform(p)
    overlaps = vectors.conj().T  # overlaps[k, i] = <Phi_k | i>
    np.testing.assert_allclose(np.abs(u), np.abs(overlaps.T), atol=1e-14)


def test_sideband_frequencies():
    assert sideband_frequencies(params_at(0.0)) == (99.0, 100.0, 101.0)
    lo, mid, hi = sideband_frequencies(params_at(1.0))
    assert lo == pytest.approx(98.5857864, abs=5e-8)
    assert mid == 100.0
    assert hi == pytest.approx(101.4142136, abs=5e-8)


def test_large_alpha_upper_sideband_expansion():
    p = params_at(10.0)
    upper = sideband_frequencies(p)[2]
    expansion = 100.0 + 2 * p.v_mag + p.delta / (2 * p.alpha)
    assert upper == pytest.approx(110.0498756, abs=5e-8)
    assert abs(upper - expansion) / upper < 5e-6


@given(log_alpha, signs)
def test_unitarity(log_a, sign):
    p = params_at(10.0**log_a, delta=sign)
    assert abs(p.c1**2 + abs(p.c2) ** 2 - 1.0) < 1e-12
    u = basis_transform(p)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)
    assert abs(abs(np.linalg.det(u)) - 1.0) < 1e-12


@given(st.floats(-50, 50), st.floats(0, 50), phases)
def test_parameter_invariants(delta, v_mag, phi):
    # subnormal couplings carry too few digits for a 1e-12 comparison
    assume(v_mag == 0 or v_mag >= sys.float_info.min)
    cfg = SystemConfig.from_detuning(delta, v_mag, phi_field=phi)
    if cfg.delta == 0 and cfg.v_mag == 0:
        return
    p = derive_params(cfg, warn=False)
    assert p.omega_rabi >= abs(p.delta)
    assert p.omega_rabi >= 2 * p.v_mag
    assert p.lambda1 <= 0
    assert p.c1 >= 0
    if p.v_mag > 0:
        # C2 = -(lambda1 / V) C1
        assert p.c2 == pytest.approx(-(p.lambda1 / p.v) * p.c1, rel=1e-12, abs=1e-14)


@given(st.floats(0.01, 10), st.floats(0, 10), st.floats(0.01, 10))
def test_rabi_frequency_increases_with_coupling(delta, v_mag, step):
    a = derive_params(SystemConfig.from_detuning(delta, v_mag), warn=False)
    b = derive_params(SystemConfig.from_detuning(delta, v_mag + step), warn=False)
    assert b.omega_rabi > a.omega_rabi


@given(log_alpha)
def test_detuning_sign_symmetry(log_a):
    plus = params_at(10.0**log_a, delta=1.0)
    minus = params_at(10.0**log_a, delta=-1.0)
    assert plus.omega_rabi == minus.omega_rabi
    assert plus.c1_sq + minus.c1_sq == pytest.approx(1.0, abs=1e-12)


def test_limits():
    small = params_at(1e-6)
    assert small.c1 == pytest.approx(1.0, abs=1e-12) and abs(small.c2) < 1e-6
    large = params_at(1e6)
    assert large.c1_sq == pytest.approx(0.5, abs=1e-6) and large.c2_sq == pytest.approx(0.5, abs=1e-6)
