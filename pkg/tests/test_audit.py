import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dressed_radiation.audit import (
    LARGE_GRID,
    SMALL_GRID,
    audit_findings,
    convergence_checks,
    convergence_order,
)

REQUIRED = {
    "sideband_small_alpha_expansion",
    "sudden_noncoherent_upper_occupation",
    "sudden_coherent_lower_sideband_label",
    "sudden_noncoherent_absorption_bracket",
}


def test_default_audit_lists_required_findings():
    findings = audit_findings()
    names = {f.name for f in findings}
    assert len(findings) >= 4
    assert REQUIRED <= names
    for f in findings:
        assert f.relative_gap > 0.01
        assert f.evidence


def test_findings_survive_tolerances_up_to_ten_percent():
    assert audit_findings(tol=0.1)
    counts = [len(audit_findings(tol=t)) for t in (0.0, 0.01, 0.1, 0.5, 1.5)]
    assert counts == sorted(counts, reverse=True)


def test_audit_is_deterministic():
    assert audit_findings() == audit_findings()


def test_audit_rejects_negative_tolerance():
    with pytest.raises(ValueError):
        audit_findings(tol=-1.0)


def test_small_alpha_sideband_factor_tends_to_half():
    (f,) = [f for f in audit_findings(alpha_small=0.01) if f.name == "sideband_small_alpha_expansion"]
    assert f.tabulated == 1.0
    assert f.exact == pytest.approx(0.5, abs=1e-4)


@given(st.floats(0.5, 4), st.floats(0.1, 10))
def test_convergence_order_recovers_power_law(order, scale):
    errs = [scale * a**order for a in SMALL_GRID]
    assert convergence_order(SMALL_GRID, errs, "small") == pytest.approx(order, abs=1e-9)
    errs = [scale * a ** (-order) for a in LARGE_GRID]
    assert convergence_order(LARGE_GRID, errs, "large") == pytest.approx(order, abs=1e-9)


def test_dipole_asymptotics_converge_at_second_order():
    checks = [c for c in convergence_checks() if c.name.startswith("dipole/")]
    assert checks
    failing = [c.name for c in checks if not c.passed]
    assert failing == []


def test_adiabatic_table_converges_at_second_order():
    checks = [c for c in convergence_checks() if c.name.startswith("table/adiabatic/")]
    assert len(checks) >= 8
    assert all(c.passed for c in checks)


def test_vanishing_parts_are_exact():
    for c in convergence_checks():
        if c.exact_match:
            assert max(c.rel_errors) < 1e-13
            assert math.isinf(c.order)
