"""
Dressed dipole matrix elements as sums of spectral components.

A matrix element ``D_ij(t) = <state_i(t)| d |state_j(t)>`` of a driven atom is
a finite sum of terms ``amp * exp(sign * i * nu * t)`` with
``nu = omega + shift * Omega`` and ``shift`` in ``{-1, 0, +1}``. Terms with
``sign = -1`` form the negative-frequency part ``d^-`` (emission), terms with
``sign = +1`` the positive-frequency part ``d^+`` (absorption).

Every amplitude is tracked together with the integer power ``m`` of the
random phase ``exp(i(phi1 - phi2))`` it carries. A term with ``m = 0`` is
independent of the atom's random phases and radiates coherently.

Amplitudes are in units of ``|d|`` and are evaluated at the configuration's
actual phases, so ``amp`` already contains ``exp(i m (phi1 - phi2))``.
"""
from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .dressed import DressedParams, SystemConfig, derive_params

__all__ = [
    "DROP_BELOW",
    "Coherence",
    "Regime",
    "RegimeWarning",
    "DipoleComponent",
    "LINE_LABELS",
    "adiabatic_dipoles",
    "adiabatic_dipoles_asymptotic",
    "sudden_dipoles_exact",
    "sudden_dipoles_asymptotic",
    "classify_coherence",
    "two_draw_coherence",
    "evaluate_element",
    "element_amplitudes",
    "select",
    "components_to_rows",
]

DROP_BELOW = 1e-14

LINE_LABELS = {0: "omega", -1: "omega-Omega", 1: "omega+Omega"}
ELEMENTS = ("11", "12", "21", "22")


class Coherence(str, enum.Enum):
    COHERENT = "Coherent"
    NONCOHERENT = "Noncoherent"


class Regime(str, enum.Enum):
    SMALL_ALPHA = "small"
    LARGE_ALPHA = "large"


class RegimeWarning(UserWarning):
    """alpha lies where neither asymptotic expansion is controlled."""


@dataclass(frozen=True)
class DipoleComponent:
    """One spectral term of a dressed dipole matrix element."""

    element: str
    basis: str
    sign: int
    shift: int
    freq: float
    amp: complex
    phase_exponent: int

    @property
    def line(self) -> str:
        return LINE_LABELS[self.shift]

    @property
    def coherence(self) -> Coherence:
        return classify_coherence(self)

    @property
    def key(self) -> tuple:
        return (self.element, self.sign, self.shift, self.phase_exponent)

    def to_row(self) -> dict:
        return {
            "element": self.element,
            "basis": self.basis,
            "line": self.line,
            "freq": self.freq,
            "re_amp": self.amp.real,
            "im_amp": self.amp.imag,
            "phase_exponent": self.phase_exponent,
            "coherence": self.coherence.value,
        }


def classify_coherence(component: DipoleComponent) -> Coherence:
    return Coherence.COHERENT if component.phase_exponent == 0 else Coherence.NONCOHERENT


# --- term algebra -----------------------------------------------------------
#
# A ``Series`` maps (sign, shift, m) -> complex amplitude for one matrix
# element. Scalars are monomials (value, m) in the random phase.

Series = dict
Mono = tuple  # (complex value, int m)


def _mono_conj(x: Mono) -> Mono:
    return (complex(x[0]).conjugate(), -x[1])


def _scaled(series: Series, coeff: Mono) -> Series:
    value, m = coeff
    return {(s, k, mm + m): a * value for (s, k, mm), a in series.items()}


def _conj(series: Series) -> Series:
    """Complex conjugate of a time signal: flips sign and phase power."""
    return {(-s, k, -m): a.conjugate() for (s, k, m), a in series.items()}


def _add(*terms: Series) -> Series:
    out: Series = {}
    for series in terms:
        for key, a in series.items():
            out[key] = out.get(key, 0j) + a
    return out


def _to_components(matrix: dict[str, Series], params: DressedParams, basis: str) -> list[DipoleComponent]:
    out = []
    for element in ELEMENTS:
        for (sign, shift, m), amp in sorted(matrix[element].items()):
            if abs(amp) < DROP_BELOW:
                continue
            nu = params.omega + shift * params.omega_rabi
            out.append(DipoleComponent(element, basis, sign, shift, sign * nu, complex(amp), m))
    return out


def _bare_dipoles(params: DressedParams) -> tuple[Mono, Mono]:
    """``d12`` and ``d21`` in units of ``|d|`` as phase monomials."""
    z = params.phase_factor
    return (z.conjugate(), -1), (z, 1)


def _eiphi0(params: DressedParams, power: int = 1) -> Mono:
    """``exp(i * power * phi0)``; ``phi0`` carries one unit of random phase."""
    return (cmath.exp(1j * power * params.phi0), power)


# --- adiabatic basis ----------------------------------------------------------

def _adiabatic_series(params: DressedParams) -> dict[str, Series]:
    """Dipole matrix between the dressed eigenstates, built from eigenvectors.

    In the bare basis the eigenvectors of ``H = [[0, V*], [V, delta]]`` are
    ``Phi1 = (C1, -C2*)`` and ``Phi2 = (C2, C1)``, with quasi-energies
    ``lambda1 < lambda2``. Writing the lab-frame states out,

        <Phi_i|d|Phi_j> = conj(x_i1) x_j2 d12 exp(-i(omega + (j - i) Omega) t)
                        + conj(x_i2) x_j1 d21 exp(+i(omega + (i - j) Omega) t)
    """
    d12, d21 = _bare_dipoles(params)
    c1 = (params.c1, 0)
    c2 = (params.c2, -1)
    c2c = _mono_conj(c2)
    vectors = {
        1: ((c1[0], c1[1]), (-c2c[0], c2c[1])),
        2: (c2, c1),
    }
    matrix = {}
    for i in (1, 2):
        for j in (1, 2):
            xi, xj = vectors[i], vectors[j]
            first = _mono_conj(xi[0])
            second = _mono_conj(xi[1])
            term_minus = (first[0] * xj[1][0] * d12[0], first[1] + xj[1][1] + d12[1])
            term_plus = (second[0] * xj[0][0] * d21[0], second[1] + xj[0][1] + d21[1])
            series = {}
            series[(-1, j - i, term_minus[1])] = term_minus[0]
            key = (1, i - j, term_plus[1])
            series[key] = series.get(key, 0j) + term_plus[0]
            matrix[f"{i}{j}"] = series
    return matrix


def adiabatic_dipoles(params: DressedParams) -> list[DipoleComponent]:
    """Exact dipole components ``D_ij`` for adiabatic switching."""
    return _to_components(_adiabatic_series(params), params, "adiabatic")


# --- sudden basis -------------------------------------------------------------

def _transform_monomials(params: DressedParams) -> dict[tuple[int, int], Mono]:
    c2 = params.c2
    return {
        (1, 1): (params.c1, 0),
        (1, 2): (c2.conjugate(), 1),
        (2, 1): (-c2, -1),
        (2, 2): (params.c1, 0),
    }


def _sudden_series(params: DressedParams) -> dict[str, Series]:
    """``D'_ij = sum_ab conj(U_ia) U_jb D_ab``, one congruence per spectral line."""
    adiabatic = _adiabatic_series(params)
    u = _transform_monomials(params)
    matrix = {}
    for i in (1, 2):
        for j in (1, 2):
            parts = []
            for a in (1, 2):
                for b in (1, 2):
                    left = _mono_conj(u[(i, a)])
                    right = u[(j, b)]
                    coeff = (left[0] * right[0], left[1] + right[1])
                    parts.append(_scaled(adiabatic[f"{a}{b}"], coeff))
            matrix[f"{i}{j}"] = _add(*parts)
    return matrix


def sudden_dipoles_exact(params: DressedParams) -> list[DipoleComponent]:
    """Exact dipole components ``D'_ij`` for sudden switching."""
    return _to_components(_sudden_series(params), params, "sudden")


# --- truncated closed forms ---------------------------------------------------

def _check_regime(params: DressedParams, regime: Regime) -> Regime:
    regime = Regime(regime)
    if 0.5 <= params.alpha <= 2.0:
        warnings.warn(f"alpha = {params.alpha:.3g}: neither asymptotic expansion is controlled",
                      RegimeWarning, stacklevel=3)
    elif regime is Regime.SMALL_ALPHA and params.alpha > 1:
        warnings.warn(f"small-alpha forms used at alpha = {params.alpha:.3g}",
                      RegimeWarning, stacklevel=3)
    elif regime is Regime.LARGE_ALPHA and params.alpha < 1:
        warnings.warn(f"large-alpha forms used at alpha = {params.alpha:.3g}",
                      RegimeWarning, stacklevel=3)
    return regime


def _asymptotic_adiabatic_series(params: DressedParams, regime: Regime) -> dict[str, Series]:
    a = params.alpha
    s = params.sign_delta
    d12, d21 = _bare_dipoles(params)
    e1 = _eiphi0(params, 1)
    em1 = _eiphi0(params, -1)
    em2 = _eiphi0(params, -2)

    if regime is Regime.SMALL_ALPHA:
        rayleigh = 0.5 * a * (1 - 0.5 * a * a)
        # D11 = rayleigh e^{i phi0} d12 e^{-i omega t} + c.c.
        d11 = {(-1, 0, e1[1] + d12[1]): rayleigh * e1[0] * d12[0]}
        d11 = _add(d11, _conj(d11))
        big, small = 1 - 0.25 * a * a, 0.25 * a * a
        upper, lower = (big, small) if s > 0 else (small, big)
    else:
        inv = 0.0 if params.alpha_infinite else 1.0 / a
        rayleigh = -0.5 * (1 - 0.5 * inv * inv)
        # D11 = rayleigh (e^{-i phi0} d21 e^{i omega t} + c.c.)
        d11 = {(1, 0, em1[1] + d21[1]): rayleigh * em1[0] * d21[0]}
        d11 = _add(d11, _conj(d11))
        upper, lower = 0.5 * (1 + s * inv), 0.5 * (1 - s * inv)

    # D12 = upper d12 e^{-i(omega+Omega)t} - lower d21 e^{+i(omega-Omega)t - 2i phi0}
    d12_series = {
        (-1, 1, d12[1]): upper * d12[0],
        (1, -1, d21[1] + em2[1]): -lower * d21[0] * em2[0],
    }
    minus_d11 = _scaled(d11, (-1.0, 0))
    return {"11": d11, "12": d12_series, "21": _conj(d12_series), "22": minus_d11}


def adiabatic_dipoles_asymptotic(params: DressedParams, regime: Regime | str) -> list[DipoleComponent]:
    """Truncated small- or large-alpha forms of the adiabatic components."""
    regime = _check_regime(params, regime)
    return _to_components(_asymptotic_adiabatic_series(params, regime), params, "adiabatic")


def sudden_dipoles_asymptotic(params: DressedParams, regime: Regime | str) -> list[DipoleComponent]:
    """Truncated small- or large-alpha forms of the sudden-switching components.

    Small alpha::

        D'11 = sign(delta) D11 - (alpha/2) (e^{i phi0} D12 + c.c.)
        D'12 = (1 - alpha^2/4) D12 - (alpha^2/4) e^{-2i phi0} D21 + alpha e^{-i phi0} D11   (delta > 0)
        D'12 = (alpha^2/4) D12 - (1 - alpha^2/4) e^{-2i phi0} D21 + alpha e^{-i phi0} D11   (delta < 0)

    Large alpha::

        D'11 = (sign(delta)/alpha) D11 - (1/2) (e^{i phi0} D12 + c.c.)
        D'12 = (1/2)(1 + sign(delta)/alpha) D12 - (1/2)(1 - sign(delta)/alpha) e^{-2i phi0} D21
               + e^{-i phi0} D11

    where ``D11``, ``D12`` are themselves the truncated adiabatic forms.
    """
    regime = _check_regime(params, regime)
    adiabatic = _asymptotic_adiabatic_series(params, regime)
    a = params.alpha
    s = params.sign_delta
    d11, d12, d21 = adiabatic["11"], adiabatic["12"], adiabatic["21"]
    e1 = _eiphi0(params, 1)
    em1 = _eiphi0(params, -1)
    em2 = _eiphi0(params, -2)

    if regime is Regime.SMALL_ALPHA:
        diag_coeff, cross = float(s), 0.5 * a
        if s > 0:
            keep, swap = 1 - 0.25 * a * a, 0.25 * a * a
        else:
            keep, swap = 0.25 * a * a, 1 - 0.25 * a * a
        rayleigh = a
    else:
        inv = 0.0 if params.alpha_infinite else 1.0 / a
        diag_coeff, cross = s * inv, 0.5
        keep, swap = 0.5 * (1 + s * inv), 0.5 * (1 - s * inv)
        rayleigh = 1.0

    cross_term = _scaled(d12, (cross * e1[0], e1[1]))
    dp11 = _add(_scaled(d11, (diag_coeff, 0)), _scaled(_add(cross_term, _conj(cross_term)), (-1.0, 0)))
    dp12 = _add(
        _scaled(d12, (keep, 0)),
        _scaled(d21, (-swap * em2[0], em2[1])),
        _scaled(d11, (rayleigh * em1[0], em1[1])),
    )
    matrix = {"11": dp11, "12": dp12, "21": _conj(dp12), "22": _scaled(dp11, (-1.0, 0))}
    return _to_components(matrix, params, "sudden")


# --- coherence verification -----------------------------------------------------

def two_draw_coherence(
    component: DipoleComponent,
    cfg: SystemConfig,
    builder: Callable[[DressedParams], list[DipoleComponent]],
    rng: np.random.Generator,
    rtol: float = 1e-9,
) -> Coherence:
    """Classify a component by re-evaluating it at two random phase draws.

    The field phase is held fixed; only the atomic phases are redrawn. The
    component is coherent if its amplitude is the same in both draws.
    """
    amps = []
    for _ in range(2):
        phi1, phi2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
        params = derive_params(cfg.with_phases(phi1, phi2), warn=False)
        match = [c.amp for c in builder(params) if c.key == component.key]
        amps.append(match[0] if match else 0j)
    scale = max(abs(amps[0]), abs(amps[1]), 1e-300)
    same = abs(amps[0] - amps[1]) <= rtol * scale
    return Coherence.COHERENT if same else Coherence.NONCOHERENT


# --- helpers --------------------------------------------------------------------

def element_amplitudes(components: Iterable[DipoleComponent], element: str) -> dict[tuple[int, int], complex]:
    """Sum amplitudes of one element per ``(sign, shift)`` over phase powers."""
    out: dict[tuple[int, int], complex] = {}
    for c in components:
        if c.element == element:
            out[(c.sign, c.shift)] = out.get((c.sign, c.shift), 0j) + c.amp
    return out


def select(components: Iterable[DipoleComponent], element: str, shift: int, sign: int = -1) -> list[DipoleComponent]:
    return [c for c in components if c.element == element and c.shift == shift and c.sign == sign]


def evaluate_element(components: Iterable[DipoleComponent], element: str, t) -> np.ndarray:
    """Time-domain value of one matrix element, in units of ``|d|``."""
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t, dtype=complex)
    for c in components:
        if c.element == element:
            total += c.amp * np.exp(1j * c.freq * t)
    return total


def components_to_rows(components: Iterable[DipoleComponent]) -> list[dict]:
    return [c.to_row() for c in components]
