"""
First-order emission and absorption probabilities of the dressed atom.

Table coefficients are given in units of the free-atom spontaneous
probability at the same frequency, ``dW_sp(nu) = 1``. A row with spontaneous
coefficient ``a`` and stimulated coefficient ``b`` stands for

    dW(nu) = (a + b * n(nu)) dW_sp(nu)

where ``n(nu)`` is the probe occupation. Absorption enters with a negative
sign, so ``b < 0`` means net absorption of probe photons.

Exact coefficients come straight from the dressed dipole components:
``a = |d^-(nu)|^2`` and ``b = |d^-(nu)|^2 - |d^+(nu)|^2``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .dipoles import (
    LINE_LABELS,
    Coherence,
    Regime,
    RegimeWarning,
    adiabatic_dipoles,
    element_amplitudes,
    sudden_dipoles_exact,
)
from .dressed import DressedParams

__all__ = [
    "Direction",
    "SolidAngleMode",
    "ProbeField",
    "RateEntry",
    "LinewidthResult",
    "spontaneous_rate",
    "stimulated_occupation",
    "net_rate",
    "adiabatic_table",
    "sudden_table",
    "exact_coefficients",
    "es_linewidth",
    "TABLE_ROWS",
    "default_alpha_regime",
]


class Direction(str, enum.Enum):
    EMISSION = "Emission"
    ABSORPTION = "Absorption"


class SolidAngleMode(str, enum.Enum):
    PER_SOLID_ANGLE = "per_solid_angle"
    ANGLE_INTEGRATED = "angle_integrated"


@dataclass(frozen=True)
class ProbeField:
    """Weak probe mode: occupation, propagation direction, polarization."""

    n_photons: float
    direction: tuple = (0.0, 0.0, 1.0)
    polarization: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.n_photons < 0:
            raise ValueError("n_photons must be >= 0")
        k = np.asarray(self.direction, dtype=float)
        e = np.asarray(self.polarization, dtype=complex)
        if not math.isclose(np.linalg.norm(k), 1.0, rel_tol=1e-9):
            raise ValueError("direction must be a unit vector")
        if not math.isclose(np.linalg.norm(e), 1.0, rel_tol=1e-9):
            raise ValueError("polarization must be a unit vector")
        if abs(np.dot(k, e)) > 1e-9:
            raise ValueError("polarization must be orthogonal to direction")


@dataclass(frozen=True)
class RateEntry:
    """One line of a first-order probability table."""

    freq: float
    line: str
    direction_of_process: Direction
    spont_coeff: float
    stim_coeff: float
    coherence: Coherence
    transition: str
    validity: str
    regime: str = ""
    alpha_regime: str = ""
    key: str = ""
    active: bool = True
    exact_spont: float | None = None
    exact_stim: float | None = None

    def __post_init__(self):
        if self.spont_coeff < 0:
            raise ValueError("spontaneous coefficient cannot be negative")

    def probability(self, n_photons: float) -> float:
        """Net probability in units of ``dW_sp`` for occupation ``n_photons``."""
        return self.spont_coeff + self.stim_coeff * n_photons

    @property
    def exact_coeff(self) -> float | None:
        """Exact counterpart of the row's leading coefficient."""
        if self.spont_coeff > 0 or self.stim_coeff == 0:
            return self.exact_spont
        return self.exact_stim


@dataclass(frozen=True)
class LinewidthResult:
    gamma_es: float
    n2_weight: float


# --- elementary rates -------------------------------------------------------------

def spontaneous_rate(freq: float, d_minus, e_prime=None,
                     mode: SolidAngleMode | str = SolidAngleMode.PER_SOLID_ANGLE) -> float:
    """Spontaneous emission rate in natural units (hbar = c = 1).

    ``PER_SOLID_ANGLE`` returns ``nu^3/(2 pi) |e'* . d^-|^2`` per unit solid
    angle; ``ANGLE_INTEGRATED`` sums both polarizations over the full sphere,
    ``4 nu^3 |d^-|^2 / 3``.
    """
    if freq <= 0:
        raise ValueError(f"frequency must be > 0, got {freq}")
    mode = SolidAngleMode(mode)
    d = np.atleast_1d(np.asarray(d_minus, dtype=complex))
    if mode is SolidAngleMode.ANGLE_INTEGRATED:
        return 4.0 * freq**3 * float(np.vdot(d, d).real) / 3.0
    if e_prime is None:
        raise ValueError("per-solid-angle rate needs a polarization vector")
    e = np.atleast_1d(np.asarray(e_prime, dtype=complex))
    projection = np.vdot(e, d)
    return freq**3 / (2.0 * math.pi) * abs(projection) ** 2


def stimulated_occupation(intensity: float, freq: float) -> float:
    """Photon occupation ``8 pi^3 I / nu^3`` of a spectral-angular density ``I``."""
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    return 8.0 * math.pi**3 * intensity / freq**3


def net_rate(emission_amp: complex, absorption_amp: complex, n_photons: float = 0.0, *,
             freq: float = math.nan, line: str = "", coherence: Coherence = Coherence.COHERENT,
             transition: str = "", validity: str = "") -> RateEntry:
    """Combine emission (``d^-``) and absorption (``d^+``) at one frequency.

    Stimulated emission and absorption subtract; spontaneous emission has no
    absorptive counterpart.
    """
    em = abs(emission_amp) ** 2
    ab = abs(absorption_amp) ** 2
    spont, stim = em, em - ab
    direction = Direction.EMISSION if spont + stim * n_photons >= 0 else Direction.ABSORPTION
    return RateEntry(freq=freq, line=line, direction_of_process=direction, spont_coeff=spont,
                     stim_coeff=stim, coherence=coherence, transition=transition,
                     validity=validity, exact_spont=spont, exact_stim=stim)


# --- tables -----------------------------------------------------------------------

Coeff = Callable[[float, int], float]


@dataclass(frozen=True)
class _Row:
    key: str
    regime: str            # "adiabatic" | "sudden"
    alpha_regime: Regime
    sign: int | None       # required sign of delta, None for either
    transition: str
    element: str
    shift: int
    coherence: Coherence
    spont: Coeff
    stim: Coeff
    direction: Direction
    validity: str
    # extra predicate on (alpha, sign, n) deciding whether the nominal direction holds
    condition: Callable[[float, int, float], bool] = field(default=lambda a, s, n: True)


def _zero(a, s):
    return 0.0


def _inv(a):
    return 0.0 if math.isinf(a) else 1.0 / a


_COH, _NON = Coherence.COHERENT, Coherence.NONCOHERENT
_EM, _AB = Direction.EMISSION, Direction.ABSORPTION
_S, _L = Regime.SMALL_ALPHA, Regime.LARGE_ALPHA
_A11, _A12 = "Phi1->Phi1", "Phi1->Phi2"
_S11, _S12 = "Phi'1->Phi'1", "Phi'1->Phi'2"


def _absorbs(a, s, n):
    return n > 0


def _exceeds_quartic(a, s, n):
    return n > a**4 / 16


def _spont_dominates(a, s, n):
    return 1.0 / 16 > n * _inv(a) / 4


TABLE_ROWS: tuple[_Row, ...] = (
    # adiabatic switching, alpha^2 << 1
    _Row("adiabatic/small/rayleigh", "adiabatic", _S, None, _A11, "11", 0, _COH,
         lambda a, s: a * a / 4 * (1 - a * a), _zero, _EM, "alpha^2<<1"),
    _Row("adiabatic/small/lower", "adiabatic", _S, 1, _A12, "21", -1, _NON,
         lambda a, s: a**4 / 16, lambda a, s: a**4 / 16, _EM, "alpha^2<<1, delta>0"),
    _Row("adiabatic/small/upper", "adiabatic", _S, 1, _A12, "21", 1, _NON,
         _zero, lambda a, s: -(1 - a * a / 2), _AB, "alpha^2<<1, delta>0, n>0", _absorbs),
    _Row("adiabatic/small/lower", "adiabatic", _S, -1, _A12, "21", -1, _NON,
         lambda a, s: 1 - a * a / 2, lambda a, s: 1 - a * a / 2, _EM, "alpha^2<<1, delta<0"),
    _Row("adiabatic/small/upper", "adiabatic", _S, -1, _A12, "21", 1, _NON,
         _zero, lambda a, s: -(a**4) / 16, _AB, "alpha^2<<1, delta<0, n>0", _absorbs),
    # adiabatic switching, alpha^2 >> 1
    _Row("adiabatic/large/rayleigh", "adiabatic", _L, None, _A11, "11", 0, _COH,
         lambda a, s: 0.25 * (1 - _inv(a) ** 2), _zero, _EM, "alpha^2>>1"),
    _Row("adiabatic/large/lower", "adiabatic", _L, None, _A12, "21", -1, _NON,
         lambda a, s: 0.25 * (1 - 2 * s * _inv(a)), lambda a, s: 0.25 * (1 - 2 * s * _inv(a)),
         _EM, "alpha^2>>1"),
    _Row("adiabatic/large/upper", "adiabatic", _L, None, _A12, "21", 1, _NON,
         _zero, lambda a, s: -0.25 * (1 + 2 * s * _inv(a)), _AB, "alpha^2>>1, n>0", _absorbs),
    # sudden switching, alpha^2 << 1: coherent
    _Row("sudden/small/coherent/rayleigh", "sudden", _S, None, _S11, "11", 0, _COH,
         lambda a, s: a * a / 4 * (1 - a * a), _zero, _EM, "alpha^2<<1"),
    _Row("sudden/small/coherent/lower", "sudden", _S, 1, _S11, "11", -1, _COH,
         lambda a, s: a**6 / 64, _zero, _EM, "alpha^2<<1, delta>0"),
    _Row("sudden/small/coherent/lower", "sudden", _S, -1, _S11, "11", -1, _COH,
         lambda a, s: a * a / 4 * (1 - a * a / 2), _zero, _EM, "alpha^2<<1, delta<0"),
    _Row("sudden/small/coherent/upper", "sudden", _S, 1, _S11, "11", 1, _COH,
         lambda a, s: a * a / 4 * (1 - a * a / 2), _zero, _EM, "alpha^2<<1, delta>0"),
    _Row("sudden/small/coherent/upper", "sudden", _S, -1, _S11, "11", 1, _COH,
         lambda a, s: a**6 / 64, _zero, _EM, "alpha^2<<1, delta<0"),
    # sudden switching, alpha^2 << 1: noncoherent
    _Row("sudden/small/noncoherent/rayleigh", "sudden", _S, None, _S12, "21", 0, _NON,
         lambda a, s: a**4 / 4 * (1 - a * a), _zero, _EM, "alpha^2<<1"),
    _Row("sudden/small/noncoherent/upper", "sudden", _S, 1, _S12, "21", 1, _NON,
         lambda a, s: a**4 / 16, lambda a, s: -1.0, _AB,
         "alpha^2<<1, delta>0, n>alpha^4/16", _exceeds_quartic),
    _Row("sudden/small/noncoherent/lower", "sudden", _S, 1, _S12, "21", -1, _NON,
         lambda a, s: a**4 / 16, lambda a, s: a**4 / 16, _EM, "alpha^2<<1, delta>0"),
    _Row("sudden/small/noncoherent/upper", "sudden", _S, -1, _S12, "21", 1, _NON,
         lambda a, s: a**4 / 16, lambda a, s: a**4 / 16, _EM, "alpha^2<<1, delta<0"),
    _Row("sudden/small/noncoherent/lower", "sudden", _S, -1, _S12, "21", -1, _NON,
         lambda a, s: a**4 / 16, lambda a, s: -1.0, _AB,
         "alpha^2<<1, delta<0, n>alpha^4/16", _exceeds_quartic),
    # sudden switching, alpha^2 >> 1: coherent
    _Row("sudden/large/coherent/rayleigh", "sudden", _L, None, _S11, "11", 0, _COH,
         lambda a, s: _inv(a) ** 2 / 4 * (1 - _inv(a) ** 2), _zero, _EM, "alpha^2>>1"),
    _Row("sudden/large/coherent/upper", "sudden", _L, None, _S11, "11", 1, _COH,
         lambda a, s: (1 + 2 * s * _inv(a)) / 16, _zero, _EM, "alpha^2>>1"),
    _Row("sudden/large/coherent/lower", "sudden", _L, None, _S11, "11", -1, _COH,
         lambda a, s: (1 - 2 * s * _inv(a)) / 16, _zero, _EM, "alpha^2>>1"),
    # sudden switching, alpha^2 >> 1: noncoherent
    _Row("sudden/large/noncoherent/rayleigh", "sudden", _L, None, _S12, "21", 0, _NON,
         lambda a, s: 0.25 * (1 - _inv(a) ** 2), _zero, _EM, "alpha^2>>1"),
    _Row("sudden/large/noncoherent/upper", "sudden", _L, 1, _S12, "21", 1, _NON,
         lambda a, s: (1 - 2 * _inv(a) ** 2) / 16,
         lambda a, s: -(s * _inv(a) / 4 + _inv(a) ** 2 / 2), _EM,
         "alpha^2>>1, delta>0, 1/16>n/(4 alpha)", _spont_dominates),
    _Row("sudden/large/noncoherent/upper", "sudden", _L, -1, _S12, "21", 1, _NON,
         lambda a, s: (1 - 2 * _inv(a) ** 2) / 16,
         lambda a, s: -(s * _inv(a) / 4 + _inv(a) ** 2 / 2), _EM, "alpha^2>>1, delta<0"),
    _Row("sudden/large/noncoherent/lower", "sudden", _L, 1, _S12, "21", -1, _NON,
         lambda a, s: (1 - 2 * _inv(a) ** 2) / 16,
         lambda a, s: s * _inv(a) / 4 - _inv(a) ** 2 / 2, _EM, "alpha^2>>1, delta>0"),
    _Row("sudden/large/noncoherent/lower", "sudden", _L, -1, _S12, "21", -1, _NON,
         lambda a, s: (1 - 2 * _inv(a) ** 2) / 16,
         lambda a, s: s * _inv(a) / 4 - _inv(a) ** 2 / 2, _EM,
         "alpha^2>>1, delta<0, 1/16>n/(4 alpha)", _spont_dominates),
)


def default_alpha_regime(params: DressedParams) -> Regime:
    return Regime.SMALL_ALPHA if params.alpha < 1 else Regime.LARGE_ALPHA


def _occupation(n_of_freq, shift: int) -> float:
    if n_of_freq is None:
        return 0.0
    if isinstance(n_of_freq, Mapping):
        n = float(n_of_freq.get(LINE_LABELS[shift], n_of_freq.get(shift, 0.0)))
    else:
        n = float(n_of_freq)
    if n < 0:
        raise ValueError("probe occupation must be >= 0")
    return n


def exact_coefficients(params: DressedParams, regime: str, element: str, shift: int) -> tuple[float, float]:
    """Exact ``(spontaneous, stimulated)`` coefficients of one spectral line."""
    components = adiabatic_dipoles(params) if regime == "adiabatic" else sudden_dipoles_exact(params)
    amps = element_amplitudes(components, element)
    em = abs(amps.get((-1, shift), 0j)) ** 2
    ab = abs(amps.get((1, shift), 0j)) ** 2
    return em, em - ab


def _table(params: DressedParams, regime: str, n_of_freq, alpha_regime) -> list[RateEntry]:
    if alpha_regime is None:
        alpha_regime = default_alpha_regime(params)
    alpha_regime = Regime(alpha_regime)
    if 0.5 <= params.alpha <= 2.0:
        warnings.warn(f"alpha = {params.alpha:.3g}: tabulated asymptotic forms are not controlled",
                      RegimeWarning, stacklevel=3)
    a, s = params.alpha, params.sign_delta
    components = adiabatic_dipoles(params) if regime == "adiabatic" else sudden_dipoles_exact(params)
    entries = []
    for row in TABLE_ROWS:
        if row.regime != regime or row.alpha_regime is not alpha_regime:
            continue
        if row.sign is not None and row.sign != s:
            continue
        amps = element_amplitudes(components, row.element)
        em = abs(amps.get((-1, row.shift), 0j)) ** 2
        ab = abs(amps.get((1, row.shift), 0j)) ** 2
        n = _occupation(n_of_freq, row.shift)
        entries.append(RateEntry(
            freq=params.omega + row.shift * params.omega_rabi,
            line=LINE_LABELS[row.shift],
            direction_of_process=row.direction,
            # a truncated expansion can dip below zero far outside its regime
            spont_coeff=max(row.spont(a, s), 0.0),
            stim_coeff=row.stim(a, s),
            coherence=row.coherence,
            transition=row.transition,
            validity=row.validity,
            regime=regime,
            alpha_regime=alpha_regime.value,
            key=row.key,
            active=bool(row.condition(a, s, n)),
            exact_spont=em,
            exact_stim=em - ab,
        ))
    return entries


def adiabatic_table(params: DressedParams, n_of_freq: float | Mapping | None = None,
                    alpha_regime: Regime | str | None = None) -> list[RateEntry]:
    """Probability table for adiabatic switching.

    Rows cover the coherent Rayleigh line (``Phi1 -> Phi1``) and the two
    noncoherent sidebands (``Phi1 -> Phi2``) for the sign of ``delta`` in
    ``params``. ``n_of_freq`` is a single occupation or a mapping from line
    label (``"omega"``, ``"omega-Omega"``, ``"omega+Omega"``) to occupation;
    it only affects the ``active`` flag. Each entry also carries the exact
    coefficients computed from the dipole components.
    """
    return _table(params, "adiabatic", n_of_freq, alpha_regime)


def sudden_table(params: DressedParams, n_of_freq: float | Mapping | None = None,
                 alpha_regime: Regime | str | None = None) -> list[RateEntry]:
    """Probability table for sudden switching (``Phi'1 -> Phi'1`` and ``Phi'1 -> Phi'2``)."""
    return _table(params, "sudden", n_of_freq, alpha_regime)


def es_linewidth(params: DressedParams, gamma_free: float) -> LinewidthResult:
    """Spontaneous width of the adiabatic state ``Phi1`` with no probe photons.

    The width is the free upper-level width weighted by the upper-level
    population of ``Phi1``, ``n2 = (sqrt(1 + alpha^2) - sign(delta)) / (2 sqrt(1 + alpha^2))``.
    """
    if gamma_free < 0:
        raise ValueError("gamma_free must be >= 0")
    n2 = params.c2_sq
    return LinewidthResult(gamma_es=n2 * gamma_free, n2_weight=n2)
