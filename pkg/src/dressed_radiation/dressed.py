"""
Dressed-state parameters of a two-level atom in a strong near-resonant field.

Natural units are used throughout: hbar = 1, so every energy is an angular
frequency and the coupling is ``|V| = |E| |d|``.

Two orthonormal bases describe the driven atom. The adiabatic basis
(``Phi1``, ``Phi2``) is made of the eigenvectors of the rotating-frame
Hamiltonian. The sudden basis (``Phi'1``, ``Phi'2``) coincides with the bare
atomic states at the moment the field is switched on. They are related by

    Phi'1 =  C1 Phi1 + C2* Phi2
    Phi'2 = -C2 Phi1 + C1  Phi2

with ``C1 = sqrt((1 + delta/Omega)/2)`` real and ``C2 = -(lambda1/V) C1``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "NEAR_RESONANCE_LIMIT",
    "DegenerateDressingError",
    "ModelValidityWarning",
    "SystemConfig",
    "DressedParams",
    "derive_params",
    "basis_transform",
    "sideband_frequencies",
]

# |delta|/E21 above this is flagged as outside the near-resonance model
NEAR_RESONANCE_LIMIT = 0.1


class DegenerateDressingError(ValueError):
    """Raised when both the field and the detuning vanish (Omega = 0)."""


class ModelValidityWarning(UserWarning):
    """The configuration is evaluable but outside the near-resonance regime."""


@dataclass(frozen=True)
class SystemConfig:
    """Physical inputs of a single driven two-level atom.

    Attributes
    ----------
    e21 : float
        Transition frequency ``E2 - E1`` (angular frequency), > 0.
    omega : float
        Carrier angular frequency of the strong field, > 0.
    dipole_mag : float
        Magnitude ``|d|`` of the 1-2 transition dipole, > 0.
    field_amp : float
        Strong-field amplitude ``|E|``, >= 0.
    phi_field : float
        Deterministic phase of the field.
    phi1, phi2 : float
        Random phases of the lower and upper atomic wave functions.
    """

    e21: float
    omega: float
    dipole_mag: float = 1.0
    field_amp: float = 0.0
    phi_field: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        for name in ("e21", "omega", "dipole_mag", "field_amp", "phi_field", "phi1", "phi2"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.e21 <= 0:
            raise ValueError(f"e21 must be > 0, got {self.e21}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.dipole_mag <= 0:
            raise ValueError(f"dipole_mag must be > 0, got {self.dipole_mag}")
        if self.field_amp < 0:
            raise ValueError(f"field_amp must be >= 0, got {self.field_amp}")

    @classmethod
    def from_detuning(cls, delta, v_mag, omega=100.0, dipole_mag=1.0,
                      phi_field=0.0, phi1=0.0, phi2=0.0) -> SystemConfig:
        """Build a config from the detuning and the coupling ``|V|``."""
        return cls(e21=omega + delta, omega=omega, dipole_mag=dipole_mag,
                   field_amp=v_mag / dipole_mag, phi_field=phi_field,
                   phi1=phi1, phi2=phi2)

    @classmethod
    def from_alpha(cls, alpha, delta=1.0, omega=100.0, **kwargs) -> SystemConfig:
        """Build a config with saturation parameter ``alpha = 2|V|/|delta|``."""
        if delta == 0:
            raise ValueError("alpha is undefined at zero detuning; use from_detuning")
        return cls.from_detuning(delta, 0.5 * alpha * abs(delta), omega=omega, **kwargs)

    @property
    def delta(self) -> float:
        return self.e21 - self.omega

    @property
    def v_mag(self) -> float:
        return self.field_amp * self.dipole_mag

    @property
    def near_resonance_ratio(self) -> float:
        return abs(self.delta) / self.e21

    def with_phases(self, phi1: float, phi2: float) -> SystemConfig:
        return replace(self, phi1=phi1, phi2=phi2)


@dataclass(frozen=True)
class DressedParams:
    """Derived dressed-state quantities (all frequencies in angular units).

    ``c1`` and ``|C2|`` come from cancellation-free expressions, so they stay
    accurate for ``alpha`` down to ~1e-8 and up to ~1e8, and the small one
    does not underflow for tiny couplings.
    """

    delta: float
    v_mag: float
    phi0: float
    alpha: float
    omega_rabi: float
    lambda1: float
    c1: float
    c2: complex
    c2_sq: float
    omega: float
    random_phase: float
    phi_field: float
    near_resonance_ratio: float

    @property
    def alpha_infinite(self) -> bool:
        return math.isinf(self.alpha)

    @property
    def sign_delta(self) -> int:
        # +1 at delta == 0; every sign(delta)/alpha term vanishes there anyway
        return -1 if self.delta < 0 else 1

    @property
    def v(self) -> complex:
        """Complex coupling ``V = |V| exp(i phi0 - i pi)``."""
        return self.v_mag * cmath.exp(1j * (self.phi0 - math.pi))

    @property
    def lambda2(self) -> float:
        return 0.5 * (self.delta + self.omega_rabi)

    @property
    def c1_sq(self) -> float:
        return self.c1 * self.c1

    @property
    def within_validity(self) -> bool:
        return self.near_resonance_ratio <= NEAR_RESONANCE_LIMIT

    @property
    def phase_factor(self) -> complex:
        """``exp(i(phi1 - phi2))``, the random phase carried by ``d21``."""
        return cmath.exp(1j * self.random_phase)


def _omega_pm(delta: float, v_mag: float) -> tuple[float, float, float]:
    """Return ``(Omega, Omega + delta, Omega - delta)`` without cancellation."""
    omega_rabi = math.hypot(delta, 2.0 * v_mag)
    two_v = 2.0 * v_mag
    # (2v)(2v / x) rather than 4v^2 / x: the square underflows for tiny couplings
    if delta >= 0:
        plus = omega_rabi + delta
        minus = two_v * (two_v / plus)
    else:
        minus = omega_rabi - delta
        plus = two_v * (two_v / minus)
    return omega_rabi, plus, minus


def derive_params(cfg: SystemConfig, warn: bool = True) -> DressedParams:
    """Compute the dressed-state parameters of ``cfg``.

    Raises
    ------
    DegenerateDressingError
        If both the detuning and the coupling are zero.
    """
    delta = cfg.delta
    v_mag = cfg.v_mag
    if delta == 0 and v_mag == 0:
        raise DegenerateDressingError(
            "degenerate dressing: zero field and zero detuning give Omega = 0")
    if warn and cfg.near_resonance_ratio > NEAR_RESONANCE_LIMIT:
        warnings.warn(
            f"|delta|/E21 = {cfg.near_resonance_ratio:.3g} exceeds {NEAR_RESONANCE_LIMIT}; "
            "outside model validity", ModelValidityWarning, stacklevel=2)

    omega_rabi, plus, minus = _omega_pm(delta, v_mag)
    # the small amplitude is 2|V|/sqrt(2 Omega (Omega +- delta)), kept off the
    # squared form so it does not underflow for tiny couplings
    if delta >= 0:
        c1_abs = math.sqrt(plus / (2.0 * omega_rabi))
        c2_abs = 2.0 * v_mag / (math.sqrt(2.0 * omega_rabi) * math.sqrt(plus))
    else:
        c1_abs = 2.0 * v_mag / (math.sqrt(2.0 * omega_rabi) * math.sqrt(minus))
        c2_abs = math.sqrt(minus / (2.0 * omega_rabi))
    c2_sq = c2_abs * c2_abs
    lambda1 = -0.5 * minus
    alpha = math.inf if delta == 0 else 2.0 * v_mag / abs(delta)
    phi0 = cfg.phi_field + cfg.phi1 - cfg.phi2
    # C2 = -(lambda1/V) C1 with lambda1 <= 0; written in polar form so that it
    # stays defined when V = 0 (then |C2| is 0 or 1 depending on sign(delta)).
    c2 = c2_abs * cmath.exp(1j * (math.pi - phi0))
    return DressedParams(
        delta=delta,
        v_mag=v_mag,
        phi0=phi0,
        alpha=alpha,
        omega_rabi=omega_rabi,
        lambda1=lambda1,
        c1=c1_abs,
        c2=c2,
        c2_sq=c2_sq,
        omega=cfg.omega,
        random_phase=cfg.phi1 - cfg.phi2,
        phi_field=cfg.phi_field,
        near_resonance_ratio=cfg.near_resonance_ratio,
    )


def basis_transform(params: DressedParams) -> np.ndarray:
    """Unitary ``U`` with ``(Phi'1, Phi'2)^T = U (Phi1, Phi2)^T``."""
    c1, c2 = params.c1, params.c2
    return np.array([[c1, c2.conjugate()], [-c2, c1]], dtype=complex)


def sideband_frequencies(params: DressedParams) -> tuple[float, float, float]:
    """Emission frequencies ``(omega - Omega, omega, omega + Omega)``."""
    return (params.omega - params.omega_rabi, params.omega, params.omega + params.omega_rabi)
