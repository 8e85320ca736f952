"""Radiative properties of a two-level atom dressed by a strong near-resonant field."""
from .dipoles import (
    Coherence,
    DipoleComponent,
    Regime,
    adiabatic_dipoles,
    adiabatic_dipoles_asymptotic,
    classify_coherence,
    sudden_dipoles_asymptotic,
    sudden_dipoles_exact,
)
from .dressed import (
    DegenerateDressingError,
    DressedParams,
    ModelValidityWarning,
    SystemConfig,
    basis_transform,
    derive_params,
    sideband_frequencies,
)
from .ensemble import ensemble_intensity, scaling_exponent
from .oracle import SwitchingProfile, extract_components, matrix_element_oracle, propagate
from .rates import adiabatic_table, es_linewidth, net_rate, spontaneous_rate, stimulated_occupation, sudden_table

__all__ = [
    "Coherence",
    "DipoleComponent",
    "Regime",
    "adiabatic_dipoles",
    "adiabatic_dipoles_asymptotic",
    "classify_coherence",
    "sudden_dipoles_asymptotic",
    "sudden_dipoles_exact",
    "DegenerateDressingError",
    "DressedParams",
    "ModelValidityWarning",
    "SystemConfig",
    "basis_transform",
    "derive_params",
    "sideband_frequencies",
    "ensemble_intensity",
    "scaling_exponent",
    "SwitchingProfile",
    "extract_components",
    "matrix_element_oracle",
    "propagate",
    "adiabatic_table",
    "es_linewidth",
    "net_rate",
    "spontaneous_rate",
    "stimulated_occupation",
    "sudden_table",
]
