"""
Independent reference computations used as test oracles.

Nothing here uses the package's closed forms. Dressed states come from
``numpy.linalg.eigh`` of the rotating-frame Hamiltonian, dipole matrix
elements are sampled in the time domain and their spectral components are
recovered by linear least squares on the six candidate frequencies.
"""
from __future__ import annotations

import cmath
import math

import numpy as np


def hamiltonian(delta: float, v_mag: float, phi0: float) -> np.ndarray:
    v = v_mag * cmath.exp(1j * (phi0 - math.pi))
    return np.array([[0.0, v.conjugate()], [v, delta]], dtype=complex)


def eigensystem(delta: float, v_mag: float, phi0: float = 0.0):
    """Quasi-energies (ascending) and eigenvectors as columns."""
    return np.linalg.eigh(hamiltonian(delta, v_mag, phi0))


def _states(delta, v_mag, phi0, basis):
    """Rotating-frame states as functions of time, one per column."""
    energies, vectors = eigensystem(delta, v_mag, phi0)
    if basis == "adiabatic":
        coeff = np.eye(2)
    else:
        # bare state |i> at t = 0 expanded on the eigenvectors
        coeff = vectors.conj().T

    def at(t):
        phases = np.exp(-1j * np.outer(t, energies))  # (nt, 2)
        # state_i(t) = sum_k coeff[k, i] phases[k] vectors[:, k]
        return np.einsum("ak,tk,ki->tai", vectors, phases, coeff)

    return at


def dipole_samples(delta, v_mag, omega, phi_field=0.0, phi1=0.0, phi2=0.0, basis="adiabatic", t=None):
    """Time samples of all four ``<state_i|d|state_j>`` in units of ``|d|``."""
    phi0 = phi_field + phi1 - phi2
    z = cmath.exp(1j * (phi1 - phi2))
    d12, d21 = z.conjugate(), z
    omega_rabi = math.hypot(delta, 2 * v_mag)
    if t is None:
        span = 6 * 2 * math.pi / min(omega_rabi, omega)
        t = np.linspace(0.0, span, 4001)
    states = _states(delta, v_mag, phi0, basis)(t)
    lab = states.copy()
    lab[:, 1, :] *= np.exp(-1j * omega * t)[:, None]
    out = {}
    for i in range(2):
        for j in range(2):
            a, b = lab[:, :, i], lab[:, :, j]
            out[f"{i + 1}{j + 1}"] = np.conj(a[:, 0]) * b[:, 1] * d12 + np.conj(a[:, 1]) * b[:, 0] * d21
    return t, out


def spectral_fit(t, signal, omega, omega_rabi):
    """Amplitudes of ``exp(i f t)`` for ``f`` in ``{s (omega + k Omega)}``.

    Returns a dict keyed by ``(s, k)`` with ``s`` in ``{-1, 1}`` and ``k`` in
    ``{-1, 0, 1}``.
    """
    keys = [(s, k) for s in (-1, 1) for k in (-1, 0, 1)]
    design = np.column_stack([np.exp(1j * s * (omega + k * omega_rabi) * t) for s, k in keys])
    coef, *_ = np.linalg.lstsq(design, signal, rcond=None)
    return dict(zip(keys, coef))


def reference_components(delta, v_mag, omega, basis="adiabatic", **phases):
    """``{element: {(sign, shift): amplitude}}`` from sampling and fitting."""
    t, samples = dipole_samples(delta, v_mag, omega, basis=basis, **phases)
    omega_rabi = math.hypot(delta, 2 * v_mag)
    return {el: spectral_fit(t, sig, omega, omega_rabi) for el, sig in samples.items()}


def rabi_population(v_mag: float, t):
    """Upper-state population for resonant driving from the lower state."""
    return np.sin(v_mag * np.asarray(t)) ** 2


def uniform_phase_mean_intensity(amplitude_sq: float, n_atoms: int) -> float:
    """``E|sum_i a e^{i theta_i}|^2 = N |a|^2`` for i.i.d. uniform phases."""
    return n_atoms * amplitude_sq
