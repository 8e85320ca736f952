"""
Emission from many dressed atoms with independent random phases.

The field radiated at one spectral line by ``N`` atoms at positions ``r_i``
is proportional to ``|sum_i a_i exp(i (k - k') . r_i)|^2``. Here the
per-atom amplitude is ``a_i = sum_c amp_c exp(i m_c (phi1_i - phi2_i))``.
Components with ``m = 0`` add in amplitude (intensity ~ N^2). Components with
``m != 0`` add in intensity once averaged over phases (intensity ~ N).

Random numbers come from numpy's PCG64 generator. Trials are processed in
fixed-size batches and batch ``b`` is seeded with ``SeedSequence([seed, b])``.
The result therefore depends only on ``(seed, n_trials)``, whether batches
run serially or in parallel.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dipoles import DipoleComponent, adiabatic_dipoles, sudden_dipoles_exact
from .dressed import DressedParams, SystemConfig, derive_params

__all__ = [
    "AtomSite",
    "Selector",
    "COHERENT",
    "NONCOHERENT",
    "EnsembleResult",
    "random_sites",
    "selector_terms",
    "single_shot_intensity",
    "ensemble_intensity",
    "scaling_exponent",
    "ensemble_scan",
    "fit_exponent",
    "ScalingResult",
]

BATCH_TRIALS = 256


@dataclass(frozen=True)
class AtomSite:
    position: tuple[float, float, float]
    phi1: float = 0.0
    phi2: float = 0.0


@dataclass(frozen=True)
class Selector:
    """Picks the spectral components of one matrix element at one line."""

    basis: str
    element: str
    shift: int
    sign: int = -1

    def components(self, params: DressedParams) -> list[DipoleComponent]:
        builder = adiabatic_dipoles if self.basis == "adiabatic" else sudden_dipoles_exact
        return [c for c in builder(params)
                if c.element == self.element and c.shift == self.shift and c.sign == self.sign]


# Rayleigh line of Phi1 -> Phi1 and the omega-Omega sideband of Phi1 -> Phi2
COHERENT = Selector("adiabatic", "11", 0)
NONCOHERENT = Selector("adiabatic", "21", -1)


@dataclass(frozen=True)
class EnsembleResult:
    mean: float
    variance: float
    n_trials: int

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.n_trials) if self.n_trials > 1 else 0.0


def random_sites(n_atoms: int, side: float, rng: np.random.Generator) -> list[AtomSite]:
    """Uniform positions in a cube of edge ``side`` with uniform random phases."""
    pos = rng.uniform(-0.5 * side, 0.5 * side, size=(n_atoms, 3))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(n_atoms, 2))
    return [AtomSite(tuple(p), float(a), float(b)) for p, (a, b) in zip(pos, phases)]


def selector_terms(cfg: SystemConfig, selectors: Selector | Sequence[Selector]) -> list[tuple[complex, int]]:
    """Amplitudes at zero atomic phase together with their phase powers."""
    if isinstance(selectors, Selector):
        selectors = [selectors]
    params = derive_params(cfg.with_phases(0.0, 0.0), warn=False)
    terms = []
    for sel in selectors:
        found = sel.components(params)
        if not found:
            raise ValueError(f"selector {sel} has no nonzero component at alpha = {params.alpha:.6g}")
        terms.extend((c.amp, c.phase_exponent) for c in found)
    return terms


def _geometry(sites: Sequence[AtomSite], k_in, k_out) -> np.ndarray:
    if not sites:
        raise ValueError("empty site list")
    pos = np.array([s.position for s in sites], dtype=float)
    dk = np.asarray(k_in, dtype=float) - np.asarray(k_out, dtype=float)
    return np.exp(1j * pos @ dk)


def _amplitudes(terms, dphi: np.ndarray) -> np.ndarray:
    total = np.zeros(dphi.shape, dtype=complex)
    for amp, m in terms:
        total += amp if m == 0 else amp * np.exp(1j * m * dphi)
    return total


def single_shot_intensity(sites: Sequence[AtomSite], terms, k_in, k_out) -> float:
    """Intensity for the phases stored on the sites (no averaging)."""
    geo = _geometry(sites, k_in, k_out)
    dphi = np.array([s.phi1 - s.phi2 for s in sites])
    return float(abs(np.sum(_amplitudes(terms, dphi) * geo)) ** 2)


def _batch(terms, geo: np.ndarray, seed: int, index: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(size, geo.size, 2))
    dphi = phases[..., 0] - phases[..., 1]
    field = np.sum(_amplitudes(terms, dphi) * geo, axis=1)
    return np.abs(field) ** 2


def ensemble_intensity(sites: Sequence[AtomSite], terms, k_in, k_out, n_trials: int,
                       rng_seed: int, workers: int = 1) -> EnsembleResult:
    """Monte Carlo mean of the radiated intensity over fresh phase draws.

    Positions are held fixed; ``phi1`` and ``phi2`` of every atom are redrawn
    in each trial. Identical ``(rng_seed, n_trials)`` give bit-identical
    results for any ``workers``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    geo = _geometry(sites, k_in, k_out)
    # keep each batch's phase array around a few MB
    batch = max(1, min(BATCH_TRIALS, 200_000 // geo.size))
    sizes = [min(batch, n_trials - start) for start in range(0, n_trials, batch)]
    jobs = [(terms, geo, rng_seed, i, size) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda job: _batch(*job), jobs))
    else:
        chunks = [_batch(*job) for job in jobs]
    values = np.concatenate(chunks)
    variance = float(values.var(ddof=1)) if n_trials > 1 else 0.0
    return EnsembleResult(float(values.mean()), variance, n_trials)


@dataclass(frozen=True)
class ScalingResult:
    n_grid: tuple[int, ...]
    results: tuple[EnsembleResult, ...]
    exponent: float


def ensemble_scan(cfg: SystemConfig, selectors, n_grid: Sequence[int], n_trials: int, rng_seed: int,
                  side: float = 200.0, k_in=(0.0, 0.0, 1.0), k_out=(0.0, 0.0, 1.0),
                  workers: int = 1) -> tuple[EnsembleResult, ...]:
    """Mean intensity for each atom number in ``n_grid``.

    Each ``N`` gets its own quenched geometry drawn from ``SeedSequence([seed, N, 1])``
    and its own phase stream seeded with ``seed + N``.
    """
    if side <= 0:
        raise ValueError("side must be > 0")
    terms = selector_terms(cfg, selectors)
    results = []
    for n in n_grid:
        n = int(n)
        if n < 1:
            raise ValueError("atom numbers must be >= 1")
        geo_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([rng_seed, n, 1])))
        sites = random_sites(n, side, geo_rng)
        results.append(ensemble_intensity(sites, terms, k_in, k_out, n_trials, rng_seed + n, workers))
    return tuple(results)


def fit_exponent(n_grid: Sequence[int], means: Sequence[float]) -> float:
    """Least-squares slope of ``log(mean)`` against ``log(N)``."""
    return float(np.polyfit(np.log(np.asarray(n_grid, dtype=float)), np.log(np.asarray(means)), 1)[0])


def scaling_exponent(cfg: SystemConfig, selectors, n_grid: Sequence[int], n_trials: int,
                     rng_seed: int, side: float = 200.0, k_in=(0.0, 0.0, 1.0),
                     k_out=(0.0, 0.0, 1.0), workers: int = 1) -> ScalingResult:
    """Log-log slope of the mean intensity versus atom number."""
    n_grid = tuple(int(n) for n in n_grid)
    if len(n_grid) < 4 or max(n_grid) / min(n_grid) < 100:
        raise ValueError("N grid needs >= 4 points spanning >= 2 decades")
    results = ensemble_scan(cfg, selectors, n_grid, n_trials, rng_seed, side, k_in, k_out, workers)
    return ScalingResult(n_grid, results, fit_exponent(n_grid, [r.mean for r in results]))
