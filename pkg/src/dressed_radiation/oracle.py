"""
Time-domain check of the dressed dipole components.

The two-level Schroedinger equation is integrated in the frame rotating at
the carrier frequency,

    i d/dt (a1, a2) = [[0, V* f(t)], [V f(t), delta]] (a1, a2)

with ``V = |V| exp(i phi0 - i pi)`` and a switch-on envelope ``f(t)``. Lab
amplitudes are ``c1 = a1 exp(-i E1 t)`` and ``c2 = a2 exp(-i (E1 + omega) t)``.
So a dipole matrix element between propagated states a and b reads

    <a|d|b> = conj(a1) b2 d12 exp(-i omega t) + conj(a2) b1 d21 exp(+i omega t)

Once the field is fully on, each product oscillates at ``0, +-Omega``. A linear
least-squares fit of ``c0 + c+ exp(i Omega t) + c- exp(-i Omega t)`` then yields
the component amplitudes at ``omega`` and ``omega -+ Omega``.

Integration uses scipy's DOP853 (Dormand-Prince 8(5,3) embedded pair). The
local error target is ``tol / 100`` (floored at 3e-14): global error grows
with the number of steps, and this margin keeps the norm drift of windows
spanning thousands of time units below ``10 tol``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .dipoles import LINE_LABELS, DipoleComponent, adiabatic_dipoles, element_amplitudes, sudden_dipoles_exact
from .dressed import DressedParams, SystemConfig, derive_params

__all__ = [
    "IntegrationError",
    "FitError",
    "ProfileKind",
    "SwitchingProfile",
    "Trajectory",
    "LineFit",
    "OracleResult",
    "OracleMatrix",
    "propagate",
    "fit_lines",
    "extract_components",
    "matrix_element_oracle",
    "matrix_from_trajectory",
    "default_window",
    "Deviation",
    "analytic_partner",
    "compare_components",
    "switching_verdict",
]

ENVELOPE_EPS = 1e-8
LOCAL_ERROR_FACTOR = 1e-2
LOCAL_ERROR_FLOOR = 3e-14
MAX_CONDITION = 1e3


class IntegrationError(RuntimeError):
    """The ODE solver failed (e.g. step-size underflow)."""


class FitError(RuntimeError):
    """The spectral fit is ill-conditioned."""


class ProfileKind(str, enum.Enum):
    TANH = "tanh"
    EXPONENTIAL = "exponential"
    STEP = "step"


@dataclass(frozen=True)
class SwitchingProfile:
    """Field envelope ``f(t)`` rising monotonically from 0 to 1.

    ``tanh``: ``(1 + tanh((t - t_on)/tau)) / 2``;
    ``exponential``: ``1 - exp(-(t - t_on)/tau)`` for ``t >= t_on``;
    ``step``: ``1`` for ``t >= t_on``.
    """

    kind: ProfileKind = ProfileKind.TANH
    tau: float = 1.0
    t_on: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.kind is not ProfileKind.STEP and not self.tau > 0:
            raise ValueError("tau must be > 0 for smooth profiles")

    @classmethod
    def from_delta_tau(cls, delta_tau: float, delta: float, kind=ProfileKind.TANH, t_on=0.0):
        """Profile with rise time ``tau = |delta tau| / |delta|``."""
        if delta == 0:
            raise ValueError("|delta tau| needs a nonzero detuning")
        return cls(kind, abs(delta_tau) / abs(delta), t_on)

    def envelope(self, t):
        x = np.asarray(t, dtype=float) - self.t_on
        if self.kind is ProfileKind.STEP:
            return np.where(x >= 0, 1.0, 0.0)
        if self.kind is ProfileKind.EXPONENTIAL:
            return np.where(x >= 0, -np.expm1(-np.maximum(x, 0.0) / self.tau), 0.0)
        return 0.5 * (1.0 + np.tanh(x / self.tau))

    def start_time(self, eps: float = ENVELOPE_EPS) -> float:
        if self.kind is ProfileKind.TANH:
            return self.t_on - 0.5 * self.tau * math.log(1.0 / eps)
        return self.t_on

    def completion_time(self, eps: float = ENVELOPE_EPS) -> float:
        if self.kind is ProfileKind.STEP:
            return self.t_on
        if self.kind is ProfileKind.EXPONENTIAL:
            return self.t_on + self.tau * math.log(1.0 / eps)
        return self.t_on + 0.5 * self.tau * math.log(1.0 / eps)

    def _scalar(self):
        t_on, tau = self.t_on, self.tau
        if self.kind is ProfileKind.STEP:
            return lambda t: 1.0 if t >= t_on else 0.0
        if self.kind is ProfileKind.EXPONENTIAL:
            return lambda t: -math.expm1(-(t - t_on) / tau) if t >= t_on else 0.0
        return lambda t: 0.5 * (1.0 + math.tanh((t - t_on) / tau))


@dataclass(frozen=True)
class Trajectory:
    """Rotating-frame amplitudes, ``amps[t_index, level, column]``."""

    t: np.ndarray
    amps: np.ndarray
    max_norm_drift: float
    n_steps: int

    def column(self, k: int = 0) -> np.ndarray:
        return self.amps[:, :, k]

    def to_rows(self, k: int = 0) -> list[tuple[float, float, float, float, float]]:
        a = self.column(k)
        return [(t, a1.real, a1.imag, a2.real, a2.imag) for t, a1, a2 in zip(self.t, a[:, 0], a[:, 1])]


def _initial(initial) -> np.ndarray:
    if isinstance(initial, str):
        key = initial.lower()
        if key == "psi1":
            return np.array([[1.0], [0.0]], dtype=complex)
        if key == "psi2":
            return np.array([[0.0], [1.0]], dtype=complex)
        if key == "both":
            return np.eye(2, dtype=complex)
        raise ValueError(f"unknown initial state {initial!r}")
    vec = np.asarray(initial, dtype=complex).reshape(2, -1)
    norms = np.linalg.norm(vec, axis=0)
    if not np.allclose(norms, 1.0, rtol=1e-12):
        raise ValueError("initial state must be normalized")
    return vec


def default_window(params: DressedParams, profile: SwitchingProfile, periods: float = 40.0):
    start = profile.completion_time()
    return start, start + periods * 2.0 * math.pi / params.omega_rabi


def propagate(cfg: SystemConfig, profile: SwitchingProfile, initial="psi1", t_end: float | None = None,
              tol: float = 1e-10, t_eval=None, samples_per_period: int = 24) -> Trajectory:
    """Integrate the rotating-frame equations from before the switch to ``t_end``.

    The norm of every column is sampled on the output grid and the largest
    deviation from its initial value is reported as ``max_norm_drift``.

    Raises
    ------
    IntegrationError
        If the solver stops early (e.g. step size underflow).
    """
    if not 1e-12 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-12, 1e-6]")
    params = derive_params(cfg, warn=False)
    y0 = _initial(initial)
    ncol = y0.shape[1]
    t0 = profile.start_time()
    if t_end is None:
        t_end = default_window(params, profile)[1]
    if t_end <= t0:
        raise ValueError("t_end must be after the start of the switch")
    if t_eval is None:
        fastest = max(params.omega_rabi, abs(params.delta), 2.0 * params.v_mag)
        dt = 2.0 * math.pi / (fastest * samples_per_period)
        t_eval = np.linspace(t0, t_end, int(math.ceil((t_end - t0) / dt)) + 1)
    t_eval = np.asarray(t_eval, dtype=float)

    v = params.v
    vc = v.conjugate()
    delta = params.delta
    env = profile._scalar()

    def rhs(t, y):
        a1 = y[:ncol]
        a2 = y[ncol:]
        f = env(t)
        return np.concatenate((-1j * vc * f * a2, -1j * (v * f * a1 + delta * a2)))

    local = max(tol * LOCAL_ERROR_FACTOR, LOCAL_ERROR_FLOOR)
    sol = solve_ivp(rhs, (t0, t_end), y0.reshape(-1), method="DOP853", t_eval=t_eval,
                    rtol=local, atol=local)
    if sol.status != 0:
        raise IntegrationError(f"integration failed at t={sol.t[-1] if sol.t.size else t0}: {sol.message}")
    amps = sol.y.T.reshape(-1, 2, ncol)
    norms = np.sum(np.abs(amps) ** 2, axis=1)
    drift = float(np.max(np.abs(norms - np.sum(np.abs(y0) ** 2, axis=0))))
    return Trajectory(sol.t, amps, drift, int(sol.nfev))


@dataclass(frozen=True)
class LineFit:
    """Coefficients of ``c0 + c_plus e^{i W t} + c_minus e^{-i W t}``."""

    c0: complex
    c_plus: complex
    c_minus: complex
    omega_rabi: float
    residual: float
    condition: float


def _design(t, w):
    return np.column_stack([np.ones_like(t), np.exp(1j * w * t), np.exp(-1j * w * t)])


def _solve(t, signal, w):
    a = _design(t, w)
    coef, *_ = np.linalg.lstsq(a, signal, rcond=None)
    resid = signal - a @ coef
    return coef, float(np.sqrt(np.mean(np.abs(resid) ** 2)))


def fit_lines(t, signal, omega_rabi: float, refine: bool = False, refine_span: float = 1e-2) -> LineFit:
    """Linear least squares at fixed ``omega_rabi``, optionally refining it.

    The refinement minimizes the fit residual over ``omega_rabi * (1 +- span)``
    and is only meaningful when the sideband terms carry signal.
    """
    t = np.asarray(t, dtype=float)
    signal = np.asarray(signal, dtype=complex)
    t_ref = t - t[0]
    cond = float(np.linalg.cond(_design(t_ref, omega_rabi)))
    if not cond < MAX_CONDITION:
        raise FitError(f"ill-conditioned line fit (condition number {cond:.3g}); widen the fit window")
    w = omega_rabi
    if refine:
        res = minimize_scalar(lambda x: _solve(t_ref, signal, x)[1],
                              bounds=(w * (1 - refine_span), w * (1 + refine_span)),
                              method="bounded", options={"xatol": 1e-12 * w})
        w = float(res.x)
    coef, rms = _solve(t_ref, signal, w)
    # re-reference phases to the absolute time axis
    c0 = coef[0]
    cp = coef[1] * np.exp(-1j * w * t[0])
    cm = coef[2] * np.exp(1j * w * t[0])
    return LineFit(complex(c0), complex(cp), complex(cm), w, rms, cond)


@dataclass(frozen=True)
class OracleResult:
    """Emission-side components of a diagonal element recovered from the ODE."""

    amp_at: dict
    residual: float
    omega_rabi_fitted: float
    components: tuple = field(default_factory=tuple)
    inversion_fit: LineFit | None = None

    def to_dict(self) -> dict:
        return {
            "amp_at": {k: [v.real, v.imag] for k, v in self.amp_at.items()},
            "residual": self.residual,
            "omega_rabi_fitted": self.omega_rabi_fitted,
        }


def _window_mask(traj: Trajectory, window) -> np.ndarray:
    lo, hi = window
    mask = (traj.t >= lo) & (traj.t <= hi)
    if mask.sum() < 16:
        raise FitError("fit window holds fewer than 16 samples")
    return mask


def _components_from_products(params: DressedParams, element: str, minus: LineFit, plus: LineFit | None):
    """Map fitted product coefficients onto lab-frame dipole components.

    ``minus`` fits ``conj(a1) b2`` (multiplies ``d12 e^{-i omega t}``);
    ``plus`` fits ``conj(a2) b1`` (multiplies ``d21 e^{+i omega t}``).
    """
    z = params.phase_factor
    out = []
    # conj(a1) b2: c0 -> -omega, c+ e^{iWt} -> -(omega - W), c- -> -(omega + W)
    for shift, c in ((0, minus.c0), (-1, minus.c_plus), (1, minus.c_minus)):
        nu = params.omega + shift * params.omega_rabi
        out.append(DipoleComponent(element, "oracle", -1, shift, -nu, c * z.conjugate(), 0))
    if plus is not None:
        # conj(a2) b1 e^{i omega t}: c+ -> +(omega + W), c- -> +(omega - W)
        for shift, c in ((0, plus.c0), (1, plus.c_plus), (-1, plus.c_minus)):
            nu = params.omega + shift * params.omega_rabi
            out.append(DipoleComponent(element, "oracle", 1, shift, nu, c * z, 0))
    return out


def extract_components(traj: Trajectory, params: DressedParams, fit_window=None,
                       column: int = 0, refine: bool = True) -> OracleResult:
    """Recover the diagonal dipole components of one propagated state."""
    if fit_window is None:
        fit_window = (traj.t[0] + 0.5 * (traj.t[-1] - traj.t[0]), traj.t[-1])
    mask = _window_mask(traj, fit_window)
    t = traj.t[mask]
    a = traj.amps[mask, :, column]
    product = np.conj(a[:, 0]) * a[:, 1]
    inversion = np.abs(a[:, 0]) ** 2 - np.abs(a[:, 1]) ** 2

    inv_fit = fit_lines(t, inversion, params.omega_rabi)
    side_power = abs(inv_fit.c_plus) + abs(inv_fit.c_minus)
    # refine Omega on whichever signal oscillates; adiabatic states barely do
    do_refine = refine and side_power > 1e-6
    if do_refine:
        inv_fit = fit_lines(t, inversion, params.omega_rabi, refine=True)
    w = inv_fit.omega_rabi if do_refine else params.omega_rabi
    fit = fit_lines(t, product, w)
    comps = _components_from_products(params, "11", fit, None)
    amp_at = {LINE_LABELS[c.shift]: c.amp for c in comps}
    return OracleResult(amp_at, fit.residual, w, tuple(comps), inv_fit)


@dataclass(frozen=True)
class OracleMatrix:
    components: tuple
    residual: float
    omega_rabi_fitted: float
    max_norm_drift: float

    def amplitudes(self, element: str) -> dict:
        return element_amplitudes(self.components, element)


def matrix_from_trajectory(traj: Trajectory, params: DressedParams, window, refine: bool = True) -> OracleMatrix:
    """Spectral decomposition of all four elements from a two-column trajectory."""
    if traj.amps.shape[2] != 2:
        raise ValueError("trajectory must hold both basis columns (initial='both')")
    mask = _window_mask(traj, window)
    t = traj.t[mask]
    a = traj.amps[mask]

    w = params.omega_rabi
    if refine:
        # the off-diagonal product always carries sideband signal
        cross = np.conj(a[:, 0, 0]) * a[:, 1, 1]
        w = fit_lines(t, cross, w, refine=True).omega_rabi

    comps = []
    residual = 0.0
    for i in (0, 1):
        for j in (0, 1):
            minus = fit_lines(t, np.conj(a[:, 0, i]) * a[:, 1, j], w)
            plus = fit_lines(t, np.conj(a[:, 1, i]) * a[:, 0, j], w)
            residual = max(residual, minus.residual, plus.residual)
            comps.extend(_components_from_products(params, f"{i + 1}{j + 1}", minus, plus))
    return OracleMatrix(tuple(comps), residual, w, traj.max_norm_drift)


def matrix_element_oracle(cfg: SystemConfig, profile: SwitchingProfile, t_end: float | None = None,
                          tol: float = 1e-10, periods: float = 40.0, refine: bool = True) -> OracleMatrix:
    """Full 2x2 dipole matrix between the states evolved from ``psi1`` and ``psi2``.

    The fit window starts at switch completion and spans ``periods`` Rabi
    periods unless ``t_end`` is given.
    """
    params = derive_params(cfg, warn=False)
    window = default_window(params, profile, periods)
    if t_end is not None:
        window = (window[0], t_end)
    traj = propagate(cfg, profile, "both", t_end=window[1], tol=tol)
    return matrix_from_trajectory(traj, params, window, refine)


def analytic_partner(params: DressedParams, regime: str) -> list[DipoleComponent]:
    """Analytic components labelled by the bare state each one evolves from.

    Under sudden switching ``psi_i`` becomes ``Phi'_i``. Under adiabatic
    switching ``psi1`` follows ``Phi1`` when ``delta > 0`` and ``Phi2`` when
    ``delta < 0``, so the labels are swapped in the latter case.
    """
    if regime == "sudden":
        return sudden_dipoles_exact(params)
    comps = adiabatic_dipoles(params)
    if params.delta >= 0:
        return comps
    swap = {"11": "22", "22": "11", "12": "21", "21": "12"}
    return [DipoleComponent(swap[c.element], c.basis, c.sign, c.shift, c.freq, c.amp, c.phase_exponent)
            for c in comps]


@dataclass(frozen=True)
class Deviation:
    element: str
    sign: int
    shift: int
    oracle: float
    analytic: float

    @property
    def relative(self) -> float:
        return abs(self.oracle - self.analytic) / self.analytic if self.analytic > 0 else math.inf

    def to_dict(self) -> dict:
        return {"element": self.element, "sign": self.sign, "line": LINE_LABELS[self.shift],
                "oracle_modulus": self.oracle, "analytic_modulus": self.analytic}


def compare_components(oracle_comps, analytic_comps, floor: float = 1e-6):
    """Pair moduli by ``(element, sign, line)``.

    Returns ``(matched, leaks)``: ``matched`` holds components with analytic
    modulus above ``floor`` and ``leaks`` the ones the analytic set says are zero.
    """
    matched, leaks = [], []
    elements = sorted({c.element for c in oracle_comps})
    for el in elements:
        got = element_amplitudes(oracle_comps, el)
        want = element_amplitudes(analytic_comps, el)
        for key in sorted(set(got) | set(want)):
            dev = Deviation(el, key[0], key[1], abs(got.get(key, 0j)), abs(want.get(key, 0j)))
            (matched if dev.analytic > floor else leaks).append(dev)
    return matched, leaks


def switching_verdict(delta_tau: float, adiabatic_min: float = 50.0, sudden_max: float = 0.02) -> str:
    """``adiabatic`` for ``|delta tau| >> 1``, ``sudden`` for ``<< 1``, else ``intermediate``."""
    x = abs(delta_tau)
    if x >= adiabatic_min:
        return "adiabatic"
    if x <= sudden_max:
        return "sudden"
    return "intermediate"
