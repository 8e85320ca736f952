"""
Command-line front end.

Usage::

    dressed-radiation SUBCOMMAND [--config PATH] [--out PATH] [--format csv|json]
                      [--seed N] [--exact|--asymptotic] [--regime adiabatic|sudden]
                      [--alpha-grid start:stop:points(log|lin)] [key=value ...]

Trailing ``key=value`` pairs override the config file. Exit status is 0 on
success, 2 for configuration errors and 3 for numerical failures.

Config keys
-----------
system (all subcommands except audit)
    ``alpha`` + ``delta``, or ``delta`` + ``v_mag``, or ``e21`` + ``field_amp``;
    plus ``omega``, ``dipole_mag``, ``phi_field``, ``phi1``, ``phi2``.
    Defaults: ``delta = 1``, ``omega = 100``, field off (``alpha = 1`` for
    oracle and ensemble).
params
    system keys; ``--alpha-grid`` sweeps alpha at fixed ``delta``.
fig1
    ``delta``, ``omega``; grid from ``--alpha-grid`` (default ``0.01:100:41log``).
table
    system keys, ``alpha_regime`` (small|large), ``n`` or ``n_omega``,
    ``n_lower``, ``n_upper`` (probe occupations).
dipoles
    system keys, ``alpha_regime`` (used with ``--asymptotic``).
oracle
    system keys, ``delta_tau`` (200), ``profile`` (tanh|exponential|step),
    ``tol`` (1e-10), ``periods`` (40), ``trajectory_out`` (CSV path).
ensemble
    system keys, ``selector`` (coherent|noncoherent|mixed), ``n_grid``
    (10,30,100,300,1000), ``n_trials`` (10000), ``side`` (200), ``k`` (1),
    ``direction_cos`` (comma list, 1), ``workers`` (1), ``seed``.
audit
    ``tol`` (0.01), ``alpha_small`` (0.2), ``alpha_large`` (10), ``omega``.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .audit import audit_findings, convergence_checks
from .config import ConfigError, RunConfig, load_config, parse_alpha_grid, system_from_config
from .dipoles import (
    LINE_LABELS,
    Regime,
    adiabatic_dipoles,
    adiabatic_dipoles_asymptotic,
    components_to_rows,
    sudden_dipoles_asymptotic,
    sudden_dipoles_exact,
)
from .dressed import DressedParams, ModelValidityWarning, SystemConfig, derive_params, sideband_frequencies
from .ensemble import COHERENT, NONCOHERENT, ensemble_scan, fit_exponent
from .oracle import (
    FitError,
    IntegrationError,
    ProfileKind,
    SwitchingProfile,
    analytic_partner,
    compare_components,
    default_window,
    extract_components,
    matrix_from_trajectory,
    propagate,
    switching_verdict,
)
from .output import to_csv, to_json
from .rates import adiabatic_table, sudden_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

MATCH_TOLERANCE = 0.02
LEAK_TOLERANCE = 1e-3

TABLE_COLUMNS = ("regime", "transition", "freq_label", "freq_value", "spont_coeff", "stim_coeff",
                 "coherence", "validity", "active_flag", "exact_coeff", "exact_stim_coeff")
ENSEMBLE_COLUMNS = ("N", "direction_cos", "mean_intensity", "std_error", "exponent_fit")
DIPOLE_COLUMNS = ("element", "basis", "line", "freq", "re_amp", "im_amp", "phase_exponent", "coherence")
PARAM_COLUMNS = ("alpha", "delta", "v_mag", "omega_rabi", "lambda1", "c1", "c2_re", "c2_im", "c2_abs",
                 "phi0", "near_resonance_ratio", "validity")
FIG1_COLUMNS = ("alpha", "lower_sideband", "upper_sideband", "lower_small_alpha_approx",
                "lower_small_alpha_rel_err", "upper_large_alpha_approx", "upper_large_alpha_rel_err",
                "small_alpha_factor_gap")
DEVIATION_COLUMNS = ("element", "sign", "line", "oracle_modulus", "analytic_modulus", "relative_deviation")
FINDING_COLUMNS = ("name", "subject", "alpha", "tabulated", "exact", "relative_gap", "evidence")


class NumericalFailure(RuntimeError):
    pass


def _emit(args, payload: str) -> None:
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(payload)


def _render(args, rows: list[dict], columns, default: str = "csv") -> str:
    fmt = args.format or default
    if fmt == "json":
        return to_json([{c: r.get(c) for c in columns} for r in rows])
    return to_csv(rows, columns)


def _alpha_grid(args, default: str | None = None):
    text = args.alpha_grid or default
    return None if text is None else parse_alpha_grid(text)


def _params_row(p: DressedParams) -> dict:
    return {
        "alpha": p.alpha,
        "delta": p.delta,
        "v_mag": p.v_mag,
        "omega_rabi": p.omega_rabi,
        "lambda1": p.lambda1,
        "c1": p.c1,
        "c2_re": p.c2.real,
        "c2_im": p.c2.imag,
        "c2_abs": math.sqrt(p.c2_sq),
        "phi0": p.phi0,
        "near_resonance_ratio": p.near_resonance_ratio,
        "validity": "ok" if p.within_validity else "outside model validity",
    }


def cmd_params(args, cfg: RunConfig) -> str:
    grid = _alpha_grid(args)
    if grid is None:
        systems = [system_from_config(cfg)]
    else:
        systems = [system_from_config(cfg, alpha=float(a)) for a in grid]
    cfg.check_unused()
    rows = [_params_row(derive_params(s)) for s in systems]
    return _render(args, rows, PARAM_COLUMNS)


def cmd_fig1(args, cfg: RunConfig) -> str:
    grid = _alpha_grid(args, "0.01:100:41log")
    delta = cfg.get_float("delta", 1.0)
    omega = cfg.get_float("omega", 100.0, minimum=0.0, exclusive_min=True)
    if delta == 0:
        raise ConfigError("fig1 needs a nonzero delta")
    cfg.check_unused()

    rows = []
    for alpha in grid:
        p = derive_params(SystemConfig.from_alpha(float(alpha), delta=delta, omega=omega))
        lower, _, upper = sideband_frequencies(p)
        ad = abs(delta)
        lower_small = omega - ad * (1 + alpha**2)
        upper_large = omega + 2 * p.v_mag + delta / (2 * alpha) if alpha > 0 else math.inf
        rows.append({
            "alpha": float(alpha),
            "lower_sideband": lower,
            "upper_sideband": upper,
            "lower_small_alpha_approx": lower_small,
            "lower_small_alpha_rel_err": abs(lower_small - lower) / lower,
            "upper_large_alpha_approx": upper_large,
            "upper_large_alpha_rel_err": abs(upper_large - upper) / upper,
            "small_alpha_factor_gap": 0.5 * alpha**2 * ad,
        })
    return _render(args, rows, FIG1_COLUMNS)


def _occupations(cfg: RunConfig):
    base = cfg.get_float("n", 0.0, minimum=0.0)
    return {
        LINE_LABELS[0]: cfg.get_float("n_omega", base, minimum=0.0),
        LINE_LABELS[-1]: cfg.get_float("n_lower", base, minimum=0.0),
        LINE_LABELS[1]: cfg.get_float("n_upper", base, minimum=0.0),
    }


def cmd_table(args, cfg: RunConfig) -> str:
    regime = cfg.get_choice("regime", ("adiabatic", "sudden"), "adiabatic")
    regime = args.regime or regime
    alpha_regime = cfg.get_choice("alpha_regime", ("small", "large"))
    occupations = _occupations(cfg)
    system = system_from_config(cfg)
    cfg.check_unused()
    params = derive_params(system)
    builder = adiabatic_table if regime == "adiabatic" else sudden_table
    entries = builder(params, occupations, alpha_regime)
    exact = not args.asymptotic
    rows = [{
        "regime": e.regime,
        "transition": e.transition,
        "freq_label": e.line,
        "freq_value": e.freq,
        "spont_coeff": e.spont_coeff,
        "stim_coeff": e.stim_coeff,
        "coherence": e.coherence,
        "validity": e.validity,
        "active_flag": e.active,
        "exact_coeff": e.exact_coeff if exact else None,
        "exact_stim_coeff": e.exact_stim if exact else None,
    } for e in entries]
    return _render(args, rows, TABLE_COLUMNS)


def cmd_dipoles(args, cfg: RunConfig) -> str:
    regime = cfg.get_choice("regime", ("adiabatic", "sudden"), "adiabatic")
    regime = args.regime or regime
    alpha_regime = cfg.get_choice("alpha_regime", ("small", "large"))
    system = system_from_config(cfg)
    cfg.check_unused()
    params = derive_params(system)
    if args.asymptotic:
        if alpha_regime is None:
            alpha_regime = "small" if params.alpha < 1 else "large"
        build = adiabatic_dipoles_asymptotic if regime == "adiabatic" else sudden_dipoles_asymptotic
        comps = build(params, Regime(alpha_regime))
    else:
        comps = adiabatic_dipoles(params) if regime == "adiabatic" else sudden_dipoles_exact(params)
    rows = components_to_rows(comps)
    return _render(args, rows, DIPOLE_COLUMNS, default="json")


def _match_label(regime: str, matched, leaks) -> tuple[str, float, float]:
    worst = max((d.relative for d in matched), default=0.0)
    leak = max((d.oracle for d in leaks), default=0.0)
    ok = worst <= MATCH_TOLERANCE and leak < LEAK_TOLERANCE
    return f"{regime} {'match' if ok else 'mismatch'}", worst, leak


def cmd_oracle(args, cfg: RunConfig) -> str:
    kind = ProfileKind(cfg.get_choice("profile", [k.value for k in ProfileKind], "tanh"))
    delta_tau = cfg.get_float("delta_tau", 200.0, minimum=0.0, exclusive_min=True)
    tol = cfg.get_float("tol", 1e-10, minimum=0.0, exclusive_min=True)
    periods = cfg.get_float("periods", 40.0, minimum=20.0)
    trajectory_out = cfg.raw("trajectory_out")
    system = system_from_config(cfg, default_alpha=1.0)
    cfg.check_unused()
    if not 1e-12 <= tol <= 1e-6:
        raise ConfigError(f"tol must lie in [1e-12, 1e-6], got {tol}")
    params = derive_params(system)
    if kind is ProfileKind.STEP:
        profile = SwitchingProfile(kind)
        verdict = "sudden"
    else:
        if params.delta == 0:
            raise ConfigError("smooth profiles need a nonzero delta to set tau from delta_tau")
        profile = SwitchingProfile.from_delta_tau(delta_tau, params.delta, kind)
        verdict = switching_verdict(delta_tau)

    window = default_window(params, profile, periods)
    traj = propagate(system, profile, "both", t_end=window[1], tol=tol)
    if not traj.max_norm_drift < 10 * tol + 1e-12:
        raise NumericalFailure(f"norm drift {traj.max_norm_drift:.3g} exceeds 10*tol")
    diagonal = extract_components(traj, params, window, column=0)
    matrix = matrix_from_trajectory(traj, params, window)

    target = args.regime or (verdict if verdict != "intermediate" else None)
    report = {
        "profile": kind.value,
        "delta_tau": delta_tau if kind is not ProfileKind.STEP else 0.0,
        "switching": verdict,
        "max_norm_drift": traj.max_norm_drift,
        "oracle_result": diagonal.to_dict(),
        "analytic_omega_rabi": params.omega_rabi,
    }
    deviations = []
    if target is None:
        report["verdict"] = "intermediate: no analytic match expected"
        for regime in ("adiabatic", "sudden"):
            matched, _ = compare_components(matrix.components, analytic_partner(params, regime))
            report[f"max_deviation_vs_{regime}"] = max(d.relative for d in matched)
    else:
        matched, leaks = compare_components(matrix.components, analytic_partner(params, target))
        label, worst, leak = _match_label(target, matched, leaks)
        report["verdict"] = label
        report["max_relative_deviation"] = worst
        report["max_leakage"] = leak
        deviations = [dict(d.to_dict(), relative_deviation=d.relative) for d in matched]
        report["comparison"] = deviations

    if trajectory_out:
        Path(trajectory_out).write_text(
            to_csv(({"t": r[0], "re_a1": r[1], "im_a1": r[2], "re_a2": r[3], "im_a2": r[4]}
                    for r in traj.to_rows(0)), ("t", "re_a1", "im_a1", "re_a2", "im_a2")),
            encoding="utf-8", newline="\n")
    if (args.format or "json") == "csv":
        return to_csv(deviations, DEVIATION_COLUMNS)
    return to_json(report)


_SELECTORS = {
    "coherent": (COHERENT,),
    "noncoherent": (NONCOHERENT,),
    "mixed": (COHERENT, NONCOHERENT),
}


def cmd_ensemble(args, cfg: RunConfig) -> str:
    selector = cfg.get_choice("selector", tuple(_SELECTORS), "coherent")
    n_grid = cfg.get_int_list("n_grid", (10, 30, 100, 300, 1000))
    n_trials = cfg.get_int("n_trials", 10_000, minimum=1)
    side = cfg.get_float("side", 200.0, minimum=0.0, exclusive_min=True)
    k = cfg.get_float("k", 1.0, minimum=0.0)
    directions = cfg.get_float_list("direction_cos", (1.0,))
    workers = cfg.get_int("workers", 1, minimum=1)
    seed = args.seed if args.seed is not None else cfg.get_int("seed", 0, minimum=0)
    if args.seed is not None:
        cfg.raw("seed")
    system = system_from_config(cfg, default_alpha=1.0)
    cfg.check_unused()
    if any(abs(c) > 1 for c in directions):
        raise ConfigError("direction_cos entries must lie in [-1, 1]")
    derive_params(system)

    k_in = (0.0, 0.0, k)
    fit = len(n_grid) >= 2 and len(set(n_grid)) >= 2
    rows = []
    for cos in directions:
        sin = math.sqrt(max(0.0, 1.0 - cos * cos))
        k_out = (k * sin, 0.0, k * cos)
        results = ensemble_scan(system, _SELECTORS[selector], n_grid, n_trials, seed, side, k_in, k_out, workers)
        exponent = fit_exponent(n_grid, [r.mean for r in results]) if fit else None
        for n, r in zip(n_grid, results):
            rows.append({"N": n, "direction_cos": cos, "mean_intensity": r.mean,
                         "std_error": r.std_error, "exponent_fit": exponent})
    return _render(args, rows, ENSEMBLE_COLUMNS)


def cmd_audit(args, cfg: RunConfig) -> str:
    tol = cfg.get_float("tol", 0.01, minimum=0.0)
    alpha_small = cfg.get_float("alpha_small", 0.2, minimum=0.0, exclusive_min=True)
    alpha_large = cfg.get_float("alpha_large", 10.0, minimum=0.0, exclusive_min=True)
    omega = cfg.get_float("omega", 100.0, minimum=0.0, exclusive_min=True)
    cfg.check_unused()
    findings = audit_findings(tol, alpha_small, alpha_large, omega)
    rows = [f.to_dict() for f in findings]
    if (args.format or "json") == "csv":
        return to_csv(rows, FINDING_COLUMNS)
    checks = convergence_checks(omega=omega)
    return to_json({
        "tol": tol,
        "findings": rows,
        "convergence": [{"name": c.name, "order": c.order, "passed": c.passed} for c in checks],
        "convergence_failures": [c.name for c in checks if not c.passed],
    })


COMMANDS = {
    "params": cmd_params,
    "fig1": cmd_fig1,
    "table": cmd_table,
    "dipoles": cmd_dipoles,
    "oracle": cmd_oracle,
    "ensemble": cmd_ensemble,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dressed-radiation",
                                     description="Radiation of a two-level atom dressed by a strong field.")
    parser.add_argument("command", choices=tuple(COMMANDS))
    parser.add_argument("overrides", nargs="*", metavar="key=value", help="config overrides")
    parser.add_argument("--config", metavar="PATH")
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--seed", type=int)
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="asymptotic", action="store_false", default=False)
    mode.add_argument("--asymptotic", dest="asymptotic", action="store_true")
    parser.add_argument("--regime", choices=("adiabatic", "sudden"))
    parser.add_argument("--alpha-grid", metavar="start:stop:points(log|lin)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.seed is not None and args.seed < 0:
        print("config error: --seed must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", ModelValidityWarning)
            cfg = load_config(args.config, args.overrides)
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                payload = COMMANDS[args.command](args, cfg)
        _emit(args, payload)
    except (IntegrationError, FitError, NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
