"""Scenario runner: orchestration, persistence, plots, and the verify gate.

    starlab <scenario> --config file.json [--out DIR] [--seed N] [--verify]

Exit codes: 0 success (all criteria pass under verify), 1 configuration
error, 2 runtime event treated as failure in verify mode.  STARLAB_THREADS
caps the parallelism of phase-portrait sweeps.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, artifacts, functionals, svgplot
from .config import ScenarioConfig, build_initial, validate_config
from .errors import CollapseReached, ConfigInvalid, StarlabError
from .expansion import classify_expansion, integrate_alpha
from .homogeneous import PhaseState, curve_phi_s, integrate_phase
from .lagrangian import (LINEAR_REGIME, SELF_SIMILAR_REGIME, THERMO_REGIME,
                         SolverSpec, evolve_linear_isentropic, evolve_linear_thermo,
                         evolve_self_similar, initial_second_derivatives,
                         reconstruct_eulerian)
from .profiles import GridSpec, solve_isentropic_profile, solve_thermo_profile


@dataclass
class ExitReport:
    status: int
    summary: dict
    events: list
    artifacts: list


def _solver_spec(cfg: ScenarioConfig, n_emit: int) -> SolverSpec:
    s = cfg.solver
    return SolverSpec(n_cells=s.n_cells, cfl=s.cfl, order=s.order,
                      max_rel_change=s.max_rel_change,
                      growth_threshold=s.growth_threshold,
                      fully_implicit=s.fully_implicit, dt_max=s.dt_max,
                      n_emit=n_emit)


def _grid_spec(cfg: ScenarioConfig) -> GridSpec:
    g = cfg.grid
    return GridSpec(n_cells=g.n_cells, rtol=g.rtol, atol=g.atol, y_max=g.y_max)


def _manifest(cfg: ScenarioConfig, out_dir: str, events, extra: dict) -> str:
    payload = {
        "version": __version__,
        "config": cfg.to_dict(),
        "events": [{"kind": e.kind, "clock": e.clock, "detail": e.detail}
                   for e in events],
    }
    payload.update(extra)
    return artifacts.write_json(os.path.join(out_dir, "manifest.json"), payload)


def run_scenario(cfg: ScenarioConfig) -> ExitReport:
    out_dir = artifacts.ensure_dir(cfg.out_dir)
    if cfg.scenario == "profile":
        return _run_profile(cfg, out_dir)
    if cfg.scenario == "expansion":
        return _run_expansion(cfg, out_dir)
    if cfg.scenario == "phase":
        return _run_phase(cfg, out_dir)
    if cfg.scenario in ("evolve-ss", "evolve-linear", "evolve-thermo"):
        return _run_evolution(cfg, out_dir)
    if cfg.scenario == "verify":
        return _run_verify(cfg, out_dir)
    raise ConfigInvalid([f"unknown scenario {cfg.scenario!r}"])


def _run_profile(cfg: ScenarioConfig, out_dir: str) -> ExitReport:
    gs = _grid_spec(cfg)
    thermo = cfg.model.kind == "thermo"
    if thermo:
        prof = solve_thermo_profile(cfg.model.K, cfg.model.epsilon, gs)
        series = [("rho_bar", prof.y_nodes, prof.rho_bar),
                  ("theta_bar", prof.y_nodes, prof.theta_bar)]
        summary = {"R0": prof.R0, "fourth_moment": prof.mass_moments.fourth_moment,
                   "theta_boundary_slope": prof.theta_boundary_slope}
    else:
        prof = solve_isentropic_profile(cfg.model.delta, gs)
        series = [("w", prof.y_nodes, prof.w), ("rho_bar", prof.y_nodes, prof.rho_bar)]
        summary = {"R0": prof.R0, "fourth_moment": prof.mass_moments.fourth_moment,
                   "boundary_slope": prof.boundary_slope}
    files = list(artifacts.write_profile_csv(out_dir, prof, thermo=thermo))
    files.append(svgplot.line_chart(os.path.join(out_dir, "profile.svg"), series,
                                    title="stationary profile", xlabel="y"))
    files.append(_manifest(cfg, out_dir, [], {"summary": summary}))
    return ExitReport(0, summary, [], files)


def _run_expansion(cfg: ScenarioConfig, out_dir: str) -> ExitReport:
    m = cfg.model
    params = classify_expansion(m.delta, m.a0, m.a1)
    try:
        path = integrate_alpha(params, cfg.time.end)
        events = []
    except CollapseReached as exc:
        path = exc.path
        events = [type("E", (), {"kind": "collapse-reached", "clock": path.t_end,
                                 "detail": f"T ~ {path.T_collapse:.6g}"})()]
    files = list(artifacts.write_expansion_csv(out_dir, path))
    files.append(svgplot.line_chart(
        os.path.join(out_dir, "expansion.svg"),
        [("alpha", path.t_samples, path.alpha)], title="expansion factor",
        xlabel="t", ylabel="alpha"))
    summary = {"classification": params.classification, "a1_star": params.a1_star,
               "alpha_end": float(path.alpha[-1])}
    if path.T_collapse is not None:
        summary["T_collapse"] = path.T_collapse
    files.append(_manifest(cfg, out_dir, events, {"summary": summary}))
    return ExitReport(0, summary, events, files)


def _phase_one(args):
    idx, phi0, phi1, delta, s_end = args
    traj = integrate_phase(PhaseState(phi0, phi1, delta), s_end)
    return idx, traj


def _run_phase(cfg: ScenarioConfig, out_dir: str) -> ExitReport:
    delta = cfg.model.delta
    if cfg.phase_grid:
        grid = list(cfg.phase_grid)
    else:
        vals = (-0.05, 0.0, 0.05)
        grid = [(p, q) for p in vals for q in vals]
    jobs = [(i, p, q, delta, cfg.time.end) for i, (p, q) in enumerate(grid)]
    threads = int(os.environ.get("STARLAB_THREADS", "1"))
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = sorted(pool.map(_phase_one, jobs), key=lambda r: r[0])
    else:
        results = [_phase_one(j) for j in jobs]

    files = []
    fates = []
    series = []
    for idx, traj in results:
        files.append(artifacts.write_trajectory_csv(out_dir, f"trajectory_{idx:03d}.csv", traj))
        fates.append({"phi0": grid[idx][0], "phi1": grid[idx][1], "fate": traj.fate,
                      "first_escape_s": traj.first_escape_s})
        series.append((f"ic{idx}", traj.phi, traj.phi_s))
    phis = np.linspace(-0.6, 1.0, 200)
    series.append(("zero-energy curve", phis, curve_phi_s(phis, delta)))
    files.append(svgplot.line_chart(os.path.join(out_dir, "portrait.svg"), series,
                                    title="phase portrait", xlabel="phi", ylabel="phi_s"))
    files.append(artifacts.write_json(os.path.join(out_dir, "fates.json"),
                                      {"delta": delta, "trajectories": fates}))
    # one row per initial condition for portrait plotting
    files.append(artifacts.write_csv(
        os.path.join(out_dir, "sweep.csv"),
        ["phi0", "phi_s0", "fate", "first_escape_s"],
        [np.array([f["phi0"] for f in fates]),
         np.array([f["phi1"] for f in fates]),
         [f["fate"] for f in fates],
         np.array([f["first_escape_s"] if f["first_escape_s"] is not None
                   else np.nan for f in fates])]))
    files.append(_manifest(cfg, out_dir, [], {"summary": {"n_trajectories": len(grid)}}))
    return ExitReport(0, {"fates": [f["fate"] for f in fates]}, [], files)


def _run_evolution(cfg: ScenarioConfig, out_dir: str) -> ExitReport:
    m = cfg.model
    gs = _grid_spec(cfg)
    spec = _solver_spec(cfg, cfg.time.n_emit)
    files = []

    if cfg.scenario == "evolve-thermo":
        prof = solve_thermo_profile(m.K, m.epsilon, gs)
        params = classify_expansion(0.0, m.a0, m.a1)
        x = np.linspace(0.0, prof.R0, spec.n_cells + 1)
        xi0, xi1, zeta0 = build_initial(x, prof.R0, cfg.initial, thermo=True)
        if cfg.initial.normalize_omega and cfg.initial.amplitude > 0:
            from .lagrangian import ThermoPerturbationField
            probe = ThermoPerturbationField(x, xi0, xi1, None, zeta0, None, 0.0, prof)
            om = functionals.amplitude(probe)
            if om > 0:
                scale = cfg.initial.amplitude / om
                xi0, xi1, zeta0 = xi0 * scale, xi1 * scale, zeta0 * scale
        weights = cfg.weights

        def integrands(fieldlike):
            return functionals.dissipation_integrands_thermo(
                fieldlike, prof, weights, m.a1)

        run = evolve_linear_thermo(prof, params, (xi0, xi1, zeta0), cfg.time.end,
                                   spec, mu=m.mu, online_integrands=integrands)
        xi2, zeta1 = initial_second_derivatives(prof, params, (xi0, xi1, zeta0),
                                                THERMO_REGIME, mu=m.mu)
        E0 = functionals.initial_energy_thermo(x, xi0, xi1, xi2, zeta0, zeta1,
                                               prof, weights)
        reports = functionals.total_energy_ledger(
            run.snapshots, prof, weights, THERMO_REGIME,
            lambda tau: m.a0 * np.exp(m.a1 * tau), E0, a1=m.a1,
            dissipation_online=run.dissipation_online)
    else:
        regime = SELF_SIMILAR_REGIME if cfg.scenario == "evolve-ss" else LINEAR_REGIME
        prof = solve_isentropic_profile(m.delta, gs)
        a1 = m.a1
        if regime == SELF_SIMILAR_REGIME and a1 is None:
            a1 = np.sqrt(2.0 * abs(m.delta) / m.a0)
        params = classify_expansion(m.delta, m.a0, a1)
        x = np.linspace(0.0, prof.R0, spec.n_cells + 1)
        th0, th1 = build_initial(x, prof.R0, cfg.initial)
        if cfg.initial.normalize_omega and cfg.initial.amplitude > 0:
            from .lagrangian import PerturbationField
            probe = PerturbationField(x, th0, th1, None, 0.0, regime)
            om = functionals.amplitude(probe)
            if om > 0:
                scale = cfg.initial.amplitude / om
                th0, th1 = th0 * scale, th1 * scale

        weights = cfg.weights
        if regime == LINEAR_REGIME:
            def integrands(fieldlike, _p=params):
                al = _p.a0 * np.exp(_p.a1 * fieldlike.clock) if _p.delta == 0 else None
                if al is None:
                    raise ConfigInvalid(["online ledger needs delta = 0"])
                return functionals.dissipation_integrands_isentropic(
                    fieldlike, prof, weights, al)

            evolve = evolve_linear_isentropic
            online = integrands if params.delta == 0 else None
        else:
            evolve = evolve_self_similar
            online = None
        run = evolve(prof, params, (th0, th1), cfg.time.end, spec, mu=m.mu,
                     online_integrands=online)
        reports = None
        if regime == LINEAR_REGIME and params.delta == 0:
            th2 = initial_second_derivatives(prof, params, (th0, th1), regime, mu=m.mu)
            E0 = functionals.initial_energy_isentropic(x, th0, th1, th2, prof, weights)
            reports = functionals.total_energy_ledger(
                run.snapshots, prof, weights, LINEAR_REGIME,
                lambda tau: params.a0 * np.exp(params.a1 * tau), E0,
                dissipation_online=run.dissipation_online)

    for idx, snap in enumerate(run.snapshots):
        files.append(artifacts.write_snapshot_csv(out_dir, idx, snap))
    eul = reconstruct_eulerian(run.final, run.params)
    files.append(artifacts.write_eulerian_csv(out_dir, eul))
    if reports is not None:
        model_kind = "thermo" if cfg.scenario == "evolve-thermo" else "isentropic"
        for rep, snap in zip(reports, run.snapshots):
            phys = functionals.physical_energy(
                reconstruct_eulerian(snap, run.params), model_kind, mu=m.mu,
                c_nu=m.c_nu if model_kind == "thermo" else None,
                epsilon=m.epsilon if model_kind == "thermo" else None)
            rep.E_phys, rep.D_phys = phys.E, phys.D
        files.extend(artifacts.write_energy_reports(out_dir, reports))

    omegas = np.array([functionals.amplitude(s) for s in run.snapshots])
    clocks = np.array([s.clock for s in run.snapshots])
    files.append(svgplot.line_chart(os.path.join(out_dir, "amplitude.svg"),
                                    [("omega", clocks, omegas)],
                                    title="perturbation amplitude",
                                    xlabel="clock", ylabel="omega"))
    if run.energy is not None:
        files.append(svgplot.line_chart(
            os.path.join(out_dir, "energy.svg"),
            [("E", run.times, run.energy), ("D", run.times, run.dissipation)],
            title="perturbation energy", xlabel="s"))

    summary = {
        "regime": run.regime,
        "completed": run.completed,
        "omega_initial": float(omegas[0]),
        "omega_max": float(omegas.max()),
        "clock_end": float(clocks[-1]),
        "mass_identity_residual": eul.mass_identity_residual,
    }
    if run.energy is not None:
        summary["energy_identity_residual"] = float(
            abs(run.energy[-1] - run.energy[0] + run.visc_work[-1]))
    files.append(_manifest(cfg, out_dir, run.events,
                           {"summary": summary,
                            "dt_policy": run.dt_policy,
                            "grid": {"n_cells": spec.n_cells, "R0": prof.R0}}))
    return ExitReport(0, summary, run.events, files)


def _run_verify(cfg: ScenarioConfig, out_dir: str) -> ExitReport:
    from . import acceptance
    results = acceptance.run_all(verbose=True)
    n_fail = sum(1 for r in results if not r.passed)
    summary = {r.name: ("PASS" if r.passed else "FAIL") for r in results}
    files = [artifacts.write_json(os.path.join(out_dir, "verify.json"),
                                  {"results": [r.to_dict() for r in results]})]
    return ExitReport(0 if n_fail == 0 else 2, summary, [], files)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="starlab",
        description="Numerical laboratory for expanding radiation gaseous stars")
    parser.add_argument("scenario", choices=("profile", "expansion", "phase",
                                             "evolve-ss", "evolve-linear",
                                             "evolve-thermo", "verify"))
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="seed override")
    parser.add_argument("--verify", action="store_true",
                        help="treat runtime events as failures (exit 2)")
    args = parser.parse_args(argv)

    raw: dict
    if args.config:
        with open(args.config) as fh:
            raw = __import__("json").load(fh)
    else:
        raw = {}
    raw["scenario"] = args.scenario
    if args.out:
        raw["out_dir"] = args.out
    if args.seed is not None:
        raw["seed"] = args.seed
        raw.setdefault("initial", {})["seed"] = args.seed

    try:
        cfg = validate_config(raw)
    except ConfigInvalid as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return 1

    try:
        report = run_scenario(cfg)
    except StarlabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2

    for key, val in report.summary.items():
        print(f"{key}: {val}")
    if report.events:
        for e in report.events:
            print(f"event: {e.kind} at clock {e.clock:.6g} {e.detail}")
        if args.verify and cfg.scenario != "verify":
            return 2
    return report.status


if __name__ == "__main__":
    sys.exit(main())
