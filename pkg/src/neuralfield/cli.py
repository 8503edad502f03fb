"""Batch command-line driver.

Subcommands: simulate, continue, fit-kernel, stability, pde-continue,
compare, input-experiment.  Every command reads a key = value configuration
(from --preset and/or --config, with --grid/--domain/--seed overrides),
writes its artifacts into --out, and is deterministic given config + seed.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

import numpy as np

from .analysis import count_spots
from .continuation import ContinuationConfig, detect_folds, read_branch_csv
from .grid import Field, read_field, write_field
from .kernelfit import (fit_rational, fit_report, initial_guess,
                        kernel_spectrum_samples, write_fit_curves)
from .model import (ModelParams, params_from_config, params_to_config,
                    trivial_state_spectrum, w_oscillatory)
from .pdepolar import (PdeParams, SectorGrid, build_operator,
                       continuation_callbacks, solve_pde4, solve_pde8,
                       write_sector_field)
from .presets import PRESET_NAMES, preset_config
from .rk4 import IntegrationConfig, integrate, write_norm_history
from .seeds import SeedSpec, make_seed
from .stability import SpectrumRequest, leading_spectrum
from .workflows import compare_branches, continue_in_mu, settle
from . import continuation as _continuation
from .model import RationalSpectrumParams, rhs

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BAD_INPUT = 2


def _load_config(args) -> configparser.ConfigParser:
    if args.preset:
        cp = preset_config(args.preset)
    else:
        cp = configparser.ConfigParser()
    if args.config:
        read = cp.read(args.config)
        if not read:
            raise FileNotFoundError(f"config file not found: {args.config}")
    if not cp.has_section("model"):
        raise ValueError("configuration has no [model] section; "
                         "use --preset and/or --config")
    if not cp.has_section("run"):
        cp.add_section("run")
    if args.grid is not None:
        cp["model"]["N"] = str(args.grid)
    if args.domain is not None:
        cp["model"]["L"] = repr(args.domain)
    if args.seed is not None:
        cp["run"]["rng_seed"] = str(args.seed)
    return cp


def _seed_spec(run: configparser.SectionProxy) -> SeedSpec:
    return SeedSpec(family=run.get("seed_family", "gaussian-bump"),
                    A=run.getfloat("seed_A", 6.0),
                    Lc=run.getfloat("seed_Lc", 5.77),
                    seed=run.getint("rng_seed", 0))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _simulate_common(p: ModelParams, run, out: Path):
    """Shared body of simulate and input-experiment; returns the result."""
    K = p.build_kernel()
    u0 = make_seed(_seed_spec(run), p.grid)
    cfg = IntegrationConfig(dt=run.getfloat("dt", 0.1), T=run.getfloat("T", 100.0),
                            snapshot_every=run.getint("snapshot_every", 0))
    result = integrate(u0, cfg, lambda u: rhs(u, p, K))
    write_norm_history(out / "norm_history.csv", result.norm_history)
    write_field(out / "final_state.nfield", result.u_final)
    for i, (t, snap) in enumerate(result.snapshots):
        write_field(out / f"snapshot_{i:04d}.nfield", snap)
    (out / "run_config.ini").write_text(params_to_config(p))
    return result


def cmd_simulate(args) -> int:
    cp = _load_config(args)
    p = params_from_config(cp["model"])
    out = _out_dir(args)
    result = _simulate_common(p, cp["run"], out)
    if result.blew_up:
        print("simulate: state became non-finite (blow-up); "
              "partial history written", file=sys.stderr)
        return EXIT_ERROR
    print(f"simulate: final norm {result.u_final.weighted_norm():.6g}, "
          f"max {float(np.max(result.u_final.values)):.6g}")
    return EXIT_OK


def cmd_input_experiment(args) -> int:
    cp = _load_config(args)
    p = params_from_config(cp["model"])
    run = cp["run"]
    if run.get("seed_family", "random-perturbation") != "random-perturbation":
        print("input-experiment: seed_family must be random-perturbation",
              file=sys.stderr)
        return EXIT_BAD_INPUT
    run["seed_family"] = "random-perturbation"
    out = _out_dir(args)
    result = _simulate_common(p, run, out)
    if result.blew_up:
        print("input-experiment: blow-up", file=sys.stderr)
        return EXIT_ERROR
    # spots = connected components of {u > half the global max}
    n = count_spots(result.u_final, threshold_frac=0.5)
    (out / "spot_count.txt").write_text(f"{n}\n")
    print(f"input-experiment: sigma={p.input.sigma:g} -> {n} spots")
    return EXIT_OK


def _bootstrap_field(cp, p: ModelParams, run) -> Field:
    state_file = run.get("state_file", "")
    if state_file:
        u = read_field(state_file)
        if u.grid != p.grid:
            raise ValueError(f"state file grid {u.grid} != configured grid {p.grid}")
        return u
    u0 = make_seed(_seed_spec(run), p.grid)
    K = p.build_kernel()
    T = run.getfloat("settle_T", 100.0)
    out = settle(u0, p, K, T=T, dt=run.getfloat("settle_dt", 0.5))
    if not np.all(np.isfinite(out.values)) or out.weighted_norm() < 1e-8:
        raise ValueError("time-stepping bootstrap did not reach a usable state")
    return out


def cmd_continue(args) -> int:
    cp = _load_config(args)
    p = params_from_config(cp["model"])
    run = cp["run"]
    out = _out_dir(args)
    try:
        u = _bootstrap_field(cp, p, run)
    except (OSError, ValueError) as exc:
        print(f"continue: invalid bootstrap: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    ccfg = ContinuationConfig(
        ds=run.getfloat("ds", 0.05),
        ds_min=run.getfloat("ds_min", 1e-4),
        ds_max=run.getfloat("ds_max", 0.5),
        max_steps=run.getint("max_steps", 200),
        newton_tol=run.getfloat("newton_tol", 1e-3),
        mu_min=run.getfloat("mu_min", None),
        mu_max=run.getfloat("mu_max", None))
    branch = continue_in_mu(u, p, p.build_kernel(), ccfg,
                            stability_every=run.getint("stability_every", 0))
    branch = detect_folds(branch)
    field_files = {}
    save_every = run.getint("save_fields_every", 0)
    if save_every > 0:
        for i, pt in enumerate(branch.points):
            if i % save_every == 0 and pt.u is not None:
                name = f"branch_{i:04d}.nfield"
                write_field(out / name, Field(p.grid, pt.u))
                field_files[i] = name
    branch.write_csv(out / "branch.csv", field_files)
    print(f"continue: {len(branch)} points, {len(branch.fold_points())} folds, "
          f"terminated: {branch.terminated}")
    return EXIT_OK


def cmd_fit_kernel(args) -> int:
    cp = _load_config(args)
    p = params_from_config(cp["model"])
    run = cp["run"]
    out = _out_dir(args)
    target = kernel_spectrum_samples(p.kernel.b)
    lines = []
    for order in (4, 8):
        fit = fit_rational(target, order, initial_guess(target, order))
        rep = fit_report(fit.params, target,
                         lambda r: w_oscillatory(r, p.kernel.b))
        write_fit_curves(out / f"fit_order{order}.csv", target, fit.params)
        q = fit.params
        lines.append(f"[order{order}]")
        lines.append(f"A = {float(q.A)!r}")
        lines.append(f"B = {float(q.B)!r}")
        lines.append(f"M = {float(q.M)!r}")
        if order == 8:
            lines.append(f"C = {float(q.C)!r}")
            lines.append(f"D = {float(q.D)!r}")
        lines.append(f"l2_error = {float(fit.final_l2_error)!r}")
        lines.append(f"converged = {fit.converged}")
        lines.append(f"what_at_zero_model = {rep.what_at_zero_model!r}")
        lines.append("")
        if not fit.converged:
            print(f"fit-kernel: order {order} did not converge", file=sys.stderr)
    (out / "fitted_params.ini").write_text("\n".join(lines))
    print(f"fit-kernel: wrote {out / 'fitted_params.ini'}")
    return EXIT_OK


def cmd_stability(args) -> int:
    cp = _load_config(args)
    p = params_from_config(cp["model"])
    out = _out_dir(args)
    u = read_field(args.state)
    K = p.build_kernel()
    req = SpectrumRequest(k=cp["run"].getint("n_eigenvalues", 20))
    res = leading_spectrum(u, p, K, req)
    res.write_csv(out / "spectrum.csv")
    print(f"stability: n_unstable = {res.n_unstable}, "
          f"leading Re = {res.eigenvalues[0].real:.6g}")
    if cp["run"].getboolean("dispersion", False):
        k, lam = trivial_state_spectrum(p, K)
        np.savetxt(out / "dispersion.csv", np.column_stack([k, lam]),
                   delimiter=",", header="k,lambda", comments="")
    return EXIT_OK


def _rational_from_run(run) -> RationalSpectrumParams:
    order = run.getint("pde_order", 4)
    return RationalSpectrumParams(
        order=order, A=run.getfloat("A"), B=run.getfloat("B"),
        M=run.getfloat("M"), C=run.getfloat("C", 0.3), D=run.getfloat("D", 10.0))


def cmd_pde_continue(args) -> int:
    cp = _load_config(args)
    mp = params_from_config(cp["model"])
    run = cp["run"]
    out = _out_dir(args)
    order = run.getint("pde_order", 4)
    g = SectorGrid(R=run.getfloat("R", mp.grid.L), Nr=run.getint("Nr", 300),
                   Ntheta=run.getint("Ntheta", 20))
    op = build_operator(g)
    pp = PdeParams(_rational_from_run(run), mp.firing)
    r, _ = g.meshgrid()
    u0 = run.getfloat("seed_A", 6.0) * np.exp(-r**2 / run.getfloat("seed_Lc", 5.77))
    solver = solve_pde4 if order == 4 else solve_pde8
    sol = solver(u0.ravel(), op, pp)
    if not sol.converged:
        print("pde-continue: initial solve failed", file=sys.stderr)
        return EXIT_BAD_INPUT
    dmu = run.getfloat("dmu", 1e-3)
    sol1 = solver(sol.u, op, pp.with_mu(mp.firing.mu + dmu))
    if not sol1.converged:
        print("pde-continue: second bootstrap solve failed", file=sys.stderr)
        return EXIT_BAD_INPUT
    res_fn, jv, linear_solver = continuation_callbacks(op, pp, order)

    def norm_fn(x):
        return g.disk_norm(x[:g.size])

    ccfg = ContinuationConfig(
        ds=run.getfloat("ds", 0.05), ds_min=run.getfloat("ds_min", 1e-5),
        ds_max=run.getfloat("ds_max", 0.5),
        max_steps=run.getint("max_steps", 300),
        newton_tol=run.getfloat("newton_tol", 1e-6),
        u_weight=g.hr * (1.0 if g.Ntheta == 1 else g.sector / g.Ntheta),
        mu_min=run.getfloat("mu_min", None), mu_max=run.getfloat("mu_max", None))
    branch = _continuation.continue_branch(
        (sol.u, mp.firing.mu), (sol1.u, mp.firing.mu + dmu), ccfg,
        res_fn, jv, norm_fn=norm_fn, linear_solver=linear_solver)
    branch = detect_folds(branch)
    branch.write_csv(out / "branch.csv")
    write_sector_field(out / "final_state.nsect", g, branch.points[-1].u[:g.size])
    print(f"pde-continue: order {order}, {len(branch)} points, "
          f"{len(branch.fold_points())} folds")
    return EXIT_OK


def cmd_compare(args) -> int:
    a = read_branch_csv(args.branch_a)
    b = read_branch_csv(args.branch_b)
    a, b = detect_folds(a), detect_folds(b)
    cmpres = compare_branches(a, b)
    out = _out_dir(args)
    (out / "compare.txt").write_text(cmpres.as_text())
    print(cmpres.as_text(), end="")
    return EXIT_OK


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="neuralfield",
        description="Localized states of neural field integral equations: "
                    "simulation, continuation, stability, kernel fitting.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None,
                        help="key = value configuration file")
    common.add_argument("--preset", type=str, default=None, choices=PRESET_NAMES,
                        help="named parameter preset")
    common.add_argument("--out", type=str, default="out",
                        help="output directory (created if missing)")
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed override for random seeds")
    common.add_argument("--grid", type=int, default=None,
                        help="override grid points per dimension N")
    common.add_argument("--domain", type=float, default=None,
                        help="override half-domain size L")

    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common]).set_defaults(fn=cmd_simulate)
    sub.add_parser("continue", parents=[common]).set_defaults(fn=cmd_continue)
    sub.add_parser("fit-kernel", parents=[common]).set_defaults(fn=cmd_fit_kernel)
    st = sub.add_parser("stability", parents=[common])
    st.add_argument("state", type=str, help="field binary to analyze")
    st.set_defaults(fn=cmd_stability)
    sub.add_parser("pde-continue", parents=[common]).set_defaults(fn=cmd_pde_continue)
    cmp_p = sub.add_parser("compare", parents=[common])
    cmp_p.add_argument("branch_a", type=str)
    cmp_p.add_argument("branch_b", type=str)
    cmp_p.set_defaults(fn=cmd_compare)
    sub.add_parser("input-experiment", parents=[common]).set_defaults(
        fn=cmd_input_experiment)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError, KeyError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
