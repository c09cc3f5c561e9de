"""Command-line entry point.

Subcommands: ``solve`` (full pipeline plus report), ``eigs`` (basis
eigenvalues), ``convergence`` (refinement study against the exact solution),
``check`` (estimate verification only), ``sharpness`` (embedding series).
Exit codes: 0 all checks passed, 1 a check failed, 2 config or usage error,
3 numerical failure. Output CSVs are written atomically with 17 significant
digits so identical runs are byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .assembly import assemble_forms, export_matrix_coo
from .config import RunConfig, build_problem
from .errors import ConfigError, NcparabError, NoOracle
from .estimates import (
    apriori_bounds,
    check_cauchy_bound,
    check_continuity,
    check_uniqueness_condition,
    compute_constants,
)
from .integrator import (
    build_galerkin_system,
    energy_identity_residuals,
    solve_evolution,
)
from .meshing import build_mesh, export_mesh
from .presets import get_preset
from .problem import factorize_principal, sample_interior_points, validate_coefficients
from .sharpness import find_divergence_epsilon, series_hs_lower_bound, series_plus_norm
from .spectral import generalized_eigenbasis


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if not isinstance(v, str) else v for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _prepare(cfg: RunConfig):
    spec, resolution, k, steps = build_problem(cfg)
    validate_coefficients(spec)
    mesh = build_mesh(spec.domain, resolution, spec.dirichlet_selector)
    factorized = factorize_principal(spec, sample_interior_points(spec.domain, 16))
    forms = assemble_forms(mesh, spec, factorized)
    k = min(k, forms.N)
    basis = generalized_eigenbasis(forms.k_plus, forms.mass, k)
    return spec, mesh, forms, basis, k, steps


def _run_estimates(cfg: RunConfig, spec, forms, basis, k, trajectory) -> tuple[list, bool]:
    rows: list[list] = []
    ok = True
    c1, c2 = compute_constants(spec)
    rows += [["c1", _fmt(c1)], ["c2", _fmt(c2)]]
    if cfg.checks_bounds:
        u0_full = np.zeros(forms.mesh.num_nodes, dtype=complex)
        if spec.initial is not None:
            nodes = forms.mesh.nodes
            u0_full = np.asarray(
                spec.initial(*(nodes[:, i] for i in range(forms.mesh.dim))), dtype=complex
            )
        report = apriori_bounds(
            trajectory, forms.dofmap.reduce(u0_full), c1, c2, spec.final_time
        )
        rows += [
            ["gronwall_factor", _fmt(report.gronwall_factor)],
            ["sup_bound_lhs", _fmt(report.sup_lhs)],
            ["sup_bound_rhs", _fmt(report.sup_rhs)],
            ["sup_bound_margin", _fmt(report.sup_rhs - report.sup_lhs)],
            ["sup_bound_pass", _fmt(report.sup_ok)],
            ["energy_bound_lhs", _fmt(report.energy_lhs)],
            ["energy_bound_rhs", _fmt(report.energy_rhs)],
            ["energy_bound_margin", _fmt(report.energy_rhs - report.energy_lhs)],
            ["energy_bound_pass", _fmt(report.energy_ok)],
        ]
        ok = ok and report.bounds_ok
    system = build_galerkin_system(forms, basis, k, source=spec.source)
    if cfg.checks_uniqueness:
        min_eig, uniq_ok = check_uniqueness_condition(system.interaction)
        rows += [["uniqueness_min_eig", _fmt(min_eig)], ["uniqueness_pass", _fmt(uniq_ok)]]
        ok = ok and uniq_ok
    if cfg.checks_continuity:
        rows.append(["continuity_max_jump", _fmt(check_continuity(trajectory))])
    if cfg.checks_energy:
        res = energy_identity_residuals(system, trajectory)
        energy_ok = bool(np.max(res) <= 1e-9) if len(res) else True
        rows += [
            ["energy_residual_max", _fmt(float(np.max(res)) if len(res) else 0.0)],
            ["energy_residual_pass", _fmt(energy_ok)],
        ]
        ok = ok and energy_ok
    if cfg.checks_cauchy:
        ratio, cauchy_ok = check_cauchy_bound(forms, c1, c2, seed=cfg.seed)
        rows += [["cauchy_ratio", _fmt(ratio)], ["cauchy_pass", _fmt(cauchy_ok)]]
        ok = ok and cauchy_ok
    rows.append(["all_pass", _fmt(ok)])
    return rows, ok


def run_solve(cfg: RunConfig, out_dir: str, write_mesh: bool = False) -> int:
    os.makedirs(out_dir, exist_ok=True)
    spec, mesh, forms, basis, k, steps = _prepare(cfg)
    trajectory = solve_evolution(spec, forms, basis, k, steps, cfg.time_theta)

    shown = min(k, 16)
    header = ["t", "norm_plus_sq", "norm_l2_sq", "dual_f_sq"] + [
        f"g_abs_{j}" for j in range(1, shown + 1)
    ]
    rows = []
    for m, t in enumerate(trajectory.times):
        row = [
            t,
            trajectory.norm_plus_sq[m],
            trajectory.norm_l2_sq[m],
            trajectory.dual_f_sq[m],
        ]
        row += list(np.abs(trajectory.coefficients[m, :shown]))
        rows.append(row)
    _write_csv(os.path.join(out_dir, "trajectory.csv"), header, rows)

    final = trajectory.forms.dofmap.expand(basis.vectors[:, :k] @ trajectory.coefficients[-1])
    _write_csv(
        os.path.join(out_dir, "solution_final.csv"),
        ["id", "re", "im"],
        [[i, v.real, v.imag] for i, v in enumerate(final)],
    )

    report_rows, ok = _run_estimates(cfg, spec, forms, basis, k, trajectory)
    _write_csv(os.path.join(out_dir, "report.csv"), ["key", "value"], report_rows)
    if write_mesh:
        export_mesh(mesh, out_dir)
    return 0 if ok else 1


def run_check(cfg: RunConfig, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    cfg.checks_bounds = True
    cfg.checks_uniqueness = True
    cfg.checks_continuity = True
    cfg.checks_energy = cfg.time_theta == 1.0
    spec, mesh, forms, basis, k, steps = _prepare(cfg)
    trajectory = solve_evolution(spec, forms, basis, k, steps, cfg.time_theta)
    report_rows, ok = _run_estimates(cfg, spec, forms, basis, k, trajectory)
    _write_csv(os.path.join(out_dir, "report.csv"), ["key", "value"], report_rows)
    return 0 if ok else 1


def run_eigs(cfg: RunConfig, out_dir: str, vectors: bool = False) -> int:
    os.makedirs(out_dir, exist_ok=True)
    spec, mesh, forms, basis, k, _ = _prepare(cfg)
    rows = [
        [j + 1, basis.eigenvalues[j], basis.mass_norms[j]] for j in range(basis.size)
    ]
    _write_csv(os.path.join(out_dir, "eigenvalues.csv"), ["j", "lambda", "mass_norm"], rows)
    if vectors:
        export_matrix_coo(os.path.join(out_dir, "eigenvectors.csv"), basis.vectors)
    return 0


def _interval_width(spec) -> float:
    return spec.domain.b - spec.domain.a


def solve_error_vs_oracle(preset_name: str, resolution: int, steps: int, theta: float):
    """Relative L2 error against the preset oracle at final time."""
    preset = get_preset(preset_name)
    if preset.oracle is None:
        raise NoOracle(f"preset {preset_name!r} has no exact solution")
    spec = preset.build()
    mesh = build_mesh(spec.domain, resolution, spec.dirichlet_selector)
    factorized = factorize_principal(spec, sample_interior_points(spec.domain, 16))
    forms = assemble_forms(mesh, spec, factorized)
    basis = generalized_eigenbasis(forms.k_plus, forms.mass, forms.N)
    trajectory = solve_evolution(spec, forms, basis, forms.N, steps, theta)
    numeric = basis.vectors @ trajectory.coefficients[-1]
    coords = tuple(mesh.nodes[forms.dofmap.free, i] for i in range(mesh.dim))
    exact = np.asarray(preset.oracle(*coords, spec.final_time), dtype=complex)
    diff = numeric - exact
    M = forms.mass
    err = np.sqrt(np.real(np.vdot(diff, M @ diff)))
    ref = np.sqrt(np.real(np.vdot(exact, M @ exact)))
    return err / ref


def _convergence_level(args):
    mode, preset_name, resolution, steps, theta = args
    preset = get_preset(preset_name)
    spec = preset.build()
    width = _interval_width(spec)
    h = width / resolution
    if mode == "eigs":
        mesh = build_mesh(spec.domain, resolution, spec.dirichlet_selector)
        factorized = factorize_principal(spec, sample_interior_points(spec.domain, 16))
        forms = assemble_forms(mesh, spec, factorized)
        basis = generalized_eigenbasis(forms.k_plus, forms.mass, min(3, forms.N))
        exact = np.array([(j * np.pi) ** 2 for j in range(1, basis.size + 1)])
        err = float(np.max(np.abs(basis.eigenvalues - exact) / exact))
        return h, float("nan"), err
    err = solve_error_vs_oracle(preset_name, resolution, steps, theta)
    return h, spec.final_time / steps, float(err)


def run_convergence(cfg: RunConfig, out_dir: str, jobs: int = 1) -> int:
    os.makedirs(out_dir, exist_ok=True)
    preset = get_preset(cfg.problem_preset)
    if preset.oracle is None:
        raise NoOracle(f"preset {cfg.problem_preset!r} has no exact solution")
    spec = preset.build()
    width = _interval_width(spec)
    levels = []
    if cfg.convergence_mode == "space_time":
        base = cfg.mesh_resolution or 25
        for i in range(cfg.convergence_levels):
            resolution = base * 2**i
            h = width / resolution
            steps = max(1, round(spec.final_time / (h / 10.0)))
            levels.append((cfg.convergence_mode, cfg.problem_preset, resolution, steps, cfg.time_theta))
    elif cfg.convergence_mode == "time":
        resolution = cfg.mesh_resolution or 200
        base_steps = cfg.time_steps or 10
        for i in range(cfg.convergence_levels):
            levels.append(
                (cfg.convergence_mode, cfg.problem_preset, resolution, base_steps * 2**i, cfg.time_theta)
            )
    else:  # eigs
        base = cfg.mesh_resolution or 25
        for i in range(cfg.convergence_levels):
            levels.append((cfg.convergence_mode, cfg.problem_preset, base * 2**i, 1, cfg.time_theta))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_convergence_level, levels))
    else:
        results = [_convergence_level(level) for level in levels]

    rows = []
    for i, (h, dt, err) in enumerate(results):
        order = float("nan") if i == 0 else float(np.log2(results[i - 1][2] / err))
        rows.append([h, dt, err, order])
    _write_csv(os.path.join(out_dir, "convergence.csv"), ["h", "dt", "error", "observed_order"], rows)
    return 0


def run_sharpness(cfg: RunConfig, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    terms = cfg.sharpness_terms
    if cfg.sharpness_epsilon > 0.0:
        epsilon = cfg.sharpness_epsilon
    else:
        epsilon = (2.0 * cfg.sharpness_s - 1.0) / 2.0
        find_divergence_epsilon(cfg.sharpness_s, terms=min(terms, 100_000))
    rows = []
    consistent = True
    for n in sorted({max(terms // 100, 10), max(terms // 10, 100), terms}):
        partial_a, tail_a = series_plus_norm(epsilon, n)
        lower = series_hs_lower_bound(cfg.sharpness_s, epsilon, n)
        verdict = "diverges" if lower.diverges else "converges"
        rows.append([n, partial_a, tail_a, lower.partial_sum, verdict])
        if n == terms and lower.diverges and not lower.growth_observed:
            consistent = False
    _write_csv(
        os.path.join(out_dir, "sharpness.csv"),
        ["N", "partial_A", "tail_A", "partial_B", "verdict"],
        rows,
    )
    return 0 if consistent else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ncparab",
        description="Galerkin solver and estimate checker for complex parabolic "
        "problems with degenerate Robin boundary conditions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "eigs", "convergence", "check", "sharpness"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="path to a key-value config file")
        p.add_argument("--out", default=None, help="output directory (default: output.dir)")
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        if name == "solve":
            p.add_argument("--export-mesh", action="store_true")
        if name == "eigs":
            p.add_argument("--vectors", action="store_true")
        if name == "sharpness":
            p.add_argument("--s", type=float, default=None)
            p.add_argument("--epsilon", type=float, default=None)
            p.add_argument("--terms", type=int, default=None)

    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg.seed = args.seed
        out_dir = args.out if args.out is not None else cfg.output_dir
        if args.command == "sharpness":
            if args.s is not None:
                cfg.sharpness_s = args.s
            if args.epsilon is not None:
                cfg.sharpness_epsilon = args.epsilon
            if args.terms is not None:
                cfg.sharpness_terms = args.terms
            return run_sharpness(cfg, out_dir)
        if args.command == "solve":
            return run_solve(cfg, out_dir, write_mesh=args.export_mesh)
        if args.command == "check":
            return run_check(cfg, out_dir)
        if args.command == "eigs":
            return run_eigs(cfg, out_dir, vectors=args.vectors)
        if args.command == "convergence":
            return run_convergence(cfg, out_dir, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NcparabError as exc:
        print(f"numerical failure: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
