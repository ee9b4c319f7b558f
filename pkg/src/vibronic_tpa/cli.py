"""Command-line driver: figure-grade scans from declarative run specs.

Subcommands mirror the standard analysis set: population dynamics per
correlation degree, resonance-selectivity scans, Schmidt analysis,
transition-matrix maps, steady-state-versus-entanglement parametrics,
and the exact-versus-analytic cost benchmark.  CSVs carry the data;
plots are rendered alongside.  Exit codes: 0 success, 2 configuration
error, 3 numerical failure, 4 cross-check bound violation.
"""

import argparse
import json
import sys as _sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import exact_dynamics as ex
from . import photons as ph
from . import pt_engine as pt
from .errors import ConfigError, CrossCheckError, VibronicTpaError
from .report import FigureBundle, emit_plot, write_csv, write_matrix_csv
from .runspec import DESK_MODES, RunSpec, load_runspec

_MODE_LABELS = {"uncorrelated": "uncorrelated"}


def mode_label(kind, ratio):
    return "uncorrelated" if kind == "uncorrelated" else f"kappa_{ratio:g}"


def _desk_discretization(spec, cfg, ratio):
    key = "uncorrelated" if cfg.kind == "uncorrelated" else ratio
    if spec.desk_scale:
        if key not in DESK_MODES:
            raise ConfigError(f"no desk-scale mode budget for sigma_s ratio {ratio!r}")
        modes, span = DESK_MODES[key]
        return ex.DiscretizationConfig(
            modes=modes, delta_k=2.0 * span * cfg.sigma / (modes - 1), k_center=cfg.k0
        )
    return ex.discretization_for(cfg, key)


def _exact_trajectory(spec, sys, ip, cfg, ratio, horizon):
    disc = _desk_discretization(spec, cfg, ratio)
    coup = ex.CouplingMatrices.build(sys, ip.gamma)
    state = ex.init_state(cfg, disc)
    return ex.integrate(state, sys, coup, disc, cfg, t_end=horizon)


# ---------------------------------------------------------------------------
# scan runners
# ---------------------------------------------------------------------------

def run_populations(spec: RunSpec) -> FigureBundle:
    """Population traces of the lowest excited levels per photon mode."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    ip = spec.interaction()
    alphas = np.arange(spec.n_alphas)
    error_rows = []
    worst_rel = 0.0
    for kind, ratio in spec.modes():
        cfg = spec.field_config(sys, kind, ratio)
        label = mode_label(kind, ratio)
        horizon = pt.steady_horizon_sigma(cfg) / cfg.sigma
        times = np.linspace(cfg.r0, horizon, spec.n_points)
        header = ["r_sigma"] + [f"alpha_{a}" for a in alphas]

        jsa = ph.build_jsa_grid(cfg, m=spec.jsa_grid_m, span=spec.jsa_grid_span)
        bundle.add_csv(write_matrix_csv(out / f"jsa_{label}.csv", jsa.k_axis, jsa.values))
        bundle.add_plot(
            emit_plot(
                np.abs(jsa.values),
                out / f"jsa_{label}.svg",
                title=f"|JSA| {label}",
                xlabel="k index",
                ylabel="k' index",
            )
        )

        steady_pt = None
        if spec.engine in ("analytic", "both"):
            res = pt.population_traces(sys, cfg, ip, alphas, times=times)
            table = np.column_stack(
                [res[0].times] + [r.populations for r in res]
            )
            bundle.add_csv(write_csv(out / f"populations_{label}.csv", header, table))
            bundle.add_plot(
                emit_plot(
                    table,
                    out / f"populations_{label}.svg",
                    title=f"excited populations, {label}",
                    xlabel="r sigma",
                    ylabel="population",
                )
            )
            steady_pt = np.array([r.steady for r in res])
        if spec.engine in ("exact", "both"):
            traj = _exact_trajectory(spec, sys, ip, cfg, ratio, horizon)
            table = np.column_stack([traj.times_sigma, traj.excited[:, alphas]])
            bundle.add_csv(write_csv(out / f"populations_exact_{label}.csv", header, table))
            bundle.add_plot(
                emit_plot(
                    table,
                    out / f"populations_exact_{label}.svg",
                    title=f"excited populations (exact), {label}",
                    xlabel="r sigma",
                    ylabel="population",
                )
            )
            if steady_pt is not None:
                steady_ex = traj.steady_excited()[alphas]
                top = np.argsort(steady_pt)[::-1][:3]
                for a in top:
                    rel = abs(steady_ex[a] - steady_pt[a]) / steady_pt[a]
                    worst_rel = max(worst_rel, rel)
                    error_rows.append(
                        [label, int(a), steady_pt[a], steady_ex[a], rel]
                    )
    if error_rows:
        bundle.add_csv(
            write_csv(
                out / "engine_cross_check.csv",
                ["mode", "alpha", "steady_analytic", "steady_exact", "rel_error"],
                error_rows,
            )
        )
    bundle.finalize(spec.digest(), spec.engine)
    if error_rows and worst_rel > spec.cross_check_tol:
        raise CrossCheckError(
            f"engine cross-check failed: max rel error {worst_rel:.3e} "
            f"> bound {spec.cross_check_tol:g}"
        )
    return bundle


def _selectivity_worker(args):
    spec_doc, ratio, target = args
    spec = RunSpec(**spec_doc)
    sys = spec.build_molecule()
    cfg = spec.field_config(sys, "entangled", ratio)
    return target, pt.selectivity(sys, cfg, spec.interaction(), target)


def run_selectivity_scan(spec: RunSpec) -> FigureBundle:
    """Selectivity of every resonance target, one curve per sigma_s."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    ip = spec.interaction()
    targets = list(spec.targets) if spec.targets else list(range(min(46, sys.n_excited)))
    rows = []
    curves = {}
    for ratio in spec.sigma_s_ratios:
        if spec.workers > 1:
            spec_doc = dict(spec.__dict__)
            args = [(spec_doc, ratio, t) for t in targets]
            with ProcessPoolExecutor(max_workers=spec.workers) as pool:
                results = dict(pool.map(_selectivity_worker, args))
            xs = [results[t] for t in targets]
        else:
            cfg = spec.field_config(sys, "entangled", ratio)
            xs = [pt.selectivity(sys, cfg, ip, t) for t in targets]
        curves[ratio] = np.array(xs)
        for t, xi in zip(targets, xs):
            rows.append([t, float(sys.energies_e[t]), ratio, xi])
    bundle.add_csv(
        write_csv(
            out / "selectivity.csv",
            ["target_alpha", "two_k0_ev", "sigma_s_ratio", "xi"],
            rows,
        )
    )
    table = np.column_stack([targets] + [curves[r] for r in spec.sigma_s_ratios])
    bundle.add_plot(
        emit_plot(
            table,
            out / "selectivity.svg",
            title="selectivity vs resonance target",
            xlabel="target level",
            ylabel="xi",
        )
    )
    bundle.finalize(spec.digest(), "analytic")
    return bundle


def run_schmidt(spec: RunSpec) -> FigureBundle:
    """Schmidt spectra and entanglement measures per photon mode."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    summary = []
    for kind, ratio in spec.modes():
        cfg = spec.field_config(sys, kind, ratio)
        label = mode_label(kind, ratio)
        grid = ph.build_jsa_grid(cfg, m=spec.jsa_grid_m, span=spec.jsa_grid_span)
        sp = ph.schmidt_decompose(grid)
        bundle.add_csv(write_matrix_csv(out / f"jsa_{label}.csv", grid.k_axis, grid.values))
        lam = sp.coefficients[:64]
        bundle.add_csv(
            write_csv(
                out / f"schmidt_spectrum_{label}.csv",
                ["j", "lambda_j"],
                [[j, v] for j, v in enumerate(lam)],
            )
        )
        summary.append([label, ratio if ratio is not None else 0.0, sp.K, sp.k_linear, sp.S])
    bundle.add_csv(
        write_csv(
            out / "schmidt_summary.csv",
            ["mode", "sigma_s_ratio", "K", "K_linear", "S_bits"],
            summary,
        )
    )
    bundle.finalize(spec.digest(), "analytic")
    return bundle


def run_transition_matrix(spec: RunSpec) -> FigureBundle:
    """Theta maps per photon mode and resonance target."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    for target in spec.theta_targets:
        if not 0 <= target < sys.n_excited:
            raise ConfigError(f"theta target {target} outside the excited set")
        k0 = 0.5 * float(sys.energies_e[target])
        for kind, ratio in spec.modes():
            sigma = spec.sigma_ev()
            cfg = ph.PhotonFieldConfig(
                k0=k0,
                sigma=sigma,
                sigma_s=None if kind == "uncorrelated" else ratio * sigma,
                r0=None if spec.r0_sigma is None else spec.r0_sigma / sigma,
                kind=kind,
            )
            tm = pt.transition_matrix(sys, cfg)
            label = f"{mode_label(kind, ratio)}_target_{target}"
            rows = [
                [nu, alpha, tm.values[nu, alpha]]
                for nu in range(sys.n_intermediate)
                for alpha in range(sys.n_excited)
            ]
            bundle.add_csv(
                write_csv(out / f"theta_{label}.csv", ["nu", "alpha", "theta"], rows)
            )
            bundle.add_plot(
                emit_plot(
                    tm.values,
                    out / f"theta_{label}.svg",
                    title=f"Theta, {label}",
                    xlabel="alpha",
                    ylabel="nu",
                    kind="heatmap",
                )
            )
    bundle.finalize(spec.digest(), "analytic")
    return bundle


def run_steady_vs_entanglement(spec: RunSpec) -> FigureBundle:
    """Steady target population against Schmidt measures, with fits."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    ip = spec.interaction()
    rows = []
    for ratio in spec.sigma_s_ratios:
        cfg = spec.field_config(sys, "entangled", ratio)
        sp = ph.schmidt_decompose(
            ph.build_jsa_grid(cfg, m=spec.jsa_grid_m, span=spec.jsa_grid_span)
        )
        steady = pt.population_trace(sys, cfg, ip, spec.target_level).steady
        rows.append([ratio, sp.K, sp.k_linear, sp.S, steady])
    bundle.add_csv(
        write_csv(
            out / "steady_vs_entanglement.csv",
            ["sigma_s_ratio", "K", "K_linear", "S_bits", "steady_population"],
            rows,
        )
    )
    arr = np.array([r[1:] for r in rows], dtype=float)
    report = {"n_points": len(rows)}
    if len(rows) >= 3:
        k, pop = arr[:, 0], arr[:, 3]
        coef = np.polyfit(k, pop, 1)
        resid = pop - np.polyval(coef, k)
        ss_tot = float(np.sum((pop - pop.mean()) ** 2))
        report["k_linear_fit"] = {
            "slope": float(coef[0]),
            "intercept": float(coef[1]),
            "r_squared": 1.0 - float(np.sum(resid**2)) / ss_tot,
        }
        s = arr[:, 2]
        n = len(pop)
        rss1 = float(np.sum((pop - np.polyval(np.polyfit(s, pop, 1), s)) ** 2))
        rss2 = float(np.sum((pop - np.polyval(np.polyfit(s, pop, 2), s)) ** 2))
        report["s_fit_aic"] = {
            "linear": n * float(np.log(max(rss1, 1e-300) / n)) + 4.0,
            "quadratic": n * float(np.log(max(rss2, 1e-300) / n)) + 6.0,
        }
        report["s_quadratic_preferred"] = (
            report["s_fit_aic"]["quadratic"] < report["s_fit_aic"]["linear"]
        )
        bundle.add_plot(
            emit_plot(
                np.column_stack([k, pop]),
                out / "steady_vs_k.svg",
                title="steady population vs Schmidt number",
                xlabel="K",
                ylabel="steady population",
            )
        )
        bundle.add_plot(
            emit_plot(
                np.column_stack([s, pop]),
                out / "steady_vs_s.svg",
                title="steady population vs entanglement entropy",
                xlabel="S (bits)",
                ylabel="steady population",
            )
        )
    else:
        report["warning"] = "fewer than three sigma_s points; fits not emitted"
    fit_path = Path(out) / "fit_report.json"
    fit_path.parent.mkdir(parents=True, exist_ok=True)
    fit_path.write_text(json.dumps(report, indent=2) + "\n")
    bundle.add_extra(fit_path)
    bundle.finalize(spec.digest(), "analytic")
    return bundle


def run_benchmark(spec: RunSpec) -> FigureBundle:
    """Wall/memory cost of the exact solver vs the closed-form engine."""
    out = Path(spec.out_dir)
    bundle = FigureBundle(out_dir=out)
    sys = spec.build_molecule()
    ip = spec.interaction()
    cfg = spec.field_config(sys, "entangled", 0.25)
    mode_counts = [301, 501, 1001] if spec.desk_scale else [2001, 3001, 5001]
    window = (cfg.r0, cfg.r0 + 6.0 / cfg.sigma)  # fixed short physics window
    alphas = np.arange(spec.n_alphas)
    records = []
    for m in mode_counts:
        disc = ex.DiscretizationConfig(
            modes=m, delta_k=14.0 * cfg.sigma / (m - 1), k_center=cfg.k0
        )

        def exact_run():
            coup = ex.CouplingMatrices.build(sys, ip.gamma)
            state = ex.init_state(cfg, disc)
            ex.integrate(state, sys, coup, disc, cfg, t_end=window[1], n_samples=16)

        def analytic_run():
            pt.population_traces(
                sys, cfg, ip, alphas, times=np.linspace(window[0], window[1], 200)
            )

        records.extend(ex.benchmark(exact_run, analytic_run, m, 0.25))
    rows = [
        [r.engine, r.modes, r.sigma_s_ratio, r.wall_seconds, r.peak_mem_bytes]
        for r in records
    ]
    bundle.add_csv(
        write_csv(
            out / "benchmark.csv",
            ["engine", "modes", "sigma_s_ratio", "wall_seconds", "peak_mem_bytes"],
            rows,
        )
    )
    exact = [r for r in records if r.engine == "exact"]
    analytic = [r for r in records if r.engine == "analytic"]
    logm = np.log([r.modes for r in exact])
    logmem = np.log([r.peak_mem_bytes for r in exact])
    mem_exponent = float(np.polyfit(logm, logmem, 1)[0])
    walls_a = [r.wall_seconds for r in analytic]
    speedup = exact[-1].wall_seconds / analytic[-1].wall_seconds
    report = {
        "exact_memory_exponent": mem_exponent,
        "analytic_wall_spread": max(walls_a) / max(min(walls_a), 1e-12),
        "speedup_at_largest": speedup,
        "largest_modes": exact[-1].modes,
    }
    path = Path(out) / "benchmark_report.json"
    path.write_text(json.dumps(report, indent=2) + "\n")
    bundle.add_extra(path)
    table = np.column_stack(
        [
            [r.modes for r in exact],
            [r.wall_seconds for r in exact],
            [r.wall_seconds for r in analytic],
        ]
    )
    bundle.add_plot(
        emit_plot(
            np.log10(table),
            out / "benchmark.svg",
            title="cost scaling (log10): exact vs analytic",
            xlabel="log10 modes",
            ylabel="log10 seconds",
        )
    )
    bundle.finalize(spec.digest(), "both")
    return bundle


def run_reproduce_all(spec: RunSpec) -> list:
    """Every scan into its own subdirectory."""
    base = Path(spec.out_dir)
    bundles = []
    for name, runner in (
        ("populations", run_populations),
        ("selectivity", run_selectivity_scan),
        ("schmidt", run_schmidt),
        ("theta", run_transition_matrix),
        ("steady_vs_k", run_steady_vs_entanglement),
        ("benchmark", run_benchmark),
    ):
        sub = RunSpec(**{**spec.__dict__, "out_dir": str(base / name)})
        bundles.append(runner(sub))
    return bundles


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_RUNNERS = {
    "populations": run_populations,
    "selectivity": run_selectivity_scan,
    "schmidt": run_schmidt,
    "theta": run_transition_matrix,
    "steady-vs-k": run_steady_vs_entanglement,
    "benchmark": run_benchmark,
    "reproduce-all": run_reproduce_all,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="vibronic-tpa",
        description="Two-photon vibronic excitation scans (closed-form PT + exact solver).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} scan")
        p.add_argument("--config", type=str, default=None, help="YAML run spec")
        p.add_argument("--molecule", type=str, default=None, help="molecule file or 'na2'")
        p.add_argument(
            "--sigma-s",
            type=str,
            default=None,
            help="comma-separated sigma_s/sigma ratios, e.g. 1,0.5,0.25",
        )
        p.add_argument("--target", type=int, default=None, help="resonance target level")
        p.add_argument(
            "--engine", choices=["analytic", "exact", "both"], default=None
        )
        p.add_argument("--desk-scale", dest="desk_scale", action="store_true", default=None)
        p.add_argument(
            "--paper-scale",
            dest="desk_scale",
            action="store_false",
            help="use the full published mode counts (slow, memory-heavy)",
        )
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--freq-convention", choices=["h", "hbar"], default=None)
        p.add_argument("--workers", type=int, default=None)
    return parser


def _spec_from_args(args) -> RunSpec:
    overrides = {
        "molecule": args.molecule,
        "target_level": args.target,
        "engine": args.engine,
        "desk_scale": args.desk_scale,
        "out_dir": args.out,
        "freq_convention": args.freq_convention,
        "workers": args.workers,
    }
    if args.sigma_s is not None:
        try:
            ratios = [float(tok) for tok in args.sigma_s.split(",") if tok.strip()]
        except ValueError as err:
            raise ConfigError(f"bad --sigma-s list: {args.sigma_s!r}") from err
        overrides["sigma_s_ratios"] = ratios
    return load_runspec(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        spec = _spec_from_args(args)
        _RUNNERS[args.command](spec)
    except ConfigError as err:
        print(f"config error: {err}", file=_sys.stderr)
        return 2
    except CrossCheckError as err:
        print(f"cross-check violation: {err}", file=_sys.stderr)
        return 4
    except VibronicTpaError as err:
        print(f"numeric error: {err}", file=_sys.stderr)
        return 3
    print(f"{args.command} finished in {time.perf_counter() - t0:.1f}s -> {spec.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
