"""Experiment driver: measurement-count / noise sweeps and the solver benchmark."""

from __future__ import annotations

import configparser
import hashlib
import json
import os
import zlib
from dataclasses import asdict, dataclass, replace

import numpy as np

from .diagnostics import write_csv
from .forward import assemble_operator
from .forward import dump_operator as write_operator_dump
from .geometry import make_grid, network_listing, place_network, take_rays
from .objective import Objective
from .phantom import PhantomParams, add_noise, true_profile, write_field
from .solvers import LbfgsOptions, lbfgs_trust_region, ldfp

SOLVERS = ("lbfgs", "ldfp")


@dataclass(frozen=True)
class ExperimentConfig:
    # grid
    nx: int = 30
    ny: int = 30
    nz: int = 30
    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0
    z_min: float = 0.0
    z_max: float = 15.0
    # phantom
    base: float = 350.0
    scale_height_1: float = 1.0
    scale_height_2: float = 7.0
    gradient_x: float = 30.0
    gradient_y: float = 50.0
    amplitude_sin: float = 30.0
    amplitude_cos: float = 20.0
    cycles_x: float = 4.0
    cycles_y: float = 6.0
    # network
    stations: int = 15
    emitters: int = 30
    seed: int = 7
    samples_per_ray: int | None = None
    # regularization
    beta: float = 1e-2
    alpha_tv: float = 1e-13
    alpha_quadratic: float = 1e-15
    # sweep
    ray_counts: tuple[int, ...] = (1, 50, 100, 240, 360, 450)
    noise_fractions: tuple[float, ...] = (0.001,)
    solvers: tuple[str, ...] = ("lbfgs",)
    penalties: tuple[str, ...] = ("tv",)
    # solver options
    lbfgs_memory: int = 10
    lbfgs_max_iterations: int = 300
    lbfgs_grad_tol: float = 0.0
    ldfp_outer_iterations: int = 30
    ldfp_inner_tol: float = 1e-8
    ldfp_inner_max_iterations: int = 200
    # benchmark
    benchmark_rays: int = 450
    benchmark_noise: float = 0.001
    benchmark_lbfgs_iterations: int = 1000
    benchmark_ldfp_iterations: int = 30
    # output
    output_dir: str = "out"

    def __post_init__(self):
        if not self.ray_counts or not self.noise_fractions:
            raise ValueError("sweep lists must be nonempty")
        if not self.solvers or not self.penalties:
            raise ValueError("solver and penalty lists must be nonempty")
        for p in self.noise_fractions:
            if p < 0.0:
                raise ValueError(f"noise fraction must be >= 0, got {p}")
        limit = self.stations * self.emitters
        for s in self.ray_counts:
            if not 1 <= s <= limit:
                raise ValueError(f"ray count {s} outside [1, {limit}]")
        for name in self.solvers:
            if name not in SOLVERS:
                raise ValueError(f"unknown solver {name!r}, expected one of {SOLVERS}")
        for pen in self.penalties:
            if pen not in ("tv", "quadratic"):
                raise ValueError(f"unknown penalty {pen!r}")

    def make_grid(self):
        return make_grid(
            self.nx,
            self.ny,
            self.nz,
            (self.x_min, self.x_max, self.y_min, self.y_max, self.z_min, self.z_max),
        )

    def make_phantom_params(self) -> PhantomParams:
        return PhantomParams(
            base=self.base,
            scale_height_1=self.scale_height_1,
            scale_height_2=self.scale_height_2,
            gradient_x=self.gradient_x,
            gradient_y=self.gradient_y,
            amplitude_sin=self.amplitude_sin,
            amplitude_cos=self.amplitude_cos,
            cycles_x=self.cycles_x,
            cycles_y=self.cycles_y,
        )


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def _parse_list(raw: str, convert):
    items = [tok for tok in raw.replace(",", " ").split() if tok]
    return tuple(convert(tok) for tok in items)


def load_config(path) -> ExperimentConfig:
    """Read an INI-style config; every missing key keeps its default."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise OSError(f"config file {path} not found or unreadable")
    base = default_config()
    kw = {}

    def grab(section, key, convert, field=None):
        if parser.has_option(section, key):
            kw[field or key] = convert(parser.get(section, key))

    for key in ("nx", "ny", "nz"):
        grab("grid", key, int)
    for key in ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max"):
        grab("grid", key, float)
    for key in (
        "base",
        "scale_height_1",
        "scale_height_2",
        "gradient_x",
        "gradient_y",
        "amplitude_sin",
        "amplitude_cos",
        "cycles_x",
        "cycles_y",
    ):
        grab("phantom", key, float)
    grab("network", "stations", int)
    grab("network", "emitters", int)
    grab("network", "seed", int)
    if parser.has_option("network", "samples_per_ray"):
        raw = parser.get("network", "samples_per_ray").strip()
        kw["samples_per_ray"] = None if raw == "auto" else int(raw)
    grab("regularization", "beta", float)
    grab("regularization", "alpha_tv", float)
    grab("regularization", "alpha_quadratic", float)
    if parser.has_option("sweep", "ray_counts"):
        kw["ray_counts"] = _parse_list(parser.get("sweep", "ray_counts"), int)
    if parser.has_option("sweep", "noise_fractions"):
        kw["noise_fractions"] = _parse_list(parser.get("sweep", "noise_fractions"), float)
    if parser.has_option("sweep", "solvers"):
        kw["solvers"] = _parse_list(parser.get("sweep", "solvers"), str)
    if parser.has_option("sweep", "penalties"):
        kw["penalties"] = _parse_list(parser.get("sweep", "penalties"), str)
    grab("solver", "lbfgs_memory", int)
    grab("solver", "lbfgs_max_iterations", int)
    grab("solver", "lbfgs_grad_tol", float)
    grab("solver", "ldfp_outer_iterations", int)
    grab("solver", "ldfp_inner_tol", float)
    grab("solver", "ldfp_inner_max_iterations", int)
    grab("benchmark", "rays", int, "benchmark_rays")
    grab("benchmark", "noise", float, "benchmark_noise")
    grab("benchmark", "lbfgs_iterations", int, "benchmark_lbfgs_iterations")
    grab("benchmark", "ldfp_iterations", int, "benchmark_ldfp_iterations")
    grab("output", "directory", str, "output_dir")
    return replace(base, **kw)


def config_hash(config: ExperimentConfig) -> str:
    payload = json.dumps(asdict(config), sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode()).hexdigest()


def derive_noise_seed(base_seed: int, rays: int, noise: float) -> int:
    """Stable per-combination seed; crc32 keeps it reproducible across runs."""
    return (base_seed ^ zlib.crc32(f"{rays}:{noise!r}".encode())) & 0x7FFFFFFF


def _combo_name(solver: str, penalty: str, rays: int, noise: float) -> str:
    label = solver if penalty == "tv" else f"{solver}-quad"
    return f"{label}_{rays}rays_{noise:g}"


def _say(progress, message):
    if progress is not None:
        progress(message)


def run_sweep(
    config: ExperimentConfig,
    dump_network: bool = False,
    dump_operator: bool = False,
    progress=None,
) -> dict:
    """Run every (ray count, noise, solver, penalty) combination.

    Each combination writes one convergence CSV and one reconstruction field
    file; a manifest with the config hash lists everything.  A failing
    combination is logged and skipped, never aborts the sweep.
    """
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    grid = config.make_grid()
    params = config.make_phantom_params()
    truth = true_profile(grid, params)
    network = place_network(grid, config.stations, config.emitters, config.seed)
    _say(progress, f"network: {len(network.rays)} admissible rays")
    if dump_network:
        with open(os.path.join(out, "network.txt"), "w") as fh:
            fh.write(network_listing(network))

    outputs = []
    failures = 0
    for rays in config.ray_counts:
        sub = take_rays(network, rays)
        op = assemble_operator(sub, config.samples_per_ray)
        if dump_operator:
            write_operator_dump(op, os.path.join(out, f"operator_{rays}rays.txt"))
        f_true = op.apply(truth.values)
        for noise in config.noise_fractions:
            f_delta, delta = add_noise(
                f_true, noise, derive_noise_seed(config.seed, rays, noise)
            )
            for solver in config.solvers:
                for penalty in config.penalties:
                    name = _combo_name(solver, penalty, rays, noise)
                    entry = {
                        "name": name,
                        "solver": solver,
                        "penalty": penalty,
                        "rays": rays,
                        "noise": noise,
                        "delta": delta,
                        "csv": f"{name}.csv",
                        "field": f"{name}.fld",
                    }
                    if solver == "ldfp" and penalty != "tv":
                        entry["status"] = "skipped: ldfp needs the tv penalty"
                        outputs.append(entry)
                        _say(progress, f"{name}: skipped (ldfp needs tv)")
                        continue
                    try:
                        result = _solve_combo(
                            config, grid, op, f_delta, truth, solver, penalty
                        )
                        write_csv(result.records, os.path.join(out, entry["csv"]))
                        write_field(result.field, os.path.join(out, entry["field"]))
                        entry["status"] = "ok"
                        entry["iterations"] = result.iterations
                        entry["termination"] = result.termination
                        entry["final_relative_error"] = result.records[-1].relative_error
                        _say(
                            progress,
                            f"{name}: {result.iterations} iterations, "
                            f"rel error {result.records[-1].relative_error:.4f}",
                        )
                    except Exception as exc:  # keep sweeping, record the failure
                        failures += 1
                        entry["status"] = f"failed: {exc}"
                        _say(progress, f"{name}: FAILED ({exc})")
                    outputs.append(entry)

    manifest = {
        "mode": "sweep",
        "config_hash": config_hash(config),
        "failures": failures,
        "outputs": outputs,
    }
    with open(os.path.join(out, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
    return manifest


def _solve_combo(config, grid, op, f_delta, truth, solver, penalty):
    alpha = config.alpha_tv if penalty == "tv" else config.alpha_quadratic
    objective = Objective(
        operator=op,
        data=f_delta,
        alpha=alpha,
        grid=grid,
        penalty=penalty,
        beta=config.beta,
    )
    phi0 = np.zeros(grid.n_nodes)
    if solver == "lbfgs":
        options = LbfgsOptions(
            memory=config.lbfgs_memory,
            max_iterations=config.lbfgs_max_iterations,
            grad_tol=config.lbfgs_grad_tol,
        )
        return lbfgs_trust_region(objective, phi0, options, truth=truth)
    return ldfp(
        objective,
        phi0,
        inner_tol=config.ldfp_inner_tol,
        inner_max_iterations=config.ldfp_inner_max_iterations,
        max_iterations=config.ldfp_outer_iterations,
        truth=truth,
    )


def run_benchmark(config: ExperimentConfig, progress=None) -> dict:
    """Time LDFP against trust-region L-BFGS on one identical problem instance."""
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    grid = config.make_grid()
    params = config.make_phantom_params()
    truth = true_profile(grid, params)
    network = place_network(grid, config.stations, config.emitters, config.seed)
    sub = take_rays(network, config.benchmark_rays)
    op = assemble_operator(sub, config.samples_per_ray)
    f_true = op.apply(truth.values)
    f_delta, delta = add_noise(
        f_true,
        config.benchmark_noise,
        derive_noise_seed(config.seed, config.benchmark_rays, config.benchmark_noise),
    )

    def fresh_objective():
        return Objective(
            operator=op,
            data=f_delta,
            alpha=config.alpha_tv,
            grid=grid,
            penalty="tv",
            beta=config.beta,
        )

    phi0 = np.zeros(grid.n_nodes)
    _say(progress, f"benchmark: lbfgs for {config.benchmark_lbfgs_iterations} iterations")
    lbfgs_result = lbfgs_trust_region(
        fresh_objective(),
        phi0,
        LbfgsOptions(
            memory=config.lbfgs_memory,
            max_iterations=config.benchmark_lbfgs_iterations,
            grad_tol=0.0,
        ),
        truth=truth,
    )
    _say(progress, f"benchmark: ldfp for {config.benchmark_ldfp_iterations} iterations")
    ldfp_result = ldfp(
        fresh_objective(),
        phi0,
        inner_tol=config.ldfp_inner_tol,
        inner_max_iterations=config.ldfp_inner_max_iterations,
        max_iterations=config.benchmark_ldfp_iterations,
        truth=truth,
    )

    write_csv(lbfgs_result.records, os.path.join(out, "benchmark_lbfgs.csv"))
    write_csv(ldfp_result.records, os.path.join(out, "benchmark_ldfp.csv"))

    def summary(result):
        per_iter = result.seconds / max(1, result.iterations)
        return {
            "iterations": result.iterations,
            "termination": result.termination,
            "total_seconds": result.seconds,
            "seconds_per_iteration": per_iter,
            "final_relative_error": result.records[-1].relative_error,
            "final_discrepancy": result.records[-1].discrepancy,
        }

    lbfgs_summary = summary(lbfgs_result)
    ldfp_summary = summary(ldfp_result)
    equal_iters = ldfp_summary["iterations"]
    report = {
        "mode": "benchmark",
        "config_hash": config_hash(config),
        "rays": config.benchmark_rays,
        "noise": config.benchmark_noise,
        "delta": delta,
        "lbfgs": lbfgs_summary,
        "ldfp": ldfp_summary,
        # cost of running lbfgs for as many iterations as ldfp took,
        # extrapolated from its measured per-iteration time
        "lbfgs_seconds_for_equal_iterations": lbfgs_summary["seconds_per_iteration"]
        * equal_iters,
        "speed_ratio_equal_iterations": (
            ldfp_summary["seconds_per_iteration"]
            / lbfgs_summary["seconds_per_iteration"]
        ),
    }
    with open(os.path.join(out, "benchmark.json"), "w") as fh:
        json.dump(report, fh, indent=2)
    _say(
        progress,
        "benchmark: lbfgs {0:.4g}s/iter, ldfp {1:.4g}s/iter, ratio {2:.2f}".format(
            lbfgs_summary["seconds_per_iteration"],
            ldfp_summary["seconds_per_iteration"],
            report["speed_ratio_equal_iterations"],
        ),
    )
    return report
