"""Console entry point for ``magnon-benchkit``.

Every subcommand reads one experiment config (``--config PATH`` or a packaged
``--recipe NAME``) and writes columnar data or a text report to ``--out``
(stdout when omitted).

Exit codes: 0 success, 1 usage error, 2 config or data parse error,
3 fit did not converge, 4 numeric or domain error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Mapping
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, dsp
from .columnar import ColumnarOutput, DataFormatError, read_columnar
from .config import (
    MIN_FREQ_POINTS,
    UNITS,
    ConfigError,
    ExperimentConfig,
    SystemConfig,
    load_config,
    parse_config,
)
from .dynamics import (
    generalized_rabi_frequency,
    lifetime_from_energy,
    rabi_period,
    ringdown_map,
    simulate,
)
from .estimation import (
    MODEL_PARAMS,
    FitProblem,
    FitResult,
    crossing_field,
    default_bounds,
    derived_quantities,
    fit,
    fit_decay,
    init_guess,
    mirrored,
    perturb,
    select_branch,
)
from .logging import setup_logging
from .physics import CoupledSystem, design_sweep, effective_frequency, position_sweep, spin_count
from .recipes import list_recipes, load_recipe
from .regimes import classify, classify_rates
from .report import (
    design_report,
    fit_block,
    fit_report,
    lifetime_report,
    rabi_report,
    regime_report,
)
from .sweeps import (
    TWO_PI,
    bias_points,
    design_table,
    drive_pulse,
    frequency_grid,
    map_table,
    position_table,
    ringdown_table,
    spectrum_table,
    time_grid,
    trace_table,
)

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_PARSE", "EXIT_FIT", "EXIT_DOMAIN"]

log = logging.getLogger("magnon_benchkit.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_FIT = 3
EXIT_DOMAIN = 4
# seeded restarts used for |r|^2-only spectrum fits when none are configured
POWER_RESTARTS = 8
NS = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    def default(value):
        return argparse.SUPPRESS if suppress else value

    p.add_argument("--config", type=Path, default=default(None), help="Experiment config (INI).")
    p.add_argument("--recipe", default=default(None), help="Packaged recipe name.")
    p.add_argument(
        "--out", default=default(None), help="Output file ('-' for stdout); overrides [output]."
    )
    p.add_argument(
        "-v", "--verbose", action="store_true", default=default(False), help="Debug logging."
    )
    p.add_argument("--log-file", default=default(None), help="Also log to this rotating file.")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="magnon-benchkit",
        description="Cavity magnon-photon coupling: design, simulate, fit and classify.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--list-recipes", action="store_true", help="List packaged recipes and exit.")
    _add_common(ap, suppress=False)
    common = _Parser(add_help=False)
    _add_common(common, suppress=True)
    sub = ap.add_subparsers(dest="cmd", parser_class=_Parser)

    sub.add_parser(
        "design", parents=[common], help="Forward design: g, f_eff and N from geometry."
    )

    sp_spec = sub.add_parser("spectrum", parents=[common], help="Reflection spectrum table.")
    sp_spec.add_argument("--points", type=int, help="Frequency points (overrides [sweep]).")
    sp_spec.add_argument("--noise", type=float, help="Gaussian noise std added to |r|^2.")
    sp_spec.add_argument("--seed", type=int, help="Noise seed.")

    sp_map = sub.add_parser("map", parents=[common], help="|r|^2 versus bias field (long format).")
    sp_map.add_argument("--points", type=int, help="Frequency points per bias row.")
    sp_map.add_argument("--b-points", type=int, help="Number of bias fields.")

    for name, text in (
        ("rabi", "Time trace of the cavity energy with Rabi period check."),
        ("ringdown", "Cavity energy ringdown, optionally over a bias sweep."),
    ):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--t-max-ns", type=float, help="Simulated time span (ns).")
        sp.add_argument("--dt-ns", type=float, help="Integrator step (ns).")
        if name == "ringdown":
            sp.add_argument(
                "--window-ns",
                type=float,
                nargs=2,
                metavar=("START", "STOP"),
                help="Lifetime fit window (ns).",
            )
            sp.add_argument("--workers", type=int, help="Worker processes for the bias sweep.")

    sp_fit = sub.add_parser("fit", parents=[common], help="Fit a columnar data file.")
    sp_fit.add_argument("data", nargs="?", help="Data file (default: [task] data).")
    sp_fit.add_argument(
        "--model", choices=("auto", "spectrum", "field_map", "decay", "lorentzian")
    )
    sp_fit.add_argument(
        "--target",
        choices=("auto", "power", "complex"),
        help="Fit |r|^2 or complex r (auto: complex when a phase column exists).",
    )
    sp_fit.add_argument("--restarts", type=int, help="Extra seeded multi-start runs.")
    sp_fit.add_argument("--seed", type=int, help="Seed for the multi-start perturbations.")
    sp_fit.add_argument("--max-iter", type=int, help="Iteration cap per run.")

    sp_cls = sub.add_parser("classify", parents=[common], help="Coupling regime report.")
    sp_cls.add_argument("--g-mhz", type=float, help="Coupling g/2pi (MHz).")
    sp_cls.add_argument("--kappa-a-mhz", type=float, help="Cavity decay kappa_a/2pi (MHz).")
    sp_cls.add_argument("--kappa-m-mhz", type=float, help="Magnon decay kappa_m/2pi (MHz).")
    sp_cls.add_argument("--freq-ghz", type=float, help="Smaller mode frequency (GHz).")
    sp_cls.add_argument("--usc-threshold", type=float, help="g/omega marking USC.")
    return ap


# --- helpers -------------------------------------------------------------------------


def _load(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None and args.recipe is not None:
        raise ConfigError("give --config or --recipe, not both")
    if args.recipe is not None:
        return load_recipe(args.recipe)
    if args.config is not None:
        return load_config(args.config)
    return parse_config("", source="<defaults>")


def _system(config: ExperimentConfig, cmd: str) -> SystemConfig:
    if config.system is None:
        raise ConfigError(f"{cmd} needs a [system] block ({config.source})")
    return config.system


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text.rstrip("\n") + "\n")
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text.rstrip("\n") + "\n", encoding="utf-8")


def _to_stdout(out: str | None) -> bool:
    return out is None or out == "-"


def _points(flag: int | None) -> int | None:
    if flag is not None and flag < MIN_FREQ_POINTS:
        raise ConfigError(f"--points must be >= {MIN_FREQ_POINTS}")
    return flag


def _pick(flag, fallback):
    return fallback if flag is None else flag


def _si_column(data: ColumnarOutput, name: str, family: str, source: str) -> np.ndarray:
    idx = data.names.index(name)
    unit = data.columns[idx][1].lower()
    factor = UNITS[family].get(unit)
    if factor is None:
        known = ", ".join(UNITS[family])
        raise DataFormatError(source, 1, f"column {name}: unit {unit!r} is not one of {known}")
    if family == "frequency":
        factor *= TWO_PI
    return data.rows[:, idx] * factor


def _detect_model(data: ColumnarOutput, source: str) -> str:
    names = set(data.names)
    if {"b", "freq", "power"} <= names:
        return "field_map"
    if {"freq", "power"} <= names:
        return "spectrum"
    if {"t", "energy"} <= names:
        return "decay"
    raise DataFormatError(
        source, 1, "columns must be (freq, power), (b, freq, power) or (t, energy)"
    )


# --- commands ------------------------------------------------------------------------


def cmd_design(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    sc = _system(config, "design")
    if sc.g_source != "geometry":
        raise ConfigError("design needs g_source = geometry in [system]")
    system = sc.coupled
    task = config.task
    regime = classify(system, usc_threshold=task.usc_threshold)
    points = []
    table = None
    if task.diameters or task.scales != (1.0,):
        diameters = task.diameters or (2.0 * sc.magnon.radius,)
        points = design_sweep(sc.cavity, sc.magnon, diameters, task.scales, eta=sc.eta or 0.0)
        table = design_table(points)
    elif task.positions:
        wall = sc.position.wall_offset if sc.position is not None else 0.0
        table = position_table(position_sweep(sc.cavity, sc.magnon, task.positions, wall))
    text = design_report(
        omega_a=sc.cavity.omega_a,
        mode_volume=sc.cavity.require_volume(),
        spins=spin_count(sc.magnon),
        eta=sc.eta,
        g=sc.g,
        f_eff=effective_frequency(sc.cavity, sc.magnon),
        regime=regime,
        table=points,
    )
    sys.stdout.write(text + "\n")
    if table is not None:
        table.write(out)
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    system = _system(config, "spectrum").coupled
    grid = frequency_grid(config.sweep, system, points=_points(args.points))
    noise = _pick(args.noise, config.task.noise)
    seed = _pick(args.seed, config.task.seed)
    table = spectrum_table(system, grid, noise=noise, seed=seed)
    dips = dsp.find_dips(grid.omega, table.column("power"))
    log.info(
        "spectrum: %d points, dips at %s GHz",
        grid.points,
        ", ".join(f"{grid.omega[i] / (TWO_PI * 1e9):.6f}" for i in dips) or "none",
    )
    table.write(out)
    return EXIT_OK


def cmd_map(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    system = _system(config, "map").coupled
    sweep = config.sweep
    if args.b_points is not None:
        if args.b_points < 1:
            raise ConfigError("--b-points must be >= 1")
        sweep = replace(sweep, b_points=args.b_points)
    grid = frequency_grid(sweep, system, points=_points(args.points))
    b = bias_points(sweep, system)
    log.info("map: %d bias fields x %d frequencies", b.size, grid.points)
    map_table(system, b, grid).write(out)
    return EXIT_OK


def _time_grid(args, config: ExperimentConfig, system: CoupledSystem, pulse, b_values=()):
    t_max, dt = time_grid(config.sweep, system, pulse, b_values)
    if args.t_max_ns is not None:
        t_max = args.t_max_ns * NS
    if args.dt_ns is not None:
        dt = args.dt_ns * NS
    return t_max, dt


def cmd_rabi(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    system = _system(config, "rabi").coupled
    pulse = drive_pulse(config.sweep, system)
    t_max, dt = _time_grid(args, config, system, pulse)
    predicted = rabi_period(system.g)
    if system.detuning != 0:
        predicted = TWO_PI / generalized_rabi_frequency(system.g, system.detuning)
    trace = simulate(system, pulse, t_max, dt, decimate=config.output.decimate)
    measured = dsp.node_period(trace.t, trace.energy)
    extinction = dsp.node_extinction_db(trace.energy)
    text = rabi_report(predicted=predicted, measured=measured, extinction_db=extinction)
    comments = [line.strip() for line in text.splitlines()[1:]]
    trace_table(trace, comments).write(out)
    if not _to_stdout(out):
        sys.stdout.write(text + "\n")
    log.info("rabi: predicted %.4g ns, measured %.4g ns", predicted / NS, measured / NS)
    return EXIT_OK


def cmd_ringdown(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    system = _system(config, "ringdown").coupled
    sweep = config.sweep
    pulse = drive_pulse(sweep, system)
    single = sweep.b_start is None and sweep.b_stop is None
    b = np.array([system.bias_field]) if single else bias_points(sweep, system)
    t_max, dt = _time_grid(args, config, system, pulse, b)
    if args.window_ns is not None:
        window = (args.window_ns[0] * NS, args.window_ns[1] * NS)
    elif config.task.window is not None:
        window = config.task.window
    else:
        window = (0.0 if pulse is None else pulse.t_off, t_max)
    decimate = config.output.decimate
    if single:
        trace = simulate(system, pulse, t_max, dt, decimate=decimate)
        t, rows, fields = trace.t, [trace.energy], [system.bias_field]
    else:
        workers = _pick(args.workers, config.task.workers)
        rmap = ringdown_map(system, pulse, b, t_max, dt, decimate, workers)
        t, rows, fields = rmap.t, list(rmap.energy), list(rmap.b)
    window = (window[0], min(window[1], float(t[-1])))
    blocks = []
    for field, energy in zip(fields, rows, strict=True):
        body = lifetime_report(lifetime_from_energy(t, energy, window), window).splitlines()
        blocks.append([f"B = {field / 1e-3:.6g} mT"] + [line.strip() for line in body[1:]])
    if single:
        table = trace_table(trace, blocks[0])
    else:
        table = ringdown_table(rmap)
    table.write(out)
    if _to_stdout(out):
        for lines in blocks:
            log.info("ringdown: %s", "; ".join(lines))
    else:
        sys.stdout.write("\n\n".join("\n".join(lines) for lines in blocks) + "\n")
    return EXIT_OK


def _data_path(args: argparse.Namespace, config: ExperimentConfig) -> Path:
    if args.data:
        return Path(args.data)
    if config.task.data:
        path = Path(config.task.data)
        if not path.is_absolute() and args.config is not None:
            path = Path(args.config).parent / path
        return path
    raise ConfigError("fit needs a data file (argument or [task] data)")


def _clip_into(values: Mapping[str, float], bounds: Mapping[str, tuple[float, float]]):
    out = dict(values)
    for name, (lo, hi) in bounds.items():
        out[name] = min(max(out[name], lo), hi)
    return out


def _multi_start(
    run: Callable[[Mapping[str, float]], FitResult],
    init: Mapping[str, float],
    bounds: Mapping[str, tuple[float, float]],
    restarts: int,
    seed: int,
    branches: bool = False,
) -> FitResult:
    starts = [dict(init)]
    if branches:
        starts.append(_clip_into(mirrored(init), bounds))
    rng = np.random.default_rng(seed)
    starts.extend(_clip_into(perturb(init, rng), bounds) for _ in range(restarts))
    results = []
    for k, start in enumerate(starts):
        candidate = run(start)
        log.debug("start %d: residual %.6g", k, candidate.residual_norm)
        results.append(candidate)
    if branches:
        return select_branch(results)
    return min(results, key=lambda r: r.residual_norm)


def _free_names(config: ExperimentConfig, model: str) -> list[str]:
    names = MODEL_PARAMS[model]
    free = config.task.free or names
    unknown = [n for n in free if n not in names]
    if unknown:
        raise ConfigError(f"[task] free names unknown {model} parameters: {', '.join(unknown)}")
    return [n for n in names if n in free]


def _system_init(config: ExperimentConfig) -> dict[str, float]:
    if config.system is None:
        return {}
    sc = config.system
    system = sc.coupled
    return {
        "omega_a": sc.cavity.omega_a,
        "omega_m": system.omega_m,
        "kappa_a": sc.cavity.kappa_a,
        "kappa_a1": sc.cavity.kappa_a1,
        "kappa_m": sc.magnon.kappa_m,
        "g": sc.g,
        "gamma": sc.magnon.gamma,
        "omega_m0": sc.magnon.omega_m0,
    }


def cmd_fit(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    path = _data_path(args, config)
    source = str(path)
    data = read_columnar(path)
    task = config.task
    model = _pick(args.model, task.model)
    target = _pick(args.target, task.target)
    restarts = _pick(args.restarts, task.restarts)
    seed = _pick(args.seed, task.seed)
    max_iter = _pick(args.max_iter, task.max_iter)
    detected = _detect_model(data, source)
    if model == "auto":
        model = detected
    elif (model == "lorentzian" and detected != "spectrum") or (
        model not in ("lorentzian", detected)
    ):
        raise ConfigError(f"model {model} does not match the data columns ({detected})")
    log.info("fit: %s model on %s (%d rows)", model, source, data.rows.shape[0])

    extra: dict[str, float] = {}
    derived = None
    regime = None
    if model == "decay":
        t = _si_column(data, "t", "time", source)
        energy = data.column("energy")
        if task.window is not None:
            keep = (t >= task.window[0]) & (t <= task.window[1])
            t, energy = t[keep], energy[keep]
        result = fit_decay(t, energy)
        extra["tau_ns"] = 1.0 / (2.0 * result.params["kappa"]) / NS
    elif model == "field_map":
        omega = _si_column(data, "freq", "frequency", source)
        b = _si_column(data, "b", "field", source)
        power = data.column("power")
        init = {**_system_init(config), **task.init}
        missing = [n for n in MODEL_PARAMS["field_map"] if n not in init]
        if missing:
            raise ConfigError(f"field-map fits need [system] or init_* values for {missing}")
        names = _free_names(config, "field_map")
        fixed = {n: init[n] for n in MODEL_PARAMS["field_map"] if n not in names}
        bounds = default_bounds("field_map", init, omega, names)

        def run(start: Mapping[str, float]) -> FitResult:
            problem = FitProblem(
                model="field_map", x=omega, y=power, b=b, free=bounds, fixed=fixed
            )
            return fit(problem, start, max_iter)

        result = _multi_start(run, init, bounds, restarts or 0, seed)
        extra["crossing_field_mt"] = crossing_field(result) / 1e-3
        derived = derived_quantities(result)
        regime = classify_rates(
            result.params["g"],
            result.params["kappa_a"],
            result.params["kappa_m"],
            omega=result.params["omega_a"],
            usc_threshold=task.usc_threshold,
        )
    else:
        omega = _si_column(data, "freq", "frequency", source)
        power = data.column("power")
        y = power
        if target == "auto":
            target = "complex" if "phase" in data.names else "power"
        if target == "complex":
            if "phase" not in data.names:
                raise DataFormatError(source, 1, "complex target needs a phase(rad) column")
            y = np.sqrt(np.clip(power, 0.0, None)) * np.exp(1j * data.column("phase"))
        guess = init_guess(omega, power)
        init = {**guess, **{k: v for k, v in task.init.items() if k in guess}}
        if model == "spectrum" and init["g"] == 0 and "g" not in task.init:
            log.info("fit: single resonance found, fitting the uncoupled line shape")
            model = "lorentzian"
        if model == "lorentzian":
            names = ["omega_a", "kappa_a", "kappa_a1"]
            fixed = {"omega_m": init["omega_a"], "kappa_m": init["kappa_a"], "g": 0.0}
        else:
            names = _free_names(config, "spectrum")
            fixed = {n: init[n] for n in MODEL_PARAMS["spectrum"] if n not in names}
        bounds = default_bounds("spectrum", init, omega, names)
        # |r|^2 alone leaves the coupling branch open
        branches = target == "power" and "kappa_a1" in names
        if restarts is None:
            restarts = POWER_RESTARTS if branches and model == "spectrum" else 0
        log.info("fit: %s target, %d restarts", target, restarts)

        def run(start: Mapping[str, float]) -> FitResult:
            problem = FitProblem(
                model="spectrum", x=omega, y=y, free=bounds, fixed=fixed, target=target
            )
            return fit(problem, start, max_iter)

        result = _multi_start(run, init, bounds, restarts, seed, branches=branches)
        if model == "spectrum":
            derived = derived_quantities(result)
            omega_m = result.params["omega_m"]
            regime = classify_rates(
                result.params["g"],
                result.params["kappa_a"],
                result.params["kappa_m"],
                omega=min(result.params["omega_a"], omega_m) if omega_m > 0 else None,
                usc_threshold=task.usc_threshold,
            )

    sys.stdout.write(fit_report(result, derived, regime) + "\n")
    block = fit_block(result, derived, regime, extra)
    if _to_stdout(out):
        sys.stdout.write("\n" + block)
    else:
        _emit(block, out)
    if not result.converged:
        print(f"Fit did not converge: {result.message}", file=sys.stderr)
        return EXIT_FIT
    return EXIT_OK


def cmd_classify(args: argparse.Namespace, config: ExperimentConfig, out: str | None) -> int:
    threshold = _pick(args.usc_threshold, config.task.usc_threshold)
    flags = (args.g_mhz, args.kappa_a_mhz, args.kappa_m_mhz)
    if any(v is not None for v in flags):
        if any(v is None for v in flags):
            raise ConfigError("classify needs --g-mhz, --kappa-a-mhz and --kappa-m-mhz together")
        mhz = TWO_PI * 1e6
        omega = None if args.freq_ghz is None else args.freq_ghz * TWO_PI * 1e9
        report = classify_rates(
            args.g_mhz * mhz,
            args.kappa_a_mhz * mhz,
            args.kappa_m_mhz * mhz,
            omega=omega,
            usc_threshold=threshold,
        )
    else:
        report = classify(_system(config, "classify").coupled, usc_threshold=threshold)
    _emit(regime_report(report), out)
    return EXIT_OK


_HANDLERS: dict[str, Callable[[argparse.Namespace, ExperimentConfig, str | None], int]] = {
    "design": cmd_design,
    "spectrum": cmd_spectrum,
    "map": cmd_map,
    "rabi": cmd_rabi,
    "ringdown": cmd_ringdown,
    "fit": cmd_fit,
    "classify": cmd_classify,
}


def main(argv: list[str] | None = None) -> int:
    """Entry point for the ``magnon-benchkit`` console script; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.list_recipes:
        for name in list_recipes():
            print(name)
        return EXIT_OK
    if args.cmd is None:
        parser.print_usage(sys.stderr)
        print("magnon-benchkit: error: a subcommand is required", file=sys.stderr)
        return EXIT_USAGE
    setup_logging(args.verbose, log_file=args.log_file)
    try:
        config = _load(args)
        if args.log_file is None and config.output.log_file is not None:
            setup_logging(args.verbose, log_file=config.output.log_file)
        out = args.out if args.out is not None else config.output.path
        log.info("%s: start (%s)", args.cmd, config.source)
        code = _HANDLERS[args.cmd](args, config, out)
    except (ConfigError, DataFormatError) as exc:
        print(f"Config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, ArithmeticError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    log.info("%s: finished (exit %d)", args.cmd, code)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
