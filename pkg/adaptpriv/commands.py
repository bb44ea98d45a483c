# coding=utf-8

""" Command implementations of the command-line front end.

Every command loads its configuration, runs the solvers and prints its
results on standard-out as `key=value` lines. The results are also returned
so that the commands can be driven programmatically.
"""

import os
from typing import Dict, List, Optional

import attrdict

from adaptpriv import config
from adaptpriv import curves
from adaptpriv import exports
from adaptpriv import excs
from adaptpriv import loggers
from adaptpriv import sessions
from adaptpriv import targets
from adaptpriv import utils
from adaptpriv.loggers import create_logger
from adaptpriv.sentry import initialize_sentry
from adaptpriv.types.curves import CurvePoint
from adaptpriv.types.distributions import Channel
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import ReleaseRecord
from adaptpriv.types.releases import SolveReport
from adaptpriv.types.solver import BaResult
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair


# Directory of the shipped instance configurations.
DIR_INSTANCES = os.path.join(os.path.dirname(__file__), "instances")

# Multiplier pairs of the channels written by `cmd_reproduce`.
REPRODUCE_PAIRS = [(0.01, 0.01), (0.1, 0.1), (5.0, 5.0)]

# Time-share samples densifying the reproduced information surface.
REPRODUCE_TIMESHARE = 500

logger = create_logger(logger_name=__name__)


def shipped_instance(name: str) -> str:
    """ Returns the path of a shipped instance configuration."""

    return os.path.join(DIR_INSTANCES, name)


def _emit(**fields) -> None:
    for key, value in fields.items():
        if isinstance(value, float):
            value = utils.format_float(value)
        print("{0}={1}".format(key, value))


def _emit_channel(channel: Channel) -> None:
    n_rhat, n_z, n_x = channel.shape
    for z in range(n_z):
        for x in range(n_x):
            row = " ".join(
                utils.format_float(channel.probs[a, z, x])
                for a in range(n_rhat)
            )
            print("channel[z={0},x={1}]={2}".format(z, x, row))


def load(
    fname_config_file: Optional[str],
    config_schema: Dict,
    logger_level: Optional[str] = None,
) -> attrdict.AttrDict:
    """ Imports a configuration, applies its logging level and initializes
        error reporting.

    Args:
        fname_config_file (Optional[str]): The path, falling back to the
            `ADAPTPRIV_CONFIG` environment variable.
        config_schema (Dict): The schema to validate against.
        logger_level (Optional[str]): Overrides the configured level.

    Returns:
        attrdict.AttrDict: The configuration.
    """

    fname = config.resolve_config_path(fname_config_file=fname_config_file)
    cfg = config.import_config(
        fname_config_file=fname, config_schema=config_schema,
    )

    loggers.set_level(logger_level or cfg.get("logger_level", "INFO"))
    initialize_sentry(cfg=cfg)

    return cfg


def _is_session_file(fname: str) -> bool:
    return "requests" in config.load_config_file(fname_config_file=fname)


def cmd_validate(
    fname_config_file: Optional[str] = None,
    logger_level: Optional[str] = None,
) -> attrdict.AttrDict:
    """ Validates an instance or session configuration.

    Every probability tensor is built, so malformed distributions are
    reported with the offending field.
    """

    fname = config.resolve_config_path(fname_config_file=fname_config_file)

    if _is_session_file(fname=fname):
        cfg = load(fname, config.config_schema_session, logger_level)
        px, specs, problem, _, _ = config.build_session(cfg=cfg)
        _emit(
            config=fname,
            kind="session",
            problem=problem.value,
            x_size=px.size,
            requests=len(specs),
            status="ok",
        )
        return cfg

    cfg = load(fname, config.config_schema_instance, logger_level)
    j = config.build_joint(cfg=cfg)
    config.build_distortion(cfg=cfg)
    config.build_options(cfg=cfg)
    config.build_grid(cfg=cfg)
    config.build_budgets(cfg=cfg)

    _emit(
        config=fname,
        kind="instance",
        problem=config.build_problem(cfg=cfg).value,
        shape="({0},{1},{2})".format(*j.shape),
        status="ok",
    )

    return cfg


def cmd_ba_run(
    fname_config_file: Optional[str],
    mu1: float,
    mu2: float,
    fname_out: Optional[str] = None,
    overrides: Optional[Dict] = None,
    logger_level: Optional[str] = None,
) -> BaResult:
    """ Runs the solver of the configured problem at fixed multipliers,
        optionally writing its objective trace as CSV.

    Raises:
        excs.UsageError: Raised for negative multipliers, before any
            computation.
    """

    if mu1 < 0 or mu2 < 0:
        msg = "Multipliers must be >= 0, got mu1={0!r} mu2={1!r}."
        raise excs.UsageError(msg.format(mu1, mu2))

    cfg = load(fname_config_file, config.config_schema_instance, logger_level)
    problem = config.build_problem(cfg=cfg)

    result = curves.solve_dual(
        j=config.build_joint(cfg=cfg),
        problem=problem,
        mu=LagrangePair(mu1=mu1, mu2=mu2),
        d=config.build_distortion(cfg=cfg),
        opts=config.build_options(cfg=cfg, overrides=overrides),
    )

    if fname_out:
        exports.write_trace_csv(trace=result.trace, destination=fname_out)

    _emit(
        problem=problem.value,
        mu1=float(mu1),
        mu2=float(mu2),
        utility=result.achieved.utility,
        eps_leak=result.achieved.eps_leak,
        delta_leak=result.achieved.delta_leak,
        objective=result.objective,
        iterations=result.iterations,
        converged=str(result.converged).lower(),
    )
    _emit_channel(channel=result.channel)

    return result


def cmd_trace(
    fname_config_file: Optional[str],
    fname_out: str,
    timeshare: int = 0,
    seed: int = 0,
    overrides: Optional[Dict] = None,
    threads: int = 1,
    logger_level: Optional[str] = None,
) -> List[CurvePoint]:
    """ Sweeps the configured (or default) grid, optionally densifies the
        information surface and writes the curve CSV.

    Raises:
        excs.UsageError: Raised when time-sharing is asked for the distortion
            problem.
    """

    cfg = load(fname_config_file, config.config_schema_instance, logger_level)
    problem = config.build_problem(cfg=cfg)

    if timeshare and not problem.is_information:
        msg = "Time-sharing is only available for information problems."
        raise excs.UsageError(msg)

    j = config.build_joint(cfg=cfg)
    grid = config.build_grid(cfg=cfg) or curves.default_grid()

    points = curves.sweep(
        j=j,
        problem=problem,
        grid=grid,
        d=config.build_distortion(cfg=cfg),
        opts=config.build_options(cfg=cfg, overrides=overrides),
        threads=threads,
    )

    if timeshare:
        points = curves.timeshare_densify(
            points=points,
            j=j,
            n_samples=timeshare,
            rng_seed=seed,
            problem=problem,
        )

    curves.export_curve(points=points, destination=fname_out)

    _emit(
        problem=problem.value,
        points=len(points),
        failed=sum(1 for p in points if not p.ok),
        out=fname_out,
    )

    return points


def cmd_solve(
    fname_config_file: Optional[str],
    eps: Optional[float] = None,
    delta: Optional[float] = None,
    overrides: Optional[Dict] = None,
    logger_level: Optional[str] = None,
) -> List[SolveReport]:
    """ Solves for the given budget or, without one, for every configured
        budget.
    """

    if (eps is None) != (delta is None):
        raise excs.UsageError("Pass both --eps and --delta or neither.")

    cfg = load(fname_config_file, config.config_schema_instance, logger_level)
    problem = config.build_problem(cfg=cfg)

    if eps is not None:
        budgets = [Budget(eps=eps, delta=delta)]
    else:
        budgets = config.build_budgets(cfg=cfg)
        if not budgets:
            raise excs.UsageError("No budget given and none configured.")

    j = config.build_joint(cfg=cfg)
    d = config.build_distortion(cfg=cfg)
    opts = config.build_options(cfg=cfg, overrides=overrides)

    reports = []
    for budget in budgets:
        report = targets.solve_for_budget(
            j=j, problem=problem, budget=budget, d=d, opts=opts,
        )
        reports.append(report)

        _emit(
            eps=float(budget.eps),
            delta=float(budget.delta),
            path=report.path.value,
            feasible=str(report.feasible).lower(),
            local=str(report.local).lower(),
            utility=report.achieved.utility,
            eps_leak=report.achieved.eps_leak,
            delta_leak=report.achieved.delta_leak,
        )
        if report.mu is not None:
            _emit(mu1=report.mu.mu1, mu2=report.mu.mu2)
        if report.dual_bound is not None:
            _emit(dual_bound=report.dual_bound)
        _emit_channel(channel=report.channel)

    return reports


def cmd_session(
    fname_config_file: Optional[str],
    fname_out: Optional[str] = None,
    seed: Optional[int] = None,
    overrides: Optional[Dict] = None,
    logger_level: Optional[str] = None,
) -> List[ReleaseRecord]:
    """ Runs a configured session and writes its transcript."""

    cfg = load(fname_config_file, config.config_schema_session, logger_level)
    px, specs, problem, x_true, seed_cfg = config.build_session(cfg=cfg)

    records, _ = sessions.run_session(
        px=px,
        specs=specs,
        problem=problem,
        opts=config.build_options(cfg=cfg, overrides=overrides),
        seed=seed_cfg if seed is None else seed,
        x_true=x_true,
    )

    if fname_out:
        exports.write_transcript(records=records, destination=fname_out)

    for record in records:
        _emit(
            step=record.step,
            label=record.label,
            sampled=record.sampled,
            utility=record.achieved.utility,
            eps_leak=record.achieved.eps_leak,
            delta_leak=record.achieved.delta_leak,
            cumulative_leakage=record.cumulative_leakage,
        )
        if record.budget_effective is not None:
            _emit(delta_effective=float(record.budget_effective.delta))

    return records


def cmd_reproduce(
    dir_out: str,
    overrides: Optional[Dict] = None,
    threads: int = 1,
    timeshare: int = REPRODUCE_TIMESHARE,
    logger_level: Optional[str] = None,
) -> List[str]:
    """ Writes the datasets of the shipped instance: the channels and
        objective traces at three multiplier pairs plus the distortion and
        information curves.

    Returns:
        List[str]: The written files.
    """

    try:
        os.makedirs(dir_out, exist_ok=True)
    except OSError as exc:
        msg = "Cannot create output directory '{0}': {1}"
        raise excs.IoError(msg.format(dir_out, exc))

    written = []

    fname_distortion = shipped_instance("reference.json")
    cfg = load(fname_distortion, config.config_schema_instance, logger_level)
    j = config.build_joint(cfg=cfg)
    d = config.build_distortion(cfg=cfg)
    opts = config.build_options(cfg=cfg, overrides=overrides)

    channels = {}
    for mu1, mu2 in REPRODUCE_PAIRS:
        result = curves.solve_dual(
            j=j,
            problem=EnumProblem.DISTORTION,
            mu=LagrangePair(mu1=mu1, mu2=mu2),
            d=d,
            opts=opts,
        )
        name = "{0}_{1}".format(mu1, mu2)
        channels[name] = result.channel
        fname = os.path.join(dir_out, "trace_{0}.csv".format(name))
        exports.write_trace_csv(trace=result.trace, destination=fname)
        written.append(fname)

    fname = os.path.join(dir_out, "channels.json")
    exports.write_channels_json(channels=channels, destination=fname)
    written.append(fname)

    fname = os.path.join(dir_out, "curve_distortion.csv")
    cmd_trace(
        fname_config_file=fname_distortion,
        fname_out=fname,
        overrides=overrides,
        threads=threads,
        logger_level=logger_level,
    )
    written.append(fname)

    fname = os.path.join(dir_out, "curve_mutual_info.csv")
    cmd_trace(
        fname_config_file=shipped_instance("reference_mi.json"),
        fname_out=fname,
        timeshare=timeshare,
        overrides=overrides,
        threads=threads,
        logger_level=logger_level,
    )
    written.append(fname)

    msg = "Reproduced {0} files under '{1}'."
    logger.info(msg.format(len(written), dir_out))

    return written
