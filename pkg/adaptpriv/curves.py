# coding=utf-8

""" Tracing of the utility-privacy-collusion curve.

A sweep solves the dual problem at every pair of a multiplier grid and
reports one operating point per pair. For the information utility the
surface obtained this way is sparse and non-convex, so it can be densified by
time-sharing: random convex combinations of existing channels that are kept
whenever no existing point dominates them.
"""

from typing import List, Optional, Sequence, Tuple

import numpy

from adaptpriv import excs
from adaptpriv import exports
from adaptpriv import probability
from adaptpriv import ba_distortion
from adaptpriv import ba_mutual_info
from adaptpriv import utils
from adaptpriv.loggers import create_logger
from adaptpriv.types.curves import CurvePoint
from adaptpriv.types.curves import EnumProvenance
from adaptpriv.types.curves import MultiplierGrid
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.releases import Budget
from adaptpriv.types.solver import Achieved
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import BaResult
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import MiOptions


# Tolerance of every dominance comparison.
TOL_DOMINANCE = 1e-9

# Bins per axis of the (eps, delta) histogram biasing time-share sampling.
DENSITY_BINS = 20

# Channels mixed by every time-share sample.
TIMESHARE_ARITY = 3

logger = create_logger(logger_name=__name__)


def default_grid() -> MultiplierGrid:
    """ Returns 15 log-spaced values per axis in `[1e-3, 10]`."""

    return MultiplierGrid.log_spaced(low=1e-3, high=10.0, num=15)


def check_problem(problem: EnumProblem, d: Optional[DistortionMatrix]) -> None:
    """ Checks that a distortion matrix is given exactly when needed.

    Raises:
        excs.InvalidInput: Raised when the distortion problem lacks `d`.
    """

    if problem is EnumProblem.DISTORTION and d is None:
        msg = "The distortion problem needs a distortion matrix."
        raise excs.InvalidInput(msg)


def solve_dual(
    j: Joint3,
    problem: EnumProblem,
    mu: LagrangePair,
    d: Optional[DistortionMatrix] = None,
    opts: Optional[MiOptions] = None,
    init_channel=None,
) -> BaResult:
    """ Solves the inner minimisation of the dual at fixed multipliers.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        problem (EnumProblem): The utility measure.
        mu (LagrangePair): The multipliers.
        d (Optional[DistortionMatrix]): The distortion, required by the
            distortion problem.
        opts (Optional[MiOptions]): Solver options. The distortion solver
            only reads `opts.base`.
        init_channel (Optional[Channel]): A warm-start channel.

    Returns:
        BaResult: The solver result.
    """

    check_problem(problem=problem, d=d)
    opts = opts or MiOptions()

    base = opts.base
    if init_channel is not None:
        base = BaOptions(
            tol=base.tol,
            max_iters=base.max_iters,
            init_seed=base.init_seed,
            init_mode=base.init_mode,
            init_channel=init_channel,
        )

    if problem is EnumProblem.DISTORTION:
        return ba_distortion.ba_distortion_run(j=j, d=d, mu=mu, opts=base)

    opts = MiOptions(
        base=base,
        n_init=opts.n_init,
        rng_seed=opts.rng_seed,
        threads=opts.threads,
    )
    n_rhat = d.shape[0] if d is not None else None

    if problem is EnumProblem.PNN:
        return ba_mutual_info.pnn_objective_solve(
            j=j, mu=mu, opts=opts, n_rhat=n_rhat,
        )

    return ba_mutual_info.ba_mi_run(j=j, mu=mu, opts=opts, n_rhat=n_rhat)


def point_from_result(mu: LagrangePair, result: BaResult) -> CurvePoint:
    """ Wraps a solver result into a grid point."""

    return CurvePoint(
        mu=mu,
        utility=result.achieved.utility,
        eps_leak=result.achieved.eps_leak,
        delta_leak=result.achieved.delta_leak,
        iterations=result.iterations,
        channel=result.channel,
        provenance=EnumProvenance.GRID,
        converged=result.converged,
    )


def sweep(
    j: Joint3,
    problem: EnumProblem,
    grid: MultiplierGrid,
    d: Optional[DistortionMatrix] = None,
    opts: Optional[MiOptions] = None,
    threads: int = 1,
) -> List[CurvePoint]:
    """ Solves the dual at every pair of `grid`.

    A solver error at one pair is logged and recorded on that point; the
    sweep continues with the remaining pairs.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        problem (EnumProblem): The utility measure.
        grid (MultiplierGrid): The multiplier pairs.
        d (Optional[DistortionMatrix]): The distortion matrix.
        opts (Optional[MiOptions]): Solver options.
        threads (int): Grid pairs solved concurrently.

    Returns:
        List[CurvePoint]: One point per pair, `mu1`-major.
    """

    check_problem(problem=problem, d=d)

    def _solve(mu: LagrangePair) -> CurvePoint:
        try:
            result = solve_dual(j=j, problem=problem, mu=mu, d=d, opts=opts)
        except excs.NumericError as exc:
            msg = "Solve at mu=({}, {}) failed with {}: {}"
            msg_fmt = msg.format(mu.mu1, mu.mu2, exc.code, exc.message)
            logger.error(msg_fmt)
            return CurvePoint.failed(
                mu=mu, error="{}: {}".format(exc.code, exc.message),
            )
        return point_from_result(mu=mu, result=result)

    points = utils.thread_map(
        func=_solve, items=list(grid.pairs()), threads=threads,
    )

    msg = "Swept {} multiplier pairs for the '{}' problem."
    msg_fmt = msg.format(len(points), problem.value)
    logger.info(msg_fmt)

    return points


def utility_at_least_as_good(
    a: float,
    b: float,
    problem: EnumProblem,
    tol: float = TOL_DOMINANCE,
) -> bool:
    """ Whether utility `a` is at least as good as `b` within `tol`."""

    if problem.is_information:
        return a >= b - tol

    return a <= b + tol


def utility_strictly_better(
    a: float,
    b: float,
    problem: EnumProblem,
    tol: float = TOL_DOMINANCE,
) -> bool:
    """ Whether utility `a` beats `b` by more than `tol`."""

    if problem.is_information:
        return a > b + tol

    return a < b - tol


def dominates(
    a: CurvePoint,
    b: CurvePoint,
    problem: EnumProblem,
    tol: float = TOL_DOMINANCE,
    strict: bool = True,
) -> bool:
    """ Whether point `a` dominates point `b`.

    `a` dominates `b` when it leaks no more on either constraint and its
    utility is at least as good. Strict dominance further requires one of the
    three to be better by more than `tol`.
    """

    weak = (
        a.eps_leak <= b.eps_leak + tol and
        a.delta_leak <= b.delta_leak + tol and
        utility_at_least_as_good(
            a=a.utility, b=b.utility, problem=problem, tol=tol,
        )
    )
    if not weak or not strict:
        return weak

    return (
        a.eps_leak < b.eps_leak - tol or
        a.delta_leak < b.delta_leak - tol or
        utility_strictly_better(
            a=a.utility, b=b.utility, problem=problem, tol=tol,
        )
    )


def pareto_violations(
    points: Sequence[CurvePoint],
    problem: EnumProblem,
    tol: float = TOL_DOMINANCE,
) -> List[Tuple[int, int]]:
    """ Lists pairs `(i, k)` where point `k` has strictly better utility than
        point `i` while leaking no more on either constraint.

    Failed points are ignored.
    """

    violations = []
    for i, point in enumerate(points):
        if not point.ok:
            continue
        for k, other in enumerate(points):
            if k == i or not other.ok:
                continue
            if (
                other.eps_leak <= point.eps_leak + tol and
                other.delta_leak <= point.delta_leak + tol and
                utility_strictly_better(
                    a=other.utility, b=point.utility, problem=problem, tol=tol,
                )
            ):
                violations.append((i, k))

    return violations


def dual_value(
    point: CurvePoint,
    budget: Budget,
    problem: EnumProblem,
) -> float:
    """ Returns `g - mu1 eps - mu2 delta` of a grid point.

    For the distortion problem this is a lower bound on the least distortion
    attainable under `budget`. For the information problems it bounds
    `-I(R_hat; R)` from below for a globally optimal inner solve.
    """

    sign = -1.0 if problem.is_information else 1.0

    return (
        sign * point.utility +
        point.mu.mu1 * (point.eps_leak - budget.eps) +
        point.mu.mu2 * (point.delta_leak - budget.delta)
    )


def density_weights(points: Sequence[CurvePoint]) -> numpy.ndarray:
    """ Returns sampling weights inversely proportional to how crowded the
        `(eps, delta)` histogram bin of every point is.
    """

    eps = numpy.array([p.eps_leak for p in points])
    delta = numpy.array([p.delta_leak for p in points])

    counts, edges_eps, edges_delta = numpy.histogram2d(
        eps, delta, bins=DENSITY_BINS,
    )
    idx_eps = numpy.clip(
        numpy.searchsorted(edges_eps, eps, side="right") - 1,
        0,
        DENSITY_BINS - 1,
    )
    idx_delta = numpy.clip(
        numpy.searchsorted(edges_delta, delta, side="right") - 1,
        0,
        DENSITY_BINS - 1,
    )

    weights = 1.0 / counts[idx_eps, idx_delta]

    return weights / weights.sum()


def achieved_for(
    ch: Channel,
    j: Joint3,
    problem: EnumProblem,
    d: Optional[DistortionMatrix] = None,
) -> Achieved:
    """ Recomputes the utility and both leakages of a channel."""

    if problem is EnumProblem.DISTORTION:
        return ba_distortion.achieved_distortion(ch=ch, j=j, d=d)

    return ba_mutual_info.achieved_mi(ch=ch, j=j)


def timeshare_point(
    points: Sequence[CurvePoint],
    weights: Sequence[float],
    j: Joint3,
    problem: EnumProblem = EnumProblem.MUTUAL_INFO,
    d: Optional[DistortionMatrix] = None,
) -> CurvePoint:
    """ Builds the point releasing the convex combination of the channels of
        `points` with coefficients `weights`.

    The multipliers of the point are the weighted multipliers of its
    sources.
    """

    channel = probability.mix_channels(
        channels=[p.channel for p in points],
        weights=weights,
    )
    achieved = achieved_for(ch=channel, j=j, problem=problem, d=d)
    mu = LagrangePair(
        mu1=float(sum(w * p.mu.mu1 for w, p in zip(weights, points))),
        mu2=float(sum(w * p.mu.mu2 for w, p in zip(weights, points))),
    )

    return CurvePoint(
        mu=mu,
        utility=achieved.utility,
        eps_leak=achieved.eps_leak,
        delta_leak=achieved.delta_leak,
        iterations=0,
        channel=channel,
        provenance=EnumProvenance.TIMESHARE,
    )


def timeshare_densify(
    points: Sequence[CurvePoint],
    j: Joint3,
    n_samples: int,
    rng_seed: int = 0,
    problem: EnumProblem = EnumProblem.MUTUAL_INFO,
) -> List[CurvePoint]:
    """ Adds time-shared points to the information surface.

    Every sample picks three distinct points, biased toward sparsely
    populated regions of the `(eps, delta)` plane, mixes their channels with
    flat-Dirichlet coefficients and keeps the result if no existing point
    dominates it, even weakly. Time-shared points that a newly kept point
    strictly dominates are dropped; grid points are always kept.

    Args:
        points (Sequence[CurvePoint]): The starting points.
        j (Joint3): The joint the channels were solved on.
        n_samples (int): Number of combinations drawn.
        rng_seed (int): Seed of the sampling generator.
        problem (EnumProblem): Must be an information problem.

    Returns:
        List[CurvePoint]: The solved input points, the kept time-shared
            points in order of discovery, then any failed input points.

    Raises:
        excs.InvalidInput: Raised for the distortion problem.
        excs.TooFewPoints: Raised with fewer than three solved points.
    """

    if not problem.is_information:
        msg = "Time-share densification only applies to information problems."
        raise excs.InvalidInput(msg)

    kept = [p for p in points if p.ok and p.channel is not None]
    if len(kept) < TIMESHARE_ARITY:
        msg = "Time-sharing needs at least {} solved points, got {}."
        raise excs.TooFewPoints(msg.format(TIMESHARE_ARITY, len(kept)))

    rng = numpy.random.default_rng(rng_seed)
    n_retained = 0
    for _ in range(n_samples):
        probs = density_weights(points=kept)
        chosen = rng.choice(
            len(kept), size=TIMESHARE_ARITY, replace=False, p=probs,
        )
        weights = rng.dirichlet(numpy.ones(TIMESHARE_ARITY))

        candidate = timeshare_point(
            points=[kept[i] for i in chosen],
            weights=weights,
            j=j,
            problem=problem,
        )

        if any(
            dominates(a=p, b=candidate, problem=problem, strict=False)
            for p in kept
        ):
            continue

        kept = [
            p for p in kept
            if p.provenance is EnumProvenance.GRID or
            not dominates(a=candidate, b=p, problem=problem)
        ]
        kept.append(candidate)
        n_retained += 1

    msg = "Time-sharing kept {} of {} samples."
    msg_fmt = msg.format(n_retained, n_samples)
    logger.info(msg_fmt)

    failed = [p for p in points if not p.ok]

    return kept + failed


def export_curve(points: Sequence[CurvePoint], destination: str) -> None:
    """ Writes the points as CSV rows sorted by `(mu1, mu2)`.

    Raises:
        excs.InvalidInput: Raised when `points` is empty.
        excs.IoError: Raised when the file cannot be written.
    """

    exports.write_curve_csv(points=points, destination=destination)
