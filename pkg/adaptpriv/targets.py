# coding=utf-8

""" Solving for a release channel that meets a leakage budget.

The budget `(eps, delta)` is reached by nested bisection over the Lagrange
multipliers: the outer loop searches the smallest `mu2` whose solution meets
the collusion budget and, for every `mu2` it tries, the inner loop searches
the smallest `mu1` meeting the individual budget. Both loops rely on every
leakage being non-increasing in its own multiplier, which is checked as the
search proceeds. Where the leakage map jumps between two multipliers, or the
check fails, the channels found so far are time-shared toward the budget.
The best constant release is always a feasible candidate.
"""

import dataclasses
import math
from typing import Callable, List, Optional, Sequence, Tuple

from adaptpriv import excs
from adaptpriv import curves
from adaptpriv import probability
from adaptpriv.loggers import create_logger
from adaptpriv.types.curves import CurvePoint
from adaptpriv.types.curves import EnumProvenance
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import EnumSolvePath
from adaptpriv.types.releases import SolveReport
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import MiOptions


# Slack on the budget under which a channel counts as feasible.
TOL_FEASIBLE = 1e-6

# A bisection stops once the feasible leakage is this close to its budget.
TOL_BISECTION = 1e-4

# Slack tolerated on the monotonicity of a leakage in its multiplier.
TOL_MONOTONE = 1e-6

MAX_HALVINGS = 60

MAX_DOUBLINGS = 60

logger = create_logger(logger_name=__name__)


def _mix_toward(
    base: CurvePoint,
    other: CurvePoint,
    admits: Callable[[CurvePoint], bool],
    tight: Callable[[CurvePoint], bool],
    j: Joint3,
    problem: EnumProblem,
    d: Optional[DistortionMatrix],
    max_rounds: int = MAX_HALVINGS,
) -> Tuple[CurvePoint, float]:
    """ Moves from an admissible point toward another one as far as the
        budget allows.

    The leakages are convex in the channel, so the admissible mixing weights
    of `other` form an interval starting at zero, which is bisected.

    Returns:
        Tuple[CurvePoint, float]: The admissible mix with the largest weight
            found and that weight.
    """

    if admits(other):
        return other, 1.0

    lo, hi = 0.0, 1.0
    best = base
    for _ in range(max_rounds):
        if tight(best):
            break
        lam = 0.5 * (lo + hi)
        mixed = curves.timeshare_point(
            points=[other, base],
            weights=[lam, 1.0 - lam],
            j=j,
            problem=problem,
            d=d,
        )
        if admits(mixed):
            lo, best = lam, mixed
        else:
            hi = lam

    return best, lo


def timeshare_to_target(
    points: Sequence[CurvePoint],
    budget: Budget,
    j: Joint3,
    problem: EnumProblem,
    d: Optional[DistortionMatrix] = None,
    tol: float = TOL_BISECTION,
    max_rounds: int = MAX_HALVINGS,
) -> SolveReport:
    """ Time-shares operating points to the best channel within a budget.

    Starting from the feasible point of best utility, every infeasible point
    of better utility is mixed in as far as the budget allows. The best
    resulting channel is returned.

    Args:
        points (Sequence[CurvePoint]): Operating points with channels.
        budget (Budget): The leakage budget.
        j (Joint3): The joint the channels were solved on.
        problem (EnumProblem): The utility measure.
        d (Optional[DistortionMatrix]): The distortion matrix.
        tol (float): Mixing stops once an active leakage is within `tol` of
            its budget.
        max_rounds (int): Halvings per mixing search.

    Returns:
        SolveReport: The report with `path=timeshare` and the mixing
            coefficients over `points`.

    Raises:
        excs.TooFewPoints: Raised when no point carries a channel.
        excs.NoBracket: Raised when no point is feasible.
    """

    indexed = [
        (i, p) for i, p in enumerate(points) if p.ok and p.channel is not None
    ]
    if not indexed:
        raise excs.TooFewPoints("Time-sharing needs at least one solved point.")

    def admits(point: CurvePoint) -> bool:
        return budget.admits(
            eps_leak=point.eps_leak,
            delta_leak=point.delta_leak,
            tol=TOL_FEASIBLE,
        )

    def tight(point: CurvePoint) -> bool:
        return (
            point.eps_leak >= budget.eps - tol or
            point.delta_leak >= budget.delta - tol
        )

    feasible = [(i, p) for i, p in indexed if admits(p)]
    if not feasible:
        msg = ("None of {} points meets the budget (eps={}, delta={}), so "
               "time-sharing has nothing to start from.")
        msg_fmt = msg.format(len(indexed), budget.eps, budget.delta)
        raise excs.NoBracket(msg_fmt)

    idx_base, base = feasible[0]
    for i, p in feasible[1:]:
        if curves.utility_strictly_better(
            a=p.utility, b=base.utility, problem=problem, tol=0.0,
        ):
            idx_base, base = i, p

    coefficients = [0.0] * len(points)
    coefficients[idx_base] = 1.0
    best, best_coefficients = base, coefficients

    for i, p in indexed:
        if admits(p) or not curves.utility_strictly_better(
            a=p.utility, b=base.utility, problem=problem, tol=0.0,
        ):
            continue

        mixed, lam = _mix_toward(
            base=base,
            other=p,
            admits=admits,
            tight=tight,
            j=j,
            problem=problem,
            d=d,
            max_rounds=max_rounds,
        )
        if curves.utility_strictly_better(
            a=mixed.utility, b=best.utility, problem=problem, tol=0.0,
        ):
            best = mixed
            best_coefficients = [0.0] * len(points)
            best_coefficients[idx_base] = 1.0 - lam
            best_coefficients[i] = lam

    achieved = curves.achieved_for(ch=best.channel, j=j, problem=problem, d=d)

    return SolveReport(
        channel=best.channel,
        achieved=achieved,
        mu=None,
        path=EnumSolvePath.TIMESHARE,
        feasible=budget.admits(
            eps_leak=achieved.eps_leak,
            delta_leak=achieved.delta_leak,
            tol=TOL_FEASIBLE,
        ),
        problem=problem,
        budget=budget,
        coefficients=tuple(best_coefficients),
        local=problem.is_information,
    )


class BudgetSearch(object):
    """ Nested bisection over `(mu1, mu2)` for one budget.

    Every solved multiplier pair is kept in `examined` so that the time-share
    fallback and the duality bound can reuse it.
    """

    def __init__(
        self,
        j: Joint3,
        problem: EnumProblem,
        budget: Budget,
        d: Optional[DistortionMatrix] = None,
        opts: Optional[MiOptions] = None,
    ):

        self.j = j
        self.problem = problem
        self.budget = budget
        self.d = d
        self.opts = opts or MiOptions()

        self.examined = []  # type: List[CurvePoint]

    def solve(
        self,
        mu: LagrangePair,
        warm: Optional[Channel] = None,
    ) -> CurvePoint:
        """ Solves the dual at `mu` and records the point."""

        result = curves.solve_dual(
            j=self.j,
            problem=self.problem,
            mu=mu,
            d=self.d,
            opts=self.opts,
            init_channel=warm,
        )
        point = curves.point_from_result(mu=mu, result=result)
        self.examined.append(point)

        return point

    def admits_eps(self, point: CurvePoint) -> bool:
        return point.eps_leak <= self.budget.eps + TOL_FEASIBLE

    def admits_delta(self, point: CurvePoint) -> bool:
        return point.delta_leak <= self.budget.delta + TOL_FEASIBLE

    def admits(self, point: CurvePoint) -> bool:
        return self.admits_eps(point) and self.admits_delta(point)

    def bisect(
        self,
        solve_at: Callable[[float, Optional[Channel]], CurvePoint],
        leak: Callable[[CurvePoint], float],
        limit: float,
        name: str,
    ) -> Tuple[Optional[CurvePoint], CurvePoint]:
        """ Finds the smallest multiplier whose solution keeps `leak` within
            `limit`.

        The upper bracket is found by doubling from one. The search then
        halves the bracket geometrically until the feasible leakage is within
        `TOL_BISECTION` of `limit` or `MAX_HALVINGS` is reached.

        Returns:
            Tuple[Optional[CurvePoint], CurvePoint]: The infeasible point at
                the lower end of the bracket (`None` when the multiplier
                zero is feasible) and the feasible point at the upper end.

        Raises:
            excs.MonotonicityViolation: Raised when the leakage grows with the
                multiplier.
            excs.NoBracket: Raised when no multiplier below `2^60` is
                feasible.
        """

        def feasible(point: CurvePoint) -> bool:
            return leak(point) <= limit + TOL_FEASIBLE

        def check(point: CurvePoint, lower: CurvePoint, upper=None) -> None:
            if (
                leak(point) > leak(lower) + TOL_MONOTONE or
                (upper is not None and leak(point) < leak(upper) - TOL_MONOTONE)
            ):
                msg = ("Leakage controlled by {} is not monotone: {} at "
                       "{}={} against the bracket it was solved in.")
                msg_fmt = msg.format(name, leak(point), name, getattr(
                    point.mu, name,
                ))
                raise excs.MonotonicityViolation(msg_fmt)

        point_lo = solve_at(0.0, None)
        if feasible(point_lo):
            return None, point_lo

        lo, hi = 0.0, 1.0
        point_hi = solve_at(hi, point_lo.channel)
        doublings = 0
        while not feasible(point_hi):
            check(point=point_hi, lower=point_lo)
            doublings += 1
            if doublings > MAX_DOUBLINGS:
                msg = "No {} up to {} meets the limit {} (leakage {})."
                msg_fmt = msg.format(name, hi, limit, leak(point_hi))
                raise excs.NoBracket(msg_fmt)
            lo, point_lo = hi, point_hi
            hi = 2.0 * hi
            point_hi = solve_at(hi, point_lo.channel)

        for _ in range(MAX_HALVINGS):
            if leak(point_hi) >= limit - TOL_BISECTION:
                break
            mid = 0.5 * hi if lo == 0.0 else math.sqrt(lo * hi)
            if not lo < mid < hi:
                break
            point_mid = solve_at(mid, point_hi.channel)
            check(point=point_mid, lower=point_lo, upper=point_hi)
            if feasible(point_mid):
                hi, point_hi = mid, point_mid
            else:
                lo, point_lo = mid, point_mid

        msg = "Bisection on {} ended with bracket ({}, {}) and leakage {}."
        msg_fmt = msg.format(name, lo, hi, leak(point_hi))
        logger.debug(msg_fmt)

        return point_lo, point_hi

    def tighten(
        self,
        point_lo: Optional[CurvePoint],
        point_hi: CurvePoint,
        admits: Callable[[CurvePoint], bool],
        tight: Callable[[CurvePoint], bool],
    ) -> CurvePoint:
        """ Time-shares across the final bracket when it straddles a jump of
            the leakage map.
        """

        if point_lo is None or tight(point_hi):
            return point_hi

        mixed, _ = _mix_toward(
            base=point_hi,
            other=point_lo,
            admits=admits,
            tight=tight,
            j=self.j,
            problem=self.problem,
            d=self.d,
        )
        if curves.utility_strictly_better(
            a=mixed.utility, b=point_hi.utility, problem=self.problem, tol=0.0,
        ):
            return mixed

        return point_hi

    def inner(self, mu2: float, warm: Optional[Channel] = None) -> CurvePoint:
        """ Returns the best point meeting the individual budget at `mu2`."""

        point_lo, point_hi = self.bisect(
            solve_at=lambda mu1, ch: self.solve(
                mu=LagrangePair(mu1=mu1, mu2=mu2), warm=ch or warm,
            ),
            leak=lambda p: p.eps_leak,
            limit=self.budget.eps,
            name="mu1",
        )

        return self.tighten(
            point_lo=point_lo,
            point_hi=point_hi,
            admits=self.admits_eps,
            tight=lambda p: p.eps_leak >= self.budget.eps - TOL_BISECTION,
        )

    def outer(self) -> CurvePoint:
        """ Returns the best point meeting both budgets."""

        point_lo, point_hi = self.bisect(
            solve_at=lambda mu2, ch: self.inner(mu2=mu2, warm=ch),
            leak=lambda p: p.delta_leak,
            limit=self.budget.delta,
            name="mu2",
        )

        return self.tighten(
            point_lo=point_lo,
            point_hi=point_hi,
            admits=self.admits,
            tight=lambda p: (
                p.delta_leak >= self.budget.delta - TOL_BISECTION or
                p.eps_leak >= self.budget.eps - TOL_BISECTION
            ),
        )

    def constant_point(self) -> CurvePoint:
        """ Returns the best constant release, feasible for any budget."""

        n_rhat = self.d.shape[0] if self.d is not None else None
        if self.problem is EnumProblem.DISTORTION:
            channel = probability.best_constant_channel(j=self.j, d=self.d)
        else:
            channel = probability.best_constant_channel(
                j=self.j, n_rhat=n_rhat,
            )
        achieved = curves.achieved_for(
            ch=channel, j=self.j, problem=self.problem, d=self.d,
        )

        return CurvePoint(
            mu=LagrangePair(mu1=0.0, mu2=0.0),
            utility=achieved.utility,
            eps_leak=achieved.eps_leak,
            delta_leak=achieved.delta_leak,
            iterations=0,
            channel=channel,
            provenance=EnumProvenance.TIMESHARE,
        )

    def dual_bound(self) -> Optional[float]:
        """ Returns the largest weak-duality bound over the solved points."""

        values = [
            curves.dual_value(point=p, budget=self.budget, problem=self.problem)
            for p in self.examined
            if p.provenance is EnumProvenance.GRID
        ]

        return max(values) if values else None


def report_from_point(
    point: CurvePoint,
    search: BudgetSearch,
    path: EnumSolvePath,
    coefficients: Tuple[float, ...] = (),
    requested: Optional[Budget] = None,
) -> SolveReport:
    """ Builds the report of a selected point, recomputing its figures.

    Feasibility refers to the budget of `search`. The report names
    `requested` as its budget when the search ran on a raised one.
    """

    achieved = curves.achieved_for(
        ch=point.channel, j=search.j, problem=search.problem, d=search.d,
    )
    is_solved = point.provenance is EnumProvenance.GRID

    return SolveReport(
        channel=point.channel,
        achieved=achieved,
        mu=point.mu if is_solved else None,
        path=path if is_solved else EnumSolvePath.TIMESHARE,
        feasible=search.budget.admits(
            eps_leak=achieved.eps_leak,
            delta_leak=achieved.delta_leak,
            tol=TOL_FEASIBLE,
        ),
        problem=search.problem,
        budget=requested or search.budget,
        budget_effective=search.budget,
        coefficients=coefficients,
        dual_bound=search.dual_bound(),
        examined=tuple(p.mu for p in search.examined),
        local=search.problem.is_information,
    )


def effective_budget(j: Joint3, budget: Budget) -> Budget:
    """ Raises the collusion budget to `I(Z; X)` when it is lower.

    Past releases already leak `I(Z; X)` and no release reduces
    `I(R_hat, Z; X)` below it.
    """

    floor = probability.information_zx(j=j)
    if budget.delta >= floor:
        return budget

    msg = ("Collusion budget {} is below the leakage {} of past releases and "
           "was raised to it.")
    logger.warning(msg.format(budget.delta, floor))

    return Budget(eps=budget.eps, delta=floor)


def solve_for_budget(
    j: Joint3,
    problem: EnumProblem,
    budget: Budget,
    d: Optional[DistortionMatrix] = None,
    opts: Optional[MiOptions] = None,
) -> SolveReport:
    """ Finds the release channel of best utility within a leakage budget.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        problem (EnumProblem): The utility measure.
        budget (Budget): The leakage budget.
        d (Optional[DistortionMatrix]): The distortion matrix.
        opts (Optional[MiOptions]): Solver options.

    Returns:
        SolveReport: The selected channel. It is feasible within `1e-6` bits
            and, for the distortion problem, optimal up to the bisection
            tolerance.
    """

    curves.check_problem(problem=problem, d=d)
    requested = budget
    budget = effective_budget(j=j, budget=requested)
    search = BudgetSearch(j=j, problem=problem, budget=budget, d=d, opts=opts)

    # The unconstrained optimum settles inactive budgets at once.
    point_free = search.solve(mu=LagrangePair(mu1=0.0, mu2=0.0))
    if search.admits(point_free):
        msg = "Budget (eps={}, delta={}) is inactive."
        logger.info(msg.format(budget.eps, budget.delta))
        return report_from_point(
            point=point_free, search=search, path=EnumSolvePath.BISECTION,
            requested=requested,
        )

    candidates = [search.constant_point()]
    try:
        candidates.append(search.outer())
    except (excs.MonotonicityViolation, excs.NoBracket) as exc:
        msg = "Bisection abandoned ({}: {}); time-sharing solved points."
        msg_fmt = msg.format(exc.code, exc.message)
        logger.warning(msg_fmt)

        report = timeshare_to_target(
            points=search.examined + candidates,
            budget=budget,
            j=j,
            problem=problem,
            d=d,
        )
        candidates.append(CurvePoint(
            mu=LagrangePair(mu1=0.0, mu2=0.0),
            utility=report.achieved.utility,
            eps_leak=report.achieved.eps_leak,
            delta_leak=report.achieved.delta_leak,
            iterations=0,
            channel=report.channel,
            provenance=EnumProvenance.TIMESHARE,
        ))

    # Keep the feasible candidate of best utility, the later one on ties.
    best = candidates[0]
    for candidate in candidates[1:]:
        if search.admits(candidate) and curves.utility_at_least_as_good(
            a=candidate.utility, b=best.utility, problem=problem, tol=0.0,
        ):
            best = candidate

    report = report_from_point(
        point=best, search=search, path=EnumSolvePath.BISECTION,
        requested=requested,
    )

    msg = ("Solved budget (eps={}, delta={}) via {} with utility {} and "
           "leakages ({}, {}) after {} dual solves.")
    msg_fmt = msg.format(
        budget.eps,
        budget.delta,
        report.path.value,
        report.achieved.utility,
        report.achieved.eps_leak,
        report.achieved.delta_leak,
        len(search.examined),
    )
    logger.info(msg_fmt)

    return report


def solve_without_leakage(
    j: Joint3,
    problem: EnumProblem,
    budget: Budget,
    d: Optional[DistortionMatrix] = None,
) -> SolveReport:
    """ Answers a request that may not add any leakage with the best
        constant release.

    When requests depend on past releases only through `x`, a release that
    leaks nothing about `x` individually and nothing beyond `I(Z; X)` jointly
    is independent of `r`, so the best constant is optimal for either
    utility. The constant leaves `I(Z; X)` unchanged.
    """

    curves.check_problem(problem=problem, d=d)
    search = BudgetSearch(
        j=j,
        problem=problem,
        budget=effective_budget(j=j, budget=budget),
        d=d,
    )
    report = report_from_point(
        point=search.constant_point(),
        search=search,
        path=EnumSolvePath.CONSTANT,
        requested=budget,
    )

    msg = "Budget (eps={}, delta={}) admits no leakage; released a constant."
    logger.info(msg.format(budget.eps, budget.delta))

    return dataclasses.replace(report, path=EnumSolvePath.CONSTANT)



def solve_at_multipliers(
    j: Joint3,
    problem: EnumProblem,
    mu: LagrangePair,
    d: Optional[DistortionMatrix] = None,
    opts: Optional[MiOptions] = None,
    budget: Optional[Budget] = None,
) -> SolveReport:
    """ Solves the dual once at fixed multipliers and reports the result.

    Without a budget the report is trivially feasible. With one, feasibility
    and the duality bound refer to it.
    """

    curves.check_problem(problem=problem, d=d)
    result = curves.solve_dual(j=j, problem=problem, mu=mu, d=d, opts=opts)
    point = curves.point_from_result(mu=mu, result=result)

    feasible = True
    dual_bound = None
    if budget is not None:
        feasible = budget.admits(
            eps_leak=point.eps_leak,
            delta_leak=point.delta_leak,
            tol=TOL_FEASIBLE,
        )
        dual_bound = curves.dual_value(
            point=point, budget=budget, problem=problem,
        )

    return SolveReport(
        channel=result.channel,
        achieved=result.achieved,
        mu=mu,
        path=EnumSolvePath.FIXED,
        feasible=feasible,
        problem=problem,
        budget=budget,
        dual_bound=dual_bound,
        examined=(mu,),
        local=problem.is_information,
    )
