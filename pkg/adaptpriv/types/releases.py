# coding=utf-8

""" Budgets, solve reports and the state of a sequential release session."""

import enum
import math
import dataclasses
from typing import Any, Dict, Optional, Tuple

import numpy

from adaptpriv import excs
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.distributions import check_conditional
from adaptpriv.types.distributions import freeze
from adaptpriv.types.solver import Achieved
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair


class EnumSolvePath(enum.Enum):
    """ How a release channel was obtained."""

    BISECTION = "bisection"
    TIMESHARE = "timeshare"
    FIXED = "fixed"
    CONSTANT = "constant"


@dataclasses.dataclass(frozen=True)
class Budget(object):
    """ A pair of leakage budgets in bits.

    Attributes:
        eps (float): Bound on the individual leakage `I(R_hat; X)`.
        delta (float): Bound on the collusion leakage `I(R_hat, Z; X)`.

    Raises:
        excs.InfeasibleBudget: Raised when a budget is negative or not a
            number.
        excs.BudgetOrderViolation: Raised when `eps > delta`.
    """

    eps: float
    delta: float

    def __post_init__(self):
        for name in ["eps", "delta"]:
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                msg = "Budget '{}' must be a number >= 0, got {!r}."
                raise excs.InfeasibleBudget(msg.format(name, value))

        if self.eps > self.delta:
            msg = ("Individual budget eps={!r} exceeds collusion budget "
                   "delta={!r}.")
            msg_fmt = msg.format(self.eps, self.delta)
            raise excs.BudgetOrderViolation(msg_fmt)

    def admits(self, eps_leak: float, delta_leak: float, tol: float) -> bool:
        """ Whether both leakages are within the budget up to `tol`."""

        return eps_leak <= self.eps + tol and delta_leak <= self.delta + tol


@dataclasses.dataclass(frozen=True, eq=False)
class SolveReport(object):
    """ The outcome of solving for a release channel.

    Attributes:
        channel (Channel): The release channel.
        achieved (Achieved): Utility and leakages recomputed from `channel`.
        mu (Optional[LagrangePair]): The multipliers of the channel, `None`
            for time-shared channels.
        path (EnumSolvePath): How the channel was obtained.
        feasible (bool): Whether `achieved` is within the budget.
        problem (EnumProblem): The utility measure.
        budget (Optional[Budget]): The budget requested by the caller.
        budget_effective (Optional[Budget]): The budget actually solved for,
            with the collusion budget raised to the leakage of past releases
            where it was lower.
        coefficients (Tuple[float, ...]): Mixing coefficients of a
            time-shared channel over its source channels.
        dual_bound (Optional[float]): The best weak-duality bound
            `g - mu1 eps - mu2 delta` over the examined multipliers.
        examined (Tuple[LagrangePair, ...]): Every multiplier pair solved.
        local (bool): Whether only local optimality is guaranteed.
    """

    channel: Channel
    achieved: Achieved
    mu: Optional[LagrangePair]
    path: EnumSolvePath
    feasible: bool
    problem: EnumProblem = EnumProblem.DISTORTION
    budget: Optional[Budget] = None
    budget_effective: Optional[Budget] = None
    coefficients: Tuple[float, ...] = ()
    dual_bound: Optional[float] = None
    examined: Tuple[LagrangePair, ...] = ()
    local: bool = False


class RequestSpec(object):
    """ A request for the release of one data value.

    Attributes:
        request_channel (numpy.ndarray): `p(r | x)` stored as `(r, x)`.
        budget (Optional[Budget]): The leakage budget of the release.
        mu (Optional[LagrangePair]): Fixed multipliers used instead of a
            budget.
        label (str): A display label.
        distortion (Optional[DistortionMatrix]): The distortion of the
            distortion problem. Defaults to Hamming over the request alphabet.
    """

    def __init__(
        self,
        request_channel,
        budget: Optional[Budget] = None,
        mu: Optional[LagrangePair] = None,
        label: str = "",
        distortion: Optional[DistortionMatrix] = None,
        validate: bool = True,
    ):
        request_channel = numpy.asarray(request_channel, dtype=float)
        if request_channel.ndim != 2:
            msg = "Request channel must be indexed (r, x), got shape {}."
            raise excs.DimensionMismatch(msg.format(request_channel.shape))

        if validate:
            check_conditional(probs=request_channel, name="request_channel")

        if (budget is None) == (mu is None):
            msg = "Request '{}' needs exactly one of a budget and multipliers."
            raise excs.InvalidInput(msg.format(label))

        if distortion is None:
            distortion = DistortionMatrix.hamming(
                n_rhat=request_channel.shape[0],
                n_r=request_channel.shape[0],
            )
        elif distortion.shape[1] != request_channel.shape[0]:
            msg = ("Distortion of request '{}' has {} request columns but the "
                   "request alphabet has {} symbols.")
            msg_fmt = msg.format(
                label, distortion.shape[1], request_channel.shape[0],
            )
            raise excs.DimensionMismatch(msg_fmt)

        self.request_channel = freeze(request_channel)
        self.budget = budget
        self.mu = mu
        self.label = label
        self.distortion = distortion

    @property
    def n_r(self) -> int:
        return self.request_channel.shape[0]

    @property
    def n_x(self) -> int:
        return self.request_channel.shape[1]

    @property
    def n_rhat(self) -> int:
        return self.distortion.shape[0]

    def __repr__(self):
        return "RequestSpec(label={!r}, budget={}, mu={})".format(
            self.label, self.budget, self.mu,
        )


@dataclasses.dataclass(frozen=True, eq=False)
class ReleaseRecord(object):
    """ The record of one release of a session.

    Attributes:
        step (int): The 1-based step index.
        label (str): The request label.
        channel (Channel): The release channel `p(r_hat | z, x)`.
        sampled (int): The released symbol.
        achieved (Achieved): Utility and leakages of the release.
        budget (Optional[Budget]): The budget of the release.
        mu (Optional[LagrangePair]): The multipliers of the release.
        path (EnumSolvePath): How the channel was obtained.
        cumulative_leakage (float): `I(Z; X)` after the release.
        budget_effective (Optional[Budget]): The budget the channel was
            solved for, when it differs from `budget`.
    """

    step: int
    label: str
    channel: Channel
    sampled: int
    achieved: Achieved
    budget: Optional[Budget]
    mu: Optional[LagrangePair]
    path: EnumSolvePath
    cumulative_leakage: float
    budget_effective: Optional[Budget] = None


@dataclasses.dataclass(frozen=True, eq=False)
class SessionState(object):
    """ An immutable snapshot of a sequential release session.

    Attributes:
        px (Pmf): The prior of the database value `x`.
        pz_given_x (numpy.ndarray): `p(z | x)` stored as `(z, x)` where `z`
            enumerates tuples of past releases, first release most
            significant.
        z_sizes (Tuple[int, ...]): Release alphabet sizes of past steps.
        history (Tuple[ReleaseRecord, ...]): Past releases.
        delta_floor (float): Largest collusion budget declared so far.
        rng_state (Dict[str, Any]): State of the sampling generator.
        x_true (Optional[int]): The realised database value, if known.
        z_realized (int): Flat index of the realised past releases.
    """

    px: Pmf
    pz_given_x: numpy.ndarray
    z_sizes: Tuple[int, ...]
    history: Tuple[ReleaseRecord, ...]
    delta_floor: float
    rng_state: Dict[str, Any]
    x_true: Optional[int] = None
    z_realized: int = 0

    @property
    def n_z(self) -> int:
        return self.pz_given_x.shape[0]

    @property
    def n_x(self) -> int:
        return self.px.size

    @property
    def step(self) -> int:
        """ Number of completed releases."""
        return len(self.history)

    def joint_zx(self) -> numpy.ndarray:
        """ Returns `p(z, x)`."""
        return self.pz_given_x * self.px.probs[None, :]
