# coding=utf-8

""" Sequential release sessions.

A session answers requests one after another. Before every step the past
releases form the collusion variable `Z`, the step's joint `p(r, z, x)` is
built from the request channel `p(r | x)`, the accumulated `p(z | x)` and the
prior `p(x)` (requests are assumed to depend on past releases only through
`x`), and a release channel is solved for the step's budget or fixed
multipliers. Each release then joins `Z` for the next step.

Session states are immutable snapshots: every step returns a new state.
"""

from typing import List, Optional, Sequence, Tuple

import numpy

from adaptpriv import excs
from adaptpriv import probability
from adaptpriv import targets
from adaptpriv.loggers import create_logger
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.releases import ReleaseRecord
from adaptpriv.types.releases import RequestSpec
from adaptpriv.types.releases import SessionState
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import MiOptions


logger = create_logger(logger_name=__name__)


def _generator(rng_state) -> numpy.random.Generator:
    rng = numpy.random.default_rng()
    rng.bit_generator.state = rng_state
    return rng


def session_new(
    px: Pmf,
    seed: int = 0,
    x_true: Optional[int] = None,
) -> SessionState:
    """ Starts a session without past releases.

    Args:
        px (Pmf): The prior of the database value.
        seed (int): Seed of the release sampler.
        x_true (Optional[int]): The realised database value. Releases are
            sampled from the marginal release distribution when omitted.

    Returns:
        SessionState: A state with a single-symbol collusion alphabet.

    Raises:
        excs.InvalidInput: Raised when `x_true` is outside the alphabet.
    """

    if x_true is not None and not 0 <= x_true < px.size:
        msg = "Realised value {!r} is outside the database alphabet of size {}."
        raise excs.InvalidInput(msg.format(x_true, px.size))

    return SessionState(
        px=px,
        pz_given_x=numpy.ones((1, px.size)),
        z_sizes=(),
        history=(),
        delta_floor=0.0,
        rng_state=numpy.random.default_rng(seed).bit_generator.state,
        x_true=x_true,
        z_realized=0,
    )


def build_step_joint(state: SessionState, spec: RequestSpec) -> Joint3:
    """ Builds `p(r, z, x) = p(r | x) p(z | x) p(x)` for the next step.

    Raises:
        excs.DimensionMismatch: Raised when the request channel is not
            conditioned on the database alphabet.
    """

    if spec.n_x != state.n_x:
        msg = ("Request '{}' conditions on {} database values but the session "
               "has {}.")
        msg_fmt = msg.format(spec.label, spec.n_x, state.n_x)
        raise excs.DimensionMismatch(msg_fmt)

    return probability.joint_from_request(
        px=state.px.probs,
        request_channel=spec.request_channel,
        pz_given_x=state.pz_given_x,
    )


def check_budget_order(state: SessionState, spec: RequestSpec) -> None:
    """ Checks that the collusion budget does not decrease.

    Raises:
        excs.BudgetOrderViolation: Raised when the budget of `spec` is below
            the largest collusion budget declared so far.
    """

    if spec.budget is None:
        return

    if spec.budget.delta < state.delta_floor:
        msg = ("Step {} ('{}') lowers the collusion budget to {} below the "
               "earlier {}.")
        msg_fmt = msg.format(
            state.step + 1, spec.label, spec.budget.delta, state.delta_floor,
        )
        raise excs.BudgetOrderViolation(msg_fmt)


def compose_pz_given_x(
    pz_given_x: numpy.ndarray,
    ch: Channel,
) -> numpy.ndarray:
    """ Appends a release to the collusion variable.

    Returns `p(z, r_hat | x) = p(z | x) p(r_hat | z, x)` flattened so that
    the new index is `z * |R_hat| + r_hat`.
    """

    n_x = pz_given_x.shape[1]
    composed = numpy.einsum("zx,azx->zax", pz_given_x, ch.probs)

    return composed.reshape((-1, n_x))


def release_probs(state: SessionState, ch: Channel) -> numpy.ndarray:
    """ Returns the distribution the next release is sampled from.

    This is the channel slice at the realised `(z, x)` when the database
    value is known. Otherwise `x` is averaged out under its posterior given
    the realised past releases, `p(r_hat | z) ~ sum_x p(r_hat | z, x) p(z, x)`.
    """

    if state.x_true is not None:
        probs = ch.probs[:, state.z_realized, state.x_true]
    else:
        pzx = state.joint_zx()[state.z_realized, :]
        probs = numpy.einsum("ax,x->a", ch.probs[:, state.z_realized, :], pzx)

    return probs / probs.sum()


def sample_release(state: SessionState, ch: Channel) -> Tuple[int, dict]:
    """ Draws the next release from `release_probs`.

    Returns:
        Tuple[int, dict]: The sampled symbol and the advanced generator state.
    """

    rng = _generator(state.rng_state)
    sampled = int(rng.choice(ch.n_rhat, p=release_probs(state=state, ch=ch)))

    return sampled, rng.bit_generator.state


def admits_no_leakage(state: SessionState, spec: RequestSpec) -> bool:
    """ Whether the budget of `spec` forbids any leakage beyond `I(Z; X)`."""

    if spec.budget is None:
        return False

    return (
        spec.budget.eps == 0.0 and
        spec.budget.delta <= cumulative_leakage(state=state)
    )


def cumulative_leakage(state: SessionState) -> float:
    """ Returns `I(Z; X)`, the leakage of all past releases together."""

    return probability.mutual_information(pab=state.joint_zx())


def recompute_pz_given_x(state: SessionState) -> numpy.ndarray:
    """ Rebuilds `p(z | x)` from scratch by composing the stored channels."""

    pz_given_x = numpy.ones((1, state.n_x))
    for record in state.history:
        pz_given_x = compose_pz_given_x(
            pz_given_x=pz_given_x, ch=record.channel,
        )

    return pz_given_x


def handle_request(
    state: SessionState,
    spec: RequestSpec,
    problem: EnumProblem = EnumProblem.DISTORTION,
    opts: Optional[MiOptions] = None,
) -> Tuple[ReleaseRecord, SessionState]:
    """ Solves and samples the release of one request.

    Args:
        state (SessionState): The session before the step.
        spec (RequestSpec): The request.
        problem (EnumProblem): The utility measure.
        opts (Optional[MiOptions]): Solver options.

    Returns:
        Tuple[ReleaseRecord, SessionState]: The release and the session after
            the step.

    Raises:
        excs.BudgetOrderViolation: Raised when the request lowers the
            collusion budget.
    """

    check_budget_order(state=state, spec=spec)
    j = build_step_joint(state=state, spec=spec)

    if admits_no_leakage(state=state, spec=spec):
        report = targets.solve_without_leakage(
            j=j, problem=problem, budget=spec.budget, d=spec.distortion,
        )
    elif spec.budget is not None:
        report = targets.solve_for_budget(
            j=j, problem=problem, budget=spec.budget, d=spec.distortion,
            opts=opts,
        )
    else:
        report = targets.solve_at_multipliers(
            j=j, problem=problem, mu=spec.mu, d=spec.distortion, opts=opts,
        )

    sampled, rng_state = sample_release(state=state, ch=report.channel)

    delta_floor = state.delta_floor
    if spec.budget is not None:
        delta_floor = max(delta_floor, spec.budget.delta)

    state_partial = SessionState(
        px=state.px,
        pz_given_x=compose_pz_given_x(
            pz_given_x=state.pz_given_x, ch=report.channel,
        ),
        z_sizes=state.z_sizes + (report.channel.n_rhat,),
        history=state.history,
        delta_floor=delta_floor,
        rng_state=rng_state,
        x_true=state.x_true,
        z_realized=state.z_realized * report.channel.n_rhat + sampled,
    )

    record = ReleaseRecord(
        step=state.step + 1,
        label=spec.label,
        channel=report.channel,
        sampled=sampled,
        achieved=report.achieved,
        budget=spec.budget,
        mu=report.mu,
        path=report.path,
        cumulative_leakage=cumulative_leakage(state=state_partial),
        budget_effective=(
            report.budget_effective
            if report.budget_effective != spec.budget else None
        ),
    )

    state_new = SessionState(
        px=state_partial.px,
        pz_given_x=state_partial.pz_given_x,
        z_sizes=state_partial.z_sizes,
        history=state.history + (record,),
        delta_floor=state_partial.delta_floor,
        rng_state=state_partial.rng_state,
        x_true=state_partial.x_true,
        z_realized=state_partial.z_realized,
    )

    msg = ("Step {} ('{}') released symbol {} with utility {}, leakages "
           "({}, {}) and cumulative leakage {}.")
    msg_fmt = msg.format(
        record.step,
        record.label,
        record.sampled,
        record.achieved.utility,
        record.achieved.eps_leak,
        record.achieved.delta_leak,
        record.cumulative_leakage,
    )
    logger.info(msg_fmt)

    return record, state_new


def run_session(
    px: Pmf,
    specs: Sequence[RequestSpec],
    problem: EnumProblem = EnumProblem.DISTORTION,
    opts: Optional[MiOptions] = None,
    seed: int = 0,
    x_true: Optional[int] = None,
) -> Tuple[List[ReleaseRecord], SessionState]:
    """ Answers a sequence of requests in order.

    Returns:
        Tuple[List[ReleaseRecord], SessionState]: The release records and the
            final session state.
    """

    state = session_new(px=px, seed=seed, x_true=x_true)
    records = []
    for spec in specs:
        record, state = handle_request(
            state=state, spec=spec, problem=problem, opts=opts,
        )
        records.append(record)

    return records, state
