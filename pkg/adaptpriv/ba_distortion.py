# coding=utf-8

""" Blahut-Arimoto solver for the expected-distortion release problem.

For fixed multipliers `(mu1, mu2)` the solver minimises

    g(p) = E[d(R_hat, R)] + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)

over release channels `p(r_hat | z, x)` by alternating between the channel
and three auxiliary distributions `q1(r_hat)`, `q2(z | r_hat, x)` and
`q3(r_hat | z)`. Each channel update is the normalised product

    [q1^mu1 q2^mu1 q3^mu2 2^(-cost)]^(1 / (mu1 + mu2))

evaluated in log-space, after which the auxiliaries are recomputed from the
new channel. Every full iteration does not increase `g`.

The channel-update and auxiliary machinery is shared with the
mutual-information solver in `adaptpriv.ba_mutual_info`, which only swaps
the per-slice cost.
"""

from typing import Callable, List, Optional, Tuple

import numpy
import scipy.special

from adaptpriv import excs
from adaptpriv import probability
from adaptpriv.loggers import create_logger
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.solver import Achieved
from adaptpriv.types.solver import AuxDists
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import BaResult
from adaptpriv.types.solver import BaState
from adaptpriv.types.solver import EnumInitMode
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair


# Strict-positivity floor of randomly initialised auxiliaries.
TOL_INIT_FLOOR = 1e-12

LN2 = probability.LN2

logger = create_logger(logger_name=__name__)


def check_distortion(j: Joint3, d: DistortionMatrix) -> None:
    """ Checks that a distortion matrix is indexed `(r_hat, r)` for `j`.

    Raises:
        excs.DimensionMismatch: Raised when the `r` axis differs.
    """

    if d.shape[1] != j.n_r:
        msg = ("Distortion matrix has {} request columns but the joint has "
               "{} request symbols.")
        msg_fmt = msg.format(d.shape[1], j.n_r)
        raise excs.DimensionMismatch(msg_fmt)


def conditional_request(j: Joint3) -> numpy.ndarray:
    """ Returns `p(r | z, x)` as an `(r, z, x)` tensor."""

    return probability.condition(j=j, target=["r"], given=["z", "x"])


def distortion_cost(j: Joint3, d: DistortionMatrix) -> numpy.ndarray:
    """ Returns the per-slice cost `sum_r p(r | z, x) d(r_hat, r)` as an
        `(r_hat, z, x)` tensor.
    """

    check_distortion(j=j, d=d)

    return numpy.einsum("rzx,ar->azx", conditional_request(j=j), d.d)


def _normalize_rows(num: numpy.ndarray, axis: int) -> numpy.ndarray:
    """ Normalises `num` along `axis`, filling zero-mass slices uniformly."""

    total = num.sum(axis=axis, keepdims=True)
    fill = 1.0 / num.shape[axis]
    with numpy.errstate(invalid="ignore", divide="ignore"):
        out = numpy.where(total > 0, num / total, fill)

    return out


def aux_from_channel(ch: Channel, j: Joint3) -> AuxDists:
    """ Computes the auxiliaries that minimise the auxiliary objective for a
        fixed channel, i.e., `q1 = p(r_hat)`, `q2 = p(z | r_hat, x)` and
        `q3 = p(r_hat | z)` induced by `ch` on `j`.

    Args:
        ch (Channel): The release channel.
        j (Joint3): The joint over `(r, z, x)`.

    Returns:
        AuxDists: The consistent auxiliaries (without `q4`).
    """

    probability.check_compatible(ch=ch, j=j)

    pzx = j.probs.sum(axis=0)
    pz_given_x = _normalize_rows(num=pzx, axis=0)
    px_given_z = _normalize_rows(num=pzx, axis=1)

    q1 = numpy.einsum("azx,zx->a", ch.probs, pzx)
    q2 = _normalize_rows(num=ch.probs * pz_given_x[None, :, :], axis=1)
    q3 = numpy.einsum("azx,zx->az", ch.probs, px_given_z)

    return AuxDists(q1=q1, q2=q2, q3=q3)


def initial_aux(
    j: Joint3,
    n_rhat: int,
    opts: BaOptions,
    rng: Optional[numpy.random.Generator] = None,
) -> AuxDists:
    """ Creates strictly positive starting auxiliaries.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        n_rhat (int): Size of the release alphabet.
        opts (BaOptions): Solver options. `init_channel` (warm start) takes
            precedence over `init_mode`.
        rng (Optional[numpy.random.Generator]): Generator used by the
            random-dirichlet mode. Defaults to one seeded with
            `opts.init_seed`.

    Returns:
        AuxDists: The starting auxiliaries.
    """

    n_z, n_x = j.n_z, j.n_x

    if opts.init_channel is not None:
        if opts.init_channel.shape != (n_rhat, n_z, n_x):
            msg = "Warm-start channel has shape {}, expected {}."
            msg_fmt = msg.format(opts.init_channel.shape, (n_rhat, n_z, n_x))
            raise excs.DimensionMismatch(msg_fmt)
        aux = aux_from_channel(ch=opts.init_channel, j=j)
        return floor_aux(aux=aux)

    if opts.init_mode is EnumInitMode.UNIFORM:
        return AuxDists(
            q1=numpy.full(n_rhat, 1.0 / n_rhat),
            q2=numpy.full((n_rhat, n_z, n_x), 1.0 / n_z),
            q3=numpy.full((n_rhat, n_z), 1.0 / n_rhat),
        )

    if rng is None:
        rng = numpy.random.default_rng(opts.init_seed)

    q1 = rng.dirichlet(numpy.ones(n_rhat))
    # Draw q2 over z for every (r_hat, x) and move z to the middle axis.
    q2 = rng.dirichlet(numpy.ones(n_z), size=(n_rhat, n_x))
    q2 = numpy.transpose(q2, (0, 2, 1))
    # Draw q3 over r_hat for every z and move r_hat first.
    q3 = rng.dirichlet(numpy.ones(n_rhat), size=n_z).T

    return floor_aux(aux=AuxDists(q1=q1, q2=q2, q3=q3))


def floor_aux(aux: AuxDists) -> AuxDists:
    """ Floors every auxiliary at `TOL_INIT_FLOOR` and renormalises."""

    def _floor(q, axis):
        q = numpy.maximum(q, TOL_INIT_FLOOR)
        return q / q.sum(axis=axis, keepdims=True)

    return AuxDists(
        q1=_floor(aux.q1, 0),
        q2=_floor(aux.q2, 1),
        q3=_floor(aux.q3, 0),
        q4=None if aux.q4 is None else _floor(aux.q4, 1),
    )


def log_update_weights(
    cost: numpy.ndarray,
    mu: LagrangePair,
    aux: AuxDists,
) -> numpy.ndarray:
    """ Returns the natural-log unnormalised channel of the update step.

    The weight of `r_hat` in slice `(z, x)` is
    `(mu1 ln q1 + mu1 ln q2 + mu2 ln q3 - cost ln 2) / (mu1 + mu2)`, where
    `cost` is measured in bits. Zero multipliers silence their factor even
    when the auxiliary vanishes.
    """

    with numpy.errstate(divide="ignore"):
        log_num = (
            scipy.special.xlogy(mu.mu1, aux.q1)[:, None, None] +
            scipy.special.xlogy(mu.mu1, aux.q2) +
            scipy.special.xlogy(mu.mu2, aux.q3)[:, :, None] -
            cost * LN2
        )

    return log_num / mu.total


def channel_from_weights(log_num: numpy.ndarray) -> Channel:
    """ Normalises log-weights per `(z, x)` slice with log-sum-exp and clamps
        vanishing entries.

    Raises:
        excs.NumericUnderflow: Raised when every entry of a slice is zero.
    """

    log_eta = scipy.special.logsumexp(log_num, axis=0, keepdims=True)
    if not numpy.all(numpy.isfinite(log_eta)):
        idx = numpy.argwhere(~numpy.isfinite(log_eta[0]))[0]
        msg = "Channel slice (z={}, x={}) vanished before normalisation."
        raise excs.NumericUnderflow(msg.format(int(idx[0]), int(idx[1])))

    probs = numpy.exp(log_num - log_eta)
    probs = probability.clamp_normalize(probs=probs, axis=0)

    return Channel(probs=probs, validate=False)


def ba_update_step(
    j: Joint3,
    d: DistortionMatrix,
    mu: LagrangePair,
    state: BaState,
) -> BaState:
    """ Performs one full iteration: channel update followed by the
        recomputation of `q1`, `q2` and `q3`.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        d (DistortionMatrix): The distortion `d(r_hat, r)`.
        mu (LagrangePair): The multipliers; must not both vanish.
        state (BaState): The current channel and auxiliaries.

    Returns:
        BaState: The updated channel and consistent auxiliaries.
    """

    if mu.is_degenerate:
        msg = "The update step needs mu1 + mu2 > 0."
        raise excs.InvalidInput(msg)

    cost = distortion_cost(j=j, d=d)
    channel = channel_from_weights(
        log_num=log_update_weights(cost=cost, mu=mu, aux=state.aux),
    )

    return BaState(channel=channel, aux=aux_from_channel(ch=channel, j=j))


def dual_objective_g(
    ch: Channel,
    j: Joint3,
    d: DistortionMatrix,
    mu: LagrangePair,
) -> float:
    """ Evaluates `E[d] + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)` (the dual
        inner objective without the constant `-mu1 eps - mu2 delta`).
    """

    return (
        probability.expected_distortion(ch=ch, j=j, d=d) +
        mu.mu1 * probability.leakage_individual(ch=ch, j=j) +
        mu.mu2 * probability.leakage_collusion(ch=ch, j=j)
    )


def theta_constant(j: Joint3, mu: LagrangePair) -> float:
    """ Returns `theta = (mu1 + mu2) sum p(z,x) log p(z|x) + mu2 H(Z)`, the
        part of the objective that no iterated distribution affects.
    """

    pzx = j.probs.sum(axis=0)
    pz_given_x = _normalize_rows(num=pzx, axis=0)

    return (
        mu.total * scipy.special.xlogy(pzx, pz_given_x).sum() / LN2 +
        mu.mu2 * probability.entropy(p=pzx.sum(axis=1))
    )


def aux_objective(
    ch: Channel,
    aux: AuxDists,
    j: Joint3,
    cost: numpy.ndarray,
    mu: LagrangePair,
) -> float:
    """ Evaluates the auxiliary objective `f(p; q1; q2; q3)` (theta included)
        for an arbitrary per-slice cost in bits.
    """

    pzx = j.probs.sum(axis=0)
    w = ch.probs * pzx[None, :, :]

    value = (w * cost).sum() + (
        mu.total * scipy.special.xlogy(w, ch.probs).sum() -
        mu.mu1 * scipy.special.xlogy(w, aux.q1[:, None, None]).sum() -
        mu.mu1 * scipy.special.xlogy(w, aux.q2).sum() -
        mu.mu2 * scipy.special.xlogy(w, aux.q3[:, :, None]).sum()
    ) / LN2

    return float(value) + theta_constant(j=j, mu=mu)


def aux_objective_f(
    ch: Channel,
    aux: AuxDists,
    j: Joint3,
    d: DistortionMatrix,
    mu: LagrangePair,
) -> float:
    """ Evaluates `f(p; q1; q2; q3)` for the distortion problem.

    With auxiliaries consistent with `ch` this equals
    `dual_objective_g(ch, j, d, mu)`.
    """

    return aux_objective(
        ch=ch, aux=aux, j=j, cost=distortion_cost(j=j, d=d), mu=mu,
    )


def residual_from_cost(
    ch: Channel,
    aux: AuxDists,
    j: Joint3,
    cost: numpy.ndarray,
    mu: LagrangePair,
    support_only: bool = False,
) -> float:
    """ L-infinity gap between `ch` and the right-hand side of the
        self-consistent equation, over slices with positive `p(z, x)`.
    """

    rhs = channel_from_weights(
        log_num=log_update_weights(cost=cost, mu=mu, aux=aux),
    ).probs

    if support_only:
        rhs = _normalize_rows(num=rhs * (ch.probs > 0), axis=0)

    relevant = j.probs.sum(axis=0) > 0
    gap = numpy.abs(ch.probs - rhs)[:, relevant]

    return float(gap.max()) if gap.size else 0.0


def consistency_residual(
    ch: Channel,
    j: Joint3,
    d: DistortionMatrix,
    mu: LagrangePair,
    aux: Optional[AuxDists] = None,
    support_only: bool = False,
) -> float:
    """ Measures how far a channel is from satisfying the self-consistent
        equation of the distortion problem.

    Args:
        ch (Channel): The channel to check.
        j (Joint3): The joint over `(r, z, x)`.
        d (DistortionMatrix): The distortion `d(r_hat, r)`.
        mu (LagrangePair): The multipliers; must not both vanish.
        aux (Optional[AuxDists]): Auxiliaries to evaluate the right-hand side
            at. Defaults to those recomputed from `ch`.
        support_only (bool): Restrict the right-hand side to the support of
            `ch`, for solutions on the boundary of the simplex.

    Returns:
        float: The largest absolute entry-wise gap.
    """

    if mu.is_degenerate:
        raise excs.InvalidInput("The residual needs mu1 + mu2 > 0.")

    if aux is None:
        aux = aux_from_channel(ch=ch, j=j)

    return residual_from_cost(
        ch=ch,
        aux=aux,
        j=j,
        cost=distortion_cost(j=j, d=d),
        mu=mu,
        support_only=support_only,
    )


def uniform_channel(n_rhat: int, n_z: int, n_x: int) -> Channel:
    """ Returns the channel releasing every symbol with equal probability."""

    return Channel(
        probs=numpy.full((n_rhat, n_z, n_x), 1.0 / n_rhat),
        validate=False,
    )


def iterate(
    step: Callable[[BaState], BaState],
    objective: Callable[[Channel], float],
    state: BaState,
    opts: BaOptions,
    label: str,
) -> Tuple[BaState, List[float], int, bool]:
    """ Applies `step` until the L-infinity channel change drops to
        `opts.tol` or `opts.max_iters` is reached.

    Hitting the cap is not an error: a warning is logged and the returned
    `converged` flag is `False`.

    Args:
        step (Callable[[BaState], BaState]): One full solver iteration.
        objective (Callable[[Channel], float]): The objective recorded in the
            trace after every iteration.
        state (BaState): The starting state. Its channel is a placeholder and
            the first iteration never counts as converged.
        opts (BaOptions): The solver options.
        label (str): Prefix of the log messages.

    Returns:
        Tuple[BaState, List[float], int, bool]: The final state, the
            objective trace, the number of iterations and whether the run
            converged.
    """

    trace = []  # type: List[float]
    converged = False
    iterations = 0
    for iterations in range(1, opts.max_iters + 1):
        state_new = step(state)
        change = numpy.abs(state_new.channel.probs - state.channel.probs).max()
        state = state_new
        trace.append(objective(state.channel))

        if iterations > 1 and change <= opts.tol:
            converged = True
            break

    if not converged:
        msg = "{} hit the cap of {} iterations with channel change above {}."
        msg_fmt = msg.format(label, opts.max_iters, opts.tol)
        logger.warning(msg_fmt)
    else:
        msg = "{} converged in {} iterations."
        msg_fmt = msg.format(label, iterations)
        logger.debug(msg_fmt)

    return state, trace, iterations, converged


def argmin_channel(cost: numpy.ndarray) -> Channel:
    """ Returns the deterministic channel releasing the least-cost symbol of
        every slice, ties broken toward the lowest index.
    """

    return probability.deterministic_channel(
        symbols=numpy.argmin(cost, axis=0),
        n_rhat=cost.shape[0],
    )


def achieved_distortion(
    ch: Channel,
    j: Joint3,
    d: DistortionMatrix,
) -> Achieved:
    """ Recomputes expected distortion and both leakages of a channel."""

    return Achieved(
        utility=probability.expected_distortion(ch=ch, j=j, d=d),
        eps_leak=probability.leakage_individual(ch=ch, j=j),
        delta_leak=probability.leakage_collusion(ch=ch, j=j),
    )


def ba_distortion_run(
    j: Joint3,
    d: DistortionMatrix,
    mu: LagrangePair,
    opts: Optional[BaOptions] = None,
) -> BaResult:
    """ Runs the expected-distortion Blahut-Arimoto algorithm to convergence.

    When both multipliers vanish the minimiser is the closed-form
    deterministic channel releasing, for every `(z, x)`, the symbol of least
    conditional expected distortion.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        d (DistortionMatrix): The distortion `d(r_hat, r)`.
        mu (LagrangePair): The multipliers.
        opts (Optional[BaOptions]): Solver options. Defaults to `BaOptions()`.

    Returns:
        BaResult: The final channel, iteration count, objective trace and
            achieved utility/leakages. `converged` is `False` when the
            iteration cap was hit.
    """

    opts = opts or BaOptions()
    check_distortion(j=j, d=d)
    n_rhat = d.shape[0]

    if mu.is_degenerate:
        channel = argmin_channel(cost=distortion_cost(j=j, d=d))
        objective = dual_objective_g(ch=channel, j=j, d=d, mu=mu)
        return BaResult(
            channel=channel,
            iterations=0,
            trace=(objective,),
            achieved=achieved_distortion(ch=channel, j=j, d=d),
            converged=True,
            objective=objective,
            aux=aux_from_channel(ch=channel, j=j),
            problem=EnumProblem.DISTORTION,
        )

    state = BaState(
        channel=uniform_channel(n_rhat=n_rhat, n_z=j.n_z, n_x=j.n_x),
        aux=initial_aux(j=j, n_rhat=n_rhat, opts=opts),
    )

    state, trace, iterations, converged = iterate(
        step=lambda s: ba_update_step(j=j, d=d, mu=mu, state=s),
        objective=lambda ch: dual_objective_g(ch=ch, j=j, d=d, mu=mu),
        state=state,
        opts=opts,
        label="Distortion solver at mu=({}, {})".format(mu.mu1, mu.mu2),
    )

    channel = Channel(probs=state.channel.probs)

    return BaResult(
        channel=channel,
        iterations=iterations,
        trace=tuple(trace),
        achieved=achieved_distortion(ch=channel, j=j, d=d),
        converged=converged,
        objective=dual_objective_g(ch=channel, j=j, d=d, mu=mu),
        aux=state.aux,
        problem=EnumProblem.DISTORTION,
    )
