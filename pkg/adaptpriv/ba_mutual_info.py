# coding=utf-8

""" Multi-start Blahut-Arimoto solver for the information utility.

The solver minimises

    g(p) = -I(R_hat; R) + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)

over release channels. Compared to the distortion solver the per-slice cost
is the divergence `D(p(r | z, x) || q4(r | r_hat))` against a fourth
auxiliary `q4(r | r_hat)`, which is updated together with `q1`, `q2` and
`q3`. The problem is not convex, so several randomly initialised runs are
performed and the one with the smallest `g` is kept. Results are local
optima.

The same machinery serves the progressive-network objective
`-I(T; Y) + mu1 I(T; X) + mu2 I(T, Z; X)` through `pnn_objective_solve`.
"""

from typing import Optional

import numpy
import scipy.special

from adaptpriv import excs
from adaptpriv import probability
from adaptpriv import ba_distortion
from adaptpriv import utils
from adaptpriv.loggers import create_logger
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.solver import Achieved
from adaptpriv.types.solver import AuxDists
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import BaResult
from adaptpriv.types.solver import BaState
from adaptpriv.types.solver import EnumInitMode
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import MiOptions


# Floor of `q4` inside the divergence so that the exponent stays finite.
TOL_Q4_FLOOR = 1e-12

LN2 = probability.LN2

logger = create_logger(logger_name=__name__)


def q4_update(ch: Channel, j: Joint3) -> numpy.ndarray:
    """ Computes `q4(r | r_hat) = p(r_hat, r) / p(r_hat)` induced by `ch`.

    Args:
        ch (Channel): The release channel.
        j (Joint3): The joint over `(r, z, x)`.

    Returns:
        numpy.ndarray: The `(r_hat, r)` tensor, each row summing to one.

    Raises:
        excs.ZeroMassRelease: Raised when some release symbol has zero
            probability.
    """

    prhatr = probability.joint_rhat_r(ch=ch, j=j)
    prhat = prhatr.sum(axis=1)

    if numpy.any(prhat <= 0):
        symbols = numpy.flatnonzero(prhat <= 0).tolist()
        msg = "Release symbols {} have zero probability under the channel."
        raise excs.ZeroMassRelease(msg.format(symbols))

    return prhatr / prhat[:, None]


def _q4_with_fallback(
    ch: Channel,
    j: Joint3,
    q4_prev: numpy.ndarray,
) -> numpy.ndarray:
    """ Like `q4_update` but keeps the previous row of unused symbols."""

    prhatr = probability.joint_rhat_r(ch=ch, j=j)
    prhat = prhatr.sum(axis=1, keepdims=True)
    with numpy.errstate(invalid="ignore", divide="ignore"):
        q4 = numpy.where(prhat > 0, prhatr / prhat, q4_prev)

    return q4


def divergence_cost(j: Joint3, q4: numpy.ndarray) -> numpy.ndarray:
    """ Returns `D(p(r | z, x) || q4(r | r_hat))` in bits as an
        `(r_hat, z, x)` tensor, with `q4` floored at `TOL_Q4_FLOOR`.
    """

    pr_zx = ba_distortion.conditional_request(j=j)
    log_q4 = numpy.log(numpy.maximum(q4, TOL_Q4_FLOOR))

    neg_entropy = scipy.special.xlogy(pr_zx, pr_zx).sum(axis=0)
    cross = numpy.einsum("rzx,ar->azx", pr_zx, log_q4)

    return (neg_entropy[None, :, :] - cross) / LN2


def mi_objective_g(ch: Channel, j: Joint3, mu: LagrangePair) -> float:
    """ Evaluates `-I(R_hat; R) + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)`."""

    return (
        -probability.utility_mi(ch=ch, j=j) +
        mu.mu1 * probability.leakage_individual(ch=ch, j=j) +
        mu.mu2 * probability.leakage_collusion(ch=ch, j=j)
    )


def aux_objective_f_mi(
    ch: Channel,
    aux: AuxDists,
    j: Joint3,
    mu: LagrangePair,
) -> float:
    """ Evaluates the auxiliary objective of the information problem.

    The constant `I(R; Z, X)` is subtracted so that auxiliaries consistent
    with `ch` give exactly `mi_objective_g(ch, j, mu)`.
    """

    value = ba_distortion.aux_objective(
        ch=ch,
        aux=aux,
        j=j,
        cost=divergence_cost(j=j, q4=aux.q4),
        mu=mu,
    )

    return value - probability.information_r_zx(j=j)


def mi_update_step(j: Joint3, mu: LagrangePair, state: BaState) -> BaState:
    """ Performs one full iteration of the information solver.

    With both multipliers at zero the channel update degenerates into the
    hard assignment of every `(z, x)` slice to the release symbol of least
    divergence, ties toward the lowest index.
    """

    cost = divergence_cost(j=j, q4=state.aux.q4)

    if mu.is_degenerate:
        channel = ba_distortion.argmin_channel(cost=cost)
    else:
        channel = ba_distortion.channel_from_weights(
            log_num=ba_distortion.log_update_weights(
                cost=cost, mu=mu, aux=state.aux,
            ),
        )

    aux = ba_distortion.aux_from_channel(ch=channel, j=j)
    q4 = _q4_with_fallback(ch=channel, j=j, q4_prev=state.aux.q4)

    return BaState(
        channel=channel,
        aux=AuxDists(q1=aux.q1, q2=aux.q2, q3=aux.q3, q4=q4),
    )


def initial_mi_state(
    j: Joint3,
    n_rhat: int,
    opts: BaOptions,
    rng: numpy.random.Generator,
) -> BaState:
    """ Creates the starting state of one candidate run.

    A warm-start channel in `opts` seeds every auxiliary. Otherwise all four
    auxiliaries are drawn from flat Dirichlet distributions.
    """

    placeholder = ba_distortion.uniform_channel(
        n_rhat=n_rhat, n_z=j.n_z, n_x=j.n_x,
    )

    if opts.init_channel is not None:
        aux = ba_distortion.initial_aux(j=j, n_rhat=n_rhat, opts=opts)
        q4 = _q4_with_fallback(
            ch=opts.init_channel,
            j=j,
            q4_prev=numpy.full((n_rhat, j.n_r), 1.0 / j.n_r),
        )
    else:
        opts_random = BaOptions(
            tol=opts.tol,
            max_iters=opts.max_iters,
            init_mode=EnumInitMode.RANDOM_DIRICHLET,
        )
        aux = ba_distortion.initial_aux(
            j=j, n_rhat=n_rhat, opts=opts_random, rng=rng,
        )
        q4 = rng.dirichlet(numpy.ones(j.n_r), size=n_rhat)

    aux = ba_distortion.floor_aux(
        aux=AuxDists(q1=aux.q1, q2=aux.q2, q3=aux.q3, q4=q4),
    )

    return BaState(channel=placeholder, aux=aux)


def achieved_mi(ch: Channel, j: Joint3) -> Achieved:
    """ Recomputes `I(R_hat; R)` and both leakages of a channel."""

    return Achieved(
        utility=probability.utility_mi(ch=ch, j=j),
        eps_leak=probability.leakage_individual(ch=ch, j=j),
        delta_leak=probability.leakage_collusion(ch=ch, j=j),
    )


def _run_candidate(
    j: Joint3,
    mu: LagrangePair,
    opts: BaOptions,
    n_rhat: int,
    index: int,
    rng: numpy.random.Generator,
) -> BaResult:

    # Only the first candidate honours a warm start.
    if index > 0 and opts.init_channel is not None:
        opts = BaOptions(
            tol=opts.tol,
            max_iters=opts.max_iters,
            init_seed=opts.init_seed,
            init_mode=opts.init_mode,
        )

    state, trace, iterations, converged = ba_distortion.iterate(
        step=lambda s: mi_update_step(j=j, mu=mu, state=s),
        objective=lambda ch: mi_objective_g(ch=ch, j=j, mu=mu),
        state=initial_mi_state(j=j, n_rhat=n_rhat, opts=opts, rng=rng),
        opts=opts,
        label="Information solver candidate {} at mu=({}, {})".format(
            index, mu.mu1, mu.mu2,
        ),
    )

    channel = Channel(probs=state.channel.probs)

    return BaResult(
        channel=channel,
        iterations=iterations,
        trace=tuple(trace),
        achieved=achieved_mi(ch=channel, j=j),
        converged=converged,
        objective=mi_objective_g(ch=channel, j=j, mu=mu),
        aux=state.aux,
        problem=EnumProblem.MUTUAL_INFO,
        local=True,
    )


def ba_mi_run(
    j: Joint3,
    mu: LagrangePair,
    opts: Optional[MiOptions] = None,
    n_rhat: Optional[int] = None,
    problem: EnumProblem = EnumProblem.MUTUAL_INFO,
) -> BaResult:
    """ Runs the information solver from `opts.n_init` initialisations and
        keeps the candidate with the smallest objective.

    Args:
        j (Joint3): The joint over `(r, z, x)`.
        mu (LagrangePair): The multipliers. Both at zero selects the
            hard-assignment iteration.
        opts (Optional[MiOptions]): Solver options. Defaults to `MiOptions()`.
        n_rhat (Optional[int]): Size of the release alphabet. Defaults to the
            request alphabet size.
        problem (EnumProblem): The label stored on the result.

    Returns:
        BaResult: The selected candidate with `candidate_objectives` and
            `candidate_traces` listing the final objective and the trace of
            every initialisation and `best_init` the selected index (ties
            toward the lowest index).
    """

    opts = opts or MiOptions()
    n_rhat = n_rhat or j.n_r
    if int(n_rhat) != n_rhat or n_rhat < 1:
        msg = "Release alphabet size must be a positive integer, got {!r}."
        raise excs.InvalidInput(msg.format(n_rhat))

    rngs = utils.spawn_generators(seed=opts.rng_seed, count=opts.n_init)

    candidates = utils.thread_map(
        func=lambda index: _run_candidate(
            j=j,
            mu=mu,
            opts=opts.base,
            n_rhat=n_rhat,
            index=index,
            rng=rngs[index],
        ),
        items=range(opts.n_init),
        threads=opts.threads,
    )

    objectives = tuple(candidate.objective for candidate in candidates)
    best = utils.argmin_first(objectives)
    chosen = candidates[best]

    msg = ("Information solver at mu=({}, {}) kept candidate {} of {} with "
           "objective {}.")
    msg_fmt = msg.format(mu.mu1, mu.mu2, best, opts.n_init, objectives[best])
    logger.debug(msg_fmt)

    return BaResult(
        channel=chosen.channel,
        iterations=chosen.iterations,
        trace=chosen.trace,
        achieved=chosen.achieved,
        converged=chosen.converged,
        objective=chosen.objective,
        aux=chosen.aux,
        problem=problem,
        candidate_objectives=objectives,
        candidate_traces=tuple(candidate.trace for candidate in candidates),
        best_init=best,
        local=True,
    )


def pnn_objective_solve(
    j: Joint3,
    mu: LagrangePair,
    opts: Optional[MiOptions] = None,
    n_rhat: Optional[int] = None,
) -> BaResult:
    """ Solves `min -I(T; Y) + mu1 I(T; X) + mu2 I(T, Z; X)`.

    The joint is read as `(y, z, x)` and the returned channel as
    `p(t | z, x)`. Apart from the problem label the result is that of
    `ba_mi_run`.
    """

    return ba_mi_run(
        j=j, mu=mu, opts=opts, n_rhat=n_rhat, problem=EnumProblem.PNN,
    )
