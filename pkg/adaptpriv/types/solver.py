# coding=utf-8

""" Blahut-Arimoto solver inputs and results."""

import enum
import math
import dataclasses
from typing import Optional, Tuple

import numpy

from adaptpriv import excs
from adaptpriv.types.distributions import Channel


class EnumProblem(enum.Enum):
    """ The utility measure of a release problem."""

    DISTORTION = "distortion"
    MUTUAL_INFO = "mutual-info"
    PNN = "pnn"

    @property
    def is_information(self) -> bool:
        """ Whether utility is a mutual information (higher is better)."""
        return self is not EnumProblem.DISTORTION


class EnumInitMode(enum.Enum):
    """ How the auxiliary distributions are initialised."""

    UNIFORM = "uniform"
    RANDOM_DIRICHLET = "random-dirichlet"


@dataclasses.dataclass(frozen=True)
class LagrangePair(object):
    """ The multipliers `(mu1, mu2)` of the individual and collusion leakage
        constraints.
    """

    mu1: float
    mu2: float

    def __post_init__(self):
        for name in ["mu1", "mu2"]:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                msg = "Multiplier '{}' must be finite and >= 0, got {!r}."
                raise excs.InvalidInput(msg.format(name, value))

    @property
    def total(self) -> float:
        return self.mu1 + self.mu2

    @property
    def is_degenerate(self) -> bool:
        """ Whether both multipliers vanish and the update exponent is
            undefined.
        """
        return self.total == 0.0


@dataclasses.dataclass(frozen=True)
class BaOptions(object):
    """ Options of a single Blahut-Arimoto run.

    Attributes:
        tol (float): Convergence threshold on the L-infinity change of the
            channel between consecutive iterations.
        max_iters (int): Iteration cap.
        init_seed (int): Seed of the random initialisation.
        init_mode (EnumInitMode): Initialisation of the auxiliaries.
        init_channel (Optional[Channel]): When given, the auxiliaries are
            initialised from this channel (warm start) and `init_mode` is
            ignored.
    """

    tol: float = 1e-9
    max_iters: int = 10000
    init_seed: int = 0
    init_mode: EnumInitMode = EnumInitMode.UNIFORM
    init_channel: Optional[Channel] = None

    def __post_init__(self):
        if not self.tol > 0:
            msg = "Option 'tol' must be > 0, got {!r}."
            raise excs.InvalidInput(msg.format(self.tol))
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            msg = "Option 'max_iters' must be an integer >= 1, got {!r}."
            raise excs.InvalidInput(msg.format(self.max_iters))


@dataclasses.dataclass(frozen=True)
class MiOptions(object):
    """ Options of the multi-start mutual-information solver."""

    base: BaOptions = dataclasses.field(default_factory=BaOptions)
    n_init: int = 10
    rng_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if int(self.n_init) != self.n_init or self.n_init < 1:
            msg = "Option 'n_init' must be an integer >= 1, got {!r}."
            raise excs.InvalidInput(msg.format(self.n_init))
        if int(self.threads) != self.threads or self.threads < 1:
            msg = "Option 'threads' must be an integer >= 1, got {!r}."
            raise excs.InvalidInput(msg.format(self.threads))


@dataclasses.dataclass(frozen=True, eq=False)
class AuxDists(object):
    """ The auxiliary distributions iterated alongside the channel.

    Attributes:
        q1 (numpy.ndarray): `q1(r_hat)`, shape `(r_hat,)`.
        q2 (numpy.ndarray): `q2(z | r_hat, x)`, shape `(r_hat, z, x)`,
            normalised over `z`.
        q3 (numpy.ndarray): `q3(r_hat | z)`, shape `(r_hat, z)`, normalised
            over `r_hat`.
        q4 (Optional[numpy.ndarray]): `q4(r | r_hat)`, shape `(r_hat, r)`,
            normalised over `r`. Only used by the mutual-information solver.
    """

    q1: numpy.ndarray
    q2: numpy.ndarray
    q3: numpy.ndarray
    q4: Optional[numpy.ndarray] = None


@dataclasses.dataclass(frozen=True)
class Achieved(object):
    """ Utility and leakages achieved by a channel.

    `utility` is the expected distortion (lower is better) for the
    distortion problem and `I(R_hat; R)` in bits (higher is better) for the
    information problems.
    """

    utility: float
    eps_leak: float
    delta_leak: float


@dataclasses.dataclass(frozen=True, eq=False)
class BaResult(object):
    """ Output of a Blahut-Arimoto run.

    Attributes:
        channel (Channel): The final channel.
        iterations (int): Number of full iterations performed.
        trace (Tuple[float, ...]): Objective `g` after every iteration.
        achieved (Achieved): Utility and leakages of `channel`.
        converged (bool): Whether the tolerance was met before the cap.
        objective (float): `g(channel)` recomputed from the channel.
        aux (Optional[AuxDists]): Auxiliaries consistent with `channel`.
        problem (EnumProblem): The utility measure solved for.
        candidate_objectives (Tuple[float, ...]): Final objectives of every
            initialisation (multi-start solvers only).
        candidate_traces (Tuple[Tuple[float, ...], ...]): The objective trace
            of every initialisation (multi-start solvers only).
        best_init (int): Index of the selected initialisation.
        local (bool): Whether only local optimality is guaranteed.
    """

    channel: Channel
    iterations: int
    trace: Tuple[float, ...]
    achieved: Achieved
    converged: bool
    objective: float
    aux: Optional[AuxDists] = None
    problem: EnumProblem = EnumProblem.DISTORTION
    candidate_objectives: Tuple[float, ...] = ()
    candidate_traces: Tuple[Tuple[float, ...], ...] = ()
    best_init: int = 0
    local: bool = False


@dataclasses.dataclass(frozen=True, eq=False)
class BaState(object):
    """ A channel together with the auxiliaries it is updated from."""

    channel: Channel
    aux: AuxDists
