# coding=utf-8

""" Shared test fixtures: the reference instance, its published channels, a
random-instance generator and a brute-force grid oracle over binary channels.
"""

import itertools
import os
from typing import Optional

import numpy

from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3


DIR_INSTANCES = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "adaptpriv",
    "instances",
)

# Reference joint indexed (r, z, x).
REFERENCE_PROBS = [
    [[0.024, 0.228], [0.063, 0.203]],
    [[0.203, 0.013], [0.228, 0.038]],
]

# Expected channels as `p(r_hat = 0 | z, x)` keyed by `(z, x)`.
CHANNEL_MODERATE = {(0, 0): 0.041, (0, 1): 0.975, (1, 0): 0.143, (1, 1): 0.887}
CHANNEL_LARGE = {(0, 0): 0.567, (0, 1): 0.593, (1, 0): 0.367, (1, 1): 0.381}

# Expected distortion of the unconstrained optimum and the best constant.
DISTORTION_FREE = 0.138
DISTORTION_CONSTANT = 0.482

LN2 = numpy.log(2.0)


def reference_joint() -> Joint3:
    return Joint3(probs=REFERENCE_PROBS)


def hamming2() -> DistortionMatrix:
    return DistortionMatrix.hamming(n_rhat=2, n_r=2)


def instance_path(name: str) -> str:
    return os.path.join(DIR_INSTANCES, name)


def random_joint(
    rng: numpy.random.Generator,
    n_r: int,
    n_z: int,
    n_x: int,
) -> Joint3:
    """ Draws a joint from a flat Dirichlet over all `(r, z, x)` cells."""

    probs = rng.dirichlet(numpy.ones(n_r * n_z * n_x))

    return Joint3(probs=probs.reshape((n_r, n_z, n_x)))


def random_distortion(
    rng: numpy.random.Generator,
    n_rhat: int,
    n_r: int,
) -> DistortionMatrix:
    return DistortionMatrix(d=rng.uniform(0.0, 1.0, size=(n_rhat, n_r)))


def random_instance(rng: numpy.random.Generator):
    """ Draws a joint and distortion with alphabet sizes in `[2, 4]`."""

    n_r, n_z, n_x = rng.integers(2, 5, size=3)
    n_rhat = int(rng.integers(2, 5))
    j = random_joint(rng=rng, n_r=int(n_r), n_z=int(n_z), n_x=int(n_x))
    d = random_distortion(rng=rng, n_rhat=n_rhat, n_r=int(n_r))

    return j, d


def _mi_batch(pab: numpy.ndarray) -> numpy.ndarray:
    """ Mutual information in bits of a batch of joints `(n, a, b)`."""

    pa = pab.sum(axis=2, keepdims=True)
    pb = pab.sum(axis=1, keepdims=True)
    with numpy.errstate(divide="ignore", invalid="ignore"):
        terms = numpy.where(pab > 0, pab * numpy.log(pab / (pa * pb)), 0.0)

    return terms.sum(axis=(1, 2)) / LN2


def binary_channel_grid(step: float = 0.05) -> numpy.ndarray:
    """ Every binary channel over a 2x2 `(z, x)` alphabet whose entries lie
        on a grid of `step`, as an `(n, r_hat, z, x)` array.
    """

    values = numpy.round(numpy.arange(0.0, 1.0 + step / 2, step), 10)
    combos = numpy.array(list(itertools.product(values, repeat=4)))
    p0 = combos.reshape((-1, 2, 2))

    return numpy.stack([p0, 1.0 - p0], axis=1)


def grid_leakages(j: Joint3, channels: numpy.ndarray):
    """ Returns `I(R_hat; X)` and `I(R_hat, Z; X)` of a batch of channels."""

    pzx = j.probs.sum(axis=0)
    prhatzx = channels * pzx[None, None, :, :]
    eps = _mi_batch(prhatzx.sum(axis=2))
    n = channels.shape[0]
    delta = _mi_batch(prhatzx.reshape((n, -1, pzx.shape[1])))

    return eps, delta


def grid_figures(j: Joint3, d: DistortionMatrix, channels: numpy.ndarray):
    """ Returns expected distortion, `I(R_hat; X)` and `I(R_hat, Z; X)` of a
        batch of channels.
    """

    distortion = numpy.einsum("nazx,rzx,ar->n", channels, j.probs, d.d)
    eps, delta = grid_leakages(j=j, channels=channels)

    return distortion, eps, delta


def brute_force_dual(
    j: Joint3,
    d: DistortionMatrix,
    mu1: float,
    mu2: float,
    step: float = 0.05,
) -> float:
    """ Smallest `E[d] + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)` over the
        channel grid.
    """

    distortion, eps, delta = grid_figures(
        j=j, d=d, channels=binary_channel_grid(step=step),
    )

    return float((distortion + mu1 * eps + mu2 * delta).min())


def brute_force_budget(
    j: Joint3,
    d: DistortionMatrix,
    eps: float,
    delta: float,
    step: float = 0.05,
    channels: Optional[numpy.ndarray] = None,
) -> float:
    """ Smallest expected distortion over the grid channels within a budget.
        A prebuilt `channels` grid takes precedence over `step`.
    """

    if channels is None:
        channels = binary_channel_grid(step=step)
    distortion, eps_leak, delta_leak = grid_figures(
        j=j, d=d, channels=channels,
    )
    feasible = (eps_leak <= eps + 1e-9) & (delta_leak <= delta + 1e-9)

    return float(distortion[feasible].min())


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-(p * numpy.log2(p) + (1 - p) * numpy.log2(1 - p)))


def brute_force_mi_dual(
    j: Joint3,
    mu1: float,
    mu2: float,
    step: float = 0.05,
) -> float:
    """ Smallest `-I(R_hat; R) + mu1 I(R_hat; X) + mu2 I(R_hat, Z; X)` over
        the channel grid.
    """

    channels = binary_channel_grid(step=step)
    utility = _mi_batch(numpy.einsum("nazx,rzx->nar", channels, j.probs))
    eps, delta = grid_leakages(j=j, channels=channels)

    return float((-utility + mu1 * eps + mu2 * delta).min())
