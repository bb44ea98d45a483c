# coding=utf-8

""" Exact finite-alphabet probability machinery.

This module contains the pure functions every solver is built on:
validation, marginalisation, conditioning, entropy, Kullback-Leibler divergence,
mutual information, expected distortion, and the joints induced by a release
channel.

All information quantities are reported in bits and use the `0 log 0 = 0`
convention through `scipy.special.xlogy` and `scipy.special.rel_entr`.
"""

from typing import Iterable, Sequence, Tuple, Union

import numpy
import scipy.special

from adaptpriv import excs
from adaptpriv.types.distributions import Channel
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.distributions import check_mass


# Axis names of a `Joint3` tensor.
AXES_JOINT = ("r", "z", "x")

# Axis names of the tensor induced by a channel on a `Joint3`.
AXES_JOINT4 = ("r_hat", "r", "z", "x")

# Probabilities below this are clamped to zero after solver updates.
TOL_CLAMP = 1e-15

LN2 = numpy.log(2.0)


def _as_array(tensor: Union[Joint3, Pmf, numpy.ndarray]) -> numpy.ndarray:
    if isinstance(tensor, (Joint3, Pmf)):
        return tensor.probs
    return numpy.asarray(tensor, dtype=float)


def _axis_indices(
    names: Iterable[str],
    axes: Sequence[str],
) -> Tuple[int, ...]:
    indices = []
    for name in names:
        if name not in axes:
            msg = "Unknown variable '{}', expected one of {}."
            raise excs.InvalidInput(msg.format(name, list(axes)))
        indices.append(axes.index(name))

    # Keep the canonical storage order regardless of how `names` is ordered.
    return tuple(sorted(set(indices)))


def validate_joint(j: Joint3) -> None:
    """ Checks that a joint is non-negative and normalised.

    Args:
        j (Joint3): The joint distribution over `(r, z, x)`.

    Raises:
        excs.NegativeMass: Raised when an entry is below `-1e-12`.
        excs.NotNormalized: Raised when the total mass is off by more than
            `1e-9`.
    """

    check_mass(probs=j.probs, name="joint")


def check_compatible(
    ch: Channel,
    j: Joint3,
    d: DistortionMatrix = None,
) -> None:
    """ Checks that a channel (and optionally a distortion) fits a joint.

    Raises:
        excs.DimensionMismatch: Raised when the `(z, x)` axes of the channel
            differ from those of the joint or the distortion is not
            `(r_hat, r)`.
    """

    if ch.shape[1:] != j.shape[1:]:
        msg = ("Channel conditions on (z, x) of sizes {} but the joint has "
               "(z, x) sizes {}.")
        msg_fmt = msg.format(tuple(ch.shape[1:]), tuple(j.shape[1:]))
        raise excs.DimensionMismatch(msg_fmt)

    if d is not None and d.shape != (ch.n_rhat, j.n_r):
        msg = ("Distortion matrix has shape {} but (r_hat, r) sizes are "
               "({}, {}).")
        msg_fmt = msg.format(d.shape, ch.n_rhat, j.n_r)
        raise excs.DimensionMismatch(msg_fmt)


def marginal(
    j: Union[Joint3, numpy.ndarray],
    keep: Iterable[str],
    axes: Sequence[str] = AXES_JOINT,
) -> numpy.ndarray:
    """ Sums a joint over every variable not in `keep`.

    Args:
        j (Union[Joint3, numpy.ndarray]): The joint tensor.
        keep (Iterable[str]): Names of the variables to keep.
        axes (Sequence[str]): Names of the axes of `j`. Defaults to
            `("r", "z", "x")`.

    Returns:
        numpy.ndarray: The marginal with the kept axes in storage order.

    Raises:
        excs.EmptySubset: Raised when `keep` is empty.
    """

    keep = list(keep)
    if not keep:
        raise excs.EmptySubset("Cannot marginalise onto an empty subset.")

    probs = _as_array(j)
    kept = _axis_indices(names=keep, axes=axes)
    dropped = tuple(i for i in range(len(axes)) if i not in kept)

    return probs.sum(axis=dropped) if dropped else probs.copy()


def condition(
    j: Union[Joint3, numpy.ndarray],
    target: Iterable[str],
    given: Iterable[str],
    axes: Sequence[str] = AXES_JOINT,
) -> numpy.ndarray:
    """ Computes the conditional distribution of `target` given `given`.

    Slices whose conditioning mass is zero are filled uniformly.

    Args:
        j (Union[Joint3, numpy.ndarray]): The joint tensor.
        target (Iterable[str]): The conditioned variables.
        given (Iterable[str]): The conditioning variables (may be empty).
        axes (Sequence[str]): Names of the axes of `j`.

    Returns:
        numpy.ndarray: A tensor whose axes are the target axes followed by the
            given axes, each group in storage order. Every slice over the
            target axes sums to one.
    """

    target = list(target)
    given = list(given)
    if not target:
        raise excs.EmptySubset("Cannot condition an empty target.")
    if set(target) & set(given):
        msg = "Target {} and given {} must be disjoint."
        raise excs.InvalidInput(msg.format(target, given))

    idx_target = _axis_indices(names=target, axes=axes)
    idx_given = _axis_indices(names=given, axes=axes)

    probs = _as_array(j)
    joint = marginal(j=probs, keep=[axes[i] for i in idx_target + idx_given],
                     axes=axes) if (idx_target + idx_given) else probs

    # Move the target axes first and the given axes last.
    kept = sorted(idx_target + idx_given)
    order = ([kept.index(i) for i in idx_target] +
             [kept.index(i) for i in idx_given])
    joint = numpy.transpose(joint, order)

    n_target = len(idx_target)
    target_shape = joint.shape[:n_target]
    flat = joint.reshape((int(numpy.prod(target_shape)), -1))

    mass = flat.sum(axis=0)
    cond = numpy.empty_like(flat)
    positive = mass > 0
    cond[:, positive] = flat[:, positive] / mass[positive]
    cond[:, ~positive] = 1.0 / flat.shape[0]

    return cond.reshape(joint.shape)


def induced_joint4(ch: Channel, j: Joint3) -> numpy.ndarray:
    """ Lifts a joint to `(r_hat, r, z, x)` through a release channel.

    Uses the Markov chain `R_hat - (Z, X) - R`, i.e.,
    `p(r_hat, r, z, x) = p(r_hat | z, x) p(r, z, x)`.

    Raises:
        excs.DimensionMismatch: Raised when the channel does not fit the joint.
    """

    check_compatible(ch=ch, j=j)

    return numpy.einsum("azx,rzx->arzx", ch.probs, j.probs)


def entropy(p: Union[Pmf, numpy.ndarray]) -> float:
    """ Returns the Shannon entropy in bits of a (possibly multi-dimensional)
        distribution.
    """

    probs = _as_array(p)

    return float(-scipy.special.xlogy(probs, probs).sum() / LN2)


def mutual_information(pab: numpy.ndarray) -> float:
    """ Computes `I(A; B)` in bits from a 2-dimensional joint `p(a, b)`.

    Args:
        pab (numpy.ndarray): The joint, indexed `(a, b)`.

    Returns:
        float: The mutual information, clipped at zero against round-off.
    """

    pab = numpy.asarray(pab, dtype=float)
    if pab.ndim != 2:
        msg = "mutual_information expects a 2-dimensional joint, got {}."
        raise excs.DimensionMismatch(msg.format(pab.shape))

    pa = pab.sum(axis=1, keepdims=True)
    pb = pab.sum(axis=0, keepdims=True)
    value = scipy.special.rel_entr(pab, pa * pb).sum() / LN2

    return max(float(value), 0.0)


def joint_rhat_x(ch: Channel, j: Joint3) -> numpy.ndarray:
    """ Returns `p(r_hat, x)` induced by a channel."""

    check_compatible(ch=ch, j=j)
    pzx = j.probs.sum(axis=0)

    return numpy.einsum("azx,zx->ax", ch.probs, pzx)


def joint_rhat_z_x(ch: Channel, j: Joint3) -> numpy.ndarray:
    """ Returns `p(r_hat, z, x)` induced by a channel."""

    check_compatible(ch=ch, j=j)
    pzx = j.probs.sum(axis=0)

    return ch.probs * pzx[None, :, :]


def leakage_individual(ch: Channel, j: Joint3) -> float:
    """ Computes the individual leakage `I(R_hat; X)` in bits."""

    return mutual_information(pab=joint_rhat_x(ch=ch, j=j))


def leakage_collusion(ch: Channel, j: Joint3) -> float:
    """ Computes the collusion leakage `I(R_hat, Z; X)` in bits."""

    prhatzx = joint_rhat_z_x(ch=ch, j=j)
    n_x = prhatzx.shape[2]
    value = mutual_information(pab=prhatzx.reshape((-1, n_x)))

    # Keep the chain-rule ordering exact against round-off.
    return max(value, leakage_individual(ch=ch, j=j))


def expected_distortion(
    ch: Channel,
    j: Joint3,
    d: DistortionMatrix,
) -> float:
    """ Computes `E[d(R_hat, R)] = sum p(r_hat|z,x) p(r,z,x) d(r_hat,r)`."""

    check_compatible(ch=ch, j=j, d=d)
    value = numpy.einsum("azx,rzx,ar->", ch.probs, j.probs, d.d)

    return max(float(value), 0.0)


def joint_rhat_r(ch: Channel, j: Joint3) -> numpy.ndarray:
    """ Returns `p(r_hat, r)` induced by a channel."""

    check_compatible(ch=ch, j=j)

    return numpy.einsum("azx,rzx->ar", ch.probs, j.probs)


def utility_mi(ch: Channel, j: Joint3) -> float:
    """ Computes the information utility `I(R_hat; R)` in bits."""

    return mutual_information(pab=joint_rhat_r(ch=ch, j=j))


def kl_divergence(p: Union[Pmf, numpy.ndarray],
                  q: Union[Pmf, numpy.ndarray]) -> float:
    """ Computes `D(p || q)` in bits.

    Returns `numpy.inf` when `q` vanishes somewhere `p` does not.
    """

    p = _as_array(p)
    q = _as_array(q)
    if p.shape != q.shape:
        msg = "KL divergence needs equal shapes, got {} and {}."
        raise excs.DimensionMismatch(msg.format(p.shape, q.shape))

    value = scipy.special.rel_entr(p, q).sum()
    if numpy.isinf(value):
        return numpy.inf

    return max(float(value / LN2), 0.0)


def information_zx(j: Joint3) -> float:
    """ Returns `I(Z; X)`, the leakage already carried by past releases."""

    return mutual_information(pab=j.probs.sum(axis=0))


def information_r_zx(j: Joint3) -> float:
    """ Returns `I(R; Z, X)`, the ceiling on any release's `I(R_hat; R)`."""

    return mutual_information(pab=j.probs.reshape((j.n_r, -1)))


def joint_from_request(
    px: numpy.ndarray,
    request_channel: numpy.ndarray,
    pz_given_x: numpy.ndarray,
) -> Joint3:
    """ Builds `p(r, z, x) = p(r | x) p(z | x) p(x)`.

    Args:
        px (numpy.ndarray): The prior over `x`.
        request_channel (numpy.ndarray): `p(r | x)` indexed `(r, x)`.
        pz_given_x (numpy.ndarray): `p(z | x)` indexed `(z, x)`.

    Returns:
        Joint3: The joint indexed `(r, z, x)`.

    Raises:
        excs.DimensionMismatch: Raised when the `x` axes disagree.
    """

    n_x = px.shape[0]
    if request_channel.shape[1] != n_x or pz_given_x.shape[1] != n_x:
        msg = ("{0} database values but the request channel conditions on {1} "
               "and p(z | x) on {2}.")
        msg_fmt = msg.format(n_x, request_channel.shape[1], pz_given_x.shape[1])
        raise excs.DimensionMismatch(msg_fmt)

    probs = numpy.einsum("rx,zx,x->rzx", request_channel, pz_given_x, px)

    return Joint3(probs=probs)


def clamp_normalize(probs: numpy.ndarray, axis: int = 0) -> numpy.ndarray:
    """ Zeroes entries below `TOL_CLAMP` and renormalises along `axis`."""

    probs = numpy.where(probs < TOL_CLAMP, 0.0, probs)
    total = probs.sum(axis=axis, keepdims=True)
    if numpy.any(total <= 0):
        raise excs.NumericUnderflow("A slice vanished while clamping.")

    return probs / total


def deterministic_channel(
    symbols: numpy.ndarray,
    n_rhat: int,
) -> Channel:
    """ Builds the channel releasing `symbols[z, x]` with certainty."""

    symbols = numpy.asarray(symbols, dtype=int)
    probs = numpy.zeros((n_rhat,) + symbols.shape)
    for (z, x), symbol in numpy.ndenumerate(symbols):
        probs[symbol, z, x] = 1.0

    return Channel(probs=probs)


def constant_channel(symbol: int, n_rhat: int, n_z: int, n_x: int) -> Channel:
    """ Builds the uninformative channel that always releases `symbol`."""

    return deterministic_channel(
        symbols=numpy.full((n_z, n_x), symbol, dtype=int),
        n_rhat=n_rhat,
    )


def best_constant_channel(
    j: Joint3,
    d: DistortionMatrix = None,
    n_rhat: int = None,
) -> Channel:
    """ Returns the uninformative channel with the least expected distortion.

    Without a distortion matrix (information utilities) every constant release
    has zero utility and the first symbol is released.
    """

    if d is None:
        n_rhat = n_rhat or j.n_r
        return constant_channel(
            symbol=0, n_rhat=n_rhat, n_z=j.n_z, n_x=j.n_x,
        )

    pr = j.probs.sum(axis=(1, 2))
    costs = d.d @ pr

    return constant_channel(
        symbol=int(numpy.argmin(costs)),
        n_rhat=d.shape[0],
        n_z=j.n_z,
        n_x=j.n_x,
    )


def mix_channels(
    channels: Sequence[Channel],
    weights: Sequence[float],
) -> Channel:
    """ Forms the convex combination `sum_i w_i p_i(r_hat | z, x)`.

    Raises:
        excs.InvalidInput: Raised when the weights are negative, do not sum to
            one, or do not match the channels.
    """

    weights = numpy.asarray(weights, dtype=float)
    if len(channels) != weights.shape[0] or not len(channels):
        msg = "Got {} channels and {} weights."
        raise excs.InvalidInput(msg.format(len(channels), weights.shape[0]))
    if weights.min() < 0 or abs(weights.sum() - 1.0) > 1e-9:
        msg = "Mixture weights must be non-negative and sum to 1, got {}."
        raise excs.InvalidInput(msg.format(weights.tolist()))

    shapes = set(ch.shape for ch in channels)
    if len(shapes) != 1:
        msg = "Cannot mix channels of different shapes {}."
        raise excs.DimensionMismatch(msg.format(sorted(shapes)))

    probs = sum(w * ch.probs for w, ch in zip(weights, channels))

    # Remove the round-off drift of the weighted sum.
    probs = probs / probs.sum(axis=0, keepdims=True)

    return Channel(probs=probs)
