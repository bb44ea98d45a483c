# coding=utf-8

""" Finite-alphabet probability tensors.

Every tensor is stored as a read-only `numpy.ndarray`. Axis orders are fixed:

- `Pmf`: a single axis.
- `Joint3`: `(r, z, x)`.
- `Channel`: `(r_hat, z, x)`, normalised over the first axis.
- `DistortionMatrix`: `(r_hat, r)`.
"""

from typing import Optional, Sequence, Tuple

import numpy

from adaptpriv import excs


# Entries more negative than this are reported as negative mass.
TOL_NEGATIVE = 1e-12

# Normalisation tolerance on every distribution.
TOL_NORMALIZATION = 1e-9


def freeze(array: numpy.ndarray) -> numpy.ndarray:
    """ Returns a read-only float copy of `array`."""

    frozen = numpy.array(array, dtype=float, copy=True)
    frozen.flags.writeable = False

    return frozen


def find_negative(probs: numpy.ndarray) -> Optional[Tuple[int, ...]]:
    """ Returns the coordinates of the most negative entry below
        `-TOL_NEGATIVE` or `None` if there is none.
    """

    if probs.size == 0 or probs.min() >= -TOL_NEGATIVE:
        return None

    idx = numpy.unravel_index(numpy.argmin(probs), probs.shape)

    return tuple(int(i) for i in idx)


def check_mass(probs: numpy.ndarray, name: str) -> None:
    """ Checks that `probs` is finite, non-negative and sums to one.

    Args:
        probs (numpy.ndarray): The tensor to check.
        name (str): A label used in the error messages.

    Raises:
        excs.InvalidInput: Raised when the tensor holds non-finite entries.
        excs.NegativeMass: Raised when an entry is below `-TOL_NEGATIVE`.
        excs.NotNormalized: Raised when the total mass is off by more than
            `TOL_NORMALIZATION`.
    """

    if not numpy.all(numpy.isfinite(probs)):
        msg = "'{}' holds non-finite entries."
        raise excs.InvalidInput(msg.format(name))

    coords = find_negative(probs)
    if coords is not None:
        msg = "'{}' has negative mass {} at coordinates {}."
        msg_fmt = msg.format(name, probs[coords], list(coords))
        raise excs.NegativeMass(msg_fmt)

    total = float(probs.sum())
    if abs(total - 1.0) > TOL_NORMALIZATION:
        msg = "'{}' sums to {!r} instead of 1."
        msg_fmt = msg.format(name, total)
        raise excs.NotNormalized(msg_fmt)


def check_conditional(probs: numpy.ndarray, name: str) -> None:
    """ Checks that every slice over the first axis of `probs` is a
        distribution.

    Raises:
        excs.InvalidInput: Raised when the tensor holds non-finite entries.
        excs.NegativeMass: Raised when an entry is below `-TOL_NEGATIVE`.
        excs.NotNormalized: Raised when a slice does not sum to one.
    """

    if not numpy.all(numpy.isfinite(probs)):
        msg = "'{}' holds non-finite entries."
        raise excs.InvalidInput(msg.format(name))

    coords = find_negative(probs)
    if coords is not None:
        msg = "'{}' has negative mass {} at coordinates {}."
        msg_fmt = msg.format(name, probs[coords], list(coords))
        raise excs.NegativeMass(msg_fmt)

    sums = probs.sum(axis=0)
    gaps = numpy.abs(sums - 1.0)
    if gaps.size and gaps.max() > TOL_NORMALIZATION:
        idx = numpy.unravel_index(numpy.argmax(gaps), gaps.shape)
        msg = "'{}' slice at conditioning coordinates {} sums to {!r}."
        msg_fmt = msg.format(name, [int(i) for i in idx], float(sums[idx]))
        raise excs.NotNormalized(msg_fmt)


class Alphabet(object):
    """ A finite alphabet with optional display labels."""

    def __init__(self, size: int, labels: Optional[Sequence[str]] = None):

        if int(size) != size or size < 1:
            msg = "Alphabet size must be a positive integer, got {!r}."
            raise excs.InvalidInput(msg.format(size))

        if labels is not None:
            labels = tuple(str(label) for label in labels)
            if len(labels) != size:
                msg = "Alphabet of size {} given {} labels."
                raise excs.DimensionMismatch(msg.format(size, len(labels)))
            if len(set(labels)) != len(labels):
                msg = "Alphabet labels must be unique, got {}."
                raise excs.InvalidInput(msg.format(list(labels)))

        self.size = int(size)
        self.labels = labels

    def label(self, index: int) -> str:
        if self.labels is None:
            return str(index)
        return self.labels[index]

    def __eq__(self, other):
        return (
            isinstance(other, Alphabet) and
            self.size == other.size and
            self.labels == other.labels
        )

    def __repr__(self):
        return "Alphabet(size={}, labels={})".format(self.size, self.labels)


class Pmf(object):
    """ A probability mass function over a single alphabet."""

    def __init__(self, probs, validate: bool = True):
        probs = numpy.asarray(probs, dtype=float)
        if probs.ndim != 1:
            msg = "Pmf expects a 1-dimensional array, got shape {}."
            raise excs.DimensionMismatch(msg.format(probs.shape))

        if validate:
            check_mass(probs=probs, name="pmf")

        self.probs = freeze(probs)

    @property
    def size(self) -> int:
        return self.probs.shape[0]

    def __repr__(self):
        return "Pmf({})".format(self.probs.tolist())


class Joint3(object):
    """ A joint distribution over `(r, z, x)`."""

    def __init__(self, probs, validate: bool = True):
        probs = numpy.asarray(probs, dtype=float)
        if probs.ndim != 3:
            msg = "Joint3 expects a 3-dimensional (r, z, x) array, got {}."
            raise excs.DimensionMismatch(msg.format(probs.shape))

        if validate:
            check_mass(probs=probs, name="joint")

        self.probs = freeze(probs)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.probs.shape

    @property
    def n_r(self) -> int:
        return self.probs.shape[0]

    @property
    def n_z(self) -> int:
        return self.probs.shape[1]

    @property
    def n_x(self) -> int:
        return self.probs.shape[2]

    def __repr__(self):
        return "Joint3(shape={})".format(self.shape)


class Channel(object):
    """ A release channel `p(r_hat | z, x)` stored as `(r_hat, z, x)`."""

    def __init__(self, probs, validate: bool = True):
        probs = numpy.asarray(probs, dtype=float)
        if probs.ndim != 3:
            msg = "Channel expects a 3-dimensional (r_hat, z, x) array, got {}."
            raise excs.DimensionMismatch(msg.format(probs.shape))

        if validate:
            check_conditional(probs=probs, name="channel")

        self.probs = freeze(probs)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.probs.shape

    @property
    def n_rhat(self) -> int:
        return self.probs.shape[0]

    def __repr__(self):
        return "Channel(shape={})".format(self.shape)


class DistortionMatrix(object):
    """ A non-negative distortion `d(r_hat, r)`."""

    def __init__(self, d, validate: bool = True):
        d = numpy.asarray(d, dtype=float)
        if d.ndim != 2:
            msg = "DistortionMatrix expects a 2-dimensional array, got {}."
            raise excs.DimensionMismatch(msg.format(d.shape))

        if validate:
            if not numpy.all(numpy.isfinite(d)):
                raise excs.InvalidInput("Distortion entries must be finite.")
            coords = find_negative(d)
            if coords is not None or (d.size and d.min() < 0):
                msg = "Distortion entries must be non-negative, min is {}."
                raise excs.NegativeMass(msg.format(float(d.min())))

        self.d = freeze(d)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.d.shape

    @classmethod
    def hamming(cls, n_rhat: int, n_r: int) -> "DistortionMatrix":
        """ Builds the Hamming distortion `d(r_hat, r) = [r_hat != r]`."""

        d = 1.0 - numpy.eye(n_rhat, n_r)

        return cls(d=d)

    def __repr__(self):
        return "DistortionMatrix(shape={})".format(self.shape)
