# coding=utf-8

""" Multiplier grids and the operating points traced over them."""

import enum
import math
import dataclasses
from typing import Iterator, Optional, Tuple

import numpy

from adaptpriv import excs
from adaptpriv.types.distributions import Channel
from adaptpriv.types.solver import LagrangePair


# Slack tolerated on `eps_leak <= delta_leak` from round-off.
TOL_LEAK_ORDER = 1e-9


class EnumSpacing(enum.Enum):
    """ How the values of a multiplier axis are spaced."""

    LOG = "log"
    LINEAR = "linear"


class EnumProvenance(enum.Enum):
    """ How an operating point was obtained."""

    GRID = "grid"
    TIMESHARE = "timeshare"


def _check_axis(values: Tuple[float, ...], name: str) -> None:
    if not values:
        msg = "Grid axis '{}' must not be empty."
        raise excs.InvalidInput(msg.format(name))

    for value in values:
        if not math.isfinite(value) or value < 0:
            msg = "Grid axis '{}' holds invalid multiplier {!r}."
            raise excs.InvalidInput(msg.format(name, value))

    if any(b <= a for a, b in zip(values[:-1], values[1:])):
        msg = "Grid axis '{}' must be strictly increasing, got {}."
        raise excs.InvalidInput(msg.format(name, list(values)))


@dataclasses.dataclass(frozen=True)
class MultiplierGrid(object):
    """ A rectangular grid of Lagrange multiplier pairs.

    Attributes:
        mu1_values (Tuple[float, ...]): Values of `mu1`, strictly increasing.
        mu2_values (Tuple[float, ...]): Values of `mu2`, strictly increasing.
        spacing (EnumSpacing): How the values were generated.
    """

    mu1_values: Tuple[float, ...]
    mu2_values: Tuple[float, ...]
    spacing: EnumSpacing = EnumSpacing.LOG

    def __post_init__(self):
        # Normalise sequences into float tuples on the frozen instance.
        object.__setattr__(
            self, "mu1_values", tuple(float(v) for v in self.mu1_values),
        )
        object.__setattr__(
            self, "mu2_values", tuple(float(v) for v in self.mu2_values),
        )
        _check_axis(values=self.mu1_values, name="mu1")
        _check_axis(values=self.mu2_values, name="mu2")

    @classmethod
    def log_spaced(
        cls,
        low: float,
        high: float,
        num: int,
        num_mu2: Optional[int] = None,
    ) -> "MultiplierGrid":
        """ Builds a grid with `num` log-spaced values per axis in
            `[low, high]`.
        """

        if not 0 < low < high:
            msg = "Log-spaced grids need 0 < low < high, got ({!r}, {!r})."
            raise excs.InvalidInput(msg.format(low, high))

        return cls(
            mu1_values=tuple(numpy.geomspace(low, high, num)),
            mu2_values=tuple(numpy.geomspace(low, high, num_mu2 or num)),
            spacing=EnumSpacing.LOG,
        )

    @classmethod
    def linear_spaced(
        cls,
        low: float,
        high: float,
        num: int,
        num_mu2: Optional[int] = None,
    ) -> "MultiplierGrid":
        """ Builds a grid with `num` evenly spaced values per axis in
            `[low, high]`.
        """

        return cls(
            mu1_values=tuple(numpy.linspace(low, high, num)),
            mu2_values=tuple(numpy.linspace(low, high, num_mu2 or num)),
            spacing=EnumSpacing.LINEAR,
        )

    def pairs(self) -> Iterator[LagrangePair]:
        """ Yields every multiplier pair, `mu1`-major."""

        for mu1 in self.mu1_values:
            for mu2 in self.mu2_values:
                yield LagrangePair(mu1=mu1, mu2=mu2)

    def __len__(self):
        return len(self.mu1_values) * len(self.mu2_values)


@dataclasses.dataclass(frozen=True, eq=False)
class CurvePoint(object):
    """ One operating point of the utility-privacy-collusion curve.

    A point whose solve failed keeps its multipliers, carries the error
    message in `error`, has no channel, and its figures are NaN.

    Attributes:
        mu (LagrangePair): The multipliers (weighted by the mixing
            coefficients for time-shared points).
        utility (float): Expected distortion or `I(R_hat; R)` in bits.
        eps_leak (float): Achieved `I(R_hat; X)` in bits.
        delta_leak (float): Achieved `I(R_hat, Z; X)` in bits.
        iterations (int): Solver iterations (`0` for time-shared points).
        channel (Optional[Channel]): The release channel.
        provenance (EnumProvenance): How the point was obtained.
        converged (bool): Whether the solver met its tolerance.
        error (Optional[str]): The solver error of a failed point.
    """

    mu: LagrangePair
    utility: float
    eps_leak: float
    delta_leak: float
    iterations: int
    channel: Optional[Channel]
    provenance: EnumProvenance = EnumProvenance.GRID
    converged: bool = True
    error: Optional[str] = None

    def __post_init__(self):
        if self.error is not None:
            return

        if self.eps_leak < 0 or self.delta_leak < 0:
            msg = "Leakages must be non-negative, got ({!r}, {!r})."
            raise excs.InvalidInput(msg.format(self.eps_leak, self.delta_leak))

        if self.eps_leak > self.delta_leak + TOL_LEAK_ORDER:
            msg = "Individual leakage {!r} exceeds collusion leakage {!r}."
            raise excs.InvalidInput(msg.format(self.eps_leak, self.delta_leak))

    @property
    def ok(self) -> bool:
        """ Whether the point was solved successfully."""
        return self.error is None

    @classmethod
    def failed(cls, mu: LagrangePair, error: str) -> "CurvePoint":
        nan = float("nan")
        return cls(
            mu=mu,
            utility=nan,
            eps_leak=nan,
            delta_leak=nan,
            iterations=0,
            channel=None,
            converged=False,
            error=error,
        )
