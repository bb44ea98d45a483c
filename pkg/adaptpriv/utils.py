# coding=utf-8

import hashlib
import concurrent.futures
from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy


T = TypeVar("T")
U = TypeVar("U")


def format_float(value: float) -> str:
    """ Formats a float with the shortest repr that round-trips exactly.

    Args:
        value (float): The value to format.

    Returns:
        str: The `repr` of the value as a Python float.
    """

    return repr(float(value))


def channel_digest(probs: numpy.ndarray) -> str:
    """ Computes the SHA-256 hex digest of a probability tensor.

    The digest covers the shape and the little-endian float64 bytes of the
    tensor in C order so equal tensors hash equally across platforms.

    Args:
        probs (numpy.ndarray): The tensor to hash.

    Returns:
        str: The hex digest.
    """

    array = numpy.ascontiguousarray(probs, dtype="<f8")
    digest = hashlib.sha256()
    digest.update(str(array.shape).encode("utf-8"))
    digest.update(array.tobytes())

    return digest.hexdigest()


def spawn_generators(
    seed: int,
    count: int,
) -> List[numpy.random.Generator]:
    """ Creates `count` independent generators derived from one seed.

    The i-th generator only depends on `seed` and `i`, which keeps parallel
    runs reproducible regardless of scheduling.
    """

    children = numpy.random.SeedSequence(seed).spawn(count)

    return [numpy.random.default_rng(child) for child in children]


def thread_map(
    func: Callable[[T], U],
    items: Iterable[T],
    threads: int = 1,
) -> List[U]:
    """ Applies `func` to every item, optionally on a thread pool.

    Results are returned in the order of `items`. Exceptions raised by `func`
    propagate to the caller.

    Args:
        func (Callable[[T], U]): The function to apply.
        items (Iterable[T]): The inputs.
        threads (int): Number of worker threads. `1` runs inline.

    Returns:
        List[U]: The outputs in input order.
    """

    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


def argmin_first(values: Sequence[float]) -> int:
    """ Returns the index of the smallest value, ties to the lowest index."""

    return int(numpy.argmin(numpy.asarray(values, dtype=float)))
