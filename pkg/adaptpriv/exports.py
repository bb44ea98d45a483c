# coding=utf-8

""" Writers and readers of the files produced by the command-line front end.

- Curve CSV: `mu1,mu2,utility,eps_leak,delta_leak,iterations,provenance`,
  rows sorted by `(mu1, mu2)`.
- Trace CSV: `iter,objective`.
- Session transcript: one JSON object per line and per release.
- Channel JSON: named channels as nested `(r_hat, z, x)` arrays.

Floats are written with their shortest round-trip representation and files
use UTF-8 with LF line endings.
"""

import csv
import json
from typing import Dict, List, Sequence

from adaptpriv import excs
from adaptpriv import utils
from adaptpriv.types.curves import CurvePoint
from adaptpriv.types.distributions import Channel
from adaptpriv.types.releases import ReleaseRecord


CURVE_COLUMNS = [
    "mu1",
    "mu2",
    "utility",
    "eps_leak",
    "delta_leak",
    "iterations",
    "provenance",
]

TRACE_COLUMNS = ["iter", "objective"]


def _open_for_writing(destination: str):
    try:
        return open(destination, "w", encoding="utf-8", newline="")
    except OSError as exc:
        msg = "Cannot write '{}': {}"
        raise excs.IoError(msg.format(destination, exc))


def write_curve_csv(points: Sequence[CurvePoint], destination: str) -> None:
    """ Writes curve points as CSV sorted by `(mu1, mu2)`.

    Args:
        points (Sequence[CurvePoint]): The points to write.
        destination (str): The output path.

    Raises:
        excs.InvalidInput: Raised when `points` is empty.
        excs.IoError: Raised when the file cannot be written.
    """

    if not points:
        raise excs.InvalidInput("Refusing to export an empty curve.")

    rows = sorted(points, key=lambda p: (p.mu.mu1, p.mu.mu2))

    with _open_for_writing(destination) as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(CURVE_COLUMNS)
        for point in rows:
            writer.writerow([
                utils.format_float(point.mu.mu1),
                utils.format_float(point.mu.mu2),
                utils.format_float(point.utility),
                utils.format_float(point.eps_leak),
                utils.format_float(point.delta_leak),
                str(point.iterations),
                point.provenance.value,
            ])


def read_curve_csv(source: str) -> List[Dict[str, str]]:
    """ Reads a curve CSV back as a list of row dictionaries."""

    try:
        with open(source, "r", encoding="utf-8", newline="") as finp:
            return list(csv.DictReader(finp))
    except OSError as exc:
        msg = "Cannot read '{}': {}"
        raise excs.IoError(msg.format(source, exc))


def write_trace_csv(trace: Sequence[float], destination: str) -> None:
    """ Writes an objective trace as `iter,objective` rows, `iter` from 1."""

    with _open_for_writing(destination) as fout:
        writer = csv.writer(fout, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for iteration, value in enumerate(trace, start=1):
            writer.writerow([str(iteration), utils.format_float(value)])


def record_to_dict(record: ReleaseRecord) -> Dict:
    """ Converts a release record to its transcript entry."""

    budget = None
    if record.budget is not None:
        budget = {"eps": record.budget.eps, "delta": record.budget.delta}

    budget_effective = None
    if record.budget_effective is not None:
        budget_effective = {
            "eps": record.budget_effective.eps,
            "delta": record.budget_effective.delta,
        }

    mu = None
    if record.mu is not None:
        mu = {"mu1": record.mu.mu1, "mu2": record.mu.mu2}

    return {
        "step": record.step,
        "label": record.label,
        "budget": budget,
        "budget_effective": budget_effective,
        "mu": mu,
        "path": record.path.value,
        "utility": record.achieved.utility,
        "eps_leak": record.achieved.eps_leak,
        "delta_leak": record.achieved.delta_leak,
        "cumulative_leakage": record.cumulative_leakage,
        "sampled": record.sampled,
        "channel_shape": list(record.channel.shape),
        "channel_digest": utils.channel_digest(record.channel.probs),
    }


def write_transcript(
    records: Sequence[ReleaseRecord],
    destination: str,
) -> None:
    """ Writes a session transcript, one JSON object per line."""

    with _open_for_writing(destination) as fout:
        for record in records:
            fout.write(json.dumps(record_to_dict(record), sort_keys=True))
            fout.write("\n")


def read_transcript(source: str) -> List[Dict]:
    """ Reads a session transcript.

    Raises:
        excs.IoError: Raised when the file cannot be read.
        excs.ParseError: Raised when a line is not valid JSON.
    """

    try:
        with open(source, "r", encoding="utf-8") as finp:
            lines = finp.read().splitlines()
    except OSError as exc:
        msg = "Cannot read '{}': {}"
        raise excs.IoError(msg.format(source, exc))

    entries = []
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            entries.append(json.loads(line))
        except ValueError as exc:
            msg = "Transcript '{}' line {} is not valid JSON: {}"
            raise excs.ParseError(msg.format(source, number, exc))

    return entries


def write_channels_json(
    channels: Dict[str, Channel],
    destination: str,
) -> None:
    """ Writes named channels as nested `(r_hat, z, x)` arrays."""

    payload = {
        "axis_order": ["r_hat", "z", "x"],
        "channels": {
            name: channel.probs.tolist() for name, channel in channels.items()
        },
    }

    with _open_for_writing(destination) as fout:
        json.dump(payload, fout, indent=2, sort_keys=True)
        fout.write("\n")
