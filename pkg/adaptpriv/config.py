# -*- coding: utf-8 -*-

""" Instance and session configuration module

This module contains functions to load JSON configuration files, validate
them against the JSON schemas hardcoded within the module and turn them into
solver inputs.

Two kinds of configuration exist:

- Instance configurations (`config_schema_instance`) describe one joint
  distribution over `(r, z, x)`, the utility measure, solver options, a
  multiplier grid and leakage budgets.
- Session configurations (`config_schema_session`) describe a prior over the
  database value and a sequence of requests.

Attributes:
    config_schema_instance (dict): The JSON schema of instance files.
    config_schema_session (dict): The JSON schema of session files.
"""

import os
import json
from typing import Dict, List, Optional, Tuple

import attrdict
import jsonschema
import numpy

from adaptpriv import excs
from adaptpriv import probability
from adaptpriv.types.curves import EnumSpacing
from adaptpriv.types.curves import MultiplierGrid
from adaptpriv.types.distributions import DistortionMatrix
from adaptpriv.types.distributions import Joint3
from adaptpriv.types.distributions import Pmf
from adaptpriv.types.distributions import check_conditional
from adaptpriv.types.releases import Budget
from adaptpriv.types.releases import RequestSpec
from adaptpriv.types.solver import BaOptions
from adaptpriv.types.solver import EnumInitMode
from adaptpriv.types.solver import EnumProblem
from adaptpriv.types.solver import LagrangePair
from adaptpriv.types.solver import MiOptions


# Environment variable holding the path of the configuration file.
ENV_CONFIG = "ADAPTPRIV_CONFIG"

_schema_number = {"type": "number"}

_schema_matrix = {
    "type": "array",
    "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": _schema_number},
}

# Fields shared by instance and session configurations.
_schema_common = {
    # General Settings.
    "schema": {
        "type": "integer",
        "enum": [1],
        "description": "Version of the configuration format.",
    },
    "name": {"type": "string"},
    "logger_level": {
        "type": "string",
        "description": ("The minimum level of `logging` messages that will "
                        "be emitted"),
        "enum": [
            "DEBUG",
            "INFO",
            "WARNING",
            "ERROR",
            "CRITICAL"
        ]
    },
    # Error Reporting Settings.
    "sentry": {
        "type": "object",
        "properties": {"dsn": {"type": "string"}},
    },
    # Solver Settings.
    "problem": {
        "type": "string",
        "enum": [problem.value for problem in EnumProblem],
    },
    "solver": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "max_iters": {"type": "integer", "minimum": 1},
            "init_mode": {
                "type": "string",
                "enum": [mode.value for mode in EnumInitMode],
            },
            "init_seed": {"type": "integer"},
            "n_init": {"type": "integer", "minimum": 1},
            "rng_seed": {"type": "integer"},
            "threads": {"type": "integer", "minimum": 1},
        },
    },
}

# A distortion matrix or the name of a standard one.
_schema_distortion = {
    "oneOf": [
        {"type": "string", "enum": ["hamming"]},
        _schema_matrix,
    ],
}

_schema_budget = {
    "type": "object",
    "required": ["eps", "delta"],
    "additionalProperties": False,
    "properties": {
        "eps": _schema_number,
        "delta": _schema_number,
    },
}

_schema_mu = {
    "type": "object",
    "required": ["mu1", "mu2"],
    "additionalProperties": False,
    "properties": {
        "mu1": _schema_number,
        "mu2": _schema_number,
    },
}

# JSON schema of instance configurations.
config_schema_instance = {
    "type": "object",
    "required": ["schema", "alphabets", "problem"],
    "oneOf": [
        {"required": ["joint"]},
        {"required": ["px", "request_channel"]},
    ],
    "properties": dict(_schema_common, **{
        # Alphabet Sizes.
        "alphabets": {
            "type": "object",
            "required": ["r", "z", "x"],
            "additionalProperties": False,
            "properties": {
                "r": {"type": "integer", "minimum": 1},
                "z": {"type": "integer", "minimum": 1},
                "x": {"type": "integer", "minimum": 1},
                "r_hat": {"type": "integer", "minimum": 1},
            },
        },
        "axis_order": {
            "type": "array",
            "items": {"type": "string"},
            "const": ["r", "z", "x"],
        },
        # Joint Distribution, given directly or by its factors.
        "joint": {
            "type": "array",
            "minItems": 1,
            "items": _schema_matrix,
        },
        "px": {"type": "array", "minItems": 1, "items": _schema_number},
        "request_channel": _schema_matrix,
        "pz_given_x": _schema_matrix,
        # Sweep and Budget Settings.
        "distortion": _schema_distortion,
        "grid": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["mu1_values", "mu2_values"],
                    "additionalProperties": False,
                    "properties": {
                        "mu1_values": {
                            "type": "array",
                            "minItems": 1,
                            "items": _schema_number,
                        },
                        "mu2_values": {
                            "type": "array",
                            "minItems": 1,
                            "items": _schema_number,
                        },
                        "spacing": {"enum": ["log", "linear"]},
                    },
                },
                {
                    "type": "object",
                    "required": ["min", "max", "count"],
                    "additionalProperties": False,
                    "properties": {
                        "min": _schema_number,
                        "max": _schema_number,
                        "count": {"type": "integer", "minimum": 1},
                        "spacing": {"enum": ["log", "linear"]},
                    },
                },
            ],
        },
        "budgets": {"type": "array", "items": _schema_budget},
    }),
}

# JSON schema of session configurations.
config_schema_session = {
    "type": "object",
    "required": ["schema", "px", "requests"],
    "properties": dict(_schema_common, **{
        "px": {"type": "array", "minItems": 1, "items": _schema_number},
        "seed": {"type": "integer"},
        "x_true": {"type": "integer", "minimum": 0},
        "requests": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["request_channel"],
                "oneOf": [
                    {"required": ["budget"]},
                    {"required": ["mu"]},
                ],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string"},
                    "request_channel": _schema_matrix,
                    "budget": _schema_budget,
                    "mu": _schema_mu,
                    "distortion": _schema_distortion,
                },
            },
        },
    }),
}


def load_config_file(fname_config_file: str) -> Dict:
    """ Loads a JSON configuration file and returns its contents as a dict.

    Args:
        fname_config_file (str): The path to the JSON configuration file.

    Returns:
        dict: The loaded configuration dictionary.

    Raises:
        excs.ConfigFileNotFound: Raised when the path is not a file.
        excs.ParseError: Raised when the file is not valid JSON.
    """

    # Ensure the provided path is a valid existing file.
    if (
            not os.path.exists(fname_config_file) or
            not os.path.isfile(fname_config_file)
    ):
        msg = "Config file '{0}' not found or not a file."
        msg_fmt = msg.format(fname_config_file)
        raise excs.ConfigFileNotFound(msg_fmt)

    # Read the JSON file reporting the position of syntax errors.
    with open(fname_config_file, "r", encoding="utf-8") as finp:
        try:
            config = json.load(finp)
        except json.JSONDecodeError as exc:
            msg = (
                "Config file '{0}' is not valid JSON at line {1}, "
                "column {2}: {3}"
            )
            msg_fmt = msg.format(
                fname_config_file, exc.lineno, exc.colno, exc.msg,
            )
            raise excs.ParseError(msg_fmt)

    return config


def validate_config(
    config_instance: Dict,
    config_schema: Optional[Dict] = None,
) -> bool:
    """ Validates a configuration dict against a JSON schema.

    Args:
        config_instance (dict): The configuration dictionary instance.
        config_schema (dict, optional): The configuration JSON schema in the
            form of a `dict`. Defaults to `None` in which case the
            `config_schema_instance` is used.

    Returns:
        bool: `True` if `config_instance` validates against the schema.

    Raises:
        excs.ConfigFileInvalid: Raised when the validation fails, naming the
            path of the offending field.
    """

    # Use `config_schema_instance` if no schema was provided.
    if config_schema is None:
        config_schema = config_schema_instance

    # Perform the validation of the provided configuration against the schema
    # and wrap failures in the custom `excs.ConfigFileInvalid` exception.
    try:
        jsonschema.validate(instance=config_instance, schema=config_schema)
    except jsonschema.ValidationError as exc:
        field = "/".join(str(part) for part in exc.absolute_path) or "<root>"
        msg = "Field '{0}': {1}"
        raise excs.ConfigFileInvalid(msg.format(field, exc.message))

    return True


def import_config(
    fname_config_file: str,
    config_schema: Optional[Dict] = None,
) -> attrdict.AttrDict:
    """ Loads and validates a JSON configuration file.

    Args:
        fname_config_file (str): The path to the JSON configuration file.
        config_schema (dict, optional): The schema to validate against.
            Defaults to `config_schema_instance`.

    Returns:
        attrdict.AttrDict: The imported configuration `AttrDict`.
    """

    # Load the JSON configuration file.
    config = load_config_file(fname_config_file=fname_config_file)

    # Validate the loaded `dict` against the JSON schema.
    validate_config(config_instance=config, config_schema=config_schema)

    return attrdict.AttrDict(config)


def resolve_config_path(fname_config_file: Optional[str] = None) -> str:
    """ Returns the given path or the one held by `ADAPTPRIV_CONFIG`.

    Raises:
        excs.UsageError: Raised when neither is defined.
    """

    # An explicit path takes precedence over the environment.
    if fname_config_file:
        return fname_config_file

    if ENV_CONFIG in os.environ:
        return os.environ[ENV_CONFIG]

    msg = "Configuration file path not defined (pass it or set {0})."
    raise excs.UsageError(msg.format(ENV_CONFIG))


def export_config(cfg: Dict, fname_config_file: str) -> None:
    """ Writes a configuration in canonical form (sorted keys, two-space
        indentation, shortest round-trip floats).

    Raises:
        excs.IoError: Raised when the file cannot be written.
    """

    # Write plain JSON values and wrap write failures in the custom
    # `excs.IoError` exception.
    try:
        with open(fname_config_file, "w", encoding="utf-8") as fout:
            json.dump(_to_plain(cfg), fout, indent=2, sort_keys=True)
            fout.write("\n")
    except OSError as exc:
        msg = "Cannot write config file '{0}': {1}"
        raise excs.IoError(msg.format(fname_config_file, exc))


def _to_plain(value):
    """ Converts `AttrDict` trees, whose sequences read back as tuples, into
        plain JSON values.
    """

    if isinstance(value, dict):
        return {key: _to_plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(item) for item in value]

    return value


def _in_field(field: str, exc: excs.ValidationError) -> excs.ValidationError:
    """ Re-creates a validation error prefixed with the config field."""

    msg = "Field '{0}': {1}"
    return type(exc)(msg.format(field, exc.message))


def build_problem(cfg: attrdict.AttrDict) -> EnumProblem:
    return EnumProblem(cfg.get("problem", EnumProblem.DISTORTION.value))


def build_joint(cfg: attrdict.AttrDict) -> Joint3:
    """ Builds the joint of an instance configuration.

    Raises:
        excs.DimensionMismatch: Raised when the tensor disagrees with the
            declared alphabet sizes.
        excs.NegativeMass, excs.NotNormalized: Raised for invalid tensors,
            naming the field.
    """

    sizes = cfg.alphabets
    expected = (sizes.r, sizes.z, sizes.x)

    # Take the joint as given or assemble it from `p(x)`, `p(r | x)` and
    # `p(z | x)`.
    if "joint" in cfg:
        field = "joint"
        probs = numpy.asarray(_to_plain(cfg.joint), dtype=float)
    else:
        field = "px"
        px = numpy.asarray(_to_plain(cfg.px), dtype=float)
        request = numpy.asarray(_to_plain(cfg.request_channel), dtype=float)
        if "pz_given_x" in cfg:
            pz_given_x = numpy.asarray(_to_plain(cfg.pz_given_x), dtype=float)
        else:
            pz_given_x = numpy.ones((1, px.shape[0]))
        try:
            check_conditional(probs=request, name="request_channel")
            check_conditional(probs=pz_given_x, name="pz_given_x")
        except excs.ValidationError as exc:
            raise _in_field(field="request_channel", exc=exc)
        try:
            probs = probability.joint_from_request(
                px=px, request_channel=request, pz_given_x=pz_given_x,
            ).probs
        except excs.ValidationError as exc:
            raise _in_field(field="px", exc=exc)

    # Check the tensor against the declared alphabet sizes.
    if probs.ndim != 3 or probs.shape != expected:
        msg = ("Field '{0}': tensor of shape {1} does not match the declared "
               "alphabets (r, z, x) = {2}.")
        msg_fmt = msg.format(field, probs.shape, expected)
        raise excs.DimensionMismatch(msg_fmt)

    # Validate the probability mass naming the field it came from.
    try:
        return Joint3(probs=probs)
    except excs.ValidationError as exc:
        raise _in_field(field=field, exc=exc)


def build_distortion(cfg: attrdict.AttrDict) -> Optional[DistortionMatrix]:
    """ Builds the distortion matrix of an instance configuration.

    Information problems without a `distortion` field get `None`. The Hamming
    distortion spans `r_hat` (defaulting to `r`) by `r`.
    """

    n_r = cfg.alphabets.r
    n_rhat = cfg.alphabets.get("r_hat", n_r)

    if "distortion" not in cfg:
        if build_problem(cfg=cfg) is EnumProblem.DISTORTION:
            return DistortionMatrix.hamming(n_rhat=n_rhat, n_r=n_r)
        if n_rhat != n_r:
            return DistortionMatrix.hamming(n_rhat=n_rhat, n_r=n_r)
        return None

    return _build_distortion_field(
        value=cfg.distortion, n_rhat=n_rhat, n_r=n_r, field="distortion",
    )


def _build_distortion_field(
    value,
    n_rhat: int,
    n_r: int,
    field: str,
) -> DistortionMatrix:

    if value == "hamming":
        return DistortionMatrix.hamming(n_rhat=n_rhat, n_r=n_r)

    try:
        d = DistortionMatrix(d=_to_plain(value))
    except excs.ValidationError as exc:
        raise _in_field(field=field, exc=exc)

    if d.shape != (n_rhat, n_r):
        msg = ("Field '{0}': matrix of shape {1} does not match the alphabets "
               "(r_hat, r) = {2}.")
        msg_fmt = msg.format(field, d.shape, (n_rhat, n_r))
        raise excs.DimensionMismatch(msg_fmt)

    return d


def build_options(
    cfg: attrdict.AttrDict,
    overrides: Optional[Dict] = None,
) -> MiOptions:
    """ Builds solver options from the `solver` block and command-line
        overrides (entries set to `None` are ignored).
    """

    # Start from the `solver` block and apply the command-line overrides.
    values = dict(_to_plain(cfg.get("solver", {})))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    # Build the options, missing entries taking their defaults.
    try:
        base = BaOptions(
            tol=values.get("tol", 1e-9),
            max_iters=values.get("max_iters", 10000),
            init_seed=values.get("init_seed", 0),
            init_mode=EnumInitMode(values.get("init_mode", "uniform")),
        )
        return MiOptions(
            base=base,
            n_init=values.get("n_init", 10),
            rng_seed=values.get("rng_seed", 0),
            threads=values.get("threads", 1),
        )
    except excs.ValidationError as exc:
        raise _in_field(field="solver", exc=exc)


def build_grid(cfg: attrdict.AttrDict) -> Optional[MultiplierGrid]:
    """ Builds the multiplier grid, `None` when the instance declares none."""

    if "grid" not in cfg:
        return None

    # Explicit value lists take precedence over a `min`/`max`/`count` range.
    grid = _to_plain(cfg.grid)
    spacing = EnumSpacing(grid.get("spacing", "log"))

    try:
        if "mu1_values" in grid:
            return MultiplierGrid(
                mu1_values=grid["mu1_values"],
                mu2_values=grid["mu2_values"],
                spacing=spacing,
            )
        if spacing is EnumSpacing.LOG:
            return MultiplierGrid.log_spaced(
                low=grid["min"], high=grid["max"], num=grid["count"],
            )
        return MultiplierGrid.linear_spaced(
            low=grid["min"], high=grid["max"], num=grid["count"],
        )
    except excs.ValidationError as exc:
        raise excs.ConfigFileInvalid(
            "Field 'grid': {0}".format(exc.message),
        )


def build_budgets(cfg: attrdict.AttrDict) -> List[Budget]:
    if "budgets" not in cfg:
        return []

    return [
        Budget(eps=budget.eps, delta=budget.delta) for budget in cfg.budgets
    ]


def build_session(
    cfg: attrdict.AttrDict,
) -> Tuple[Pmf, List[RequestSpec], EnumProblem, Optional[int], int]:
    """ Builds the inputs of a session configuration.

    Returns:
        Tuple[Pmf, List[RequestSpec], EnumProblem, Optional[int], int]: The
            prior, the requests, the utility measure, the realised database
            value and the sampler seed.
    """

    # Build the prior of the database value.
    try:
        px = Pmf(probs=_to_plain(cfg.px))
    except excs.ValidationError as exc:
        raise _in_field(field="px", exc=exc)

    # Build one request per entry, errors naming the offending entry.
    specs = []
    for index, request in enumerate(cfg.requests):
        field = "requests/{0}".format(index)
        request_channel = numpy.asarray(
            _to_plain(request.request_channel), dtype=float,
        )
        n_r = request_channel.shape[0]

        distortion = None
        if "distortion" in request:
            distortion = _build_distortion_field(
                value=request.distortion,
                n_rhat=(
                    n_r if request.distortion == "hamming"
                    else len(request.distortion)
                ),
                n_r=n_r,
                field=field + "/distortion",
            )

        budget = None
        if "budget" in request:
            budget = Budget(eps=request.budget.eps, delta=request.budget.delta)

        mu = None
        if "mu" in request:
            try:
                mu = LagrangePair(mu1=request.mu.mu1, mu2=request.mu.mu2)
            except excs.ValidationError as exc:
                raise _in_field(field=field + "/mu", exc=exc)

        try:
            specs.append(RequestSpec(
                request_channel=request_channel,
                budget=budget,
                mu=mu,
                label=request.get("label", "request-{0}".format(index + 1)),
                distortion=distortion,
            ))
        except excs.ValidationError as exc:
            raise _in_field(field=field, exc=exc)

    return (
        px,
        specs,
        build_problem(cfg=cfg),
        cfg.get("x_true"),
        cfg.get("seed", 0),
    )
