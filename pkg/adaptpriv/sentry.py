# -*- coding: utf-8 -*-

import sentry_sdk

import attrdict


def initialize_sentry(cfg: attrdict.AttrDict) -> bool:
    """ Initializes the Sentry agent to capture exceptions which are then
        displayed under the sentry.io dashboard and the `adaptive-privacy`
        project.

    Args:
        cfg (attrdict.AttrDict): The instance or session configuration.

    Returns:
        bool: Whether the agent was initialized.
    """

    # Initialization is skipped if the Sentry configuration has not been
    # defined.
    if "sentry" not in cfg or not cfg.sentry.get("dsn"):
        return False

    sentry_sdk.init(dsn=cfg.sentry.dsn, send_default_pii=False)

    return True
