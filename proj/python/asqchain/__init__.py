"""Andreev spin qubit chain simulator (Python front end)."""

import json as _json

from ._asqchain import *  # noqa: F401,F403
from ._asqchain import run_config as _run_config, validate_config as _validate_config


def run(config, seed=None):
    """Run a config (dict or JSON text); returns the summary document as a dict."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_run_config(text, seed))


def validate(config):
    """Parse and validate a config; returns it with defaults filled in."""
    text = config if isinstance(config, str) else _json.dumps(config)
    return _json.loads(_validate_config(text))
