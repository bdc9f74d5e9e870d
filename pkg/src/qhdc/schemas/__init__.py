"""Versioned JSON schemas for reports and model files."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

NAMES = ("envelope", "reason", "classify", "resources", "sweep", "selftest", "model")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"no schema named {name!r}")
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())


def validate(name: str, doc) -> None:
    """Raise ``jsonschema.ValidationError`` if ``doc`` does not match."""
    import jsonschema

    jsonschema.validate(doc, load(name), cls=jsonschema.Draft202012Validator)
