"""Category-name to classifier-label-id mappings.

Ships the ImageNet-1k indices for the ten fruit categories as package data,
cross-checked against the canonical 1000-class index listing.
"""

from __future__ import annotations

import json
from importlib import resources


def imagenet_fruit_ids() -> dict[str, list[int]]:
    """ImageNet-1k label ids for the ten fruit categories, keyed by name."""
    data = resources.files("hybridbench").joinpath("data/imagenet_fruits.json")
    return json.loads(data.read_text(encoding="utf-8"))


def lookup_class_ids(name: str) -> list[int]:
    """Case-insensitive lookup into the fruit mapping."""
    table = {k.casefold(): v for k, v in imagenet_fruit_ids().items()}
    try:
        return table[name.casefold()]
    except KeyError:
        raise KeyError(f"no ImageNet fruit ids known for category {name!r}") from None
