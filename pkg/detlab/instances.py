"""JSON codecs for every instance type, keyed by the "type" field."""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Union

from detlab.errors import DomainError
from detlab.gridtiling import BcspInstance, GridTilingInstance
from detlab.linalg import GramMatrix, RatVectorSet
from detlab.reductions import KSumInstance

logger = logging.getLogger("detlab.instances")

Instance = Union[RatVectorSet, GramMatrix, KSumInstance, GridTilingInstance, BcspInstance]

INSTANCE_TYPES = {
    "vectors": RatVectorSet,
    "gram": GramMatrix,
    "ksum": KSumInstance,
    "gridtiling": GridTilingInstance,
    "bcsp": BcspInstance,
}


def instance_from_dict(data: Any) -> Instance:
    if not isinstance(data, dict):
        raise DomainError("instance file must hold a JSON object")
    kind = data.get("type")
    cls = INSTANCE_TYPES.get(kind)
    if cls is None:
        raise DomainError(f"Unknown instance type: {kind!r}")
    return cls.from_dict(data)


def read_json(path: Union[str, Path]) -> dict:
    """Parse a JSON file; malformed content is a DomainError."""
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DomainError(f"{path}: malformed JSON ({e})")


def load_instance(path: Union[str, Path]) -> Instance:
    data = read_json(path)
    instance = instance_from_dict(data)
    logger.info(f"Loaded {data['type']} instance from {path}")
    return instance


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(data: dict, path: Optional[Union[str, Path]] = None) -> None:
    """Write sorted-key JSON to ``path``, or to stdout when no path is given."""
    text = dumps(data)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    logger.info(f"Wrote {path}")
