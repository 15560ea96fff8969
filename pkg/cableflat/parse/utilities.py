import hashlib
import json
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np

from cableflat.errors import SchemaError


FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: Union[str, Path]) -> Path:
    r"""Locate a file shipped in the package fixtures directory.

    Args:
        name: Path relative to the fixtures directory; existing paths are
            returned unchanged

    Returns:
        The resolved path
    """
    path = Path(name)
    if path.exists():
        return path
    candidate = FIXTURES / path
    if candidate.exists():
        return candidate
    if candidate.with_suffix(".json").exists():
        return candidate.with_suffix(".json")
    raise FileNotFoundError("no such file or fixture: '{}'".format(name))


def load_json(path: Union[str, Path]) -> Dict:
    try:
        with fixture_path(path).open("r") as f:
            document = json.load(f)
    except json.JSONDecodeError as error:
        raise SchemaError("'{}' is not valid JSON: {}".format(path, error))
    if not isinstance(document, dict):
        raise SchemaError("'{}' must contain a JSON object".format(path))
    return document


def dump_json(document: Dict, path: Union[str, Path]) -> None:
    with Path(path).open("w") as f:
        json.dump(document, f, indent=2, sort_keys=True, default=_to_builtin)
        f.write("\n")


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, tuple)):
        return list(value)
    raise TypeError("{!r} is not JSON serialisable".format(value))


def document_hash(document: Dict) -> str:
    r"""Short content hash of a JSON-serialisable document, used for provenance"""
    canonical = json.dumps(document, sort_keys=True, default=_to_builtin)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def check_keys(
    data: Dict, required: Sequence[str], optional: Sequence[str], what: str
) -> None:
    r"""Reject unknown keys and report missing ones in a JSON object"""
    if not isinstance(data, dict):
        raise SchemaError("{} must be a JSON object".format(what))
    unknown = sorted(set(data) - set(required) - set(optional))
    if unknown:
        raise SchemaError("unknown {} key(s): {}".format(what, ", ".join(unknown)))
    missing = sorted(set(required) - set(data))
    if missing:
        raise SchemaError("missing {} key(s): {}".format(what, ", ".join(missing)))
