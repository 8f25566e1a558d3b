"""Model persistence: versioned JSON, byte-identical round-trips.

One file format per model kind, all JSON with a ``format_version``
field.  Serialization uses plain dicts built in a fixed order and
``json.dumps(indent=2)``, so save -> load -> save reproduces the file
byte for byte.  Anything structurally wrong with a model file raises
``ModelFormatError`` so callers can map it to a dedicated exit code.
"""

from __future__ import annotations

import json

from .anfis import AnfisEnsemble, AnfisModel
from .anfis import MODEL_FORMAT_VERSION as _ANFIS_VERSION
from .errors import ModelFormatError
from .mlp import MlpModel

__all__ = ["save_model", "load_model", "model_to_json"]


def model_to_json(model):
    """Serialized form, ending in a newline."""
    return json.dumps(model.to_dict(), indent=2) + "\n"


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(model_to_json(model))


def load_model(path):
    """Load any supported model file; raises ModelFormatError on trouble."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ModelFormatError(f"{path}: cannot read model file ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ModelFormatError(f"{path}: expected a JSON object at top level")

    version = raw.get("format_version")
    if version != _ANFIS_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format_version {version!r} "
            f"(this build reads version {_ANFIS_VERSION})")
    kind = raw.get("kind")
    try:
        if kind == "anfis":
            if raw.get("output_mode") == "oaa":
                return AnfisEnsemble.from_dict(raw)
            return AnfisModel.from_dict(raw)
        if kind == "mlp":
            return MlpModel.from_dict(raw)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed {kind} model ({exc})") from exc
    raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
