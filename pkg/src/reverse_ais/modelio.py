"""JSON model documents and dataset loading."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .idx import IDX_IMAGE_MAGIC, read_idx_images
from .models import BinaryRbm, TwoLayerDbm, TwoLayerDbn, as_bits


def _rbm_fields(m: BinaryRbm):
    return {"visible_bias": m.visible_bias.tolist(), "hidden_bias": m.hidden_bias.tolist(),
            "weights": m.weights.tolist()}


def model_to_dict(model) -> dict:
    if isinstance(model, BinaryRbm):
        return {"type": "rbm", **_rbm_fields(model)}
    if isinstance(model, TwoLayerDbm):
        return {"type": "dbm2", "visible_bias": model.visible_bias.tolist(),
                "hidden_bias_1": model.hidden_bias_1.tolist(), "hidden_bias_2": model.hidden_bias_2.tolist(),
                "weights_1": model.weights_1.tolist(), "weights_2": model.weights_2.tolist()}
    if isinstance(model, TwoLayerDbn):
        return {"type": "dbn2", "top_rbm": _rbm_fields(model.top_rbm),
                "directed_weights": model.directed_weights.tolist(),
                "directed_visible_bias": model.directed_visible_bias.tolist(),
                "recognition_bias": model.recognition_bias.tolist()}
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _rbm_from(doc):
    return BinaryRbm(doc["visible_bias"], doc["hidden_bias"], doc["weights"])


def model_from_dict(doc: dict):
    """Build a model from its JSON document; inconsistent dimensions raise ``ValueError``."""
    kind = doc.get("type")
    try:
        if kind == "rbm":
            return _rbm_from(doc)
        if kind == "dbm2":
            return TwoLayerDbm(doc["visible_bias"], doc["hidden_bias_1"], doc["hidden_bias_2"],
                               doc["weights_1"], doc["weights_2"])
        if kind == "dbn2":
            return TwoLayerDbn(_rbm_from(doc["top_rbm"]), doc["directed_weights"],
                               doc["directed_visible_bias"], doc.get("recognition_bias"))
    except KeyError as e:
        raise ValueError(f"model document is missing field {e.args[0]!r}") from None
    raise ValueError(f"unknown model type {kind!r}")


def dumps_model(model) -> str:
    return json.dumps(model_to_dict(model), indent=1) + "\n"


def save_model(model, path):
    Path(path).write_text(dumps_model(model))


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))


def model_id(path) -> str:
    """Content hash of a model file, so ids do not depend on where the file lives."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:12]


def load_dataset(path) -> np.ndarray:
    """Binary examples from an IDX image file, a ``.npy`` array, or a text file of 0/1 rows."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) >= 4 and int.from_bytes(raw[:4], "big") == IDX_IMAGE_MAGIC:
        return read_idx_images(path)
    if path.suffix == ".npy":
        return as_bits(np.load(path), name="dataset")
    rows = [[int(c) for c in line.split()] for line in raw.decode().splitlines() if line.strip()]
    return as_bits(np.array(rows), name="dataset")
