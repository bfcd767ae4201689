"""Versioned ``.npz`` checkpoints for both model kinds."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .da import DaModel
from .nade import NadeModel

FORMAT_VERSION = 1


def save_checkpoint(model, path, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {k: np.asarray(v, dtype=np.float64) for k, v in model.params().items()}
    if isinstance(model, DaModel):
        kind = "da"
        extra = {"corruption": model.corruption, "learning_rate": model.learning_rate,
                 "corruption_mode": model.corruption_mode}
    elif isinstance(model, NadeModel):
        kind = "nade"
        arrays["ordering"] = model.ordering.astype(np.int64)
        extra = {"learning_rate": model.learning_rate}
    else:
        raise TypeError(f"cannot checkpoint {type(model).__name__}")
    header = {"version": FORMAT_VERSION, "kind": kind, "hyper": extra, "meta": meta or {}}
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    return path


def load_checkpoint(path):
    """Returns ``(model, meta)``."""
    with np.load(Path(path), allow_pickle=False) as z:
        header = json.loads(str(z["header"]))
        if header.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header.get('version')}")
        arrays = {k: z[k] for k in z.files if k != "header"}
    hyper = header["hyper"]
    if header["kind"] == "da":
        model = DaModel(**{k: arrays[k] for k in DaModel.PARAMS}, **hyper)
    elif header["kind"] == "nade":
        model = NadeModel(**{k: arrays[k] for k in NadeModel.PARAMS},
                          ordering=arrays["ordering"], **hyper)
    else:
        raise ValueError(f"unknown model kind {header['kind']!r}")
    return model, header["meta"]
