"""Self-describing model checkpoints.

A checkpoint carries the model config, the training seed, the feature
schema digest, and the parameter tensors. Loading rebuilds the model from
the embedded config and refuses a mismatched feature schema, so weights can
never silently pair with reordered feature columns.
"""

from __future__ import annotations

from dataclasses import asdict
from pathlib import Path
from typing import Optional

import torch
from torch import nn

from ..errors import SchemaError
from ..features.schema import default_schema_hash
from .config import ModelConfig

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path,
    model: nn.Module,
    config: ModelConfig,
    train_seed: int,
    schema_hash: Optional[str] = None,
) -> None:
    payload = {
        "format_version": FORMAT_VERSION,
        "config": asdict(config),
        "train_seed": int(train_seed),
        "schema_hash": schema_hash or default_schema_hash(),
        "state_dict": model.state_dict(),
    }
    torch.save(payload, str(path))


def load_checkpoint(
    path: str | Path, schema_hash: Optional[str] = None
) -> tuple[nn.Module, ModelConfig, int]:
    """Rebuild the model from its embedded config and load the weights."""
    from . import build_model

    payload = torch.load(str(path), map_location="cpu", weights_only=False)
    if payload.get("format_version") != FORMAT_VERSION:
        raise SchemaError(
            f"{path}: unsupported checkpoint format "
            f"{payload.get('format_version')!r}"
        )
    expected = schema_hash or default_schema_hash()
    if payload["schema_hash"] != expected:
        raise SchemaError(
            f"{path}: checkpoint feature schema {payload['schema_hash'][:12]} "
            f"does not match current schema {expected[:12]}"
        )
    config = ModelConfig(**payload["config"])
    model = build_model(config)
    model.load_state_dict(payload["state_dict"], strict=True)
    return model, config, payload["train_seed"]
