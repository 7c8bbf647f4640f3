import itertools
import json
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ukge.core.errors import ConfigError
from ukge.core.schema import Ablation, Variant

LEARNING_RATES = (0.001, 0.005, 0.01)
DIMENSIONS = (64, 128, 256, 512)
BATCH_SIZES = (128, 256, 512, 1024)


class TrainConfig(BaseModel):
    """
    Training hyperparameters. Config files use exactly these keys.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=0.001, gt=0.0)
    dim: int = Field(default=128, ge=1)
    batch_size: int = Field(default=128, ge=1)
    l2_lambda: float = Field(default=0.005, ge=0.0)
    negatives_per_positive: int = Field(default=2, ge=1)
    variant: Variant = Variant.RECTIFIER
    ablation: Ablation = Ablation.FULL
    adam_beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    adam_beta2: float = Field(default=0.99, gt=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, gt=0.0)
    max_epochs: int = Field(default=2000, ge=1)
    eval_every: int = Field(default=10, ge=1)
    patience: int = Field(default=5, ge=1)
    seed: int = 0
    log_wall_time: bool = False


def parse_overrides(pairs: Sequence[str]) -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"override '{pair}' is not of the form key=value")
        overrides[key.strip().replace("-", "_")] = value.strip()
    return overrides


def load_config(path: Optional[Path] = None, overrides: Sequence[str] = ()) -> TrainConfig:
    """Read a JSON config file (optional) and apply key=value overrides on top."""
    values: Dict[str, Any] = {}
    if path is not None:
        try:
            values = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})")
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
    values.update(parse_overrides(overrides))
    try:
        return TrainConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"invalid training config: {e}")


def hyperparameter_grid(base: TrainConfig) -> Iterator[TrainConfig]:
    """Every (lr, k, batch size) combination of the standard search grid; nothing is run."""
    for lr, dim, batch in itertools.product(LEARNING_RATES, DIMENSIONS, BATCH_SIZES):
        yield base.model_copy(update={"learning_rate": lr, "dim": dim, "batch_size": batch})
