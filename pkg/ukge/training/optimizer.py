from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ukge.models.embedding_model import ModelParams
from ukge.training.losses import Gradients

PARAM_NAMES = ("entity", "relation", "w", "b")


def _param_arrays(params: ModelParams) -> Dict[str, np.ndarray]:
    return {
        "entity": params.entity,
        "relation": params.relation,
        "w": np.array(params.w),
        "b": np.array(params.b),
    }


def _grad_arrays(grads: Gradients) -> Dict[str, np.ndarray]:
    return {
        "entity": grads.entity,
        "relation": grads.relation,
        "w": np.array(grads.w),
        "b": np.array(grads.b),
    }


@dataclass
class OptimizerState:
    """First/second moment estimates shaped like ModelParams, plus the step counter."""
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "OptimizerState":
        arrays = _param_arrays(params)
        return cls(
            m={k: np.zeros_like(a, dtype=np.float64) for k, a in arrays.items()},
            v={k: np.zeros_like(a, dtype=np.float64) for k, a in arrays.items()},
            step=0,
        )

    def copy(self) -> "OptimizerState":
        return OptimizerState(
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
            step=self.step,
        )


def adam_step(
    params: ModelParams,
    grads: Gradients,
    state: OptimizerState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.99,
    epsilon: float = 1e-8,
) -> Tuple[ModelParams, OptimizerState]:
    """
    One bias-corrected Adam update. Inputs are left untouched; the updated
    parameters and state are returned as new objects.
    """
    if not state.m:
        state = OptimizerState.zeros_like(params)
    current = _param_arrays(params)
    gradient = _grad_arrays(grads)

    step = state.step + 1
    bc1 = 1.0 - beta1 ** step
    bc2 = 1.0 - beta2 ** step

    updated: Dict[str, np.ndarray] = {}
    m_next: Dict[str, np.ndarray] = {}
    v_next: Dict[str, np.ndarray] = {}
    for k in PARAM_NAMES:
        g = gradient[k]
        if g.shape != current[k].shape:
            raise ValueError(f"gradient for '{k}' has shape {g.shape}, parameter has {current[k].shape}")
        m = beta1 * state.m[k] + (1.0 - beta1) * g
        v = beta2 * state.v[k] + (1.0 - beta2) * (g * g)
        m_next[k], v_next[k] = m, v
        updated[k] = current[k] - lr * (m / bc1) / (np.sqrt(v / bc2) + epsilon)

    new_params = ModelParams(
        updated["entity"],
        updated["relation"],
        w=float(updated["w"]),
        b=float(updated["b"]),
        variant=params.variant,
    )
    return new_params, OptimizerState(m=m_next, v=v_next, step=step)
