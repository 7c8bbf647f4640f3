"""
Embedding Model
---------------
Bilinear plausibility g(l) = sum_i r_i * h_i * t_i, mapped to a confidence
in [0, 1] through either a logistic or a bounded-rectifier function with a
learned scalar weight w and bias b.

Scalar entry points take a single (h, r, t); the *_batch variants take an
int array of shape (n, 3) and run the same arithmetic row-wise.
"""

from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from ukge.core.schema import Variant

ArrayLike = Union[float, np.ndarray]


class ModelParams:
    """Entity/relation matrices plus the confidence mapping (w, b)."""

    def __init__(
        self,
        entity: np.ndarray,
        relation: np.ndarray,
        w: float = 1.0,
        b: float = 0.0,
        variant: Variant = Variant.RECTIFIER,
    ):
        entity = np.ascontiguousarray(entity, dtype=np.float64)
        relation = np.ascontiguousarray(relation, dtype=np.float64)
        if entity.ndim != 2 or relation.ndim != 2:
            raise ValueError("embedding matrices must be 2-D")
        if entity.shape[1] != relation.shape[1] or entity.shape[1] < 1:
            raise ValueError(f"dimension mismatch: entity {entity.shape}, relation {relation.shape}")
        if not (np.all(np.isfinite(entity)) and np.all(np.isfinite(relation)) and np.isfinite(w) and np.isfinite(b)):
            raise ValueError("model parameters must be finite")
        self.entity = entity
        self.relation = relation
        self.w = float(w)
        self.b = float(b)
        self.variant = Variant(variant)

    @property
    def dim(self) -> int:
        return self.entity.shape[1]

    @property
    def num_entities(self) -> int:
        return self.entity.shape[0]

    @property
    def num_relations(self) -> int:
        return self.relation.shape[0]

    def snapshot(self) -> "ModelParams":
        return ModelParams(self.entity.copy(), self.relation.copy(), self.w, self.b, self.variant)

    def check_ids(self, triples: np.ndarray) -> None:
        if triples.size == 0:
            return
        heads, rels, tails = triples[:, 0], triples[:, 1], triples[:, 2]
        if (heads.min() < 0 or tails.min() < 0 or rels.min() < 0
                or max(heads.max(), tails.max()) >= self.num_entities or rels.max() >= self.num_relations):
            raise IndexError(
                f"triple ids out of range for {self.num_entities} entities / {self.num_relations} relations"
            )


def init_params(
    num_entities: int,
    num_relations: int,
    dim: int,
    variant: Variant,
    rng: np.random.Generator,
) -> ModelParams:
    """
    Mapping starts at w=1, b=0.

    Logistic: uniform on [-6/sqrt(k), 6/sqrt(k)].
    Rectifier: uniform on [0, c] with c = 2 * (0.5 / k) ** (1/3), so the
    initial plausibility is centred on 0.5 (spread about 0.6/sqrt(k)) and
    every triple starts where the rectifier has a nonzero slope.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if Variant(variant) == Variant.RECTIFIER:
        low, high = 0.0, rectifier_init_bound(dim)
    else:
        high = 6.0 / np.sqrt(dim)
        low = -high
    entity = rng.uniform(low, high, size=(num_entities, dim))
    relation = rng.uniform(low, high, size=(num_relations, dim))
    return ModelParams(entity, relation, w=1.0, b=0.0, variant=variant)


def rectifier_init_bound(dim: int) -> float:
    # E[sum_i r_i h_i t_i] = k * (c/2)^3 = 0.5
    return float(2.0 * (0.5 / dim) ** (1.0 / 3.0))


def as_triple_array(triples: Union[np.ndarray, Sequence[Tuple[int, int, int]]]) -> np.ndarray:
    arr = np.asarray(triples, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.shape[1] != 3:
        raise ValueError(f"expected triples of shape (n, 3), got {arr.shape}")
    return arr


def plausibility_batch(params: ModelParams, triples: np.ndarray) -> np.ndarray:
    triples = as_triple_array(triples)
    params.check_ids(triples)
    h = params.entity[triples[:, 0]]
    r = params.relation[triples[:, 1]]
    t = params.entity[triples[:, 2]]
    return np.sum(r * (h * t), axis=-1)


def plausibility(params: ModelParams, triple: Tuple[int, int, int]) -> float:
    return float(plausibility_batch(params, as_triple_array(triple))[0])


def map_logistic(x: ArrayLike, w: float, b: float) -> ArrayLike:
    # expit saturates cleanly instead of overflowing exp()
    return expit(w * x + b)


def map_rectifier(x: ArrayLike, w: float, b: float) -> ArrayLike:
    return np.minimum(np.maximum(w * x + b, 0.0), 1.0)


def apply_mapping(params: ModelParams, g: ArrayLike) -> ArrayLike:
    if params.variant == Variant.LOGISTIC:
        return map_logistic(g, params.w, params.b)
    return map_rectifier(g, params.w, params.b)


def mapping_slope(params: ModelParams, g: np.ndarray, f: np.ndarray) -> np.ndarray:
    """
    d f / d z where z = w*g + b. The rectifier uses subgradient 0 at and beyond both kinks.
    """
    if params.variant == Variant.LOGISTIC:
        return f * (1.0 - f)
    z = params.w * g + params.b
    return ((z > 0.0) & (z < 1.0)).astype(np.float64)


def confidence_batch(params: ModelParams, triples: np.ndarray) -> np.ndarray:
    return np.asarray(apply_mapping(params, plausibility_batch(params, triples)), dtype=np.float64)


def confidence(params: ModelParams, triple: Tuple[int, int, int]) -> float:
    return float(confidence_batch(params, as_triple_array(triple))[0])


def tail_confidences(params: ModelParams, head: int, relation: int) -> np.ndarray:
    """Confidence of (head, relation, e) for every entity e, indexed by entity id."""
    if not (0 <= head < params.num_entities and 0 <= relation < params.num_relations):
        raise IndexError(f"query ({head}, {relation}, ?) out of range")
    hr = params.entity[head] * params.relation[relation]
    g = params.entity @ hr
    return np.asarray(apply_mapping(params, g), dtype=np.float64)
