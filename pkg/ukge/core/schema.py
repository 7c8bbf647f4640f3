from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Variant(str, Enum):
    LOGISTIC = "logistic"
    RECTIFIER = "rectifier"


class Ablation(str, Enum):
    FULL = "full"
    NO_NEGATIVES = "no-negatives"
    NO_PSL = "no-psl"


class NormalizationMethod(str, Enum):
    LOG_MIN_MAX = "log-min-max"
    MIN_MAX = "min-max"
    IDENTITY = "identity"


class Gain(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


class Task(str, Enum):
    CONFIDENCE = "confidence"
    RANKING = "ranking"
    CLASSIFICATION = "classification"


class RelevancePool(str, Enum):
    ALL = "all"
    TEST = "test"


TripleKey = Tuple[int, int, int]


class WeightedTriple(BaseModel):
    """
    A single uncertain fact (head, relation, tail) with its confidence score.
    Ids are dense vocabulary indices; the score is raw until normalized.
    """
    model_config = ConfigDict(frozen=True)

    head: int = Field(..., ge=0)
    relation: int = Field(..., ge=0)
    tail: int = Field(..., ge=0)
    score: float

    @property
    def key(self) -> TripleKey:
        return (self.head, self.relation, self.tail)

    def with_score(self, score: float) -> "WeightedTriple":
        return WeightedTriple(head=self.head, relation=self.relation, tail=self.tail, score=score)


class ColumnSpec(BaseModel):
    """Where each field lives in a delimited triple line."""
    model_config = ConfigDict(frozen=True)

    head: int = Field(default=0, ge=0)
    relation: int = Field(default=1, ge=0)
    tail: int = Field(default=2, ge=0)
    score: int = Field(default=3, ge=0)
    delimiter: str = "\t"
    comment_prefix: str = "#"

    @property
    def min_fields(self) -> int:
        return max(self.head, self.relation, self.tail, self.score) + 1


class NormalizationSpec(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    method: NormalizationMethod = NormalizationMethod.IDENTITY
    lo: Optional[float] = None
    hi: Optional[float] = None
    floor: float = Field(default=0.1, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> "NormalizationSpec":
        if self.method == NormalizationMethod.LOG_MIN_MAX:
            if self.lo is None or self.hi is None:
                raise ValueError("log-min-max needs both lo and hi")
            if not (0 < self.lo < self.hi):
                raise ValueError(f"log-min-max needs 0 < lo < hi, got lo={self.lo}, hi={self.hi}")
        return self

    def describe(self) -> str:
        if self.method == NormalizationMethod.LOG_MIN_MAX:
            return f"{self.method.value}({self.lo}, {self.hi}, {self.floor})"
        if self.method == NormalizationMethod.MIN_MAX:
            return f"{self.method.value}({self.floor})"
        return self.method.value
