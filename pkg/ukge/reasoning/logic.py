"""
Lukasiewicz operators over soft truth values in [0, 1].

    a AND b  = max(0, a + b - 1)
    a OR b   = min(1, a + b)
    NOT a    = 1 - a
    body -> head = min(1, 1 - body + head)
    distance to satisfaction = max(0, body - head)

The negation prior on an unseen fact l has distance f(l).
"""

import math

from ukge.core.errors import DomainError


def _check(*values: float) -> None:
    for v in values:
        if not (0.0 <= v <= 1.0) or math.isnan(v):
            raise DomainError(f"soft truth value {v} outside [0, 1]")


def luk_and(a: float, b: float) -> float:
    _check(a, b)
    return max(0.0, a + b - 1.0)


def luk_or(a: float, b: float) -> float:
    _check(a, b)
    return min(1.0, a + b)


def luk_neg(a: float) -> float:
    _check(a)
    return 1.0 - a


def rule_value(body_value: float, head_value: float) -> float:
    _check(body_value, head_value)
    # min(1, 1 - body + head), written so the value is 1 exactly when the distance is 0
    return 1.0 - max(0.0, body_value - head_value)


def distance_to_satisfaction(body_value: float, head_value: float) -> float:
    """Zero exactly when head_value >= body_value."""
    _check(body_value, head_value)
    return max(0.0, body_value - head_value)


def prior_rule_distance(head_confidence: float) -> float:
    _check(head_confidence)
    return head_confidence
