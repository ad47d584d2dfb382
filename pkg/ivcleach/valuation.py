"""Heuristic node value: (R + D + C) * P.

Each input is binned into a crisp level: remaining energy R (low 0.2,
medium 0.4, high 0.6), distance from the base station D (close 0.2,
medium 0.1, far 0.0), position in the cluster C (center 0.2, side 0.1).
P halves the sum for a node that was CH in the previous round.
"""
from enum import Enum
from typing import Sequence

import numpy as np
from pydantic import BaseModel, validator

from ivcleach.core import Position, distance
from ivcleach.errors import DomainError

ENERGY_MED, ENERGY_HIGH = 0.40, 0.70
DISTANCE_MED, DISTANCE_FAR = 1 / 3, 2 / 3
CENTER_RADIUS = 0.5  # share of the cluster radius that still counts as center

MIN_SCORE, MAX_SCORE = 0.15, 1.0
SCORE_DIGITS = 10


class Centrality(Enum):
    center = "Center"
    side = "Side"


def _check_fraction(name, v):
    if not (0.0 <= v <= 1.0):  # also rejects NaN
        raise DomainError(f"{name} must be in [0, 1], got {v}")


def energy_level(r_frac: float) -> float:
    _check_fraction("r_frac", r_frac)
    if r_frac < ENERGY_MED:
        return 0.2
    if r_frac < ENERGY_HIGH:
        return 0.4
    return 0.6


def distance_level(d_frac: float) -> float:
    _check_fraction("d_frac", d_frac)
    if d_frac < DISTANCE_MED:
        return 0.2
    if d_frac < DISTANCE_FAR:
        return 0.1
    return 0.0


def centrality_level(c: Centrality) -> float:
    return 0.2 if c == Centrality.center else 0.1


def prev_ch_multiplier(was_ch_prev: bool) -> float:
    return 0.5 if was_ch_prev else 1.0


def score(r_frac, d_frac, centrality, was_ch_prev) -> float:
    total = energy_level(r_frac) + distance_level(d_frac) + centrality_level(centrality)
    # drop float noise so scores compare equal to the table values
    return round(total * prev_ch_multiplier(was_ch_prev), SCORE_DIGITS)


class ValuationInputs(BaseModel):
    r_frac: float
    d_frac: float
    centrality: Centrality
    was_ch_prev: bool = False

    @validator("r_frac", "d_frac")
    def fraction_must_be_in_unit_range(cls, v):
        if not (0.0 <= v <= 1.0):
            raise ValueError("must be in [0, 1]")
        return v


class NodeValue(BaseModel):
    score: float

    @validator("score")
    def score_must_be_reachable(cls, v):
        if not MIN_SCORE <= v <= MAX_SCORE:
            raise ValueError(f"score must be in [{MIN_SCORE}, {MAX_SCORE}]")
        return v


def node_value(inputs: ValuationInputs) -> NodeValue:
    return NodeValue(
        score=score(
            inputs.r_frac, inputs.d_frac, inputs.centrality, inputs.was_ch_prev
        )
    )


def max_bs_distance(bs: Position, area_width: float, area_height: float) -> float:
    if not (area_width > 0 and area_height > 0):
        raise DomainError("field must have a positive width and height")
    corners = [
        Position(x=0.0, y=0.0),
        Position(x=area_width, y=0.0),
        Position(x=0.0, y=area_height),
        Position(x=area_width, y=area_height),
    ]
    return max(distance(bs, corner) for corner in corners)


def normalize_bs_distance(
    pos: Position, bs: Position, area_width: float, area_height: float
) -> float:
    """Distance to the BS as a share of the BS's farthest field corner."""
    reach = max_bs_distance(bs, area_width, area_height)
    if reach == 0:
        raise DomainError("field must have a positive width and height")
    return min(1.0, distance(pos, bs) / reach)


def _center_zone(points: np.ndarray):
    """Centroid of `points` and the distance within which a point is central."""
    if len(points) == 0:
        raise DomainError("cluster must not be empty")
    centroid = points.mean(axis=0)
    radius = np.hypot(points[:, 0] - centroid[0], points[:, 1] - centroid[1]).max()
    return centroid, CENTER_RADIUS * radius


def centrality_flags(points: np.ndarray) -> np.ndarray:
    """True (center) for each row of `points` within half the cluster radius."""
    centroid, limit = _center_zone(points)
    return np.hypot(points[:, 0] - centroid[0], points[:, 1] - centroid[1]) <= limit


def classify_centrality(pos: Position, cluster_members: Sequence[Position]) -> Centrality:
    centroid, limit = _center_zone(np.array([[p.x, p.y] for p in cluster_members]))
    d = np.hypot(pos.x - centroid[0], pos.y - centroid[1])
    return Centrality.center if d <= limit else Centrality.side
