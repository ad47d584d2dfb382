import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, root_validator, validator

from ivcleach.errors import DeadNodeCharge


class Role(Enum):
    ch = "CH"
    chv = "CHv"
    chsec = "CHsec"
    chsecv = "CHsecv"
    normal = "Normal"


class Position(BaseModel):
    x: float
    y: float

    class Config:
        allow_mutation = False

    @validator("*")
    def coordinate_must_be_finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("coordinate must be finite")
        return v


class NodeRecord(BaseModel):
    id: int
    pos: Position
    initial_energy: float
    residual_energy: float
    alive: bool = True
    role: Role = Role.normal
    cluster_id: Optional[int] = None
    was_ch_prev_round: bool = False

    @validator("initial_energy")
    def initial_energy_must_be_positive(cls, v):
        if not v > 0:
            raise ValueError("initial energy must be > 0")
        return v

    @validator("residual_energy")
    def residual_must_fit_battery(cls, v, values):
        if v < 0:
            raise ValueError("residual energy must not be negative")
        if "initial_energy" in values and v > values["initial_energy"]:
            raise ValueError("residual energy must not exceed initial energy")
        return v

    @root_validator(skip_on_failure=True)
    def dead_exactly_when_empty(cls, values):
        if values["alive"] != (values["residual_energy"] > 0):
            raise ValueError("a node is alive exactly when its residual energy is > 0")
        if not values["alive"] and (
            values["role"] != Role.normal or values["cluster_id"] is not None
        ):
            raise ValueError("a dead node must be Normal and outside any cluster")
        return values

    @property
    def r_frac(self):
        return min(1.0, self.residual_energy / self.initial_energy)

    def retire(self):
        self.residual_energy = 0.0
        self.alive = False
        self.role = Role.normal
        self.cluster_id = None


def deduct(node: NodeRecord, cost: float) -> NodeRecord:
    """Charge `cost` joules to `node` in place and return it.

    The charge is applied first and death evaluated after, so a node may
    complete the action that empties it.
    """
    if not node.alive:
        raise DeadNodeCharge(node.id)
    if cost < 0:
        raise ValueError(f"cost must be >= 0, got {cost}")
    residual = node.residual_energy - cost
    if residual > 0:
        node.residual_energy = residual
    else:
        node.retire()
    return node


def deploy(config, rng) -> List[NodeRecord]:
    """Scatter `config.n_nodes` fresh nodes uniformly over the field."""
    xs = rng.uniform(0.0, config.area_width, size=config.n_nodes)
    ys = rng.uniform(0.0, config.area_height, size=config.n_nodes)
    return [
        NodeRecord(
            id=i,
            pos=Position(x=float(x), y=float(y)),
            initial_energy=config.initial_energy,
            residual_energy=config.initial_energy,
        )
        for i, (x, y) in enumerate(zip(xs, ys))
    ]
