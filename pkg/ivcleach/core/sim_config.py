from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, root_validator, validator

from ivcleach import config as defaults
from .node import Position
from .radio import RadioModel

MAX_SEED = 2 ** 64


class Protocol(Enum):
    leach = "LEACH"
    ivc = "IVC"


class StatusReports(Enum):
    every_round = "every_round"
    piggyback = "piggyback"


class FailureMode(Enum):
    none = "none"
    probabilistic = "probabilistic"
    scripted = "scripted"


class ScriptedKill(BaseModel):
    round: int
    node_id: int
    slot: Optional[int] = None  # TDMA slot of the node's cluster; None = steady-state start

    @validator("round")
    def round_must_be_positive(cls, v):
        if v < 1:
            raise ValueError("kill round must be >= 1")
        return v

    @validator("node_id", "slot")
    def must_not_be_neg(cls, v):
        if v is not None and v < 0:
            raise ValueError("kill node id and slot must be >= 0")
        return v

    def label(self):
        if self.slot is None:
            return f"{self.round}:{self.node_id}"
        return f"{self.round}:{self.node_id}:{self.slot}"


class FailureInjection(BaseModel):
    mode: FailureMode = FailureMode.none
    probability: float = 0.0
    kills: List[ScriptedKill] = []

    @root_validator(skip_on_failure=True)
    def mode_must_have_its_payload(cls, values):
        mode = values["mode"]
        if mode == FailureMode.probabilistic and not 0 < values["probability"] <= 1:
            raise ValueError("fail_prob must be in (0, 1]")
        if mode == FailureMode.scripted and not values["kills"]:
            raise ValueError("kills must list at least one ROUND:NODE entry")
        return values

    @classmethod
    def probabilistic(cls, p):
        return cls(mode=FailureMode.probabilistic, probability=p)

    @classmethod
    def scripted(cls, kills):
        return cls(
            mode=FailureMode.scripted,
            kills=[
                kill if isinstance(kill, ScriptedKill) else ScriptedKill(**kill)
                for kill in kills
            ],
        )

    def kills_at(self, round_index, slot=None):
        """Node ids scripted to die in `round_index` at `slot` (None = round start)."""
        return [
            kill.node_id
            for kill in self.kills
            if kill.round == round_index and kill.slot == slot
        ]


class SimConfig(BaseModel):
    area_width: float = defaults.AREA_WIDTH
    area_height: float = defaults.AREA_HEIGHT
    n_nodes: int = defaults.N_NODES
    bs_pos: Position = Position(x=defaults.BS_X, y=defaults.BS_Y)
    initial_energy: float = defaults.INITIAL_ENERGY
    max_rounds: int = defaults.MAX_ROUNDS
    k_clusters: int = defaults.K_CLUSTERS
    radio: RadioModel = Field(default_factory=RadioModel)
    protocol: Protocol = Protocol.ivc
    leach_p: float = defaults.LEACH_P
    seed: int = defaults.SEED
    failure_injection: FailureInjection = Field(default_factory=FailureInjection)
    status_reports: StatusReports = StatusReports.every_round
    leach_setup_messages: bool = True

    class Config:
        allow_mutation = False

    @validator("area_width", "area_height", "initial_energy")
    def must_be_positive(cls, v):
        if not v > 0:
            raise ValueError("must be > 0")
        return v

    @validator("n_nodes", "max_rounds")
    def count_must_be_positive(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @validator("leach_p")
    def probability_must_be_in_range(cls, v):
        if not 0 < v <= 1:
            raise ValueError("must be in (0, 1]")
        return v

    @validator("seed")
    def seed_must_fit_64_bits(cls, v):
        if not 0 <= v < MAX_SEED:
            raise ValueError("must be an unsigned 64-bit integer")
        return v

    @root_validator(skip_on_failure=True)
    def cross_checks(cls, values):
        if not 1 <= values["k_clusters"] <= values["n_nodes"]:
            raise ValueError("k_clusters must be between 1 and n_nodes")
        for kill in values["failure_injection"].kills:
            if kill.node_id >= values["n_nodes"]:
                raise ValueError(f"kills references unknown node {kill.node_id}")
        return values

    def with_(self, **changes):
        """Validated copy with `changes` applied."""
        data = self.dict()
        data.update(changes)
        return SimConfig(**data)
