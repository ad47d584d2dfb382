from .node import NodeRecord, Position, Role, deduct, deploy
from .radio import RadioModel, aggregation_energy, distance, rx_energy, tx_energy
from .sim_config import (
    FailureInjection,
    FailureMode,
    Protocol,
    ScriptedKill,
    SimConfig,
    StatusReports,
)
from .utils import RngStreams, rng_streams
