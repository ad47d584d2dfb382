from ivcleach.core import Protocol
from .base import (
    BaseProtocol,
    EnergyLedger,
    EventKind,
    LedgerEntry,
    RoundEvent,
    RoundOutcome,
    RoundPlan,
    SteadyStateOutcome,
)
from .ivc import IVCProtocol, ivc_configuration, ivc_steady_state
from .leach import LeachProtocol, leach_elect, leach_setup, leach_steady_state

PROTOCOLS = {Protocol.leach: LeachProtocol, Protocol.ivc: IVCProtocol}


def get_protocol(config, record=False) -> BaseProtocol:
    return PROTOCOLS[config.protocol](config, record=record)
