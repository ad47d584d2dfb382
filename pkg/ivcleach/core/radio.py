"""First-order radio model.

Transmitting k bits over d meters costs e_elec*k + eps_fs*k*d^2 below the
crossover distance d0 and e_elec*k + eps_mp*k*d^4 from d0 on. Receiving costs
e_elec*k and fusing n signals of k bits costs e_da*k*n.
"""
import math

from pydantic import BaseModel, validator

from ivcleach import config as defaults
from .node import Position

D0_TOLERANCE = 1e-12


class RadioModel(BaseModel):
    e_elec: float = defaults.E_ELEC
    eps_fs: float = defaults.EPS_FS
    eps_mp: float = defaults.EPS_MP
    e_da: float = defaults.E_DA
    data_bits: int = defaults.DATA_BITS
    ctrl_bits: int = defaults.CTRL_BITS
    d0: float = None

    class Config:
        allow_mutation = False

    @validator("e_elec", "eps_fs", "eps_mp", "e_da", "data_bits", "ctrl_bits")
    def constant_must_be_positive(cls, v):
        if not v > 0:
            raise ValueError("radio constants must be > 0")
        return v

    @validator("d0", pre=True, always=True)
    def d0_must_match_amplifiers(cls, v, values):
        if "eps_fs" not in values or "eps_mp" not in values:
            return v
        d0 = math.sqrt(values["eps_fs"] / values["eps_mp"])
        if v is None:
            return d0
        if abs(v - d0) > D0_TOLERANCE * d0:
            raise ValueError(f"d0 must equal sqrt(eps_fs/eps_mp) = {d0}")
        return v


def distance(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def tx_energy(model: RadioModel, bits: int, d: float) -> float:
    if bits < 0 or d < 0:
        raise ValueError("bits and distance must be >= 0")
    if d < model.d0:
        return bits * (model.e_elec + model.eps_fs * d * d)
    return bits * (model.e_elec + model.eps_mp * d ** 4)


def rx_energy(model: RadioModel, bits: int) -> float:
    if bits < 0:
        raise ValueError("bits must be >= 0")
    return model.e_elec * bits


def aggregation_energy(model: RadioModel, bits: int, signals: int) -> float:
    return model.e_da * bits * signals
