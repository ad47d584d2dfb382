import math

import numpy as np
import pytest
from pydantic import ValidationError

from ivcleach.core import Position, RadioModel, distance, rx_energy, tx_energy
from ivcleach.core.radio import aggregation_energy


@pytest.fixture(scope="module")
def radio():
    return RadioModel()


@pytest.mark.parametrize(
    "a,b,expected",
    [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 5.0), ((0, 0), (100, 50), 111.80339887)],
)
def test_distance(a, b, expected):
    d = distance(Position(x=a[0], y=a[1]), Position(x=b[0], y=b[1]))
    assert d == pytest.approx(expected, abs=1e-8)


def test_distance_is_a_metric():
    rng = np.random.default_rng(11)
    for _ in range(500):
        p, q, r = (Position(x=x, y=y) for x, y in rng.uniform(0, 100, size=(3, 2)))
        assert distance(p, q) >= 0
        assert distance(p, q) == distance(q, p)
        assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-12


def test_default_constants(radio):
    assert radio.e_elec == 50e-9
    assert radio.data_bits == 4000
    assert radio.ctrl_bits == 200
    assert radio.d0 == pytest.approx(math.sqrt(10e-12 / 0.0013e-12))


def test_tx_energy(radio):
    assert tx_energy(radio, 0, 50.0) == 0
    assert tx_energy(radio, 4000, 0.0) == pytest.approx(2.0e-4, rel=1e-12)


def test_tx_energy_is_continuous_at_d0(radio):
    bits, d0 = 4000, radio.d0
    free_space = bits * (radio.e_elec + radio.eps_fs * d0 ** 2)
    multipath = bits * (radio.e_elec + radio.eps_mp * d0 ** 4)
    assert free_space == pytest.approx(multipath, rel=1e-12)
    assert tx_energy(radio, bits, d0) == pytest.approx(free_space, rel=1e-12)


def test_tx_energy_is_monotone(radio):
    distances = np.linspace(0, 200, 401)
    costs = [tx_energy(radio, 4000, float(d)) for d in distances]
    assert all(a <= b for a, b in zip(costs, costs[1:]))
    assert tx_energy(radio, 200, 30.0) < tx_energy(radio, 4000, 30.0)


@pytest.mark.parametrize("bits,expected", [(0, 0.0), (4000, 2.0e-4), (200, 1.0e-5)])
def test_rx_energy(radio, bits, expected):
    assert rx_energy(radio, bits) == pytest.approx(expected, rel=1e-12)


def test_aggregation_energy(radio):
    assert aggregation_energy(radio, 4000, 3) == pytest.approx(3 * 4000 * 5e-9)


def test_negative_inputs_are_rejected(radio):
    with pytest.raises(ValueError):
        tx_energy(radio, -1, 10.0)
    with pytest.raises(ValueError):
        tx_energy(radio, 10, -1.0)
    with pytest.raises(ValueError):
        rx_energy(radio, -1)


def test_inconsistent_d0_is_rejected():
    with pytest.raises(ValidationError):
        RadioModel(d0=80.0)
    assert RadioModel(d0=math.sqrt(10e-12 / 0.0013e-12)).d0 > 87


def test_radio_constants_must_be_positive():
    with pytest.raises(ValidationError):
        RadioModel(e_elec=0.0)
