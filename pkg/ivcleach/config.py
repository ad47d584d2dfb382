"""Built-in defaults and configuration loading.

The defaults describe the reference simulation setup: 100 nodes on a
100 x 100 m field, base station at (100, 50), 0.5 J per node and 2500
rounds. Radio constants are the usual first-order radio model values.
"""
import logging
from pathlib import Path
from typing import Dict, Optional, Union

import yaml
from pydantic import ValidationError

from ivcleach.errors import ConfigError
from ivcleach.utils import load_yaml


def _mkdir(path):
    if path.is_dir():
        return path
    path.mkdir(exist_ok=True, parents=True)
    return path


# Field
AREA_WIDTH = 100.0
AREA_HEIGHT = 100.0
BS_X = 100.0
BS_Y = 50.0

# Network
N_NODES = 100
INITIAL_ENERGY = 0.5  # joules
MAX_ROUNDS = 2500
K_CLUSTERS = 5
LEACH_P = 0.05
SEED = 0

# First-order radio model
E_ELEC = 50e-9  # J/bit
EPS_FS = 10e-12  # J/bit/m^2
EPS_MP = 0.0013e-12  # J/bit/m^4
E_DA = 5e-9  # J/bit/signal
DATA_BITS = 4000
CTRL_BITS = 200

# Output
OUTPUT_PATH = Path("ivcleach-out")

RADIO_KEYS = ("e_elec", "eps_fs", "eps_mp", "e_da", "data_bits", "ctrl_bits")
FLAT_KEYS = (
    "area_width",
    "area_height",
    "n_nodes",
    "bs_x",
    "bs_y",
    "initial_energy",
    "max_rounds",
    "k_clusters",
    "protocol",
    "leach_p",
    "seed",
    "fail_prob",
    "kills",
    "status_reports",
    "leach_setup_messages",
) + RADIO_KEYS

MANIFEST_KEY = "ivcleach_version"


def read_config_file(path: Union[str, Path]) -> Dict:
    """Read a flat key-value config file (YAML mapping, `#` comments allowed).

    A run manifest is accepted too; its `config` section is returned.
    """
    path = Path(path)
    try:
        data = load_yaml(path)
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}")
    except yaml.YAMLError as e:
        raise ConfigError("config", f"cannot parse {path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must contain `key: value` lines")
    if MANIFEST_KEY in data:
        data = data.get("config") or {}
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(str(key), "nested values are not supported")
    return data


def parse_kill(entry) -> Dict:
    """Parse `ROUND:NODE` or `ROUND:NODE:SLOT` into a scripted kill."""
    parts = str(entry).split(":")
    if len(parts) not in (2, 3):
        raise ConfigError("kills", f"`{entry}` is not ROUND:NODE[:SLOT]")
    try:
        numbers = [int(p) for p in parts]
    except ValueError:
        raise ConfigError("kills", f"`{entry}` is not ROUND:NODE[:SLOT]")
    kill = {"round": numbers[0], "node_id": numbers[1]}
    if len(numbers) == 3:
        kill["slot"] = numbers[2]
    return kill


def build_config(values: Dict):
    """Turn a flat mapping into a validated SimConfig."""
    from ivcleach.core.sim_config import SimConfig

    unknown = sorted(set(values) - set(FLAT_KEYS))
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")

    values = dict(values)
    kwargs = {}
    radio = {key: values.pop(key) for key in RADIO_KEYS if key in values}
    if radio:
        kwargs["radio"] = radio
    if "bs_x" in values or "bs_y" in values:
        kwargs["bs_pos"] = {
            "x": values.pop("bs_x", BS_X),
            "y": values.pop("bs_y", BS_Y),
        }
    fail_prob = values.pop("fail_prob", None)
    kills = values.pop("kills", None)
    if fail_prob and kills:
        raise ConfigError("fail_prob", "use either fail_prob or kills, not both")
    if fail_prob:
        kwargs["failure_injection"] = {"mode": "probabilistic", "probability": fail_prob}
    elif kills:
        if isinstance(kills, str):
            kills = [kills]
        kwargs["failure_injection"] = {
            "mode": "scripted",
            "kills": [parse_kill(kill) for kill in kills],
        }
    kwargs.update(values)

    try:
        return SimConfig(**kwargs)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [str(part) for part in error["loc"] if part != "__root__"]
        msg = error["msg"]
        key = loc[-1] if loc else msg.split(" ", 1)[0]
        raise ConfigError(key, msg)


def load_config(
    config_file: Optional[Union[str, Path]] = None, overrides: Optional[Dict] = None
):
    """Resolve a SimConfig: flags override file values override built-in defaults."""
    values = {}
    if config_file:
        values.update(read_config_file(config_file))
        logging.debug(f"Loaded config file {config_file}")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(values)


def config_to_flat(config) -> Dict:
    """Inverse of build_config; the result reloads into an identical SimConfig."""
    flat = {
        "area_width": config.area_width,
        "area_height": config.area_height,
        "n_nodes": config.n_nodes,
        "bs_x": config.bs_pos.x,
        "bs_y": config.bs_pos.y,
        "initial_energy": config.initial_energy,
        "max_rounds": config.max_rounds,
        "k_clusters": config.k_clusters,
        "protocol": config.protocol.value,
        "leach_p": config.leach_p,
        "seed": config.seed,
        "status_reports": config.status_reports.value,
        "leach_setup_messages": config.leach_setup_messages,
    }
    for key in RADIO_KEYS:
        flat[key] = getattr(config.radio, key)
    failures = config.failure_injection
    if failures.mode.value == "probabilistic":
        flat["fail_prob"] = failures.probability
    elif failures.mode.value == "scripted":
        flat["kills"] = [kill.label() for kill in failures.kills]
    return flat
