from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Union

from pydantic import BaseModel

from ivcleach import __version__
from ivcleach.config import MANIFEST_KEY, config_to_flat
from ivcleach.utils import dump_yaml


class RunManifest(BaseModel):
    """What was run, by which version, and where its artifacts go.

    `config` is the flat form of the resolved SimConfig; feeding the manifest
    back through `--config` reproduces the run.
    """

    config: Dict
    ivcleach_version: str = __version__
    timestamp: str
    outputs: Dict[str, str] = {}

    @classmethod
    def of(cls, config, outputs=None):
        return cls(
            config=config_to_flat(config),
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            outputs={name: str(path) for name, path in (outputs or {}).items()},
        )


def write_manifest(manifest: RunManifest, path: Union[str, Path]) -> Path:
    data = {
        MANIFEST_KEY: manifest.ivcleach_version,
        "timestamp": manifest.timestamp,
        "config": manifest.config,
        "outputs": manifest.outputs,
    }
    return dump_yaml(data, Path(path))
