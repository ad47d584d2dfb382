from pathlib import Path
from typing import Union

from .serialize import Serialize

HEADER = "round\tkind\tsubject\tdetail"


class EventLog(Serialize):
    """Tab-separated event log, one RoundEvent per line in emission order."""

    def get_result(self):
        lines = [HEADER] + [event.line() for event in self.source.events]
        return "\n".join(lines) + "\n"


def write_events(result, path: Union[str, Path]) -> Path:
    return EventLog(result).save(path)
