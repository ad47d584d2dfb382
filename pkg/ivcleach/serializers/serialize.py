from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

from ivcleach.utils import write_text

INFO = "[INFO] {}"


class Serialize(ABC):
    """
    Base class of every text artifact written from a simulation.

    A concrete class turns its input (a SimResult, a ComparisonReport...)
    into a string in get_result(); save() writes that string with "\\n"
    line endings so identical inputs always give identical bytes.
    """

    def __init__(self, source):
        self.source = source
        self.check()

    def check(self):
        """Reject inputs the format cannot represent."""

    @abstractmethod
    def get_result(self) -> str:
        pass

    def save(self, output_path: Union[str, Path]) -> Path:
        return write_text(self.get_result(), Path(output_path))
