class IvcLeachError(Exception):
    """Base class of every error raised by ivcleach."""


class ConfigError(IvcLeachError):
    def __init__(self, key, message):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")


class DomainError(IvcLeachError, ValueError):
    """An input lies outside the domain of a valuation or clustering operation."""


class DeadNodeCharge(IvcLeachError):
    """Energy was charged to a node that is already dead."""

    def __init__(self, node_id):
        self.node_id = node_id
        super().__init__(f"dead-node-charge: node {node_id} is dead")


class PlanMismatch(IvcLeachError):
    """A round plan does not agree with the current node liveness."""


class SimulationError(IvcLeachError):
    """A run broke one of its per-round invariants."""


class ReportError(IvcLeachError):
    def __init__(self, message, path=None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
