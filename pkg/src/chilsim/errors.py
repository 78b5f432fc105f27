"""Exception types shared across the simulator, protocol, and CLI."""


class ChilsimError(Exception):
    """Base class for all package errors."""


class ConfigError(ChilsimError):
    """Invalid scenario or controller configuration."""


class SimulationDiverged(ChilsimError):
    """Plant state became non-finite (dt too large for the chosen L, C)."""

    def __init__(self, step_index, detail=""):
        self.step_index = step_index
        msg = f"non-finite plant state after step {step_index}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ProtocolError(ChilsimError):
    """Base class for wire-protocol failures."""


class FrameEncodeError(ProtocolError):
    """Frame cannot be encoded (non-finite numeric field)."""


class FrameParseError(ProtocolError):
    """Malformed wire line; carries the byte offset where parsing failed."""

    def __init__(self, message, offset=0):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class UnsupportedFrameError(ProtocolError):
    """Line parsed but its type tag is unknown."""


class ProtocolOrderError(ProtocolError):
    """Sequence number gap, repeat, or echo mismatch."""


class PeerTimeoutError(ProtocolError):
    """No response or PAUSE heartbeat within the response timeout."""


class RemoteFailureError(ProtocolError):
    """Peer reported an ERROR control frame; detail comes from the peer."""


class HandshakeError(ProtocolError):
    """HELLO exchange failed (version, role, or digest mismatch)."""


class MetricsError(ChilsimError):
    """Metric requested on an empty or unsuitable trace."""


class UsageError(ChilsimError):
    """Caller asked for something the interface does not offer."""
