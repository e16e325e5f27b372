class ChannelError(Exception):
    """Base class for everything this package raises on purpose."""


class ParamError(ChannelError, ValueError):
    """Invalid channel parameters."""


class ConfigError(ChannelError):
    """Unreadable or inconsistent configuration input."""


class LogFormatError(ChannelError, ValueError):
    """Malformed or out-of-order observation log."""


class AccessLimitExceeded(ChannelError):
    """Transmission hit its access budget before the message was sent."""

    def __init__(self, message: str, events=None):
        super().__init__(message)
        self.events = list(events or [])
