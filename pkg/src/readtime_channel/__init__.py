"""Covert channel that hides codes in simulated web page read-times."""

from .prng import DRAWS_PER_ACCESS, Prng, draws_per_access
from .timing_codec import (
    ChannelParams,
    EncodeOutcome,
    OutcomeKind,
    TimingFrame,
    bad_code_wait,
    decode,
    encode,
    error_wait,
    frame,
    is_bad_code,
    mean_read_time,
)

__all__ = [
    "DRAWS_PER_ACCESS",
    "Prng",
    "draws_per_access",
    "ChannelParams",
    "EncodeOutcome",
    "OutcomeKind",
    "TimingFrame",
    "bad_code_wait",
    "decode",
    "encode",
    "error_wait",
    "frame",
    "is_bad_code",
    "mean_read_time",
]

__version__ = "0.1.0"
