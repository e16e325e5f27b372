"""Read-time arithmetic: word count and draw in, wait or code out.

All times are seconds as Python floats.  Every function here is pure.

Layout of one access's time line, for a frame with scaled mean ``mu_s``::

    0 ........ alpha ................................... beta ......... beta+z
    |  error   |   lambda code slots of width nu          |   bad codes   |

Codes are offsets from the pseudo-random baseline ``rho``; offsets that run
past ``beta`` wrap around to ``alpha``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ParamError

SECONDS_PER_WORD = 0.44
BASE_READ_SECONDS = 25.0
WAIT_SCALE = 100.0

# Absorbs float drift between the transmitter's wait and the receiver's
# difference of absolute timestamps (a few ulps of a session clock).
SLOT_EPSILON = 1e-6


class OutcomeKind(str, enum.Enum):
    CODE = "code"
    BAD_CODE = "bad_code"
    ERROR = "error"
    TERMINAL = "terminal"


@dataclass(frozen=True)
class ChannelParams:
    """Shared secret configuration both endpoints must agree on."""

    alpha: float = 30.0
    delta: float = 7.0
    scale: float = 0.25
    lam: int = 32
    seed: int = 0
    z: float = 60.0

    def __post_init__(self):
        for name in ("alpha", "delta", "scale", "z"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, Fraction)) and math.isfinite(value) and value > 0):
                raise ParamError(f"{name} must be a positive finite number, got {value!r}")
        if not isinstance(self.lam, int) or self.lam < 2:
            raise ParamError(f"lambda must be an integer >= 2, got {self.lam!r}")
        if not self.alpha > self.delta:
            raise ParamError(
                f"alpha ({self.alpha}) must exceed delta ({self.delta}) so the error zone is non-empty"
            )
        if not 0 <= self.seed <= 0xFFFFFFFFFFFFFFFF:
            raise ParamError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")
        # keep arithmetic in plain floats regardless of what was passed in
        for name in ("alpha", "delta", "scale", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def bad_code_threshold(self) -> float:
        """Scaled mean below which every access is a bad code (nu < delta)."""
        return self.lam * self.delta / 3.0

    def replace(self, **changes) -> "ChannelParams":
        fields = asdict(self)
        fields.update(changes)
        return ChannelParams(**fields)


@dataclass(frozen=True)
class TimingFrame:
    """Per-access quantities both endpoints derive from (w, r)."""

    mu_s: float
    sigma: float
    rho: float
    beta: float
    nu: float

    @property
    def span(self) -> float:
        """Width of the signalling window, beta - alpha = 3 * mu_s."""
        return 3.0 * self.mu_s

    @classmethod
    def build(cls, mu_s: float, rho: float, params: ChannelParams) -> "TimingFrame":
        mu_s = float(mu_s)
        return cls(
            mu_s=mu_s,
            sigma=mu_s,
            rho=float(rho),
            beta=mu_s + 2.0 * mu_s + params.alpha,
            nu=3.0 * mu_s / params.lam,
        )


@dataclass(frozen=True)
class EncodeOutcome:
    kind: OutcomeKind
    wait: float
    code: int | None = None


def mean_read_time(word_count: int) -> float:
    """Average read-time in seconds for a page of ``word_count`` words."""
    if word_count < 0:
        raise ValueError(f"word_count must be >= 0, got {word_count}")
    return SECONDS_PER_WORD * word_count + BASE_READ_SECONDS


def exponential_baseline(mu_s: float, r: float) -> float:
    """Inverse-CDF sample of an exponential with mean ``mu_s``."""
    return -mu_s * math.log1p(-r)


def frame(word_count: int, r: float, params: ChannelParams) -> TimingFrame:
    if not 0.0 <= r < 1.0:
        raise ValueError(f"r must lie in [0, 1), got {r}")
    mu_s = params.scale * mean_read_time(word_count)
    return TimingFrame.build(mu_s, exponential_baseline(mu_s, r), params)


def is_bad_code(f: TimingFrame, params: ChannelParams) -> bool:
    return f.rho > f.beta or f.nu < params.delta


def _wrap(x: float, period: float) -> float:
    """Non-negative remainder strictly below ``period``."""
    m = x % period
    # float % can round a tiny negative x up to exactly period
    return 0.0 if m >= period else m


def encode(code: int, f: TimingFrame, params: ChannelParams) -> EncodeOutcome:
    """Wait that signals ``code`` in frame ``f``."""
    if not 0 <= code < params.lam:
        raise ValueError(f"code {code} outside [0, {params.lam})")
    offset = code * f.nu
    tau = _wrap(f.rho - params.alpha + offset, f.span) + params.alpha
    if tau >= f.beta:
        tau = math.nextafter(f.beta, 0.0)
    return EncodeOutcome(OutcomeKind.CODE, tau, code)


def error_wait(r: float, params: ChannelParams) -> EncodeOutcome:
    """Short wait after a failed fetch, inside the reserved (delta, alpha) zone."""
    wait = params.delta + _wrap(WAIT_SCALE * r, params.alpha - params.delta)
    return EncodeOutcome(OutcomeKind.ERROR, wait)


def bad_code_wait(r: float, f: TimingFrame, params: ChannelParams) -> EncodeOutcome:
    wait = f.beta + _wrap(WAIT_SCALE * r, params.z)
    return EncodeOutcome(OutcomeKind.BAD_CODE, wait)


def decode(tau_observed: float, f: TimingFrame, params: ChannelParams) -> int | OutcomeKind:
    """Recover the code carried by an observed read-time.

    Returns the integer code, or ``OutcomeKind.ERROR`` for waits below alpha
    and ``OutcomeKind.BAD_CODE`` for waits past ``beta + delta`` (a genuine
    code plus at most delta of system delay never gets there).
    """
    tau = tau_observed
    if tau < params.alpha - SLOT_EPSILON:
        return OutcomeKind.ERROR
    if tau >= f.beta + params.delta:
        return OutcomeKind.BAD_CODE

    if abs(tau - f.rho) < params.delta:
        offset = 0.0
    elif tau > f.rho:
        offset = tau - f.rho
    else:
        offset = (f.beta - f.rho) + (tau - params.alpha)

    # reduce mod the span: when rho < alpha the low codes sit a full span above rho
    offset = _wrap(offset + SLOT_EPSILON, f.span)
    code = math.floor(offset / f.nu)
    return min(max(code, 0), params.lam - 1)
