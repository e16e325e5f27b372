"""Transmit side: turn a code sequence into a schedule of page accesses."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .clock import Clock, SimulatedClock
from .errors import AccessLimitExceeded, ConfigError
from .page_model import Fetcher
from .prng import Prng
from .timing_codec import (
    ChannelParams,
    EncodeOutcome,
    OutcomeKind,
    bad_code_wait,
    encode,
    error_wait,
    frame,
    is_bad_code,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_ACCESSES_FACTOR = 64


@dataclass(frozen=True)
class AccessEvent:
    seq: int
    url: str
    request_time: float
    word_count: int
    status: int
    outcome: EncodeOutcome
    code_index: int | None = None

    @property
    def kind(self) -> OutcomeKind:
        return self.outcome.kind

    @property
    def wait(self) -> float:
        return self.outcome.wait

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "url": self.url,
            "t": self.request_time,
            "w": self.word_count,
            "status": self.status,
            "kind": self.outcome.kind.value,
            "wait": self.outcome.wait,
            "code": self.outcome.code,
        }


def validate_message(message: Sequence[int], params: ChannelParams) -> list[int]:
    codes = []
    for pos, code in enumerate(message):
        if not isinstance(code, int) or not 0 <= code < params.lam:
            raise ValueError(f"message[{pos}] = {code!r} is not a code in [0, {params.lam})")
        codes.append(code)
    return codes


def pick_url(url_list: Sequence[str], u: float) -> str:
    return url_list[min(math.floor(u * len(url_list)), len(url_list) - 1)]


def transmit(
    message: Sequence[int],
    url_list: Sequence[str],
    params: ChannelParams,
    clock: Clock,
    fetcher: Fetcher,
    *,
    prng: Prng | None = None,
    max_accesses: int | None = None,
) -> list[AccessEvent]:
    """Send ``message`` through the read-time channel.

    Each access draws a URL choice and one frame value from the shared
    generator, fetches the page, then sleeps the wait the codec asks for.
    Error pages and bad codes sleep without consuming a code.  After the
    last code one terminal access is made so its read-time is observable.

    Raises AccessLimitExceeded (carrying the events so far) when the message
    does not complete within ``max_accesses`` accesses, which defaults to
    64 times the message length.
    """
    codes = validate_message(message, params)
    if not url_list:
        raise ConfigError("url list is empty")
    if not codes:
        return []
    if prng is None:
        prng = Prng(params.seed)
    if max_accesses is None:
        max_accesses = DEFAULT_MAX_ACCESSES_FACTOR * len(codes)

    events: list[AccessEvent] = []
    i = 0
    while i < len(codes):
        if len(events) >= max_accesses:
            raise AccessLimitExceeded(
                f"sent {i} of {len(codes)} codes in {len(events)} accesses; "
                f"pages may be too short for lambda*delta/3 = {params.bad_code_threshold:.2f}s",
                events,
            )
        u1, u2 = prng.access_draws()
        url = pick_url(url_list, u1)
        t = clock.now()
        page = fetcher.fetch(url)

        code_index = None
        if page.word_count == 0:
            outcome = error_wait(u2, params)
        else:
            f = frame(page.word_count, u2, params)
            if is_bad_code(f, params):
                outcome = bad_code_wait(u2, f, params)
            else:
                outcome = encode(codes[i], f, params)
                code_index = i
                i += 1

        events.append(AccessEvent(len(events), url, t, page.word_count, page.status, outcome, code_index))
        logger.debug("access %d %s w=%d -> %s %.3fs", len(events) - 1, url, page.word_count,
                     outcome.kind.value, outcome.wait)
        clock.sleep(outcome.wait)

    u1, _ = prng.access_draws()
    url = pick_url(url_list, u1)
    t = clock.now()
    page = fetcher.fetch(url)
    events.append(AccessEvent(len(events), url, t, page.word_count, page.status,
                              EncodeOutcome(OutcomeKind.TERMINAL, 0.0)))
    return events


def schedule_only(
    message: Sequence[int],
    url_list: Sequence[str],
    params: ChannelParams,
    fetcher: Fetcher,
    *,
    max_accesses: int | None = None,
) -> list[AccessEvent]:
    """Plan a transmission on a virtual clock without waiting."""
    return transmit(message, url_list, params, SimulatedClock(), fetcher, max_accesses=max_accesses)


def dumps_events(events: Iterable[AccessEvent]) -> str:
    return "".join(json.dumps(ev.to_json()) + "\n" for ev in events)


def write_events(events: Iterable[AccessEvent], path: str | Path) -> None:
    Path(path).write_text(dumps_events(events), encoding="utf-8")
