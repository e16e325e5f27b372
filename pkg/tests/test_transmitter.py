import json

import pytest

from readtime_channel.clock import SimulatedClock
from readtime_channel.errors import AccessLimitExceeded, ConfigError
from readtime_channel.page_model import Corpus, PageRecord
from readtime_channel.prng import Prng
from readtime_channel.timing_codec import OutcomeKind, frame
from readtime_channel.transmitter import dumps_events, pick_url, schedule_only, transmit

LONG_PAGES = Corpus.from_word_counts({f"http://site/{i}": 1500 + 250 * i for i in range(8)})
MSG14 = [3, 17, 0, 31, 5, 9, 12, 30, 1, 2, 3, 4, 5, 6]


def test_fourteen_codes_fifteen_accesses(channel_params):
    # seed 1 happens to hit no bad code on this corpus
    events = schedule_only(MSG14, LONG_PAGES.urls(), channel_params, LONG_PAGES)
    kinds = [e.kind for e in events]
    assert kinds.count(OutcomeKind.BAD_CODE) == 0
    assert len(events) == 15
    assert kinds[-1] is OutcomeKind.TERMINAL
    assert [e.outcome.code for e in events[:-1]] == MSG14


def test_access_count_with_bad_codes(channel_params):
    for seed in range(30):
        events = schedule_only(MSG14, LONG_PAGES.urls(), channel_params.replace(seed=seed), LONG_PAGES)
        extra = sum(e.kind in (OutcomeKind.BAD_CODE, OutcomeKind.ERROR) for e in events)
        assert len(events) == len(MSG14) + 1 + extra


def test_empty_message_sends_nothing(channel_params):
    assert schedule_only([], LONG_PAGES.urls(), channel_params, LONG_PAGES) == []


def test_rejects_out_of_range_code(channel_params):
    with pytest.raises(ValueError):
        schedule_only([0, 32], LONG_PAGES.urls(), channel_params, LONG_PAGES)


def test_rejects_empty_url_list(channel_params):
    with pytest.raises(ConfigError):
        schedule_only([1], [], channel_params, LONG_PAGES)


def test_short_pages_never_finish(channel_params):
    short = Corpus.from_word_counts({"http://s/1": 100, "http://s/2": 100})
    with pytest.raises(AccessLimitExceeded) as info:
        schedule_only([1, 2], short.urls(), channel_params, short)
    events = info.value.events
    assert len(events) == 64 * 2
    assert all(e.kind is OutcomeKind.BAD_CODE for e in events)


def test_two_draws_per_access(channel_params):
    corpus = Corpus.from_word_counts({"http://a/": 1500, "http://b/": 0, "http://c/": 150})
    prng = Prng(channel_params.seed)
    events = transmit([1, 2, 3, 4, 5], corpus.urls(), channel_params, SimulatedClock(), corpus, prng=prng)
    kinds = {e.kind for e in events}
    assert {OutcomeKind.ERROR, OutcomeKind.BAD_CODE, OutcomeKind.CODE} <= kinds
    assert prng.draws == 2 * len(events)


def test_event_invariants(channel_params):
    corpus = Corpus([PageRecord(f"http://p/{i}", w) for i, w in enumerate([0, 100, 900, 1500, 4000])]
                    + [PageRecord("http://p/dead", 0, 404)])
    for seed in range(20):
        params = channel_params.replace(seed=seed)
        events = schedule_only(list(range(10)), corpus.urls(), params, corpus)
        prng = Prng(seed)
        next_index = 0
        for k, ev in enumerate(events):
            assert ev.seq == k
            if k:
                assert ev.request_time > events[k - 1].request_time
                assert ev.request_time == pytest.approx(events[k - 1].request_time + events[k - 1].wait)
            _, u2 = prng.access_draws()
            if ev.kind is OutcomeKind.TERMINAL:
                assert k == len(events) - 1
                continue
            if ev.kind is OutcomeKind.ERROR:
                assert ev.word_count == 0
                assert params.delta <= ev.wait < params.alpha
                continue
            f = frame(ev.word_count, u2, params)
            if ev.kind is OutcomeKind.BAD_CODE:
                assert f.beta <= ev.wait < f.beta + params.z
            else:
                assert params.alpha <= ev.wait < f.beta
                assert ev.code_index == next_index
                next_index += 1
        assert next_index == 10


def test_url_choice_uses_first_draw(channel_params):
    urls = LONG_PAGES.urls()
    events = schedule_only([4, 4, 4], urls, channel_params, LONG_PAGES)
    prng = Prng(channel_params.seed)
    for ev in events:
        u1, _ = prng.access_draws()
        assert ev.url == pick_url(urls, u1)


def test_schedule_deterministic(channel_params):
    a = dumps_events(schedule_only(MSG14, LONG_PAGES.urls(), channel_params, LONG_PAGES))
    b = dumps_events(transmit(MSG14, LONG_PAGES.urls(), channel_params, SimulatedClock(), LONG_PAGES))
    assert a == b


def test_different_seed_different_urls(channel_params):
    a = schedule_only(MSG14, LONG_PAGES.urls(), channel_params.replace(seed=100), LONG_PAGES)
    b = schedule_only(MSG14, LONG_PAGES.urls(), channel_params.replace(seed=101), LONG_PAGES)
    assert [e.url for e in a] != [e.url for e in b]


def test_event_json_schema(channel_params):
    events = schedule_only([7], LONG_PAGES.urls(), channel_params, LONG_PAGES)
    rows = [json.loads(line) for line in dumps_events(events).splitlines()]
    assert set(rows[0]) == {"seq", "url", "t", "w", "status", "kind", "wait", "code"}
    assert rows[-1]["kind"] == "terminal" and rows[-1]["code"] is None


class SlowFetcher:
    """Advances the clock on every fetch like a real retrieval would."""

    def __init__(self, corpus, clock, latency):
        self.corpus, self.clock, self.latency = corpus, clock, latency

    def fetch(self, url):
        self.clock.sleep(self.latency)
        return self.corpus.fetch(url)


def test_request_time_taken_before_retrieval(channel_params):
    clock = SimulatedClock()
    events = transmit([1, 2], LONG_PAGES.urls(), channel_params, clock, SlowFetcher(LONG_PAGES, clock, 2.0))
    assert events[0].request_time == 0.0
    assert events[1].request_time == pytest.approx(2.0 + events[0].wait)
