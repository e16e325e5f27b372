"""End-to-end sessions on a virtual clock, delay injection and parameter sweeps."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .clock import SimulatedClock
from .errors import AccessLimitExceeded, ConfigError
from .page_model import NOT_FOUND, Corpus, PageRecord
from .prng import Prng
from .receiver import DecodeReport, Observation, receive
from .timing_codec import ChannelParams, OutcomeKind
from .transmitter import AccessEvent, transmit

DELAY_KINDS = ("zero", "const", "uniform", "texp")


@dataclass(frozen=True)
class DelayModel:
    """System delay added to every observed read-time.

    ``cap`` bounds every sample; when left as None it defaults to the
    channel's delta at sampling time.
    """

    kind: str = "zero"
    a: float = 0.0
    b: float = 0.0
    cap: float | None = None

    def __post_init__(self):
        if self.kind not in DELAY_KINDS:
            raise ValueError(f"unknown delay model {self.kind!r}; expected one of {DELAY_KINDS}")
        if self.kind == "uniform" and not 0 <= self.a <= self.b:
            raise ValueError(f"uniform delay needs 0 <= lo <= hi, got {self.a}, {self.b}")
        if self.kind == "texp" and self.a <= 0:
            raise ValueError("truncated exponential delay needs a positive mean")
        if self.kind == "const" and self.a < 0:
            raise ValueError("constant delay must be non-negative")

    @classmethod
    def zero(cls) -> "DelayModel":
        return cls("zero")

    @classmethod
    def constant(cls, d: float, cap: float | None = None) -> "DelayModel":
        return cls("const", d, cap=cap)

    @classmethod
    def uniform(cls, lo: float, hi: float, cap: float | None = None) -> "DelayModel":
        return cls("uniform", lo, hi, cap=cap)

    @classmethod
    def truncated_exp(cls, mean: float, cap: float | None = None) -> "DelayModel":
        return cls("texp", mean, cap=cap)

    @classmethod
    def parse(cls, spec: str) -> "DelayModel":
        """Parse ``zero``, ``const:D``, ``uniform:LO:HI`` or ``texp:MEAN[:CAP]``."""
        kind, *args = spec.strip().split(":")
        kind = kind.lower()
        try:
            nums = [float(x) for x in args]
        except ValueError as exc:
            raise ValueError(f"bad delay model {spec!r}: {exc}") from exc
        arity = {"zero": (0, 0), "const": (1, 1), "uniform": (2, 2), "texp": (1, 2)}
        if kind not in arity:
            raise ValueError(f"unknown delay model {spec!r}")
        lo, hi = arity[kind]
        if not lo <= len(nums) <= hi:
            raise ValueError(f"delay model {kind!r} takes {lo}..{hi} numbers, got {spec!r}")
        if kind == "zero":
            return cls.zero()
        if kind == "const":
            return cls.constant(nums[0])
        if kind == "uniform":
            return cls.uniform(nums[0], nums[1])
        return cls.truncated_exp(nums[0], nums[1] if len(nums) > 1 else None)

    def spec(self) -> str:
        if self.kind == "zero":
            return "zero"
        if self.kind == "const":
            return f"const:{self.a!r}"
        if self.kind == "uniform":
            return f"uniform:{self.a!r}:{self.b!r}"
        return f"texp:{self.a!r}" + (f":{self.cap!r}" if self.cap is not None else "")

    def sample(self, rng: Prng, delta: float) -> float:
        cap = delta if self.cap is None else self.cap
        if self.kind == "zero":
            return 0.0
        if self.kind == "const":
            d = self.a
        elif self.kind == "uniform":
            d = self.a + (self.b - self.a) * rng.next_unit()
        else:
            # inverse CDF of the exponential conditioned on d <= cap
            mass = -math.expm1(-cap / self.a)
            d = -self.a * math.log1p(-rng.next_unit() * mass)
        return min(max(d, 0.0), cap)


@dataclass
class SessionMetrics:
    message_length: int
    delivered: int
    errored: int
    accesses: int
    bad_codes: int
    error_pages: int
    session_time: float
    tx_draws: int
    rx_draws: int
    completed: bool = True

    @property
    def code_error_rate(self) -> float:
        return self.errored / self.message_length if self.message_length else 0.0

    @property
    def bad_code_fraction(self) -> float:
        carrying = self.accesses - 1 if self.completed and self.accesses else self.accesses
        return self.bad_codes / carrying if carrying else 0.0

    @property
    def data_rate(self) -> float:
        return self.delivered / self.session_time if self.session_time > 0 else 0.0

    def to_json(self) -> dict:
        out = asdict(self)
        out.update(
            code_error_rate=self.code_error_rate,
            bad_code_fraction=self.bad_code_fraction,
            data_rate=self.data_rate,
        )
        return out


@dataclass
class SessionResult:
    events: list[AccessEvent]
    observations: list[Observation]
    report: DecodeReport
    metrics: SessionMetrics

    @property
    def recovered(self) -> bool:
        return self.metrics.completed and self.metrics.errored == 0


def observe(events: Sequence[AccessEvent], delay_model: DelayModel, params: ChannelParams,
            sim_seed: int) -> list[Observation]:
    """Observer's view of a schedule: each read-time gap stretched by a sampled delay.

    Delays come from a generator seeded with ``sim_seed`` so the channel
    generator is never touched.
    """
    rng = Prng(sim_seed)
    observations = []
    t = events[0].request_time if events else 0.0
    for k, ev in enumerate(events):
        if k > 0:
            gap = ev.request_time - events[k - 1].request_time
            t = t + gap + delay_model.sample(rng, params.delta)
        observations.append(Observation(t, ev.url, ev.word_count, ev.status))
    return observations


def compare_codes(sent: Sequence[int], got: Sequence[int]) -> int:
    """Positions of ``sent`` not reproduced exactly in ``got``."""
    wrong = sum(1 for i, c in enumerate(sent) if i >= len(got) or got[i] != c)
    return min(wrong + max(len(got) - len(sent), 0), len(sent))


def run_session(
    message: Sequence[int],
    corpus,
    url_list: Sequence[str] | None,
    params: ChannelParams,
    delay_model: DelayModel | None = None,
    sim_seed: int = 0,
    *,
    max_accesses: int | None = None,
) -> SessionResult:
    """Transmit, observe through the delay model, receive, and score."""
    delay_model = delay_model or DelayModel.zero()
    if url_list is None:
        url_list = corpus.urls()
    tx_prng = Prng(params.seed)
    completed = True
    try:
        events = transmit(message, url_list, params, SimulatedClock(), corpus,
                          prng=tx_prng, max_accesses=max_accesses)
    except AccessLimitExceeded as exc:
        events = exc.events
        completed = False
    observations = observe(events, delay_model, params, sim_seed)
    rx_prng = Prng(params.seed)
    report = receive(observations, params, prng=rx_prng)

    kinds = [ev.kind for ev in events]
    metrics = SessionMetrics(
        message_length=len(message),
        delivered=len(message) - compare_codes(message, report.codes),
        errored=compare_codes(message, report.codes),
        accesses=len(events),
        bad_codes=kinds.count(OutcomeKind.BAD_CODE),
        error_pages=kinds.count(OutcomeKind.ERROR),
        session_time=events[-1].request_time - events[0].request_time if events else 0.0,
        tx_draws=tx_prng.draws,
        rx_draws=rx_prng.draws,
        completed=completed,
    )
    return SessionResult(events, observations, report, metrics)


def synthetic_corpus(n_pages: int, min_words: int, max_words: int, seed: int = 0,
                     error_fraction: float = 0.0, prefix: str = "http://sim.invalid/page") -> Corpus:
    """Pages with word counts uniform in [min_words, max_words].

    Every page whose index falls in the first ``error_fraction`` of a shuffled
    order is recorded as a 404 instead.
    """
    rng = Prng(seed)
    width = len(str(n_pages - 1))
    records = []
    n_errors = round(error_fraction * n_pages)
    order = sorted(range(n_pages), key=lambda _: rng.next_unit())
    dead = set(order[:n_errors])
    for k in range(n_pages):
        url = f"{prefix}{k:0{width}d}.html"
        if k in dead:
            records.append(PageRecord(url, 0, NOT_FOUND))
        else:
            w = min_words + math.floor(rng.next_unit() * (max_words - min_words + 1))
            records.append(PageRecord(url, w))
    return Corpus(records)


def random_message(length: int, lam: int, seed: int) -> list[int]:
    rng = Prng(seed)
    return [math.floor(rng.next_unit() * lam) for _ in range(length)]


SWEEP_AXES = ("delta", "scale", "lam", "min_words")
CSV_COLUMNS = (
    "delta", "scale", "lambda", "min_words", "trials", "code_error_rate",
    "bad_code_fraction", "data_rate_cps", "session_time_s",
)


@dataclass
class SweepResult:
    params: ChannelParams
    min_words: int
    messages_sent: int
    code_error_rate: float
    bad_code_fraction: float
    mean_data_rate: float
    mean_session_time: float
    incomplete: int = 0

    def csv_row(self) -> dict:
        return {
            "delta": self.params.delta,
            "scale": self.params.scale,
            "lambda": self.params.lam,
            "min_words": self.min_words,
            "trials": self.messages_sent,
            "code_error_rate": self.code_error_rate,
            "bad_code_fraction": self.bad_code_fraction,
            "data_rate_cps": self.mean_data_rate,
            "session_time_s": self.mean_session_time,
        }

    def to_json(self) -> dict:
        out = self.csv_row()
        out.update(alpha=self.params.alpha, z=self.params.z, seed=self.params.seed,
                   incomplete=self.incomplete)
        return out


@dataclass
class SweepGrid:
    """Cartesian grid over delta, scale, lambda and minimum page word count."""

    delta: list[float] = field(default_factory=lambda: [7.0])
    scale: list[float] = field(default_factory=lambda: [0.25])
    lam: list[int] = field(default_factory=lambda: [32])
    min_words: list[int] = field(default_factory=lambda: [0])
    trials: int = 20
    message_length: int = 14
    delay: DelayModel = field(default_factory=DelayModel.zero)

    def cells(self):
        return itertools.product(self.delta, self.scale, self.lam, self.min_words)

    @classmethod
    def parse(cls, text: str) -> "SweepGrid":
        """key=value lines; list axes take comma-separated values."""
        grid = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep:
                raise ConfigError(f"grid line {lineno}: expected key=value, got {raw!r}")
            try:
                if key in ("delta", "delta_s"):
                    grid.delta = [float(v) for v in value.split(",")]
                elif key == "scale":
                    grid.scale = [_number(v) for v in value.split(",")]
                elif key in ("lambda", "lam"):
                    grid.lam = [int(v) for v in value.split(",")]
                elif key == "min_words":
                    grid.min_words = [int(v) for v in value.split(",")]
                elif key == "trials":
                    grid.trials = int(value)
                elif key == "message_length":
                    grid.message_length = int(value)
                elif key == "delay":
                    grid.delay = DelayModel.parse(value)
                else:
                    raise ConfigError(f"grid line {lineno}: unknown key {key!r}")
            except ValueError as exc:
                raise ConfigError(f"grid line {lineno}: {exc}") from exc
        return grid


def _number(text: str) -> float:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _run_trial(args) -> SessionMetrics:
    message, corpus, url_list, params, delay, sim_seed = args
    return run_session(message, corpus, url_list, params, delay, sim_seed).metrics


def sweep(
    grid: SweepGrid,
    corpus: Corpus,
    base_params: ChannelParams,
    *,
    sim_seed: int = 0,
    workers: int = 1,
) -> list[SweepResult]:
    """One aggregated SweepResult per grid cell, in grid order.

    Trial k of every cell uses channel seed ``base_params.seed + k`` and
    simulation seed ``sim_seed + k``, so cells differ only by the swept axis.
    Rates are pooled over trials (total bad codes over total accesses,
    total delivered codes over total session time).
    """
    tasks = []
    cells = []
    for delta, scale, lam, min_words in grid.cells():
        params = base_params.replace(delta=delta, scale=scale, lam=lam)
        urls = [r.url for r in corpus.records() if r.word_count >= min_words]
        if not urls:
            raise ConfigError(f"no corpus page has at least {min_words} words")
        cells.append((params, min_words))
        for k in range(grid.trials):
            seed = (base_params.seed + k) & 0xFFFFFFFFFFFFFFFF
            message = random_message(grid.message_length, lam, (sim_seed + k) ^ 0x5EED)
            tasks.append((message, corpus, urls, params.replace(seed=seed), grid.delay, sim_seed + k))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            metrics = list(pool.map(_run_trial, tasks, chunksize=8))
    else:
        metrics = [_run_trial(t) for t in tasks]

    results = []
    for n, (params, min_words) in enumerate(cells):
        chunk = metrics[n * grid.trials:(n + 1) * grid.trials]
        total_len = sum(m.message_length for m in chunk)
        carrying = sum(m.accesses - (1 if m.completed and m.accesses else 0) for m in chunk)
        total_time = sum(m.session_time for m in chunk)
        results.append(SweepResult(
            params=params,
            min_words=min_words,
            messages_sent=len(chunk),
            code_error_rate=sum(m.errored for m in chunk) / total_len if total_len else 0.0,
            bad_code_fraction=sum(m.bad_codes for m in chunk) / carrying if carrying else 0.0,
            mean_data_rate=sum(m.delivered for m in chunk) / total_time if total_time else 0.0,
            mean_session_time=total_time / len(chunk) if chunk else 0.0,
            incomplete=sum(not m.completed for m in chunk),
        ))
    return results


def sweep_csv(results: Sequence[SweepResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for res in results:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in res.csv_row().items()})
    return buf.getvalue()


def write_sweep(results: Sequence[SweepResult], csv_path: str | Path) -> Path:
    """Write the CSV and a JSON summary next to it; returns the JSON path."""
    csv_path = Path(csv_path)
    csv_path.write_text(sweep_csv(results), encoding="utf-8")
    json_path = csv_path.with_suffix(".json")
    json_path.write_text(json.dumps([r.to_json() for r in results], indent=2) + "\n", encoding="utf-8")
    return json_path
