"""Receive side: replay the shared draws against observed accesses."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import LogFormatError
from .page_model import is_success
from .prng import Prng
from .timing_codec import ChannelParams, OutcomeKind, decode, frame, is_bad_code

UNCLASSIFIABLE = "unclassifiable"


@dataclass(frozen=True)
class Observation:
    t: float
    url: str
    word_count: int
    status: int = 200

    @property
    def is_error(self) -> bool:
        return self.word_count == 0 or not is_success(self.status)


@dataclass
class AccessClassification:
    seq: int
    classification: str
    code: int | None = None
    tau_observed: float | None = None
    rho: float | None = None
    nu: float | None = None

    def to_json(self) -> dict:
        return {
            "seq": self.seq,
            "classification": self.classification,
            "code": self.code,
            "tau_observed": self.tau_observed,
            "rho": self.rho,
            "nu": self.nu,
        }


@dataclass
class DecodeReport:
    codes: list[int] = field(default_factory=list)
    per_access: list[AccessClassification] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for acc in self.per_access:
            out[acc.classification] = out.get(acc.classification, 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "codes": list(self.codes),
            "per_access": [a.to_json() for a in self.per_access],
            "warnings": list(self.warnings),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    def summary(self) -> str:
        counts = self.counts()
        parts = ", ".join(f"{k}={counts[k]}" for k in sorted(counts))
        lines = [
            f"accesses: {len(self.per_access)} ({parts or 'none'})",
            f"codes ({len(self.codes)}): {','.join(map(str, self.codes))}",
        ]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


def check_order(observations: Sequence[Observation]) -> None:
    for i in range(1, len(observations)):
        if observations[i].t < observations[i - 1].t:
            raise LogFormatError(
                f"observation {i} at t={observations[i].t} precedes observation {i - 1} "
                f"at t={observations[i - 1].t}"
            )


def receive(
    observations: Sequence[Observation],
    params: ChannelParams,
    *,
    prng: Prng | None = None,
) -> DecodeReport:
    """Recover the message from a time-ordered observation log.

    Mirrors the transmitter's draw discipline: two draws per observation,
    the first (URL choice) discarded.  The read-time of access i is the gap
    to access i+1, so the last observation only closes the previous gap.
    """
    check_order(observations)
    if prng is None:
        prng = Prng(params.seed)
    report = DecodeReport()
    n = len(observations)

    for i, obs in enumerate(observations):
        _, u2 = prng.access_draws()
        if i == n - 1:
            report.per_access.append(AccessClassification(i, OutcomeKind.TERMINAL.value))
            break
        tau = observations[i + 1].t - obs.t

        if obs.is_error:
            report.per_access.append(AccessClassification(i, OutcomeKind.ERROR.value, tau_observed=tau))
            continue

        f = frame(obs.word_count, u2, params)
        entry = AccessClassification(i, "", tau_observed=tau, rho=f.rho, nu=f.nu)
        report.per_access.append(entry)

        if is_bad_code(f, params):
            entry.classification = OutcomeKind.BAD_CODE.value
            if tau < f.beta:
                report.warnings.append(
                    f"access {i}: frame says bad code but observed read-time {tau:.3f}s "
                    f"is below beta={f.beta:.3f}s (possible desync)"
                )
            continue

        result = decode(tau, f, params)
        if isinstance(result, OutcomeKind):
            entry.classification = UNCLASSIFIABLE
            report.warnings.append(
                f"access {i}: read-time {tau:.3f}s outside the code window "
                f"[{params.alpha:g}, {f.beta:.3f}) of a {obs.word_count}-word page"
            )
            continue
        entry.classification = OutcomeKind.CODE.value
        entry.code = result
        report.codes.append(result)

    return report


def observations_from_events(events) -> list[Observation]:
    return [Observation(ev.request_time, ev.url, ev.word_count, ev.status) for ev in events]


def _observation(entry: dict) -> Observation:
    t = entry["t"]
    url = entry["url"]
    w = entry["w"] if "w" in entry else entry["word_count"]
    status = entry.get("status", 200)
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t):
        raise ValueError(f"t must be a finite number, got {t!r}")
    if not isinstance(url, str):
        raise ValueError(f"url must be a string, got {url!r}")
    if isinstance(w, bool) or not isinstance(w, int) or w < 0:
        raise ValueError(f"w must be a non-negative integer, got {w!r}")
    if isinstance(status, bool) or not isinstance(status, int):
        raise ValueError(f"status must be an integer, got {status!r}")
    if not is_success(status) and w != 0:
        raise ValueError(f"status {status} with non-zero word count {w}")
    return Observation(float(t), url, w, status)


def parse_log(text: str, source: str = "<log>") -> list[Observation]:
    observations = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            observations.append(_observation(json.loads(line)))
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise LogFormatError(f"{source}:{lineno}: {exc}") from exc
    check_order(observations)
    return observations


def ingest_log(path: str | Path) -> list[Observation]:
    """Read a JSON Lines observation log (the transmitter's event format works)."""
    path = Path(path)
    return parse_log(path.read_text(encoding="utf-8"), str(path))


def dumps_observations(observations: Sequence[Observation]) -> str:
    return "".join(
        json.dumps({"t": o.t, "url": o.url, "w": o.word_count, "status": o.status}) + "\n"
        for o in observations
    )
