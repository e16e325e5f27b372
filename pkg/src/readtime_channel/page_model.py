"""Relevant-word counting and page sources (local corpus or live HTTP)."""

from __future__ import annotations

import json
import logging
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

from .errors import ConfigError

logger = logging.getLogger(__name__)

NOT_FOUND = 404


_COMMENT = re.compile(r"<!--.*?(?:-->|\Z)", re.S)
_RAW_TEXT = re.compile(r"<(script|style)\b[^>]*(?:>|\Z).*?(?:</\1\s*>|\Z)", re.S | re.I)
# '<' only opens a tag when followed by a name, '/', '!' or '?'; else it is text
_TAG = re.compile(r"<[A-Za-z/!?][^>]*(?:>|\Z)", re.S)
_ENTITY = re.compile(r"&(?:(amp|lt|gt|quot|apos)|#(\d+)|#[xX]([0-9A-Fa-f]+));")
_NAMED = {"amp": "&", "lt": "<", "gt": ">", "quot": '"', "apos": "'"}


def _entity(m: re.Match) -> str:
    name, dec, hexa = m.groups()
    if name:
        return _NAMED[name]
    cp = int(dec) if dec else int(hexa, 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        return "�"
    return chr(cp)


def visible_text(html_text: str | bytes) -> str:
    """Strip script/style bodies, comments and tags; decode basic entities."""
    if isinstance(html_text, bytes):
        html_text = html_text.decode("utf-8", errors="replace")
    text = _COMMENT.sub(" ", html_text)
    text = _RAW_TEXT.sub(" ", text)
    text = _TAG.sub(" ", text)
    return _ENTITY.sub(_entity, text)


def count_relevant_words(html_text: str | bytes) -> int:
    """Number of whitespace tokens with at least one alphanumeric character.

    Total over arbitrary input: malformed markup never raises, an unclosed
    tag or comment swallows the rest of the document.
    """
    return sum(1 for tok in visible_text(html_text).split() if any(ch.isalnum() for ch in tok))


@dataclass(frozen=True)
class PageRecord:
    url: str
    word_count: int
    status: int = 200
    body_available: bool = True

    def __post_init__(self):
        if not is_success(self.status) and self.word_count != 0:
            object.__setattr__(self, "word_count", 0)
        if self.word_count < 0:
            raise ValueError(f"negative word count for {self.url}")

    @property
    def is_error(self) -> bool:
        return self.word_count == 0


def is_success(status: int) -> bool:
    return 200 <= status <= 299


class Fetcher(Protocol):
    def fetch(self, url: str) -> PageRecord: ...


class Corpus:
    """Immutable url -> PageRecord mapping; unknown URLs fetch as 404."""

    def __init__(self, records: Iterable[PageRecord] = ()):
        entries: dict[str, PageRecord] = {}
        for rec in records:
            if rec.url in entries:
                raise ConfigError(f"duplicate url in corpus: {rec.url}")
            entries[rec.url] = rec
        self._entries = dict(sorted(entries.items()))

    @classmethod
    def from_word_counts(cls, counts: dict[str, int]) -> "Corpus":
        return cls(PageRecord(url, w, 200 if w > 0 else NOT_FOUND) for url, w in counts.items())

    @classmethod
    def load(cls, manifest: str | Path) -> "Corpus":
        """Read a JSON Lines manifest.

        Each line holds ``url`` plus either ``file`` (HTML path relative to
        the manifest) or ``word_count``; ``status`` defaults to 200.  HTML
        files are counted here so a bad path fails at load time.
        """
        manifest = Path(manifest)
        try:
            lines = manifest.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read corpus manifest {manifest}: {exc}") from exc

        records = []
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                url = entry["url"]
                status = int(entry.get("status", 200))
            except (ValueError, KeyError, TypeError) as exc:
                raise ConfigError(f"{manifest}:{lineno}: bad manifest entry ({exc})") from exc
            if not isinstance(url, str) or not url:
                raise ConfigError(f"{manifest}:{lineno}: url must be a non-empty string")

            if "word_count" in entry:
                words = entry["word_count"]
                if not isinstance(words, int) or isinstance(words, bool) or words < 0:
                    raise ConfigError(f"{manifest}:{lineno}: word_count must be a non-negative integer")
            elif "file" in entry:
                path = manifest.parent / entry["file"]
                try:
                    words = count_relevant_words(path.read_bytes())
                except OSError as exc:
                    raise ConfigError(f"{manifest}:{lineno}: cannot read {path}: {exc}") from exc
            else:
                raise ConfigError(f"{manifest}:{lineno}: entry needs 'file' or 'word_count'")
            records.append(PageRecord(url, words, status))
        return cls(records)

    def fetch(self, url: str) -> PageRecord:
        rec = self._entries.get(url)
        if rec is None:
            return PageRecord(url, 0, NOT_FOUND, body_available=False)
        return rec

    def urls(self) -> list[str]:
        return list(self._entries)

    def records(self) -> list[PageRecord]:
        return list(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, url: str) -> bool:
        return url in self._entries

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self._entries == other._entries


class HttpFetcher:
    """Live retrieval over HTTP(S); any failure maps to the w=0 sentinel."""

    def __init__(self, timeout: float = 30.0, user_agent: str = "Mozilla/5.0"):
        self.timeout = timeout
        self.user_agent = user_agent

    def fetch(self, url: str) -> PageRecord:
        req = urllib.request.Request(url, headers={"User-Agent": self.user_agent})
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                body = resp.read()
                status = resp.status
        except urllib.error.HTTPError as exc:
            return PageRecord(url, 0, exc.code, body_available=False)
        except (urllib.error.URLError, OSError) as exc:
            logger.warning("fetch failed for %s: %s", url, exc)
            return PageRecord(url, 0, 0, body_available=False)
        return PageRecord(url, count_relevant_words(body), status)


def fetch(source: Fetcher, url: str) -> PageRecord:
    return source.fetch(url)


def load_url_list(path: str | Path) -> list[str]:
    """One URL per line; blank lines and lines starting with '#' are skipped."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read url list {path}: {exc}") from exc
    urls = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            urls.append(line)
    return urls
