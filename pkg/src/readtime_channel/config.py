"""Flat key=value configuration shared by every subcommand."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError, ParamError
from .prng import parse_seed
from .timing_codec import ChannelParams
from .transmitter import DEFAULT_MAX_ACCESSES_FACTOR

CONFIG_ENV = "READTIME_CHANNEL_CONFIG"


def _parse_real(text: str) -> float:
    # accepts "0.25" as well as "1/4"
    return float(Fraction(text.strip()))


def _parse_path(text: str) -> str | None:
    return text.strip() or None


@dataclass
class Config:
    alpha_s: float = 30.0
    delta_s: float = 7.0
    scale: float = 0.25
    lambda_: int = 32
    seed: int = 0
    z_s: float = 60.0
    url_list: str | None = None
    corpus: str | None = None
    max_accesses_factor: int = DEFAULT_MAX_ACCESSES_FACTOR

    _PARSERS = {
        "alpha_s": _parse_real,
        "delta_s": _parse_real,
        "scale": _parse_real,
        "lambda": int,
        "seed": parse_seed,
        "z_s": _parse_real,
        "url_list": _parse_path,
        "corpus": _parse_path,
        "max_accesses_factor": int,
    }

    @staticmethod
    def keys() -> list[str]:
        return list(Config._PARSERS)

    @staticmethod
    def _attr(key: str) -> str:
        return "lambda_" if key == "lambda" else key

    def set(self, key: str, value: str) -> None:
        if key not in self._PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            setattr(self, self._attr(key), self._PARSERS[key](value))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc

    def get(self, key: str):
        return getattr(self, self._attr(key))

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> "Config":
        cfg = cls()
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw!r}")
            try:
                cfg.set(key.strip(), value)
            except ConfigError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from exc
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
        cfg = cls.parse(text, str(path))
        cfg._base = path.parent
        return cfg

    def dumps(self) -> str:
        lines = []
        for key in self.keys():
            value = self.get(key)
            if value is None:
                continue
            if key == "seed":
                lines.append(f"seed=0x{value:016x}")
            elif isinstance(value, float):
                lines.append(f"{key}={value!r}")
            else:
                lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"

    def resolve(self, path: str | None) -> Path | None:
        """Relative paths are taken relative to the config file's directory."""
        if path is None:
            return None
        p = Path(path)
        base = getattr(self, "_base", None)
        return p if p.is_absolute() or base is None else base / p

    def channel_params(self) -> ChannelParams:
        try:
            return ChannelParams(
                alpha=self.alpha_s, delta=self.delta_s, scale=self.scale,
                lam=self.lambda_, seed=self.seed, z=self.z_s,
            )
        except ParamError as exc:
            raise ConfigError(str(exc)) from exc

    def __eq__(self, other) -> bool:
        if not isinstance(other, Config):
            return NotImplemented
        return all(getattr(self, f.name) == getattr(other, f.name) for f in fields(self))


def default_config_path() -> str | None:
    return os.environ.get(CONFIG_ENV)
