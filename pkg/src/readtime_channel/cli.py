"""Command line entry point: transmit, receive, simulate, sweep.

Exit status: 0 on success, 1 when the channel fails (message not recovered,
access budget exhausted), 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .clock import SimulatedClock, WallClock
from .config import Config, default_config_path
from .errors import AccessLimitExceeded, ChannelError, ConfigError
from .messages import bits_per_code, bytes_from_codes, bytes_to_codes, parse_codes
from .page_model import Corpus, HttpFetcher, load_url_list
from .receiver import dumps_observations, ingest_log, receive
from .simulator import DelayModel, SweepGrid, run_session, sweep, write_sweep
from .transmitter import dumps_events, transmit

log = logging.getLogger("readtime_channel")

EXIT_OK = 0
EXIT_CHANNEL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=default_config_path(),
                   help="key=value config file (default: $READTIME_CHANNEL_CONFIG)")
    for key in Config.keys():
        p.add_argument(f"--{key}", dest=f"override_{key}", metavar="V",
                       help=f"override config key {key}")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_message(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--message-file", help="bytes to send, framed with a length prefix")
    g.add_argument("--codes", help='raw code sequence, e.g. "3,17,0"')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="readtime-channel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", help="send a message by modulating page read-times")
    _add_common(p)
    _add_message(p)
    p.add_argument("--dry-run", action="store_true", help="plan on a virtual clock, no waiting")
    p.add_argument("--out", help="write the event log here instead of stdout")

    p = sub.add_parser("receive", help="recover a message from an observation log")
    _add_common(p)
    p.add_argument("--log", required=True, help="JSON Lines observation log")
    p.add_argument("--out", help="write the JSON decode report here")
    p.add_argument("--raw-codes", action="store_true", help="do not unframe the codes as bytes")

    p = sub.add_parser("simulate", help="loopback session with injected system delay")
    _add_common(p)
    _add_message(p)
    p.add_argument("--delay-model", default="zero",
                   help="zero | const:D | uniform:LO:HI | texp:MEAN[:CAP]")
    p.add_argument("--sim-seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--out-dir", help="write events.jsonl, observations.jsonl and report.json here")

    p = sub.add_parser("sweep", help="error and data rates over a parameter grid")
    _add_common(p)
    p.add_argument("--grid", required=True, help="key=value grid file")
    p.add_argument("--out", required=True, help="CSV output path (JSON summary written alongside)")
    p.add_argument("--sim-seed", type=lambda s: int(s, 0), default=0)
    p.add_argument("--workers", type=int, default=1)
    return parser


def load_config(args) -> Config:
    cfg = Config.load(args.config) if args.config else Config()
    for key in Config.keys():
        value = getattr(args, f"override_{key}")
        if value is not None:
            cfg.set(key, value)
    return cfg


def load_pages(cfg: Config):
    """Fetcher and URL list from the config; no corpus means live HTTP."""
    corpus = Corpus.load(cfg.resolve(cfg.corpus)) if cfg.corpus else None
    if cfg.url_list:
        urls = load_url_list(cfg.resolve(cfg.url_list))
    elif corpus is not None:
        urls = corpus.urls()
    else:
        raise ConfigError("config needs url_list or corpus")
    if not urls:
        raise ConfigError("url list is empty")
    return (corpus if corpus is not None else HttpFetcher()), urls


def load_message(args, lam: int) -> tuple[list[int], bool]:
    """Returns (codes, framed)."""
    if args.codes is not None:
        try:
            return parse_codes(args.codes), False
        except ValueError as exc:
            raise UsageError(f"bad --codes value: {exc}") from exc
    try:
        bits_per_code(lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        data = Path(args.message_file).read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read message file {args.message_file}: {exc.strerror or exc}") from exc
    try:
        return bytes_to_codes(data, lam), True
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _describe_payload(codes: list[int], lam: int) -> str:
    try:
        data = bytes_from_codes(codes, lam)
    except ValueError as exc:
        return f"payload: not decodable as framed bytes ({exc})"
    return f"payload ({len(data)} bytes): {data!r}"


def cmd_transmit(args) -> int:
    cfg = load_config(args)
    params = cfg.channel_params()
    fetcher, urls = load_pages(cfg)
    codes, _ = load_message(args, params.lam)
    clock = SimulatedClock() if args.dry_run else WallClock()
    try:
        events = transmit(codes, urls, params, clock, fetcher,
                          max_accesses=cfg.max_accesses_factor * max(len(codes), 1))
    except AccessLimitExceeded as exc:
        _emit(dumps_events(exc.events), args.out)
        log.error("%s", exc)
        return EXIT_CHANNEL
    _emit(dumps_events(events), args.out)
    return EXIT_OK


def cmd_receive(args) -> int:
    cfg = load_config(args)
    params = cfg.channel_params()
    try:
        observations = ingest_log(args.log)
    except OSError as exc:
        raise ConfigError(f"cannot read log {args.log}: {exc.strerror or exc}") from exc
    report = receive(observations, params)
    print(report.summary())
    if not args.raw_codes:
        try:
            bits_per_code(params.lam)
            print(_describe_payload(report.codes, params.lam))
        except ValueError:
            pass
    if args.out:
        Path(args.out).write_text(report.dumps(), encoding="utf-8")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    params = cfg.channel_params()
    fetcher, urls = load_pages(cfg)
    if not isinstance(fetcher, Corpus):
        raise ConfigError("simulate needs a corpus; it never touches the network")
    codes, framed = load_message(args, params.lam)
    try:
        delay = DelayModel.parse(args.delay_model)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_session(codes, fetcher, urls, params, delay, args.sim_seed,
                         max_accesses=cfg.max_accesses_factor * max(len(codes), 1))

    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "events.jsonl").write_text(dumps_events(result.events), encoding="utf-8")
        (out / "observations.jsonl").write_text(dumps_observations(result.observations), encoding="utf-8")
        (out / "report.json").write_text(result.report.dumps(), encoding="utf-8")

    m = result.metrics
    print(result.report.summary())
    if framed:
        print(_describe_payload(result.report.codes, params.lam))
    print(f"sent {m.message_length} codes in {m.accesses} accesses over {m.session_time:.1f}s "
          f"(bad codes {m.bad_codes}, error pages {m.error_pages}, "
          f"{m.data_rate:.5f} codes/s, code error rate {m.code_error_rate:.3f})")
    if not result.recovered:
        print("message NOT recovered")
        return EXIT_CHANNEL
    print("message recovered")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    params = cfg.channel_params()
    if not cfg.corpus:
        raise ConfigError("sweep needs a corpus")
    corpus = Corpus.load(cfg.resolve(cfg.corpus))
    try:
        grid = SweepGrid.parse(Path(args.grid).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read grid file {args.grid}: {exc.strerror or exc}") from exc
    try:
        results = sweep(grid, corpus, params, sim_seed=args.sim_seed, workers=args.workers)
    except ChannelError as exc:
        raise ConfigError(str(exc)) from exc
    json_path = write_sweep(results, args.out)
    print(f"{len(results)} cells -> {args.out} ({json_path})")
    return EXIT_OK


COMMANDS = {
    "transmit": cmd_transmit,
    "receive": cmd_receive,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # parameter and message validation errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ChannelError as exc:
        print(f"channel failure: {exc}", file=sys.stderr)
        return EXIT_CHANNEL


if __name__ == "__main__":
    sys.exit(main())
