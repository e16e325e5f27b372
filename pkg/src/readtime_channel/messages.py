"""Byte strings <-> channel codes with a 4-code length prefix."""

from __future__ import annotations

from typing import Sequence

PREFIX_CODES = 4


def bits_per_code(lam: int) -> int:
    """k for lambda = 2**k, 1 <= k <= 8; anything else is a usage error."""
    if not isinstance(lam, int) or lam < 2 or lam & (lam - 1) or lam > 256:
        raise ValueError(f"byte messages need lambda to be a power of two in [2, 256], got {lam}")
    return lam.bit_length() - 1


def max_payload(lam: int) -> int:
    return (1 << (PREFIX_CODES * bits_per_code(lam))) - 1


def bytes_to_codes(data: bytes, lam: int) -> list[int]:
    """Length prefix then the payload bitstream, MSB first, zero-padded to k bits."""
    k = bits_per_code(lam)
    if len(data) > max_payload(lam):
        raise ValueError(f"{len(data)} bytes exceed the {max_payload(lam)}-byte limit for lambda={lam}")
    mask = lam - 1
    codes = [(len(data) >> (k * (PREFIX_CODES - 1 - j))) & mask for j in range(PREFIX_CODES)]

    acc = nbits = 0
    for byte in data:
        acc = (acc << 8) | byte
        nbits += 8
        while nbits >= k:
            nbits -= k
            codes.append((acc >> nbits) & mask)
        acc &= (1 << nbits) - 1
    if nbits:
        codes.append((acc << (k - nbits)) & mask)
    return codes


def bytes_from_codes(codes: Sequence[int], lam: int) -> bytes:
    k = bits_per_code(lam)
    if len(codes) < PREFIX_CODES:
        raise ValueError(f"need at least {PREFIX_CODES} codes for the length prefix, got {len(codes)}")
    for c in codes:
        if not 0 <= c < lam:
            raise ValueError(f"code {c} outside [0, {lam})")
    length = 0
    for c in codes[:PREFIX_CODES]:
        length = (length << k) | c

    out = bytearray()
    acc = nbits = 0
    for c in codes[PREFIX_CODES:]:
        if len(out) == length:
            break
        acc = (acc << k) | c
        nbits += k
        if nbits >= 8:
            nbits -= 8
            out.append((acc >> nbits) & 0xFF)
            acc &= (1 << nbits) - 1
    if len(out) < length:
        raise ValueError(f"payload truncated: prefix says {length} bytes, decoded {len(out)}")
    return bytes(out)


def parse_codes(text: str) -> list[int]:
    """'3,17,0' or whitespace separated."""
    return [int(tok) for tok in text.replace(",", " ").split()]
