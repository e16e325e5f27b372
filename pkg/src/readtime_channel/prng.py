"""SplitMix64 generator shared by both channel endpoints.

Transmitter and receiver stay in lock-step only if they consume draws in the
same order, so every access (code, error page, bad code or terminal) costs
exactly ``DRAWS_PER_ACCESS`` draws: the first picks the URL, the second
drives everything else for that access.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_UNIT = 1.0 / (1 << 53)

DRAWS_PER_ACCESS = 2


def draws_per_access() -> int:
    return DRAWS_PER_ACCESS


def parse_seed(text: str | int) -> int:
    """Accept a decimal or ``0x``-prefixed seed and reduce it to 64 bits."""
    if isinstance(text, int):
        value = text
    else:
        value = int(text.strip(), 0)
    if value < 0:
        raise ValueError(f"seed must be non-negative, got {text!r}")
    return value & MASK64


class Prng:
    """Bit-exact SplitMix64 with a 53-bit projection onto [0, 1).

    ``draws`` counts how many values have been taken since seeding, which is
    what the synchronization tests compare.
    """

    __slots__ = ("state", "draws")

    def __init__(self, seed: int = 0):
        self.state = parse_seed(seed)
        self.draws = 0

    @classmethod
    def seed(cls, seed_value: int) -> "Prng":
        return cls(seed_value)

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        self.draws += 1
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * _UNIT

    random = next_unit

    def access_draws(self) -> tuple[float, float]:
        """Return the (url, frame) pair consumed by one access."""
        u1 = self.next_unit()
        u2 = self.next_unit()
        return u1, u2

    def copy(self) -> "Prng":
        twin = Prng.__new__(Prng)
        twin.state = self.state
        twin.draws = self.draws
        return twin

    def __repr__(self) -> str:
        return f"Prng(state=0x{self.state:016x}, draws={self.draws})"
