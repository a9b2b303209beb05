"""Shared plumbing: the deterministic PRNG used by sweeps and a tiny check-report type."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 stream, fixed bit-for-bit so sweeps replay across machines.

    State update and output mix follow the reference constants
    (0x9E3779B97F4A7C15 increment, 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB mixers).
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Rejection-free modulo; bias is irrelevant
        at desk scale and keeping it branchless keeps streams easy to reproduce."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        return self.next_u64() % n

    def choice(self, seq):
        if not seq:
            raise ValueError("choice() on empty sequence")
        return seq[self.below(len(seq))]

    def fraction(self, num_bound: int = 3, den_bound: int = 4) -> Fraction:
        """Small nonzero rational, numerator in [-num_bound, num_bound] \\ {0}."""
        num = self.below(2 * num_bound) - num_bound
        if num >= 0:
            num += 1
        den = 1 + self.below(den_bound)
        return Fraction(num, den)


@dataclass
class CheckReport:
    """Outcome of a verification sweep: counts plus reproducible witnesses."""

    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def count(self) -> None:
        self.checks += 1

    def fail(self, witness: str) -> None:
        """Record a witness for a check already counted with count()."""
        self.failures.append(witness)

    def merge(self, other: "CheckReport") -> None:
        self.checks += other.checks
        self.failures.extend(other.failures)

    def lines(self) -> list[str]:
        out = ["%s: %s (%d checks, %d failures)" % (
            self.name, "PASS" if self.passed else "FAIL", self.checks, len(self.failures))]
        out.extend("  witness: " + w for w in self.failures)
        return out
