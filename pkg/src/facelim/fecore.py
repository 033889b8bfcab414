"""The factor elimination function and the quantities derived from it.

Two disjoint sets of prime powers ``A`` and ``B`` produce the resultant pair::

    R+ = prod(A) + prod(B)        R- = |prod(A) - prod(B)|

No base of ``A`` or ``B`` can divide either resultant.  An empty side stands
for the set ``{1}`` and contributes a product of 1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

from facelim import arith

Sign = Literal["plus", "minus"]
SIGNS: tuple[Sign, ...] = ("plus", "minus")


class InvalidPartition(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PrimePower:
    base: int
    exponent: int = 1

    def __post_init__(self) -> None:
        if self.exponent < 1:
            raise InvalidPartition(f"exponent must be >= 1, got {self.exponent}")
        if not arith.is_prime(self.base):
            raise InvalidPartition(f"base {self.base} is not prime")

    @property
    def value(self) -> int:
        return self.base**self.exponent

    def __str__(self) -> str:
        return str(self.base) if self.exponent == 1 else f"{self.base}^{self.exponent}"


def _as_powers(side: Iterable[PrimePower | int | tuple[int, int]]) -> tuple[PrimePower, ...]:
    out = []
    for item in side:
        if isinstance(item, PrimePower):
            out.append(item)
        elif isinstance(item, tuple):
            out.append(PrimePower(*item))
        else:
            out.append(PrimePower(item))
    return tuple(sorted(out))


@dataclass(frozen=True)
class Partition:
    """Two disjoint multiplicand sets.  Sides are stored sorted by base.

    Plain ints and ``(base, exponent)`` tuples are accepted and promoted to
    :class:`PrimePower`.
    """

    side_a: tuple[PrimePower, ...]
    side_b: tuple[PrimePower, ...] = ()
    label: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        a = _as_powers(self.side_a)
        b = _as_powers(self.side_b)
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)
        if not a and not b:
            raise InvalidPartition("both sides are empty")
        bases_a = [t.base for t in a]
        bases_b = [t.base for t in b]
        if len(set(bases_a)) != len(bases_a) or len(set(bases_b)) != len(bases_b):
            raise InvalidPartition("repeated base within one side")
        shared = set(bases_a) & set(bases_b)
        if shared:
            raise InvalidPartition(f"bases on both sides: {sorted(shared)}")

    @property
    def product_a(self) -> int:
        return math.prod(t.value for t in self.side_a)

    @property
    def product_b(self) -> int:
        return math.prod(t.value for t in self.side_b)

    @property
    def bases(self) -> tuple[int, ...]:
        return tuple(sorted(t.base for t in self.side_a + self.side_b))

    @property
    def p_max(self) -> int:
        return self.bases[-1]

    def is_complete_prefix(self) -> bool:
        """True when the bases are exactly every prime up to the largest one."""
        bases = self.bases
        return list(bases) == arith.sieve_primes(bases[-1])

    def to_text(self) -> str:
        return format_partition(self)

    def __str__(self) -> str:
        return self.to_text()

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        return parse_partition(text)


def _format_side(side: tuple[PrimePower, ...]) -> str:
    return "*".join(str(t) for t in side) if side else "1"


def format_partition(partition: Partition) -> str:
    """Canonical text form, e.g. ``A=2^2*3^2;B=1``."""
    return f"A={_format_side(partition.side_a)};B={_format_side(partition.side_b)}"


_TERM = re.compile(r"^(\d+)(?:\^(\d+))?$")


def _parse_side(text: str) -> list[tuple[int, int]]:
    if text == "1":
        return []
    terms = []
    for chunk in text.split("*"):
        m = _TERM.match(chunk)
        if not m:
            raise InvalidPartition(f"malformed term {chunk!r}")
        base, exp = int(m.group(1)), int(m.group(2) or 1)
        if base == 1:
            continue
        terms.append((base, exp))
    return terms


def parse_partition(text: str) -> Partition:
    """Parse the canonical text form.  Whitespace is ignored, side order is free."""
    compact = re.sub(r"\s+", "", text)
    sides: dict[str, list[tuple[int, int]]] = {}
    for part in filter(None, compact.split(";")):
        key, sep, body = part.partition("=")
        key = key.upper()
        if not sep or key not in ("A", "B") or key in sides or not body:
            raise InvalidPartition(f"malformed partition text {text!r}")
        sides[key] = _parse_side(body)
    if "A" not in sides:
        raise InvalidPartition(f"partition text needs an A side: {text!r}")
    return Partition(sides["A"], sides.get("B", []))


@dataclass(frozen=True)
class FEResult:
    product_a: int
    product_b: int
    r_plus: int
    r_minus: int
    p_max: int
    c_plus: int
    c_minus: int
    guaranteed_plus: bool
    guaranteed_minus: bool

    def resultant(self, which: Sign) -> int:
        return self.r_plus if which == "plus" else self.r_minus

    def root(self, which: Sign) -> int:
        return self.c_plus if which == "plus" else self.c_minus

    def guaranteed(self, which: Sign) -> bool:
        return self.guaranteed_plus if which == "plus" else self.guaranteed_minus


def evaluate(partition: Partition) -> FEResult:
    a, b = partition.product_a, partition.product_b
    r_plus, r_minus = a + b, abs(a - b)
    p_max = partition.p_max
    complete = partition.is_complete_prefix()
    c_plus, c_minus = arith.isqrt(r_plus), arith.isqrt(r_minus)
    return FEResult(
        product_a=a,
        product_b=b,
        r_plus=r_plus,
        r_minus=r_minus,
        p_max=p_max,
        c_plus=c_plus,
        c_minus=c_minus,
        guaranteed_plus=complete and r_plus > 1 and c_plus <= p_max,
        guaranteed_minus=complete and r_minus > 1 and c_minus <= p_max,
    )


def coprime_check(partition: Partition, r: int) -> bool:
    return all(math.gcd(r, base) == 1 for base in partition.bases)


def is_guaranteed_prime(result: FEResult, which: Sign, complete_prefix: bool) -> bool:
    """Absolute primality condition: ``isqrt(R) <= P`` over a complete prime prefix.

    Every prime ``<= sqrt(R)`` is then a base of the partition and cannot
    divide ``R``, so ``R > 1`` has no prime factor below its square root.
    Without ``complete_prefix`` the condition proves nothing
    (``A={2,7}`` gives ``R+ = 15``).
    """
    r = result.resultant(which)
    return complete_prefix and r > 1 and result.root(which) <= result.p_max


def mod5_last_digit_filter(product_a: int, product_b: int, sign: Sign) -> bool:
    """True means reject: the last digits force ``5 | R`` and ``R != 5``."""
    if product_a < 1 or product_b < 1:
        raise ValueError("products must be >= 1")
    da, db = product_a % 10, product_b % 10
    if sign == "plus":
        digit, r = (da + db) % 10, product_a + product_b
    else:
        digit, r = (da - db) % 10, abs(product_a - product_b)
    return digit in (0, 5) and r != 5


@dataclass(frozen=True)
class ProbabilityEstimate:
    """Prime-count heuristic for one resultant.

    The probabilities follow the counting model ``1 - P(X) = pi(P) / pi(C)``;
    they are scores, not calibrated probabilities.
    """

    r: int
    p: int
    c: float
    pi_c: int
    pi_p: int
    n_exact: int
    n_approx: float
    p_divisible: Fraction
    p_prime: Fraction
    residual_count: int
    p_prime_residual: Fraction


def probability_estimate(
    result: FEResult, which: Sign, excluded: Iterable[int] = ()
) -> ProbabilityEstimate:
    r = result.resultant(which)
    p = result.p_max
    c_floor = result.root(which)
    pi_c = arith.prime_pi_exact(c_floor)
    if pi_c == 0:
        raise DegenerateInput(f"sqrt({r}) < 2: no prime can bound the resultant")
    excluded = set(excluded)
    for t in excluded:
        if not arith.is_prime(t):
            raise ValueError(f"excluded value {t} is not prime")
    pi_p = arith.prime_pi_exact(p)
    c = math.sqrt(r) if r < 2**1000 else float(c_floor)
    # C < P is the guaranteed regime; the ratios would exceed 1 there
    p_prime = min(Fraction(1), Fraction(pi_p, pi_c))
    residual = min(Fraction(1), max(Fraction(0), Fraction(pi_p - len(excluded), pi_c)))
    return ProbabilityEstimate(
        r=r,
        p=p,
        c=c,
        pi_c=pi_c,
        pi_p=pi_p,
        n_exact=max(0, pi_c - pi_p),
        n_approx=arith.prime_pi_pnt(c) - arith.prime_pi_pnt(p),
        p_divisible=1 - p_prime,
        p_prime=p_prime,
        residual_count=len(excluded),
        p_prime_residual=residual,
    )


def twin_candidates(core: Iterable[PrimePower | int | tuple[int, int]]) -> tuple[int, int]:
    """``(prod - 1, prod + 1)`` for the core set with ``B = {1}``."""
    result = evaluate(Partition(tuple(core), ()))
    return result.r_minus, result.r_plus
