"""Integer primitives: sieving, prime counting, integer square roots, primality.

Everything here works on plain Python ``int`` values, which are already
arbitrary precision.  The sieve is a lazily grown, process-wide table that is
only ever replaced (never mutated in place), so concurrent readers are safe.
"""

from __future__ import annotations

import enum
import math
import os
import random
from dataclasses import dataclass

import numpy as np

DEFAULT_SIEVE_CEILING = 10**8
ORACLE_BOUND = 10**12
DEFAULT_ROUNDS = 40

# Miller-Rabin with the first 13 prime bases is exact below this bound
# (Sorenson & Webster, 2015).
DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class CapacityError(ValueError):
    """Input exceeds a configured table size or oracle bound."""


class DomainError(ValueError):
    """Input is outside the mathematical domain of the function."""


class Kind(enum.Enum):
    COMPOSITE = "Composite"
    PROBABLE_PRIME = "ProbablePrime"
    PROVEN_PRIME = "ProvenPrime"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class PrimalityVerdict:
    kind: Kind
    witness_rounds: int = 0

    @property
    def is_prime(self) -> bool:
        """True for both proven and probable primes."""
        return self.kind is not Kind.COMPOSITE

    def __bool__(self) -> bool:
        return self.is_prime

    def __str__(self) -> str:
        return self.kind.value


COMPOSITE = PrimalityVerdict(Kind.COMPOSITE)
PROVEN = PrimalityVerdict(Kind.PROVEN_PRIME)


def sieve_ceiling() -> int:
    """Largest limit the sieve may be grown to; ``FACELIM_SIEVE_LIMIT`` overrides."""
    env = os.environ.get("FACELIM_SIEVE_LIMIT")
    if env:
        try:
            return int(float(env))
        except ValueError as exc:
            raise ValueError(f"FACELIM_SIEVE_LIMIT is not a number: {env!r}") from exc
    return DEFAULT_SIEVE_CEILING


def _check_natural(n: int, what: str = "n") -> int:
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"{what} must be an int, got {type(n).__name__}")
    if n < 0:
        raise DomainError(f"{what} must be nonnegative, got {n}")
    return n


class _Sieve:
    """Odd-only Eratosthenes table covering ``0..limit``."""

    def __init__(self) -> None:
        self.limit = 1
        self.primes = np.zeros(0, dtype=np.int64)

    def ensure(self, limit: int) -> None:
        if limit <= self.limit:
            return
        ceiling = sieve_ceiling()
        if limit > ceiling:
            raise CapacityError(f"sieve limit {limit} exceeds ceiling {ceiling}")
        # grow geometrically so repeated small requests stay cheap
        target = min(max(limit, 2 * self.limit, 1 << 16), ceiling)
        self.primes = _sieve(target)
        self.limit = target


def _sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i represents 2*i + 1
    odd = np.ones((limit + 1) // 2, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate((np.array([2], dtype=np.int64), primes))


_SIEVE = _Sieve()


def sieve_primes(limit: int) -> list[int]:
    """All primes ``<= limit`` in ascending order."""
    _check_natural(limit, "limit")
    if limit < 2:
        return []
    _SIEVE.ensure(limit)
    primes = _SIEVE.primes
    return primes[: np.searchsorted(primes, limit, side="right")].tolist()


def first_n_primes(n: int) -> list[int]:
    _check_natural(n, "n")
    if n == 0:
        return []
    if n < 6:
        bound = 13
    else:
        # Rosser's bound p_n < n (ln n + ln ln n) for n >= 6
        bound = int(n * (math.log(n) + math.log(math.log(n)))) + 1
    _SIEVE.ensure(bound)
    return _SIEVE.primes[:n].tolist()


def prime_pi_exact(x: float | int) -> int:
    """Number of primes ``<= floor(x)``."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    limit = math.floor(x)
    if limit < 2:
        return 0
    _SIEVE.ensure(limit)
    return int(np.searchsorted(_SIEVE.primes, limit, side="right"))


def prime_pi_pnt(x: float) -> float:
    """Prime number theorem estimate ``x / ln x``."""
    if x <= 1:
        raise DomainError(f"x / ln(x) needs x > 1, got {x}")
    return x / math.log(x)


def isqrt(n: int) -> int:
    """Largest ``s`` with ``s*s <= n``."""
    _check_natural(n)
    s = math.isqrt(n)
    assert s * s <= n < (s + 1) * (s + 1)
    return s


def strong_probable_prime(n: int, base: int) -> bool:
    """One Miller-Rabin round: is odd ``n > 2`` a strong probable prime to ``base``?"""
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def sprp2(n: int) -> bool:
    """Base-2 strong probable-prime test with the trivial cases handled.

    Admits base-2 strong pseudoprimes such as ``2047`` and ``104653 = 229*457``.
    """
    if n < 3:
        return n == 2
    if n % 2 == 0:
        return False
    return strong_probable_prime(n, 2)


def _witness_rng(n: int, seed: int | None) -> random.Random:
    # Per-number stream: the verdict never depends on call order.
    return random.Random(f"{0 if seed is None else seed}:{n}")


def probable_prime(n: int, rounds: int = DEFAULT_ROUNDS, seed: int | None = None) -> bool:
    """Boolean fast path of :func:`is_prime` for hot loops."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 2209:  # 47**2
        return True
    if not strong_probable_prime(n, 2):
        return False
    for a in _DETERMINISTIC_BASES[1:]:
        if not strong_probable_prime(n, a):
            return False
    if n < DETERMINISTIC_BOUND:
        return True
    rng = _witness_rng(n, seed)
    for _ in range(rounds):
        if not strong_probable_prime(n, rng.randrange(2, n - 1)):
            return False
    return True


def is_prime(n: int, rounds: int = DEFAULT_ROUNDS, seed: int | None = None) -> PrimalityVerdict:
    """Miller-Rabin primality test.

    Below :data:`DETERMINISTIC_BOUND` a fixed witness set makes the answer exact
    and the verdict is ``ProvenPrime``.  Above it, ``rounds`` extra random bases
    (drawn from a generator keyed on ``seed`` and ``n``) are tried and a pass is
    reported as ``ProbablePrime`` with error at most ``4**-rounds``.
    ``0`` and ``1`` are composite by convention.
    """
    _check_natural(n)
    if n >= DETERMINISTIC_BOUND and rounds < 1:
        raise DomainError("rounds must be >= 1 above the deterministic bound")
    if not probable_prime(n, rounds, seed):
        return COMPOSITE
    if n < DETERMINISTIC_BOUND:
        return PROVEN
    return PrimalityVerdict(Kind.PROBABLE_PRIME, rounds)


def trial_division_oracle(n: int) -> PrimalityVerdict:
    """Exact verdict by dividing by every prime up to ``isqrt(n)``."""
    _check_natural(n)
    if n > ORACLE_BOUND:
        raise CapacityError(f"{n} exceeds the trial-division bound {ORACLE_BOUND}")
    if n < 2:
        return COMPOSITE
    for p in sieve_primes(isqrt(n)):
        if n % p == 0:
            return COMPOSITE
    return PROVEN
