"""Prime generation with the factor elimination function ``|prod(A) +/- prod(B)|``."""

from facelim.arith import is_prime, prime_pi_exact, sieve_primes
from facelim.fecore import FEResult, Partition, PrimePower, evaluate, parse_partition

__all__ = [
    "FEResult",
    "Partition",
    "PrimePower",
    "evaluate",
    "is_prime",
    "parse_partition",
    "prime_pi_exact",
    "sieve_primes",
]
__version__ = "0.1.0"
