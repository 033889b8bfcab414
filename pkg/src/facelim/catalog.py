"""Named prime families written as factor elimination instances.

Each :class:`CategoryForm` maps integer parameters to the two multiplicand
lists of ``|prod(A) +/- prod(B)|``.  Many families use multiplicands that are
not prime (``n``, ``n - 1``, ``2**n - 1``, ...); those instances carry
``generalized=True`` and no :class:`~facelim.fecore.Partition`, because the
coprimality guarantee does not apply to them.

Conventions:

* Fermat numbers are ``2**(2**n) + 1``; the minus form is composite for n >= 1.
* Double Mersenne numbers are ``2**(2**p - 1) - 1``.
* Carol numbers ``(2**n - 1)**2 - 2`` are a difference, so the sign is minus.
* Proth and Thabit use ``2**n``, not ``2n``.
* Palindromic wing primes use ``10**((m - 1) // 2)`` with odd ``m``.
* The "Fibonacci" form is the primorial of the first k-1 primes plus p_k,
  which is not the usual Fibonacci prime definition.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Literal, Mapping

from facelim import arith
from facelim.fecore import InvalidPartition, Partition

Terms = list[tuple[int, int]]
FormSign = Literal["plus", "minus", "both"]


class UnknownCategory(KeyError):
    def __str__(self) -> str:
        return f"unknown category {self.args[0]!r}"


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class ParamSpec:
    name: str
    minimum: int
    maximum: int

    def check(self, value: int) -> None:
        if not self.minimum <= value <= self.maximum:
            raise ParameterError(
                f"{self.name}={value} outside [{self.minimum}, {self.maximum}]"
            )


@dataclass(frozen=True)
class CategoryForm:
    name: str
    params: tuple[ParamSpec, ...]
    sign: FormSign
    formula: str
    build: Callable[[Mapping[str, int]], tuple[Terms, Terms]] = field(repr=False)
    table: int = 1
    aliases: tuple[str, ...] = ()
    constraint: Callable[[Mapping[str, int]], str | None] | None = field(default=None, repr=False)
    companions: Callable[[Mapping[str, int]], tuple[int, ...]] | None = field(default=None, repr=False)
    note: str = ""
    acceptance: bool = True


@dataclass(frozen=True)
class Instance:
    category: str
    params: dict[str, int]
    sign: Literal["plus", "minus"]
    side_a: tuple[tuple[int, int], ...]
    side_b: tuple[tuple[int, int], ...]
    value: int
    partition: Partition | None

    @property
    def generalized(self) -> bool:
        """True when some multiplicand is not prime (or the sides overlap)."""
        return self.partition is None


@dataclass(frozen=True)
class Verification:
    instance: Instance
    verdict: arith.PrimalityVerdict
    companions: tuple[tuple[int, arith.PrimalityVerdict], ...] = ()

    @property
    def value(self) -> int:
        return self.instance.value


def _primes(k: int) -> Terms:
    return [(p, 1) for p in arith.first_n_primes(k)]


def _factorial_terms(n: int, step: int = 1) -> Terms:
    # prime factorisation of n! (step 1) or n!! (step 2)
    counts: Counter[int] = Counter()
    for m in range(n, 1, -step):
        x = m
        for p in arith.sieve_primes(arith.isqrt(x)):
            while x % p == 0:
                counts[p] += 1
                x //= p
        if x > 1:
            counts[x] += 1
    return sorted(counts.items())


def _p(*names_bounds: tuple[str, int, int]) -> tuple[ParamSpec, ...]:
    return tuple(ParamSpec(*nb) for nb in names_bounds)


def _proth_ok(p: Mapping[str, int]) -> str | None:
    if p["k"] % 2 == 0:
        return "k must be odd"
    if p["k"] >= 2 ** p["n"]:
        return "k must be < 2**n"
    return None


def _palindromic_ok(p: Mapping[str, int]) -> str | None:
    return None if p["m"] % 2 == 1 else "m must be odd"


def _solinas_ok(p: Mapping[str, int]) -> str | None:
    if p["c"] not in (-1, 1):
        return "c must be -1 or 1"
    if p["b"] >= p["a"]:
        return "need a > b"
    return None


def _half(n: int, other: int) -> Terms:
    # n * other / 2 with the halving applied to whichever factor is even
    return [(n // 2, 1), (other, 1)] if n % 2 == 0 else [(n, 1), (other // 2, 1)]


_BIG = 10**9

FORMS: tuple[CategoryForm, ...] = (
    CategoryForm(
        "Carol", _p(("n", 2, 64)), "minus", "(2^n - 1)^2 - 2",
        lambda p: ([(2 ** p["n"] - 1, 2)], [(2, 1)]),
    ),
    CategoryForm(
        "Centered decagonal", _p(("n", 2, _BIG)), "plus", "5n(n - 1) + 1",
        lambda p: ([(5, 1), (p["n"], 1), (p["n"] - 1, 1)], []),
    ),
    CategoryForm(
        "Centered heptagonal", _p(("n", 2, _BIG)), "plus", "7n(n - 1)/2 + 1",
        lambda p: ([(7, 1)] + _half(p["n"], p["n"] - 1), []),
    ),
    CategoryForm(
        "Centered square", _p(("n", 1, _BIG)), "plus", "2n(n + 1) + 1",
        lambda p: ([(2, 1), (p["n"], 1), (p["n"] + 1, 1)], []),
    ),
    CategoryForm(
        "Centered triangular", _p(("n", 1, _BIG)), "plus", "3n(n + 1)/2 + 1",
        lambda p: ([(3, 1)] + _half(p["n"], p["n"] + 1), []),
    ),
    CategoryForm(
        "Cuban I", _p(("n", 1, _BIG)), "plus", "3n(n + 1) + 1",
        lambda p: ([(3, 1), (p["n"], 1), (p["n"] + 1, 1)], []),
        aliases=("cuban", "cuban1"),
    ),
    CategoryForm(
        "Cuban II", _p(("n", 1, _BIG)), "plus", "3n(n + 2) + 2^2",
        lambda p: ([(3, 1), (p["n"], 1), (p["n"] + 2, 1)], [(2, 2)]),
        aliases=("cuban2",),
    ),
    CategoryForm(
        "Cullen", _p(("n", 1, 4096)), "plus", "n*2^n + 1",
        lambda p: ([(2, p["n"]), (p["n"], 1)], []),
    ),
    CategoryForm(
        "Double factorial", _p(("n", 2, 500)), "both", "n!! +/- 1",
        lambda p: (_factorial_terms(p["n"], 2), []),
    ),
    CategoryForm(
        "Double Mersenne", _p(("p", 1, 13)), "minus", "2^(2^p - 1) - 1",
        lambda p: ([(2, 2 ** p["p"] - 1)], []),
    ),
    CategoryForm(
        "Eisenstein", _p(("n", 1, _BIG)), "minus", "3n - 1",
        lambda p: ([(3, 1), (p["n"], 1)], []),
        note="Eisenstein primes without imaginary part",
    ),
    CategoryForm(
        "Euclid", _p(("k", 1, 500)), "plus", "p_k# + 1",
        lambda p: (_primes(p["k"]), []),
    ),
    CategoryForm(
        "Factorial", _p(("n", 2, 500)), "both", "n! +/- 1",
        lambda p: (_factorial_terms(p["n"]), []),
    ),
    CategoryForm(
        "Fermat", _p(("n", 0, 14)), "plus", "2^(2^n) + 1",
        lambda p: ([(2, 2 ** p["n"])], []),
    ),
    CategoryForm(
        "Fibonacci", _p(("k", 2, 500)), "plus", "p_(k-1)# + p_k",
        lambda p: (_primes(p["k"] - 1), [(arith.first_n_primes(p["k"])[-1], 1)]),
        note="table form, not the usual Fibonacci prime definition",
        acceptance=False,
    ),
    CategoryForm(
        "Gaussian", _p(("n", 1, _BIG)), "plus", "2^2 n + 3",
        lambda p: ([(2, 2), (p["n"], 1)], [(3, 1)]),
    ),
    CategoryForm(
        "Generalized Fermat base 10", _p(("n", 1, 2048)), "plus", "2^n 5^n + 1",
        lambda p: ([(2, p["n"]), (5, p["n"])], []),
        aliases=("gf10",),
    ),
    CategoryForm(
        "Kynea", _p(("n", 1, 64)), "minus", "(2^n + 1)^2 - 2",
        lambda p: ([(2 ** p["n"] + 1, 2)], [(2, 1)]),
    ),
    CategoryForm(
        "Leyland", _p(("m", 2, 300), ("n", 2, 300)), "plus", "m^n + n^m",
        lambda p: ([(p["n"], p["m"])], [(p["m"], p["n"])]),
    ),
    CategoryForm(
        "Mersenne", _p(("p", 1, 20000)), "minus", "2^p - 1",
        lambda p: ([(2, p["p"])], []),
    ),
    CategoryForm(
        "Odd", _p(("n", 1, _BIG)), "minus", "2n - 1",
        lambda p: ([(2, 1), (p["n"], 1)], []),
    ),
    CategoryForm(
        "Palindromic wing", _p(("a", 1, 9), ("b", 1, 9), ("m", 1, 199)), "both",
        "a(10^m - 1)/9 +/- b*10^((m - 1)/2)",
        lambda p: ([(p["a"] * (10 ** p["m"] - 1) // 9, 1)],
                   [(p["b"], 1), (10 ** ((p["m"] - 1) // 2), 1)]),
        constraint=_palindromic_ok,
    ),
    CategoryForm(
        "Pierpont", _p(("u", 0, 2000), ("v", 0, 2000)), "plus", "2^u 3^v + 1",
        lambda p: ([(2, p["u"]), (3, p["v"])], []),
    ),
    CategoryForm(
        "Fourth power plus one", _p(("n", 1, _BIG)), "plus", "n^4 + 1",
        lambda p: ([(p["n"], 4)], []),
        aliases=("n4+1", "quartic"),
    ),
    CategoryForm(
        "Primorial", _p(("k", 1, 500)), "both", "p_k# +/- 1",
        lambda p: (_primes(p["k"]), []),
    ),
    CategoryForm(
        "Proth", _p(("k", 1, _BIG), ("n", 1, 4096)), "plus", "k*2^n + 1",
        lambda p: ([(2, p["n"]), (p["k"], 1)], []),
        constraint=_proth_ok,
    ),
    CategoryForm(
        "Pythagorean", _p(("n", 1, _BIG)), "plus", "2^2 n + 1",
        lambda p: ([(2, 2), (p["n"], 1)], []),
    ),
    CategoryForm(
        "Quartan", _p(("x", 1, _BIG), ("y", 1, _BIG)), "plus", "x^4 + y^4",
        lambda p: ([(p["x"], 4)], [(p["y"], 4)]),
    ),
    CategoryForm(
        "Solinas", _p(("a", 2, 4096), ("b", 1, 4095), ("c", -1, 1)), "both",
        "2^a +/- (2^b + c)",
        lambda p: ([(2, p["a"])], [(2 ** p["b"] + p["c"], 1)]),
        constraint=_solinas_ok,
    ),
    CategoryForm(
        "Star", _p(("n", 2, _BIG)), "plus", "2*3*n(n - 1) + 1",
        lambda p: ([(2, 1), (3, 1), (p["n"], 1), (p["n"] - 1, 1)], []),
    ),
    CategoryForm(
        "Thabit", _p(("n", 0, 4096)), "minus", "3*2^n - 1",
        lambda p: ([(2, p["n"]), (3, 1)], []),
    ),
    CategoryForm(
        "Woodall", _p(("n", 1, 4096)), "minus", "n*2^n - 1",
        lambda p: ([(2, p["n"]), (p["n"], 1)], []),
    ),
    CategoryForm(
        "Sophie Germain", _p(("p", 2, _BIG)), "plus", "2p + 1",
        lambda p: ([(2, 1), (p["p"], 1)], []),
        table=2, companions=lambda p: (p["p"],),
    ),
    CategoryForm(
        "Safe", _p(("k", 1, _BIG)), "plus", "2k + 1",
        lambda p: ([(2, 1), (p["k"], 1)], []),
        table=2, companions=lambda p: (p["k"],),
    ),
    CategoryForm(
        "Residue class", _p(("a", 1, _BIG), ("n", 1, _BIG), ("d", 1, _BIG)), "plus",
        "a*n + d",
        lambda p: ([(p["a"], 1), (p["n"], 1)], [(p["d"], 1)]),
        table=2,
    ),
)


def _key(name: str) -> str:
    return re.sub(r"[\s_\-]|primes?$", "", name.lower())


_INDEX: dict[str, CategoryForm] = {}
for _form in FORMS:
    for _name in (_form.name, *_form.aliases):
        _INDEX[_key(_name)] = _form


def list_categories() -> list[CategoryForm]:
    return list(FORMS)


def get_category(name: str) -> CategoryForm:
    try:
        return _INDEX[_key(name)]
    except KeyError:
        raise UnknownCategory(name) from None


def _clean(terms: Terms) -> tuple[tuple[int, int], ...]:
    # 1 is the empty-side placeholder; zero exponents contribute nothing
    merged: Counter[int] = Counter()
    for base, exp in terms:
        if base != 1 and exp != 0:
            merged[base] += exp
    return tuple(sorted(merged.items()))


def _try_partition(a, b, label: str) -> Partition | None:
    try:
        return Partition(a, b, label=label)
    except InvalidPartition:
        return None


def instantiate(
    category: str, params: Mapping[str, int], sign: str | None = None
) -> Instance:
    """Build the factor elimination instance of a family member.

    ``sign`` is required for families listed with both signs and must agree
    with the family's sign otherwise.
    """
    form = get_category(category)
    names = {s.name for s in form.params}
    unknown = set(params) - names
    if unknown:
        raise ParameterError(f"{form.name} has no parameter(s) {sorted(unknown)}")
    missing = names - set(params)
    if missing:
        raise ParameterError(f"{form.name} needs parameter(s) {sorted(missing)}")
    for spec in form.params:
        spec.check(params[spec.name])
    if form.constraint and (msg := form.constraint(params)):
        raise ParameterError(f"{form.name}: {msg}")

    if sign in ("+",):
        sign = "plus"
    elif sign in ("-",):
        sign = "minus"
    if form.sign == "both":
        if sign not in ("plus", "minus"):
            raise ParameterError(f"{form.name} needs sign=plus or sign=minus")
    elif sign is None:
        sign = form.sign
    elif sign != form.sign:
        raise ParameterError(f"{form.name} only takes sign={form.sign}")

    raw_a, raw_b = form.build(params)
    a, b = _clean(raw_a), _clean(raw_b)
    prod_a = math.prod(base**exp for base, exp in a)
    prod_b = math.prod(base**exp for base, exp in b)
    value = prod_a + prod_b if sign == "plus" else abs(prod_a - prod_b)
    label = f"{form.name}({', '.join(f'{k}={params[k]}' for k in sorted(params))})"
    return Instance(
        category=form.name,
        params=dict(params),
        sign=sign,
        side_a=a,
        side_b=b,
        value=value,
        partition=_try_partition(a, b, label),
    )


def verify_category(
    category: str,
    params: Mapping[str, int],
    sign: str | None = None,
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = None,
) -> Verification:
    inst = instantiate(category, params, sign)
    form = get_category(category)
    companions = ()
    if form.companions:
        companions = tuple(
            (c, arith.is_prime(c, rounds, seed)) for c in form.companions(params)
        )
    return Verification(inst, arith.is_prime(inst.value, rounds, seed), companions)


# -- constellations ---------------------------------------------------------


@dataclass(frozen=True)
class ConstellationSpec:
    """Offsets ``y`` tried as ``|prod - y|`` and ``prod + y``, and the prime
    patterns (differences from the smallest member) that count as a hit.

    ``require_div3`` is the optional post-filter "at least one resultant is
    divisible by 3".  Excluding every prime factor of an offset from the
    product already forces ``3 | prod +/- 3``, so the filter only bites for
    offset sets without 3.
    """

    name: str
    offsets: tuple[int, ...]
    patterns: tuple[tuple[int, ...], ...]
    rule: str | None = None
    require_div3: bool = False

    def __post_init__(self) -> None:
        if not self.offsets or len(set(self.offsets)) != len(self.offsets):
            raise ValueError("offsets must be non-empty and distinct")
        if any(y < 1 for y in self.offsets):
            raise ValueError("offsets must be positive")


TWIN = ConstellationSpec("twin", (1,), ((0, 2),))
SEXY = ConstellationSpec("sexy", (3,), ((0, 6),))
TRIPLET = ConstellationSpec(
    "triplet", (1, 3, 5), ((0, 2, 6), (0, 4, 6)),
    rule="at least one resultant divisible by 3",
)
QUADRUPLET = ConstellationSpec(
    "quadruplet", (1, 3, 5), ((0, 2, 6, 8),),
    rule="at least one resultant divisible by 3",
)
CONSTELLATIONS = {s.name: s for s in (TWIN, SEXY, TRIPLET, QUADRUPLET)}

MAX_SEARCH_PRIMES = 24


@dataclass(frozen=True, order=True)
class Hit:
    product: int
    members: tuple[int, ...]
    core: tuple[int, ...] = field(compare=False)


def constellation_search(
    core_primes: int,
    spec: ConstellationSpec,
    exponent: int = 1,
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = None,
) -> list[Hit]:
    """Search products of subsets of the first ``core_primes`` primes.

    A prime dividing any offset is left out of the product, since it would
    otherwise sit on both sides.  Hits are sorted by product, then members.
    """
    if core_primes < 1:
        raise ParameterError("need at least one core prime")
    if core_primes > MAX_SEARCH_PRIMES:
        raise arith.CapacityError(
            f"{core_primes} core primes exceeds the search limit {MAX_SEARCH_PRIMES}"
        )
    if exponent < 1:
        raise ParameterError("exponent must be >= 1")
    banned = {p for y in spec.offsets for p in arith.sieve_primes(y) if y % p == 0}
    pool = [p for p in arith.first_n_primes(core_primes) if p not in banned]
    hits: set[Hit] = set()
    for size in range(1, len(pool) + 1):
        for core in combinations(pool, size):
            prod = math.prod(p**exponent for p in core)
            values = {abs(prod - y) for y in spec.offsets} | {prod + y for y in spec.offsets}
            if spec.require_div3 and not any(v % 3 == 0 for v in values):
                continue
            primes = {v for v in values if arith.probable_prime(v, rounds, seed)}
            for p in primes:
                for pattern in spec.patterns:
                    members = tuple(p + d for d in pattern)
                    if all(m in primes for m in members):
                        hits.add(Hit(prod, members, core))
    return sorted(hits)
