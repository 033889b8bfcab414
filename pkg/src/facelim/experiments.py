"""Exhaustive partition experiments over the first L primes.

Every unordered split of the first ``L`` primes into ``(A, complement)`` is
visited once (``A`` always holds 2, so there are ``2**(L-1)`` of them) and both
resultants are tested for primality.  The index space is cut into contiguous
chunks; each chunk reduces to a :class:`ScanStats` and chunks merge by
commutative operations, so the outcome never depends on the worker count.
"""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Literal, Sequence

from facelim import arith
from facelim.fecore import Partition

log = logging.getLogger(__name__)

MAX_LENGTH = 25
Rule = Literal["multiplicity", "distinct"]
RULES: tuple[Rule, ...] = ("multiplicity", "distinct")
# "mr": Miller-Rabin, exact below arith.DETERMINISTIC_BOUND, seeded rounds above.
# "sprp2": a single base-2 round; counts base-2 strong pseudoprimes as prime.
POLICIES = ("mr", "sprp2")

_LOW_BITS = 10  # size of the precomputed low-product table is 2**_LOW_BITS
_SAMPLE_EVERY = 100  # coprimality spot check on 1% of partitions


class LengthOutOfRange(ValueError):
    pass


def _check_length(L: int, max_length: int = MAX_LENGTH) -> None:
    if not 1 <= L <= max_length:
        raise LengthOutOfRange(f"list length L={L} must lie in [1, {max_length}]")


def _primality(policy: str, rounds: int, seed: int | None) -> Callable[[int], bool]:
    if policy == "mr":
        return lambda n: arith.probable_prime(n, rounds, seed)
    if policy == "sprp2":
        return arith.sprp2
    raise ValueError(f"unknown primality policy {policy!r}; expected one of {POLICIES}")


def enumerate_partitions(L: int, max_length: int = MAX_LENGTH) -> Iterator[Partition]:
    """All ``2**(L-1)`` unordered partitions of the first L primes, exponents 1.

    Bit ``i`` of the index puts the ``(i+2)``-th prime on side A.
    """
    _check_length(L, max_length)
    primes = arith.first_n_primes(L)
    rest = primes[1:]
    for mask in range(1 << (L - 1)):
        a = [2] + [p for i, p in enumerate(rest) if mask >> i & 1]
        b = [p for i, p in enumerate(rest) if not mask >> i & 1]
        yield Partition(tuple(a), tuple(b))


@dataclass
class ScanStats:
    """Reduction of one chunk (or a whole run) of the partition space."""

    length: int
    partitions: int = 0
    primes_found: int = 0
    distinct: set[int] | None = None
    max_prime: int = 0
    min_prime: int = 0
    max_resultant: int = 0
    min_resultant: int = 0  # smallest resultant > 1
    coprime_checked: int = 0

    def merge(self, other: "ScanStats") -> "ScanStats":
        def lo(x: int, y: int) -> int:
            return min(v for v in (x, y) if v) if (x or y) else 0

        distinct = None
        if self.distinct is not None or other.distinct is not None:
            distinct = (self.distinct or set()) | (other.distinct or set())
        return ScanStats(
            length=self.length,
            partitions=self.partitions + other.partitions,
            primes_found=self.primes_found + other.primes_found,
            distinct=distinct,
            max_prime=max(self.max_prime, other.max_prime),
            min_prime=lo(self.min_prime, other.min_prime),
            max_resultant=max(self.max_resultant, other.max_resultant),
            min_resultant=lo(self.min_resultant, other.min_resultant),
            coprime_checked=self.coprime_checked + other.coprime_checked,
        )

    @property
    def distinct_found(self) -> int | None:
        return None if self.distinct is None else len(self.distinct)


def _scan_range(
    L: int,
    start: int,
    stop: int,
    policy: str,
    rounds: int,
    seed: int | None,
    collect_distinct: bool,
) -> ScanStats:
    test = _primality(policy, rounds, seed)
    primes = arith.first_n_primes(L)
    total = math.prod(primes)
    rest = primes[1:]
    k = min(len(rest), _LOW_BITS)
    low, high = rest[:k], rest[k:]
    low_a = [1]
    for p in low:
        low_a += [x * p for x in low_a]
    low_all = math.prod(low)
    low_b = [low_all // x for x in low_a]
    high_all = math.prod(high)

    found = 0
    distinct: set[int] | None = set() if collect_distinct else None
    max_p = min_p = max_r = min_r = 0
    checked = 0
    mask = start
    while mask < stop:
        h = mask >> k
        ha = 2 * math.prod(p for i, p in enumerate(high) if h >> i & 1)
        hb = high_all * 2 // ha
        base = h << k
        block_stop = min(stop, base + (1 << k))
        for lo in range(mask - base, block_stop - base):
            a = ha * low_a[lo]
            b = hb * low_b[lo]
            r_plus = a + b
            r_minus = a - b if a > b else b - a
            if (base + lo) % _SAMPLE_EVERY == 0:
                if math.gcd(r_plus, total) != 1 or math.gcd(r_minus, total) != 1:
                    raise AssertionError(f"coprimality violated at L={L}, index {base + lo}")
                checked += 1
            if r_plus > max_r:
                max_r = r_plus
            for r in (r_plus, r_minus):
                if r < 2:
                    continue
                if not min_r or r < min_r:
                    min_r = r
                if test(r):
                    found += 1
                    if r > max_p:
                        max_p = r
                    if not min_p or r < min_p:
                        min_p = r
                    if distinct is not None:
                        distinct.add(r)
        mask = block_stop
    return ScanStats(
        length=L,
        partitions=stop - start,
        primes_found=found,
        distinct=distinct,
        max_prime=max_p,
        min_prime=min_p,
        max_resultant=max_r,
        min_resultant=min_r,
        coprime_checked=checked,
    )


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    n = max(1, min(total, workers * 4))
    edges = [total * i // n for i in range(n + 1)]
    return [(edges[i], edges[i + 1]) for i in range(n) if edges[i] < edges[i + 1]]


def scan(
    L: int,
    *,
    policy: str = "mr",
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = 0,
    workers: int = 1,
    collect_distinct: bool = False,
    max_length: int = MAX_LENGTH,
) -> ScanStats:
    """Visit every partition of the first L primes and reduce the results."""
    _check_length(L, max_length)
    _primality(policy, rounds, seed)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    total = 1 << (L - 1)
    jobs = [(L, s, e, policy, rounds, seed, collect_distinct) for s, e in _chunks(total, workers)]
    if workers == 1:
        parts = [_scan_range(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan_range, *zip(*jobs)))
    stats = ScanStats(length=L)
    for part in parts:
        stats = stats.merge(part)
    if not collect_distinct:
        stats.distinct = None
    log.info("L=%d: %d partitions, %d primes", L, stats.partitions, stats.primes_found)
    return stats


# -- rows -------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentRow:
    list_length: int
    combinations: int
    primes_found: int
    ratio: float
    log2_combinations: float

    @classmethod
    def from_stats(cls, stats: ScanStats, rule: Rule = "multiplicity") -> "ExperimentRow":
        if rule == "multiplicity":
            found = stats.primes_found
        elif rule == "distinct":
            if stats.distinct is None:
                raise ValueError("distinct rule needs a scan with collect_distinct=True")
            found = len(stats.distinct)
        else:
            raise ValueError(f"unknown counting rule {rule!r}")
        return cls(
            list_length=stats.length,
            combinations=stats.partitions,
            primes_found=found,
            ratio=found / stats.partitions,
            log2_combinations=math.log2(stats.partitions),
        )


def _baseline(bits: int) -> float:
    return 1 / (bits * math.log(2)) if bits else math.nan


@dataclass(frozen=True)
class BitStatsRow:
    """Bit range of the primes produced at one L against the ``1/ln(2**bits)`` density."""

    list_length: int
    max_bit: int
    min_bit: int
    baseline_max: float
    baseline_min: float
    observed_ratio: float

    @classmethod
    def from_stats(cls, stats: ScanStats, rule: Rule = "multiplicity") -> "BitStatsRow":
        g = stats.max_prime.bit_length()
        h = stats.min_prime.bit_length()
        return cls(
            list_length=stats.length,
            max_bit=g,
            min_bit=h,
            baseline_max=_baseline(g),
            baseline_min=_baseline(h),
            observed_ratio=ExperimentRow.from_stats(stats, rule).ratio,
        )


def run_distribution(
    L: int,
    rule: Rule = "multiplicity",
    *,
    policy: str = "mr",
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = 0,
    workers: int = 1,
) -> ExperimentRow:
    """Count prime resultants over all partitions; ``R = 1`` never counts."""
    stats = scan(L, policy=policy, rounds=rounds, seed=seed, workers=workers,
                 collect_distinct=rule == "distinct")
    return ExperimentRow.from_stats(stats, rule)


def run_bit_stats(
    L: int,
    rule: Rule = "multiplicity",
    *,
    policy: str = "mr",
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = 0,
    workers: int = 1,
) -> BitStatsRow:
    """``g``/``h`` are the bit lengths of the largest and smallest prime resultant."""
    stats = scan(L, policy=policy, rounds=rounds, seed=seed, workers=workers,
                 collect_distinct=rule == "distinct")
    return BitStatsRow.from_stats(stats, rule)


def run_table(
    table: int,
    l_values: Iterable[int],
    rule: Rule = "multiplicity",
    *,
    policy: str = "mr",
    rounds: int = arith.DEFAULT_ROUNDS,
    seed: int | None = 0,
    workers: int = 1,
    max_length: int = MAX_LENGTH,
) -> list[ExperimentRow] | list[BitStatsRow]:
    if table not in (3, 4):
        raise ValueError(f"table must be 3 or 4, got {table}")
    row_type = ExperimentRow if table == 3 else BitStatsRow
    rows = []
    for L in l_values:
        stats = scan(L, policy=policy, rounds=rounds, seed=seed, workers=workers,
                     collect_distinct=rule == "distinct", max_length=max_length)
        rows.append(row_type.from_stats(stats, rule))
    return rows


# -- CSV --------------------------------------------------------------------

# column name -> dataclass field
TABLE3_COLUMNS = {
    "L": "list_length",
    "combinations": "combinations",
    "primes_found": "primes_found",
    "ratio": "ratio",
    "log2_combinations": "log2_combinations",
}
TABLE4_COLUMNS = {
    "L": "list_length",
    "max_bit": "max_bit",
    "min_bit": "min_bit",
    "baseline_max": "baseline_max",
    "baseline_min": "baseline_min",
    "observed_ratio": "observed_ratio",
}
_SCHEMAS = {ExperimentRow: TABLE3_COLUMNS, BitStatsRow: TABLE4_COLUMNS}


def _fmt(value: int | float) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def emit_csv(rows: Sequence[ExperimentRow | BitStatsRow], path: str | Path) -> Path:
    if not rows:
        raise ValueError("no rows to write")
    row_type = type(rows[0])
    if any(type(r) is not row_type for r in rows):
        raise TypeError("rows must all be of one type")
    columns = _SCHEMAS[row_type]
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(_fmt(getattr(row, f)) for f in columns.values())
    return path


def read_csv(path: str | Path) -> list[ExperimentRow] | list[BitStatsRow]:
    """Inverse of :func:`emit_csv`; the row type is chosen from the header."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        for row_type, columns in _SCHEMAS.items():
            if header == list(columns):
                break
        else:
            raise ValueError(f"{path}: unrecognised header {header}")
        types = {f.name: f.type for f in dataclasses.fields(row_type)}
        rows = []
        for values in reader:
            kwargs = {}
            for col, raw in zip(columns.values(), values):
                kwargs[col] = int(raw) if types[col] in (int, "int") else float(raw)
            rows.append(row_type(**kwargs))
    return rows


# -- configuration ----------------------------------------------------------


@dataclass
class RunConfig:
    table: int = 3
    l_values: list[int] = field(default_factory=lambda: list(range(1, 14, 2)))
    rule: Rule = "multiplicity"
    policy: str = "mr"
    workers: int = 1
    rounds: int = arith.DEFAULT_ROUNDS
    seed: int | None = 0
    out: str | None = None
    plot: str | None = None
    max_length: int = MAX_LENGTH

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if not self.l_values:
            raise LengthOutOfRange("no list lengths given")
        for L in self.l_values:
            _check_length(L, self.max_length)

    @classmethod
    def from_text(cls, text: str, **overrides) -> "RunConfig":
        return cls.from_mapping({**read_config_values(text), **overrides})

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        return cls.from_text(Path(path).read_text(), **overrides)

    @classmethod
    def from_mapping(cls, values: dict[str, object]) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)} | {"l_min", "l_max", "l_step"}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw: dict[str, object] = {}
        for key in ("table", "workers", "rounds", "max_length"):
            if values.get(key) is not None:
                kw[key] = int(values[key])
        for key in ("rule", "policy", "out", "plot"):
            if values.get(key) is not None:
                kw[key] = str(values[key])
        if "seed" in values:
            seed = values["seed"]
            kw["seed"] = None if seed in (None, "", "none") else int(seed)
        l_values = values.get("l_values")
        if isinstance(l_values, str):
            l_values = [int(v) for v in l_values.replace(" ", "").split(",") if v]
        if l_values is None and values.get("l_max") is not None:
            max_length = int(kw.get("max_length", MAX_LENGTH))
            _check_length(int(values["l_max"]), max_length)
            table = int(kw.get("table", 3))
            l_min = int(values.get("l_min") or (1 if table == 3 else 11))
            l_step = int(values.get("l_step") or 2)
            l_values = list(range(l_min, int(values["l_max"]) + 1, l_step))
        if l_values is not None:
            kw["l_values"] = list(l_values)
        return cls(**kw)


def read_config_values(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, dashes in keys become underscores."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key=value, got {line!r}")
        values[key.strip().replace("-", "_")] = raw.strip()
    return values
