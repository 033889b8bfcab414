"""Command line front end.

Exit codes: 0 success (a prime was found / the number is prime), 1 no prime
or composite, 2 usage error.  Output is comma-delimited text, or JSON lines
with the same fields under ``--json``.
"""

from __future__ import annotations

import json
import logging
import random
import secrets
import sys
from fractions import Fraction
from pathlib import Path

import click

from facelim import arith, catalog, experiments, fecore
from facelim.fecore import SIGNS, Partition

log = logging.getLogger("facelim")


def _fail_usage(exc: Exception) -> "click.UsageError":
    return click.UsageError(str(exc))


def _emit(records: list[dict], as_json: bool, header: bool = False) -> None:
    if as_json:
        for rec in records:
            click.echo(json.dumps(rec))
        return
    if header and records:
        click.echo(",".join(records[0]))
    for rec in records:
        click.echo(",".join("" if v is None else str(v) for v in rec.values()))


def _parse_partition(text: str) -> Partition:
    try:
        return fecore.parse_partition(text)
    except ValueError as exc:
        raise _fail_usage(exc) from exc


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose: bool) -> None:
    """Factor elimination prime toolkit."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


# -- generate ---------------------------------------------------------------


@cli.command()
@click.argument("partition", required=False)
@click.option("--first-l", "first_l", type=int, help="Use partitions of the first L primes.")
@click.option("--strategy", type=click.Choice(["exhaustive", "random"]), default="exhaustive",
              show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=10, show_default=True,
              help="Partitions to draw with --strategy random.")
@click.option("--seed", type=int, help="Seed for random draws and Miller-Rabin witnesses.")
@click.option("--rounds", type=click.IntRange(min=1), default=arith.DEFAULT_ROUNDS,
              show_default=True)
@click.option("--filter5", is_flag=True, help="Skip resultants the last-digit rule marks as multiples of 5.")
@click.option("--json", "as_json", is_flag=True)
def generate(partition, first_l, strategy, count, seed, rounds, filter5, as_json):
    """Evaluate R+ and R- for a partition such as "A=2^2*3^2;B=1"."""
    if (partition is None) == (first_l is None):
        raise click.UsageError("give either a PARTITION or --first-l")
    if partition is not None:
        parts = [_parse_partition(partition)]
    else:
        if not 1 <= first_l <= experiments.MAX_LENGTH:
            raise click.UsageError(f"--first-l must lie in [1, {experiments.MAX_LENGTH}]")
        if strategy == "exhaustive":
            parts = experiments.enumerate_partitions(first_l)
        else:
            if seed is None:
                seed = secrets.randbelow(2**32)
                click.echo(f"seed={seed}", err=True)
            rng = random.Random(seed)
            all_parts = None
            total = 1 << (first_l - 1)
            picks = [rng.randrange(total) for _ in range(count)]
            if first_l <= 16:
                all_parts = list(experiments.enumerate_partitions(first_l))
                parts = [all_parts[i] for i in picks]
            else:
                parts = [_partition_at(first_l, i) for i in picks]

    records = []
    any_prime = False
    for part in parts:
        res = fecore.evaluate(part)
        for sign in SIGNS:
            r = res.resultant(sign)
            if filter5 and fecore.mod5_last_digit_filter(res.product_a, res.product_b, sign):
                verdict = "Filtered"
            else:
                v = arith.is_prime(r, rounds, seed)
                any_prime |= v.is_prime
                verdict = str(v)
            records.append({"partition": part.to_text(), "sign": sign, "value": r,
                            "verdict": verdict})
    _emit(records, as_json)
    sys.exit(0 if any_prime else 1)


def _partition_at(L: int, index: int) -> Partition:
    primes = arith.first_n_primes(L)
    rest = primes[1:]
    a = [2] + [p for i, p in enumerate(rest) if index >> i & 1]
    b = [p for i, p in enumerate(rest) if not index >> i & 1]
    return Partition(tuple(a), tuple(b))


# -- check ------------------------------------------------------------------


@cli.command()
@click.argument("n")
@click.option("--rounds", type=click.IntRange(min=1), default=arith.DEFAULT_ROUNDS,
              show_default=True)
@click.option("--seed", type=int)
@click.option("--oracle", is_flag=True, help="Use trial division instead (n <= 10^12).")
@click.option("--json", "as_json", is_flag=True)
def check(n, rounds, seed, oracle, as_json):
    """Test N for primality."""
    try:
        value = int(n)
        verdict = arith.trial_division_oracle(value) if oracle else arith.is_prime(value, rounds, seed)
    except ValueError as exc:
        raise _fail_usage(exc) from exc
    _emit([{"n": value, "verdict": str(verdict), "witness_rounds": verdict.witness_rounds}],
          as_json)
    sys.exit(0 if verdict.is_prime else 1)


# -- probability ------------------------------------------------------------


def _fmt_fraction(x: Fraction) -> str:
    return f"{float(x):.4f}"


@cli.command()
@click.argument("partition")
@click.option("--exclude", default="", help="Comma separated excluded primes (the residual set).")
@click.option("--json", "as_json", is_flag=True)
def probability(partition, exclude, as_json):
    """Prime-count estimates for both resultants of PARTITION."""
    part = _parse_partition(partition)
    try:
        excluded = [int(t) for t in exclude.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise _fail_usage(exc) from exc
    res = fecore.evaluate(part)
    complete = part.is_complete_prefix()
    records = []
    for sign in SIGNS:
        rec = {"sign": sign, "R": res.resultant(sign), "P": res.p_max}
        try:
            est = fecore.probability_estimate(res, sign, excluded)
        except fecore.DegenerateInput:
            status = "degenerate"
            est = None
        except ValueError as exc:
            raise _fail_usage(exc) from exc
        else:
            guaranteed = fecore.is_guaranteed_prime(res, sign, complete)
            status = "guaranteed prime" if guaranteed else "estimate"
        if est is None:
            rec.update(dict.fromkeys(
                ["C", "pi_C", "pi_P", "N", "N_approx", "p_divisible", "p_prime",
                 "p_prime_exact", "residual_count", "p_prime_residual",
                 "p_prime_residual_exact"]))
        else:
            rec.update({
                "C": f"{est.c:.4f}",
                "pi_C": est.pi_c,
                "pi_P": est.pi_p,
                "N": est.n_exact,
                "N_approx": f"{est.n_approx:.4f}",
                "p_divisible": _fmt_fraction(est.p_divisible),
                "p_prime": _fmt_fraction(est.p_prime),
                "p_prime_exact": str(est.p_prime),
                "residual_count": est.residual_count,
                "p_prime_residual": _fmt_fraction(est.p_prime_residual),
                "p_prime_residual_exact": str(est.p_prime_residual),
            })
        rec["status"] = status
        records.append(rec)
    _emit(records, as_json, header=True)


# -- category ---------------------------------------------------------------


def _parse_params(items: tuple[str, ...]) -> dict[str, str]:
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise click.UsageError(f"expected name=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


@cli.command()
@click.argument("name", required=False)
@click.argument("params", nargs=-1)
@click.option("--list", "list_all", is_flag=True, help="List known categories and exit.")
@click.option("--rounds", type=click.IntRange(min=1), default=arith.DEFAULT_ROUNDS,
              show_default=True)
@click.option("--seed", type=int)
@click.option("--json", "as_json", is_flag=True)
def category(name, params, list_all, rounds, seed, as_json):
    """Instantiate and test a prime family member, e.g. `category mersenne p=7`.

    Constellations (twin, sexy, triplet, quadruplet) take L=<core primes>.
    """
    if list_all:
        records = [{"category": f.name, "table": f.table, "sign": f.sign,
                    "params": " ".join(p.name for p in f.params), "form": f.formula}
                   for f in catalog.list_categories()]
        records += [{"category": s.name, "table": 2, "sign": "both", "params": "L",
                     "form": " ".join(f"+/-{y}" for y in s.offsets)}
                    for s in catalog.CONSTELLATIONS.values()]
        _emit(records, as_json, header=True)
        return
    if name is None:
        raise click.UsageError("missing category NAME")
    raw = _parse_params(params)
    key = name.lower()
    if key in catalog.CONSTELLATIONS:
        sys.exit(_constellation(key, raw, rounds, seed, as_json))
    sign = raw.pop("sign", None)
    try:
        values = {k: int(v) for k, v in raw.items()}
        result = catalog.verify_category(name, values, sign, rounds, seed)
    except (ValueError, KeyError) as exc:
        raise _fail_usage(exc) from exc
    shown = ";".join(f"{k}={v}" for k, v in values.items())
    if sign:
        shown += f";sign={result.instance.sign}"
    records = [{"category": result.instance.category, "params": shown,
                "value": result.value, "verdict": str(result.verdict)}]
    for value, verdict in result.companions:
        records.append({"category": result.instance.category, "params": shown + ";companion",
                        "value": value, "verdict": str(verdict)})
    _emit(records, as_json)
    ok = result.verdict.is_prime and all(v.is_prime for _, v in result.companions)
    sys.exit(0 if ok else 1)


def _constellation(key: str, raw: dict[str, str], rounds, seed, as_json) -> int:
    spec = catalog.CONSTELLATIONS[key]
    try:
        L = int(raw.pop("L", raw.pop("l", "0")))
        exponent = int(raw.pop("exponent", "1"))
        if raw.pop("div3", "0") not in ("0", "false", "no"):
            spec = catalog.ConstellationSpec(spec.name, spec.offsets, spec.patterns,
                                             spec.rule, require_div3=True)
        if raw:
            raise ValueError(f"unknown parameter(s) {sorted(raw)}")
        hits = catalog.constellation_search(L, spec, exponent, rounds, seed)
    except ValueError as exc:
        raise _fail_usage(exc) from exc
    records = []
    for hit in hits:
        params = f"L={L};product={hit.product}"
        for member in hit.members:
            records.append({"category": spec.name, "params": params, "value": member,
                            "verdict": str(arith.is_prime(member, rounds, seed))})
    _emit(records, as_json)
    return 0 if hits else 1


# -- experiment -------------------------------------------------------------


@cli.command()
@click.option("--table", type=click.Choice(["3", "4"]), help="3: prime counts, 4: bit ranges.")
@click.option("--l-max", "l_max", type=int, help="Largest list length L.")
@click.option("--l-min", "l_min", type=int, help="Smallest L (default 1 for table 3, 11 for table 4).")
@click.option("--l-step", "l_step", type=int, help="Step between list lengths (default 2).")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV output path.")
@click.option("--plot", type=click.Path(dir_okay=False), help="Also render the figure here.")
@click.option("--workers", type=click.IntRange(min=1))
@click.option("--rule", type=click.Choice(experiments.RULES))
@click.option("--policy", type=click.Choice(experiments.POLICIES),
              help="mr (default): Miller-Rabin; sprp2: single base-2 round.")
@click.option("--rounds", type=click.IntRange(min=1))
@click.option("--seed", type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key=value file; command line options take precedence.")
def experiment(table, l_max, l_min, l_step, out, plot, workers, rule, policy, rounds, seed,
               config_path):
    """Enumerate every partition of the first L primes and tabulate the results."""
    values: dict[str, object] = {}
    if config_path:
        try:
            values = experiments.read_config_values(Path(config_path).read_text())
        except ValueError as exc:
            raise _fail_usage(exc) from exc
    cli_values = {"table": table, "l_max": l_max, "l_min": l_min, "l_step": l_step,
                  "out": out, "plot": plot, "workers": workers, "rule": rule,
                  "policy": policy, "rounds": rounds, "seed": seed}
    if l_max is not None:
        values.pop("l_values", None)
    values.update({k: v for k, v in cli_values.items() if v is not None})
    if "l_max" not in values and "l_values" not in values:
        raise click.UsageError("--l-max is required")
    try:
        cfg = experiments.RunConfig.from_mapping(values)
    except ValueError as exc:
        raise _fail_usage(exc) from exc

    rows = experiments.run_table(
        cfg.table, cfg.l_values, cfg.rule, policy=cfg.policy, rounds=cfg.rounds,
        seed=cfg.seed, workers=cfg.workers, max_length=cfg.max_length,
    )
    out_path = Path(cfg.out or f"table{cfg.table}.csv")
    experiments.emit_csv(rows, out_path)
    click.echo(out_path.read_text(), nl=False)
    click.echo(f"wrote {out_path}", err=True)
    if cfg.plot:
        from facelim.plotting import emit_plot

        emit_plot(rows, cfg.plot)
        click.echo(f"wrote {cfg.plot}", err=True)


# -- plot -------------------------------------------------------------------


@cli.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--bits", "bits_path", type=click.Path(exists=True, dir_okay=False),
              help="Table 4 CSV supplying the baseline curves.")
def plot(csv_path, out, bits_path):
    """Render the ratio curve from an experiment CSV."""
    from facelim.plotting import emit_plot

    try:
        rows = experiments.read_csv(csv_path)
        bit_rows = experiments.read_csv(bits_path) if bits_path else None
        if bit_rows is not None and not all(
            isinstance(r, experiments.BitStatsRow) for r in bit_rows
        ):
            raise ValueError("--bits needs a table 4 CSV")
        emit_plot(rows, out, bit_rows)
    except ValueError as exc:
        raise _fail_usage(exc) from exc
    click.echo(f"wrote {out}", err=True)


def main() -> None:
    cli(prog_name="facelim")


if __name__ == "__main__":
    main()
