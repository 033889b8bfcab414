import json

import pytest
from click.testing import CliRunner

from facelim.cli import cli


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args, **kw):
        return runner.invoke(cli, list(args), catch_exceptions=False, **kw)

    return invoke


def test_generate_worked_example(run):
    res = run("generate", "A=2^2*3^2;B=1")
    assert res.exit_code == 0
    assert res.stdout.splitlines() == [
        "A=2^2*3^2;B=1,plus,37,ProvenPrime",
        "A=2^2*3^2;B=1,minus,35,Composite",
    ]


def test_generate_smallest(run):
    res = run("generate", "A=2;B=1")
    assert res.stdout.splitlines() == ["A=2;B=1,plus,3,ProvenPrime", "A=2;B=1,minus,1,Composite"]


def test_generate_exhaustive_l3(run):
    res = run("generate", "--first-l", "3", "--strategy", "exhaustive")
    lines = res.stdout.splitlines()
    assert len(lines) == 8
    assert sum(line.endswith("Prime") for line in lines) == 7


def test_generate_no_prime_exit_code(run):
    res = run("generate", "A=2*3;B=5", "--filter5")
    # 11 prime, 1 not: still success
    assert res.exit_code == 0
    res = run("generate", "A=2^2*3^2;B=1", "--filter5")
    assert "A=2^2*3^2;B=1,minus,35,Filtered" in res.stdout.splitlines()
    res = run("generate", "A=7;B=2^3")  # 15 and 1
    assert res.exit_code == 1


def test_generate_random_prints_seed(run):
    res = run("generate", "--first-l", "6", "--strategy", "random", "--count", "4")
    seed = next(line for line in res.stderr.splitlines() if line.startswith("seed="))
    again = run("generate", "--first-l", "6", "--strategy", "random", "--count", "4",
                "--seed", seed.split("=")[1])
    assert again.stdout == res.stdout
    assert len(res.stdout.splitlines()) == 8
    big = run("generate", "--first-l", "20", "--strategy", "random", "--count", "2", "--seed", "1")
    assert len(big.stdout.splitlines()) == 4


@pytest.mark.parametrize(
    "args",
    [("generate", "A=4;B=1"), ("generate",), ("generate", "A=2", "--first-l", "3"),
     ("generate", "--first-l", "0"), ("generate", "A=2", "--bogus")],
)
def test_generate_usage_errors(run, args):
    assert run(*args).exit_code == 2


def test_generate_json_matches_text(run):
    text = run("generate", "A=2*3*5;B=1").stdout.splitlines()
    recs = [json.loads(line) for line in run("generate", "A=2*3*5;B=1", "--json").stdout.splitlines()]
    assert [",".join(str(v) for v in r.values()) for r in recs] == text


def test_probability_report(run):
    res = run("probability", "A=2^2*3^2;B=1")
    lines = res.stdout.splitlines()
    header = lines[0].split(",")
    minus = dict(zip(header, lines[2].split(",")))
    assert minus["R"] == "35" and minus["pi_C"] == "3" and minus["pi_P"] == "2"
    assert minus["p_prime"] == "0.6667" and minus["p_prime_exact"] == "2/3"
    res = run("probability", "A=2^2*3^2;B=1", "--exclude", "5", "--json")
    rec = json.loads(res.stdout.splitlines()[1])
    assert rec["p_prime_residual"] == "0.3333" and rec["p_prime_residual_exact"] == "1/3"


def test_probability_guaranteed_and_degenerate(run):
    lines = run("probability", "A=2*3;B=5").stdout.splitlines()
    assert lines[1].endswith("guaranteed prime")
    assert lines[2].endswith("degenerate")


def test_probability_capacity_error(run, monkeypatch):
    monkeypatch.setenv("FACELIM_SIEVE_LIMIT", "100")
    res = run("probability", "A=2^200;B=3")
    assert res.exit_code == 2


def test_category_commands(run):
    res = run("category", "mersenne", "p=7")
    assert res.exit_code == 0 and res.stdout == "Mersenne,p=7,127,ProvenPrime\n"
    res = run("category", "Mersenne", "p=11")
    assert res.exit_code == 1 and "2047,Composite" in res.stdout
    res = run("category", "primorial", "k=3", "sign=minus")
    assert res.stdout == "Primorial,k=3;sign=minus,29,ProvenPrime\n"
    assert run("category", "primorial", "k=3").exit_code == 2
    assert run("category", "nothing", "k=3").exit_code == 2
    assert run("category", "mersenne", "p=x").exit_code == 2
    assert run("category", "mersenne", "p").exit_code == 2


def test_category_constellation(run):
    res = run("category", "twin", "L=3")
    assert "twin,L=3;product=30,29,ProvenPrime" in res.stdout.splitlines()
    assert run("category", "twin", "L=1").exit_code == 1
    assert run("category", "twin", "L=3", "colour=red").exit_code == 2


def test_category_list(run):
    res = run("category", "--list")
    assert res.exit_code == 0
    assert any(line.startswith("Cullen,1,plus") for line in res.stdout.splitlines())


def test_check(run):
    res = run("check", "35")
    assert res.exit_code == 1 and res.stdout.startswith("35,Composite")
    assert run("check", "2147483647").exit_code == 0
    assert run("check", "1048577", "--oracle").exit_code == 1
    assert run("check", "banana").exit_code == 2
    big = run("check", str(2**127 - 1), "--rounds", "5", "--json")
    assert json.loads(big.stdout) == {"n": 2**127 - 1, "verdict": "ProbablePrime",
                                       "witness_rounds": 5}


def test_experiment_table3(run, tmp_path):
    out = tmp_path / "t3.csv"
    res = run("experiment", "--table", "3", "--l-max", "5", "--out", str(out))
    assert res.exit_code == 0
    rows = [line.split(",")[:3] for line in out.read_text().splitlines()[1:]]
    assert rows == [["1", "1", "1"], ["3", "4", "7"], ["5", "16", "25"]]
    assert res.stdout == out.read_text()


def test_experiment_table4(run, tmp_path):
    out = tmp_path / "t4.csv"
    run("experiment", "--table", "4", "--l-max", "11", "--out", str(out))
    assert out.read_text().splitlines()[1].startswith("11,38,11,")


@pytest.mark.parametrize("l_max", ["0", "26"])
def test_experiment_range_errors(run, tmp_path, l_max):
    res = run("experiment", "--table", "3", "--l-max", l_max, "--out", str(tmp_path / "x.csv"))
    assert res.exit_code == 2


def test_experiment_config_file(run, tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "cfg.csv"
    cfg.write_text(f"table=3\nl_values=3,5\nout={out}\nrule=distinct\n")
    run("experiment", "--config", str(cfg))
    assert [l.split(",")[2] for l in out.read_text().splitlines()[1:]] == ["6", "25"]
    # command line wins over the file
    run("experiment", "--config", str(cfg), "--l-max", "3", "--rule", "multiplicity")
    assert out.read_text().splitlines()[1:] == ["1,1,1,1.0,0.0", "3,4,7,1.75,2.0"]


def test_experiment_plot_and_replot(run, tmp_path):
    t3, t4 = tmp_path / "t3.csv", tmp_path / "t4.csv"
    fig = tmp_path / "fig1.svg"
    run("experiment", "--table", "3", "--l-max", "9", "--out", str(t3), "--plot", str(fig))
    assert fig.stat().st_size > 0
    run("experiment", "--table", "4", "--l-min", "1", "--l-max", "9", "--out", str(t4))
    replot = tmp_path / "replot.svg"
    res = run("plot", str(t3), str(replot), "--bits", str(t4))
    assert res.exit_code == 0 and replot.read_text().startswith("<?xml")
    assert run("plot", str(t3), str(replot), "--bits", str(t3)).exit_code == 2


def test_unknown_verb(run):
    assert run("frobnicate").exit_code == 2
