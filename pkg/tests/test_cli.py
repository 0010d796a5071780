import json

import pytest
from click.testing import CliRunner

from qtwist import cli
from qtwist.scalars import ConfigError


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    res = runner.invoke(cli.main, list(args))
    return res.exit_code, json.loads(res.output)


def test_roots(runner):
    code, data = invoke(runner, "roots", "--rank", "2")
    assert code == 0
    assert data["pbw_dimension"] == 6561
    assert sorted(map(tuple, data["positive_roots"])) == [(0, 1), (1, 0), (1, 1)]


def test_triples_listing(runner):
    code, data = invoke(runner, "triples", "--rank", "1")
    assert code == 0 and len(data["triples"]) == 1
    assert data["triples"][0]["solutions"] == 1
    _, a3 = invoke(runner, "triples", "--rank", "3")
    hit = [t for t in a3["triples"] if t["triple"]["T"] == {"1": 3}]
    assert len(hit) == 1 and hit[0]["solutions"] == 3
    _, a2 = invoke(runner, "triples", "--rank", "2")
    assert any(t["triple"]["T"] == {"1": 2} and t["solutions"] == 1 for t in a2["triples"])


def test_solve_s_pinned(runner):
    code, data = invoke(runner, "solve-s", "--rank", "3", "--triple", "1->3")
    assert code == 0 and data["count"] == 3


def test_verify_passes_and_is_deterministic(runner):
    args = ("verify", "--rank", "1", "--triple", "empty", "--traces", "--coadjoint", "1")
    first = runner.invoke(cli.main, list(args))
    second = runner.invoke(cli.main, list(args))
    assert first.exit_code == 0
    assert first.output == second.output
    assert json.loads(first.output)["ok"]


def test_verify_negative_control(runner):
    code, data = invoke(runner, "verify", "--rank", "1", "--triple", "empty", "--perturb")
    assert code == 1
    assert "cocycle" in data["failed"]
    assert data["checks"]["cocycle"]["first_residual_term"] is not None


@pytest.mark.parametrize("args", [
    ("verify", "--rank", "1", "--l", "4"),
    ("roots", "--type", "Z"),
    ("solve-s", "--rank", "2", "--triple", "1->1"),
    ("solve-s", "--rank", "3", "--triple", "1->3", "--solution", "7"),
    ("coadjoint", "--rank", "1", "--lambda", "x"),
    ("coadjoint", "--rank", "1", "--root", "2"),
])
def test_config_errors_exit_two(runner, args):
    code, data = invoke(runner, *args)
    assert code == 2
    assert data["reason"] == "config_error" and data["error"]


def test_example_a3(runner):
    code, data = invoke(runner, "example-a3")
    assert code == 0
    assert data["values"]["s2omega"] == [1, 2, 2, 1]
    assert data["values"]["G_r_orders"] == {"q": 9, "1": 27}
    assert all(data["checks"].values())


def test_coadjoint_verb(runner):
    code, data = invoke(runner, "coadjoint", "--rank", "1", "--lambda", "1/2", "--sign", "-")
    assert code == 0 and data["report"]["ok"]


def test_out_file(runner, tmp_path):
    target = tmp_path / "roots.json"
    res = runner.invoke(cli.main, ["roots", "--rank", "1", "--out", str(target)])
    assert res.exit_code == 0 and res.output == ""
    assert json.loads(target.read_text())["pbw_dimension"] == 27


@pytest.mark.parametrize("text,rank,expected", [
    ("a1+a3", 3, (1, 0, 1)),
    ("a2+1/2a3", 3, (0, 1, 2)),
    ("-a1", 2, (-1, 0)),
])
def test_parse_vector(text, rank, expected):
    from qtwist.radford import _lattice_vec
    from qtwist import cartan as C
    ld = C.compute_lattices(C.build_root_system("A", rank), C.make_triple({}), 3)
    assert _lattice_vec(ld, cli.parse_vector(text, rank)) == tuple(x % 3 for x in expected)


def test_parse_q_power():
    assert cli.parse_q_power("q", 3) == 1
    assert cli.parse_q_power("1", 3) == 0
    assert cli.parse_q_power("q^-1", 3) == 2
    with pytest.raises(ConfigError):
        cli.parse_q_power("z", 3)
