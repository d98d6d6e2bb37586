import itertools
import json

import pytest

from cubeterm.algebra import Subset
from cubeterm.cli import main, parse_bases
from cubeterm.errors import CubeTermError


@pytest.fixture
def gen(tmp_path, capsys):
    """Write a built-in example to a file and return its path."""
    def make(name, *params):
        path = tmp_path / f"{name}{'-'.join(map(str, params))}.json"
        assert main(["gen-example", name, *map(str, params), "-o", str(path)]) == 0
        capsys.readouterr()
        return str(path)
    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "--no-timestamp")
    return code, json.loads(out)


class TestCheckCross:
    def test_meet_compatible(self, gen, capsys):
        code, out, _ = run(capsys, "check-cross", gen("meet"), "--bases", "{0},{0}")
        assert code == 0 and out.strip() == "compatible"

    def test_maj_incompatible(self, gen, capsys):
        code, out, _ = run(capsys, "check-cross", gen("maj"), "--bases", "{1},{1},{1}")
        assert code == 1
        assert out.splitlines()[0] == "incompatible"
        code, report = run_json(capsys, "check-cross", gen("maj"), "--bases", "{1},{1},{1}")
        cert = report["result"]["certificate"]
        assert cert["symbol"] == "maj" and report["exit_code"] == 1

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"size": 2,\n "ops": [oops]}')
        code, _, err = run(capsys, "check-cross", str(bad), "--bases", "{0}")
        assert code == 2 and "bad.json" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(capsys, "find-blocker", str(tmp_path / "nope.json"))[0] == 2

    @pytest.mark.parametrize("bases", ["{0,1}", "{}", "{5}", "0,1", "{a}"])
    def test_bad_bases(self, gen, capsys, bases):
        assert run(capsys, "check-cross", gen("meet"), "--bases", bases)[0] == 2


class TestCubeDim:
    def test_z3(self, gen, capsys):
        code, out, _ = run(capsys, "cube-dim", gen("z3"))
        assert code == 0 and out.splitlines()[0] == "2"
        assert out.splitlines()[1].startswith("witness: ")

    def test_meet(self, gen, capsys):
        code, out, _ = run(capsys, "cube-dim", gen("meet"))
        assert code == 0 and out.splitlines()[0] == "none (blocker found)"
        code, report = run_json(capsys, "cube-dim", gen("meet"))
        assert report["result"]["dimension"] == "infinity"
        assert report["result"]["blocker"]["U"] == [0]
        assert report["result"]["blocker"]["B"] == [0, 1]

    def test_example_51(self, gen, capsys):
        code, out, _ = run(capsys, "cube-dim", gen("e51", 2, 2))
        assert code == 0 and out.splitlines()[0] == "3"

    def test_undecided(self, gen, capsys):
        code, out, _ = run(capsys, "cube-dim", gen("e51", 2, 2), "--max-d", "2")
        assert code == 3 and out.splitlines()[0] == "undecided"
        code, report = run_json(capsys, "cube-dim", gen("e51", 2, 2), "--max-d", "2")
        assert report["result"]["dimension"] is None

    def test_cap_from_environment(self, gen, capsys, monkeypatch):
        path = gen("meet")
        monkeypatch.setenv("CUBETERM_CAP", "2")
        code, _, err = run(capsys, "free-algebra", path)
        assert code == 2 and "2" in err
        assert run(capsys, "free-algebra", path, "--cap", "3")[0] == 0
        monkeypatch.setenv("CUBETERM_CAP", "1e7")
        monkeypatch.setenv("CUBETERM_MAX_WORK", "1")
        assert run(capsys, "free-algebra", path)[0] == 0  # the budget only bounds cube searches
        # the direct closure gives up; with no blocker a 4-cube term must exist
        code, report = run_json(capsys, "cube-dim", gen("e51", 3, 2))
        assert (code, report["result"]["dimension"]) == (0, 4)
        assert report["result"]["reason"] == "no blocker and all smaller dimensions refuted"
        monkeypatch.delenv("CUBETERM_MAX_WORK")
        code, report = run_json(capsys, "cube-dim", gen("e51", 3, 2))
        assert report["result"]["reason"] == "witness"
        monkeypatch.setenv("CUBETERM_CAP", "lots")
        assert run(capsys, "cube-dim", path)[0] == 2


class TestOtherCommands:
    def test_find_blocker(self, gen, capsys):
        code, report = run_json(capsys, "find-blocker", gen("meet"))
        assert code == 0
        assert report["result"]["blocker"] == {"U": [0], "B": [0, 1],
                                               "absorbing_variable": {"meet": 0}}
        assert run(capsys, "find-blocker", gen("z3"))[0] == 1

    def test_free_algebra_meet(self, gen, capsys):
        code, out, _ = run(capsys, "free-algebra", gen("meet"))
        lines = out.splitlines()
        assert code == 0 and lines[0] == "3 elements"
        assert [l.split()[1] for l in lines[1:]] == ["x", "y", "meet(x,y)"]

    def test_gen_example_is_deterministic(self, tmp_path, capsys):
        outputs = []
        for i in range(2):
            path = tmp_path / f"e{i}.json"
            assert main(["gen-example", "e51", "2", "2", "-o", str(path)]) == 0
            outputs.append(path.read_bytes())
        assert outputs[0] == outputs[1]
        capsys.readouterr()

    @pytest.mark.parametrize("argv", [["gen-example", "e51", "2"],
                                      ["gen-example", "e52", "2", "2"],
                                      ["gen-example", "chain", "x"],
                                      ["gen-example", "semilattice"]])
    def test_gen_example_errors(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_sweep_two_element(self, capsys):
        code, out, _ = run(capsys, "sweep", "groupoids-2")
        assert code == 0 and out.splitlines()[-1] == "dichotomy holds: 4/4"
        assert len(out.splitlines()) == 5


class TestReports:
    def test_report_file_matches_json_output(self, gen, tmp_path, capsys):
        path = tmp_path / "r.json"
        code, out, _ = run(capsys, "cube-dim", gen("z3"), "--json", "--no-timestamp",
                           "--report", str(path))
        assert path.read_text() == out
        assert json.loads(out)["command"] == "cube-dim"

    def test_timestamp_present_by_default(self, gen, capsys):
        code, out, _ = run(capsys, "find-blocker", gen("meet"), "--json")
        assert "timestamp" in json.loads(out)

    @pytest.mark.parametrize("argv", [("cube-dim", "z3"), ("cube-dim", "e51"),
                                      ("free-algebra", "meet"), ("check-cross", "maj")])
    def test_byte_identical_across_runs_and_threads(self, gen, capsys, argv):
        command, name = argv
        path = gen(name, *((2, 2) if name == "e51" else ()))
        extra = ["--bases", "{1},{1},{1}"] if command == "check-cross" else []
        outs = set()
        for threads, _ in itertools.product((1, 4), range(2)):
            outs.add(run(capsys, command, path, *extra, "--json", "--no-timestamp",
                         "--threads", str(threads))[1])
        assert len(outs) == 1


def test_parse_bases():
    assert parse_bases("{0},{0, 1}", 3) == [Subset.of(3, [0]), Subset.of(3, [0, 1])]
    with pytest.raises(CubeTermError):
        parse_bases("{3}", 3)
