import csv
import io
import json

import pytest

from submax.cli import EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFY, main
from submax.core import CutFunctionSpec, ExplicitTableSpec, TightExampleSpec
from submax.errors import InvalidSpecError
from submax.instance import Instance, generate_instance, load_instance, save_instance
from submax.knapsack_solver import KnapsackConstraint
from submax.matroid import PartitionMatroid, UniformMatroid
from submax.packing_solver import PackingConstraint
from submax.runner import CSV_COLUMNS, RunParams, UsageError, run, verify

# f is 1 on {1, 2} and 0 elsewhere: supermodular, so the greedy guarantees do not apply
SUPERMODULAR = ExplicitTableSpec(3, (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0))


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def tight_file(tmp_path):
    path = tmp_path / "tight.json"
    save_instance(generate_instance("tight", 8, epsilon=0.01), path)
    return path


class TestInstanceFiles:
    @pytest.mark.parametrize(
        "inst",
        [
            Instance(3, CutFunctionSpec(3, ((0, 1, 0.5), (1, 2, 0.25))), UniformMatroid(3, 2)),
            Instance(2, ExplicitTableSpec(2, (0.0, 1.0, 1.0, 1.5)), PartitionMatroid.from_lists(2, [[0], [1]], [1, 0])),
            Instance(4, TightExampleSpec(4, 0.1), KnapsackConstraint.of([1, 1, 1, 1], 4)),
            Instance(2, ExplicitTableSpec(2, (0.0, 1.0, 1.0, 1.5)), PackingConstraint.of([[0.5, 1.0]], [2.0])),
        ],
    )
    def test_round_trip(self, inst, tmp_path):
        path = tmp_path / "i.json"
        save_instance(inst, path)
        assert load_instance(path) == inst
        assert Instance.from_json(json.loads(inst.dumps())) == inst

    @pytest.mark.parametrize(
        "data",
        [
            {"n": 2},
            {"n": 0, "function": {"kind": "table", "values": [0.0]}, "constraint": {"kind": "uniform", "k": 0}},
            {"n": 2, "function": {"kind": "wave"}, "constraint": {"kind": "uniform", "k": 1}},
            {"n": 2, "function": {"kind": "table", "values": [0, 1, 1, 1]}, "constraint": {"kind": "ring"}},
            {"n": 2, "function": {"kind": "table", "values": [0, 1, 1, 1]}, "constraint": {"kind": "knapsack", "costs": [1], "budget": 1}},
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(InvalidSpecError):
            Instance.from_json(data)

    def test_generator_is_seeded(self):
        a = generate_instance("cut", 9, seed=4, constraint="partition")
        assert a == generate_instance("cut", 9, seed=4, constraint="partition")
        assert a != generate_instance("cut", 9, seed=5, constraint="partition")

    def test_generator_defaults(self):
        assert generate_instance("table", 5).constraint == UniformMatroid(5, 3)
        assert generate_instance("tight", 6).constraint == KnapsackConstraint.of([1] * 6, 6)
        assert generate_instance("cut", 6, constraint="packing", m=2, width=7.0).constraint.width() >= 7.0


class TestRunner:
    def test_incompatible(self):
        inst = generate_instance("cut", 6)
        with pytest.raises(UsageError):
            run(inst, "twin", RunParams())
        with pytest.raises(UsageError):
            run(inst, "simulated-annealing", RunParams())

    def test_record_fields(self):
        inst = generate_instance("tight", 8, epsilon=0.1)
        record, _ = run(inst, "twin", RunParams(tie_break="alternate-solutions"), "t", opt_value=6.0, timing=False)
        assert record.value == pytest.approx(2.6) and record.ratio == pytest.approx(2.6 / 6)
        assert record.epsilon is None and record.seed is None and record.ms is None
        assert len(record.csv_row()) == len(CSV_COLUMNS)

    def test_verify_fails_on_supermodular(self):
        inst = Instance(3, SUPERMODULAR, KnapsackConstraint.of([1, 1, 1], 2))
        assert verify(inst, "enum-twin", RunParams()).status == "pass"
        assert verify(inst, "twin", RunParams()).status == "fail"

    def test_random_greedy_unchecked(self):
        assert verify(generate_instance("cut", 6), "random-greedy", RunParams()).status == "unchecked"

    @pytest.mark.parametrize("algo", ["mult-updates", "packing"])
    def test_precondition_unmet(self, algo):
        inst = generate_instance("cut", 6, constraint="packing", width=1.0)
        ver = verify(inst, algo, RunParams(epsilon=0.1))
        assert ver.status == "precondition-unmet" and ver.passed

    @pytest.mark.parametrize("algo", ["mult-updates", "packing"])
    def test_packing_pass(self, algo):
        inst = generate_instance("cut", 8, constraint="packing", width=40.0)
        assert verify(inst, algo, RunParams(epsilon=0.2)).status == "pass"


class TestGenerateCommand:
    def test_byte_stable(self, capsys):
        _, first, _ = cli(capsys, "generate", "--kind", "cut", "--n", 7, "--seed", 3, "--constraint", "knapsack")
        _, second, _ = cli(capsys, "generate", "--kind", "cut", "--n", 7, "--seed", 3, "--constraint", "knapsack")
        assert first == second
        assert Instance.from_json(json.loads(first)).n == 7

    def test_writes_file(self, capsys, tmp_path):
        path = tmp_path / "x.json"
        code, out, _ = cli(capsys, "generate", "--kind", "table", "--n", 4, "-o", path)
        assert code == 0 and out == ""
        assert load_instance(path).n == 4

    def test_n_zero_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--kind", "cut", "--n", "0"])
        assert exc.value.code == EXIT_USAGE

    def test_cut_needs_two_vertices(self, capsys):
        code, _, err = cli(capsys, "generate", "--kind", "cut", "--n", 1)
        assert code == EXIT_USAGE and "n >= 2" in err


class TestSolveCommand:
    @pytest.mark.parametrize("eps,want", [(0.01, 2.51), (0.1, 2.6)])
    def test_tight_example(self, capsys, tmp_path, eps, want):
        path = tmp_path / "t.json"
        cli(capsys, "generate", "--kind", "tight", "--n", 8, "--epsilon", eps, "-o", path)
        code, out, _ = cli(capsys, "solve", path, "--algo", "twin", "--tie-break", "alternate-solutions")
        assert code == 0
        record = json.loads(out)
        assert record["value"] == pytest.approx(want)
        assert record["solution"] == [0, 2, 4, 6]

    def test_no_timing_is_byte_stable(self, capsys, tight_file):
        a = cli(capsys, "solve", tight_file, "--algo", "enum-twin", "--no-timing")[1]
        b = cli(capsys, "solve", tight_file, "--algo", "enum-twin", "--no-timing")[1]
        assert a == b and json.loads(a)["ms"] is None

    def test_algo_mismatch(self, capsys, tight_file):
        code, _, err = cli(capsys, "solve", tight_file, "--algo", "derand-greedy")
        assert code == EXIT_USAGE and "matroid" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = cli(capsys, "solve", tmp_path / "nope.json", "--algo", "twin")
        assert code == EXIT_USAGE

    def test_bad_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert cli(capsys, "solve", path, "--algo", "twin")[0] == EXIT_USAGE


class TestExactAndVerify:
    def test_exact(self, capsys, tight_file):
        code, out, _ = cli(capsys, "exact", tight_file)
        assert code == 0
        assert json.loads(out) == {"opt_value": 6.0, "opt_set": [2, 3, 4, 5, 6, 7], "enumerated": 256}

    def test_exact_resource_limit(self, capsys, tmp_path):
        path = tmp_path / "big.json"
        save_instance(generate_instance("cut", 21, constraint="uniform", k=2), path)
        assert cli(capsys, "exact", path)[0] == EXIT_RESOURCE

    def test_verify_pass(self, capsys, tight_file):
        code, out, _ = cli(capsys, "verify", tight_file, "--algo", "enum-twin", "--no-timing")
        assert code == 0 and json.loads(out)["status"] == "pass"

    def test_verify_fail_exit_code(self, capsys, tmp_path):
        path = tmp_path / "super.json"
        save_instance(Instance(3, SUPERMODULAR, KnapsackConstraint.of([1, 1, 1], 2)), path)
        code, out, _ = cli(capsys, "verify", path, "--algo", "twin")
        assert code == EXIT_VERIFY and json.loads(out)["status"] == "fail"

    def test_verify_precondition_annotation(self, capsys, tmp_path):
        path = tmp_path / "p.json"
        save_instance(generate_instance("cut", 6, constraint="packing", width=1.0), path)
        code, out, _ = cli(capsys, "verify", path, "--algo", "packing")
        assert code == 0
        body = json.loads(out)
        assert body["status"] == "precondition-unmet" and "width" in body["note"]


class TestBenchCommand:
    def test_empty_corpus(self, capsys, tmp_path):
        code, out, _ = cli(capsys, "bench", tmp_path)
        assert code == 0 and out == ",".join(CSV_COLUMNS) + "\n"

    def test_missing_corpus(self, capsys, tmp_path):
        assert cli(capsys, "bench", tmp_path / "none")[0] == EXIT_USAGE

    def test_three_by_two(self, capsys, tmp_path):
        for seed in range(3):
            save_instance(generate_instance("cut", 6, seed=seed, constraint="knapsack"), tmp_path / f"k{seed}.json")
        code, out, _ = cli(capsys, "bench", tmp_path, "--algos", "twin,enum-twin", "--with-opt", "--no-timing")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 6
        assert {r["algo"] for r in rows} == {"twin", "enum-twin"}
        assert all(r["opt_value"] and r["ms"] == "" for r in rows)

    def test_compatible_algorithms_by_default(self, capsys, tmp_path):
        save_instance(generate_instance("cut", 6, constraint="uniform"), tmp_path / "m.json")
        out = cli(capsys, "bench", tmp_path, "--no-timing")[1]
        assert [r["algo"] for r in csv.DictReader(io.StringIO(out))] == ["random-greedy", "derand-greedy"]

    def test_unknown_algo(self, capsys, tmp_path):
        assert cli(capsys, "bench", tmp_path, "--algos", "bogus")[0] == EXIT_USAGE

    def test_threads_give_same_csv(self, capsys, tmp_path, monkeypatch):
        for seed in range(3):
            save_instance(generate_instance("table", 6, seed=seed, constraint="knapsack"), tmp_path / f"t{seed}.json")
        serial = cli(capsys, "bench", tmp_path, "--algos", "twin,threshold-twin", "--no-timing")[1]
        monkeypatch.setenv("SUBMAX_THREADS", "2")
        parallel = cli(capsys, "bench", tmp_path, "--algos", "twin,threshold-twin", "--no-timing")[1]
        assert serial == parallel

    def test_bad_thread_setting(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("SUBMAX_THREADS", "many")
        assert cli(capsys, "bench", tmp_path)[0] == EXIT_USAGE
