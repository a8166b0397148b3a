import json

import pytest

from cli.dependencies import EXIT_USAGE
from cli.main import app
from core.pdfa import eval_string_prob
from core.serialization import from_json
from models.test_set import TestSet
from repositories.test_set_repo import read_test_set, write_test_set


class TestEval:
    def test_test_set_with_references(self, runner, ladder, ladder_file, tmp_path):
        strings = [(), (0,), (1, 1)]
        test_file = tmp_path / "test.txt"
        write_test_set(
            TestSet(
                alphabet_size=2,
                strings=strings,
                references=[eval_string_prob(ladder, x) for x in strings],
            ),
            test_file,
        )
        out = tmp_path / "report.json"
        result = runner.invoke(
            app, ["eval", str(ladder_file), "--test-set", str(test_file), "--out", str(out)]
        )
        assert result.exit_code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["mse"] == 0.0
        assert report["n_strings"] == 3

    def test_sampled_against_teacher(self, runner, ladder_file, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            app,
            [
                "eval", str(ladder_file),
                "--teacher-pdfa", str(ladder_file),
                "--sample", "40",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["n_strings"] == 40
        assert report["max_abs_err"] == 0.0

    def test_needs_exactly_one_source(self, runner, ladder_file, tmp_path):
        result = runner.invoke(app, ["eval", str(ladder_file)])
        assert result.exit_code == EXIT_USAGE

    def test_references_or_teacher_required(self, runner, ladder_file, tmp_path):
        test_file = tmp_path / "test.txt"
        test_file.write_text("1 2\n1 0\n", encoding="utf-8")
        result = runner.invoke(app, ["eval", str(ladder_file), "--test-set", str(test_file)])
        assert result.exit_code == EXIT_USAGE

    def test_malformed_test_set(self, runner, ladder_file, tmp_path):
        test_file = tmp_path / "test.txt"
        test_file.write_text("1 2\n3 0 1\n", encoding="utf-8")
        result = runner.invoke(app, ["eval", str(ladder_file), "--test-set", str(test_file)])
        assert result.exit_code == EXIT_USAGE

    def test_tokens_outside_teacher_alphabet(self, runner, ladder_file, tmp_path):
        test_file = tmp_path / "test.txt"
        test_file.write_text("1 3\n1 2\n", encoding="utf-8")
        result = runner.invoke(
            app,
            ["eval", str(ladder_file), "--test-set", str(test_file), "--teacher-pdfa", str(ladder_file)],
        )
        assert result.exit_code == EXIT_USAGE


class TestGenerate:
    def test_writes_file(self, runner, tmp_path):
        out = tmp_path / "random.json"
        result = runner.invoke(
            app, ["generate", "--states", "4", "--alphabet", "3", "--seed", "1", "--out", str(out)]
        )
        assert result.exit_code == 0
        pdfa = from_json(out.read_text(encoding="utf-8"))
        assert (pdfa.n_states, pdfa.alphabet_size) == (4, 3)

    def test_same_seed_same_automaton(self, runner, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for path in paths:
            runner.invoke(
                app, ["generate", "--states", "3", "--alphabet", "2", "--out", str(path)]
            )
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_stdout(self, runner):
        result = runner.invoke(app, ["generate", "--states", "2", "--alphabet", "2"])
        assert result.exit_code == 0
        assert '"alphabet"' in result.stdout

    def test_invalid_size(self, runner):
        result = runner.invoke(app, ["generate", "--states", "0", "--alphabet", "2"])
        assert result.exit_code == EXIT_USAGE


class TestSample:
    def test_writes_test_set(self, runner, ladder, ladder_file, tmp_path):
        out = tmp_path / "test.txt"
        result = runner.invoke(
            app,
            ["sample", "--n", "25", "--teacher-pdfa", str(ladder_file), "--seed", "3", "--out", str(out)],
        )
        assert result.exit_code == 0
        test_set = read_test_set(out)
        assert len(test_set.strings) == 25
        for x, p in zip(test_set.strings, test_set.references, strict=True):
            assert p == pytest.approx(eval_string_prob(ladder, x))

    def test_negative_count(self, runner, ladder_file):
        result = runner.invoke(app, ["sample", "--n", "-1", "--teacher-pdfa", str(ladder_file)])
        assert result.exit_code == EXIT_USAGE

    def test_bad_continue_probability(self, runner, ladder_file):
        result = runner.invoke(
            app, ["sample", "--n", "5", "--teacher-pdfa", str(ladder_file), "--p-continue", "1.0"]
        )
        assert result.exit_code == EXIT_USAGE
