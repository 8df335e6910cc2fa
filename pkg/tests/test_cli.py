"""Subcommand behavior: exit codes, printed results, file-to-file plumbing.

Each test drives run() in-process. The slower full-pipeline walk lives in
the acceptance suite; here every stage gets a small, fast exercise.
"""

import json

import pytest

from unirule.arena import PairwiseJudgment, read_judgments, write_judgments
from unirule.cli import PipelineConfig, run
from unirule.generation import read_traces

LANGS = ("splunk", "elastic", "snort")


def make_judgment(method_a, method_b, outcome, i=0):
    return PairwiseJudgment(
        scenario=("splunk", "cti"),
        instance_id=f"inst-{i}",
        method_a=method_a,
        method_b=method_b,
        presented_order="ab",
        outcome=outcome,
        judge_id="fixture",
    )


@pytest.fixture
def two_method_judgments(tmp_path):
    """75 unirule wins over baseline, 25 losses: xi_unirule = ln 3."""
    judgments = [
        make_judgment("baseline", "unirule", "b", i) for i in range(75)
    ] + [make_judgment("baseline", "unirule", "a", i) for i in range(25)]
    path = tmp_path / "judgments.jsonl"
    write_judgments(path, judgments)
    return path


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["fit", "--judgments", "x.jsonl", "--no-such-flag"])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_input_is_operational_error(self, tmp_path, capsys):
        code = run(["fit", "--judgments", str(tmp_path / "absent.jsonl")])
        assert code == 1
        err = capsys.readouterr().err
        assert err.startswith("error: ")
        assert err.count("\n") == 1

    def test_bad_config_file_is_operational_error(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text('{"no_such_key": 1}')
        code = run(["--config", str(config), "formal"])
        assert code == 1
        assert "no_such_key" in capsys.readouterr().err


class TestFit:
    def test_closed_form_fixture(self, two_method_judgments, capsys):
        code = run(["fit", "--judgments", str(two_method_judgments), "--anchor", "baseline"])
        assert code == 0
        out = capsys.readouterr().out
        assert "1.098612" in out
        assert "±" in out
        assert "(anchor)" in out

    def test_unknown_anchor_fails_cleanly(self, two_method_judgments, capsys):
        code = run(["fit", "--judgments", str(two_method_judgments), "--anchor", "nope"])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestFormal:
    def test_demo_prints_distances(self, capsys):
        assert run(["formal"]) == 0
        out = capsys.readouterr().out
        assert "d(better)=0" in out
        assert "d(worse)=2" in out

    def test_witness_prints_pass(self, capsys):
        assert run(["formal", "--witness"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "misranking" in out


class TestAgreement:
    def test_identical_files_give_kappa_one(self, two_method_judgments, capsys):
        code = run([
            "agreement",
            "--labels", str(two_method_judgments),
            "--labels", str(two_method_judgments),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "1.0000" in out
        assert "100.0%" in out

    def test_single_file_is_usage_error(self, two_method_judgments):
        with pytest.raises(SystemExit) as exc:
            run(["agreement", "--labels", str(two_method_judgments)])
        assert exc.value.code == 2

    def test_disjoint_files_fail(self, tmp_path, two_method_judgments, capsys):
        other = tmp_path / "other.jsonl"
        write_judgments(other, [
            PairwiseJudgment(
                scenario=("snort", "logic"),
                instance_id="elsewhere",
                method_a="baseline",
                method_b="unirule",
                presented_order="ab",
                outcome="tie",
                judge_id="fixture",
            )
        ])
        code = run(["agreement", "--labels", str(two_method_judgments), "--labels", str(other)])
        assert code == 1
        assert "share no comparisons" in capsys.readouterr().err


class TestConfigFile:
    def test_file_supplies_defaults_and_flags_override(self, tmp_path, fixtures_dir, capsys):
        corpus = tmp_path / "corpus.jsonl"
        assert run([
            "ingest", "--language", "splunk",
            "--root", str(fixtures_dir / "splunk"),
            "--output", str(corpus),
        ]) == 0
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"split_ratio": 0.5, "split_seed": 3}))

        args = [
            "--config", str(config), "split", "--corpus", str(corpus),
            "--train", str(tmp_path / "train.jsonl"),
            "--test", str(tmp_path / "test.jsonl"),
        ]
        assert run(args) == 0
        assert "ratio 0.5, seed 3" in capsys.readouterr().out

        assert run(args + ["--ratio", "0.75"]) == 0
        assert "ratio 0.75, seed 3" in capsys.readouterr().out

    def test_instances_must_be_positive(self):
        with pytest.raises(ValueError):
            PipelineConfig(instances=0)


class TestPipelineStages:
    """One fast end-to-end walk over the bundled fixture corpus, n=1."""

    @pytest.fixture
    def workdir(self, tmp_path, fixtures_dir):
        for language in LANGS:
            assert run([
                "ingest", "--language", language,
                "--root", str(fixtures_dir / language),
                "--output", str(tmp_path / f"{language}.jsonl"),
            ]) == 0
        corpora = []
        for language in LANGS:
            corpora += ["--corpus", str(tmp_path / f"{language}.jsonl")]
        assert run([
            "split", *corpora, "--ratio", "0.5", "--seed", "11",
            "--train", str(tmp_path / "train.jsonl"),
            "--test", str(tmp_path / "test.jsonl"),
        ]) == 0
        for dimension in ("intent", "logic"):
            assert run([
                "translate", "--corpus", str(tmp_path / "test.jsonl"),
                "--dimension", dimension, "--cache", str(tmp_path / "cache"),
                "--output", str(tmp_path / f"{dimension}.jsonl"),
            ]) == 0
            assert run([
                "index", "--corpus", str(tmp_path / "train.jsonl"),
                "--dimension", dimension, "--cache", str(tmp_path / "cache"),
                "--output", str(tmp_path / f"{dimension}.idx"),
            ]) == 0
        assert run([
            "contexts", "--test", str(tmp_path / "test.jsonl"),
            "--intent", str(tmp_path / "intent.jsonl"),
            "--logic", str(tmp_path / "logic.jsonl"),
            "--output", str(tmp_path / "contexts.jsonl"),
        ]) == 0
        return tmp_path

    def generate_args(self, workdir, out_name, seed="5"):
        return [
            "generate",
            "--contexts", str(workdir / "contexts.jsonl"),
            "--train", str(workdir / "train.jsonl"),
            "--test", str(workdir / "test.jsonl"),
            "--intent-index", str(workdir / "intent.idx"),
            "--logic-index", str(workdir / "logic.idx"),
            "--n", "1", "--seed", seed,
            "--output", str(workdir / out_name),
        ]

    def test_generate_judge_report(self, workdir, capsys):
        assert run(self.generate_args(workdir, "traces.jsonl")) == 0
        traces = read_traces(workdir / "traces.jsonl")
        # 3 languages x 4 context types x 1 instance x 5 methods
        assert len(traces) == 60
        assert {t.method for t in traces} == {
            "unirule", "baseline", "random_rag", "std_rag", "human_authored"
        }

        assert run([
            "judge", "--traces", str(workdir / "traces.jsonl"),
            "--test", str(workdir / "test.jsonl"),
            "--judge-id", "mock-judge", "--seed", "5", "--fixed-time", "0",
            "--output", str(workdir / "judgments.jsonl"),
        ]) == 0
        judgments = read_judgments(workdir / "judgments.jsonl")
        assert len(judgments) == 120  # 12 instances x C(5,2)
        assert all(j.timestamp == 0.0 for j in judgments)

        assert run([
            "report", "--judgments", str(workdir / "judgments.jsonl"),
            "--output", str(workdir / "report.json"),
            "--csv", str(workdir / "forest.csv"),
        ]) == 0
        table = json.loads((workdir / "report.json").read_text())
        assert len(table["cells"]) == 20
        assert (workdir / "forest.csv").read_text().startswith("scenario,method,")

    def test_generate_and_judge_replay_byte_identical(self, workdir):
        assert run(self.generate_args(workdir, "a.jsonl")) == 0
        assert run(self.generate_args(workdir, "b.jsonl")) == 0
        assert (workdir / "a.jsonl").read_bytes() == (workdir / "b.jsonl").read_bytes()

        for name in ("ja.jsonl", "jb.jsonl"):
            assert run([
                "judge", "--traces", str(workdir / "a.jsonl"),
                "--test", str(workdir / "test.jsonl"),
                "--seed", "5", "--fixed-time", "1234.5",
                "--output", str(workdir / name),
            ]) == 0
        assert (workdir / "ja.jsonl").read_bytes() == (workdir / "jb.jsonl").read_bytes()

    def test_human_authored_without_ground_truth_fails(self, workdir, capsys):
        args = self.generate_args(workdir, "x.jsonl")
        i = args.index("--test")
        del args[i : i + 2]
        assert run(args) == 1
        assert "human_authored" in capsys.readouterr().err

    def test_methods_subset_and_unknown_method(self, workdir, capsys):
        args = self.generate_args(workdir, "subset.jsonl")
        assert run(args + ["--methods", "baseline,human_authored"]) == 0
        traces = read_traces(workdir / "subset.jsonl")
        assert len(traces) == 24
        assert run(args + ["--methods", "baseline,warlock"]) == 1
        assert "warlock" in capsys.readouterr().err
