import json
import math

from mrl.cli import main


def write_config(tmp_path, **overrides):
    doc = {
        "catalog": "robot4",
        "group": "learned",
        "engine": {"alpha": 0.015, "window_k": 3},
        "novice": {
            "preference": [0.6, 0.2, 0.1, 0.1],
            "base_rectify": 0.2,
            "boost": 0.15,
            "skill": 0.0,
            "learn_rate": 0.03,
            "mistake_hazard": 0.7,
        },
        "schedule": {
            "phases": [
                {"label": "GuidedResponse", "steps": 25, "reinforced": True},
                {"label": "Adaptation", "steps": 15, "reinforced": False},
            ]
        },
    }
    doc.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


class TestUsage:
    def test_unknown_flag_exits_1(self, capsys):
        assert main(["run", "--bogus"]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_subcommand_exits_1(self):
        assert main(["frobnicate"]) == 1

    def test_missing_subcommand_exits_1(self):
        assert main([]) == 1


class TestRun:
    def test_writes_replayable_log(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        log = tmp_path / "out" / "session.log"
        assert main(["run", "--config", str(cfg), "--seed", "5", "--out", str(log)]) == 0
        assert log.exists()
        assert main(["replay", "--log", str(log)]) == 0
        out = capsys.readouterr().out
        assert "replay OK" in out

    def test_bad_config_file_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["run", "--config", str(bad)]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path)
        a, b = tmp_path / "a.log", tmp_path / "b.log"
        main(["run", "--config", str(cfg), "--seed", "9", "--out", str(a), "--no-timestamps"])
        main(["run", "--config", str(cfg), "--seed", "9", "--out", str(b), "--no-timestamps"])
        raw_a, raw_b = a.read_bytes(), b.read_bytes()
        assert raw_a == raw_b

    def test_log_dir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MRL_LOG_DIR", str(tmp_path / "envdir"))
        cfg = write_config(tmp_path)
        assert main(["run", "--config", str(cfg), "--seed", "2"]) == 0
        assert (tmp_path / "envdir" / "run-learned-2.log").exists()


class TestReplayCommand:
    def test_tampered_log_exits_3(self, tmp_path):
        cfg = write_config(tmp_path)
        log = tmp_path / "session.log"
        main(["run", "--config", str(cfg), "--seed", "5", "--out", str(log)])
        lines = log.read_text().splitlines()
        for i, line in enumerate(lines):
            doc = json.loads(line)
            if doc["payload"]["type"] == "OutcomeRecorded":
                doc["payload"]["record"]["weights_after"][0] += 1e-3
                lines[i] = json.dumps(doc)
                break
        log.write_text("\n".join(lines) + "\n")
        assert main(["replay", "--log", str(log)]) == 3

    def test_malformed_log_exits_2(self, tmp_path):
        log = tmp_path / "empty.log"
        log.write_text("")
        assert main(["replay", "--log", str(log)]) == 2

    def test_missing_log_exits_2(self, tmp_path):
        assert main(["replay", "--log", str(tmp_path / "absent.log")]) == 2


class TestSweep:
    def test_writes_one_csv_per_alpha(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--config", str(cfg),
                "--alphas", "0.01,0.05",
                "--seeds", "3",
                "--seed", "1",
                "--out", str(out),
            ]
        )
        assert code == 0
        for alpha in ("0.01", "0.05"):
            lines = (out / f"alpha_{alpha}.csv").read_text().splitlines()
            assert lines[0] == "t,entropy"
            t0, h0 = lines[1].split(",")
            assert t0 == "0"
            assert float(h0) == math.log2(4)

    def test_bad_alpha_list_exits_1(self, tmp_path):
        cfg = write_config(tmp_path)
        assert main(["sweep", "--config", str(cfg), "--alphas", "0.01,bogus"]) == 1


class TestExperiment:
    def test_report_shape(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "exp"
        code = main(
            [
                "experiment",
                "--config", str(cfg),
                "--groups", "none,random,learned",
                "--subjects", "4",
                "--seed", "3",
                "--out", str(out),
                "--no-timestamps",
            ]
        )
        assert code == 0
        report = (out / "report.txt").read_text()
        for token in ("GuidedResponse", "Adaptation", "before transfer", "after transfer",
                      "none", "random", "learned", "Welch", "p ="):
            assert token in report
        logs = list((out / "logs").glob("*.log"))
        assert len(logs) == 12  # 3 groups x 4 subjects

    def test_logs_replay(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "exp"
        main(
            [
                "experiment",
                "--config", str(cfg),
                "--subjects", "3",
                "--seed", "8",
                "--out", str(out),
            ]
        )
        for log in sorted((out / "logs").glob("learned-*.log")):
            assert main(["replay", "--log", str(log)]) == 0


class TestAnalyze:
    def test_writes_series_and_stats(self, tmp_path):
        cfg = write_config(tmp_path)
        log = tmp_path / "session.log"
        main(["run", "--config", str(cfg), "--seed", "5", "--out", str(log)])
        out = tmp_path / "analysis"
        assert main(["analyze", "--log", str(log), "--out", str(out)]) == 0
        entropy_lines = (out / "session_entropy.csv").read_text().splitlines()
        assert entropy_lines[0] == "t,entropy"
        assert float(entropy_lines[1].split(",")[1]) == math.log2(4)
        regret_lines = (out / "session_regret.csv").read_text().splitlines()
        assert regret_lines[0] == "t,regret"
        stats = (out / "stats.txt").read_text()
        assert "mistakes=" in stats and "total_regret=" in stats
