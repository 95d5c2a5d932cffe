import os

import pytest

from pitchside import data
from pitchside.cli import main


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


class TestSetplayCommands:
    def test_check_ok(self, workdir, capsys):
        path = write(workdir / "ok.sp", data.read_setplay("sp-min"))
        assert main(["setplay", "check", path]) == 0
        assert "ok (1 steps, 1 roles)" in capsys.readouterr().out

    def test_check_reports_diagnostics(self, workdir, capsys):
        path = write(
            workdir / "bad.sp",
            """
            (setplay :name bad :id 50 :players (lead) :abort (false)
              (step :id 0 :wait (0 1) :condition (true)
                :directives ((lead (hold)))
                :transitions ((next :to 9 :cond (true)))))
            """,
        )
        assert main(["setplay", "check", path]) == 1
        assert "dangling-transition" in capsys.readouterr().out

    def test_check_parse_error_has_location(self, workdir, capsys):
        path = write(workdir / "broken.sp", "(setplay :name x")
        assert main(["setplay", "check", path]) == 1
        assert ":1:1:" in capsys.readouterr().err

    def test_fmt_writes_canonical_form(self, workdir, capsys):
        messy = "(setplay :id 1 :players (lead) :name sp-min :abort (false) (step :id 0 :wait (0 2) :transitions ((finish :cond (true))) :condition (true) :directives ((lead (hold)))))"
        path = write(workdir / "messy.sp", messy)
        assert main(["setplay", "fmt", path, "-w"]) == 0
        from pitchside.setplay import parse_setplay, print_setplay

        with open(path) as fh:
            text = fh.read()
        assert text == print_setplay(parse_setplay(text))  # canonical fixed point


class TestTrialsCommand:
    def test_trials_report(self, workdir, capsys):
        setplay = write(workdir / "corner.sp", data.read_setplay("corner-short"))
        scenario = write(workdir / "corner.scn", data.read_scenario("corner-left"))
        report = str(workdir / "report.sexp")
        code = main(["trials", "--setplay", setplay, "--scenario", scenario,
                     "-n", "2", "--seed", "3", "--report", report])
        assert code == 0
        out = capsys.readouterr().out
        assert "setplay 2:" in out
        with open(report) as fh:
            assert fh.read().startswith("(trial-report :setplay 2 :trials 2")

    def test_trials_n_zero(self, workdir, capsys):
        setplay = write(workdir / "corner.sp", data.read_setplay("corner-short"))
        scenario = write(workdir / "corner.scn", data.read_scenario("corner-left"))
        assert main(["trials", "--setplay", setplay, "--scenario", scenario,
                     "-n", "0", "--seed", "3"]) == 0
        assert "0/0 (undefined)" in capsys.readouterr().out


class TestSimulateAndStats:
    def test_simulate_then_stats(self, workdir, capsys):
        config = write(
            workdir / "match.cfg",
            "(match :strategy-l default :strategy-r default :seed 4"
            " :halves 1 :half-cycles 450 :log short.log)",
        )
        assert main(["simulate", "--config", config]) == 0
        assert os.path.exists("short.log")
        assert main(["stats", "short.log"]) == 0
        out = capsys.readouterr().out
        assert "L.possession=" in out
        assert main(["stats", "short.log", "--record"]) == 0
        assert capsys.readouterr().out.startswith("(match-stats")

    def test_simulate_seed_override_changes_log(self, workdir, capsys):
        config = write(
            workdir / "match.cfg",
            "(match :strategy-l default :strategy-r default :seed 4"
            " :halves 1 :half-cycles 300 :log a.log)",
        )
        main(["simulate", "--config", config])
        os.rename("a.log", "b.log")
        main(["simulate", "--config", config, "--seed", "5"])
        with open("a.log") as fa, open("b.log") as fb:
            assert fa.read() != fb.read()

    def test_missing_config_reported(self, workdir, capsys):
        assert main(["simulate", "--config", "nope.cfg"]) == 1
        assert "nope.cfg" in capsys.readouterr().err


class TestOptimizeCommand:
    def test_sphere_with_history_and_plot(self, workdir, capsys):
        config = write(workdir / "search.cfg",
                       "(search :epsilon 0.5 :samples 16 :iterations 40 :seed 2)")
        code = main(["optimize", "--objective", "sphere5", "--config", config,
                     "--history", "hist.txt", "--plot", "conv.png"])
        assert code == 0
        with open("hist.txt") as fh:
            lines = fh.read().strip().splitlines()
        assert len(lines) == 40
        assert all(len(l.split(";")) == 4 for l in lines)
        assert os.path.getsize("conv.png") > 1000

    def test_kick_calibration_protocol(self, workdir, capsys):
        config = write(workdir / "search.cfg",
                       "(search :epsilon 0.5 :samples 20 :iterations 3 :seed 2)")
        code = main(["optimize", "--objective", "kick-calibration", "--config", config])
        assert code == 0
        out = capsys.readouterr().out
        assert "3 iterations x 20 contexts (5 evaluations each)" in out

    def test_unknown_objective(self, workdir, capsys):
        assert main(["optimize", "--objective", "nonsense"]) == 1
