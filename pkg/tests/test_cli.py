import pytest

from app.main import build_parser, cli_overrides, main

SMALL_CONFIG = """\
# double integrator, tiny budget
env.id = double-integrator
env.randomize = false
budget.samples = 16
budget.horizon = 5
budget.dt = 0.1
budget.iterations = 2
experiment.steps = 4
experiment.seeds = 0..1
output.plots = false
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_CONFIG, encoding="utf-8")
    return path


def test_keys_lists_registry(capsys):
    assert main(["keys"]) == 0

    out = capsys.readouterr().out
    assert "budget.samples" in out
    assert "mismatch.<parameter>" in out


def test_run_writes_artifacts(config_file, tmp_path, capsys):
    out = tmp_path / "run"

    assert main(["run", "--config", str(config_file), "--out", str(out)]) == 0

    for name in ("summary.csv", "summary.txt", "runs.csv", "actions.csv"):
        assert (out / name).read_text().splitlines()[0] != ""
    assert (out / "runs.csv").read_text().startswith("# annealed-mpc csv schema v1\n")
    assert "dial" in capsys.readouterr().out


def test_run_single_seed_and_solver_flags(config_file, tmp_path):
    out = tmp_path / "single"

    assert main(["run", "--config", str(config_file), "--out", str(out), "--seed", "7", "--solver", "mppi"]) == 0

    rows = (out / "runs.csv").read_text().splitlines()
    assert len(rows) == 3
    assert rows[2].startswith("mppi,7,")


def test_invalid_key_exits_nonzero(config_file, capsys):
    code = main(["run", "--config", str(config_file), "--set", "budget.sampels=8"])

    assert code == 2
    assert "error: budget.sampels: unknown key" in capsys.readouterr().err


def test_malformed_set_flag(config_file, capsys):
    assert main(["run", "--config", str(config_file), "--set", "budget.samples"]) == 2
    assert "--set" in capsys.readouterr().err


def test_unknown_preset_is_rejected_by_the_parser():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "--preset", "huge"])


def test_cli_overrides_from_flags():
    args = build_parser().parse_args(
        ["compare", "--seed", "3", "--env", "pendulum", "--set", "budget.samples = 8", "--preset", "trials-jump"]
    )

    assert cli_overrides(args) == {"budget.samples": "8", "experiment.seeds": "3", "env.id": "pendulum"}
    assert args.preset == ["trials-jump"]


def test_landscape_command(tmp_path):
    out = tmp_path / "landscape"

    code = main(
        [
            "landscape",
            "--out", str(out),
            "--set", "landscape.resolution=256",
            "--set", "landscape.rounds=1",
            "--set", "output.plots=false",
        ]
    )

    assert code == 0
    assert (out / "drift.csv").exists()
    assert (out / "oracle.csv").exists()


def test_sweep_command(config_file, tmp_path):
    out = tmp_path / "sweep"

    code = main(
        [
            "sweep",
            "--config", str(config_file),
            "--out", str(out),
            "--seed", "0",
            "--set", "sweep.beta1=0.5",
            "--set", "sweep.beta2=1.0",
            "--set", "sweep.iterations=2",
            "--set", "sweep.sigma_base=0.5, 1.0",
        ]
    )

    assert code == 0
    assert len((out / "sweep.csv").read_text().splitlines()) == 2 + 2


def test_compare_output_does_not_depend_on_threads(config_file, tmp_path, set_threads):
    outputs = []
    for threads in (1, 8):
        set_threads(threads)
        out = tmp_path / f"threads-{threads}"
        assert main(["compare", "--config", str(config_file), "--out", str(out)]) == 0
        outputs.append(out)

    for name in ("summary.csv", "runs.csv", "actions.csv"):
        assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes()


@pytest.mark.parametrize(
    "flags,path",
    [
        (["--env", "hopper", "--set", "env.pads=0:0.1:0:2,0.3:0.1:1:2"], "env.pads"),
        (["--set", "mismatch.wall_height=-1"], "mismatch.wall_height"),
    ],
)
def test_environment_rejection_exits_with_config_error(flags, path, tmp_path, capsys):
    code = main(["run", "--out", str(tmp_path / "rejected"), *flags])

    assert code == 2
    assert f"error: {path}:" in capsys.readouterr().err
    assert not (tmp_path / "rejected").exists()


def test_paper_budget_preset_is_accepted_by_the_parser():
    args = build_parser().parse_args(["compare", "--preset", "paper-budget", "--preset", "full-budget"])

    assert args.preset == ["paper-budget", "full-budget"]
