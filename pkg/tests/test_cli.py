from pathlib import Path

import orjson
import pytest

from parity_proxy import __version__
from parity_proxy.cli import EXIT_CONFIG, EXIT_CUTOFF, EXIT_OK, EXIT_VALIDATION, main


def test_sweep_to_file(out_path: Path) -> None:
    assert main(["sweep", "--steps", "4", "--r", "0.5", "--out", str(out_path)]) == EXIT_OK
    lines = out_path.read_text().splitlines()
    assert lines[0] == f"# parity-proxy {__version__}"
    assert lines[2] == "phi,S_proxy,S_closed_form,parity_gaussian,intensity"
    assert len(lines) == 7
    phi, signal = lines[3].split(",")[:2]
    assert float(phi) == 0.0
    assert float(signal) == pytest.approx(1.0)


def test_sweep_to_stdout(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["--steps", "2", "--format", "json"]) == EXIT_OK
    data = orjson.loads(capsys.readouterr().out)
    assert data["command"] == "sweep"
    assert len(data["rows"]) == 2


def test_config_file_and_flag_override(tmp_path: Path, out_path: Path) -> None:
    config = tmp_path / "run.json"
    config.write_bytes(
        orjson.dumps({"command": "sensitivity", "r": 0.8, "phi_grid": {"steps": 3}})
    )
    assert main(["--config", str(config), "--r", "0.2", "--out", str(out_path)]) == EXIT_OK
    header = out_path.read_text().splitlines()[1].removeprefix("# config: ")
    recorded = orjson.loads(header)
    assert recorded["command"] == "sensitivity"
    assert recorded["r"] == 0.2
    assert recorded["phi_grid"]["steps"] == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--r", "-1"],
        ["sweep", "--steps", "0"],
        ["sweep", "--cutoff", "200"],
        ["sensitivity", "--r", "0"],
        ["montecarlo", "--beta", "4"],
        ["--config", "does-not-exist.json"],
    ],
)
def test_config_errors(argv: list[str]) -> None:
    assert main(argv) == EXIT_CONFIG


def test_unknown_command_exits_with_usage_error() -> None:
    with pytest.raises(SystemExit) as info:
        main(["plot"])
    assert info.value.code == 2


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_validate_passes(out_path: Path) -> None:
    assert main(["validate", "--steps", "4", "--cutoff", "40", "--out", str(out_path)]) == EXIT_OK
    assert ",false," not in out_path.read_text()


def test_validate_failure_exit_code(out_path: Path) -> None:
    argv = ["validate", "--r", "0.8", "--cutoff", "8", "--steps", "4", "--out", str(out_path)]
    assert main(argv) == EXIT_VALIDATION
    rows = [line for line in out_path.read_text().splitlines() if line.startswith("oracle_agreement")]
    assert rows and ",false," in rows[0]


def test_montecarlo_cutoff_too_small(out_path: Path) -> None:
    argv = ["montecarlo", "--beta", "2", "--cutoff", "8", "--steps", "1", "--shots", "10"]
    assert main([*argv, "--out", str(out_path)]) == EXIT_CUTOFF
    assert not out_path.exists()


def test_montecarlo_output_is_reproducible(tmp_path: Path) -> None:
    argv = ["montecarlo", "--r", "0.3", "--steps", "2", "--shots", "200", "--cutoff", "30", "--seed", "4"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*argv, "--out", str(first)]) == EXIT_OK
    assert main([*argv, "--workers", "2", "--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
