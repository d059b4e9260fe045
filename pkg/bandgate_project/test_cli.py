"""
Command-line tests driven through click's CliRunner.
"""

import pytest
from click.testing import CliRunner

from bandgate.cli import cli
from bandgate.cli.commands import parse_int_list
from bandgate.evaluation.reports import read_metric_csv

FAST = ['--epochs', '1', '--batch-size', '64', '--hidden', '8', '--lr', '0.01']


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def dataset_csv(runner, tmp_path):
    path = tmp_path / "data.csv"
    result = runner.invoke(cli, [
        'gen', '--bands', '12', '--classes', '3', '--samples', '150',
        '--informative', '2,7', '--noise', '0.2', '--seed', '4', '--out', str(path),
    ])
    assert result.exit_code == 0, result.output
    return path


def lines_of(result):
    return [line for line in result.output.splitlines() if line.strip()]


def test_parse_int_list():
    assert parse_int_list("2..5") == [2, 3, 4, 5]
    assert parse_int_list("1, 3,7..8") == [1, 3, 7, 8]


def test_gen_writes_header_and_summary(runner, tmp_path):
    path = tmp_path / "gen.csv"
    result = runner.invoke(cli, ['gen', '--bands', '30', '--classes', '4', '--samples', '40',
                                 '--informative', '3,11,19,27', '--out', str(path)])
    assert result.exit_code == 0
    assert "bands=30 samples=40 classes=4 informative=3,11,19,27" in lines_of(result)
    assert path.read_text().splitlines()[0] == "bands=30 classes=4"


def test_gen_requires_out(runner):
    result = runner.invoke(cli, ['gen'])
    assert result.exit_code == 2


def test_gen_rejects_bad_informative_band(runner, tmp_path):
    result = runner.invoke(cli, ['gen', '--bands', '10', '--informative', '12', '--out', str(tmp_path / "x.csv")])
    assert result.exit_code == 2
    assert not (tmp_path / "x.csv").exists()


def test_train_prints_selection_and_writes_artifacts(runner, tmp_path, dataset_csv):
    out_dir = tmp_path / "run"
    result = runner.invoke(cli, ['train', '--data', str(dataset_csv), '--method', 'chbs', '--k', '3',
                                 *FAST, '--out-dir', str(out_dir)])
    assert result.exit_code == 0, result.output
    selected = [line for line in lines_of(result) if line.startswith("selected_bands=")]
    assert len(selected) == 1
    bands = [int(b) for b in selected[0].split('=', 1)[1].split(',')]
    assert bands == sorted(set(bands)) and 1 <= len(bands) <= 3
    assert any(line.startswith("val_oa=") for line in lines_of(result))
    progression = (out_dir / "progression.csv").read_text().splitlines()
    assert progression[0] == "epoch,loss,val_oa,selected_bands"
    assert len(progression) == 2
    assert (out_dir / "classifier.bgnet").read_bytes()[:6] == b"BGNET1"


def test_train_rejects_zero_k(runner, tmp_path, dataset_csv):
    result = runner.invoke(cli, ['train', '--data', str(dataset_csv), '--k', '0', *FAST,
                                 '--out-dir', str(tmp_path / "run")])
    assert result.exit_code == 2


def test_preset_echo(runner, tmp_path, dataset_csv):
    result = runner.invoke(cli, ['train', '--data', str(dataset_csv), '--preset', 'paper-driving',
                                 '--epochs', '1', '--hidden', '8', '--echo-config',
                                 '--out-dir', str(tmp_path / "run")])
    assert result.exit_code == 0, result.output
    lines = lines_of(result)
    for expected in ("batch_size=16", "tau0=8.5", "alpha=0.9999", "beta=0.15"):
        assert expected in lines


def test_config_file_supplies_defaults(runner, tmp_path, dataset_csv):
    config = tmp_path / "run.env"
    config.write_text(f"data={dataset_csv}\nmethod=random-k\nk=5\nepochs=1\nhidden=8\n")
    result = runner.invoke(cli, ['--config', str(config), 'train', '--echo-config',
                                 '--out-dir', str(tmp_path / "run")])
    assert result.exit_code == 0, result.output
    lines = lines_of(result)
    assert "method=random-k" in lines
    assert "k=5" in lines
    selected = [line for line in lines if line.startswith("selected_bands=")][0]
    assert len(selected.split('=', 1)[1].split(',')) == 5


def test_sweep_cardinality_and_determinism(runner, tmp_path, dataset_csv):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ['sweep', '--data', str(dataset_csv), '--methods', 'chbs,random-k', '--ks', '2,4,6',
            '--folds', '5', *FAST, '--seed', '3']
    result = runner.invoke(cli, [*args, '--out', str(first), '--workers', '1'])
    assert result.exit_code == 0, result.output
    assert lines_of(result)[0] == "method,bands_auc"
    result = runner.invoke(cli, [*args, '--out', str(second), '--workers', '3'])
    assert result.exit_code == 0, result.output

    frame = read_metric_csv(first)
    assert len(frame) == 2 * 3 * 5 * 9 + 2
    assert first.read_bytes() == second.read_bytes()
    assert (tmp_path / "a_selections.csv").is_file()


def test_report_writes_svg_and_auc_table(runner, tmp_path, dataset_csv):
    sweep_csv = tmp_path / "sweep.csv"
    result = runner.invoke(cli, ['sweep', '--data', str(dataset_csv), '--methods', 'random-k,variance-k',
                                 '--ks', '2,3', '--folds', '3', *FAST, '--out', str(sweep_csv)])
    assert result.exit_code == 0, result.output
    svg = tmp_path / "chart.svg"
    result = runner.invoke(cli, ['report', '--sweep', str(sweep_csv), '--out', str(svg)])
    assert result.exit_code == 0, result.output
    lines = lines_of(result)
    assert lines[0] == "method,bands_auc,selection_stability"
    assert {line.split(',')[0] for line in lines[1:]} == {'random-k', 'variance-k'}
    assert svg.read_text().count('<polyline') == 2


def test_report_on_empty_csv_fails_without_svg(runner, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    svg = tmp_path / "chart.svg"
    result = runner.invoke(cli, ['report', '--sweep', str(empty), '--out', str(svg)])
    assert result.exit_code != 0
    assert not svg.exists()


def test_verify_emits_tap(runner, tmp_path):
    out = tmp_path / "verify.csv"
    result = runner.invoke(cli, ['verify', '--out', str(out)])
    lines = lines_of(result)
    assert lines[0] == "TAP version 13"
    assert lines[1].startswith("1..")
    assert result.exit_code == 0, result.output
    assert all(line.startswith("ok ") for line in lines[2:])
    assert out.read_text().splitlines()[0].startswith("check,")
