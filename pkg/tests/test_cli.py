import hashlib
import json
from pathlib import Path

import pytest

from chronogram import __version__, cli
from chronogram.cli import RunConfig, build_parser, main, run_pipeline
from chronogram.ingest import bundled_fixture_path


def _disk_files(out: Path) -> list[str]:
    return sorted(p.relative_to(out).as_posix()
                  for p in out.rglob("*") if p.is_file())


def _manifest(out: Path) -> dict:
    return json.loads((out / "manifest.json").read_text(encoding="utf-8"))


def test_default_run_writes_everything(tmp_path, capsys, mpl_warm):
    out = tmp_path / "out"
    assert main(["--out", str(out)]) == 0
    assert capsys.readouterr().out.startswith("wrote ")

    assert len(list((out / "slices").glob("window-*.net"))) == 12
    assert len(list((out / "frames").glob("frame-*.svg"))) == 122
    for rel in ("project.paj", "animation.html", "stats.csv",
                "figures/summary.png", "figures/stress.png"):
        assert (out / rel).is_file(), rel

    manifest = _manifest(out)
    assert manifest["version"] == __version__
    assert manifest["outputs"] == _disk_files(out)
    fixture = bundled_fixture_path()
    assert manifest["input_sha256"] == hashlib.sha256(fixture.read_bytes()).hexdigest()
    assert manifest["records"]["parsed"] == 40
    cfg = manifest["config"]
    assert cfg["window_length"] == 5 and cfg["min_occ"] == 2
    assert cfg["threshold"] == 0.2 and cfg["stability_window"] == 4
    assert cfg["alpha"] == 1.0 and cfg["seed"] == 0
    assert cfg["fps"] == 10 and cfg["transition_frames"] == 10
    assert cfg["binarize"] is False and cfg["keep_hyphens"] is False
    assert cfg["anchor"] is None and cfg["exclude_journal"] == []
    assert cfg["input"] == str(fixture) and cfg["stopwords"] == "(bundled)"
    assert cfg["origin"] == 1950

    stats = (out / "stats.csv").read_text(encoding="utf-8").splitlines()
    assert len(stats) == 13


def test_missing_input_exits_2(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["--input", str(tmp_path / "nope.txt"), "--out", str(out)])
    assert rc == 2
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


def test_empty_input_exits_2(tmp_path, capsys):
    src = tmp_path / "empty.txt"
    src.write_text("EF\n", encoding="utf-8")
    assert main(["--input", str(src), "--out", str(tmp_path / "out")]) == 2
    assert "no records" in capsys.readouterr().err


def test_malformed_input_exits_1(tmp_path, capsys):
    src = tmp_path / "bad.txt"
    src.write_text("AU Garfield, E.\nTI Citation indexes\nSO SCIENCE\n"
                   "PY abc\nUT B0001\nER\nEF\n", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["--input", str(src), "--out", str(out)]) == 1
    assert "malformed" in capsys.readouterr().err
    assert not out.exists()


def test_failure_removes_created_output_dir(tmp_path, monkeypatch, mpl_warm):
    def boom(rows, outdir):
        raise RuntimeError("disk full")

    monkeypatch.setattr(cli, "render_figures", boom)
    out = tmp_path / "fresh"
    with pytest.raises(RuntimeError):
        run_pipeline(RunConfig(out=str(out), transition_frames=0))
    assert not out.exists()


def test_failure_preserves_preexisting_dir(tmp_path, monkeypatch, mpl_warm):
    def boom(rows, outdir):
        raise RuntimeError("disk full")

    monkeypatch.setattr(cli, "render_figures", boom)
    out = tmp_path / "existing"
    out.mkdir()
    sentinel = out / "keep.txt"
    sentinel.write_text("mine\n", encoding="utf-8")
    with pytest.raises(RuntimeError):
        run_pipeline(RunConfig(out=str(out), transition_frames=0))
    assert sentinel.read_text(encoding="utf-8") == "mine\n"
    assert list(out.iterdir()) == [sentinel]


def test_flags_echoed_in_manifest(tmp_path, mpl_warm):
    out = tmp_path / "out"
    rc = main(["--out", str(out), "--window-length", "4", "--min-occ", "3",
               "--threshold", "0.25", "--alpha", "0.5", "--stability-window", "2",
               "--seed", "7", "--fps", "5", "--transition-frames", "0",
               "--binarize", "--exclude-journal", "NATURE",
               "--exclude-journal", "LANCET"])
    assert rc == 0
    cfg = _manifest(out)["config"]
    assert cfg["window_length"] == 4 and cfg["min_occ"] == 3
    assert cfg["threshold"] == 0.25 and cfg["alpha"] == 0.5
    assert cfg["stability_window"] == 2 and cfg["seed"] == 7
    assert cfg["fps"] == 5 and cfg["transition_frames"] == 0
    assert cfg["binarize"] is True
    assert cfg["exclude_journal"] == ["NATURE", "LANCET"]
    assert cfg["origin"] == 1952  # earliest record year, already a multiple of 4
    # one window per 4-year step from 1952 through 2009, one frame each
    assert len(list((out / "slices").glob("*.net"))) == 15
    assert len(list((out / "frames").glob("*.svg"))) == 15


def test_anchor_reaches_network_files(tmp_path, mpl_warm):
    out = tmp_path / "out"
    rc = main(["--out", str(out), "--anchor", "Garfield, E",
               "--transition-frames", "0"])
    assert rc == 0
    project = (out / "project.paj").read_text(encoding="utf-8")
    assert '"anchor:GARFIELD E"' in project
    assert _manifest(out)["config"]["anchor"] == "Garfield, E"


def test_config_file_applied_with_flags_winning(tmp_path, mpl_warm):
    out = tmp_path / "out"
    decoy = tmp_path / "decoy"
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(
        "# five-year analysis, tightened\n"
        "window-length = 4\n"
        "threshold = 0.9\n"
        f"out = {decoy}\n"
        "exclude-journal = NATURE\n"
        "keep-hyphens = yes\n",
        encoding="utf-8")
    rc = main(["--config", str(cfg_file), "--threshold", "0.25",
               "--out", str(out), "--transition-frames", "0",
               "--exclude-journal", "LANCET"])
    assert rc == 0
    cfg = _manifest(out)["config"]
    assert cfg["window_length"] == 4       # from the file
    assert cfg["threshold"] == 0.25        # flag beats file
    assert cfg["keep_hyphens"] is True
    assert cfg["exclude_journal"] == ["NATURE", "LANCET"]
    assert not decoy.exists()


@pytest.mark.parametrize("body,fragment", [
    ("min_occ = 2\nthresold = 0.3\n", "unknown key"),
    ("threshold = banana\n", "bad value"),
    ("just some words\n", "expected key = value"),
])
def test_config_file_errors_exit_2(tmp_path, capsys, body, fragment):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text(body, encoding="utf-8")
    assert main(["--config", str(cfg_file), "--out", str(tmp_path / "out")]) == 2
    assert fragment in capsys.readouterr().err


def test_config_file_missing_exits_2(tmp_path, capsys):
    rc = main(["--config", str(tmp_path / "absent.cfg"),
               "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "config file not found" in capsys.readouterr().err


@pytest.mark.parametrize("argv,fragment", [
    (["--threshold", "1.5"], "threshold"),
    (["--window-length", "0"], "window length"),
    (["--min-occ", "0"], "min-occ"),
    (["--fps", "0"], "fps"),
    (["--origin", "2100"], "later than every record year"),
])
def test_validation_errors_exit_2(tmp_path, capsys, argv, fragment):
    out = tmp_path / "out"
    assert main(argv + ["--out", str(out)]) == 2
    assert fragment in capsys.readouterr().err
    assert not out.exists()


def test_parser_exposes_exactly_the_documented_flags():
    opts = {s for action in build_parser()._actions for s in action.option_strings}
    assert opts == {
        "-h", "--help",
        "--input", "--stopwords", "--origin", "--window-length", "--min-occ",
        "--threshold", "--anchor", "--exclude-journal", "--alpha",
        "--stability-window", "--seed", "--out", "--fps",
        "--transition-frames", "--binarize", "--config",
    }


def test_rerun_is_byte_identical_except_timings(tmp_path, mpl_warm):
    out = tmp_path / "out"
    run_pipeline(RunConfig(out=str(out)))
    first = {rel: (out / rel).read_bytes() for rel in _disk_files(out)}
    run_pipeline(RunConfig(out=str(out)))
    second = {rel: (out / rel).read_bytes() for rel in _disk_files(out)}

    assert first.keys() == second.keys()
    diff = [rel for rel in first if first[rel] != second[rel]]
    assert diff in ([], ["manifest.json"])
    a = json.loads(first["manifest.json"])
    b = json.loads(second["manifest.json"])
    a.pop("timings")
    b.pop("timings")
    assert a == b
