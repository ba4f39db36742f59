"""Command-line entry point: one command runs the whole pipeline.

The defaults reproduce the standard five-year analysis: window length 5,
minimum occurrence 2, cosine threshold 0.2, stability window 4.  With no
arguments at all the bundled synthetic corpus is processed into
./chronogram_out, which doubles as a smoke test of an installation.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import shutil
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .export import (build_frames, animation_frames, render_svg_frame,
                     write_animation_html, write_pajek_net,
                     write_pajek_project, write_stats, compute_stats)
from .ingest import (MalformedRecord, bundled_fixture_path, bundled_stopwords,
                     filter_corpus, load_records, load_stopwords)
from .layout import StressParams, solve_trajectory
from .report import render_figures
from .simnet import build_slice_graph, target_distances
from .windowing import EmptyWindow, build_incidence, empty_incidence, windows_for


class ConfigError(Exception):
    """Bad flag, config file entry, or input path; maps to exit code 2."""


@dataclass
class RunConfig:
    input: str | None = None
    stopwords: str | None = None
    origin: int | None = None
    window_length: int = 5
    min_occ: int = 2
    threshold: float = 0.2
    anchor: str | None = None
    exclude_journal: list[str] = field(default_factory=list)
    alpha: float = 1.0
    stability_window: int = 4
    seed: int = 0
    out: str = "chronogram_out"
    fps: int = 10
    transition_frames: int = 10
    binarize: bool = False
    keep_hyphens: bool = False

    def validate(self) -> None:
        if self.window_length < 1:
            raise ConfigError(f"window length must be >= 1, got {self.window_length}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.min_occ < 1:
            raise ConfigError(f"min-occ must be >= 1, got {self.min_occ}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.stability_window < 0:
            raise ConfigError(f"stability-window must be >= 0, got {self.stability_window}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.fps < 1:
            raise ConfigError(f"fps must be >= 1, got {self.fps}")
        if self.transition_frames < 0:
            raise ConfigError(f"transition-frames must be >= 0, got {self.transition_frames}")


@dataclass
class RunManifest:
    """Everything needed to reproduce a run, except the wall-clock timings."""

    version: str
    config: dict
    input_sha256: str
    records: dict
    timings: dict
    outputs: list[str]


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_FIELD_TYPES = {
    "input": str, "stopwords": str, "anchor": str, "out": str,
    "origin": int, "window_length": int, "min_occ": int,
    "stability_window": int, "seed": int, "fps": int, "transition_frames": int,
    "threshold": float, "alpha": float,
    "binarize": _parse_bool, "keep_hyphens": _parse_bool,
}


def _apply_config_file(cfg: RunConfig, path: str) -> None:
    """Overlay `key = value` lines onto the defaults; flags still win."""
    cfg_path = Path(path)
    if not cfg_path.is_file():
        raise ConfigError(f"config file not found: {path}")
    for line_no, raw in enumerate(cfg_path.read_text(encoding="utf-8").splitlines(),
                                  start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "exclude_journal":
            cfg.exclude_journal.append(value)
            continue
        coerce = _FIELD_TYPES.get(key)
        if coerce is None:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        try:
            setattr(cfg, key, coerce(value))
        except ValueError:
            raise ConfigError(f"{path}:{line_no}: bad value for {key}: {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chronogram",
        description="Animated co-word/co-author/journal maps of a document "
                    "corpus, one network per year window.")
    add = parser.add_argument
    add("--input", help="field-tagged export or .tsv corpus "
        "(default: bundled synthetic sample)")
    add("--stopwords", help="stopword list, one word per line "
        "(default: bundled 429-word list)")
    add("--origin", type=int, help="first year of the first window (default: "
        "earliest record year rounded down to a multiple of the window length)")
    add("--window-length", type=int, help="years per window (default 5)")
    add("--min-occ", type=int, help="minimum documents per attribute (default 2)")
    add("--threshold", type=float, help="cosine threshold for edges (default 0.2)")
    add("--anchor", help="author label added as a constant column to every document")
    add("--exclude-journal", action="append", metavar="NAME",
        help="drop records from this journal (repeatable)")
    add("--alpha", type=float, help="stability coefficient (default 1.0)")
    add("--stability-window", type=int,
        help="neighboring slices coupled to each slice (default 4)")
    add("--seed", type=int, help="random seed (default 0)")
    add("--out", help="output directory (default chronogram_out)")
    add("--fps", type=int, help="animation frames per second (default 10)")
    add("--transition-frames", type=int,
        help="interpolated frames between consecutive windows (default 10)")
    add("--binarize", action="store_const", const=True,
        help="clip matrix counts to 0/1")
    add("--config", help="key = value file applied before command-line flags")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        _apply_config_file(cfg, args.config)
    for name in ("input", "stopwords", "origin", "window_length", "min_occ",
                 "threshold", "anchor", "alpha", "stability_window", "seed",
                 "out", "fps", "transition_frames", "binarize"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if args.exclude_journal:
        cfg.exclude_journal.extend(args.exclude_journal)
    return cfg


def _default_origin(min_year: int, window_length: int) -> int:
    # align windows with calendar multiples of the length (1952 -> 1950 for 5)
    return min_year - (min_year % window_length)


def run_pipeline(cfg: RunConfig) -> RunManifest:
    """Run ingest through export and write all artifacts to cfg.out.

    Raises ConfigError for unusable configuration or input paths and lets
    MalformedRecord propagate for broken input files.  On any failure after
    output emission began, everything written so far is removed.
    """
    cfg.validate()
    timings: dict[str, float] = {}
    mark = time.perf_counter()

    input_path = Path(cfg.input) if cfg.input else bundled_fixture_path()
    if not input_path.is_file():
        raise ConfigError(f"input file not found: {input_path}")
    raw = input_path.read_bytes()
    checksum = hashlib.sha256(raw).hexdigest()
    records = load_records(input_path)
    if not records:
        raise ConfigError(f"no records in {input_path}")
    if cfg.stopwords:
        stop_path = Path(cfg.stopwords)
        if not stop_path.is_file():
            raise ConfigError(f"stopword file not found: {stop_path}")
        stopwords = load_stopwords(stop_path.read_text(encoding="utf-8"))
    else:
        stopwords = bundled_stopwords()
    timings["ingest"] = time.perf_counter() - mark
    mark = time.perf_counter()

    max_year = max(r.year for r in records)
    origin = (cfg.origin if cfg.origin is not None
              else _default_origin(min(r.year for r in records), cfg.window_length))
    if origin > max_year:
        raise ConfigError(f"origin {origin} is later than every record year")
    corpus = filter_corpus(records, cfg.exclude_journal, (origin, max_year),
                           source=str(input_path))
    if not corpus.records:
        raise ConfigError("no records remain after filtering")
    cfg.input = str(input_path)
    cfg.stopwords = cfg.stopwords or "(bundled)"
    cfg.origin = origin

    windows = windows_for(corpus, origin, cfg.window_length)
    matrices = []
    for window in windows:
        try:
            matrices.append(build_incidence(
                corpus, window, stopwords, cfg.min_occ, cfg.anchor,
                binarize=cfg.binarize, keep_hyphens=cfg.keep_hyphens))
        except EmptyWindow:
            matrices.append(empty_incidence(window))
    timings["windowing"] = time.perf_counter() - mark
    mark = time.perf_counter()

    graphs = [build_slice_graph(m, cfg.threshold) for m in matrices]
    tables = [target_distances(g) for g in graphs]
    timings["simnet"] = time.perf_counter() - mark
    mark = time.perf_counter()

    params = StressParams(alpha=cfg.alpha, stability_window=cfg.stability_window,
                          seed=cfg.seed)
    trajectory = solve_trajectory(graphs, tables, params)
    timings["layout"] = time.perf_counter() - mark
    mark = time.perf_counter()

    out = Path(cfg.out)
    created_root = not out.exists()
    written: list[Path] = []
    try:
        (out / "slices").mkdir(parents=True, exist_ok=True)
        (out / "frames").mkdir(parents=True, exist_ok=True)

        def emit(rel: str, text: str) -> None:
            path = out / rel
            path.write_text(text, encoding="utf-8", newline="\n")
            written.append(path)

        for graph, layout in zip(graphs, trajectory.slices):
            emit(f"slices/window-{layout.window.label}.net",
                 write_pajek_net(graph, layout))
        emit("project.paj", write_pajek_project(trajectory, graphs))
        keys = build_frames(trajectory, graphs)
        for index, frame in enumerate(animation_frames(keys, cfg.transition_frames)):
            emit(f"frames/frame-{index:04d}.svg", render_svg_frame(frame))
        emit("animation.html", write_animation_html(
            keys, fps=cfg.fps, transition_frames=cfg.transition_frames))
        rows = compute_stats(trajectory, graphs, matrices)
        emit("stats.csv", write_stats(trajectory, graphs, matrices))
        timings["export"] = time.perf_counter() - mark
        mark = time.perf_counter()

        written.extend(render_figures(rows, out / "figures"))
        timings["figures"] = time.perf_counter() - mark

        outputs = sorted(p.relative_to(out).as_posix() for p in written)
        outputs.append("manifest.json")
        outputs.sort()
        manifest = RunManifest(
            version=__version__,
            config=asdict(cfg),
            input_sha256=checksum,
            records={"parsed": len(records), "used": len(corpus.records),
                     "filtered": len(corpus.filter_log)},
            timings=timings,
            outputs=outputs,
        )
        (out / "manifest.json").write_text(
            json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n",
            encoding="utf-8", newline="\n")
        return manifest
    except BaseException:
        if created_root:
            shutil.rmtree(out, ignore_errors=True)
        else:
            for path in written:
                path.unlink(missing_ok=True)
            for sub in ("figures", "frames", "slices"):
                try:
                    (out / sub).rmdir()
                except OSError:
                    pass
        raise


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        manifest = run_pipeline(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MalformedRecord as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.outputs)} files to {cfg.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
