"""Animated co-word, co-author and journal maps of a document corpus.

The pipeline slices a bibliography into fixed-length year windows, builds a
cosine-normalized attribute network per window, lays the slice sequence out
with temporally coupled stress majorization, and renders the result as Pajek
files, SVG frames, summary figures and a self-contained HTML animation.
"""

__version__ = "0.1.0"

from .ingest import (BiblioRecord, Corpus, MalformedRecord, filter_corpus,
                     load_stopwords, parse_field_tagged)
from .windowing import (Attribute, EmptyWindow, IncidenceMatrix, Kind,
                        TimeWindow, build_incidence, extract_attributes,
                        window_of)
from .simnet import (DistanceTable, SliceGraph, ZeroVector, build_slice_graph,
                     cosine, target_distances)
from .layout import (LayoutSlice, StressParams, Trajectory, classical_init,
                     majorize_sweep, pack_components, slice_stress,
                     solve_slice, solve_trajectory)
from .export import (Frame, interpolate, read_pajek_net, render_svg_frame,
                     write_animation_html, write_pajek_net,
                     write_pajek_project, write_stats)
from .cli import RunConfig, RunManifest, main, run_pipeline

__all__ = [
    "__version__",
    "BiblioRecord", "Corpus", "MalformedRecord", "filter_corpus",
    "load_stopwords", "parse_field_tagged",
    "Attribute", "EmptyWindow", "IncidenceMatrix", "Kind", "TimeWindow",
    "build_incidence", "extract_attributes", "window_of",
    "DistanceTable", "SliceGraph", "ZeroVector", "build_slice_graph",
    "cosine", "target_distances",
    "LayoutSlice", "StressParams", "Trajectory", "classical_init",
    "majorize_sweep", "pack_components", "slice_stress", "solve_slice",
    "solve_trajectory",
    "Frame", "interpolate", "read_pajek_net", "render_svg_frame",
    "write_animation_html", "write_pajek_net", "write_pajek_project",
    "write_stats",
    "RunConfig", "RunManifest", "main", "run_pipeline",
]
