"""SVG rendering of search traces: structure, grouping, determinism."""
from __future__ import annotations

import re

from semascope.diff.myers import SesTrace, ses
from semascope.diff.traceplot import render_trace_svg


def traced(a, b) -> SesTrace:
    trace = SesTrace()
    ses(a, b, trace=trace)
    return trace


def test_valid_svg_document():
    doc = render_trace_svg(traced("abcab", "ayb"))
    assert doc.lstrip().startswith("<?xml")
    assert "<svg" in doc and doc.rstrip().endswith("</svg>")
    assert 'version="1.1"' in doc


def test_groups_one_per_round():
    trace = traced("ABCABBA", "CBABAC")  # D = 5
    doc = render_trace_svg(trace)
    assert doc.count('id="initial-snake"') == 1
    rounds = sorted(
        int(m) for m in re.findall(r'id="frontier-round-(\d+)"', doc)
    )
    assert rounds == [1, 2, 3, 4, 5]
    assert 'id="edit-grid"' in doc


def test_title_reports_dimensions_and_distance():
    doc = render_trace_svg(traced("ABCABBA", "CBABAC"))
    assert "n=7" in doc and "m=6" in doc and "D=5" in doc


def test_identical_inputs_draw_only_the_snake():
    doc = render_trace_svg(traced("same", "same"))
    assert 'id="initial-snake"' in doc
    assert "frontier-round-" not in doc
    assert "D=0" in doc


def test_empty_inputs_render():
    doc = render_trace_svg(traced("", ""))
    assert "<svg" in doc


def test_truncation_noted_in_title():
    trace = SesTrace(state_limit=5)
    ses("aaaa", "bbbb", trace=trace)
    assert trace.truncated
    doc = render_trace_svg(trace)
    assert "truncated" in doc


def test_byte_determinism_within_process():
    trace = traced("ABCABBA", "CBABAC")
    assert render_trace_svg(trace) == render_trace_svg(trace)


def test_no_timestamps_or_random_ids():
    doc = render_trace_svg(traced("abc", "abd"))
    assert "<dc:date>" not in doc
    # matplotlib stamps a creation date comment unless told not to
    assert not re.search(r"\d{4}-\d{2}-\d{2}T\d{2}:", doc)


def test_writes_file_when_asked(tmp_path):
    out = tmp_path / "trace.svg"
    doc = render_trace_svg(traced("abc", "acb"), out)
    assert out.read_text(encoding="utf-8") == doc
