"""
Tests for the CSV report writers.
"""

import numpy as np

from trendbias.formatter import (
    BASELINE_SAMPLE_HEADER,
    GROUND_TRUTH_HEADER,
    PERIODS_HEADER,
    baseline_rows,
    format_value,
    ground_truth_rows,
    periods_rows,
    render_csv,
    series_rows,
    write_csv,
)
from trendbias.stats import BaselinePoint, BiasPeriod, RankCorrelationResult, Verdict
from trendbias.timeseries import TimeSeries, standard_score


def test_format_value():
    assert format_value(None) == ""
    assert format_value(0.1) == "0.1"
    assert format_value(float("nan")) == "nan"
    assert format_value(3) == "3"
    assert format_value(Verdict.OVER) == "OVER"


def test_render_csv_uses_unix_newlines():
    text = render_csv(["a", "b"], [(1, 2.5), ("x,y", None)])

    assert text == 'a,b\n1,2.5\n"x,y",\n'


def test_write_csv_creates_directories(tmp_path):
    path = tmp_path / "deep" / "report.csv"

    write_csv(str(path), PERIODS_HEADER, [])

    assert path.read_text(encoding="utf-8") == ",".join(PERIODS_HEADER) + "\n"


def test_series_rows_with_and_without_scores():
    series = TimeSeries("h", 3600, 60, np.array([1, 3]))

    assert series_rows(series) == [(0, 3600, 1, None), (1, 3660, 3, None)]
    assert series_rows(series, standard_score(series)) == [
        (0, 3600, 1, -1.0),
        (1, 3660, 3, 1.0),
    ]


def test_baseline_rows_fill_missing_sample_points():
    points = [BaselinePoint(10, 0.8, 0.1, 5), BaselinePoint(20, 0.6, 0.2, 5)]
    observed = [RankCorrelationResult(20, 0.5, 0.01, 10, 2, 20)]

    rows = baseline_rows(points, observed)
    text = render_csv(BASELINE_SAMPLE_HEADER, rows)

    assert text.split("\n")[1:3] == ["10,0.8,0.1,nan", "20,0.6,0.2,0.5"]


def test_periods_rows_write_verdict_names():
    rows = periods_rows([BiasPeriod(2, 4, 7200, 18000, Verdict.UNDER)])

    assert render_csv(PERIODS_HEADER, rows).split("\n")[1] == "2,4,7200,18000,UNDER"


def test_ground_truth_rows_are_sorted():
    truth = {"s2": {"b": frozenset({3, 1})}, "s1": {"z": frozenset({0}), "a": []}}

    assert render_csv(GROUND_TRUTH_HEADER, ground_truth_rows(truth)).split("\n")[
        1:-1
    ] == ["s1,z,0", "s2,b,1", "s2,b,3"]
