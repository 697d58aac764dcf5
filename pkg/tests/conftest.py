"""
Configuration file for pytest.

This file sets up the test environment and adds the src directory to the Python path.
"""

import json
import os
import sys

import pytest

# Add the src directory to the Python path
src_dir = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src"))
sys.path.insert(0, src_dir)


@pytest.fixture
def write_records(tmp_path):
    """Return a helper that writes record dictionaries as one JSON object per line."""

    def _write(name, records):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record) + "\n")
        return str(path)

    return _write


@pytest.fixture
def sample_record_data():
    """Return a few raw record dictionaries spanning two hours."""
    return [
        {"id": 1, "ts": 0, "tags": ["Syria"]},
        {"id": 2, "ts": 30, "tags": ["#syria", "news"]},
        {"id": 3, "ts": 3600, "tags": []},
        {"id": 4, "ts": 3700, "tags": ["news"]},
        {"id": 5, "ts": 7100, "tags": ["syria"]},
    ]


@pytest.fixture
def stream_pair(write_records):
    """
    A filtered stream and a reference sample over six hourly bins.

    '#alpha' appears in every sample bin; '#beta' never reaches the sample, so
    all its streaming bins are known zeros.
    """
    streaming, sample = [], []
    next_id = 0
    alpha_streaming = [4, 6, 10, 20, 8, 4]
    alpha_sample = [2, 3, 5, 9, 4, 2]
    beta_streaming = [1, 0, 2, 0, 1, 0]
    for b in range(6):
        for j in range(alpha_streaming[b]):
            streaming.append({"id": next_id, "ts": b * 3600 + j, "tags": ["alpha"]})
            next_id += 1
        for j in range(beta_streaming[b]):
            streaming.append(
                {"id": next_id, "ts": b * 3600 + 100 + j, "tags": ["beta"]}
            )
            next_id += 1
        for j in range(alpha_sample[b]):
            sample.append({"id": next_id, "ts": b * 3600 + 200 + j, "tags": ["alpha"]})
            next_id += 1
    return {
        "streaming": write_records("streaming.ndjson", streaming),
        "sample": write_records("sample.ndjson", sample),
        "alpha_streaming": alpha_streaming,
        "alpha_sample": alpha_sample,
        "beta_streaming": beta_streaming,
    }
