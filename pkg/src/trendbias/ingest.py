"""
Record ingestion: parse stream files into validated records and index hashtags.

A stream file holds one record per line, each an object with exactly the keys
``id`` (non-negative integer), ``ts`` (integer epoch seconds, UTC) and ``tags``
(array of hashtag strings). Hashtags are normalized at ingestion: a leading
``#`` is dropped and the text is lowercased, so ``#Syria`` and ``syria`` are the
same hashtag everywhere downstream.
"""

import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from trendbias.parsers import UndecodableLineError, get_parser_for_path

logger = logging.getLogger(__name__)

REQUIRED_KEYS = frozenset({"id", "ts", "tags"})

# id and ts are stored as int64 downstream
INT64_MIN = int(np.iinfo(np.int64).min)
INT64_MAX = int(np.iinfo(np.int64).max)

# (id, ts) pair as stored in the hashtag index
Occurrence = Tuple[int, int]


class Source(str, Enum):
    """Which feed a record was observed through."""

    STREAMING = "streaming"
    SAMPLE = "sample"
    FIREHOSE = "firehose"


class RecordFormatError(ValueError):
    """A line of a stream file does not follow the record format."""

    def __init__(self, path: str, line_number: int, message: str) -> None:
        self.path = path
        self.line_number = line_number
        self.message = message
        super().__init__(f"{path}:{line_number}: {message}")


class DuplicateRecordError(RecordFormatError):
    """A record id appears twice in one stream file."""

    def __init__(
        self, path: str, line_number: int, record_id: int, first_line: int
    ) -> None:
        self.record_id = record_id
        self.first_line = first_line
        super().__init__(
            path,
            line_number,
            f"duplicate record id {record_id} (first seen on line {first_line})",
        )


@dataclass(frozen=True)
class TweetRecord:
    """One observed message."""

    id: int
    ts: int
    tags: FrozenSet[str]
    source: Source = Source.SAMPLE

    def to_line(self) -> str:
        """Serialize to the canonical record line (tags sorted, no spaces)."""
        return json.dumps(
            {"id": self.id, "ts": self.ts, "tags": sorted(self.tags)},
            separators=(",", ":"),
            ensure_ascii=False,
        )


@dataclass(frozen=True)
class HashtagIndex:
    """
    Occurrences of every hashtag in a record sequence.

    ``occurrences`` maps each hashtag to its (id, ts) pairs sorted by ts, then
    id. A record with k hashtags appears under k keys; records without
    hashtags only count towards ``total_records``.
    """

    occurrences: Mapping[str, Tuple[Occurrence, ...]]
    total_records: int

    def count(self, hashtag: str) -> int:
        return len(self.occurrences.get(hashtag, ()))

    def counts(self) -> Dict[str, int]:
        return {tag: len(occ) for tag, occ in self.occurrences.items()}

    def hashtags(self) -> List[str]:
        return sorted(self.occurrences)

    def timestamps(self, hashtag: str) -> np.ndarray:
        """Timestamps of a hashtag's occurrences as an int64 array (ascending)."""
        occ = self.occurrences.get(hashtag, ())
        return np.fromiter((ts for _, ts in occ), dtype=np.int64, count=len(occ))

    def __contains__(self, hashtag: object) -> bool:
        return hashtag in self.occurrences


def normalize_hashtag(tag: str) -> str:
    """Lowercase a hashtag and drop any leading '#'."""
    return tag.strip().lstrip("#").lower()


def _require_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def parse_record_line(
    line: str, source: Source, path: str = "<string>", line_number: int = 1
) -> TweetRecord:
    """
    Parse and validate one record line.

    Args:
        line: Text of the line
        source: Source label to attach
        path: File path, used in error messages
        line_number: 1-based line number, used in error messages

    Returns:
        The validated record

    Raises:
        RecordFormatError: If the line is not a valid record
    """
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise RecordFormatError(path, line_number, f"invalid JSON: {e.msg}")

    if not isinstance(data, dict):
        raise RecordFormatError(path, line_number, "expected an object")

    keys = set(data)
    unknown = keys - REQUIRED_KEYS
    if unknown:
        raise RecordFormatError(
            path, line_number, f"unknown key(s): {', '.join(sorted(unknown))}"
        )
    missing = REQUIRED_KEYS - keys
    if missing:
        raise RecordFormatError(
            path, line_number, f"missing key(s): {', '.join(sorted(missing))}"
        )

    record_id = data["id"]
    if not _require_int(record_id) or not 0 <= record_id <= INT64_MAX:
        raise RecordFormatError(
            path,
            line_number,
            f"'id' must be a non-negative 64-bit integer, got {record_id!r}",
        )

    ts = data["ts"]
    if not _require_int(ts) or not INT64_MIN <= ts <= INT64_MAX:
        raise RecordFormatError(
            path, line_number, f"'ts' must be a 64-bit integer, got {ts!r}"
        )

    raw_tags = data["tags"]
    if not isinstance(raw_tags, list):
        raise RecordFormatError(path, line_number, "'tags' must be an array")

    tags = set()
    for raw in raw_tags:
        if not isinstance(raw, str):
            raise RecordFormatError(
                path, line_number, f"hashtag must be a string, got {raw!r}"
            )
        tag = normalize_hashtag(raw)
        if not tag:
            raise RecordFormatError(path, line_number, "empty hashtag")
        tags.add(tag)

    return TweetRecord(id=record_id, ts=ts, tags=frozenset(tags), source=source)


def parse_stream(path: str, source: Source = Source.SAMPLE) -> Tuple[TweetRecord, ...]:
    """
    Parse a stream file into records, in file order.

    Args:
        path: Path to a record file (.ndjson, .jsonl or .gz)
        source: Source label attached to every record

    Returns:
        Tuple of records; empty for an empty file

    Raises:
        RecordFormatError: On a malformed line
        DuplicateRecordError: When an id repeats
        ValueError: If the file extension is not supported
    """
    parser_class = get_parser_for_path(path)

    records: List[TweetRecord] = []
    first_seen: Dict[int, int] = {}

    try:
        for line_number, line in parser_class.read_lines(path):
            record = parse_record_line(line, source, path, line_number)
            if record.id in first_seen:
                raise DuplicateRecordError(
                    path, line_number, record.id, first_seen[record.id]
                )
            first_seen[record.id] = line_number
            records.append(record)
    except UndecodableLineError as e:
        raise RecordFormatError(path, e.line_number, "invalid UTF-8") from e

    logger.info(f"Parsed {len(records)} {source.value} records from {path}")
    return tuple(records)


def write_stream(records: Iterable[TweetRecord], path: str) -> int:
    """
    Write records in the canonical line format.

    Args:
        records: Records to write, in order
        path: Destination path; the extension selects the format

    Returns:
        Number of records written
    """
    parser_class = get_parser_for_path(path)
    count = parser_class.write_lines(path, (record.to_line() for record in records))
    logger.info(f"Wrote {count} records to {path}")
    return count


def filter_by_hashtag(
    records: Iterable[TweetRecord], keyword: str
) -> Tuple[TweetRecord, ...]:
    """Keep the records carrying ``keyword`` as a hashtag (case-insensitive)."""
    tag = normalize_hashtag(keyword)
    return tuple(record for record in records if tag in record.tags)


def build_index(records: Iterable[TweetRecord]) -> HashtagIndex:
    """
    Index hashtag occurrences.

    Args:
        records: Records in any order

    Returns:
        HashtagIndex with occurrence lists sorted by (ts, id)
    """
    buckets: Dict[str, List[Occurrence]] = defaultdict(list)
    total = 0

    for record in records:
        total += 1
        for tag in record.tags:
            buckets[tag].append((record.id, record.ts))

    occurrences = {
        tag: tuple(sorted(occ, key=lambda o: (o[1], o[0])))
        for tag, occ in sorted(buckets.items())
    }
    return HashtagIndex(occurrences=occurrences, total_records=total)


def rank_hashtags(index: HashtagIndex) -> List[Tuple[str, int]]:
    """All hashtags ranked by count descending, ties broken lexicographically."""
    return sorted(index.counts().items(), key=lambda item: (-item[1], item[0]))


def top_k_hashtags(index: HashtagIndex, k: int) -> List[Tuple[str, int]]:
    """
    The k most frequent hashtags.

    Args:
        index: Hashtag index
        k: Number of hashtags to return (at least 1)

    Returns:
        Up to k (hashtag, count) pairs, count descending, lexicographic tie-break
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    return rank_hashtags(index)[:k]


def timestamp_span(streams: Sequence[Iterable[TweetRecord]]) -> Tuple[int, int]:
    """
    Earliest and latest timestamp over several record sequences.

    Raises:
        ValueError: If every sequence is empty
    """
    lo, hi = None, None
    for stream in streams:
        for record in stream:
            if lo is None or record.ts < lo:
                lo = record.ts
            if hi is None or record.ts > hi:
                hi = record.ts
    if lo is None or hi is None:
        raise ValueError("cannot derive a time span from empty streams")
    return lo, hi
