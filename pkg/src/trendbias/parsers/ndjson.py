"""
Parser for plain newline-delimited record files (.ndjson, .jsonl).
"""

from typing import IO

from .base import RecordParser
from . import register_parser


class NdjsonParser(RecordParser):
    """Parser for uncompressed newline-delimited record files."""

    @classmethod
    def open_text(
        cls, filepath: str, mode: str = "r", errors: str = "strict"
    ) -> IO[str]:
        # newline="" keeps "\n" terminators byte-identical on every platform
        return open(filepath, mode, encoding="utf-8", errors=errors, newline="")


# Register this parser for the plain-text extensions
register_parser(["ndjson", "jsonl"], NdjsonParser)
