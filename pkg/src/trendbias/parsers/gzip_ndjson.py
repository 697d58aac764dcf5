"""
Parser for gzip-compressed newline-delimited record files.

Large collections are usually archived compressed (``stream.ndjson.gz``). The
registry keys on the last extension only, so any ``.gz`` file is treated as a
compressed record file.
"""

import gzip
import io
import logging
from typing import IO

from .base import RecordParser
from . import register_parser

logger = logging.getLogger(__name__)


class GzipNdjsonParser(RecordParser):
    """Parser for gzip-compressed newline-delimited record files."""

    @classmethod
    def open_text(
        cls, filepath: str, mode: str = "r", errors: str = "strict"
    ) -> IO[str]:
        logger.debug(f"Opening compressed record file: {filepath}")
        if mode == "w":
            # mtime=0 so identical content gives identical bytes
            raw = gzip.GzipFile(filepath, "wb", mtime=0)
            return io.TextIOWrapper(raw, encoding="utf-8", errors=errors, newline="")
        return gzip.open(
            filepath, "rt", encoding="utf-8", errors=errors, newline=""
        )


# Register this parser for compressed files
register_parser(["gz"], GzipNdjsonParser)
