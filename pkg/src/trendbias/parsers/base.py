"""
Base class for record file parsers.

This module defines the interface every record file format implements. A
parser only knows how to move text lines in and out of a file; validating the
content of each line is the job of :mod:`trendbias.ingest`.
"""

import os
from abc import ABC, abstractmethod
from typing import IO, Iterable, Iterator, Tuple


class UndecodableLineError(ValueError):
    """A line of a record file is not valid UTF-8."""

    def __init__(self, filepath: str, line_number: int) -> None:
        self.filepath = filepath
        self.line_number = line_number
        super().__init__(f"{filepath}:{line_number}: invalid UTF-8")


class RecordParser(ABC):
    """Base class for newline-delimited record files."""

    @classmethod
    @abstractmethod
    def open_text(
        cls, filepath: str, mode: str = "r", errors: str = "strict"
    ) -> IO[str]:
        """
        Open a record file as UTF-8 text.

        Args:
            filepath: Path to the record file
            mode: "r" to read, "w" to write
            errors: Decoding error handler, as for :func:`open`

        Returns:
            Text file object
        """
        pass

    @classmethod
    def read_lines(cls, filepath: str) -> Iterator[Tuple[int, str]]:
        """
        Iterate over the non-blank lines of a record file.

        Args:
            filepath: Path to the record file

        Yields:
            (1-based line number, line without the trailing newline)

        Raises:
            UndecodableLineError: If a line is not valid UTF-8
        """
        # undecodable bytes survive as lone surrogates until their line is reached
        with cls.open_text(filepath, "r", errors="surrogateescape") as f:
            for line_number, line in enumerate(f, start=1):
                try:
                    line.encode("utf-8")
                except UnicodeEncodeError:
                    raise UndecodableLineError(filepath, line_number) from None
                line = line.rstrip("\r\n")
                if line.strip():
                    yield line_number, line

    @classmethod
    def write_lines(cls, filepath: str, lines: Iterable[str]) -> int:
        """
        Write one line per item, newline terminated.

        Args:
            filepath: Destination path
            lines: Lines without trailing newlines

        Returns:
            Number of lines written
        """
        parent = os.path.dirname(filepath)
        if parent:
            os.makedirs(parent, exist_ok=True)

        count = 0
        with cls.open_text(filepath, "w") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
                count += 1
        return count

    @staticmethod
    def get_file_extension(filepath: str) -> str:
        """
        Get the file extension from a filepath.

        Args:
            filepath: Path to the file

        Returns:
            File extension without the dot
        """
        return os.path.splitext(filepath)[1][1:]
