"""
Record file parsers for different on-disk formats.

This module provides a registry of parsers keyed by file extension. Every
parser reads and writes the same newline-delimited record format; they differ
only in how the bytes are stored.
"""

from typing import Dict, Type, List, Optional
from .base import RecordParser, UndecodableLineError

# Registry of parsers by file extension
_PARSERS: Dict[str, Type[RecordParser]] = {}


def register_parser(extensions: List[str], parser_class: Type[RecordParser]) -> None:
    """
    Register a parser class for the given file extensions.

    Args:
        extensions: List of file extensions this parser handles (without the dot)
        parser_class: The parser class to register
    """
    for ext in extensions:
        _PARSERS[ext.lower()] = parser_class


def get_parser_for_extension(extension: str) -> Optional[Type[RecordParser]]:
    """
    Get the appropriate parser class for a file extension.

    Args:
        extension: File extension (without the dot)

    Returns:
        Parser class for the extension, or None if no parser is registered
    """
    return _PARSERS.get(extension.lower())


def get_supported_extensions() -> List[str]:
    """
    Get a list of all supported file extensions.

    Returns:
        List of supported file extensions
    """
    return list(_PARSERS.keys())


def get_parser_for_path(filepath: str) -> Type[RecordParser]:
    """
    Resolve the parser for a file path, failing loudly for unknown formats.

    Args:
        filepath: Path to a record file

    Returns:
        Parser class registered for the path's extension

    Raises:
        ValueError: If no parser handles the extension
    """
    extension = RecordParser.get_file_extension(filepath)
    parser_class = get_parser_for_extension(extension)
    if parser_class is None:
        supported = ", ".join(sorted(get_supported_extensions()))
        raise ValueError(
            f"No parser found for extension '{extension}' ({filepath}). "
            f"Supported extensions are: {supported}"
        )
    return parser_class


# Import all parsers to register them
from .ndjson import NdjsonParser  # noqa: E402
from .gzip_ndjson import GzipNdjsonParser  # noqa: E402

__all__ = [
    "RecordParser",
    "UndecodableLineError",
    "register_parser",
    "get_parser_for_extension",
    "get_parser_for_path",
    "get_supported_extensions",
    "NdjsonParser",
    "GzipNdjsonParser",
]
