# shared/tables.py
"""Coefficient table ingestion.

Each table file starts with a `# table <name>` header followed by `<index> <p/q>` lines.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

logger = logging.getLogger(__name__)

TABLE_SIZES = {"f0": 15, "w0": 45, "w1": 36}
DEFAULT_TABLES_DIR = Path(__file__).resolve().parents[1] / "data"

_HEADER = re.compile(r"^#\s*table\s+(\w+)\s*$")
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class TableFormatError(ValueError):
    """Malformed rational, wrong entry count, duplicate or missing index."""


@dataclass(frozen=True)
class CoefficientTables:
    f0: tuple[Fraction, ...]
    w0: tuple[Fraction, ...]
    w1: tuple[Fraction, ...]
    checksums: dict[str, str]


def parse_rational(text: str) -> Fraction:
    if not _RATIONAL.match(text):
        raise TableFormatError(f"malformed rational {text!r}")
    if text.endswith("/0"):
        raise TableFormatError(f"zero denominator in {text!r}")
    return Fraction(text)


def parse_table(text: str, name: str) -> tuple[Fraction, ...]:
    """Entries of table name from file contents, ordered by index."""
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise TableFormatError(f"table {name}: empty file")
    header = _HEADER.match(lines[0])
    if header is None or header.group(1) != name:
        raise TableFormatError(f"table {name}: expected header '# table {name}', got {lines[0]!r}")

    entries: dict[int, Fraction] = {}
    for line in lines[1:]:
        if line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or not parts[0].isdigit():
            raise TableFormatError(f"table {name}: malformed line {line!r}")
        index = int(parts[0])
        if index in entries:
            raise TableFormatError(f"table {name}: duplicate index {index}")
        entries[index] = parse_rational(parts[1])

    expected = TABLE_SIZES.get(name)
    if expected is not None and len(entries) != expected:
        raise TableFormatError(f"table {name}: expected {expected} entries, got {len(entries)}")
    missing = sorted(set(range(len(entries))) - set(entries))
    if missing:
        raise TableFormatError(f"table {name}: missing indices {missing}")
    return tuple(entries[i] for i in range(len(entries)))


def ingest_tables(directory: str | Path = DEFAULT_TABLES_DIR) -> CoefficientTables:
    directory = Path(directory)
    parsed: dict[str, tuple[Fraction, ...]] = {}
    checksums: dict[str, str] = {}
    for name in TABLE_SIZES:
        path = directory / f"{name}.txt"
        if not path.exists():
            raise RuntimeError(f"Coefficient table not found: {path}")
        raw = path.read_bytes()
        parsed[name] = parse_table(raw.decode("utf-8"), name)
        checksums[name] = hashlib.sha256(raw).hexdigest()

    logger.info("Tables ingested", extra={"directory": str(directory), "checksums": checksums})
    return CoefficientTables(f0=parsed["f0"], w0=parsed["w0"], w1=parsed["w1"], checksums=checksums)
