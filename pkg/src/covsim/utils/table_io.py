"""
Deterministic CSV tables.

Numbers are written with 9 significant digits, '.' decimal separator and '\n'
line endings, independent of locale. Provenance lines start with '#' and are
the only place a version string may appear, so table bodies compare
byte-for-byte between runs.
"""

import csv
import io
import logging
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, TextIO, Tuple, Union

logger = logging.getLogger(__name__)

Cell = Union[float, int, bool, str, None]


def format_number(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format(float(value), ".9g")
    return str(value)


@dataclass
class SweepTable:
    """Rectangular result table with '#' provenance lines"""
    columns: List[str]
    rows: List[List[Cell]] = field(default_factory=list)
    provenance: List[str] = field(default_factory=list)

    def add_row(self, row: Sequence[Cell]) -> None:
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} cells, table has {len(self.columns)} columns")
        self.rows.append(list(row))

    def column(self, name: str) -> List[Cell]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def body(self) -> str:
        """Header and rows only, without provenance."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_number(v) for v in row])
        return buf.getvalue()

    def to_csv(self) -> str:
        head = "".join(f"# {line}\n" for line in self.provenance)
        return head + self.body()

    def write(self, target: Union[str, Path, TextIO]) -> None:
        text = self.to_csv()
        if hasattr(target, "write"):
            target.write(text)
            return
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps '\n' on every platform
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("💾 Wrote %d rows to %s", len(self.rows), path)


def split_provenance(text: str) -> List[str]:
    """Provenance lines of a CSV document, '# ' prefix removed."""
    lines = []
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        lines.append(line[2:] if line.startswith("# ") else line[1:])
    return lines


def _body_lines(text: str) -> List[str]:
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def read_csv(source: Union[str, Path]) -> Tuple[List[str], List[dict]]:
    """(header, dict rows) of a CSV file, skipping '#' lines. An empty body has an empty header."""
    text = Path(source).read_text(encoding="utf-8")
    reader = csv.DictReader(_body_lines(text))
    rows = list(reader)
    return list(reader.fieldnames or []), rows


def read_rows(source: Union[str, Path]) -> List[dict]:
    """Parse a CSV file into dict rows, skipping '#' lines."""
    return read_csv(source)[1]


def read_table(source: Union[str, Path]) -> SweepTable:
    """Load a CSV written by SweepTable back as floats (empty cells become None)."""
    text = Path(source).read_text(encoding="utf-8")
    reader = csv.DictReader(_body_lines(text))
    table = SweepTable(columns=list(reader.fieldnames or []), provenance=split_provenance(text))
    for row in reader:
        table.add_row([float(row[c]) if row[c] != "" else None for c in table.columns])
    return table
