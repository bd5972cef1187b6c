"""Tekstuitvoer: ASCII-tabellen en getalopmaak."""
from fractions import Fraction
from typing import Any, Optional

# Significante cijfers voor floats in CSV en rapporten
FLOAT_DIGITS = 12


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return format(value, f".{FLOAT_DIGITS}g")
    return str(value)


def format_table(headers: list[str], rows: list[list[Any]], title: Optional[str] = None) -> str:
    """Nette ASCII tabel, kolommen links uitgelijnd."""
    cells = [[format_value(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in cells:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    lines = []
    if title:
        lines += ["=" * 60, f"  {title}", "=" * 60]
    lines.append(" | ".join(h.ljust(widths[i]) for i, h in enumerate(headers)))
    lines.append("-+-".join("-" * w for w in widths))
    for row in cells:
        lines.append(" | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)
