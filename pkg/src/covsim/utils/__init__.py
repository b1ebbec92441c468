"""Table formatting and CSV helpers."""
