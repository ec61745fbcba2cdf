"""Reader for the versioned CSV contract produced by the simulator.

Both files start with a `# schema: <name>/<version>` comment line followed by
a plain CSV header. Columns beyond the required set are tolerated; missing
ones are an error that names exactly what is absent.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

SUMMARY_SCHEMA = "summary/1"
BLOCKS_SCHEMA = "blocks/1"

SUMMARY_COLUMNS = ("run_id", "protocol", "block_mb", "k", "M", "nodes",
                   "seed", "L50_s", "L90_s", "delta", "stale_rate",
                   "bytes_total", "bytes_wasted")
BLOCKS_COLUMNS = ("run_id", "block_id", "height", "miner", "mine_time_s",
                  "t50_s", "t90_s", "t100_s", "stale")


class ContractError(RuntimeError):
    """Input does not satisfy the CSV contract."""


def read_table(path: str, expect_schema: str,
               required: Sequence[str]) -> List[Dict[str, str]]:
    """Read one contract CSV; returns row dicts keyed by column name."""
    try:
        with open(path, "r") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ContractError(f"{path}: {exc}") from exc

    if not lines or not lines[0].startswith("# schema: "):
        raise ContractError(f"{path}: missing '# schema:' header line")
    schema = lines[0][len("# schema: "):].strip()
    if schema != expect_schema:
        raise ContractError(
            f"{path}: schema {schema!r} does not match expected "
            f"{expect_schema!r}")

    if len(lines) < 2:
        raise ContractError(f"{path}: missing column header row")
    columns = lines[1].split(",")
    missing = [c for c in required if c not in columns]
    if missing:
        raise ContractError(
            f"{path}: missing columns {missing}; found {columns}")

    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise ContractError(
                f"{path}:{lineno}: expected {len(columns)} cells, "
                f"got {len(cells)}")
        rows.append(dict(zip(columns, cells)))
    return rows


def read_summary(path: str) -> List[Dict[str, str]]:
    return read_table(path, SUMMARY_SCHEMA, SUMMARY_COLUMNS)


def read_blocks(path: str) -> List[Dict[str, str]]:
    return read_table(path, BLOCKS_SCHEMA, BLOCKS_COLUMNS)
