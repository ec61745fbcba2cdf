"""CSV contract validation."""

import pytest

from figkit.contract import (ContractError, read_blocks, read_summary,
                             read_table)

from conftest import write_summary


def test_reads_reference_summary(bundle):
    rows = read_summary(str(bundle / "summary.csv"))
    assert len(rows) == 16
    assert {r["protocol"] for r in rows} == {"sr", "cbr", "ct", "coded"}
    assert all(float(r["L90_s"]) > 0 for r in rows)


def test_reads_reference_blocks(bundle):
    rows = read_blocks(str(bundle / "blocks.csv"))
    assert len(rows) == 16 * 30
    assert all(r["stale"] in ("0", "1") for r in rows)


def test_missing_schema_line(tmp_path):
    p = tmp_path / "summary.csv"
    p.write_text("run_id,protocol\nx,sr\n")
    with pytest.raises(ContractError, match="schema"):
        read_summary(str(p))


def test_wrong_schema_version(tmp_path):
    p = tmp_path / "summary.csv"
    p.write_text("# schema: summary/9\nrun_id\nx\n")
    with pytest.raises(ContractError, match="summary/9"):
        read_summary(str(p))


def test_missing_columns_are_named(tmp_path):
    p = tmp_path / "summary.csv"
    p.write_text("# schema: summary/1\nrun_id,protocol\nx,sr\n")
    with pytest.raises(ContractError) as exc:
        read_summary(str(p))
    msg = str(exc.value)
    assert "L90_s" in msg and "stale_rate" in msg and "missing columns" in msg


def test_extra_columns_tolerated(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# schema: x/1\na,b,c\n1,2,3\n")
    rows = read_table(str(p), "x/1", ("a", "b"))
    assert rows == [{"a": "1", "b": "2", "c": "3"}]


def test_ragged_row_rejected(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("# schema: x/1\na,b\n1\n")
    with pytest.raises(ContractError, match="cells"):
        read_table(str(p), "x/1", ("a",))


def test_missing_file(tmp_path):
    with pytest.raises(ContractError):
        read_summary(str(tmp_path / "nope.csv"))


def test_empty_data_rows_read_back_empty(tmp_path):
    write_summary(tmp_path / "summary.csv", [])
    assert read_summary(str(tmp_path / "summary.csv")) == []
