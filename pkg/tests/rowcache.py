"""Session-wide cache so the table rows are evaluated once per test run."""

from functools import cache

from cmtwist.fixtures import FixtureRow, RowResult, evaluate_row


@cache
def row_result(row: FixtureRow) -> RowResult:
    return evaluate_row(row)
