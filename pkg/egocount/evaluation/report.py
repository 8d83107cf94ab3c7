from __future__ import annotations

import json
import logging
import typing

import pandas as pd

from egocount.evaluation.simulation import ReportRow

if typing.TYPE_CHECKING:
    from pathlib import Path
    from typing import Literal, Sequence

logger = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
COLUMNS = list(ReportRow.model_fields)


def report_frame(rows: Sequence[ReportRow]) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)


def format_report(rows: Sequence[ReportRow], fmt: Literal["csv", "json"] = "csv") -> str:
    if fmt == "csv":
        return report_frame(rows).to_csv(index=False, lineterminator="\n")
    document = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "rows": [row.model_dump() for row in rows],
    }
    return json.dumps(document, indent=2) + "\n"


def write_report(
    rows: Sequence[ReportRow], path: str | Path, fmt: Literal["csv", "json"] = "csv"
) -> None:
    with open(path, "w") as f:
        f.write(format_report(rows, fmt))
    logger.info("Wrote %d report rows to %s", len(rows), path)
