import json

import pytest

from egocount.evaluation.report import COLUMNS, format_report, write_report
from egocount.evaluation.simulation import ReportRow

ROWS = [
    ReportRow(
        pattern="triangle",
        estimator="ro",
        design="uis-wor",
        grid_point=10,
        metric="nrmse",
        value=0.25,
        mean_estimate=41.0,
        truth=40.0,
        node_coverage=0.5,
        edge_coverage=0.3,
    ),
    ReportRow(
        pattern="all",
        estimator="ro",
        design="uis-wor",
        grid_point=10,
        metric="nmae_median",
        value=0.2,
        truth=52.0,
        node_coverage=0.5,
        edge_coverage=0.3,
    ),
]


class TestFormatReport:

    def test_csv(self):
        lines = format_report(ROWS, "csv").splitlines()
        assert lines[0] == ",".join(COLUMNS)
        assert len(lines) == 3
        assert lines[1].startswith("triangle,ro,uis-wor,10,nrmse,0.25,41.0,40.0,")

    def test_json(self):
        document = json.loads(format_report(ROWS, "json"))
        assert document["schema_version"] == 1
        assert [row["metric"] for row in document["rows"]] == ["nrmse", "nmae_median"]
        assert document["rows"][1]["mean_estimate"] is None

    def test_write(self, tmp_path):
        path = tmp_path / "report.csv"
        write_report(ROWS, path)
        assert path.read_text() == format_report(ROWS)

    def test_empty(self):
        assert format_report([], "csv") == ",".join(COLUMNS) + "\n"
        assert json.loads(format_report([], "json"))["rows"] == []
