import csv
import json
from datetime import datetime, timezone
from typing import TextIO

from bessel_subord.cli.schemas import REPORT_COLUMNS, ReportRecord


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ReportWriter:
    """Writes report records as an aligned table, JSON lines or CSV.

    The first line is always a header carrying the generation timestamp;
    everything after it depends only on the records.
    """

    FORMATS = ("table", "json-lines", "csv")

    def __init__(self, stream: TextIO, fmt: str = "table") -> None:
        if fmt not in self.FORMATS:
            raise ValueError(f"Unknown report format {fmt!r}, expected one of {self.FORMATS}")
        self.stream = stream
        self.fmt = fmt

    def write(self, records: list[ReportRecord], meta: dict[str, str] | None = None) -> None:
        meta = dict(meta or {})
        meta["generated_at"] = _now()
        match self.fmt:
            case "json-lines":
                self._write_json_lines(records, meta)
            case "csv":
                self._write_csv(records, meta)
            case _:
                self._write_table(records, meta)
        self.stream.flush()

    # --- Formats ---

    def _comment_header(self, meta: dict[str, str]) -> str:
        fields = " ".join(f"{key}={value}" for key, value in meta.items())
        return f"# bessel-subord report {fields}\n"

    def _write_json_lines(self, records: list[ReportRecord], meta: dict[str, str]) -> None:
        self.stream.write(json.dumps({"header": meta}) + "\n")
        for record in records:
            self.stream.write(json.dumps(record.model_dump(mode="json", by_alias=True)) + "\n")

    def _write_csv(self, records: list[ReportRecord], meta: dict[str, str]) -> None:
        self.stream.write(self._comment_header(meta))
        writer = csv.DictWriter(self.stream, fieldnames=REPORT_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow(record.to_row())

    def _write_table(self, records: list[ReportRecord], meta: dict[str, str]) -> None:
        self.stream.write(self._comment_header(meta))
        rows = [record.to_row() for record in records]
        widths = {col: max([len(col)] + [len(row[col]) for row in rows]) for col in REPORT_COLUMNS}
        self.stream.write("  ".join(col.ljust(widths[col]) for col in REPORT_COLUMNS).rstrip() + "\n")
        for row in rows:
            self.stream.write("  ".join(row[col].ljust(widths[col]) for col in REPORT_COLUMNS).rstrip() + "\n")
        passed = sum(record.passed for record in records)
        self.stream.write(f"# {passed}/{len(records)} passed\n")
