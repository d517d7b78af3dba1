"""Evaluation reports and their CSV/JSON serialization.

Serialization is deterministic: fixed field order, shortest round-trip
float formatting, entries in manifest order.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field

from ..metrics import REPORT_FIELDS, aggregate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EXTERNAL = 3


@dataclass
class ErrorRow:
    image: str
    error: str
    kind: str = "data"  # "data" or "external"


@dataclass
class EvalReport:
    """Per-image results in manifest order plus the run configuration.

    `results` holds one :class:`~docbin.metrics.MetricReport` or
    :class:`ErrorRow` per evaluated entry.
    """

    results: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def rows(self):
        return [r for r in self.results if not isinstance(r, ErrorRow)]

    @property
    def errors(self):
        return [r for r in self.results if isinstance(r, ErrorRow)]

    @property
    def aggregate(self):
        rows = self.rows
        return aggregate(rows) if rows else {}

    @property
    def exit_code(self):
        errors = self.errors
        if any(e.kind == "external" for e in errors):
            return EXIT_EXTERNAL
        return EXIT_DATA if errors else EXIT_OK

    def __len__(self):
        return len(self.results)

    def to_dict(self):
        return {
            "config": self.config,
            "rows": [r.row() for r in self.rows],
            "errors": [{"image": e.image, "kind": e.kind, "error": e.error} for e in self.errors],
            "aggregate": self.aggregate,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self):
        """Header plus one line per entry; failed entries carry empty metrics."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        blank = [""] * (len(REPORT_FIELDS) - 2)
        for r in self.results:
            if isinstance(r, ErrorRow):
                writer.writerow([r.image, *blank, self.config.get("psnr_mode", "")])
            else:
                writer.writerow([_fmt(v) for v in r.row().values()])
        return buf.getvalue()

    def write(self, csv_path=None, json_path=None):
        if csv_path:
            with open(csv_path, "w", newline="") as fh:
                fh.write(self.to_csv())
        if json_path:
            with open(json_path, "w") as fh:
                fh.write(self.to_json())


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)
