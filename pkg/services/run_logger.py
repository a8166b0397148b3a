import logging
from pathlib import Path

from models.reports import RoundRecord, RunSummary


logger = logging.getLogger(__name__)


class RunLogger:
    """Writes one JSON object per learning round; keeps the records in memory as well."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.records: list[RoundRecord] = []
        if self.path is not None:
            self.path.write_text("", encoding="utf-8")

    def log_round(self, record: RoundRecord) -> None:
        self.records.append(record)
        logger.info(
            f"Round {record.round}: {record.tree_size} nodes, {record.reds} reds, "
            f"complete={record.basis_complete}, empirical_error={record.empirical_error}, "
            f"counterexample={record.counterexample}"
        )
        self._append(record.model_dump_json())

    def log_summary(self, summary: RunSummary) -> None:
        self._append(summary.model_dump_json())

    def _append(self, line: str) -> None:
        if self.path is None:
            return
        with self.path.open("a", encoding="utf-8") as f:
            f.write(line + "\n")
