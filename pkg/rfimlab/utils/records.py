"""
Record persistence.

Records are appended one JSON object per line by a single writer, flushed in
batches. A file cut short by a crash still parses line by line; a trailing
partial line is skipped with a warning.
"""

import logging
from pathlib import Path
from typing import Iterable, List, Optional

from pydantic import ValidationError

from rfimlab.config import config
from rfimlab.exceptions import RecordIOError
from rfimlab.models import ExperimentRecord

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"


class RecordWriter:
    """Line-delimited writer owning one records file."""

    def __init__(self, path: Path, flush_every: int = config.flush_every, timing: Optional[bool] = None):
        self.path = Path(path)
        self.flush_every = max(1, flush_every)
        self.timing = config.record_timing if timing is None else timing
        self.written = 0
        self._pending: List[str] = []
        self._handle = None

    def __enter__(self) -> "RecordWriter":
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._handle = open(self.path, "w", encoding="utf-8")
        except OSError as e:
            raise RecordIOError(f"cannot open {self.path}: {e}") from e
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        # Records produced before a failure are kept.
        self.flush()
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def encode(self, record: ExperimentRecord) -> str:
        exclude = None if self.timing else {"wall_time"}
        return record.model_dump_json(exclude=exclude)

    def write(self, record: ExperimentRecord) -> None:
        self._pending.append(self.encode(record))
        self.written += 1
        if len(self._pending) >= self.flush_every:
            self.flush()

    def write_all(self, records: Iterable[ExperimentRecord]) -> None:
        for record in records:
            self.write(record)

    def flush(self) -> None:
        if not self._pending or self._handle is None:
            return
        try:
            self._handle.write("\n".join(self._pending) + "\n")
            self._handle.flush()
        except OSError as e:
            raise RecordIOError(f"cannot write {self.path}: {e}") from e
        self._pending.clear()


def read_records(path: Path) -> List[ExperimentRecord]:
    """Parse a records file; a malformed final line (interrupted write) is dropped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise RecordIOError(f"cannot read {path}: {e}") from e
    records = []
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(ExperimentRecord.model_validate_json(line))
        except ValidationError:
            if i == len(lines) - 1:
                logger.warning("skipping truncated last record in %s", path)
                continue
            raise RecordIOError(f"{path}:{i + 1} is not a valid record")
    return records
