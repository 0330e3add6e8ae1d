from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from sqlalchemy import func, select

from ..errors import KanThurstonError
from ..models import BatchItem, BatchRecord
from ..reports import EXIT_CHECK_FAILED, EXIT_OK
from ..utils import sha256_file


LOGGER = logging.getLogger(__name__)

ITEM_QUEUED = "queued"
ITEM_RUNNING = "running"
ITEM_PASSED = "passed"
ITEM_FAILED = "failed"
ITEM_INVALID = "invalid"
ITEM_CRASHED = "crashed"

ITEM_STATUSES = (ITEM_QUEUED, ITEM_RUNNING, ITEM_PASSED, ITEM_FAILED, ITEM_INVALID, ITEM_CRASHED)
FINAL_STATUSES = frozenset({ITEM_PASSED, ITEM_FAILED, ITEM_INVALID, ITEM_CRASHED})


def status_for_exit(exit_code: int) -> str:
    if exit_code == EXIT_OK:
        return ITEM_PASSED
    if exit_code == EXIT_CHECK_FAILED:
        return ITEM_FAILED
    return ITEM_INVALID


@dataclass(frozen=True)
class BatchSnapshot:
    id: int
    command: str
    input_dir: str
    item_count: int
    created_at: datetime
    finished_at: datetime | None


@dataclass(frozen=True)
class ItemSnapshot:
    id: int
    batch_id: int
    input_path: str
    input_digest: str
    status: str
    attempts: int
    exit_code: int | None
    error_code: str | None
    error_message: str | None
    run_report_id: int | None

    @property
    def name(self) -> str:
        return Path(self.input_path).name


class BatchService:
    def __init__(self, session_factory, *, max_attempts: int = 2):
        self.session_factory = session_factory
        self.max_attempts = max(1, int(max_attempts))

    def open_batch(self, *, command: str, input_dir: Path, inputs: list[Path]) -> BatchSnapshot:
        clean = str(command or "").strip()
        if not clean:
            raise KanThurstonError("A batch needs a command to run.", code="empty_command")
        now = datetime.utcnow()
        with self.session_factory() as session:
            batch = BatchRecord(command=clean, input_dir=str(input_dir), created_at=now)
            session.add(batch)
            session.flush()
            for path in inputs:
                session.add(
                    BatchItem(
                        batch_id=batch.id,
                        input_path=str(path),
                        input_digest=sha256_file(path) if path.is_file() else "",
                        status=ITEM_QUEUED,
                        max_attempts=self.max_attempts,
                    )
                )
            session.commit()
            session.refresh(batch)
            LOGGER.info("batch %d opened: %r over %d inputs", batch.id, clean, len(inputs))
            return self._batch_snapshot(session, batch)

    def close_batch(self, batch_id: int) -> BatchSnapshot:
        with self.session_factory() as session:
            batch = self._require_batch(session, batch_id)
            batch.finished_at = datetime.utcnow()
            session.commit()
            session.refresh(batch)
            return self._batch_snapshot(session, batch)

    def get_batch(self, batch_id: int) -> BatchSnapshot | None:
        with self.session_factory() as session:
            batch = session.get(BatchRecord, int(batch_id))
            return None if batch is None else self._batch_snapshot(session, batch)

    def claim(self, batch_id: int, *, worker: str, limit: int = 1) -> list[ItemSnapshot]:
        """Mark up to ``limit`` queued items running, oldest first."""
        now = datetime.utcnow()
        with self.session_factory() as session:
            rows = list(
                session.scalars(
                    select(BatchItem)
                    .where(BatchItem.batch_id == int(batch_id), BatchItem.status == ITEM_QUEUED)
                    .order_by(BatchItem.id.asc())
                    .limit(max(1, int(limit)))
                ).all()
            )
            for item in rows:
                item.status = ITEM_RUNNING
                item.worker = str(worker)
                item.attempts = int(item.attempts) + 1
                item.started_at = now
            session.commit()
            return [self._item_snapshot(item) for item in rows]

    def finish(
        self,
        item_id: int,
        *,
        exit_code: int,
        run_report_id: int | None = None,
        error: dict | None = None,
    ) -> ItemSnapshot:
        with self.session_factory() as session:
            item = self._require_running(session, item_id)
            item.status = status_for_exit(exit_code)
            item.exit_code = int(exit_code)
            item.run_report_id = run_report_id
            if error:
                item.error_code = str(error.get("code") or "invalid_input")
                item.error_message = str(error.get("message") or "")
            item.finished_at = datetime.utcnow()
            session.commit()
            session.refresh(item)
            return self._item_snapshot(item)

    def crash(self, item_id: int, *, message: str) -> ItemSnapshot:
        """The command raised instead of reporting; requeue while attempts remain."""
        with self.session_factory() as session:
            item = self._require_running(session, item_id)
            item.error_code = "crashed"
            item.error_message = str(message or "Command crashed.")
            item.worker = None
            if int(item.attempts) < int(item.max_attempts):
                item.status = ITEM_QUEUED
                LOGGER.warning("batch item %d crashed (%d/%d), requeued", item.id, item.attempts, item.max_attempts)
            else:
                item.status = ITEM_CRASHED
                item.finished_at = datetime.utcnow()
                LOGGER.error("batch item %d crashed with no attempts left: %s", item.id, item.error_message)
            session.commit()
            session.refresh(item)
            return self._item_snapshot(item)

    def recover_interrupted(self, batch_id: int | None = None) -> int:
        """Requeue items left running by a batch that never finished."""
        with self.session_factory() as session:
            query = select(BatchItem).where(BatchItem.status == ITEM_RUNNING)
            if batch_id is not None:
                query = query.where(BatchItem.batch_id == int(batch_id))
            rows = list(session.scalars(query).all())
            for item in rows:
                item.status = ITEM_QUEUED
                item.worker = None
                item.error_code = "interrupted"
            session.commit()
        if rows:
            LOGGER.warning("requeued %d interrupted batch items", len(rows))
        return len(rows)

    def items(self, batch_id: int) -> list[ItemSnapshot]:
        with self.session_factory() as session:
            rows = session.scalars(
                select(BatchItem).where(BatchItem.batch_id == int(batch_id)).order_by(BatchItem.id.asc())
            ).all()
            return [self._item_snapshot(item) for item in rows]

    def summary(self, batch_id: int) -> dict[str, int]:
        with self.session_factory() as session:
            rows = session.execute(
                select(BatchItem.status, func.count(BatchItem.id))
                .where(BatchItem.batch_id == int(batch_id))
                .group_by(BatchItem.status)
            ).all()
        result = {status: 0 for status in ITEM_STATUSES}
        for status, count in rows:
            result[str(status)] = int(count)
        return result

    @staticmethod
    def _require_batch(session, batch_id: int) -> BatchRecord:
        batch = session.get(BatchRecord, int(batch_id))
        if batch is None:
            raise KanThurstonError(f"Unknown batch {batch_id}.", code="unknown_batch", details={"batch": batch_id})
        return batch

    @staticmethod
    def _require_running(session, item_id: int) -> BatchItem:
        item = session.get(BatchItem, int(item_id))
        if item is None:
            raise KanThurstonError(f"Unknown batch item {item_id}.", code="unknown_item", details={"item": item_id})
        if item.status != ITEM_RUNNING:
            raise KanThurstonError(
                f"Batch item {item_id} is {item.status}, not running.",
                code="not_running",
                details={"item": item_id, "status": item.status},
            )
        return item

    @staticmethod
    def _batch_snapshot(session, batch: BatchRecord) -> BatchSnapshot:
        count = session.scalar(select(func.count(BatchItem.id)).where(BatchItem.batch_id == batch.id)) or 0
        return BatchSnapshot(
            id=int(batch.id),
            command=str(batch.command),
            input_dir=str(batch.input_dir),
            item_count=int(count),
            created_at=batch.created_at,
            finished_at=batch.finished_at,
        )

    @staticmethod
    def _item_snapshot(item: BatchItem) -> ItemSnapshot:
        return ItemSnapshot(
            id=int(item.id),
            batch_id=int(item.batch_id),
            input_path=str(item.input_path),
            input_digest=str(item.input_digest or ""),
            status=str(item.status),
            attempts=int(item.attempts),
            exit_code=int(item.exit_code) if item.exit_code is not None else None,
            error_code=str(item.error_code) if item.error_code else None,
            error_message=str(item.error_message) if item.error_message else None,
            run_report_id=int(item.run_report_id) if item.run_report_id is not None else None,
        )
