from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime

from sqlalchemy import select

from ..models import RunReportRecord
from ..reports import RunReport


@dataclass(frozen=True)
class RunSnapshot:
    id: int
    command: str
    input_digest: str
    kit: str | None
    status: str
    exit_code: int
    checks: list
    counts: dict
    timings: dict
    report_digest: str
    created_at: datetime


class RunReportService:
    def __init__(self, session_factory):
        self.session_factory = session_factory

    def record(self, report: RunReport) -> RunSnapshot:
        with self.session_factory() as session:
            model = RunReportRecord(
                command=report.command,
                input_digest=report.input_digest,
                kit=report.kit,
                status=report.status,
                exit_code=report.exit_code,
                checks_json=json.dumps([c.to_dict() for c in report.checks], ensure_ascii=True),
                counts_json=json.dumps(report.counts, ensure_ascii=True),
                timings_json=json.dumps(report.timings, ensure_ascii=True),
                report_digest=report.digest(),
                created_at=datetime.utcnow(),
            )
            session.add(model)
            session.commit()
            session.refresh(model)
            return self._to_snapshot(model)

    def list_runs(self, *, command: str | None = None, limit: int = 50) -> list[RunSnapshot]:
        with self.session_factory() as session:
            query = select(RunReportRecord).order_by(RunReportRecord.created_at.desc(), RunReportRecord.id.desc())
            if command:
                query = query.where(RunReportRecord.command == str(command))
            models = list(session.scalars(query.limit(max(1, int(limit)))).all())
            return [self._to_snapshot(model) for model in models]

    def get_run(self, run_id: int) -> RunSnapshot | None:
        with self.session_factory() as session:
            model = session.get(RunReportRecord, int(run_id))
            return self._to_snapshot(model) if model is not None else None

    def latest_for_digest(self, input_digest: str, command: str | None = None) -> RunSnapshot | None:
        with self.session_factory() as session:
            query = select(RunReportRecord).where(RunReportRecord.input_digest == str(input_digest))
            if command:
                query = query.where(RunReportRecord.command == str(command))
            model = session.scalar(query.order_by(RunReportRecord.created_at.desc(), RunReportRecord.id.desc()))
            return self._to_snapshot(model) if model is not None else None

    @staticmethod
    def _decode(text: str | None, fallback):
        try:
            value = json.loads(text or "")
        except Exception:
            return fallback
        return value if isinstance(value, type(fallback)) else fallback

    @classmethod
    def _to_snapshot(cls, model: RunReportRecord) -> RunSnapshot:
        return RunSnapshot(
            id=int(model.id),
            command=str(model.command),
            input_digest=str(model.input_digest),
            kit=str(model.kit) if model.kit else None,
            status=str(model.status),
            exit_code=int(model.exit_code),
            checks=cls._decode(model.checks_json, []),
            counts=cls._decode(model.counts_json, {}),
            timings=cls._decode(model.timings_json, {}),
            report_digest=str(model.report_digest),
            created_at=model.created_at,
        )
