import tempfile
import unittest
from pathlib import Path

from kanthurston.db import create_session_factory, create_sqlite_engine, init_db
from kanthurston.errors import KanThurstonError
from kanthurston.reports import EXIT_CHECK_FAILED, EXIT_INVALID_INPUT, EXIT_OK, RunReport
from kanthurston.services import BatchService, RunReportService
from kanthurston.services.batches import (
    ITEM_CRASHED,
    ITEM_FAILED,
    ITEM_INVALID,
    ITEM_PASSED,
    ITEM_QUEUED,
    ITEM_RUNNING,
)
from kanthurston.utils import sha256_file


class BatchServiceTests(unittest.TestCase):
    def setUp(self):
        self._td = tempfile.TemporaryDirectory()
        self.root = Path(self._td.name)
        self.engine = create_sqlite_engine(self.root / "db.sqlite")
        init_db(self.engine)
        self.session_factory = create_session_factory(self.engine)
        self.service = BatchService(self.session_factory, max_attempts=2)
        self.inputs = []
        for name in ("a.json", "b.json", "c.json"):
            path = self.root / name
            path.write_text('{"name": "%s"}' % name, encoding="utf-8")
            self.inputs.append(path)

    def tearDown(self):
        self.engine.dispose()
        self._td.cleanup()

    def _open(self):
        return self.service.open_batch(command="check category", input_dir=self.root, inputs=self.inputs)

    def test_open_records_every_input(self):
        batch = self._open()
        self.assertEqual(batch.item_count, 3)
        self.assertIsNone(batch.finished_at)
        items = self.service.items(batch.id)
        self.assertEqual([i.name for i in items], ["a.json", "b.json", "c.json"])
        self.assertEqual(items[0].input_digest, sha256_file(self.inputs[0]))
        self.assertEqual(self.service.summary(batch.id)[ITEM_QUEUED], 3)
        with self.assertRaises(KanThurstonError) as ctx:
            self.service.open_batch(command="  ", input_dir=self.root, inputs=[])
        self.assertEqual(ctx.exception.code, "empty_command")

    def test_claim_takes_oldest_first(self):
        batch = self._open()
        first = self.service.claim(batch.id, worker="w", limit=2)
        self.assertEqual([i.name for i in first], ["a.json", "b.json"])
        self.assertTrue(all(i.status == ITEM_RUNNING and i.attempts == 1 for i in first))
        rest = self.service.claim(batch.id, worker="w", limit=2)
        self.assertEqual([i.name for i in rest], ["c.json"])
        self.assertEqual(self.service.claim(batch.id, worker="w"), [])

    def test_exit_codes_map_to_statuses(self):
        batch = self._open()
        a, b, c = self.service.claim(batch.id, worker="w", limit=3)
        report = RunReport(command="check category", input_digest="abc")
        run = RunReportService(self.session_factory).record(report)
        self.assertEqual(self.service.finish(a.id, exit_code=EXIT_OK, run_report_id=run.id).status, ITEM_PASSED)
        self.assertEqual(self.service.finish(b.id, exit_code=EXIT_CHECK_FAILED).status, ITEM_FAILED)
        invalid = self.service.finish(
            c.id, exit_code=EXIT_INVALID_INPUT, error={"code": "missing_file", "message": "gone"}
        )
        self.assertEqual(invalid.status, ITEM_INVALID)
        self.assertEqual(invalid.error_code, "missing_file")
        self.assertEqual(self.service.items(batch.id)[0].run_report_id, run.id)
        summary = self.service.summary(batch.id)
        self.assertEqual((summary[ITEM_PASSED], summary[ITEM_FAILED], summary[ITEM_INVALID]), (1, 1, 1))
        with self.assertRaises(KanThurstonError) as ctx:
            self.service.finish(a.id, exit_code=EXIT_OK)
        self.assertEqual(ctx.exception.code, "not_running")
        self.assertIsNotNone(self.service.close_batch(batch.id).finished_at)

    def test_crash_requeues_until_attempts_run_out(self):
        batch = self.service.open_batch(command="kt verify", input_dir=self.root, inputs=self.inputs[:1])
        (item,) = self.service.claim(batch.id, worker="w")
        again = self.service.crash(item.id, message="boom")
        self.assertEqual(again.status, ITEM_QUEUED)
        self.assertEqual(again.error_code, "crashed")
        (item,) = self.service.claim(batch.id, worker="w")
        self.assertEqual(item.attempts, 2)
        final = self.service.crash(item.id, message="boom")
        self.assertEqual(final.status, ITEM_CRASHED)
        self.assertEqual(self.service.claim(batch.id, worker="w"), [])

    def test_recover_interrupted_items(self):
        batch = self._open()
        other = self._open()
        self.service.claim(batch.id, worker="w", limit=2)
        self.service.claim(other.id, worker="w", limit=1)
        self.assertEqual(self.service.recover_interrupted(batch.id), 2)
        self.assertEqual(self.service.summary(batch.id)[ITEM_QUEUED], 3)
        self.assertEqual(self.service.summary(other.id)[ITEM_RUNNING], 1)
        self.assertEqual(self.service.recover_interrupted(), 1)
        self.assertIsNone(self.service.get_batch(999))


if __name__ == "__main__":
    unittest.main()
