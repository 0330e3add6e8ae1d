from __future__ import annotations

import logging
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .cli import CommandContext, build_parser, execute, render
from .config import AppPaths, effective_settings, resolve_app_paths
from .db import create_session_factory, create_sqlite_engine, init_db
from .errors import KanThurstonError
from .reports import EXIT_INVALID_INPUT, EXIT_OK, RunReport
from .services import BatchService, CorpusService, RunReportService
from .services.batches import BatchSnapshot
from .utils import payload_digest


LOGGER = logging.getLogger(__name__)


@dataclass
class RuntimeBundle:
    paths: AppPaths
    engine: object
    session_factory: object
    run_service: RunReportService
    batch_service: BatchService
    corpus_service: CorpusService


def build_runtime() -> RuntimeBundle:
    paths = resolve_app_paths()
    engine = create_sqlite_engine(paths.db_path)
    init_db(engine)
    session_factory = create_session_factory(engine)
    return RuntimeBundle(
        paths=paths,
        engine=engine,
        session_factory=session_factory,
        run_service=RunReportService(session_factory=session_factory),
        batch_service=BatchService(session_factory=session_factory),
        corpus_service=CorpusService(paths.corpus_dir),
    )


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _history(args, runtime: RuntimeBundle) -> RunReport:
    report = RunReport(command="history", input_digest=payload_digest(["history", args.limit, args.command_filter]))
    runs = runtime.run_service.list_runs(command=args.command_filter, limit=args.limit)
    report.counts["runs"] = len(runs)
    report.results["runs"] = [
        {
            "id": run.id,
            "command": run.command,
            "status": run.status,
            "exit_code": run.exit_code,
            "input_digest": run.input_digest,
            "created_at": run.created_at.isoformat(timespec="seconds"),
        }
        for run in runs
    ]
    return report


def _open_or_resume(args, service: BatchService) -> BatchSnapshot:
    if args.resume is not None:
        batch = service.get_batch(args.resume)
        if batch is None:
            raise KanThurstonError(f"Unknown batch {args.resume}.", code="unknown_batch", details={"batch": args.resume})
        service.recover_interrupted(batch.id)
        return batch
    if args.input_dir is None or not args.run:
        raise KanThurstonError("batch needs --input-dir and --run, or --resume.", code="missing_argument")
    files = sorted(p for p in args.input_dir.glob(args.pattern) if p.is_file())
    return service.open_batch(command=args.run, input_dir=args.input_dir, inputs=files)


def _batch(args, runtime: RuntimeBundle, ctx: CommandContext, workers: int) -> RunReport:
    report = RunReport(command="batch", input_digest="")
    service = runtime.batch_service
    try:
        batch = _open_or_resume(args, service)
    except KanThurstonError as exc:
        report.error = exc.to_dict()
        report.input_digest = payload_digest(["batch", args.run, args.resume])
        return report
    pending = service.items(batch.id)
    report.input_digest = payload_digest(["batch", batch.command, [item.input_digest for item in pending]])
    parser = build_parser()
    argv = shlex.split(batch.command)
    worker = f"batch-{batch.id}"
    exits: dict[str, int] = {}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            claimed = service.claim(batch.id, worker=worker, limit=workers)
            if not claimed:
                break
            futures = []
            for item in claimed:
                item_args = parser.parse_args(argv + ["--input", item.input_path])
                futures.append((item, pool.submit(execute, item_args, ctx)))
            for item, future in futures:
                try:
                    sub_report = future.result()
                except Exception as exc:
                    LOGGER.exception("batch item %s raised", item.name)
                    service.crash(item.id, message=str(exc))
                    continue
                snapshot = None if args.no_history else runtime.run_service.record(sub_report)
                service.finish(
                    item.id,
                    exit_code=sub_report.exit_code,
                    run_report_id=snapshot.id if snapshot else None,
                    error=sub_report.error,
                )
                exits[item.name] = sub_report.exit_code
    service.close_batch(batch.id)
    for item in service.items(batch.id):
        if item.exit_code is None:
            report.add(f"input_{item.name}", False, status=item.status, error=item.error_message)
        else:
            report.add(f"input_{item.name}", item.exit_code == EXIT_OK, exit_code=item.exit_code)
    report.counts["batch"] = batch.id
    report.counts["items"] = service.summary(batch.id)
    report.counts["ran"] = len(exits)
    return report


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = effective_settings()
    if args.seed is not None:
        settings["seed"] = args.seed
    configure_logging(args.log_level or settings["log_level"])

    needs_runtime = args.command in ("history", "batch") or not args.no_history
    runtime = build_runtime() if needs_runtime else None
    ctx = CommandContext(
        settings=settings,
        exports_dir=runtime.paths.exports_dir if runtime else None,
        corpus_dir=runtime.paths.corpus_dir if runtime else None,
    )
    try:
        if args.command == "history":
            report = _history(args, runtime)
        elif args.command == "batch":
            report = _batch(args, runtime, ctx, int(settings["workers"]))
        else:
            report = execute(args, ctx)
            if runtime is not None:
                runtime.run_service.record(report)
        print(render(report, args.format))
        return report.exit_code
    except Exception:
        LOGGER.exception("command %s crashed", args.command)
        return EXIT_INVALID_INPUT
    finally:
        if runtime is not None:
            runtime.engine.dispose()


if __name__ == "__main__":
    raise SystemExit(main())
