from __future__ import annotations

from pathlib import Path

from sqlalchemy import create_engine, event
from sqlalchemy.orm import DeclarativeBase, sessionmaker


class Base(DeclarativeBase):
    pass


def create_sqlite_engine(db_path: Path):
    engine = create_engine(f"sqlite:///{db_path}", future=True)

    @event.listens_for(engine, "connect")
    def _enable_foreign_keys(dbapi_connection, _record):
        cursor = dbapi_connection.cursor()
        cursor.execute("PRAGMA foreign_keys=ON")
        cursor.close()

    return engine


def create_session_factory(engine):
    return sessionmaker(bind=engine, autoflush=False, expire_on_commit=False, future=True)


def init_db(engine) -> None:
    from . import models  # noqa: F401

    Base.metadata.create_all(engine)
    with engine.begin() as conn:
        # Databases written before reports carried the kit and per-stage timings.
        _add_missing_column(conn, "run_reports", "kit", "VARCHAR(16)")
        _add_missing_column(conn, "run_reports", "timings_json", "TEXT NOT NULL DEFAULT '{}'")
        _add_missing_column(conn, "batch_items", "input_digest", "VARCHAR(64) NOT NULL DEFAULT ''")
        conn.exec_driver_sql(
            """
            UPDATE run_reports
               SET status = CASE exit_code WHEN 0 THEN 'passed' WHEN 1 THEN 'failed' ELSE 'invalid' END
             WHERE status IS NULL OR TRIM(status) = ''
            """
        )


def _add_missing_column(conn, table: str, column: str, ddl: str) -> None:
    present = {row[1] for row in conn.exec_driver_sql(f"PRAGMA table_info({table})").fetchall()}
    if column not in present:
        conn.exec_driver_sql(f"ALTER TABLE {table} ADD COLUMN {column} {ddl}")
