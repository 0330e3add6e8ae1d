from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path


APP_NAME = "KanThurston"
DEFAULT_KIT = "mock"
KIT_NAMES = ("mock", "cube", "genuine")
DEFAULT_SEED = 20240101
DEFAULT_PETAL_LENGTH = 4
DEFAULT_LOG_LEVEL = "WARNING"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
WORKERS_ENV = "KANTHURSTON_WORKERS"
LOG_LEVEL_ENV = "KANTHURSTON_LOG_LEVEL"


@dataclass(frozen=True)
class AppPaths:
    data_dir: Path
    db_path: Path
    corpus_dir: Path
    exports_dir: Path


def get_default_system_data_root() -> Path:
    if sys.platform.startswith("win"):
        appdata = os.getenv("APPDATA")
        if appdata:
            return Path(appdata)
        return Path.home() / "AppData" / "Roaming"
    if sys.platform == "darwin":
        return Path.home() / "Library" / "Application Support"
    xdg = os.getenv("XDG_DATA_HOME")
    if xdg:
        return Path(xdg)
    return Path.home() / ".local" / "share"


def settings_file_path() -> Path:
    return get_default_system_data_root() / APP_NAME / "settings.json"


def compute_app_data_dir_from_root(storage_root: str | Path) -> Path:
    root = Path(storage_root).expanduser().resolve()
    if root.name.lower() == APP_NAME.lower():
        return root
    return root / APP_NAME


def normalize_kit(value) -> str:
    raw = str(value or "").strip().lower()
    return raw if raw in KIT_NAMES else DEFAULT_KIT


def normalize_seed(value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        return DEFAULT_SEED


def normalize_workers(value) -> int:
    try:
        workers = int(value)
    except (TypeError, ValueError):
        return default_workers()
    return max(1, workers)


def normalize_petal_length(value) -> int:
    try:
        length = int(value)
    except (TypeError, ValueError):
        return DEFAULT_PETAL_LENGTH
    if length < 2 or length % 2:
        return DEFAULT_PETAL_LENGTH
    return length


def normalize_log_level(value) -> str:
    raw = str(value or "").strip().upper()
    if raw in LOG_LEVELS:
        return raw
    return DEFAULT_LOG_LEVEL


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


def _default_settings() -> dict:
    return {
        "active_data_dir": str(get_default_system_data_root() / APP_NAME),
        "default_kit": DEFAULT_KIT,
        "seed": DEFAULT_SEED,
        "workers": default_workers(),
        "petal_length": DEFAULT_PETAL_LENGTH,
        "log_level": DEFAULT_LOG_LEVEL,
    }


def _normalized(merged: dict) -> dict:
    return {
        **merged,
        "active_data_dir": str(Path(str(merged["active_data_dir"])).expanduser()),
        "default_kit": normalize_kit(merged.get("default_kit")),
        "seed": normalize_seed(merged.get("seed")),
        "workers": normalize_workers(merged.get("workers")),
        "petal_length": normalize_petal_length(merged.get("petal_length")),
        "log_level": normalize_log_level(merged.get("log_level")),
    }


def load_settings() -> dict:
    path = settings_file_path()
    defaults = _default_settings()
    if not path.exists():
        return defaults

    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except Exception:
        return defaults

    if not isinstance(payload, dict):
        return defaults

    merged = {**defaults, **payload}
    normalized = _normalized(merged)
    if normalized != merged:
        save_settings(normalized)
    return normalized


def save_settings(settings: dict) -> None:
    path = settings_file_path()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(settings, ensure_ascii=True, indent=2), encoding="utf-8")


def effective_settings(settings: dict | None = None) -> dict:
    """Settings with environment overrides applied; the file is left untouched."""
    out = dict(settings if settings is not None else load_settings())
    workers = os.getenv(WORKERS_ENV)
    if workers:
        out["workers"] = normalize_workers(workers)
    level = os.getenv(LOG_LEVEL_ENV)
    if level:
        out["log_level"] = normalize_log_level(level)
    return out


def resolve_app_paths() -> AppPaths:
    settings = load_settings()
    data_dir = compute_app_data_dir_from_root(settings["active_data_dir"])
    save_settings({**settings, "active_data_dir": str(data_dir)})

    corpus_dir = data_dir / "corpus"
    exports_dir = data_dir / "exports"
    db_path = data_dir / "kanthurston.db"

    data_dir.mkdir(parents=True, exist_ok=True)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    exports_dir.mkdir(parents=True, exist_ok=True)
    return AppPaths(
        data_dir=data_dir,
        db_path=db_path,
        corpus_dir=corpus_dir,
        exports_dir=exports_dir,
    )
