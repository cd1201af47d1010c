# sweep_state.py - resumable per-prime sweep records (JSON lines behind a file lock)
import json
import logging
import os
from pathlib import Path

from filelock import FileLock

logger = logging.getLogger(__name__)


def record_key(p: int, test: str) -> str:
    return f"{test}:{p}"


def _lock_for(path: Path) -> FileLock:
    return FileLock(str(path) + ".lock")


def load_checkpoint(path: str | Path) -> dict[str, dict]:
    """All records in the checkpoint file, keyed by record_key; empty if the file is absent."""
    path = Path(path)
    if not path.exists():
        return {}
    records = {}
    with _lock_for(path):
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    # a torn last line from an interrupted write; it is recomputed
                    logger.warning(f"{path}:{lineno}: skipping unreadable checkpoint line")
                    continue
                records[record_key(rec["p"], rec["test"])] = rec
    return records


def get_state(path: str | Path, p: int, test: str) -> dict | None:
    return load_checkpoint(path).get(record_key(p, test))


def append_checkpoint(path: str | Path, records: list[dict]):
    """Append records sorted by p; each is {p, test, verdict, payload}."""
    if not records:
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _lock_for(path):
        torn = path.exists() and path.stat().st_size > 0 and not path.read_bytes().endswith(b"\n")
        with open(path, "a", encoding="utf-8") as f:
            if torn:
                f.write("\n")
            for rec in sorted(records, key=lambda r: (r["p"], r["test"])):
                f.write(json.dumps(rec, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())
    logger.info(f"checkpoint: {len(records)} record(s) -> {path} (last p = {max(r['p'] for r in records)})")
