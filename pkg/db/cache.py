import hashlib
import io
import json
import logging
import os
import sqlite3
import threading
import zipfile
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from brnr import cohomology, groups
from brnr.base import CacheCorrupt
from brnr.config import settings

logger = logging.getLogger(__name__)

SCHEMA = """
CREATE TABLE IF NOT EXISTS entries (
    key TEXT PRIMARY KEY,
    kind TEXT NOT NULL,
    digest TEXT NOT NULL,
    created_at TEXT NOT NULL
)
"""


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class CacheStore:
    """Cohomology groups and subgroup lattices on disk, keyed by content hash.

    Each entry is one ``.npz`` file written to a temporary name and renamed
    into place; an sqlite index records its digest.
    """

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root or settings.cache_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.db_path = self.root / "index.db"
        self.hits = 0
        self.misses = 0
        self._init_db()

    @contextmanager
    def get_db(self):
        """Context manager for index connections"""
        db = None
        try:
            db = sqlite3.connect(self.db_path, timeout=30)
            db.row_factory = sqlite3.Row
            yield db
        except sqlite3.Error as e:
            logger.error(f"Cache index error: {e}")
            raise
        finally:
            if db:
                db.close()

    def _init_db(self):
        with self.get_db() as db:
            db.execute(SCHEMA)
            db.commit()

    def _path(self, kind: str, key: str) -> Path:
        return self.root / kind / f"{key}.npz"

    def _write(self, kind: str, key: str, arrays: dict[str, np.ndarray], meta: dict):
        path = self._path(kind, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        encoded = json.dumps(meta, sort_keys=True, default=int).encode()
        buffer = io.BytesIO()
        np.savez(buffer, __meta__=np.frombuffer(encoded, dtype=np.uint8), **arrays)
        data = buffer.getvalue()
        tmp = path.with_name(f"{path.name}.{os.getpid()}.{threading.get_ident()}.tmp")
        tmp.write_bytes(data)
        os.replace(tmp, path)
        with self.get_db() as db:
            db.execute(
                "INSERT OR REPLACE INTO entries (key, kind, digest, created_at) VALUES (?, ?, ?, ?)",
                (key, kind, _digest(data), datetime.now(timezone.utc).isoformat()),
            )
            db.commit()
        logger.debug(f"Cached {kind}/{key[:12]}")

    def _discard(self, kind: str, key: str):
        self._path(kind, key).unlink(missing_ok=True)
        with self.get_db() as db:
            db.execute("DELETE FROM entries WHERE key = ?", (key,))
            db.commit()

    def _read(self, kind: str, key: str) -> tuple[dict[str, np.ndarray], dict] | None:
        path = self._path(kind, key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            data = path.read_bytes()
            with self.get_db() as db:
                row = db.execute("SELECT digest FROM entries WHERE key = ?", (key,)).fetchone()
            if row is not None and row["digest"] != _digest(data):
                raise CacheCorrupt("digest mismatch", key=key[:12])
            with np.load(io.BytesIO(data), allow_pickle=False) as npz:
                arrays = {name: npz[name] for name in npz.files}
            meta = json.loads(arrays.pop("__meta__").tobytes().decode())
        except (CacheCorrupt, OSError, ValueError, KeyError, zipfile.BadZipFile) as e:
            logger.warning(f"Discarding corrupt cache entry {kind}/{path.name}: {e}")
            self._discard(kind, key)
            self.misses += 1
            return None
        self.hits += 1
        return arrays, meta

    @staticmethod
    def cohomology_key(key: tuple[str, str, int]) -> str:
        group_hash, module_hash, degree = key
        return _digest(f"{group_hash}:{module_hash}:{degree}".encode())

    def load_cohomology(self, key: tuple[str, str, int]):
        return self._read("cohomology", self.cohomology_key(key))

    def save_cohomology(self, key: tuple[str, str, int], arrays: dict[str, np.ndarray], meta: dict):
        self._write("cohomology", self.cohomology_key(key), arrays, meta)

    def load_subgroups(self, group_hash: str) -> list[tuple[int, ...]] | None:
        loaded = self._read("subgroups", group_hash)
        if loaded is None:
            return None
        arrays, _ = loaded
        members, offsets = arrays["members"], arrays["offsets"]
        return [tuple(int(x) for x in members[a:b]) for a, b in zip(offsets[:-1], offsets[1:])]

    def save_subgroups(self, group_hash: str, lattice: list[tuple[int, ...]]):
        offsets = np.cumsum([0] + [len(m) for m in lattice]).astype(np.int64)
        members = np.fromiter((x for m in lattice for x in m), dtype=np.int64, count=int(offsets[-1]))
        self._write("subgroups", group_hash, {"members": members, "offsets": offsets}, {"count": len(lattice)})

    def stats(self) -> dict:
        with self.get_db() as db:
            rows = db.execute("SELECT kind, COUNT(*) AS n FROM entries GROUP BY kind ORDER BY kind").fetchall()
        return {row["kind"]: row["n"] for row in rows}

    def clear(self) -> int:
        """Removes every entry and returns how many there were"""
        removed = 0
        for path in self.root.glob("*/*.npz"):
            path.unlink(missing_ok=True)
            removed += 1
        with self.get_db() as db:
            db.execute("DELETE FROM entries")
            db.commit()
        logger.info(f"Cleared {removed} cache entries from {self.root}")
        return removed


def open_cache(root: str | Path | None = None) -> CacheStore:
    """Opens the store and routes cohomology and subgroup lattices through it."""
    store = CacheStore(root)
    cohomology.attach_store(store)
    groups.attach_lattice_store(store)
    return store


def close_cache():
    cohomology.attach_store(None)
    groups.attach_lattice_store(None)
    cohomology.clear_cache()
