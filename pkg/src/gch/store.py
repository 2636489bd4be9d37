"""Content-addressed on-disk cache and run configuration.

Layout: ``<cache>/<version>/<kind>/<sha256 of parameters>.txt|json``.  Every
artifact starts with a human-readable header holding its parameters.  Writes
go through a temp file and an atomic rename under a per-version lock file,
so readers never see partial artifacts.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from filelock import FileLock

# bump whenever basis order, sign conventions or file formats change
VERSION_TAG = "gch-1"
KINDS = ("basis", "matrix", "table", "certificate")


def atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def default_cache_dir() -> Optional[str]:
    return os.environ.get("GCH_CACHE") or None


@dataclass(frozen=True)
class CacheKey:
    kind: str
    params: tuple
    version: str = VERSION_TAG

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown artifact kind {self.kind!r}")

    def describe(self) -> str:
        return json.dumps({"kind": self.kind, "version": self.version,
                           "params": self.params}, sort_keys=True)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.describe().encode()).hexdigest()[:32]


class Store:
    def __init__(self, root, version: str = VERSION_TAG):
        self.root = Path(root)
        self.version = version
        self.lock = FileLock(str(self.root / version / ".lock"))
        (self.root / version).mkdir(parents=True, exist_ok=True)

    def path(self, key: CacheKey, ext: str) -> Path:
        return self.root / self.version / key.kind / f"{key.digest}.{ext}"

    def key(self, kind: str, *params) -> CacheKey:
        return CacheKey(kind, tuple(params), self.version)

    def put_text(self, key: CacheKey, ext: str, text: str) -> Path:
        p = self.path(key, ext)
        with self.lock:
            atomic_write(p, text)
        return p

    def get_text(self, key: CacheKey, ext: str) -> Optional[str]:
        p = self.path(key, ext)
        if not p.exists():
            return None
        return p.read_text(encoding="utf-8")

    # -- typed artifacts --------------------------------------------------

    def basis(self, g):
        from .graphs import generate_basis, read_basis, write_basis

        key = self.key("basis", list(g))
        p = self.path(key, "txt")
        if p.exists():
            return read_basis(p)[1]
        basis = generate_basis(*g)
        with self.lock:
            write_basis(p, g, basis)
        return basis

    def matrix(self, spec, engine):
        from .linalg import read_matrix, write_matrix
        from .operators import assemble_matrix

        key = self.key("matrix", spec.name, list(spec.source))
        p = self.path(key, "txt")
        if p.exists():
            return read_matrix(p)[0]
        M = assemble_matrix(spec, engine.basis(spec.source), engine.basis(spec.target),
                            jobs=engine.jobs)
        with self.lock:
            write_matrix(p, M, spec.name, spec.source, spec.target)
        return M

    def put_json(self, kind: str, params: tuple, payload: str) -> Path:
        key = self.key(kind, *params)
        text = json.dumps({"key": json.loads(key.describe()), "data": json.loads(payload)},
                          sort_keys=True, indent=1) + "\n"
        return self.put_text(key, "json", text)

    def get_json(self, kind: str, params: tuple) -> Optional[str]:
        text = self.get_text(self.key(kind, *params), "json")
        if text is None:
            return None
        return json.dumps(json.loads(text)["data"], sort_keys=True)


@dataclass
class RunConfig:
    cache_dir: Optional[str] = None
    field: str = "p2"
    prime_count: int = 2
    seed: int = 0
    window: Optional[tuple] = None
    output_format: str = "csv"
    jobs: int = 1

    def __post_init__(self):
        if self.field not in ("q", "p2"):
            raise ValueError(f"field must be 'q' or 'p2', not {self.field!r}")
        if self.field == "p2" and self.prime_count < 2:
            raise ValueError("modular field with rational escalation needs at least two primes")
        if self.window is not None and min(self.window) < 0:
            raise ValueError(f"empty window {self.window}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")

    def store(self) -> Optional[Store]:
        return Store(self.cache_dir) if self.cache_dir else None

    def engine(self):
        from .complexes import Engine

        return Engine(field=self.field, seed=self.seed, jobs=self.jobs, store=self.store(),
                      prime_count=self.prime_count)
