"""Content-hash keyed on-disk store for datasets and run records.

Each object is one JSON file named by its id; datasets embed the raw upload
bytes (base64) so runs can re-ingest with run-specific attribute selections
after a restart.
"""

from __future__ import annotations

import base64
import hashlib
import json
from pathlib import Path


def content_hash(*parts: bytes) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(hashlib.sha256(part).digest())
    return digest.hexdigest()[:16]


class Store:
    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, object_id: str) -> Path:
        return self.root / f"{kind}-{object_id}.json"

    def put(self, kind: str, object_id: str, doc: dict) -> None:
        path = self._path(kind, object_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
        tmp.replace(path)

    def get(self, kind: str, object_id: str) -> dict | None:
        path = self._path(kind, object_id)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def ids(self, kind: str) -> list[str]:
        prefix = f"{kind}-"
        return sorted(
            p.stem[len(prefix):] for p in self.root.glob(f"{kind}-*.json")
        )

    @staticmethod
    def encode_bytes(data: bytes) -> str:
        return base64.b64encode(data).decode("ascii")

    @staticmethod
    def decode_bytes(text: str) -> bytes:
        return base64.b64decode(text.encode("ascii"))
