"""Flat-file persistence for sessions and the schema library.

One JSON document per session id under ``<root>/sessions``, plus an
optional ``library.json`` at the root that overrides the shipped schema
library. Writes go to a temporary file in the same directory and are
renamed into place, so readers never see a half-written document.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
from importlib import resources
from pathlib import Path

from .codec import (
    document_to_events,
    document_to_library,
    library_to_document,
    session_to_document,
)
from .consultation import Session, replay
from .errors import DomainError
from .schemas import SchemaLibrary

_SESSION_ID = re.compile(r"^[A-Za-z0-9_-]{1,64}$")

DATA_DIR_ENV = "DW_DATA_DIR"
DEFAULT_DATA_DIR = "dw_data"


def resolve_data_dir(explicit: str | None = None) -> Path:
    """--data-dir beats DW_DATA_DIR beats ./dw_data."""
    if explicit:
        return Path(explicit)
    return Path(os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR)


def load_default_library() -> SchemaLibrary:
    text = (
        resources.files("decision_workbench") / "data" / "schema_library.json"
    ).read_text(encoding="utf-8")
    return document_to_library(json.loads(text))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class SessionStore:
    """Session documents and the schema library under one data directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    def _session_path(self, session_id: str) -> Path:
        if not _SESSION_ID.match(session_id):
            raise DomainError("UNKNOWN_SESSION", f"no session '{session_id}'")
        return self.root / "sessions" / f"{session_id}.json"

    def save_session(self, session: Session) -> None:
        document = session_to_document(session)
        self._session_path(session.id)  # reject ids unsafe as file names
        _atomic_write(
            self._session_path(session.id), json.dumps(document, indent=2) + "\n"
        )

    def has_session(self, session_id: str) -> bool:
        try:
            return self._session_path(session_id).exists()
        except DomainError:
            return False

    def load_session(self, session_id: str, library: SchemaLibrary) -> Session:
        path = self._session_path(session_id)
        if not path.exists():
            raise DomainError("UNKNOWN_SESSION", f"no session '{session_id}'")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DomainError(
                "PARSE_ERROR", f"session document '{session_id}' is corrupt: {exc}"
            ) from None
        return replay(document_to_events(document), library)

    def list_ids(self) -> list[str]:
        directory = self.root / "sessions"
        if not directory.is_dir():
            return []
        return sorted(p.stem for p in directory.glob("*.json"))

    def save_library(self, library: SchemaLibrary) -> None:
        _atomic_write(
            self.root / "library.json",
            json.dumps(library_to_document(library), indent=2) + "\n",
        )

    def load_library(self) -> SchemaLibrary:
        """The data directory's library if present, else the shipped one."""
        path = self.root / "library.json"
        if path.exists():
            try:
                return document_to_library(json.loads(path.read_text(encoding="utf-8")))
            except json.JSONDecodeError as exc:
                raise DomainError(
                    "PARSE_ERROR", f"library document is corrupt: {exc}"
                ) from None
        return load_default_library()
