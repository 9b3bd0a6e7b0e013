"""HTTP service exposing consultations, analyses, and diagram documents.

Built on the standard library's threading HTTP server: the service is a
desk-scale, single-process tool and needs no framework. All request and
response bodies are JSON in the interchange format. Errors carry a stable
machine-readable code; WRONG_PHASE maps to 409, unknown ids to 404, and
every other domain error to 400.

Session operations are serialized per session id (one writer at a time),
and every event-appending operation persists the session document before
responding.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import codec
from .consultation import (
    Session,
    commit,
    provide_bindings,
    report,
    start_session,
    whatif,
)
from .errors import DomainError
from .sensitivity import evpi, sweep
from .store import SessionStore

_STATUS_BY_CODE = {"WRONG_PHASE": 409, "UNKNOWN_SESSION": 404}


class ServiceState:
    """Store-backed session registry shared by all request threads."""

    def __init__(self, data_dir: Path | str):
        self.store = SessionStore(data_dir)
        self.library = self.store.load_library()
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def session_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def get_session(self, session_id: str) -> Session:
        with self._registry_lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
        session = self.store.load_session(session_id, self.library)
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def add_session(self, session: Session) -> None:
        with self._registry_lock:
            self._sessions[session.id] = session
        self.store.save_session(session)

    def persist(self, session: Session) -> None:
        self.store.save_session(session)

    def list_ids(self) -> list[str]:
        with self._registry_lock:
            in_memory = set(self._sessions)
        return sorted(in_memory | set(self.store.list_ids()))

    # -- endpoint bodies ------------------------------------------------------

    def create_session(self, body: dict) -> dict:
        features = body.get("features")
        if not isinstance(features, dict):
            raise DomainError("PARSE_ERROR", "request body must contain a 'features' object")
        session = start_session({str(k): bool(v) for k, v in features.items()}, self.library)
        self.add_session(session)
        return codec.session_summary(session)

    def list_sessions(self) -> dict:
        summaries = []
        for session_id in self.list_ids():
            with self.session_lock(session_id):
                summaries.append(codec.session_summary(self.get_session(session_id)))
        return {"sessions": summaries}

    def show_session(self, session_id: str) -> dict:
        with self.session_lock(session_id):
            return codec.session_summary(self.get_session(session_id))

    def post_bindings(self, session_id: str, body: dict) -> dict:
        bindings = body.get("bindings")
        if not isinstance(bindings, dict):
            raise DomainError("PARSE_ERROR", "request body must contain a 'bindings' object")
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            try:
                provide_bindings(session, bindings, self.library)
            finally:
                self.persist(session)  # rejections append an event too
            return {
                "session": codec.session_summary(session),
                "report": codec.report_to_document(report(session)),
            }

    def post_whatif(self, session_id: str, body: dict) -> dict:
        ref = codec.document_to_param_ref(body.get("param"))
        value = _number(body, "value")
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            result = whatif(session, ref, value)
            self.persist(session)
            return codec.whatif_to_document(session.diagram, result)

    def post_commit(self, session_id: str, body: dict) -> dict:
        ref = codec.document_to_param_ref(body.get("param"))
        value = _number(body, "value")
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            commit(session, ref, value)
            self.persist(session)
            return {
                "session": codec.session_summary(session),
                "report": codec.report_to_document(report(session)),
            }

    def get_report(self, session_id: str) -> dict:
        with self.session_lock(session_id):
            return codec.report_to_document(report(self.get_session(session_id)))

    def post_sweep(self, session_id: str, body: dict) -> dict:
        ref = codec.document_to_param_ref(body.get("param"))
        grid = body.get("grid")
        if not isinstance(grid, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in grid
        ):
            raise DomainError("PARSE_ERROR", "'grid' must be a list of numbers")
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            session.require_phase("REFINE")
            result = sweep(session.diagram, ref, [float(v) for v in grid])
            return codec.sweep_to_document(result)

    def post_evpi(self, session_id: str, body: dict) -> dict:
        chance = body.get("chance")
        decision = body.get("decision")
        if not isinstance(chance, str) or not isinstance(decision, str):
            raise DomainError(
                "PARSE_ERROR", "request body must contain 'chance' and 'decision' names"
            )
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            session.require_phase("REFINE")
            value = evpi(session.diagram, chance, decision)
            return {"chance": chance, "decision": decision, "evpi": value}

    def get_schemas(self) -> dict:
        return codec.library_summary(self.library)

    def get_diagram(self, session_id: str) -> dict:
        with self.session_lock(session_id):
            session = self.get_session(session_id)
            if session.diagram is None:
                raise DomainError(
                    "WRONG_PHASE",
                    "the session has no assessed diagram yet",
                    phase=session.phase,
                )
            return codec.diagram_to_document(session.diagram)


def _number(body: dict, name: str) -> float:
    value = body.get(name)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DomainError("PARSE_ERROR", f"'{name}' must be a number")
    return float(value)


_ROUTES: list[tuple[str, re.Pattern, str]] = [
    ("POST", re.compile(r"^/sessions$"), "create_session"),
    ("GET", re.compile(r"^/sessions$"), "list_sessions"),
    ("GET", re.compile(r"^/sessions/([^/]+)$"), "show_session"),
    ("POST", re.compile(r"^/sessions/([^/]+)/bindings$"), "post_bindings"),
    ("POST", re.compile(r"^/sessions/([^/]+)/whatif$"), "post_whatif"),
    ("POST", re.compile(r"^/sessions/([^/]+)/commit$"), "post_commit"),
    ("GET", re.compile(r"^/sessions/([^/]+)/report$"), "get_report"),
    ("POST", re.compile(r"^/sessions/([^/]+)/sweep$"), "post_sweep"),
    ("POST", re.compile(r"^/sessions/([^/]+)/evpi$"), "post_evpi"),
    ("GET", re.compile(r"^/schemas$"), "get_schemas"),
    ("GET", re.compile(r"^/diagrams/([^/]+)$"), "get_diagram"),
]


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "decision-workbench/0.1"
    state: ServiceState  # assigned by make_server
    quiet = True

    def log_message(self, fmt: str, *args) -> None:
        if not self.quiet:
            super().log_message(fmt, *args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._send_cors()
        self.end_headers()
        self.wfile.write(body)

    def _send_cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DomainError("PARSE_ERROR", f"request body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise DomainError("PARSE_ERROR", "request body must be a JSON object")
        return body

    def _dispatch(self, method: str) -> None:
        path = self.path.split("?", 1)[0]
        try:
            for route_method, pattern, handler_name in _ROUTES:
                if route_method != method:
                    continue
                match = pattern.match(path)
                if not match:
                    continue
                handler = getattr(self.state, handler_name)
                if method == "POST":
                    payload = handler(*match.groups(), self._read_body()) if match.groups() \
                        else handler(self._read_body())
                else:
                    payload = handler(*match.groups())
                self._send_json(200, payload)
                return
            self._send_json(
                404, {"error": {"code": "NOT_FOUND", "message": f"no route for {method} {path}"}}
            )
        except DomainError as err:
            status = _STATUS_BY_CODE.get(err.code, 400)
            self._send_json(status, {"error": err.to_dict()})
        except Exception as err:  # noqa: BLE001 - last-resort server error
            self._send_json(
                500, {"error": {"code": "INTERNAL", "message": f"{type(err).__name__}: {err}"}}
            )

    def do_GET(self) -> None:  # noqa: N802 - http.server API
        self._dispatch("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._dispatch("POST")

    def do_OPTIONS(self) -> None:  # noqa: N802
        self.send_response(204)
        self._send_cors()
        self.end_headers()


def make_server(port: int, data_dir: Path | str, quiet: bool = True) -> ThreadingHTTPServer:
    state = ServiceState(data_dir)
    handler = type("BoundApiHandler", (ApiHandler,), {"state": state, "quiet": quiet})
    server = ThreadingHTTPServer(("127.0.0.1", port), handler)
    server.daemon_threads = True
    return server


def serve(port: int, data_dir: Path | str, quiet: bool = False) -> None:
    server = make_server(port, data_dir, quiet=quiet)
    host, actual_port = server.server_address[:2]
    print(f"serving on http://{host}:{actual_port} (data dir: {data_dir})", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
