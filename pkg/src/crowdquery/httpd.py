"""Live HTTP gateway backing the browser worker UI.

Wire protocol (JSON over HTTP, UTF-8):

    GET  /tasks/next   -> {"task_id": ..., "questions": [{"question_id",
                           "existence_text", "value_text"}, ...]} or 204
    POST /judgments    <- {"question_id", "verdict": "yes"|"no"|"not_sure",
                           "value"?, "confidence"?, "familiarity": 1..7}
    GET  /status       -> {"pending": n, "collecting": n, "resolved": n}

Judgments accumulate per question; when the quota is reached the gateway
aggregates them into an answer and, once every question of a task is
resolved, collect() unblocks for that task. Confidence is a server-side
policy (default 1.0 for interactive workers); clients may omit it.

The handler runs in a threading HTTP server, so queue and quota state is
guarded by one lock; collect() waits on the matching condition.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .microtask import (VERDICTS, YES, AggregatedAnswer, AggregationError,
                        Judgment, Microtask, Question, aggregate_judgments)

DEFAULT_TIMEOUT = 600.0

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>Crowd tasks</title></head>
<body><h1>Crowd task gateway</h1>
<p>This endpoint serves the worker API: <code>GET /tasks/next</code>,
<code>POST /judgments</code>, <code>GET /status</code>.</p>
<p>Build the worker UI (see <code>frontend/</code>) and pass its output
directory via <code>--ui-dir</code> to serve it here.</p></body></html>
"""


class HttpGateway:
    """Task queue + judgment collection behind a small threaded HTTP server."""

    def __init__(self, host: str = "127.0.0.1", port: int = 8080, quota: int = 3,
                 confidence_policy: float = 1.0, ui_dir: str | Path | None = None):
        self.host = host
        self.port = port
        self.quota = quota
        self.confidence_policy = confidence_policy
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.timed_out = False
        self._lock = threading.Lock()
        self._resolved_cond = threading.Condition(self._lock)
        self._tasks: dict[str, Microtask] = {}
        self._questions: dict[str, Question] = {}
        self._judgments: dict[str, list[Judgment]] = {}
        self._answers: dict[str, AggregatedAnswer] = {}
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        gateway = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # keep test output quiet
                pass

            def _send_json(self, code: int, payload) -> None:
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/tasks/next":
                    payload = gateway._next_task_payload()
                    if payload is None:
                        self.send_response(204)
                        self.end_headers()
                        return
                    self._send_json(200, payload)
                elif self.path == "/status":
                    self._send_json(200, gateway._status())
                elif self.path == "/" or self.path.startswith("/static/") \
                        or self.path.endswith((".js", ".css", ".html")):
                    gateway._serve_page(self)
                else:
                    self._send_json(404, {"error": "unknown path"})

            def do_POST(self):
                if self.path != "/judgments":
                    self._send_json(404, {"error": "unknown path"})
                    return
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length)
                try:
                    payload = json.loads(raw.decode("utf-8"))
                except (ValueError, UnicodeDecodeError):
                    self._send_json(400, {"error": "body is not valid JSON"})
                    return
                code, response = gateway._accept_judgment(payload)
                self._send_json(code, response)

        self._server = ThreadingHTTPServer((self.host, self.port), Handler)
        self.port = self._server.server_address[1]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._server is not None:
            self._server.shutdown()
            self._server.server_close()
            self._server = None

    @property
    def base_url(self) -> str:
        return f"http://{self.host}:{self.port}"

    # -- gateway interface ---------------------------------------------------

    def submit(self, tasks: list[Microtask]) -> list[str]:
        with self._lock:
            for task in tasks:
                self._tasks[task.id] = task
                for question in task.questions:
                    self._questions[question.id] = question
                    self._judgments.setdefault(question.id, [])
        return [t.id for t in tasks]

    def collect(self, ids, timeout: float | None = None):
        deadline = time.monotonic() + (timeout if timeout is not None else DEFAULT_TIMEOUT)
        wanted: list[str] = []
        with self._lock:
            for task_id in ids:
                task = self._tasks.get(task_id)
                if task:
                    wanted.extend(q.id for q in task.questions)
            while any(qid not in self._answers for qid in wanted):
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    self.timed_out = True
                    break
                self._resolved_cond.wait(remaining)
            return [(self._questions[qid], self._answers[qid])
                    for qid in wanted if qid in self._answers]

    # -- request handling ------------------------------------------------------

    def _next_task_payload(self):
        with self._lock:
            for task in self._tasks.values():
                if any(q.id not in self._answers for q in task.questions):
                    return {
                        "task_id": task.id,
                        "questions": [
                            {"question_id": q.id,
                             "existence_text": q.existence_text,
                             "value_text": q.value_text}
                            for q in task.questions if q.id not in self._answers
                        ],
                    }
        return None

    def _status(self):
        with self._lock:
            pending = collecting = resolved = 0
            for task in self._tasks.values():
                answered = sum(1 for q in task.questions if q.id in self._answers)
                judged = sum(len(self._judgments[q.id]) for q in task.questions)
                if answered == len(task.questions):
                    resolved += 1
                elif judged > 0:
                    collecting += 1
                else:
                    pending += 1
            return {"pending": pending, "collecting": collecting, "resolved": resolved}

    def _accept_judgment(self, payload) -> tuple[int, dict]:
        if not isinstance(payload, dict):
            return 400, {"error": "expected a JSON object"}
        qid = payload.get("question_id")
        verdict = payload.get("verdict")
        if not isinstance(qid, str):
            return 400, {"error": "question_id is required"}
        if verdict not in VERDICTS:
            return 400, {"error": f"verdict must be one of {', '.join(VERDICTS)}"}
        value = payload.get("value")
        if verdict == YES and not (isinstance(value, str) and value.strip()):
            return 400, {"error": "a yes judgment needs a non-empty value"}
        familiarity = payload.get("familiarity")
        if not isinstance(familiarity, int) or not 1 <= familiarity <= 7:
            return 400, {"error": "familiarity must be an integer from 1 to 7"}
        confidence = payload.get("confidence", self.confidence_policy)
        if not isinstance(confidence, (int, float)) or not 0.0 <= confidence <= 1.0:
            return 400, {"error": "confidence must be a number in [0, 1]"}

        with self._lock:
            if qid not in self._questions:
                return 404, {"error": f"unknown question {qid}"}
            if qid in self._answers:
                return 409, {"error": "question already resolved"}
            self._judgments[qid].append(Judgment(
                question_id=qid, verdict=verdict,
                value=value if verdict == YES else None,
                confidence=float(confidence), familiarity=familiarity))
            resolved = False
            if len(self._judgments[qid]) >= self.quota:
                try:
                    self._answers[qid] = aggregate_judgments(
                        self._judgments[qid], quota=self.quota)
                    resolved = True
                    self._resolved_cond.notify_all()
                except AggregationError:
                    # verdict tie: keep the question open for more judgments
                    pass
            return 200, {"status": "accepted", "resolved": resolved}

    def _serve_page(self, handler: BaseHTTPRequestHandler) -> None:
        path = handler.path
        if self.ui_dir is not None:
            rel = "index.html" if path == "/" else path.lstrip("/")
            root = self.ui_dir.resolve()
            target = (root / rel).resolve()
            if target.is_file() and (root == target.parent or root in target.parents):
                content_type = {
                    ".html": "text/html", ".js": "text/javascript", ".css": "text/css",
                }.get(target.suffix, "application/octet-stream")
                body = target.read_bytes()
                handler.send_response(200)
                handler.send_header("Content-Type", f"{content_type}; charset=utf-8")
                handler.send_header("Content-Length", str(len(body)))
                handler.end_headers()
                handler.wfile.write(body)
                return
        body = _FALLBACK_PAGE.encode("utf-8")
        handler.send_response(200)
        handler.send_header("Content-Type", "text/html; charset=utf-8")
        handler.send_header("Content-Length", str(len(body)))
        handler.end_headers()
        handler.wfile.write(body)
