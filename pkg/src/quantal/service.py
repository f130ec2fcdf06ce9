"""Local JSON-over-HTTP session service for the operator console.

Sessions persist as event-log files; every snapshot is a pure projection
of a log, and mutations are serialized per session with optimistic
versioning (the snapshot version must be echoed back).
"""

from __future__ import annotations

import json
import re
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from . import plotdata
from .confidence import ConfidenceUnavailable
from .numerics import OverlapStatus
from .session import (Event, PromptKind, SessionConfig, SuspendedError,
                      TestSession)


class SessionStore:
    """Directory of session log files with per-session locks."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, TestSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._master = threading.Lock()

    def lock(self, sid) -> threading.Lock:
        with self._master:
            return self._locks.setdefault(sid, threading.Lock())

    def path(self, sid) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9_-]+", sid):
            raise KeyError(sid)
        return self.root / f"{sid}.json"

    def create(self, config: SessionConfig) -> tuple[str, TestSession]:
        sid = uuid.uuid4().hex[:12]
        s = TestSession(config)
        with self.lock(sid):
            self._cache[sid] = s
            s.save(self.path(sid))
        return sid, s

    def get(self, sid) -> TestSession:
        with self.lock(sid):
            if sid not in self._cache:
                p = self.path(sid)
                if not p.exists():
                    raise KeyError(sid)
                self._cache[sid] = TestSession.load(p)
            return self._cache[sid]

    def ids(self):
        return sorted(p.stem for p in self.root.glob("*.json"))

    def persist(self, sid):
        self._cache[sid].save(self.path(sid))


class ApiError(Exception):
    def __init__(self, status, reason):
        super().__init__(reason)
        self.status = status
        self.reason = reason


def snapshot(sid, s: TestSession) -> dict:
    rec = s.recommended() if s.prompt is PromptKind.TRIAL else None
    fit = s.musig if s.trials.live_rows() else None
    rows = []
    live_i = 0
    for r in s.trials:
        live_i += 1 if r.count == 1 else 0
        rows.append({
            "i": str(live_i) if r.count == 1 else f"{live_i}1",
            "x": r.x, "y": r.y, "count": r.count, "rx": r.rx, "ex": r.ex,
            "tx": r.tx, "id": r.id,
        })
    return {
        "id": sid,
        "version": len(s.events),
        "prompt": s.prompt.value,
        "recommended": None if rec is None else
            {"x": rec[0], "rx": rec[1], "stage": rec[2]},
        "next_run": len(s.trials.live_rows()) + 1,
        "finished": s.finished,
        "suspended": s.suspended,
        "title": s.title,
        "units": s.units,
        "config": s.config.to_dict(),
        "phase": s.phase,
        "n2": s.n2, "n3": s.n3, "p": s.p, "lam": s.lam,
        "en": s.en,
        "trials": rows,
        "notices": list(s.notices),
        "musig": {
            "mu": fit.mu, "sig": fit.sig, "status": fit.status.value,
        } if fit is not None else None,
        "links": {
            "state": f"/api/sessions/{sid}",
            "export": f"/api/sessions/{sid}/export",
            "series": f"/api/sessions/{sid}/series",
        },
    }


def _check_version(s: TestSession, body):
    v = body.get("version")
    if v is None:
        raise ApiError(400, "missing version (echo the snapshot version)")
    if int(v) != len(s.events):
        raise ApiError(409, f"version conflict: session is at {len(s.events)}")


class Api:
    """Routes; kept free of HTTP plumbing so tests can call it directly."""

    def __init__(self, store: SessionStore):
        self.store = store

    def create_session(self, body) -> dict:
        try:
            cfg = SessionConfig.from_dict(body)
        except (KeyError, TypeError, ValueError) as e:
            raise ApiError(400, f"bad config: {e}")
        sid, s = self.store.create(cfg)
        return snapshot(sid, s)

    def list_sessions(self) -> dict:
        out = []
        for sid in self.store.ids():
            try:
                s = self.store.get(sid)
            except Exception:
                continue
            out.append({
                "id": sid, "title": s.title, "prompt": s.prompt.value,
                "runs": len(s.trials.live_rows()), "finished": s.finished,
            })
        return {"sessions": out}

    def get_state(self, sid) -> dict:
        return snapshot(sid, self._get(sid))

    def post_response(self, sid, body) -> dict:
        s = self._get(sid)
        with self.store.lock(sid):
            _check_version(s, body)
            if s.prompt is not PromptKind.TRIAL:
                raise ApiError(409, f"not awaiting a stress/response pair (prompt={s.prompt.value})")
            try:
                s.submit("sr", float(body["x"]), int(body["y"]))
            except SuspendedError as e:
                s.suspended = e.reason
                raise ApiError(422, f"suspension trigger: {e.reason}")
            except (KeyError, TypeError, ValueError) as e:
                raise ApiError(400, str(e))
            self.store.persist(sid)
        return snapshot(sid, s)

    def post_parameter(self, sid, body) -> dict:
        s = self._get(sid)
        which = body.get("which")
        value = body.get("value")
        with self.store.lock(sid):
            _check_version(s, body)
            try:
                if which == "n2":
                    s.submit("n2", int(value))
                elif which == "n3":
                    s.submit("n3", int(value))
                elif which == "plam":
                    s.submit("plam", float(value[0]), float(value[1]))
                elif which == "title":
                    s.submit("title", str(value))
                elif which == "units":
                    s.submit("units", str(value))
                elif which == "bl":
                    s.submit("bl", *[int(v) for v in value])
                else:
                    raise ApiError(400, f"unknown parameter {which!r}")
            except SuspendedError as e:
                s.suspended = e.reason
                raise ApiError(422, f"suspension trigger: {e.reason}")
            except (TypeError, ValueError) as e:
                raise ApiError(409, str(e))
            self.store.persist(sid)
        return snapshot(sid, s)

    def undo(self, sid, body) -> dict:
        s = self._get(sid)
        with self.store.lock(sid):
            _check_version(s, body)
            k = int(body.get("k", 1))
            try:
                s2 = s.fixw(k)
            except ValueError as e:
                raise ApiError(400, str(e))
            self.store._cache[sid] = s2
            self.store.persist(sid)
        return snapshot(sid, s2)

    @staticmethod
    def _series_args(params):
        kind = int(params.get("kind", ["1"])[0])
        kw = {}
        for key in ("conf", "p", "q", "jconf"):
            if key in params:
                kw[key] = float(params[key][0])
        if "J" in params:
            kw["J"] = int(params["J"][0])
        if "confs" in params:
            kw["conf_list"] = [float(v) for v in params["confs"][0].split(",")]
        return kind, kw

    def get_series(self, sid, params) -> dict:
        s = self._get(sid)
        kind, kw = self._series_args(params)
        try:
            return plotdata.series(s, kind, **kw).to_dict()
        except (ConfidenceUnavailable, ValueError) as e:
            raise ApiError(422, str(e))

    def get_export(self, sid) -> str:
        return self._get(sid).export_text()

    def get_svg(self, sid, params) -> bytes:
        s = self._get(sid)
        kind, kw = self._series_args(params)
        try:
            return plotdata.render_svg(plotdata.series(s, kind, **kw))
        except (ConfidenceUnavailable, ValueError) as e:
            raise ApiError(422, str(e))

    def _get(self, sid) -> TestSession:
        try:
            return self.store.get(sid)
        except KeyError:
            raise ApiError(404, f"no session {sid}")


def make_handler(api: Api, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        def _send(self, status, payload, ctype="application/json"):
            body = payload if isinstance(payload, bytes) else payload.encode()
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Cache-Control", "no-store")
            self.end_headers()
            self.wfile.write(body)

        def _json(self, status, obj):
            self._send(status, json.dumps(obj))

        def _body(self):
            n = int(self.headers.get("Content-Length") or 0)
            if n == 0:
                return {}
            try:
                return json.loads(self.rfile.read(n))
            except json.JSONDecodeError:
                raise ApiError(400, "request body is not valid JSON")

        def do_GET(self):
            try:
                url = urlparse(self.path)
                params = parse_qs(url.query)
                m = re.fullmatch(r"/api/sessions", url.path)
                if m:
                    return self._json(200, api.list_sessions())
                m = re.fullmatch(r"/api/sessions/([\w-]+)", url.path)
                if m:
                    return self._json(200, api.get_state(m.group(1)))
                m = re.fullmatch(r"/api/sessions/([\w-]+)/series", url.path)
                if m:
                    return self._json(200, api.get_series(m.group(1), params))
                m = re.fullmatch(r"/api/sessions/([\w-]+)/export", url.path)
                if m:
                    return self._send(200, api.get_export(m.group(1)), "text/plain")
                m = re.fullmatch(r"/api/sessions/([\w-]+)/svg", url.path)
                if m:
                    return self._send(200, api.get_svg(m.group(1), params), "image/svg+xml")
                return self._static(url.path)
            except ApiError as e:
                self._json(e.status, {"error": e.reason})
            except Exception as e:  # pragma: no cover - last resort
                self._json(500, {"error": f"internal: {e}"})

        def do_POST(self):
            try:
                url = urlparse(self.path)
                body = self._body()
                if re.fullmatch(r"/api/sessions", url.path):
                    return self._json(201, api.create_session(body))
                m = re.fullmatch(r"/api/sessions/([\w-]+)/response", url.path)
                if m:
                    return self._json(200, api.post_response(m.group(1), body))
                m = re.fullmatch(r"/api/sessions/([\w-]+)/parameter", url.path)
                if m:
                    return self._json(200, api.post_parameter(m.group(1), body))
                m = re.fullmatch(r"/api/sessions/([\w-]+)/undo", url.path)
                if m:
                    return self._json(200, api.undo(m.group(1), body))
                return self._json(404, {"error": "no such endpoint"})
            except ApiError as e:
                self._json(e.status, {"error": e.reason})
            except Exception as e:  # pragma: no cover
                self._json(500, {"error": f"internal: {e}"})

        def _static(self, path):
            if static_dir is None:
                raise ApiError(404, "no UI assets built")
            name = "index.html" if path in ("/", "") else path.lstrip("/")
            f = (static_dir / name).resolve()
            if not str(f).startswith(str(static_dir.resolve())) or not f.is_file():
                raise ApiError(404, f"not found: {path}")
            ctype = {
                ".html": "text/html", ".js": "text/javascript",
                ".css": "text/css", ".svg": "image/svg+xml",
                ".map": "application/json",
            }.get(f.suffix, "application/octet-stream")
            self._send(200, f.read_bytes(), ctype)

    return Handler


def find_static_dir() -> Path | None:
    here = Path(__file__).resolve()
    for base in [here.parent / "webui", *[p / "frontend" / "dist" for p in here.parents]]:
        if (base / "index.html").exists():
            return base
    return None


def make_server(host, port, sessions_dir, static_dir=None) -> ThreadingHTTPServer:
    api = Api(SessionStore(sessions_dir))
    static = Path(static_dir) if static_dir else find_static_dir()
    return ThreadingHTTPServer((host, port), make_handler(api, static))


def serve_forever(host, port, sessions_dir):  # pragma: no cover - CLI loop
    httpd = make_server(host, port, sessions_dir)
    print(f"serving on http://{host}:{httpd.server_address[1]}/ "
          f"(sessions in {sessions_dir})")
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
