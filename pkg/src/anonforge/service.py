"""HTTP/WebSocket service exposing datasets, hierarchies, interactive
sessions, and sweep jobs.

Every request/response body is JSON except CSV downloads. Sessions are
single-writer: concurrent mutations are rejected with a busy conflict
rather than queued. All uploaded resources and session logs persist as
plain files under the working directory, so any session can be replayed
offline from what the service wrote.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import secrets
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .dataset import Dataset, load_adult_csv, load_csv, sample_rows, schema_from_json
from .errors import (
    AnonforgeError,
    BusyError,
    JobError,
    NotFoundError,
    PhaseError,
    ReportError,
)
from .hierarchy import Hierarchy, load_hierarchy
from .pipeline import config_from_json, emit_report, run_sweep
from .session import Session
from .weights import WeightVector, equal_weights

log = logging.getLogger("anonforge.service")

_STATUS = {
    "not_found": 404,
    "phase_error": 409,
    "busy": 409,
    "report_error": 500,
    "job_error": 500,
}


def _error_response(exc: AnonforgeError) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS.get(exc.error_code, 400),
        content={
            "error_code": exc.error_code,
            "message": str(exc),
            "detail": exc.detail,
        },
    )


def _new_id() -> str:
    return secrets.token_hex(8)


@dataclass
class SessionEntry:
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    subscribers: list[asyncio.Queue] = field(default_factory=list)
    frame_seq: int = 0
    latest: list[dict] = field(default_factory=list)


@dataclass
class JobHandle:
    id: str
    kind: str
    state: str  # queued -> running -> done | failed
    progress: float
    result_dir: str
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "state": self.state,
            "progress": self.progress,
            "result_location": self.result_dir,
            "error": self.error,
        }


class Workbench:
    """All server-side state plus its on-disk layout."""

    def __init__(self, workdir: str, pool_size: int = 2):
        self.workdir = workdir
        for sub in ("datasets", "hierarchies", "sessions", "sweeps"):
            os.makedirs(os.path.join(workdir, sub), exist_ok=True)
        self.datasets: dict[str, Dataset] = {}
        self.hierarchy_sets: dict[str, dict[str, Hierarchy]] = {}
        self.sessions: dict[str, SessionEntry] = {}
        self.jobs: dict[str, JobHandle] = {}
        self.executor = ThreadPoolExecutor(max_workers=pool_size)
        self.loop: asyncio.AbstractEventLoop | None = None

    # -- lookups ---------------------------------------------------------

    def dataset(self, ds_id: str) -> Dataset:
        try:
            return self.datasets[ds_id]
        except KeyError:
            raise NotFoundError(f"no dataset {ds_id!r}") from None

    def hierarchy_set(self, h_id: str) -> dict[str, Hierarchy]:
        try:
            return self.hierarchy_sets[h_id]
        except KeyError:
            raise NotFoundError(f"no hierarchy set {h_id!r}") from None

    def entry(self, s_id: str) -> SessionEntry:
        try:
            return self.sessions[s_id]
        except KeyError:
            raise NotFoundError(f"no session {s_id!r}") from None

    # -- resource creation -------------------------------------------------

    def add_dataset(self, payload: dict) -> dict:
        csv_text = payload.get("csv")
        if not isinstance(csv_text, str) or not csv_text.strip():
            raise AnonforgeError("dataset upload needs a 'csv' string")
        complete_only = bool(payload.get("complete_only", False))
        if payload.get("adult"):
            d = load_adult_csv(csv_text, complete_only=complete_only)
        else:
            schema = schema_from_json(payload.get("schema") or {})
            d = load_csv(csv_text, schema, complete_only=complete_only)
        sample = payload.get("sample")
        if sample:
            d = sample_rows(d, int(sample["n"]), int(sample.get("seed", 0)))
        ds_id = _new_id()
        self.datasets[ds_id] = d
        base = os.path.join(self.workdir, "datasets", ds_id)
        with open(base + ".csv", "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        with open(base + ".schema.json", "w", encoding="utf-8") as fh:
            json.dump(
                {"attributes": [vars(a) for a in d.schema],
                 "complete_only": complete_only, "sample": sample},
                fh, indent=2,
            )
        return {"id": ds_id, "rows": len(d),
                "attributes": [a.name for a in d.schema]}

    def add_hierarchies(self, payload: dict) -> dict:
        trees = payload.get("trees")
        if not isinstance(trees, dict) or not trees:
            raise AnonforgeError("hierarchy upload needs a 'trees' mapping")
        hset = {attr: load_hierarchy(tree, attribute=attr)
                for attr, tree in trees.items()}
        h_id = _new_id()
        self.hierarchy_sets[h_id] = hset
        path = os.path.join(self.workdir, "hierarchies", f"{h_id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({attr: h.to_dict() for attr, h in hset.items()}, fh, indent=2)
        return {"id": h_id, "attributes": sorted(hset)}

    def create_session(self, payload: dict) -> dict:
        d = self.dataset(str(payload.get("dataset")))
        hset = self.hierarchy_set(str(payload.get("hierarchies")))
        k = int(payload.get("k", 0))
        m = int(payload.get("m", 3))
        weights = payload.get("weights", "equal")
        if weights == "equal" or weights is None:
            wv = equal_weights(d.qi_names())
        else:
            wv = WeightVector.normalized({str(a): float(v) for a, v in weights.items()})
        session = Session(d, hset, k, wv, m=m)
        entry = SessionEntry(session)
        self.sessions[session.id] = entry
        meta = {
            "id": session.id,
            "dataset": payload.get("dataset"),
            "hierarchies": payload.get("hierarchies"),
            "k": k,
            "m": m,
            "weights": "equal" if weights in ("equal", None) else weights,
        }
        with open(self._session_path(session.id, "meta.json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
        self._persist_log(entry)
        return {"id": session.id, "phase": session.phase}

    def _session_path(self, s_id: str, suffix: str) -> str:
        return os.path.join(self.workdir, "sessions", f"{s_id}.{suffix}")

    def _persist_log(self, entry: SessionEntry) -> None:
        with open(self._session_path(entry.session.id, "log.jsonl"), "w",
                  encoding="utf-8") as fh:
            fh.write(entry.session.log_jsonl())

    # -- session mutations (single writer) ---------------------------------

    def mutate(self, s_id: str, fn) -> dict:
        """Run one state-changing action under the session's writer lock."""
        entry = self.entry(s_id)
        if not entry.lock.acquire(blocking=False):
            raise BusyError(f"session {s_id} is busy; retry")
        try:
            result = fn(entry.session)
            self._persist_log(entry)
            self._broadcast(entry)
            return result
        finally:
            entry.lock.release()

    def _frames_after_action(self, entry: SessionEntry) -> list[dict]:
        frames = []
        s = entry.session
        frames.append({"type": "metrics", "data": s.metrics().to_json()})
        if s.phase != "complete":
            frames.append({"type": "proposal", "data": s.propose().to_json()})
        return frames

    def snapshot_frames(self, entry: SessionEntry) -> list[dict]:
        """Latest frames for a new subscriber (stamped on first request)."""
        if not entry.latest:
            frames = self._frames_after_action(entry)
            for f in frames:
                f["seq"] = entry.frame_seq
                entry.frame_seq += 1
            entry.latest = frames
        return entry.latest

    def _broadcast(self, entry: SessionEntry) -> None:
        frames = self._frames_after_action(entry)
        stamped = []
        for f in frames:
            f["seq"] = entry.frame_seq
            entry.frame_seq += 1
            stamped.append(f)
        entry.latest = stamped
        if self.loop is None:
            return
        for q in list(entry.subscribers):
            for f in stamped:
                self.loop.call_soon_threadsafe(q.put_nowait, f)

    # -- sweep jobs ----------------------------------------------------------

    def submit_sweep(self, payload: dict) -> JobHandle:
        d = self.dataset(str(payload.get("dataset")))
        hset = self.hierarchy_set(str(payload.get("hierarchies")))
        config = config_from_json(payload, base_dir=self.workdir)
        job_id = _new_id()
        outdir = os.path.join(self.workdir, "sweeps", job_id)
        job = JobHandle(job_id, "sweep", "queued", 0.0, outdir)
        self.jobs[job_id] = job

        def work():
            job.state = "running"
            job.progress = 0.05
            try:
                result = run_sweep(config, d, hset)
                emit_report(result, outdir)
                job.progress = 1.0
                job.state = "done"
            except Exception as exc:  # failures land in the handle
                log.exception("sweep job %s failed", job_id)
                job.state = "failed"
                job.error = f"{getattr(exc, 'error_code', 'error')}: {exc}"

        self.executor.submit(work)
        return job

    def job(self, job_id: str) -> JobHandle:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise NotFoundError(f"no job {job_id!r}") from None

    def sweep_results(self, job_id: str) -> dict:
        job = self.job(job_id)
        if job.kind != "sweep":
            raise NotFoundError(f"job {job_id!r} is not a sweep")
        if job.state == "failed":
            raise JobError(f"sweep failed: {job.error}")
        if job.state != "done":
            raise PhaseError(f"sweep {job_id} is {job.state}")
        try:
            out = {"plots": {}}
            with open(os.path.join(job.result_dir, "results.csv"), encoding="utf-8") as fh:
                out["results_csv"] = fh.read()
            with open(os.path.join(job.result_dir, "run-manifest.json"), encoding="utf-8") as fh:
                out["manifest"] = json.load(fh)
            plots_dir = os.path.join(job.result_dir, "plots")
            for name in sorted(os.listdir(plots_dir)):
                with open(os.path.join(plots_dir, name), encoding="utf-8") as fh:
                    out["plots"][name[: -len(".json")]] = json.load(fh)
            return out
        except OSError as exc:
            raise ReportError(f"cannot read sweep results: {exc}") from exc


def create_app(workdir: str = "anonforge-work", pool_size: int = 2) -> FastAPI:
    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        bench.loop = asyncio.get_running_loop()
        yield

    app = FastAPI(title="anonforge", version="0.1.0", lifespan=lifespan)
    bench = Workbench(workdir, pool_size)
    app.state.bench = bench

    # the browser UI is served as static files from anywhere; this is a
    # local single-user tool (auth/multi-tenancy out of scope)
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(AnonforgeError)
    async def _handle(request, exc: AnonforgeError):
        return _error_response(exc)

    # -- resources -------------------------------------------------------

    @app.post("/datasets", status_code=201)
    def post_dataset(payload: dict = Body(...)):
        return bench.add_dataset(payload)

    @app.post("/hierarchies", status_code=201)
    def post_hierarchies(payload: dict = Body(...)):
        return bench.add_hierarchies(payload)

    # -- sessions ----------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def post_session(payload: dict = Body(...)):
        return bench.create_session(payload)

    @app.get("/sessions/{s_id}/round")
    def get_round(s_id: str):
        entry = bench.entry(s_id)
        return entry.session.propose().to_json()

    @app.post("/sessions/{s_id}/choice")
    def post_choice(s_id: str, payload: dict = Body(...)):
        record = int(payload.get("record", -1))
        return bench.mutate(s_id, lambda s: s.choose(record).to_json())

    @app.post("/sessions/{s_id}/weights")
    def post_weights(s_id: str, payload: dict = Body(...)):
        sliders = payload.get("sliders") or {}
        return bench.mutate(s_id, lambda s: s.set_weights(sliders).to_json())

    @app.post("/sessions/{s_id}/autopilot")
    def post_autopilot(s_id: str):
        def run(s: Session):
            s.autopilot()
            return s.metrics().to_json()

        return bench.mutate(s_id, run)

    @app.get("/sessions/{s_id}/metrics")
    def get_metrics(s_id: str):
        return bench.entry(s_id).session.metrics().to_json()

    @app.get("/sessions/{s_id}/export")
    def get_export(s_id: str):
        text = bench.entry(s_id).session.export()
        return PlainTextResponse(text, media_type="text/csv")

    @app.get("/sessions/{s_id}/log")
    def get_log(s_id: str):
        text = bench.entry(s_id).session.log_jsonl()
        return PlainTextResponse(text, media_type="application/x-ndjson")

    # -- jobs ---------------------------------------------------------------

    @app.post("/sweeps", status_code=202)
    def post_sweep(payload: dict = Body(...)):
        return bench.submit_sweep(payload).to_json()

    @app.get("/jobs/{job_id}")
    def get_job(job_id: str):
        return bench.job(job_id).to_json()

    @app.get("/sweeps/{job_id}/results")
    def get_sweep_results(job_id: str):
        return bench.sweep_results(job_id)

    # -- stream ---------------------------------------------------------------

    @app.websocket("/sessions/{s_id}/stream")
    async def stream(ws: WebSocket, s_id: str):
        await ws.accept()
        bench.loop = asyncio.get_running_loop()
        entry = bench.sessions.get(s_id)
        if entry is None:
            await ws.send_json(
                {"type": "error", "error_code": "not_found",
                 "message": f"no session {s_id!r}"}
            )
            await ws.close()
            return
        queue: asyncio.Queue = asyncio.Queue()
        entry.subscribers.append(queue)
        # snapshot so late subscribers start from the current state
        for f in bench.snapshot_frames(entry):
            await ws.send_json(f)

        async def pump():
            while True:
                frame = await queue.get()
                await ws.send_json(frame)

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                msg = await ws.receive_json()
                try:
                    kind = msg.get("type")
                    if kind == "choice":
                        bench.mutate(s_id, lambda s: s.choose(int(msg["record"])))
                    elif kind == "set_weights":
                        bench.mutate(s_id, lambda s: s.set_weights(msg["sliders"]))
                    elif kind == "autopilot":
                        bench.mutate(s_id, lambda s: s.autopilot())
                    else:
                        raise AnonforgeError(f"unknown message type {kind!r}")
                except AnonforgeError as exc:
                    await ws.send_json(
                        {"type": "error", "error_code": exc.error_code,
                         "message": str(exc), "detail": exc.detail}
                    )
        except WebSocketDisconnect:
            pass
        finally:
            pump_task.cancel()
            if queue in entry.subscribers:
                entry.subscribers.remove(queue)

    return app
