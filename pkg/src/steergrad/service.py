"""HTTP service: session control endpoints plus a one-way event stream.

Each session is owned by exactly one worker thread. Handlers never touch
session state directly: control calls enqueue a command (optionally
tagged with the epoch boundary at which it should apply) and wait for
the worker's reply, reads take the latest published immutable snapshot.
The event stream is server-sent events; per-epoch metric events are
lossless and ordered, decision-surface grids coalesce to the latest for
slow consumers.
"""

from __future__ import annotations

import json
import logging
import queue
import threading
import uuid
from collections import deque
from concurrent.futures import Future
from contextlib import asynccontextmanager
from pathlib import Path

from starlette.applications import Starlette
from starlette.concurrency import run_in_threadpool
from starlette.requests import Request
from starlette.responses import JSONResponse, Response, StreamingResponse
from starlette.routing import Mount, Route
from starlette.staticfiles import StaticFiles

from steergrad.data import evaluate_grid
from steergrad.errors import (
    AnnotationError,
    ConfigurationError,
    ExperimentExistsError,
    ExperimentNotFoundError,
    InputError,
    TransitionError,
)
from steergrad.serialize import (
    annotation_to_payload,
    breakdown_to_payload,
    canonical,
    dataset_to_payload,
    envelope,
    grid_to_payload,
    history_entry_to_payload,
    session_config_from_payload,
    session_config_to_payload,
)
from steergrad.session import (
    AddAnnotation,
    Command,
    Pause,
    Phase,
    RemoveAnnotation,
    Reset,
    Resume,
    SessionState,
    SetLambda,
    Start,
    command,
    create_session,
    train_epoch,
)
from steergrad.store import ExperimentStore, record_from_state, record_to_payload

log = logging.getLogger("steergrad.service")

GRID_RESOLUTION_MIN = 10
GRID_RESOLUTION_MAX = 400
COMMAND_TIMEOUT = 60.0


class _Subscriber:
    """Per-consumer buffers: an ordered lossless queue for metrics, phase
    changes and faults, and a latest-wins slot for grid snapshots."""

    def __init__(self):
        self.ordered: deque = deque()
        self.grid: dict | None = None
        self.cond = threading.Condition()

    def put_ordered(self, event: dict) -> None:
        with self.cond:
            self.ordered.append(event)
            self.cond.notify()

    def put_grid(self, event: dict) -> None:
        with self.cond:
            self.grid = event
            self.cond.notify()

    def drain(self, timeout: float) -> list[dict]:
        with self.cond:
            if not self.ordered and self.grid is None:
                self.cond.wait(timeout)
            events = list(self.ordered)
            self.ordered.clear()
            if self.grid is not None:
                events.append(self.grid)
                self.grid = None
            return events


class SessionRunner:
    """Worker thread that owns one session's mutable state."""

    def __init__(self, session_id: str, config):
        self.id = session_id
        self._state: SessionState = create_session(config)
        self._queue: queue.Queue = queue.Queue()
        self._scheduled: list[tuple[int, Command, Future]] = []
        self._subscribers: list[_Subscriber] = []
        self._sub_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread = threading.Thread(
            target=self._run, name=f"session-{session_id}", daemon=True
        )
        self._thread.start()

    @property
    def state(self) -> SessionState:
        return self._state

    def submit(self, cmd: Command, at_epoch: int | None = None):
        """Enqueue a command and wait for the worker's reply."""
        fut: Future = Future()
        self._queue.put((at_epoch, cmd, fut))
        return fut.result(timeout=COMMAND_TIMEOUT)

    def subscribe(self) -> _Subscriber:
        sub = _Subscriber()
        with self._sub_lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: _Subscriber) -> None:
        with self._sub_lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=5.0)

    # worker side

    def _event(self, kind: str, epoch: int, payload: dict) -> dict:
        return envelope(
            "event",
            {"kind": kind, "session_id": self.id, "epoch": epoch, "payload": payload},
        )

    def _emit_ordered(self, kind: str, epoch: int, payload: dict) -> None:
        event = self._event(kind, epoch, payload)
        with self._sub_lock:
            for sub in self._subscribers:
                sub.put_ordered(event)

    def _emit_grid(self, epoch: int, payload: dict) -> None:
        event = self._event("grid_snapshot", epoch, payload)
        with self._sub_lock:
            for sub in self._subscribers:
                sub.put_grid(event)

    def _apply(self, cmd: Command, fut: Future) -> None:
        old = self._state
        try:
            new = command(old, cmd)
        except Exception as exc:
            fut.set_exception(exc)
            return
        self._state = new
        # reply with the immutable state at application time; the worker
        # may train more epochs before the caller reads the result
        fut.set_result(new)
        if new.phase is not old.phase:
            self._emit_ordered(
                "phase_change",
                new.epoch,
                {"phase": new.phase.value, "previous": old.phase.value},
            )

    def _ingest(self, item) -> None:
        at_epoch, cmd, fut = item
        if at_epoch is not None and at_epoch < self._state.epoch:
            fut.set_exception(
                InputError(
                    f"epoch boundary {at_epoch} already passed (current {self._state.epoch})"
                )
            )
            return
        if at_epoch is None or at_epoch <= self._state.epoch:
            self._apply(cmd, fut)
        else:
            self._scheduled.append((at_epoch, cmd, fut))

    def _apply_due(self) -> None:
        pending = []
        for at_epoch, cmd, fut in self._scheduled:
            # while stopped the clock does not advance, so anything still
            # scheduled waits for training to reach its boundary
            if at_epoch <= self._state.epoch:
                self._apply(cmd, fut)
            else:
                pending.append((at_epoch, cmd, fut))
        self._scheduled = pending

    def _run(self) -> None:
        while not self._stop.is_set():
            if self._state.phase is not Phase.RUNNING:
                try:
                    item = self._queue.get(timeout=0.1)
                except queue.Empty:
                    continue
                self._ingest(item)
                self._apply_due()
                continue
            while True:
                try:
                    self._ingest(self._queue.get_nowait())
                except queue.Empty:
                    break
            self._apply_due()
            if self._state.phase is not Phase.RUNNING:
                continue
            old = self._state
            new = train_epoch(old)
            self._state = new
            if new.phase is Phase.FAULTED:
                self._emit_ordered(
                    "phase_change",
                    new.epoch,
                    {"phase": new.phase.value, "previous": old.phase.value},
                )
                self._emit_ordered("fault", new.epoch, {"diagnostic": new.fault})
                continue
            entry = new.history[-1]
            self._emit_ordered(
                "epoch_metrics",
                entry.epoch,
                {
                    "losses": breakdown_to_payload(entry.losses),
                    "train_accuracy": entry.train_accuracy,
                    "test_accuracy": entry.test_accuracy,
                },
            )
            if entry.epoch % new.config.snapshot_every == 0:
                grid = evaluate_grid(new.params, new.dataset)
                self._emit_grid(entry.epoch, grid_to_payload(grid))
            if new.phase is Phase.FINISHED:
                self._emit_ordered(
                    "phase_change",
                    new.epoch,
                    {"phase": new.phase.value, "previous": old.phase.value},
                )


class Service:
    def __init__(self, store_dir: str | Path):
        self.store = ExperimentStore(store_dir)
        self.runners: dict[str, SessionRunner] = {}
        self._lock = threading.Lock()

    def create_runner(self, config) -> SessionRunner:
        session_id = uuid.uuid4().hex[:12]
        runner = SessionRunner(session_id, config)
        with self._lock:
            self.runners[session_id] = runner
        return runner

    def runner(self, session_id: str) -> SessionRunner:
        with self._lock:
            if session_id not in self.runners:
                raise ExperimentNotFoundError(f"unknown session {session_id!r}")
            return self.runners[session_id]

    def shutdown(self) -> None:
        with self._lock:
            runners = list(self.runners.values())
        for runner in runners:
            runner.stop()


def _error(status: int, message: str, **extra) -> JSONResponse:
    return JSONResponse({"error": message, **extra}, status_code=status)


def _handle(fn):
    """Wrap a handler, mapping domain errors to HTTP status codes."""

    async def handler(request: Request):
        try:
            return await fn(request)
        except ConfigurationError as exc:
            return _error(400, str(exc), field=exc.field)
        except (InputError, AnnotationError) as exc:
            return _error(400, str(exc))
        except TransitionError as exc:
            return _error(409, str(exc), phase=exc.phase)
        except ExperimentExistsError as exc:
            return _error(409, str(exc))
        except (ExperimentNotFoundError, KeyError) as exc:
            return _error(404, str(exc).strip("'\""))
        except json.JSONDecodeError as exc:
            return _error(400, f"invalid JSON body: {exc}")

    return handler


def _canonical_response(payload, status: int = 200) -> Response:
    return Response(canonical(payload), status_code=status, media_type="application/json")


async def _optional_at_epoch(request: Request) -> int | None:
    raw = await request.body()
    if not raw:
        return None
    body = json.loads(raw)
    if body.get("at_epoch") is None:
        return None
    return int(body["at_epoch"])


def create_app(store_dir: str | Path, ui_dir: str | Path | None = None) -> Starlette:
    service = Service(store_dir)

    async def create_session_endpoint(request: Request) -> Response:
        config = session_config_from_payload(await request.json())
        runner = await run_in_threadpool(service.create_runner, config)
        return _canonical_response({"session_id": runner.id}, status=201)

    async def state_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        try:
            from_epoch = max(0, int(request.query_params.get("from_epoch", 0)))
        except ValueError:
            raise InputError("from_epoch must be an integer") from None
        state = runner.state
        return _canonical_response(
            {
                "session_id": runner.id,
                "phase": state.phase.value,
                "epoch": state.epoch,
                "lambda": state.loss.lam,
                "steepness": state.loss.steepness,
                "fault": state.fault,
                "config": session_config_to_payload(state.config),
                "history": [history_entry_to_payload(e) for e in state.history[from_epoch:]],
                "annotations": [annotation_to_payload(a) for a in state.annotations],
            }
        )

    def _control(cmd_factory):
        async def endpoint(request: Request) -> Response:
            runner = service.runner(request.path_params["sid"])
            at_epoch = await _optional_at_epoch(request)
            applied = await run_in_threadpool(runner.submit, cmd_factory(), at_epoch)
            return _canonical_response({"phase": applied.phase.value, "epoch": applied.epoch})

        return endpoint

    async def lambda_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        body = json.loads(await request.body() or b"{}")
        if "value" not in body:
            raise InputError("missing field 'value'")
        at_epoch = int(body["at_epoch"]) if body.get("at_epoch") is not None else None
        applied = await run_in_threadpool(runner.submit, SetLambda(value=body["value"]), at_epoch)
        return _canonical_response({"lambda": applied.loss.lam})

    async def add_annotation_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        body = await request.json()
        try:
            index = int(body["example_index"])
            direction = (float(body["direction"][0]), float(body["direction"][1]))
        except (KeyError, TypeError, IndexError, ValueError):
            raise InputError("body must carry example_index and direction [dx, dy]") from None
        at_epoch = int(body["at_epoch"]) if body.get("at_epoch") is not None else None
        applied = await run_in_threadpool(
            runner.submit, AddAnnotation(example_index=index, direction=direction), at_epoch
        )
        return _canonical_response(annotation_to_payload(applied.annotations[-1]), status=201)

    async def list_annotations_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        return _canonical_response(
            {"annotations": [annotation_to_payload(a) for a in runner.state.annotations]}
        )

    async def delete_annotation_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        annotation_id = int(request.path_params["aid"])
        await run_in_threadpool(runner.submit, RemoveAnnotation(annotation_id=annotation_id), None)
        return _canonical_response({"deleted": annotation_id})

    async def grid_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        try:
            requested = int(request.query_params.get("resolution", 100))
        except ValueError:
            raise InputError("resolution must be an integer") from None
        resolution = min(GRID_RESOLUTION_MAX, max(GRID_RESOLUTION_MIN, requested))
        state = runner.state
        grid = await run_in_threadpool(evaluate_grid, state.params, state.dataset, resolution)
        payload = grid_to_payload(grid)
        payload["requested_resolution"] = requested
        payload["epoch"] = state.epoch
        return _canonical_response(payload)

    async def dataset_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        return _canonical_response(dataset_to_payload(runner.state.dataset))

    async def events_endpoint(request: Request) -> StreamingResponse:
        runner = service.runner(request.path_params["sid"])
        sub = runner.subscribe()

        def stream():
            try:
                while True:
                    events = sub.drain(timeout=0.5)
                    if not events:
                        yield b": keepalive\n\n"
                        continue
                    for event in events:
                        yield f"data: {canonical(event)}\n\n".encode()
            finally:
                runner.unsubscribe(sub)

        return StreamingResponse(stream(), media_type="text/event-stream")

    async def save_experiment_endpoint(request: Request) -> Response:
        runner = service.runner(request.path_params["sid"])
        body = await request.json()
        if not body.get("name"):
            raise InputError("missing field 'name'")
        record = record_from_state(runner.state, body["name"], created_at=body.get("created_at"))
        await run_in_threadpool(service.store.save, record)
        return _canonical_response(record_to_payload(record), status=201)

    async def list_experiments_endpoint(request: Request) -> Response:
        records = await run_in_threadpool(service.store.list)
        return _canonical_response({"experiments": [record_to_payload(r) for r in records]})

    async def delete_experiment_endpoint(request: Request) -> Response:
        name = request.path_params["name"]
        await run_in_threadpool(service.store.delete, name)
        return _canonical_response({"deleted": name})

    api_routes = [
        Route("/sessions", _handle(create_session_endpoint), methods=["POST"]),
        Route("/sessions/{sid}/state", _handle(state_endpoint), methods=["GET"]),
        Route("/sessions/{sid}/start", _handle(_control(Start)), methods=["POST"]),
        Route("/sessions/{sid}/pause", _handle(_control(Pause)), methods=["POST"]),
        Route("/sessions/{sid}/resume", _handle(_control(Resume)), methods=["POST"]),
        Route("/sessions/{sid}/reset", _handle(_control(Reset)), methods=["POST"]),
        Route("/sessions/{sid}/lambda", _handle(lambda_endpoint), methods=["POST"]),
        Route("/sessions/{sid}/annotations", _handle(add_annotation_endpoint), methods=["POST"]),
        Route("/sessions/{sid}/annotations", _handle(list_annotations_endpoint), methods=["GET"]),
        Route(
            "/sessions/{sid}/annotations/{aid}",
            _handle(delete_annotation_endpoint),
            methods=["DELETE"],
        ),
        Route("/sessions/{sid}/grid", _handle(grid_endpoint), methods=["GET"]),
        Route("/sessions/{sid}/dataset", _handle(dataset_endpoint), methods=["GET"]),
        Route("/sessions/{sid}/events", _handle(events_endpoint), methods=["GET"]),
        Route("/sessions/{sid}/experiments", _handle(save_experiment_endpoint), methods=["POST"]),
        Route("/experiments", _handle(list_experiments_endpoint), methods=["GET"]),
        Route("/experiments/{name}", _handle(delete_experiment_endpoint), methods=["DELETE"]),
    ]

    routes: list = [Mount("/api", routes=api_routes)]
    if ui_dir is not None and Path(ui_dir).is_dir():
        routes.append(Mount("/", app=StaticFiles(directory=ui_dir, html=True)))
    elif ui_dir is not None:
        log.warning("UI directory %s not found; serving the API only", ui_dir)

    @asynccontextmanager
    async def lifespan(app: Starlette):
        yield
        service.shutdown()

    app = Starlette(routes=routes, lifespan=lifespan)
    app.state.service = service
    return app
