"""HTTP + WebSocket surface over the session manager.

HTTP carries the slow path (session setup, selection, feedback, records);
the WebSocket at /session/{id}/stream carries live play. Input frames are
{type:"input", bitmask, tick}: bit i of the mask is button slot i and the
tick names the decision step the mask is for. Ticks are applied exactly
once, in order. With tick_hz > 0 the server paces the match clock and
repeats the last held mask when a tick's input misses its slot; with
tick_hz == 0 the match advances in lockstep, one step per delivered input
tick, which makes the applied input sequence equal the sent timeline
exactly. A disconnected player is fed no-op inputs for a grace window and
forfeits after it; reconnecting inside the window resumes the same match.
"""

from __future__ import annotations

import asyncio
import time
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .session import DISCONNECT_GRACE_SECONDS, GameManager, ManagerError, MatchDriver

MASK_LIMIT = 0xFFF

STATUS_BY_REASON = {
    "unknown_session": 404,
    "unknown_character": 404,
    "wrong_phase": 409,
    "match_over": 409,
    "match_live": 409,
    "no_selection": 409,
    "no_llm_client": 409,
    "unresolvable_selection": 409,
    "empty_archive": 409,
    "oversize_feedback": 413,
    "unknown_mode": 422,
}


class StartSessionBody(BaseModel):
    character: str


class NextOpponentBody(BaseModel):
    mode: str


class FeedbackBody(BaseModel):
    text: str


def _http_error(exc: ManagerError) -> HTTPException:
    return HTTPException(
        status_code=STATUS_BY_REASON.get(exc.reason, 400),
        detail={"reason": exc.reason, "message": str(exc)},
    )


class LiveRuntime:
    """Server-side driver of one live match, independent of any socket.

    The loop task steps the environment and publishes frames; attach/detach
    swap the consumer. The runtime outlives a dropped connection so a
    reconnect within the grace window resumes play in place.
    """

    def __init__(self, driver: MatchDriver, tick_hz: float):
        self.driver = driver
        self.tick_hz = tick_hz
        self.pending: dict[int, int] = {}
        self.last_mask = 0
        self.connected = False
        self.disconnect_time = time.monotonic()
        self.input_event = asyncio.Event()
        self.queue: Optional[asyncio.Queue] = None
        self.result: Optional[dict] = None
        self.finished = asyncio.Event()
        self.task: Optional[asyncio.Task] = None

    def start(self) -> None:
        self.task = asyncio.get_running_loop().create_task(self._loop())

    def attach(self) -> asyncio.Queue:
        self.connected = True
        self.queue = asyncio.Queue(maxsize=256)
        frame = self.driver.state_frame()
        frame["tick"] = self.driver.steps
        self._publish(frame)
        if self.result is not None:
            self._publish(self.result)
        self.input_event.set()
        return self.queue

    def detach(self, queue: asyncio.Queue) -> None:
        # No-op when a newer connection has already re-attached.
        if self.queue is not queue:
            return
        self.connected = False
        self.disconnect_time = time.monotonic()
        self.queue = None
        self.pending.clear()
        self.last_mask = 0
        self.input_event.set()

    def submit(self, tick: int, mask: int) -> None:
        if tick >= self.driver.steps:
            self.pending[tick] = mask & MASK_LIMIT
            self.input_event.set()

    def _publish(self, frame: dict) -> None:
        queue = self.queue
        if queue is None:
            return
        while True:
            try:
                queue.put_nowait(frame)
                return
            except asyncio.QueueFull:
                try:
                    queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass

    async def _mask_for_tick(self, tick: int) -> Optional[int]:
        """The mask to apply for this tick, or None to forfeit."""
        deadline = (
            time.monotonic() + 1.0 / self.tick_hz if self.tick_hz > 0 else None
        )
        while True:
            if tick in self.pending:
                self.last_mask = self.pending.pop(tick)
                return self.last_mask
            now = time.monotonic()
            if not self.connected:
                if now - self.disconnect_time > DISCONNECT_GRACE_SECONDS:
                    return None
                if deadline is not None and now >= deadline:
                    return 0
            elif deadline is not None and now >= deadline:
                return self.last_mask
            self.input_event.clear()
            timeout = 0.05
            if deadline is not None:
                timeout = min(timeout, max(0.001, deadline - now))
            try:
                await asyncio.wait_for(self.input_event.wait(), timeout)
            except asyncio.TimeoutError:
                pass

    async def _loop(self) -> None:
        driver = self.driver
        while not driver.done:
            mask = await self._mask_for_tick(driver.steps)
            if mask is None:
                driver.forfeit()
                break
            driver.step_mask(mask)
            frame = driver.state_frame()
            frame["tick"] = driver.steps
            self._publish(frame)
            if self.tick_hz <= 0:
                await asyncio.sleep(0)
        record = driver.finish()
        self.result = {"type": "result", "winner": record.winner, "score": record.score}
        self._publish(self.result)
        self.finished.set()


def create_app(manager: GameManager, tick_hz: float = 15.0) -> FastAPI:
    app = FastAPI(title="match session service")
    runtimes: dict[str, LiveRuntime] = {}
    app.state.manager = manager
    app.state.runtimes = runtimes

    @app.post("/session")
    def start_session(body: StartSessionBody):
        try:
            state = manager.start_session(body.character)
        except ManagerError as exc:
            raise _http_error(exc)
        return {"session_id": state.session_id}

    @app.get("/session/{session_id}/playing-data")
    def playing_data(session_id: str):
        try:
            state = manager.get_session(session_id)
        except ManagerError as exc:
            raise _http_error(exc)
        return state.playing_data.to_dict()

    @app.post("/session/{session_id}/next-opponent")
    def next_opponent(session_id: str, body: NextOpponentBody):
        try:
            selection = manager.request_next_opponent(session_id, body.mode)
        except ManagerError as exc:
            raise _http_error(exc)
        return selection.to_dict()

    @app.post("/session/{session_id}/feedback")
    def feedback(session_id: str, body: FeedbackBody):
        try:
            data = manager.collect_feedback(session_id, body.text)
        except ManagerError as exc:
            raise _http_error(exc)
        return data.to_dict()

    @app.get("/archive")
    def archive_manifest():
        return manager.archive.manifest()

    @app.get("/session/{session_id}/matches")
    def matches(session_id: str):
        try:
            state = manager.get_session(session_id)
        except ManagerError as exc:
            raise _http_error(exc)
        return [r.to_dict() for r in state.records]

    @app.websocket("/session/{session_id}/stream")
    async def stream(websocket: WebSocket, session_id: str):
        await websocket.accept()

        async def reject(exc: ManagerError):
            await websocket.send_json(
                {"type": "error", "reason": exc.reason, "message": str(exc)}
            )
            await websocket.close(code=1008)

        try:
            state = manager.get_session(session_id)
        except ManagerError as exc:
            await reject(exc)
            return

        runtime = runtimes.get(session_id)
        if runtime is not None and not runtime.finished.is_set():
            pass  # live match: resume it
        elif state.phase == "awaiting_selection":
            try:
                driver = manager.begin_match(session_id)
            except ManagerError as exc:
                await reject(exc)
                return
            runtime = LiveRuntime(driver, tick_hz)
            runtimes[session_id] = runtime
            runtime.start()
        elif runtime is None:
            await reject(ManagerError("wrong_phase", f"no live match in phase {state.phase}"))
            return

        queue = runtime.attach()

        async def pump():
            while True:
                frame = await queue.get()
                await websocket.send_json(frame)
                if frame.get("type") == "result":
                    await websocket.close()
                    return

        sender = asyncio.get_running_loop().create_task(pump())
        try:
            while True:
                message = await websocket.receive_json()
                if message.get("type") == "input":
                    runtime.submit(int(message["tick"]), int(message["bitmask"]))
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            runtime.detach(queue)
            if not sender.done():
                sender.cancel()

    return app
