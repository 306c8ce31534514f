"""WebSocket service around a teleop session, plus static UI hosting.

Wire format, version 1 (one JSON object per text frame, all frames carry
"v" and "type"):

server to client
  hello  {v, type, tick, protocol, scene, tick_rate, deadzone, mode, spaces}
  state  {v, type, tick, joints, ee, objects, mode, metrics, flags, events}
  bye    {v, type, tick, report}
  error  {v, type, tick, error}

client to server
  input  {v, type, tick, u: [ux, uy]}     joystick vector, latest wins
  toggle {v, type, tick}                  cycle submode / latent space
  reset  {v, type, tick}                  re-seed the scene
  mode   {v, type, tick, name}            switch mode by name

The client's "tick" echoes the newest state tick it has seen; the server
only logs it. Unknown types get an error frame and are otherwise ignored.
The simulation advances only in the server's fixed-rate tick loop; a tick
with no fresh input reuses the previous one and flags the reuse.
"""

from __future__ import annotations

import asyncio
import json
import os
from typing import Optional, Sequence

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .config import ServiceConfig
from .envs import EnvSpec
from .errors import ContractViolation
from .latent import LatentPolicy
from .session import TeleopSession, save_trace, scene_description, session_report

PROTOCOL_VERSION = 1

_STATIC_DIR = os.path.join(os.path.dirname(__file__), "static")


def _frame(kind: str, tick: int, **fields) -> str:
    return json.dumps({"v": PROTOCOL_VERSION, "type": kind, "tick": tick, **fields})


async def _recv_loop(socket: WebSocket, sess: TeleopSession, stop: asyncio.Event):
    """Apply client frames as they arrive; joystick input is latest-wins."""
    while not stop.is_set():
        try:
            text = await socket.receive_text()
        except WebSocketDisconnect:
            stop.set()
            return
        try:
            msg = json.loads(text)
        except json.JSONDecodeError:
            await socket.send_text(_frame("error", sess.ticks, error="not JSON"))
            continue
        kind = msg.get("type")
        try:
            if kind == "input":
                sess.set_input(msg.get("u"))
            elif kind == "toggle":
                sess.toggle()
            elif kind == "reset":
                sess.reset_world()
            elif kind == "mode":
                sess.set_mode(msg.get("name", ""))
            else:
                await socket.send_text(
                    _frame("error", sess.ticks, error=f"unknown message type {kind!r}")
                )
        except (ContractViolation, TypeError, ValueError) as exc:
            await socket.send_text(_frame("error", sess.ticks, error=str(exc)))


async def _run_session(socket: WebSocket, sess: TeleopSession):
    """Fixed-clock tick loop; ends on task completion or disconnect."""
    await socket.send_text(
        _frame(
            "hello",
            sess.ticks,
            protocol=PROTOCOL_VERSION,
            scene=scene_description(sess.env),
            tick_rate=sess.tick_rate,
            deadzone=sess.deadzone,
            mode=sess.mode,
            spaces=len(sess.policies),
        )
    )
    stop = asyncio.Event()
    recv = asyncio.create_task(_recv_loop(socket, sess, stop))
    loop = asyncio.get_running_loop()
    period = 1.0 / sess.tick_rate
    next_due = loop.time() + period
    try:
        while not stop.is_set():
            delay = next_due - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            next_due += period
            snap = sess.tick()
            await socket.send_text(_frame("state", snap.pop("tick"), **snap))
            if snap["metrics"]["complete"]:
                break
        await socket.send_text(_frame("bye", sess.ticks, report=session_report(sess)))
    except WebSocketDisconnect:
        pass
    finally:
        stop.set()
        recv.cancel()


def build_app(
    env: EnvSpec,
    policies: Optional[Sequence[LatentPolicy]] = None,
    service: Optional[ServiceConfig] = None,
    trace_dir: Optional[str] = None,
    seed: int = 0,
) -> FastAPI:
    """One-session-at-a-time server; later connections wait their turn."""
    service = service or ServiceConfig()
    app = FastAPI(title="latentarm teleop service")
    guard = {"busy": False, "count": 0}

    @app.websocket("/ws")
    async def ws_endpoint(socket: WebSocket):
        await socket.accept()
        if guard["busy"]:
            await socket.send_text(
                _frame("error", 0, error="a session is already active")
            )
            await socket.close()
            return
        guard["busy"] = True
        session_id = guard["count"]
        guard["count"] += 1
        sess = TeleopSession(
            env,
            policies,
            mode=service.mode,
            tick_rate=service.tick_rate,
            deadzone=service.deadzone,
            ee_speed=service.ee_speed,
            tilt_rate=service.tilt_rate,
            seed=seed + session_id,
        )
        try:
            await _run_session(socket, sess)
        except WebSocketDisconnect:
            pass
        finally:
            guard["busy"] = False
            if trace_dir and sess.ticks:
                os.makedirs(trace_dir, exist_ok=True)
                save_trace(
                    sess, os.path.join(trace_dir, f"session-{session_id:04d}.jsonl")
                )
            try:
                await socket.close()
            except RuntimeError:
                pass

    if os.path.isdir(_STATIC_DIR):
        app.mount("/", StaticFiles(directory=_STATIC_DIR, html=True), name="ui")
    return app


def run_server(
    env: EnvSpec,
    policies: Optional[Sequence[LatentPolicy]] = None,
    service: Optional[ServiceConfig] = None,
    trace_dir: Optional[str] = None,
    seed: int = 0,
    host: str = "127.0.0.1",
) -> None:
    import uvicorn

    service = service or ServiceConfig()
    app = build_app(env, policies, service, trace_dir=trace_dir, seed=seed)
    uvicorn.run(app, host=host, port=service.port, log_level="warning")
