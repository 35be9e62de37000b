"""HTTP/WebSocket binding for the session manager.

REST covers setup and reads; the WebSocket at /ws/{session_id} carries the
bidirectional message stream (one JSON frame per wire message).
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..corpus.io import load_transcript
from .core import ServiceError, SessionManager


def create_app(manager: SessionManager, transcript_path: str | Path | None = None,
               questions=None) -> FastAPI:
    app = FastAPI(title="claimlens")

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": manager.open_sessions()}

    @app.get("/schema")
    def schema():
        return {
            "topics": [
                {"topic_id": t.topic_id, "display_name": t.display_name,
                 "fields": [{"field_id": f.field_id, "etype": f.etype.value}
                            for f in t.fields]}
                for t in manager.schema.topics
            ]
        }

    @app.get("/transcript")
    def transcript():
        if transcript_path is None:
            return JSONResponse({"error": "no replay transcript configured"},
                                status_code=404)
        dialogue = load_transcript(transcript_path)
        return {"dialogue_id": dialogue.id,
                "utterances": [{"index": u.index, "speaker": u.speaker.value,
                                "text": u.text, "timestamp_ms": u.timestamp_ms}
                               for u in dialogue.utterances]}

    @app.post("/sessions")
    def open_session():
        return {"session_id": manager.open_session()}

    @app.get("/sessions/{session_id}/snapshot")
    def get_snapshot(session_id: str):
        try:
            return json.loads(manager.snapshot_message(session_id).to_json())
        except ServiceError as exc:
            return JSONResponse({"error": str(exc)}, status_code=404)

    @app.delete("/sessions/{session_id}")
    def close_session(session_id: str):
        try:
            return json.loads(manager.close_session(session_id).to_json())
        except ServiceError as exc:
            return JSONResponse({"error": str(exc)}, status_code=404)

    @app.websocket("/ws/{session_id}")
    async def ws_endpoint(websocket: WebSocket, session_id: str):
        await websocket.accept()
        if session_id not in manager.open_sessions():
            await websocket.send_text(json.dumps(
                {"v": "claimlens-v1", "session_id": session_id, "seq": 0,
                 "kind": "error", "payload": {"message": f"unknown session {session_id!r}"}}))
            await websocket.close()
            return
        try:
            while True:
                frame = json.loads(await websocket.receive_text())
                for msg in manager.handle_inbound(session_id, frame):
                    await websocket.send_text(msg.to_json())
        except WebSocketDisconnect:
            pass

    return app
