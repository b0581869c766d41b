"""HTTP facade over the exploration engine.

JSON request/response for actions, a polling endpoint plus an SSE stream
for generation updates, and offset-table/embedding exports for the
viewer.  One process serves many concurrent sessions; per-session
mutations are serialized inside the engine.
"""

from __future__ import annotations

import argparse
import asyncio
import json
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from .config import load_config
from .engine import ExplorationEngine, OrderingError, QuestionnaireError
from .geometry import write_offsets
from .rem import RemSession
from .saem import InteractionLimitError, SaemSession, ShrinkStallError


class CreateParticipantBody(BaseModel):
    seed: int


class StartModeBody(BaseModel):
    mode: str


class ActionBody(BaseModel):
    verb: str
    params: dict = {}


class QuestionnaireBody(BaseModel):
    answers: dict


class ExportBody(BaseModel):
    participantId: str | None = None
    outDir: str | None = None


def create_app(engine: ExplorationEngine) -> FastAPI:
    app = FastAPI(title="hullspace session server")

    def guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except OrderingError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        except (QuestionnaireError, InteractionLimitError, ShrinkStallError,
                ValueError, RuntimeError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/participants")
    def create_participant(body: CreateParticipantBody):
        participant = guard(engine.create_participant, body.seed)
        return {"participantId": participant.participant_id,
                "modeOrder": list(participant.mode_order)}

    @app.get("/participants/{pid}")
    def participant_state(pid: str):
        participant = guard(engine.participant, pid)
        return {
            "participantId": participant.participant_id,
            "modeOrder": list(participant.mode_order),
            "completed": sorted(participant.completed),
            "nextMode": participant.next_mode(),
            "questionnaireSubmitted": participant.questionnaire is not None,
        }

    @app.post("/participants/{pid}/start-mode")
    def start_mode(pid: str, body: StartModeBody):
        session_id = guard(engine.start_mode, pid, body.mode)
        return {"sessionId": session_id}

    @app.get("/sessions/{sid}")
    def session_state(sid: str):
        session = guard(engine.session, sid)
        state = session.summary()
        if isinstance(session, RemSession):
            state["embedding"] = {
                "designIds": session.embedding.design_ids,
                "points": session.embedding.points.tolist(),
                "hullPolygon": session.embedding.hull_polygon.tolist(),
            }
            state["poolSize"] = len(session.pool)
        elif isinstance(session, SaemSession):
            state["lastGeneration"] = [
                {"id": s.record.id, "cw": s.record.cw, "feasible": s.feasible}
                for s in session.last_generation
            ]
            state["minInteractions"] = session.config.min_interactions
            state["maxInteractions"] = session.config.max_interactions
        else:
            state["lastShown"] = [
                {"id": s.record.id, "cw": s.record.cw, "feasible": s.feasible}
                for s in session.last_shown
            ]
            state["minInteractions"] = session.config.min_interactions
            state["maxInteractions"] = session.config.max_interactions
        return state

    @app.post("/sessions/{sid}/action")
    def action(sid: str, body: ActionBody):
        return guard(engine.act, sid, body.verb, body.params)

    @app.get("/sessions/{sid}/events")
    def events(sid: str, since: int = 0):
        session = guard(engine.session, sid)
        items = session.log.events[since:]
        return {"since": since,
                "events": [{"t": e.timestamp, "kind": e.kind, "payload": e.payload}
                           for e in items],
                "next": since + len(items)}

    @app.get("/sessions/{sid}/events/stream")
    async def event_stream(sid: str):
        session = guard(engine.session, sid)

        async def generator():
            cursor = 0
            while True:
                items = session.log.events[cursor:]
                for event in items:
                    data = json.dumps({"t": event.timestamp, "kind": event.kind,
                                       "payload": event.payload})
                    yield f"data: {data}\n\n"
                cursor += len(items)
                if session_is_over(session):
                    break
                await asyncio.sleep(0.2)

        def session_is_over(s):
            return getattr(s, "terminated", False)

        return StreamingResponse(generator(), media_type="text/event-stream")

    @app.get("/sessions/{sid}/designs/{design_id}/offsets",
             response_class=PlainTextResponse)
    def design_offsets(sid: str, design_id: str):
        session = guard(engine.session, sid)
        record = guard(_find_design, session, design_id)
        return write_offsets(record.geometry)

    @app.get("/sessions/{sid}/designs/{design_id}")
    def design_surface(sid: str, design_id: str):
        session = guard(engine.session, sid)
        record = guard(_find_design, session, design_id)
        return {
            "id": record.id,
            "cw": record.cw,
            "cwSource": record.cw_source,
            "stations": record.geometry.stations.tolist(),
            "waterlines": record.geometry.waterlines.tolist(),
            "halfBreadths": record.geometry.half_breadths.tolist(),
        }

    @app.get("/sessions/{sid}/embedding.csv", response_class=PlainTextResponse)
    def embedding_csv(sid: str):
        session = guard(engine.session, sid)
        if not isinstance(session, RemSession):
            raise HTTPException(status_code=400, detail="session has no embedding")
        return session.embedding.to_csv()

    @app.post("/participants/{pid}/questionnaire")
    def questionnaire(pid: str, body: QuestionnaireBody):
        guard(engine.submit_questionnaire, pid, body.answers)
        return {"stored": True}

    @app.post("/export")
    def export(body: ExportBody):
        out = body.outDir or str(engine.data_dir / "export")
        manifest = guard(engine.export_telemetry, out, body.participantId)
        return {"outDir": out, "manifest": manifest}

    return app


def _find_design(session, design_id: str):
    if isinstance(session, RemSession):
        return session.record(design_id)
    shown = session.last_generation if isinstance(session, SaemSession) else session.last_shown
    for s in shown:
        if s.record.id == design_id:
            return s.record
    for record in session.selected_history:
        if record.id == design_id:
            return record
    raise KeyError(f"unknown design id: {design_id}")


def main(argv=None):
    parser = argparse.ArgumentParser(description="hullspace exploration session server")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--data-dir", default="./hullspace-data")
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    import uvicorn

    config = load_config(args.config)
    engine = ExplorationEngine(Path(args.data_dir), config, seed=args.seed)
    uvicorn.run(create_app(engine), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
