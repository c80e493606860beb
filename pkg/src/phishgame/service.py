"""HTTP boundary: session lifecycle and gameplay over a JSON protocol.

Design points the tests lean on:

* Optimistic concurrency — every mutating request carries ``seq_expected``,
  the last event sequence number the client saw.  A stale value is rejected
  with 409 and never merged.
* Exactly-once actions — the idempotency key is (session id, client action
  id); a duplicate request is answered with the stored original response.
* Durability — events are appended to the session's JSONL file before the
  response is built, so a restarted server replays to the identical state.
* Redaction — responses never carry ``legitimate`` or ``tricks`` fields;
  an unresolved balloon's payload text appears only after the player aims.
* Server-authoritative time — the clock is injected (tests pass a fake),
  and timer expiries are applied lazily on every request that touches a
  session.

The wire protocol is documented with examples in docs/protocol.md.
"""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Callable, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .assessment import (
    InsufficientData,
    build_record,
    questionnaire_definitions,
    test_hypotheses,
)
from .corpus import read_corpus
from .session import (
    PER_BALLOON_MS,
    STAGE_CONFIGS,
    Session,
    SessionError,
    SessionState,
    append_event,
    read_events,
)

PROTOCOL_VERSION = 1


def real_clock_ms() -> int:
    return int(time.time() * 1000)


# ---------------------------------------------------------------------------
# redacted state serialization


def redact_state(state: SessionState) -> dict:
    """Client-visible snapshot: never exposes an item's ground truth."""
    fx = state.fixture
    out: dict = {
        "v": PROTOCOL_VERSION,
        "session_id": state.session_id,
        "player_id": state.player_id,
        "seq": state.last_seq,
        "phase": state.phase,
        "awaiting_advance": state.awaiting_advance,
        "stage_scores": dict(state.stage_scores),
        "total_score": state.total_score,
        "stages_ended": dict(state.stages_ended),
        "help_uses": state.help_uses,
        "questionnaires_done": sorted(state.questionnaires),
        "last_feedback": state.last_feedback,
    }
    out["tutorial"] = {
        "step": state.tutorial_step,
        "total": len(fx.tutorial),
        "current": (
            fx.tutorial[state.tutorial_step]
            if state.phase == "tutorial" and state.tutorial_step < len(fx.tutorial)
            else None
        ),
    }
    if state.phase == "quiz":
        out["quiz"] = [
            {"item_id": q.item.item_id, "kind": q.item.kind,
             "display_text": q.item.display_text, "mode": q.mode}
            for q in fx.quiz
        ]
    if state.stage is not None:
        cfg = STAGE_CONFIGS[state.stage]
        item = state.current_item()
        aimed = state.balloon_aim_ms is not None
        out["stage"] = {
            "name": state.stage,
            "balloon_index": state.balloon_index,
            "balloon_count": cfg.balloon_count,
            "lives": state.lives,
            "score": state.stage_scores.get(state.stage, 0),
            "stage_deadline_ms": state.stage_deadline_ms(),
            "per_balloon_ms": PER_BALLOON_MS,
            "balloon": None if item is None else {
                "item_id": item.item_id,
                "kind": item.kind,
                "aimed": aimed,
                "display_text": item.display_text if aimed else None,
                "assisted": state.balloon_assisted,
                "hint": state.balloon_hint,
                "balloon_deadline_ms": state.balloon_deadline_ms(),
            },
        }
    else:
        out["stage"] = None
    out["resolved"] = [
        {"stage": o.stage, "index": o.index, "item_id": o.item_id,
         "action": o.action, "correct": o.correct, "assisted": o.assisted,
         "elapsed_ms": o.elapsed_ms}
        for o in state.outcomes
    ]
    if state.stage is None and state.stages_ended:
        encountered = fx.encountered_fakes(list(state.stages_ended))
        out["review"] = {
            "items": [
                {"item_id": it.item_id, "kind": it.kind,
                 "display_text": it.display_text,
                 "answered": it.item_id in state.review_answers}
                for it in encountered
            ],
        }
    else:
        out["review"] = None
    return out


# ---------------------------------------------------------------------------
# per-session store


class _LiveSession:
    def __init__(self, session: Session, log_path: Path, resp_path: Path) -> None:
        self.session = session
        self.log_path = log_path
        self.resp_path = resp_path
        self.lock = threading.Lock()
        self.responses: dict[str, dict] = {}
        if resp_path.exists():
            with open(resp_path, "r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        d = json.loads(line)
                        self.responses[d["action_id"]] = d["response"]

    def persist_new_events(self, known: int) -> None:
        for ev in self.session.events[known:]:
            append_event(ev, self.log_path)

    def remember(self, action_id: Optional[str], response: dict) -> None:
        if action_id is None:
            return
        self.responses[action_id] = response
        with open(self.resp_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"action_id": action_id, "response": response},
                                ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


class _ApiError(Exception):
    def __init__(self, status: int, error: str, detail: str = "", **extra) -> None:
        super().__init__(detail or error)
        self.status = status
        self.body = {"error": error, "detail": detail, **extra}


def create_app(data_dir: str | Path, clock: Callable[[], int] = real_clock_ms) -> FastAPI:
    """Build the service; ``data_dir`` holds corpora, logs and the index."""
    data_dir = Path(data_dir)
    sessions_dir = data_dir / "sessions"
    sessions_dir.mkdir(parents=True, exist_ok=True)
    index_path = data_dir / "index.json"
    creates_path = data_dir / "creates.jsonl"

    app = FastAPI(title="balloon-shooter training service", docs_url=None, redoc_url=None)
    live: dict[str, _LiveSession] = {}
    registry_lock = threading.Lock()
    create_responses: dict[str, dict] = {}

    def load_index() -> dict:
        if index_path.exists():
            with open(index_path, "r", encoding="utf-8") as fh:
                return json.load(fh)
        return {}

    def save_index(index: dict) -> None:
        with open(index_path, "w", encoding="utf-8") as fh:
            json.dump(index, fh, indent=2, sort_keys=True)
            fh.write("\n")

    if creates_path.exists():
        with open(creates_path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    d = json.loads(line)
                    create_responses[d["action_id"]] = d["response"]

    def get_session(session_id: str) -> _LiveSession:
        with registry_lock:
            ls = live.get(session_id)
            if ls is not None:
                return ls
            index = load_index()
            if session_id not in index:
                raise _ApiError(404, "UnknownSession", f"no session {session_id}")
            log_path = data_dir / index[session_id]["path"]
            events = read_events(log_path)
            session = Session(events)
            ls = _LiveSession(session, log_path,
                              log_path.with_suffix(".responses.jsonl"))
            live[session_id] = ls
            return ls

    @app.exception_handler(_ApiError)
    async def _api_error_handler(_req: Request, exc: _ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body)

    # -- endpoints ---------------------------------------------------------

    @app.get("/api/questionnaires")
    def get_questionnaires() -> dict:
        return questionnaire_definitions()

    @app.post("/api/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        action_id = body.get("action_id")
        with registry_lock:
            if action_id is not None and action_id in create_responses:
                return JSONResponse(status_code=201,
                                    content=create_responses[action_id])
        for key in ("player_id", "corpus_ref", "seed"):
            if key not in body:
                raise _ApiError(400, "ValidationError", f"missing field {key!r}")
        corpus_rel = Path(body["corpus_ref"])
        if corpus_rel.is_absolute() or ".." in corpus_rel.parts:
            raise _ApiError(400, "ValidationError", "corpus_ref must stay inside the data directory")
        corpus_path = data_dir / corpus_rel
        if not corpus_path.exists():
            raise _ApiError(400, "ValidationError", f"no corpus at {body['corpus_ref']!r}")
        try:
            corpus = read_corpus(corpus_path)
            session = Session.create(body["player_id"], corpus, int(body["seed"]),
                                     now_ms=clock())
        except (SessionError, ValueError) as exc:
            raise _ApiError(400, "ValidationError", str(exc))
        session_id = session.state.session_id
        log_path = sessions_dir / f"{session_id}.jsonl"
        with registry_lock:
            index = load_index()
            if session_id not in index:
                ls = _LiveSession(session, log_path,
                                  log_path.with_suffix(".responses.jsonl"))
                ls.persist_new_events(0)
                index[session_id] = {
                    "path": str(log_path.relative_to(data_dir)),
                    "player_id": body["player_id"],
                    "corpus_ref": body["corpus_ref"],
                    "seed": int(body["seed"]),
                }
                save_index(index)
                live[session_id] = ls
            response = {
                "session_id": session_id,
                "seq": live[session_id].session.state.last_seq,
                "state": redact_state(live[session_id].session.state),
            }
            if action_id is not None:
                create_responses[action_id] = response
                with open(creates_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"action_id": action_id, "response": response},
                                        ensure_ascii=False, separators=(",", ":")))
                    fh.write("\n")
        return JSONResponse(status_code=201, content=response)

    @app.get("/api/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        ls = get_session(session_id)
        with ls.lock:
            known = len(ls.session.events)
            ls.session.check_time(clock())
            ls.persist_new_events(known)
            return {"seq": ls.session.state.last_seq,
                    "state": redact_state(ls.session.state)}

    @app.post("/api/sessions/{session_id}/actions")
    async def post_action(session_id: str, request: Request):
        body = await request.json()
        ls = get_session(session_id)
        action_id = body.get("action_id")
        with ls.lock:
            if action_id is not None and action_id in ls.responses:
                return ls.responses[action_id]
            if "seq_expected" not in body or "type" not in body:
                raise _ApiError(400, "ValidationError",
                                "action needs 'type' and 'seq_expected'")
            current = ls.session.state.last_seq
            if body["seq_expected"] != current:
                raise _ApiError(409, "StaleSeq",
                                f"expected seq {body['seq_expected']}, server at {current}",
                                seq=current)
            known = len(ls.session.events)
            now = clock()
            try:
                result = _apply_action(ls.session, body, now)
            except SessionError as exc:
                ls.persist_new_events(known)  # lazy timer events still count
                raise _ApiError(400, "ValidationError", str(exc),
                                seq=ls.session.state.last_seq)
            except (ValueError, KeyError, TypeError) as exc:
                ls.persist_new_events(known)
                raise _ApiError(400, "ValidationError", str(exc),
                                seq=ls.session.state.last_seq)
            ls.persist_new_events(known)
            response = {
                "seq": ls.session.state.last_seq,
                "result": result,
                "state": redact_state(ls.session.state),
            }
            ls.remember(action_id, response)
            return response

    @app.get("/api/sessions/{session_id}/report")
    def get_report(session_id: str) -> dict:
        ls = get_session(session_id)
        with ls.lock:
            return build_record(ls.session.events).to_dict()

    @app.post("/api/reports/cohort")
    async def cohort_report(request: Request):
        body = await request.json()
        ids = body.get("session_ids")
        if not isinstance(ids, list) or not ids:
            raise _ApiError(400, "ValidationError", "session_ids must be a non-empty list")
        records = []
        for sid in ids:
            ls = get_session(sid)
            with ls.lock:
                records.append(build_record(ls.session.events))
        try:
            report = test_hypotheses(records, alpha=body.get("alpha", 0.05))
        except InsufficientData as exc:
            raise _ApiError(400, "ValidationError", str(exc))
        return report.to_dict()

    return app


def _apply_action(session: Session, body: dict, now: int) -> dict:
    """Dispatch one client action; returns the action-specific result."""
    kind = body["type"]
    if kind == "tick":
        session.check_time(now)
        return {"type": "tick"}
    if kind == "tutorial-next":
        step = session.tutorial_next(now)
        return {"type": "tutorial-next", "step": step}
    if kind == "quiz-submit":
        session.submit_quiz(body["answers"], now)
        return {"type": "quiz-submit"}
    if kind == "questionnaire-submit":
        session.submit_questionnaire(body["questionnaire"], body["responses"], now)
        return {"type": "questionnaire-submit"}
    if kind == "advance-stage":
        stage = session.start_next_stage(now)
        return {"type": "advance-stage", "stage": stage}
    if kind == "aim":
        text = session.aim(body["index"], now)
        return {"type": "aim", "display_text": text}
    if kind == "help":
        hint = session.request_help(body["index"], now)
        return {"type": "help", "hint": hint}
    if kind == "act":
        res = session.act(body["index"], body["action"], now)
        feedback = None
        if res.feedback is not None:
            feedback = {
                "item_id": res.feedback.item_id,
                "fact": res.feedback.fact,
                "advice": [[t.value, text] for t, text in res.feedback.advice],
            }
        return {"type": "act", "outcome": res.outcome, "feedback": feedback}
    if kind == "review-answer":
        session.submit_review_answer(body["item_id"], body["tags"], now)
        return {"type": "review-answer"}
    raise ValueError(f"unknown action type {kind!r}")
