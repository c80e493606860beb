"""Shared test utilities: fake clock, HTTP session driver, response scanning."""

from __future__ import annotations

from typing import Optional


class FakeClock:
    """Injectable millisecond clock; tests set ``value`` explicitly."""

    def __init__(self, value: int = 0) -> None:
        self.value = value

    def __call__(self) -> int:
        return self.value


def scan_for_truth_leaks(obj, path: str = "") -> list[str]:
    """Paths of any `legitimate`/`tricks` keys anywhere in a JSON response."""
    leaks: list[str] = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k in ("legitimate", "tricks"):
                leaks.append(f"{path}/{k}")
            leaks.extend(scan_for_truth_leaks(v, f"{path}/{k}"))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            leaks.extend(scan_for_truth_leaks(v, f"{path}[{i}]"))
    return leaks


class HttpDriver:
    """SessionDriver implementation speaking the JSON protocol over a client.

    Mirrors InProcessDriver operation for operation so the same bot code
    (and therefore RNG draw order) runs over HTTP; optionally records every
    response for redaction scanning.
    """

    def __init__(self, client, clock: FakeClock, player_id: str,
                 corpus_ref: str, seed: int,
                 record_responses: Optional[list] = None) -> None:
        self.client = client
        self.clock = clock
        self.responses = record_responses
        self._n = 0
        clock.value = 0
        r = client.post("/api/sessions", json={
            "player_id": player_id, "corpus_ref": corpus_ref,
            "seed": seed, "action_id": f"create-{player_id}-{seed}",
        })
        assert r.status_code == 201, r.text
        d = r.json()
        self._record(d)
        self.session_id = d["session_id"]
        self.seq = d["seq"]
        self.state = d["state"]

    def _next_action_id(self) -> str:
        self._n += 1
        return f"act-{self._n}"

    def _record(self, d) -> None:
        if self.responses is not None:
            self.responses.append(d)

    def _post(self, t: int, **payload) -> dict:
        self.clock.value = t
        r = self.client.post(
            f"/api/sessions/{self.session_id}/actions",
            json={"action_id": self._next_action_id(),
                  "seq_expected": self.seq, **payload},
        )
        assert r.status_code == 200, r.text
        d = r.json()
        self._record(d)
        self.seq = d["seq"]
        self.state = d["state"]
        return d["result"]

    # -- SessionDriver surface

    def phase(self) -> str:
        return self.state["phase"]

    def tutorial_next(self, t: int) -> None:
        self._post(t, type="tutorial-next")

    def quiz_items(self):
        return [(q["item_id"], q["mode"]) for q in self.state["quiz"]]

    def submit_quiz(self, answers: dict, t: int) -> None:
        self._post(t, type="quiz-submit", answers=answers)

    def submit_questionnaire(self, name: str, responses: list, t: int) -> None:
        self._post(t, type="questionnaire-submit",
                   questionnaire=name, responses=responses)

    def stage_view(self):
        stage = self.state["stage"]
        done = len(self.state["stages_ended"])
        if stage is None:
            return None, 0, None, done
        return (stage["name"], stage["balloon_index"],
                stage["balloon"]["item_id"], done)

    def start_next_stage(self, t: int) -> None:
        self._post(t, type="advance-stage")

    def aim(self, index: int, t: int) -> None:
        self._post(t, type="aim", index=index)

    def tick(self, t: int) -> None:
        self._post(t, type="tick")

    def request_help(self, index: int, t: int) -> None:
        self._post(t, type="help", index=index)

    def act(self, index: int, action: str, t: int) -> str:
        return self._post(t, type="act", index=index, action=action)["outcome"]

    def review_item_ids(self):
        return [it["item_id"] for it in self.state["review"]["items"]]

    def submit_review_answer(self, item_id: str, tags: list, t: int) -> None:
        self._post(t, type="review-answer", item_id=item_id, tags=tags)
