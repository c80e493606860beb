"""Event-sourced game session: tutorial, quiz, three stages, review.

One session is a strictly serialized state machine.  Every mutation is an
appended :class:`SessionEvent`; :func:`replay` folds the log back into a
:class:`SessionState` that equals the live one field for field, which is
what the ``verify`` CLI command and the durability tests lean on.

Stage parameters (balloon counts, real/fake split, repeats from the
previous stage, 150/225/300 second budgets, 3 lives, +5/-1 scoring) are
fixed constants; they are asserted verbatim by the acceptance suite.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .corpus import explain, item_from_dict, item_to_dict
from .model import PhishItem, TrickTag, item_digest
from .rng import SplitMix64, derive_seed

EVENT_SCHEMA_VERSION = 1

POINTS_CORRECT = 5
POINTS_WRONG = -1

PER_BALLOON_MS = 15_000


@dataclass(frozen=True)
class StageConfig:
    stage: str
    balloon_count: int
    real_count: int
    fake_count: int
    repeated_from_previous: int
    total_seconds: int
    per_balloon_seconds: int = 15
    lives: int = 3
    points_correct: int = POINTS_CORRECT
    points_wrong: int = POINTS_WRONG

    def __post_init__(self) -> None:
        assert self.real_count + self.fake_count == self.balloon_count
        assert self.repeated_from_previous <= self.fake_count


STAGES: tuple[str, ...] = ("easy", "medium", "advance")

STAGE_CONFIGS: dict[str, StageConfig] = {
    "easy": StageConfig("easy", 10, 7, 3, 0, 150),
    "medium": StageConfig("medium", 15, 8, 7, 3, 225),
    "advance": StageConfig("advance", 20, 10, 10, 4, 300),
}

QUIZ_TAG_ITEMS = 4     # conceptual: identify the tricks
QUIZ_VERDICT_FAKES = 3  # procedural: verdict only
QUIZ_VERDICT_REALS = 3


# ---------------------------------------------------------------------------
# errors


class SessionError(Exception):
    pass


class InsufficientCorpus(SessionError):
    pass


class WrongPhase(SessionError):
    pass


class WrongBalloon(SessionError):
    pass


class BalloonAlreadyResolved(SessionError):
    pass


class NotRevealed(SessionError):
    pass


class StageNotActive(SessionError):
    pass


class IncompleteResponses(SessionError):
    pass


class GapInLog(SessionError):
    pass


class UnknownEventKind(SessionError):
    pass


# ---------------------------------------------------------------------------
# events


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    t_ms: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"v": EVENT_SCHEMA_VERSION, "seq": self.seq, "t": self.t_ms,
                "kind": self.kind, "payload": self.payload}

    @classmethod
    def from_dict(cls, d: dict) -> "SessionEvent":
        return cls(seq=d["seq"], t_ms=d["t"], kind=d["kind"], payload=d["payload"])


EVENT_KINDS = (
    "SessionCreated", "TutorialStep", "QuizAnswer", "StageStarted",
    "BalloonPresented", "Aimed", "HelpRequested", "Shot", "Skipped",
    "BalloonTimedOut", "FeedbackShown", "StageEnded", "ReviewAnswer",
    "QuestionnaireSubmitted",
)


# ---------------------------------------------------------------------------
# tutorial walkthrough (fixed, non-skippable; stands in for the demo video)

_TUTORIAL_INTRO = (
    "Welcome! Balloons drift up the screen; each carries a URL or an email. "
    "Aim at a balloon to reveal its text, then SHOOT it if it is genuine or "
    "SKIP it if it is deceptive. Jerry's help button points you at the part "
    "of the address worth a second look. Watch these examples first."
)

_TUTORIAL_EXAMPLES: tuple[tuple[str, str, str], ...] = (
    ("A genuine address",
     "https://www.paypal.com/signin",
     "Scheme https, registered domain paypal.com, a normal path. Every part belongs to the brand."),
    ("Raw IP address host",
     "https://84.23.110.7/signin",
     "The host is numbers, not a name. Genuine brand pages live under a registered domain."),
    ("Username trick",
     "http://paypal.com@session-checkpoint.com/signin",
     "Everything before '@' is a username. This address really leads to session-checkpoint.com."),
    ("One letter off",
     "https://www.paypa1.com/signin",
     "Read the domain letter by letter: that is a digit one, not an L."),
    ("Look-alike characters",
     "https://www.g00gle.com/ServiceLogin",
     "Zeros imitating o's. Compare each character with the genuine spelling."),
    ("Brand as subdomain",
     "https://paypal.com.secure-login-portal.com/signin",
     "The registered domain is the last two labels: secure-login-portal.com. The brand name in front is bait."),
    ("Hyphenated brand",
     "https://www.paypal-support.com/signin",
     "Containing the brand name is not being the brand. The registered domain is paypal-support.com."),
    ("Wrong ending",
     "https://www.paypal.org/signin",
     "Right name, wrong top-level domain. The ending is part of the identity."),
    ("No encryption",
     "http://www.paypal.com/signin",
     "Plain http: the connection is not encrypted. Sign-in pages use https."),
    ("Link text vs destination",
     "Email: the link says paypal.com but points to billing-update-desk.net",
     "Hover before you click: the visible text and the real destination can differ."),
    ("Reply-to mismatch",
     "Email: from service@paypal.com, replies go to support@customer-care-online.com",
     "Replies would go to a different domain than the sender's."),
    ("Urgent language",
     "Email subject: 'URGENT: verify your account within 24 hours'",
     "Pressure is a lure. Slow down and verify through the official site."),
)


def tutorial_steps() -> list[dict]:
    steps = [{"title": "How to play", "example": "", "caption": _TUTORIAL_INTRO}]
    steps += [
        {"title": title, "example": example, "caption": caption}
        for title, example, caption in _TUTORIAL_EXAMPLES
    ]
    return steps


# ---------------------------------------------------------------------------
# Jerry's hints: name the component to inspect, never the verdict

HINTS: dict[TrickTag, str] = {
    TrickTag.IP_ADDRESS_HOST: "Look closely at the host: is it a name or just numbers?",
    TrickTag.USERINFO_DECEPTION: "Check what comes right before any '@' sign in the address.",
    TrickTag.TYPOSQUAT: "Spell out the registered domain letter by letter.",
    TrickTag.HOMOGLYPH_SUBSTITUTION: "Compare each character of the domain with how the brand really spells it.",
    TrickTag.DECEPTIVE_SUBDOMAIN: "Find the registered domain — the last labels of the host — and ignore what comes before it.",
    TrickTag.HYPHENATED_BRAND: "Ask whether the whole registered domain is the brand's, or merely contains its name.",
    TrickTag.WRONG_TLD: "Check the ending of the domain, not just the name.",
    TrickTag.NO_HTTPS: "Look at the very beginning of the address: how does it start?",
    TrickTag.LINK_TEXT_MISMATCH: "Compare the text of the link with the address it actually points to.",
    TrickTag.REPLY_TO_MISMATCH: "Compare the sender's domain with the reply-to domain.",
    TrickTag.URGENT_LANGUAGE: "Notice the tone: is the message rushing you?",
}

GENERIC_HINT = (
    "Walk through the parts: scheme, registered domain, path, sender. "
    "Does each one belong to the brand?"
)


def hint_for(item: PhishItem) -> str:
    if item.tricks:
        return HINTS[item.tricks[0]]
    return GENERIC_HINT


# ---------------------------------------------------------------------------
# fixture: plans + quiz, pre-drawn at creation


@dataclass(frozen=True)
class PlanEntry:
    index: int
    item: PhishItem
    is_repeat: bool


@dataclass(frozen=True)
class StagePlan:
    stage: str
    entries: tuple[PlanEntry, ...]
    seed: int


@dataclass(frozen=True)
class QuizItem:
    item: PhishItem
    mode: str  # "verdict" | "tags"


@dataclass(frozen=True)
class SessionFixture:
    plans: dict[str, StagePlan]
    quiz: tuple[QuizItem, ...]
    tutorial: tuple[dict, ...]

    def plan_item(self, stage: str, index: int) -> PhishItem:
        return self.plans[stage].entries[index].item

    def stage_fake_ids(self, stage: str) -> set[str]:
        return {e.item.item_id for e in self.plans[stage].entries if not e.item.legitimate}

    def encountered_fakes(self, stages_played: Sequence[str]) -> list[PhishItem]:
        seen: dict[str, PhishItem] = {}
        for stage in stages_played:
            for e in self.plans[stage].entries:
                if not e.item.legitimate and e.item.item_id not in seen:
                    seen[e.item.item_id] = e.item
        return list(seen.values())


def required_corpus_counts() -> tuple[int, int]:
    """(distinct legitimate, distinct fake) items a session consumes."""
    reals = sum(c.real_count for c in STAGE_CONFIGS.values()) + QUIZ_VERDICT_REALS
    fakes = (
        STAGE_CONFIGS["easy"].fake_count
        + (STAGE_CONFIGS["medium"].fake_count - STAGE_CONFIGS["medium"].repeated_from_previous)
        + (STAGE_CONFIGS["advance"].fake_count - STAGE_CONFIGS["advance"].repeated_from_previous)
        + QUIZ_TAG_ITEMS
        + QUIZ_VERDICT_FAKES
    )
    return reals, fakes


def build_fixture(corpus: Sequence[PhishItem], master_seed: int) -> SessionFixture:
    need_real, need_fake = required_corpus_counts()
    reals = [it for it in corpus if it.legitimate]
    fakes = [it for it in corpus if not it.legitimate]
    if len(reals) < need_real or len(fakes) < need_fake:
        raise InsufficientCorpus(
            f"need >= {need_real} legitimate and >= {need_fake} fake items, "
            f"corpus has {len(reals)} / {len(fakes)}"
        )
    rng = SplitMix64(derive_seed(master_seed, "plans"))
    real_pool = rng.sample(reals, need_real)
    fake_pool = rng.sample(fakes, need_fake)

    def take(pool: list[PhishItem], n: int) -> list[PhishItem]:
        out, pool[:] = pool[:n], pool[n:]
        return out

    easy_fakes = take(fake_pool, STAGE_CONFIGS["easy"].fake_count)
    medium_new = take(
        fake_pool,
        STAGE_CONFIGS["medium"].fake_count - STAGE_CONFIGS["medium"].repeated_from_previous,
    )
    advance_new = take(
        fake_pool,
        STAGE_CONFIGS["advance"].fake_count - STAGE_CONFIGS["advance"].repeated_from_previous,
    )
    medium_repeats = rng.sample(easy_fakes, STAGE_CONFIGS["medium"].repeated_from_previous)
    medium_fakes = medium_new + medium_repeats
    advance_repeats = rng.sample(medium_fakes, STAGE_CONFIGS["advance"].repeated_from_previous)
    advance_fakes = advance_new + advance_repeats

    plans: dict[str, StagePlan] = {}
    repeat_ids = {
        "easy": set(),
        "medium": {it.item_id for it in medium_repeats},
        "advance": {it.item_id for it in advance_repeats},
    }
    stage_fakes = {"easy": easy_fakes, "medium": medium_fakes, "advance": advance_fakes}
    for stage in STAGES:
        cfg = STAGE_CONFIGS[stage]
        stage_reals = take(real_pool, cfg.real_count)
        items = stage_reals + stage_fakes[stage]
        stage_seed = derive_seed(master_seed, "shuffle", stage)
        SplitMix64(stage_seed).shuffle(items)
        entries = tuple(
            PlanEntry(index=i, item=it, is_repeat=it.item_id in repeat_ids[stage])
            for i, it in enumerate(items)
        )
        plans[stage] = StagePlan(stage=stage, entries=entries, seed=stage_seed)

    quiz_tag_items = take(fake_pool, QUIZ_TAG_ITEMS)
    quiz_verdict_fakes = take(fake_pool, QUIZ_VERDICT_FAKES)
    quiz_verdict_reals = take(real_pool, QUIZ_VERDICT_REALS)
    quiz = [QuizItem(it, "tags") for it in quiz_tag_items]
    quiz += [QuizItem(it, "verdict") for it in quiz_verdict_fakes + quiz_verdict_reals]
    SplitMix64(derive_seed(master_seed, "quiz")).shuffle(quiz)
    return SessionFixture(plans=plans, quiz=tuple(quiz), tutorial=tuple(tutorial_steps()))


def fixture_to_dict(fx: SessionFixture) -> dict:
    return {
        "plans": {
            stage: {
                "seed": plan.seed,
                "entries": [
                    [e.index, item_to_dict(e.item), e.is_repeat] for e in plan.entries
                ],
            }
            for stage, plan in fx.plans.items()
        },
        "quiz": [{"mode": q.mode, "item": item_to_dict(q.item)} for q in fx.quiz],
        "tutorial": list(fx.tutorial),
    }


def fixture_from_dict(d: dict) -> SessionFixture:
    plans = {
        stage: StagePlan(
            stage=stage,
            seed=p["seed"],
            entries=tuple(
                PlanEntry(index=i, item=item_from_dict(item_d), is_repeat=rep)
                for i, item_d, rep in p["entries"]
            ),
        )
        for stage, p in d["plans"].items()
    }
    quiz = tuple(QuizItem(item_from_dict(q["item"]), q["mode"]) for q in d["quiz"])
    return SessionFixture(plans=plans, quiz=quiz, tutorial=tuple(d["tutorial"]))


# ---------------------------------------------------------------------------
# state


@dataclass
class BalloonOutcome:
    stage: str
    index: int
    item_id: str
    action: str  # "shoot" | "skip" | "timeout"
    correct: bool
    assisted: bool
    elapsed_ms: int


@dataclass
class SessionState:
    session_id: str = ""
    player_id: str = ""
    master_seed: int = 0
    fixture: Optional[SessionFixture] = None
    phase: str = "tutorial"
    tutorial_step: int = 0
    quiz_answers: dict = field(default_factory=dict)
    stage: Optional[str] = None
    awaiting_advance: bool = False
    balloon_index: int = 0
    lives: int = 0
    stage_scores: dict = field(default_factory=dict)
    stage_started_ms: Optional[int] = None
    balloon_aim_ms: Optional[int] = None
    balloon_assisted: bool = False
    balloon_hint: Optional[str] = None
    outcomes: list = field(default_factory=list)
    help_uses: int = 0
    stages_ended: dict = field(default_factory=dict)
    review_answers: dict = field(default_factory=dict)
    questionnaires: dict = field(default_factory=dict)
    last_feedback: Optional[dict] = None
    last_seq: int = -1

    @property
    def total_score(self) -> int:
        return sum(self.stage_scores.values())

    @property
    def stages_played(self) -> list[str]:
        return [s for s in STAGES if s in self.stages_ended or s == self.stage]

    def stage_deadline_ms(self) -> Optional[int]:
        if self.stage is None or self.stage_started_ms is None:
            return None
        return self.stage_started_ms + STAGE_CONFIGS[self.stage].total_seconds * 1000

    def balloon_deadline_ms(self) -> Optional[int]:
        if self.balloon_aim_ms is None:
            return None
        return self.balloon_aim_ms + PER_BALLOON_MS

    def current_item(self) -> Optional[PhishItem]:
        if self.stage is None or self.fixture is None:
            return None
        plan = self.fixture.plans[self.stage]
        if self.balloon_index >= len(plan.entries):
            return None
        return plan.entries[self.balloon_index].item


# ---------------------------------------------------------------------------
# fold


def apply_event(state: SessionState, event: SessionEvent) -> SessionState:
    """Fold one event into the state (mutates and returns ``state``)."""
    if event.seq != state.last_seq + 1:
        raise GapInLog(f"expected seq {state.last_seq + 1}, got {event.seq}")
    kind, p = event.kind, event.payload
    if kind == "SessionCreated":
        state.session_id = p["session_id"]
        state.player_id = p["player_id"]
        state.master_seed = p["master_seed"]
        state.fixture = fixture_from_dict(p["fixture"])
        state.phase = "tutorial"
    elif kind == "TutorialStep":
        state.tutorial_step = p["step"] + 1
        if state.tutorial_step >= len(state.fixture.tutorial):
            state.phase = "quiz"
    elif kind == "QuizAnswer":
        state.quiz_answers[p["item_id"]] = {"verdict": p["verdict"], "tags": p["tags"]}
    elif kind == "StageStarted":
        cfg = STAGE_CONFIGS[p["stage"]]
        state.phase = p["stage"]
        state.stage = p["stage"]
        state.awaiting_advance = False
        state.balloon_index = 0
        state.lives = cfg.lives
        state.stage_scores[p["stage"]] = 0
        state.stage_started_ms = event.t_ms
        state.balloon_aim_ms = None
        state.balloon_assisted = False
        state.balloon_hint = None
    elif kind == "BalloonPresented":
        state.balloon_index = p["index"]
        state.balloon_aim_ms = None
        state.balloon_assisted = False
        state.balloon_hint = None
    elif kind == "Aimed":
        if state.balloon_aim_ms is None:
            state.balloon_aim_ms = event.t_ms
    elif kind == "HelpRequested":
        if not state.balloon_assisted:
            state.help_uses += 1
        state.balloon_assisted = True
        state.balloon_hint = p["hint"]
    elif kind in ("Shot", "Skipped", "BalloonTimedOut"):
        action = {"Shot": "shoot", "Skipped": "skip", "BalloonTimedOut": "timeout"}[kind]
        correct = p["correct"]
        state.outcomes.append(
            BalloonOutcome(
                stage=state.stage,
                index=p["index"],
                item_id=p["item_id"],
                action=action,
                correct=correct,
                assisted=state.balloon_assisted,
                elapsed_ms=p["elapsed_ms"],
            )
        )
        if kind == "Shot":
            cfg = STAGE_CONFIGS[state.stage]
            if correct:
                state.stage_scores[state.stage] += cfg.points_correct
            else:
                state.stage_scores[state.stage] += cfg.points_wrong
                state.lives = max(0, state.lives - 1)
    elif kind == "FeedbackShown":
        state.last_feedback = dict(p)
    elif kind == "StageEnded":
        state.stages_ended[p["stage"]] = p["reason"]
        state.stage = None
        state.awaiting_advance = True
        state.stage_started_ms = None
        state.balloon_aim_ms = None
    elif kind == "ReviewAnswer":
        state.phase = "review"
        state.awaiting_advance = False
        state.review_answers[p["item_id"]] = list(p["tags"])
    elif kind == "QuestionnaireSubmitted":
        state.questionnaires[p["questionnaire"]] = list(p["responses"])
        if p["questionnaire"] == "post":
            state.phase = "done"
            state.awaiting_advance = False
    else:
        raise UnknownEventKind(kind)
    state.last_seq = event.seq
    return state


def replay(events: Sequence[SessionEvent]) -> SessionState:
    """Rebuild state from a gapless log."""
    state = SessionState()
    for event in events:
        apply_event(state, event)
    return state


# ---------------------------------------------------------------------------
# fact and advice


@dataclass(frozen=True)
class FactAndAdvice:
    item_id: str
    fact: str
    advice: tuple[tuple[TrickTag, str], ...]


def fact_and_advice(item: PhishItem) -> FactAndAdvice:
    advice = tuple(explain(item))
    fact = (
        f"You shot a balloon carrying a fake {item.kind}: {item.display_text} "
        f"It imitates {item.brand.capitalize()} but is not genuine — shooting it "
        "cost you a point and a life."
    )
    return FactAndAdvice(item_id=item.item_id, fact=fact, advice=advice)


# ---------------------------------------------------------------------------
# outcome classification


@dataclass(frozen=True)
class ActResult:
    outcome: str  # correct_shot | wrong_shot | correct_avoidance | missed_real
    feedback: Optional[FactAndAdvice] = None


# ---------------------------------------------------------------------------
# live session


class Session:
    """Single-writer wrapper: validates ops, appends events, folds state."""

    def __init__(self, events: Optional[list[SessionEvent]] = None) -> None:
        self.events: list[SessionEvent] = []
        self.state = SessionState()
        if events:
            for ev in events:
                self.events.append(ev)
                apply_event(self.state, ev)

    # -- construction

    @classmethod
    def create(
        cls,
        player_id: str,
        corpus: Sequence[PhishItem],
        master_seed: int,
        now_ms: int = 0,
    ) -> "Session":
        fixture = build_fixture(corpus, master_seed)
        session_id = item_digest("session", player_id, master_seed,
                                 [it.item_id for it in corpus[:8]], len(corpus))
        session = cls()
        session._append(
            now_ms,
            "SessionCreated",
            {
                "v": EVENT_SCHEMA_VERSION,
                "session_id": session_id,
                "player_id": player_id,
                "master_seed": master_seed,
                "fixture": fixture_to_dict(fixture),
            },
        )
        return session

    def _append(self, now_ms: int, kind: str, payload: dict) -> SessionEvent:
        event = SessionEvent(seq=self.state.last_seq + 1, t_ms=now_ms, kind=kind, payload=payload)
        self.events.append(event)
        apply_event(self.state, event)
        return event

    # -- tutorial & quiz

    def tutorial_next(self, now_ms: int) -> dict:
        """Advance the non-skippable walkthrough; returns the step just shown."""
        st = self.state
        if st.phase != "tutorial":
            raise WrongPhase(f"tutorial is over (phase={st.phase})")
        step = st.tutorial_step
        content = st.fixture.tutorial[step]
        self._append(now_ms, "TutorialStep", {"step": step})
        return {"step": step, "total": len(st.fixture.tutorial), **content}

    def submit_quiz(self, answers: dict, now_ms: int) -> None:
        """answers: item_id -> {"verdict": "legitimate"|"phishing", "tags": [...]}.

        One answer per quiz item; completing the quiz starts the easy stage.
        """
        st = self.state
        if st.phase != "quiz":
            raise WrongPhase(f"quiz not active (phase={st.phase})")
        want = {q.item.item_id for q in st.fixture.quiz}
        if set(answers) != want:
            raise IncompleteResponses("quiz answers must cover exactly the quiz items")
        for q in st.fixture.quiz:
            a = answers[q.item.item_id]
            self._append(
                now_ms,
                "QuizAnswer",
                {"item_id": q.item.item_id, "verdict": a["verdict"],
                 "tags": list(a.get("tags", []))},
            )
        self._start_stage("easy", now_ms)

    # -- stages

    def _start_stage(self, stage: str, now_ms: int) -> None:
        self._append(now_ms, "StageStarted", {"stage": stage})
        first = self.state.fixture.plans[stage].entries[0]
        self._append(now_ms, "BalloonPresented",
                     {"stage": stage, "index": 0, "item_id": first.item.item_id})

    def start_next_stage(self, now_ms: int) -> str:
        """Voluntarily opt into the next stage after the previous one ended."""
        st = self.state
        if not st.awaiting_advance:
            raise WrongPhase("no stage awaiting advancement")
        played = [s for s in STAGES if s in st.stages_ended]
        if len(played) >= len(STAGES):
            raise WrongPhase("all stages played; proceed to review")
        nxt = STAGES[len(played)]
        self._start_stage(nxt, now_ms)
        return nxt

    def check_time(self, now_ms: int) -> list[SessionEvent]:
        """Apply authoritative timer expiries; returns any appended events."""
        st = self.state
        appended: list[SessionEvent] = []
        if st.stage is None:
            return appended
        deadline = st.stage_deadline_ms()
        bdl = st.balloon_deadline_ms()
        if bdl is not None and now_ms >= bdl and (deadline is None or bdl <= deadline):
            item = st.current_item()
            appended.append(self._resolve(item, "BalloonTimedOut", bdl, now_ms))
            appended.extend(self._advance_or_end(now_ms))
            if st.stage is None:
                return appended
        if deadline is not None and now_ms >= deadline:
            appended.append(self._end_stage("time", now_ms))
        return appended

    def _require_current_balloon(self, index: int) -> PhishItem:
        st = self.state
        if st.stage is None:
            raise StageNotActive(f"no stage active (phase={st.phase})")
        plan = st.fixture.plans[st.stage]
        if index < 0 or index >= len(plan.entries):
            raise WrongBalloon(f"no balloon {index} in stage {st.stage}")
        if index < st.balloon_index:
            raise BalloonAlreadyResolved(f"balloon {index} already resolved")
        if index > st.balloon_index:
            raise WrongBalloon(f"balloon {index} is not current (current={st.balloon_index})")
        return plan.entries[index].item

    def aim(self, index: int, now_ms: int) -> str:
        """Reveal the current balloon's payload; starts its 15 s window."""
        self.check_time(now_ms)
        item = self._require_current_balloon(index)
        self._append(now_ms, "Aimed",
                     {"stage": self.state.stage, "index": index, "item_id": item.item_id,
                      "repeat_aim": self.state.balloon_aim_ms is not None})
        return item.display_text

    def request_help(self, index: int, now_ms: int) -> str:
        """Jerry's hint: names the component to inspect, never the verdict."""
        self.check_time(now_ms)
        item = self._require_current_balloon(index)
        st = self.state
        if st.balloon_aim_ms is None:
            raise NotRevealed("aim at the balloon before asking for help")
        if st.balloon_assisted:
            return st.balloon_hint
        hint = hint_for(item)
        self._append(now_ms, "HelpRequested",
                     {"stage": st.stage, "index": index, "item_id": item.item_id, "hint": hint})
        return hint

    def _resolve(self, item: PhishItem, kind: str, t_ms: int, now_ms: int) -> SessionEvent:
        st = self.state
        if kind == "Shot":
            correct = item.legitimate
        else:  # Skipped / BalloonTimedOut count as avoidance
            correct = not item.legitimate
        elapsed = (t_ms - st.balloon_aim_ms) if st.balloon_aim_ms is not None else 0
        return self._append(
            t_ms, kind,
            {"stage": st.stage, "index": st.balloon_index, "item_id": item.item_id,
             "correct": correct, "elapsed_ms": elapsed},
        )

    def _end_stage(self, reason: str, now_ms: int) -> SessionEvent:
        st = self.state
        return self._append(
            now_ms, "StageEnded",
            {"stage": st.stage, "reason": reason,
             "score": st.stage_scores[st.stage], "lives": st.lives},
        )

    def _advance_or_end(self, now_ms: int) -> list[SessionEvent]:
        st = self.state
        appended: list[SessionEvent] = []
        cfg = STAGE_CONFIGS[st.stage]
        if st.lives <= 0:
            appended.append(self._end_stage("lives", now_ms))
        elif st.balloon_index + 1 >= cfg.balloon_count:
            appended.append(self._end_stage("completed", now_ms))
        else:
            nxt = st.fixture.plans[st.stage].entries[st.balloon_index + 1]
            appended.append(
                self._append(now_ms, "BalloonPresented",
                             {"stage": st.stage, "index": nxt.index, "item_id": nxt.item.item_id})
            )
        return appended

    def act(self, index: int, action: str, now_ms: int) -> ActResult:
        """Shoot or skip the current, revealed balloon."""
        if action not in ("shoot", "skip"):
            raise ValueError(f"unknown action {action!r}")
        self.check_time(now_ms)
        item = self._require_current_balloon(index)
        st = self.state
        if st.balloon_aim_ms is None:
            raise NotRevealed("aim at the balloon before acting")
        if action == "shoot":
            self._resolve(item, "Shot", now_ms, now_ms)
            feedback = None
            if not item.legitimate:
                fa = fact_and_advice(item)
                self._append(
                    now_ms, "FeedbackShown",
                    {"stage": st.stage, "index": index, "item_id": item.item_id,
                     "fact": fa.fact,
                     "advice": [[t.value, text] for t, text in fa.advice]},
                )
                feedback = fa
            self._advance_or_end(now_ms)
            return ActResult("correct_shot" if item.legitimate else "wrong_shot", feedback)
        self._resolve(item, "Skipped", now_ms, now_ms)
        self._advance_or_end(now_ms)
        return ActResult("correct_avoidance" if not item.legitimate else "missed_real")

    # -- review & questionnaires

    def submit_review_answer(self, item_id: str, tags: Sequence[str], now_ms: int) -> None:
        st = self.state
        if st.stage is not None or not st.stages_ended:
            raise WrongPhase("review opens after a stage has ended")
        if st.phase == "done":
            raise WrongPhase("session is over")
        encountered = {it.item_id for it in
                       st.fixture.encountered_fakes(list(st.stages_ended))}
        if item_id not in encountered:
            raise WrongBalloon(f"item {item_id} was not an encountered fake")
        valid = {t.value for t in TrickTag}
        if not set(tags) <= valid:
            raise ValueError("unknown trick tag in review answer")
        self._append(now_ms, "ReviewAnswer", {"item_id": item_id, "tags": list(tags)})

    def submit_questionnaire(self, questionnaire: str, responses: Sequence[int], now_ms: int) -> None:
        st = self.state
        if questionnaire not in ("pre", "post", "motivation"):
            raise ValueError(f"unknown questionnaire {questionnaire!r}")
        n_expected = 3 if questionnaire == "motivation" else 10
        if len(responses) != n_expected or any(not (1 <= r <= 5) for r in responses):
            raise IncompleteResponses(
                f"{questionnaire} questionnaire needs {n_expected} ratings in 1..5"
            )
        if questionnaire == "pre" and st.phase not in ("tutorial", "quiz"):
            raise WrongPhase("pre-session questionnaire must precede the stages")
        if questionnaire in ("post", "motivation") and (st.stage is not None or not st.stages_ended):
            raise WrongPhase("post-session questionnaires follow the stages")
        self._append(now_ms, "QuestionnaireSubmitted",
                     {"questionnaire": questionnaire, "responses": list(responses)})


# ---------------------------------------------------------------------------
# log verification


@dataclass(frozen=True)
class VerificationFailure:
    seq: int
    reason: str


def verify_log(events: Sequence[SessionEvent]) -> list[VerificationFailure]:
    """Replay a log and recompute ground truth, scores and lives.

    Returns an empty list for an untampered log; otherwise the seq of the
    first divergence per check.
    """
    failures: list[VerificationFailure] = []
    state = SessionState()
    fixture: Optional[SessionFixture] = None
    score: dict[str, int] = {}
    wrong: dict[str, int] = {}
    for event in events:
        try:
            apply_event(state, event)
        except SessionError as exc:
            failures.append(VerificationFailure(event.seq, str(exc)))
            return failures
        if event.kind == "SessionCreated":
            fixture = state.fixture
        elif event.kind in ("Shot", "Skipped", "BalloonTimedOut") and fixture is not None:
            p = event.payload
            item = fixture.plan_item(p["stage"], p["index"])
            if item.item_id != p["item_id"]:
                failures.append(VerificationFailure(event.seq, "item id differs from plan"))
                continue
            expected = item.legitimate if event.kind == "Shot" else not item.legitimate
            if p["correct"] != expected:
                failures.append(
                    VerificationFailure(event.seq, "correctness flag contradicts ground truth")
                )
            if event.kind == "Shot":
                stage = p["stage"]
                score[stage] = score.get(stage, 0) + (
                    POINTS_CORRECT if expected else POINTS_WRONG
                )
                if not expected:
                    wrong[stage] = wrong.get(stage, 0) + 1
        elif event.kind == "StageEnded":
            p = event.payload
            stage = p["stage"]
            want_score = score.get(stage, 0)
            want_lives = max(0, STAGE_CONFIGS[stage].lives - wrong.get(stage, 0))
            if p["score"] != want_score:
                failures.append(
                    VerificationFailure(event.seq,
                                        f"stage score {p['score']} != recomputed {want_score}")
                )
            if p["lives"] != want_lives:
                failures.append(
                    VerificationFailure(event.seq,
                                        f"lives {p['lives']} != recomputed {want_lives}")
                )
    return failures


# ---------------------------------------------------------------------------
# event log file format (JSONL, schema v1)


def write_events(events: Sequence[SessionEvent], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ev in events:
            fh.write(json.dumps(ev.to_dict(), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def append_event(event: SessionEvent, path) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(event.to_dict(), ensure_ascii=False, separators=(",", ":")))
        fh.write("\n")


class EventLogFormatError(ValueError):
    def __init__(self, message: str, line_no: int) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def read_events(path) -> list[SessionEvent]:
    events: list[SessionEvent] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EventLogFormatError(f"invalid JSON: {exc}", line_no) from exc
            if d.get("v") != EVENT_SCHEMA_VERSION:
                raise EventLogFormatError(f"unsupported schema version {d.get('v')!r}", line_no)
            if d.get("kind") not in EVENT_KINDS:
                raise EventLogFormatError(f"unknown event kind {d.get('kind')!r}", line_no)
            events.append(SessionEvent.from_dict(d))
    return events
