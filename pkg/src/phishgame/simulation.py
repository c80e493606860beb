"""Simulated players driving real sessions through the real engine.

Bots decide from ground truth perturbed by Bernoulli noise; they never
call the heuristic classifier, so the measurement pipeline and the oracle
stay independent and cannot cancel each other's bugs out.  A bot run is a
pure function of (profile, corpus, master seed).

The play loop is written against a small driver interface so the very
same bot — same RNG draw order, same timeline — can run either against an
in-process :class:`~phishgame.session.Session` or over the HTTP API; the
transport-equivalence test compares the two reports field for field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

from .assessment import AssessmentRecord, build_record
from .model import PhishItem, TrickTag
from .rng import SplitMix64, derive_seed
from .session import Session, SessionEvent, SessionState

COHORT_SCHEMA_VERSION = 1

_ALL_TAGS = [t.value for t in TrickTag]


@dataclass(frozen=True)
class BotProfile:
    """Parameterized knowledge traits of one synthetic player.

    ``hesitation`` is the probability of dawdling past the balloon timer
    when unsure of an item; it defaults to 0 so the canonical perfect-play
    and worst-case traces stay deterministic.
    """

    player_id: str
    base_accuracy: float
    memory: bool
    learning_rate: float
    help_propensity: float
    rng_seed: int
    hesitation: float = 0.0

    def __post_init__(self) -> None:
        for name in ("base_accuracy", "learning_rate", "help_propensity", "hesitation"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} out of [0, 1]")

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "base_accuracy": self.base_accuracy,
            "memory": self.memory,
            "learning_rate": self.learning_rate,
            "help_propensity": self.help_propensity,
            "rng_seed": self.rng_seed,
            "hesitation": self.hesitation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BotProfile":
        return cls(
            player_id=d["player_id"],
            base_accuracy=d["base_accuracy"],
            memory=d["memory"],
            learning_rate=d["learning_rate"],
            help_propensity=d["help_propensity"],
            rng_seed=d["rng_seed"],
            hesitation=d.get("hesitation", 0.0),
        )


# ---------------------------------------------------------------------------
# driver interface: what the bot needs to see and do


class SessionDriver(Protocol):
    """Minimal, redaction-compatible view of a running session.

    Every method mirrors one player-visible operation; ground truth never
    crosses this boundary (the bot looks items up in its own corpus copy).
    """

    def phase(self) -> str: ...
    def tutorial_next(self, t: int) -> None: ...
    def quiz_items(self) -> list[tuple[str, str]]: ...
    def submit_quiz(self, answers: dict, t: int) -> None: ...
    def submit_questionnaire(self, name: str, responses: list[int], t: int) -> None: ...
    def stage_view(self) -> tuple[Optional[str], int, Optional[str], int]: ...
    def start_next_stage(self, t: int) -> None: ...
    def aim(self, index: int, t: int) -> None: ...
    def tick(self, t: int) -> None: ...
    def request_help(self, index: int, t: int) -> None: ...
    def act(self, index: int, action: str, t: int) -> str: ...
    def review_item_ids(self) -> list[str]: ...
    def submit_review_answer(self, item_id: str, tags: list[str], t: int) -> None: ...


class InProcessDriver:
    """Drives a live :class:`Session` object directly."""

    def __init__(self, corpus: Sequence[PhishItem], player_id: str, master_seed: int) -> None:
        self.session = Session.create(player_id, corpus, master_seed, now_ms=0)

    def phase(self) -> str:
        return self.session.state.phase

    def tutorial_next(self, t: int) -> None:
        self.session.tutorial_next(t)

    def quiz_items(self) -> list[tuple[str, str]]:
        return [(q.item.item_id, q.mode) for q in self.session.state.fixture.quiz]

    def submit_quiz(self, answers: dict, t: int) -> None:
        self.session.submit_quiz(answers, t)

    def submit_questionnaire(self, name: str, responses: list[int], t: int) -> None:
        self.session.submit_questionnaire(name, responses, t)

    def stage_view(self) -> tuple[Optional[str], int, Optional[str], int]:
        st = self.session.state
        item = st.current_item()
        return (st.stage, st.balloon_index,
                item.item_id if item else None, len(st.stages_ended))

    def start_next_stage(self, t: int) -> None:
        self.session.start_next_stage(t)

    def aim(self, index: int, t: int) -> None:
        self.session.aim(index, t)

    def tick(self, t: int) -> None:
        self.session.check_time(t)

    def request_help(self, index: int, t: int) -> None:
        self.session.request_help(index, t)

    def act(self, index: int, action: str, t: int) -> str:
        return self.session.act(index, action, t).outcome

    def review_item_ids(self) -> list[str]:
        st = self.session.state
        return [it.item_id for it in st.fixture.encountered_fakes(list(st.stages_ended))]

    def submit_review_answer(self, item_id: str, tags: list[str], t: int) -> None:
        self.session.submit_review_answer(item_id, tags, t)


# ---------------------------------------------------------------------------
# the bot


class _Bot:
    def __init__(self, profile: BotProfile, master_seed: int) -> None:
        self.profile = profile
        self.rng = SplitMix64(derive_seed(master_seed, "bot", profile.rng_seed))
        self.memory: dict[str, bool] = {}
        self.seen_tricks: set[TrickTag] = set()

    def _effective_accuracy(self, item: PhishItem) -> float:
        boost = self.profile.learning_rate if set(item.tricks) & self.seen_tricks else 0.0
        return min(1.0, self.profile.base_accuracy + boost)

    def knows(self, item: PhishItem) -> bool:
        return self.rng.random() < self._effective_accuracy(item)

    def believed_legitimate(self, item: PhishItem) -> bool:
        if self.profile.memory and item.item_id in self.memory:
            return self.memory[item.item_id]
        return item.legitimate if self.knows(item) else not item.legitimate

    def learn_from_outcome(self, item: PhishItem, action: str) -> None:
        # a shot reveals the truth via scoring and feedback; a skip reveals nothing
        if action != "shoot":
            return
        if self.profile.memory:
            self.memory[item.item_id] = item.legitimate
        if not item.legitimate:
            self.seen_tricks |= set(item.tricks)

    def wrong_tag_for(self, item: PhishItem) -> str:
        truth = {tag.value for tag in item.tricks}
        return self.rng.choice([v for v in _ALL_TAGS if v not in truth])

    def rating(self, confidence: float) -> int:
        noisy = confidence + (self.rng.random() - 0.5) * 0.25
        return max(1, min(5, round(1 + 4 * noisy)))

    def ratings(self, confidence: float, n: int) -> list[int]:
        return [self.rating(confidence) for _ in range(n)]


def drive_session(
    profile: BotProfile,
    items_by_id: dict[str, PhishItem],
    driver: SessionDriver,
    master_seed: int,
) -> None:
    """Play one full session through ``driver``: tutorial, quiz, stages, review."""
    bot = _Bot(profile, master_seed)
    t = 1_000

    driver.submit_questionnaire("pre", bot.ratings(profile.base_accuracy, 10), t)
    while driver.phase() == "tutorial":
        driver.tutorial_next(t)
        t += 1_500

    answers = {}
    for item_id, _mode in driver.quiz_items():
        item = items_by_id[item_id]
        if bot.knows(item):
            verdict = "legitimate" if item.legitimate else "phishing"
            tags = [tag.value for tag in item.tricks]
        else:
            verdict = "phishing" if item.legitimate else "legitimate"
            tags = [] if item.legitimate else [bot.wrong_tag_for(item)]
        answers[item_id] = {"verdict": verdict, "tags": tags}
    driver.submit_quiz(answers, t)
    t += 1_000

    while True:
        stage, index, item_id, stages_done = driver.stage_view()
        if stage is None:
            if stages_done < 3:
                driver.start_next_stage(t)
                t += 1_000
                continue
            break
        item = items_by_id[item_id]
        driver.aim(index, t)
        t += 1_000
        sure = profile.memory and item.item_id in bot.memory
        if not sure and bot.rng.random() < profile.hesitation:
            t += 16_000  # past the balloon window; the server times the balloon out
            driver.tick(t)
            continue
        if bot.rng.random() < profile.help_propensity:
            driver.request_help(index, t)
            t += 1_000
        action = "shoot" if bot.believed_legitimate(item) else "skip"
        driver.act(index, action, t)
        t += 2_000
        bot.learn_from_outcome(item, action)

    for item_id in driver.review_item_ids():
        item = items_by_id[item_id]
        if bot.knows(item):
            tags = [tag.value for tag in item.tricks]
        else:
            tags = [bot.wrong_tag_for(item)]
        driver.submit_review_answer(item_id, tags, t)
        t += 500

    learned = len(bot.seen_tricks) / len(TrickTag)
    post_conf = min(1.0, profile.base_accuracy + profile.learning_rate * learned)
    driver.submit_questionnaire("motivation", bot.ratings(post_conf, 3), t)
    driver.submit_questionnaire("post", bot.ratings(post_conf, 10), t)


def run_bot(
    profile: BotProfile, corpus: Sequence[PhishItem], master_seed: int
) -> tuple[SessionState, list[SessionEvent], AssessmentRecord]:
    """One full in-process session; returns (final state, log, record)."""
    driver = InProcessDriver(corpus, profile.player_id, master_seed)
    items_by_id = {it.item_id: it for it in corpus}
    drive_session(profile, items_by_id, driver, master_seed)
    session = driver.session
    return session.state, session.events, build_record(session.events)


def run_cohort(
    profiles: Sequence[BotProfile], corpus: Sequence[PhishItem], seed: int
) -> list[AssessmentRecord]:
    """Map run_bot over profiles; per-bot seed depends only on (seed, profile seed)."""
    records = []
    for profile in profiles:
        _, _, record = run_bot(profile, corpus, derive_seed(seed, profile.rng_seed))
        records.append(record)
    return records


def run_cohort_with_logs(
    profiles: Sequence[BotProfile], corpus: Sequence[PhishItem], seed: int
) -> list[tuple[SessionState, list[SessionEvent], AssessmentRecord]]:
    return [
        run_bot(profile, corpus, derive_seed(seed, profile.rng_seed))
        for profile in profiles
    ]


def make_cohort(
    n: int,
    seed: int,
    memory: bool = True,
    accuracy_range: tuple[float, float] = (0.35, 0.9),
    learning_rate: float = 0.3,
    help_propensity: float = 0.05,
    hesitation: float = 0.0,
    prefix: str = "bot",
) -> list[BotProfile]:
    """A spread of profiles with varying base accuracy (deterministic in seed)."""
    rng = SplitMix64(derive_seed(seed, "cohort", prefix))
    lo, hi = accuracy_range
    return [
        BotProfile(
            player_id=f"{prefix}-{i:03d}",
            base_accuracy=lo + (hi - lo) * rng.random(),
            memory=memory,
            learning_rate=learning_rate,
            help_propensity=help_propensity,
            rng_seed=rng.next_u64(),
            hesitation=hesitation,
        )
        for i in range(n)
    ]


def write_cohort(profiles: Sequence[BotProfile], path: str | Path) -> None:
    doc = {"v": COHORT_SCHEMA_VERSION, "profiles": [p.to_dict() for p in profiles]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_cohort(path: str | Path) -> list[BotProfile]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("v") != COHORT_SCHEMA_VERSION:
        raise ValueError(f"unsupported cohort schema version {doc.get('v')!r}")
    return [BotProfile.from_dict(d) for d in doc["profiles"]]
