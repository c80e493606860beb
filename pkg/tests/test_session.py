"""Session engine: stage tables, event-sourcing laws, timers, verification."""

import copy
import dataclasses
import json

import pytest

from phishgame.session import (
    EVENT_KINDS,
    PER_BALLOON_MS,
    POINTS_CORRECT,
    POINTS_WRONG,
    QUIZ_TAG_ITEMS,
    QUIZ_VERDICT_FAKES,
    QUIZ_VERDICT_REALS,
    STAGE_CONFIGS,
    STAGES,
    BalloonAlreadyResolved,
    EventLogFormatError,
    GapInLog,
    IncompleteResponses,
    InsufficientCorpus,
    NotRevealed,
    Session,
    SessionEvent,
    StageNotActive,
    WrongBalloon,
    WrongPhase,
    build_fixture,
    fixture_from_dict,
    fixture_to_dict,
    hint_for,
    read_events,
    replay,
    required_corpus_counts,
    tutorial_steps,
    verify_log,
    write_events,
)
from phishgame.model import TrickTag


# ---------------------------------------------------------------------------
# driving helpers


def make_session(corpus, seed=99, player="p1"):
    return Session.create(player, corpus, seed, now_ms=0)


def through_quiz(session, items_by_id, t=1000, correct=True):
    """Walk tutorial and quiz; by default answers every quiz item correctly."""
    while session.state.phase == "tutorial":
        session.tutorial_next(t)
    answers = {}
    for q in session.state.fixture.quiz:
        item = q.item
        truth = "legitimate" if item.legitimate else "phishing"
        wrong = "phishing" if item.legitimate else "legitimate"
        answers[item.item_id] = {
            "verdict": truth if correct else wrong,
            "tags": [tag.value for tag in item.tricks] if correct else [],
        }
    session.submit_quiz(answers, t)
    return session


def play_stage_perfectly(session, t):
    """Shoot every real, skip every fake, well inside all timers."""
    while session.state.stage is not None:
        item = session.state.current_item()
        session.aim(session.state.balloon_index, t)
        t += 1000
        action = "shoot" if item.legitimate else "skip"
        session.act(session.state.balloon_index, action, t)
        t += 1000
    return t


# ---------------------------------------------------------------------------
# stage tables (asserted verbatim)


def test_stage_table_constants():
    assert STAGES == ("easy", "medium", "advance")
    easy, medium, advance = (STAGE_CONFIGS[s] for s in STAGES)
    assert (easy.balloon_count, easy.real_count, easy.fake_count,
            easy.repeated_from_previous, easy.total_seconds) == (10, 7, 3, 0, 150)
    assert (medium.balloon_count, medium.real_count, medium.fake_count,
            medium.repeated_from_previous, medium.total_seconds) == (15, 8, 7, 3, 225)
    assert (advance.balloon_count, advance.real_count, advance.fake_count,
            advance.repeated_from_previous, advance.total_seconds) == (20, 10, 10, 4, 300)
    for cfg in (easy, medium, advance):
        assert cfg.lives == 3
        assert cfg.per_balloon_seconds == 15
        assert cfg.points_correct == POINTS_CORRECT == 5
        assert cfg.points_wrong == POINTS_WRONG == -1
    assert PER_BALLOON_MS == 15_000


# ---------------------------------------------------------------------------
# fixture construction


def test_fixture_counts_and_repetition_law(corpus):
    fx = build_fixture(corpus, 99)
    for stage in STAGES:
        cfg = STAGE_CONFIGS[stage]
        entries = fx.plans[stage].entries
        assert len(entries) == cfg.balloon_count
        fakes = [e for e in entries if not e.item.legitimate]
        assert len(fakes) == cfg.fake_count
    easy_fakes = fx.stage_fake_ids("easy")
    medium_fakes = fx.stage_fake_ids("medium")
    advance_fakes = fx.stage_fake_ids("advance")
    assert len(medium_fakes & easy_fakes) == 3
    assert len(advance_fakes & medium_fakes) == 4
    # is_repeat flags agree with the overlap
    assert {e.item.item_id for e in fx.plans["medium"].entries if e.is_repeat} \
        == medium_fakes & easy_fakes


def test_fixture_quiz_composition(corpus):
    fx = build_fixture(corpus, 99)
    modes = [q.mode for q in fx.quiz]
    assert modes.count("tags") == QUIZ_TAG_ITEMS == 4
    assert modes.count("verdict") == QUIZ_VERDICT_FAKES + QUIZ_VERDICT_REALS == 6
    verdict_items = [q.item for q in fx.quiz if q.mode == "verdict"]
    assert sum(1 for it in verdict_items if it.legitimate) == 3
    assert all(not q.item.legitimate for q in fx.quiz if q.mode == "tags")


def test_fixture_deterministic(corpus):
    a = fixture_to_dict(build_fixture(corpus, 5))
    b = fixture_to_dict(build_fixture(corpus, 5))
    c = fixture_to_dict(build_fixture(corpus, 6))
    assert a == b
    assert a != c
    assert fixture_to_dict(fixture_from_dict(a)) == a


def test_insufficient_corpus_rejected(corpus):
    need_real, need_fake = required_corpus_counts()
    assert (need_real, need_fake) == (28, 20)
    reals = [it for it in corpus if it.legitimate]
    fakes = [it for it in corpus if not it.legitimate]
    with pytest.raises(InsufficientCorpus):
        build_fixture(reals[:27] + fakes[:20], 1)
    with pytest.raises(InsufficientCorpus):
        build_fixture(reals[:28] + fakes[:19], 1)


# ---------------------------------------------------------------------------
# tutorial & quiz


def test_tutorial_is_walked_step_by_step(corpus):
    s = make_session(corpus)
    steps = tutorial_steps()
    assert len(steps) >= 10
    for i in range(len(steps)):
        assert s.state.phase == "tutorial"
        shown = s.tutorial_next(100 + i)
        assert shown["step"] == i
    assert s.state.phase == "quiz"
    with pytest.raises(WrongPhase):
        s.tutorial_next(999)


def test_quiz_requires_exactly_all_items(corpus, items_by_id):
    s = make_session(corpus)
    while s.state.phase == "tutorial":
        s.tutorial_next(1)
    with pytest.raises(IncompleteResponses):
        s.submit_quiz({}, 2)
    ids = [q.item.item_id for q in s.state.fixture.quiz]
    partial = {ids[0]: {"verdict": "phishing", "tags": []}}
    with pytest.raises(IncompleteResponses):
        s.submit_quiz(partial, 2)


def test_quiz_completion_starts_easy_stage(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    assert s.state.phase == "easy"
    assert s.state.stage == "easy"
    assert s.state.lives == 3
    assert s.state.balloon_index == 0


def test_cannot_act_before_quiz(corpus):
    s = make_session(corpus)
    with pytest.raises(StageNotActive):
        s.act(0, "shoot", 5)


# ---------------------------------------------------------------------------
# scoring & play laws


def test_perfect_play_scores(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t = play_stage_perfectly(s, 10_000)
    assert s.state.stage_scores["easy"] == 7 * 5
    s.start_next_stage(t)
    t = play_stage_perfectly(s, t)
    assert s.state.stage_scores["medium"] == 8 * 5
    s.start_next_stage(t)
    play_stage_perfectly(s, t)
    assert s.state.stage_scores["advance"] == 10 * 5
    assert s.state.stage_scores == {"easy": 35, "medium": 40, "advance": 50}
    assert all(r == "completed" for r in s.state.stages_ended.values())


def test_wrong_shot_costs_point_and_life_and_shows_feedback(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t = 10_000
    while s.state.stage is not None:
        item = s.state.current_item()
        s.aim(s.state.balloon_index, t)
        if not item.legitimate:
            before = s.state.lives
            res = s.act(s.state.balloon_index, "shoot", t + 500)
            assert res.outcome == "wrong_shot"
            assert res.feedback is not None
            assert res.feedback.item_id == item.item_id
            assert len(res.feedback.advice) == len(item.tricks)
            assert s.state.lives == before - 1
            break
        s.act(s.state.balloon_index, "shoot", t + 500)
        t += 1000


def test_three_wrong_shots_end_stage_by_lives(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t = 10_000
    wrong = 0
    while s.state.stage is not None:
        item = s.state.current_item()
        s.aim(s.state.balloon_index, t)
        # worst case: shoot fakes, skip reals
        action = "shoot" if not item.legitimate else "skip"
        if not item.legitimate:
            wrong += 1
        s.act(s.state.balloon_index, action, t + 500)
        t += 1000
    assert wrong == 3
    assert s.state.lives == 0
    assert s.state.stages_ended["easy"] == "lives"
    assert s.state.stage_scores["easy"] == -3


def test_skips_are_unscored(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t = 10_000
    while s.state.stage is not None:
        s.aim(s.state.balloon_index, t)
        s.act(s.state.balloon_index, "skip", t + 500)
        t += 1000
    assert s.state.stage_scores["easy"] == 0
    assert s.state.lives == 3
    assert s.state.stages_ended["easy"] == "completed"


# ---------------------------------------------------------------------------
# timers


def test_balloon_times_out_15s_after_first_aim(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t0 = 10_000
    s.aim(0, t0)
    assert s.state.balloon_deadline_ms() == t0 + PER_BALLOON_MS
    s.check_time(t0 + PER_BALLOON_MS)
    out = s.state.outcomes[-1]
    assert out.action == "timeout"
    assert out.index == 0
    assert s.state.balloon_index == 1  # next balloon presented
    assert s.state.stage_scores["easy"] == 0  # timeouts are unscored
    assert s.state.lives == 3


def test_repeat_aim_does_not_reset_balloon_timer(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    s.aim(0, 10_000)
    s.aim(0, 14_000)
    assert s.state.balloon_deadline_ms() == 10_000 + PER_BALLOON_MS


def test_late_act_finds_balloon_timed_out(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    s.aim(0, 10_000)
    # the server clock is authoritative: by act time the balloon already
    # timed out, was resolved as an unscored non-decision, and moved on
    with pytest.raises(BalloonAlreadyResolved):
        s.act(0, "shoot", 10_000 + PER_BALLOON_MS + 1)
    assert s.state.outcomes[-1].action == "timeout"
    assert s.state.balloon_index == 1
    assert s.state.stage_scores["easy"] == 0


def test_stage_clock_expires(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    start = s.state.stage_started_ms
    deadline = s.state.stage_deadline_ms()
    assert deadline == start + 150 * 1000
    s.check_time(deadline)
    assert s.state.stage is None
    assert s.state.stages_ended["easy"] == "time"


# ---------------------------------------------------------------------------
# operation guards


def test_act_requires_aim(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    with pytest.raises(NotRevealed):
        s.act(0, "shoot", 10_000)
    with pytest.raises(NotRevealed):
        s.request_help(0, 10_000)


def test_wrong_balloon_index_rejected(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    with pytest.raises(WrongBalloon):
        s.aim(3, 10_000)
    s.aim(0, 10_000)
    s.act(0, "skip", 11_000)
    with pytest.raises(BalloonAlreadyResolved):
        s.aim(0, 12_000)


def test_unknown_action_rejected(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    s.aim(0, 10_000)
    with pytest.raises(ValueError):
        s.act(0, "lob", 10_500)


def test_help_hints_name_a_component_not_the_verdict(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    s.aim(0, 10_000)
    hint = s.request_help(0, 10_500)
    assert isinstance(hint, str) and hint
    for word in ("fake", "phish", "genuine", "legitimate", "shoot", "skip"):
        assert word not in hint.lower()
    # idempotent: second request returns the same hint without a new event
    n_events = len(s.events)
    assert s.request_help(0, 10_600) == hint
    assert len(s.events) == n_events
    assert s.state.help_uses == 1


def test_hint_covers_every_tag(corpus):
    for it in corpus:
        assert hint_for(it)
    fake = next(it for it in corpus if it.tricks)
    assert hint_for(fake)


def test_voluntary_advancement_required_between_stages(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    with pytest.raises(WrongPhase):
        s.start_next_stage(10_000)  # easy still active
    t = play_stage_perfectly(s, 10_000)
    assert s.state.stage is None
    assert s.state.awaiting_advance
    s.start_next_stage(t)
    assert s.state.stage == "medium"


def test_review_only_for_encountered_fakes(corpus, items_by_id):
    s = through_quiz(make_session(corpus), items_by_id)
    t = play_stage_perfectly(s, 10_000)
    encountered = s.state.fixture.encountered_fakes(["easy"])
    other = next(it for it in corpus
                 if not it.legitimate
                 and it.item_id not in {e.item_id for e in encountered})
    with pytest.raises(WrongBalloon):
        s.submit_review_answer(other.item_id, [], t)
    s.submit_review_answer(encountered[0].item_id, [TrickTag.NO_HTTPS.value], t)
    assert s.state.phase == "review"
    with pytest.raises(ValueError):
        s.submit_review_answer(encountered[0].item_id, ["NotATag"], t)


def test_questionnaire_phase_rules(corpus, items_by_id):
    s = make_session(corpus)
    s.submit_questionnaire("pre", [3] * 10, 50)
    with pytest.raises(WrongPhase):
        s.submit_questionnaire("post", [3] * 10, 60)
    with pytest.raises(IncompleteResponses):
        s.submit_questionnaire("pre", [3] * 9, 70)
    with pytest.raises(IncompleteResponses):
        s.submit_questionnaire("motivation", [0, 3, 3], 80)
    with pytest.raises(ValueError):
        s.submit_questionnaire("extra", [3] * 10, 90)
    through_quiz(s, items_by_id)
    t = play_stage_perfectly(s, 10_000)
    s.submit_questionnaire("motivation", [4, 4, 4], t)
    s.submit_questionnaire("post", [4] * 10, t + 1)
    assert s.state.phase == "done"


# ---------------------------------------------------------------------------
# event sourcing laws


def finished_session(corpus, items_by_id, seed=99):
    s = through_quiz(make_session(corpus, seed=seed), items_by_id)
    t = 10_000
    rng_flip = 0
    while True:
        if s.state.stage is None:
            if len(s.state.stages_ended) < 3:
                s.start_next_stage(t)
                continue
            break
        item = s.state.current_item()
        s.aim(s.state.balloon_index, t)
        rng_flip += 1
        action = "shoot" if (item.legitimate) == (rng_flip % 4 != 0) else "skip"
        s.act(s.state.balloon_index, action, t + 500)
        t += 1000
    return s


def test_replay_equals_live_state(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    assert replay(s.events) == s.state


def test_event_kinds_are_closed(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    assert {e.kind for e in s.events} <= set(EVENT_KINDS)


def test_gap_in_log_detected(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    with pytest.raises(GapInLog):
        replay(s.events[:5] + s.events[6:])


def test_verify_clean_log(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    assert verify_log(s.events) == []


def _mutate(events, predicate, change):
    out = []
    done = False
    for ev in events:
        if not done and predicate(ev):
            d = copy.deepcopy(ev.to_dict())
            change(d)
            out.append(SessionEvent.from_dict(d))
            done = True
        else:
            out.append(ev)
    assert done
    return out


def test_verify_detects_flipped_correctness(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    tampered = _mutate(
        s.events,
        lambda e: e.kind == "Shot",
        lambda d: d["payload"].__setitem__("correct", not d["payload"]["correct"]),
    )
    failures = verify_log(tampered)
    assert failures
    first_shot = next(e for e in s.events if e.kind == "Shot")
    assert any(f.seq == first_shot.seq for f in failures)


def test_verify_detects_edited_score(corpus, items_by_id):
    s = finished_session(corpus, items_by_id)
    tampered = _mutate(
        s.events,
        lambda e: e.kind == "StageEnded",
        lambda d: d["payload"].__setitem__("score", d["payload"]["score"] + 5),
    )
    failures = verify_log(tampered)
    assert failures
    assert "score" in failures[0].reason


def test_event_log_file_round_trip(corpus, items_by_id, tmp_path):
    s = finished_session(corpus, items_by_id)
    path = tmp_path / "log.jsonl"
    write_events(s.events, path)
    again = read_events(path)
    assert again == s.events
    assert replay(again) == s.state


def test_read_events_reports_line_numbers(corpus, items_by_id, tmp_path):
    s = finished_session(corpus, items_by_id)
    path = tmp_path / "log.jsonl"
    write_events(s.events, path)
    lines = path.read_text().splitlines()
    lines[2] = "garbage"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(EventLogFormatError) as exc:
        read_events(path)
    assert exc.value.line_no == 3

    d = json.loads(write_and_get_line(s, tmp_path))
    d["kind"] = "Imagined"
    path.write_text(json.dumps(d) + "\n")
    with pytest.raises(EventLogFormatError) as exc:
        read_events(path)
    assert exc.value.line_no == 1


def write_and_get_line(s, tmp_path):
    path = tmp_path / "one.jsonl"
    write_events(s.events[:1], path)
    return path.read_text().splitlines()[0]
