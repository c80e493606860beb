"""Knowledge metrics and hypothesis testing on scripted and simulated logs."""

import pytest

from phishgame.assessment import (
    AssessmentRecord,
    InsufficientData,
    KnowledgeMetrics,
    NoRepeatedItemsEncountered,
    ReviewNotCompleted,
    build_record,
    heuristic_delta,
    questionnaire_definitions,
    score_quiz,
    structural_score,
)
from phishgame.assessment import test_hypotheses as run_hypothesis_tests
from phishgame.session import IncompleteResponses, QuizItem, Session, replay
from phishgame.simulation import BotProfile, make_cohort, run_bot, run_cohort


# ---------------------------------------------------------------------------
# instruments


def test_questionnaire_definitions_shape():
    defs = questionnaire_definitions()
    assert len(defs["self_efficacy"]) == 10
    assert len(defs["motivation"]) == 3
    assert defs["scale"]["min"] == 1 and defs["scale"]["max"] == 5


# ---------------------------------------------------------------------------
# quiz scoring


def _quiz_fixture(corpus):
    fakes = [it for it in corpus if not it.legitimate]
    reals = [it for it in corpus if it.legitimate]
    return [
        QuizItem(fakes[0], "verdict"),
        QuizItem(reals[0], "verdict"),
        QuizItem(fakes[1], "tags"),
    ]


def test_score_quiz_verdict_exact_match(corpus):
    quiz = _quiz_fixture(corpus)
    responses = {
        quiz[0].item.item_id: {"verdict": "phishing", "tags": []},
        quiz[1].item.item_id: {"verdict": "phishing", "tags": []},  # wrong
        quiz[2].item.item_id: {
            "verdict": "phishing",
            "tags": [t.value for t in quiz[2].item.tricks],
        },
    }
    overall, details = score_quiz(quiz, responses)
    assert details[0]["score"] == 1.0
    assert details[1]["score"] == 0.0
    assert details[2]["score"] == 1.0  # exact tag set -> Jaccard 1
    assert overall == pytest.approx(2 / 3)


def test_score_quiz_jaccard_partial_credit(corpus):
    fake = next(it for it in corpus if len(it.tricks) == 2)
    quiz = [QuizItem(fake, "tags")]
    truth = [t.value for t in fake.tricks]
    other = next(
        v for v in ("IpAddressHost", "Typosquat", "NoHttps", "WrongTld")
        if v not in truth
    )
    responses = {fake.item_id: {"verdict": "phishing", "tags": [truth[0], other]}}
    overall, _ = score_quiz(quiz, responses)
    assert overall == pytest.approx(1 / 3)  # |∩|=1, |∪|=3


def test_score_quiz_missing_response_raises(corpus):
    quiz = _quiz_fixture(corpus)
    with pytest.raises(IncompleteResponses):
        score_quiz(quiz, {})


# ---------------------------------------------------------------------------
# heuristic delta on scripted sessions


def _play(session, decide, t=10_000):
    """Play all stages with decide(item, stage, is_repeat) -> action."""
    while True:
        st = session.state
        if st.stage is None:
            if len(st.stages_ended) < 3:
                session.start_next_stage(t)
                continue
            return session
        entry = st.fixture.plans[st.stage].entries[st.balloon_index]
        session.aim(st.balloon_index, t)
        session.act(st.balloon_index, decide(entry.item, st.stage, entry.is_repeat), t + 500)
        t += 1000


def _session_through_quiz(corpus, seed=21):
    s = Session.create("scripted", corpus, seed, now_ms=0)
    while s.state.phase == "tutorial":
        s.tutorial_next(1)
    answers = {
        q.item.item_id: {
            "verdict": "legitimate" if q.item.legitimate else "phishing",
            "tags": [t.value for t in q.item.tricks],
        }
        for q in s.state.fixture.quiz
    }
    s.submit_quiz(answers, 2)
    return s


def test_heuristic_delta_improvement_is_positive(corpus):
    # wrong on every first-encounter fake, correct on every repeat
    s = _session_through_quiz(corpus)

    def decide(item, stage, is_repeat):
        if item.legitimate:
            return "shoot"
        return "skip" if is_repeat else "shoot"

    _play(s, decide)
    assert heuristic_delta(s.events) == pytest.approx(1.0)


def test_heuristic_delta_no_change_is_zero(corpus):
    s = _session_through_quiz(corpus)
    _play(s, lambda item, stage, is_repeat: "shoot" if item.legitimate else "skip")
    assert heuristic_delta(s.events) == pytest.approx(0.0)


def test_heuristic_delta_requires_repeat_stages(corpus):
    s = _session_through_quiz(corpus)
    # only play easy, never advance
    while s.state.stage is not None:
        s.aim(s.state.balloon_index, 10_000)
        s.act(s.state.balloon_index, "skip", 10_500)
    with pytest.raises(NoRepeatedItemsEncountered):
        heuristic_delta(s.events)


def test_heuristic_delta_excludes_assisted_encounters(corpus):
    s = _session_through_quiz(corpus)
    t = 10_000
    while True:
        st = s.state
        if st.stage is None:
            if len(st.stages_ended) < 3:
                s.start_next_stage(t)
                continue
            break
        entry = st.fixture.plans[st.stage].entries[st.balloon_index]
        s.aim(st.balloon_index, t)
        if entry.is_repeat:  # ask Jerry on every repeat encounter
            s.request_help(st.balloon_index, t + 100)
        s.act(st.balloon_index, "shoot" if entry.item.legitimate else "skip", t + 500)
        t += 1000
    # every repeat pair has an assisted later half -> no usable pairs
    with pytest.raises(NoRepeatedItemsEncountered):
        heuristic_delta(s.events)


# ---------------------------------------------------------------------------
# structural score


def test_structural_score_counts_cue_hits(corpus):
    s = _session_through_quiz(corpus)
    _play(s, lambda item, stage, is_repeat: "shoot" if item.legitimate else "skip")
    fakes = s.state.fixture.encountered_fakes(["easy", "medium", "advance"])
    t = 100_000
    for i, item in enumerate(fakes):
        if i < len(fakes) // 2:
            tags = [item.tricks[0].value]  # one true cue
        else:
            wrong = next(v for v in ("IpAddressHost", "NoHttps", "Typosquat")
                         if v not in {x.value for x in item.tricks})
            tags = [wrong]
        s.submit_review_answer(item.item_id, tags, t)
        t += 10
    assert structural_score(s.events) == pytest.approx((len(fakes) // 2) / len(fakes))


def test_structural_score_requires_full_review(corpus):
    s = _session_through_quiz(corpus)
    _play(s, lambda item, stage, is_repeat: "shoot" if item.legitimate else "skip")
    with pytest.raises(ReviewNotCompleted):
        structural_score(s.events)


# ---------------------------------------------------------------------------
# record building


def test_build_record_perfect_session(corpus):
    profile = BotProfile("ace", 1.0, True, 0.0, 0.0, rng_seed=4)
    state, events, record = run_bot(profile, corpus, 55)
    m = record.metrics
    assert m.observational_score == 1.0
    assert m.procedural_score == 1.0
    assert m.conceptual_score == 1.0
    assert m.structural_score == 1.0
    assert m.in_game_accuracy == 1.0
    assert m.avoidance_behavior == 1.0
    assert m.heuristic_delta == 0.0  # already perfect, nothing to gain
    assert record.se_pre is not None and 10 <= record.se_pre <= 50
    assert record.stages_completed == 3
    assert record.review_completed
    assert record.ended_by_lives == ()
    assert record.player_id == "ace"
    assert record.session_id == state.session_id


def test_record_round_trips_via_dict(corpus):
    _, _, record = run_bot(BotProfile("r", 0.6, True, 0.2, 0.1, rng_seed=8), corpus, 55)
    assert AssessmentRecord.from_dict(record.to_dict()) == record


def test_metrics_range_validation():
    with pytest.raises(ValueError):
        KnowledgeMetrics(1.2, 0.5, 0.5, None, None, None, None)
    with pytest.raises(ValueError):
        KnowledgeMetrics(0.5, 0.5, 0.5, -1.5, None, None, None)


def test_timeouts_are_excluded_from_metrics(corpus):
    s = _session_through_quiz(corpus)
    # time out every balloon in easy: aim then let the window lapse
    t = 10_000
    while s.state.stage == "easy":
        s.aim(s.state.balloon_index, t)
        t += 15_000
        s.check_time(t)
    assert all(o.action == "timeout" for o in replay(s.events).outcomes)
    record = build_record(s.events)
    assert record.metrics.in_game_accuracy is None
    assert record.metrics.avoidance_behavior is None


# ---------------------------------------------------------------------------
# hypothesis testing


def test_hypotheses_require_minimum_records(corpus):
    records = run_cohort(make_cohort(3, seed=2), corpus, 5)
    with pytest.raises(InsufficientData):
        run_hypothesis_tests(records)


def test_hypothesis_report_shape(corpus):
    records = run_cohort(make_cohort(8, seed=2), corpus, 5)
    report = run_hypothesis_tests(records)
    labels = [r.label for r in report.results]
    assert labels == ["H1", "H2", "H3a", "H3b", "H3c", "H3", "H4a", "H4b", "H4c"]
    for r in report.results:
        assert r.verdict in ("supported", "not supported", "insufficient-data")
        if r.verdict != "insufficient-data":
            assert -1.0 <= r.rho <= 1.0
            assert 0.0 <= r.p_value <= 1.0
    assert report.result("H4b").x_name == "observational"
    assert report.se_change["n"] == 8
    d = report.to_dict()
    assert d["n_records"] == 8 and len(d["results"]) == 9


def test_constant_series_reported_as_insufficient(corpus):
    # identical bots -> identical records -> constant series
    profile = BotProfile("same", 0.7, True, 0.2, 0.0, rng_seed=123)
    records = [run_bot(profile, corpus, 55)[2] for _ in range(6)]
    report = run_hypothesis_tests(records)
    assert all(r.verdict == "insufficient-data" for r in report.results)
