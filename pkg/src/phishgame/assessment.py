"""Knowledge metrics, questionnaires and hypothesis statistics.

Everything here is a pure function of a session's event log plus the
questionnaire responses recorded in it, so any metric can be recomputed
offline by replaying the log.  Assisted balloons (Jerry was asked) are
excluded from every knowledge metric, and timeouts are treated as
non-decisions rather than guesses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .session import (
    BalloonOutcome,
    IncompleteResponses,
    QuizItem,
    SessionEvent,
    SessionState,
    STAGES,
    replay,
)
from .stats import spearman, wilcoxon_signed_rank

ALPHA = 0.05
MIN_RECORDS = 5


class NoRepeatedItemsEncountered(ValueError):
    pass


class ReviewNotCompleted(ValueError):
    pass


class InsufficientData(ValueError):
    pass


def questionnaire_definitions() -> dict:
    """The versioned instrument file (self-efficacy + motivation items)."""
    with resources.files("phishgame.data").joinpath("questionnaires.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# quiz scoring


def score_quiz(
    instrument: Sequence[QuizItem], responses: dict
) -> tuple[float, list[dict]]:
    """Mean per-item score; verdict items exact-match, tag items Jaccard."""
    missing = [q.item.item_id for q in instrument if q.item.item_id not in responses]
    if missing:
        raise IncompleteResponses(f"missing responses for {len(missing)} quiz items")
    details: list[dict] = []
    for q in instrument:
        resp = responses[q.item.item_id]
        truth_verdict = "legitimate" if q.item.legitimate else "phishing"
        if q.mode == "verdict":
            score = 1.0 if resp["verdict"] == truth_verdict else 0.0
        else:
            truth = {t.value for t in q.item.tricks}
            chosen = set(resp.get("tags", []))
            union = truth | chosen
            score = (len(truth & chosen) / len(union)) if union else 1.0
        details.append(
            {"item_id": q.item.item_id, "mode": q.mode, "score": score,
             "verdict": resp["verdict"], "truth_verdict": truth_verdict}
        )
    overall = sum(d["score"] for d in details) / len(details) if details else 0.0
    return overall, details


# ---------------------------------------------------------------------------
# per-session metrics


def _decisions(state: SessionState) -> list[BalloonOutcome]:
    return [o for o in state.outcomes if o.action in ("shoot", "skip")]


def heuristic_delta(events: Sequence[SessionEvent]) -> float:
    """Accuracy on repeated fakes in the later stage minus the earlier one.

    Pooled across both repetition links (easy->medium, medium->advance);
    assisted or timed-out encounters are excluded.
    """
    state = replay(events)
    if "medium" not in state.stages_ended and state.stage != "medium" and \
            "advance" not in state.stages_ended and state.stage != "advance":
        raise NoRepeatedItemsEncountered("session never reached a stage with repeats")
    by_key = {}
    for o in _decisions(state):
        by_key[(o.stage, o.item_id)] = o
    earlier_of = {"medium": "easy", "advance": "medium"}
    earlier_vals: list[float] = []
    later_vals: list[float] = []
    for later_stage, earlier_stage in earlier_of.items():
        plan = state.fixture.plans.get(later_stage)
        if plan is None:
            continue
        for entry in plan.entries:
            if not entry.is_repeat:
                continue
            late = by_key.get((later_stage, entry.item.item_id))
            early = by_key.get((earlier_stage, entry.item.item_id))
            if late is None or early is None or late.assisted or early.assisted:
                continue
            later_vals.append(1.0 if late.correct else 0.0)
            earlier_vals.append(1.0 if early.correct else 0.0)
    if not later_vals:
        raise NoRepeatedItemsEncountered("no unassisted repeated-item pairs in the log")
    return sum(later_vals) / len(later_vals) - sum(earlier_vals) / len(earlier_vals)


def structural_score(events: Sequence[SessionEvent]) -> float:
    """Fraction of encountered fakes whose reviewed cues hit a true trick."""
    state = replay(events)
    encountered = state.fixture.encountered_fakes(list(state.stages_ended))
    if not encountered:
        raise ReviewNotCompleted("no stage was completed; nothing to review")
    hits = 0
    for item in encountered:
        if item.item_id not in state.review_answers:
            raise ReviewNotCompleted(f"no review answer for item {item.item_id}")
        chosen = set(state.review_answers[item.item_id])
        truth = {t.value for t in item.tricks}
        if chosen & truth:
            hits += 1
    return hits / len(encountered)


@dataclass(frozen=True)
class KnowledgeMetrics:
    """Operationalized knowledge constructs for one session."""

    observational_score: float
    procedural_score: float
    conceptual_score: float
    heuristic_delta: Optional[float]
    structural_score: Optional[float]
    in_game_accuracy: Optional[float]
    avoidance_behavior: Optional[float]

    def __post_init__(self) -> None:
        for name in ("observational_score", "procedural_score", "conceptual_score",
                     "structural_score", "in_game_accuracy", "avoidance_behavior"):
            v = getattr(self, name)
            if v is not None and not (0.0 <= v <= 1.0):
                raise ValueError(f"{name}={v} out of [0, 1]")
        if self.heuristic_delta is not None and not (-1.0 <= self.heuristic_delta <= 1.0):
            raise ValueError(f"heuristic_delta={self.heuristic_delta} out of [-1, 1]")

    def to_dict(self) -> dict:
        return {
            "observational_score": self.observational_score,
            "procedural_score": self.procedural_score,
            "conceptual_score": self.conceptual_score,
            "heuristic_delta": self.heuristic_delta,
            "structural_score": self.structural_score,
            "in_game_accuracy": self.in_game_accuracy,
            "avoidance_behavior": self.avoidance_behavior,
        }


@dataclass(frozen=True)
class AssessmentRecord:
    """One player's questionnaire responses and derived metrics."""

    player_id: str
    session_id: str
    metrics: KnowledgeMetrics
    se_pre: Optional[int]           # raw sum, 10..50
    se_post: Optional[int]
    motivation: Optional[float]     # composite in [0, 1]
    stages_completed: int
    review_completed: bool
    ended_by_lives: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "player_id": self.player_id,
            "session_id": self.session_id,
            "metrics": self.metrics.to_dict(),
            "se_pre": self.se_pre,
            "se_post": self.se_post,
            "motivation": self.motivation,
            "stages_completed": self.stages_completed,
            "review_completed": self.review_completed,
            "ended_by_lives": list(self.ended_by_lives),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssessmentRecord":
        m = d["metrics"]
        return cls(
            player_id=d["player_id"],
            session_id=d["session_id"],
            metrics=KnowledgeMetrics(**m),
            se_pre=d["se_pre"],
            se_post=d["se_post"],
            motivation=d["motivation"],
            stages_completed=d["stages_completed"],
            review_completed=d["review_completed"],
            ended_by_lives=tuple(d["ended_by_lives"]),
        )


def _subset_score(instrument: Sequence[QuizItem], responses: dict, mode: str) -> float:
    subset = [q for q in instrument if q.mode == mode]
    if not subset:
        return 0.0
    overall, _ = score_quiz(subset, responses)
    return overall


def build_record(events: Sequence[SessionEvent]) -> AssessmentRecord:
    """Derive the full assessment record from one session log."""
    state = replay(events)
    quiz = state.fixture.quiz
    observational, _ = score_quiz(quiz, state.quiz_answers) if state.quiz_answers else (0.0, [])
    procedural = _subset_score(quiz, state.quiz_answers, "verdict") if state.quiz_answers else 0.0
    conceptual = _subset_score(quiz, state.quiz_answers, "tags") if state.quiz_answers else 0.0

    try:
        delta = heuristic_delta(events)
    except NoRepeatedItemsEncountered:
        delta = None
    try:
        structural = structural_score(events)
    except ReviewNotCompleted:
        structural = None

    decisions = [o for o in _decisions(state) if not o.assisted]
    in_game = (sum(o.correct for o in decisions) / len(decisions)) if decisions else None
    plan_truth = {
        e.item.item_id: e.item.legitimate
        for plan in state.fixture.plans.values()
        for e in plan.entries
    }
    fake_decisions = [o for o in decisions if not plan_truth[o.item_id]]
    avoidance = (
        sum(o.correct for o in fake_decisions) / len(fake_decisions)
        if fake_decisions else None
    )

    se_pre = sum(state.questionnaires["pre"]) if "pre" in state.questionnaires else None
    se_post = sum(state.questionnaires["post"]) if "post" in state.questionnaires else None

    stages_completed = len(state.stages_ended)
    review_done = structural is not None
    components = [max(0, stages_completed - 1) / (len(STAGES) - 1), 1.0 if review_done else 0.0]
    if "motivation" in state.questionnaires:
        resp = state.questionnaires["motivation"]
        components.append((sum(resp) / len(resp) - 1.0) / 4.0)
    motivation = sum(components) / len(components)

    metrics = KnowledgeMetrics(
        observational_score=observational,
        procedural_score=procedural,
        conceptual_score=conceptual,
        heuristic_delta=delta,
        structural_score=structural,
        in_game_accuracy=in_game,
        avoidance_behavior=avoidance,
    )
    return AssessmentRecord(
        player_id=state.player_id,
        session_id=state.session_id,
        metrics=metrics,
        se_pre=se_pre,
        se_post=se_post,
        motivation=motivation,
        stages_completed=stages_completed,
        review_completed=review_done,
        ended_by_lives=tuple(s for s, r in state.stages_ended.items() if r == "lives"),
    )


# ---------------------------------------------------------------------------
# hypothesis testing


@dataclass(frozen=True)
class HypothesisResult:
    label: str
    x_name: str
    y_name: str
    rho: Optional[float]
    p_value: Optional[float]
    n: int
    verdict: str

    def to_dict(self) -> dict:
        return {
            "label": self.label, "x": self.x_name, "y": self.y_name,
            "rho": self.rho, "p_value": self.p_value, "n": self.n,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class HypothesisReport:
    results: tuple[HypothesisResult, ...]
    se_change: dict
    n_records: int
    alpha: float = ALPHA

    def to_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "alpha": self.alpha,
            "results": [r.to_dict() for r in self.results],
            "self_efficacy_change": self.se_change,
        }

    def result(self, label: str) -> HypothesisResult:
        for r in self.results:
            if r.label == label:
                return r
        raise KeyError(label)


def _norm_se(raw: Optional[int]) -> Optional[float]:
    return None if raw is None else (raw - 10) / 40.0


def _mean_opt(*values: Optional[float]) -> Optional[float]:
    if any(v is None for v in values):
        return None
    return sum(values) / len(values)


def _series(records: Sequence[AssessmentRecord]) -> dict[str, list[Optional[float]]]:
    out: dict[str, list[Optional[float]]] = {
        "observational": [], "procedural": [], "conceptual": [],
        "heuristic": [], "structural": [], "proc_conc": [], "proc_conc_struct": [],
        "heur_obs": [], "se_post": [], "motivation": [], "avoidance": [],
    }
    for r in records:
        m = r.metrics
        heur = None if m.heuristic_delta is None else (m.heuristic_delta + 1.0) / 2.0
        out["observational"].append(m.observational_score)
        out["procedural"].append(m.procedural_score)
        out["conceptual"].append(m.conceptual_score)
        out["heuristic"].append(heur)
        out["structural"].append(m.structural_score)
        out["proc_conc"].append(_mean_opt(m.procedural_score, m.conceptual_score))
        out["proc_conc_struct"].append(
            _mean_opt(m.procedural_score, m.conceptual_score, m.structural_score)
        )
        out["heur_obs"].append(_mean_opt(heur, m.observational_score))
        out["se_post"].append(_norm_se(r.se_post))
        out["motivation"].append(r.motivation)
        out["avoidance"].append(m.avoidance_behavior)
    return out


#: label -> (x series, y series); read as "x positively influences y".
HYPOTHESES: tuple[tuple[str, str, str], ...] = (
    ("H1", "motivation", "avoidance"),
    ("H2", "se_post", "motivation"),
    ("H3a", "procedural", "se_post"),
    ("H3b", "conceptual", "se_post"),
    ("H3c", "proc_conc", "se_post"),
    ("H3", "proc_conc_struct", "se_post"),
    ("H4a", "heuristic", "se_post"),
    ("H4b", "observational", "se_post"),
    ("H4c", "heur_obs", "se_post"),
)


def test_hypotheses(records: Sequence[AssessmentRecord], alpha: float = ALPHA) -> HypothesisReport:
    """Rank correlations for each hypothesis pair, plus pre/post SE change."""
    if len(records) < MIN_RECORDS:
        raise InsufficientData(f"need >= {MIN_RECORDS} records, got {len(records)}")
    series = _series(records)
    results: list[HypothesisResult] = []
    for label, xk, yk in HYPOTHESES:
        pairs = [
            (x, y) for x, y in zip(series[xk], series[yk])
            if x is not None and y is not None
        ]
        n = len(pairs)
        if n < MIN_RECORDS:
            results.append(HypothesisResult(label, xk, yk, None, None, n, "insufficient-data"))
            continue
        rho, p = spearman([x for x, _ in pairs], [y for _, y in pairs])
        if rho != rho:  # constant series
            results.append(HypothesisResult(label, xk, yk, None, None, n, "insufficient-data"))
            continue
        verdict = "supported" if (p < alpha and rho > 0) else "not supported"
        results.append(HypothesisResult(label, xk, yk, rho, p, n, verdict))

    paired = [(r.se_pre, r.se_post) for r in records
              if r.se_pre is not None and r.se_post is not None]
    if len(paired) >= MIN_RECORDS:
        diffs = [post - pre for pre, post in paired]
        stat, p = wilcoxon_signed_rank(diffs)
        se_change = {
            "n": len(paired),
            "mean_change": sum(diffs) / len(diffs),
            "statistic": stat,
            "p_value": p,
            "significant": p < alpha,
        }
    else:
        se_change = {"n": len(paired), "verdict": "insufficient-data"}
    return HypothesisReport(results=tuple(results), se_change=se_change,
                            n_records=len(records), alpha=alpha)


def format_report_text(report: HypothesisReport,
                       records: Sequence[AssessmentRecord] | None = None) -> str:
    """Human-readable table form of a hypothesis report."""
    lines = [
        f"Hypothesis report over {report.n_records} sessions (alpha={report.alpha})",
        "",
        f"{'label':<5} {'x -> y':<32} {'rho':>8} {'p':>10} {'n':>4}  verdict",
        "-" * 76,
    ]
    for r in report.results:
        rho = "-" if r.rho is None else f"{r.rho:+.3f}"
        p = "-" if r.p_value is None else f"{r.p_value:.4f}"
        lines.append(
            f"{r.label:<5} {r.x_name + ' -> ' + r.y_name:<32} {rho:>8} {p:>10} {r.n:>4}  {r.verdict}"
        )
    sc = report.se_change
    if "p_value" in sc:
        lines.append("")
        lines.append(
            f"self-efficacy pre/post: mean change {sc['mean_change']:+.2f}, "
            f"signed-rank p={sc['p_value']:.4f} (n={sc['n']})"
        )
    if records:
        lines.append("")
        lines.append("per-session metric means:")
        series = _series(records)
        for key in ("observational", "procedural", "conceptual", "heuristic",
                    "structural", "avoidance", "se_post", "motivation"):
            vals = [v for v in series[key] if v is not None]
            if vals:
                lines.append(f"  {key:<16} {sum(vals) / len(vals):.3f}  (n={len(vals)})")
    return "\n".join(lines)
