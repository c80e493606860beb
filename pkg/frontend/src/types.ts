/** Wire types for the training service's JSON protocol (docs/protocol.md). */

export interface BalloonView {
  item_id: string;
  kind: "url" | "email";
  aimed: boolean;
  /** The raw payload text; null until the player aims. */
  display_text: string | null;
  assisted: boolean;
  hint: string | null;
  balloon_deadline_ms: number | null;
}

export interface StageView {
  name: string;
  balloon_index: number;
  balloon_count: number;
  lives: number;
  score: number;
  stage_deadline_ms: number | null;
  per_balloon_ms: number;
  balloon: BalloonView | null;
}

export interface TutorialView {
  step: number;
  total: number;
  current: Record<string, unknown> | null;
}

export interface QuizItemView {
  item_id: string;
  kind: "url" | "email";
  display_text: string;
  mode: string;
}

export interface ResolvedView {
  stage: string;
  index: number;
  item_id: string;
  action: string;
  correct: boolean | null;
  assisted: boolean;
  elapsed_ms: number | null;
}

export interface ReviewItemView {
  item_id: string;
  kind: "url" | "email";
  display_text: string;
  answered: boolean;
}

/** Post-mistake explanation: the fact plus per-trick advice texts. */
export interface Feedback {
  item_id: string;
  fact: string;
  advice: [string, string][];
}

export interface Snapshot {
  v: number;
  session_id: string;
  player_id: string;
  seq: number;
  phase: "tutorial" | "quiz" | "stage" | "review" | "done";
  awaiting_advance: boolean;
  stage_scores: Record<string, number>;
  total_score: number;
  stages_ended: Record<string, string>;
  help_uses: number;
  questionnaires_done: string[];
  last_feedback: Feedback | null;
  tutorial: TutorialView;
  quiz?: QuizItemView[];
  stage: StageView | null;
  resolved: ResolvedView[];
  review: { items: ReviewItemView[] } | null;
}

export interface QuizAnswer {
  verdict: "legitimate" | "phishing";
  tags: string[];
}

export interface ActResult {
  type: "act";
  outcome: "correct_shot" | "wrong_shot" | "correct_avoidance" | "missed_real";
  feedback: Feedback | null;
}

export type ActionResult =
  | { type: "tick" }
  | { type: "tutorial-next"; step: Record<string, unknown> }
  | { type: "quiz-submit" }
  | { type: "questionnaire-submit" }
  | { type: "advance-stage"; stage: string }
  | { type: "aim"; display_text: string }
  | { type: "help"; hint: string }
  | ActResult
  | { type: "review-answer" };

export interface SessionResponse {
  seq: number;
  result: ActionResult;
  state: Snapshot;
}

export interface CreateResponse {
  session_id: string;
  seq: number;
  state: Snapshot;
}

export interface StateResponse {
  seq: number;
  state: Snapshot;
}

export interface Questionnaires {
  v: number;
  scale: { min: number; max: number; labels: string[] };
  self_efficacy: string[];
  motivation: string[];
}
