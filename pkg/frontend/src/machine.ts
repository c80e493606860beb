/** Client session state machine: render-and-relay only.
 *
 * No gameplay verdict is ever computed here — the client's job is to show
 * the server's snapshot and turn user gestures into API calls.  Rules it
 * does own:
 *
 * - Exactly one mutating request in flight at a time.
 * - Every user action gets a fresh client action id; a network failure is
 *   retried with the *same* id, so the server's idempotency makes the
 *   action exactly-once.
 * - A stale `seq` (another tab, a server-side timer) means our snapshot is
 *   behind: refetch, surface the conflict, never merge blindly.
 * - A wrong shot's Fact-and-Advice feedback blocks all further actions
 *   until acknowledged.
 */

import {
  ApiClient,
  ApiError,
  NetworkError,
  StaleSeqError,
} from "./api";
import type { ActionResult, Feedback, QuizAnswer, Snapshot } from "./types";

export type IdGen = () => string;

/** Deterministic ids for tests; the browser entry uses random UUIDs. */
export function counterIds(prefix: string): IdGen {
  let n = 0;
  return () => `${prefix}-${n++}`;
}

export function randomIds(): IdGen {
  return () => crypto.randomUUID();
}

const MAX_NETWORK_RETRIES = 5;

export class GameClient {
  snapshot: Snapshot | null = null;
  seq = -1;
  /** Blocking Fact-and-Advice modal content; null when dismissed. */
  modal: Feedback | null = null;
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    readonly sessionId: string,
    private readonly idGen: IdGen = randomIds(),
  ) {}

  static async create(
    api: ApiClient,
    playerId: string,
    corpusRef: string,
    seed: number,
    idGen: IdGen = randomIds(),
  ): Promise<GameClient> {
    const created = await api.createSession(playerId, corpusRef, seed, idGen());
    const client = new GameClient(api, created.session_id, idGen);
    client.accept(created.seq, created.state);
    return client;
  }

  /** Attach to an existing session, e.g. after a page reload. */
  static async resume(
    api: ApiClient,
    sessionId: string,
    idGen: IdGen = randomIds(),
  ): Promise<GameClient> {
    const client = new GameClient(api, sessionId, idGen);
    await client.refresh();
    return client;
  }

  get phase(): Snapshot["phase"] {
    return this.require().phase;
  }

  /** Controls are live unless a request is in flight, the feedback modal is
   * open, or the balloon timer has visibly hit zero (then we disable and
   * wait for the server's timeout to land via refresh/tick). */
  controlsEnabled(nowMs: number): boolean {
    if (this.busy || this.modal !== null) return false;
    const deadline = this.require().stage?.balloon?.balloon_deadline_ms;
    return !(deadline != null && nowMs >= deadline);
  }

  async refresh(): Promise<void> {
    const resp = await this.api.getState(this.sessionId);
    this.accept(resp.seq, resp.state);
  }

  acknowledgeFeedback(): void {
    this.modal = null;
  }

  // -- user gestures -------------------------------------------------------

  async tutorialNext(): Promise<ActionResult> {
    this.requirePhase("tutorial");
    return this.mutate("tutorial-next");
  }

  async submitQuiz(answers: Record<string, QuizAnswer>): Promise<ActionResult> {
    this.requirePhase("quiz");
    return this.mutate("quiz-submit", { answers });
  }

  async submitQuestionnaire(
    questionnaire: "pre" | "post" | "motivation",
    responses: number[],
  ): Promise<ActionResult> {
    return this.mutate("questionnaire-submit", { questionnaire, responses });
  }

  async advanceStage(): Promise<ActionResult> {
    if (!this.require().awaiting_advance) {
      throw new Error("no stage is awaiting advancement");
    }
    return this.mutate("advance-stage");
  }

  async aim(): Promise<ActionResult> {
    return this.mutate("aim", { index: this.currentIndex() });
  }

  async help(): Promise<ActionResult> {
    return this.mutate("help", { index: this.currentIndex() });
  }

  async shoot(): Promise<ActionResult> {
    return this.act("shoot");
  }

  async skip(): Promise<ActionResult> {
    return this.act("skip");
  }

  async tick(): Promise<ActionResult> {
    return this.mutate("tick");
  }

  async submitReviewAnswer(itemId: string, tags: string[]): Promise<ActionResult> {
    return this.mutate("review-answer", { item_id: itemId, tags });
  }

  // -- internals -----------------------------------------------------------

  private require(): Snapshot {
    if (this.snapshot === null) throw new Error("no session state loaded");
    return this.snapshot;
  }

  private requirePhase(phase: Snapshot["phase"]): void {
    const actual = this.require().phase;
    if (actual !== phase) {
      throw new Error(`${phase} is not open (phase=${actual})`);
    }
  }

  private currentIndex(): number {
    const stage = this.require().stage;
    if (stage === null) throw new Error("no stage in progress");
    return stage.balloon_index;
  }

  private async act(action: "shoot" | "skip"): Promise<ActionResult> {
    return this.mutate("act", { index: this.currentIndex(), action });
  }

  private accept(seq: number, state: Snapshot): void {
    this.seq = seq;
    this.snapshot = state;
  }

  private async mutate(
    type: string,
    fields: Record<string, unknown> = {},
  ): Promise<ActionResult> {
    if (this.modal !== null) {
      throw new Error("acknowledge the feedback before acting");
    }
    if (this.busy) throw new Error("another action is already in flight");
    this.busy = true;
    const actionId = this.idGen();
    try {
      for (let attempt = 0; ; attempt++) {
        try {
          const resp = await this.api.postAction(this.sessionId, {
            type,
            seq_expected: this.seq,
            action_id: actionId,
            ...fields,
          });
          this.accept(resp.seq, resp.state);
          const result = resp.result;
          if (result.type === "act" && result.feedback !== null) {
            this.modal = result.feedback;
          }
          return result;
        } catch (err) {
          if (err instanceof NetworkError && attempt < MAX_NETWORK_RETRIES) {
            continue; // retry with the same action id: exactly-once
          }
          if (err instanceof StaleSeqError) {
            await this.refresh();
            throw err;
          }
          if (err instanceof ApiError && err.seq !== undefined && err.seq !== this.seq) {
            // a lazy timer expiry advanced the log while rejecting us
            await this.refresh();
          }
          throw err;
        }
      }
    } finally {
      this.busy = false;
    }
  }
}
