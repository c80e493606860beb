/** Browser entry point: wires the state machine to a minimal DOM shell.
 *
 * The canvas draws drifting balloons (cosmetic only); every gesture maps
 * to exactly one GameClient call.  The session id lives in the URL hash so
 * a reload resumes the same server-side session.
 */

import { ApiClient, ApiError, fetchTransport } from "./api";
import { GameClient } from "./machine";
import type { QuizAnswer, Snapshot } from "./types";
import { balloonPosition, hudLine } from "./view";

const TAGS = [
  "IpAddressHost", "UserinfoDeception", "Typosquat",
  "HomoglyphSubstitution", "DeceptiveSubdomain", "HyphenatedBrand",
  "WrongTld", "NoHttps", "LinkTextMismatch", "ReplyToMismatch",
  "UrgentLanguage",
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  return node;
}

class App {
  private client: GameClient | null = null;
  private readonly api = new ApiClient(fetchTransport(""));
  private readonly root = document.getElementById("app") ?? document.body;
  private readonly hud = el("div");
  private readonly screen = el("div");
  private readonly canvas = el("canvas");
  private pollTimer: number | undefined;

  async start(): Promise<void> {
    this.canvas.width = 720;
    this.canvas.height = 420;
    this.root.append(this.hud, this.canvas, this.screen);
    const sessionId = location.hash.slice(1);
    this.client = sessionId
      ? await GameClient.resume(this.api, sessionId)
      : await this.createFromPrompt();
    location.hash = this.client.sessionId;
    this.pollTimer = window.setInterval(() => void this.poll(), 1000);
    requestAnimationFrame((t) => this.draw(t));
    this.render();
  }

  private async createFromPrompt(): Promise<GameClient> {
    const player = window.prompt("player id", "player") ?? "player";
    return GameClient.create(this.api, player, "corpus.json", Date.now() % 100000);
  }

  private async poll(): Promise<void> {
    const c = this.client;
    if (c === null || c.modal !== null) return;
    try {
      await c.refresh();
      this.render();
    } catch {
      // transient; the next poll retries
    }
  }

  private async run(gesture: () => Promise<unknown>): Promise<void> {
    try {
      await gesture();
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      // conflict or rejection: the machine already refetched where needed
    }
    this.render();
  }

  private render(): void {
    const c = this.client;
    if (c === null || c.snapshot === null) return;
    const s = c.snapshot;
    this.hud.textContent = hudLine(s, Date.now());
    this.screen.replaceChildren();
    if (c.modal !== null) return this.renderModal(c.modal.fact, c.modal.advice);
    switch (s.phase) {
      case "tutorial": return this.renderTutorial(s);
      case "quiz": return this.renderQuiz(s);
      case "stage": return this.renderStage(s);
      default: return this.renderAfterStages(s);
    }
  }

  private renderModal(fact: string, advice: [string, string][]): void {
    const box = el("div");
    box.className = "modal";
    box.append(el("h2", "That one was real."), el("p", fact));
    for (const [, text] of advice) box.append(el("li", text));
    const ok = el("button", "Got it");
    ok.onclick = () => {
      this.client?.acknowledgeFeedback();
      this.render();
    };
    box.append(ok);
    this.screen.append(box);
  }

  private renderTutorial(s: Snapshot): void {
    const step = s.tutorial.current;
    this.screen.append(
      el("h2", `Walkthrough ${s.tutorial.step + 1}/${s.tutorial.total}`),
      el("pre", step ? JSON.stringify(step, null, 2) : ""),
    );
    const next = el("button", "Next"); // Next-only: the walkthrough cannot be skipped
    next.onclick = () => void this.run(() => this.client!.tutorialNext());
    this.screen.append(next);
  }

  private renderQuiz(s: Snapshot): void {
    const answers: Record<string, QuizAnswer> = {};
    this.screen.append(el("h2", "Quiz"));
    for (const q of s.quiz ?? []) {
      const row = el("div");
      row.append(el("pre", q.display_text));
      const verdict = el("select");
      verdict.append(new Option("legitimate"), new Option("phishing"));
      const tagBoxes: [string, HTMLInputElement][] = TAGS.map((t) => {
        const box = el("input");
        box.type = "checkbox";
        const label = el("label", t);
        label.prepend(box);
        row.append(label);
        return [t, box];
      });
      row.prepend(verdict);
      this.screen.append(row);
      Object.defineProperty(answers, q.item_id, {
        enumerable: true,
        get: (): QuizAnswer => ({
          verdict: verdict.value as QuizAnswer["verdict"],
          tags: tagBoxes.filter(([, b]) => b.checked).map(([t]) => t),
        }),
      });
    }
    const submit = el("button", "Submit quiz");
    submit.onclick = () => void this.run(() => this.client!.submitQuiz({ ...answers }));
    this.screen.append(submit);
  }

  private renderStage(s: Snapshot): void {
    const balloon = s.stage?.balloon;
    if (!balloon) return;
    if (!balloon.aimed) {
      const aim = el("button", "Aim");
      aim.onclick = () => void this.run(() => this.client!.aim());
      this.screen.append(aim);
      return;
    }
    // The reveal dialog: full raw text, selectable and zoomable.
    const payload = el("pre", balloon.display_text ?? "");
    payload.className = "payload";
    this.screen.append(payload);
    if (balloon.hint !== null) this.screen.append(el("p", `Jerry: ${balloon.hint}`));
    const enabled = this.client!.controlsEnabled(Date.now());
    for (const [label, go] of [
      ["Shoot", () => this.client!.shoot()],
      ["Skip", () => this.client!.skip()],
      ["Ask Jerry", () => this.client!.help()],
    ] as const) {
      const btn = el("button", label);
      btn.disabled = !enabled;
      btn.onclick = () => void this.run(go);
      this.screen.append(btn);
    }
  }

  private renderAfterStages(s: Snapshot): void {
    if (s.awaiting_advance) {
      const btn = el("button", "Next stage");
      btn.onclick = () => void this.run(() => this.client!.advanceStage());
      this.screen.append(el("h2", "Stage complete"), btn);
    }
    for (const item of s.review?.items ?? []) {
      if (item.answered) continue;
      const row = el("div");
      row.append(el("pre", item.display_text));
      const picked = new Set<string>();
      for (const t of TAGS) {
        const box = el("input");
        box.type = "checkbox";
        box.onchange = () => (box.checked ? picked.add(t) : picked.delete(t));
        const label = el("label", t);
        label.prepend(box);
        row.append(label);
      }
      const send = el("button", "Answer");
      send.onclick = () =>
        void this.run(() => this.client!.submitReviewAnswer(item.item_id, [...picked]));
      row.append(send);
      this.screen.append(row);
    }
    if (s.phase === "done") {
      this.screen.append(el("h2", `Done — total score ${s.total_score}`));
      if (this.pollTimer !== undefined) clearInterval(this.pollTimer);
    }
  }

  private draw(t: number): void {
    const ctx = this.canvas.getContext("2d");
    const stage = this.client?.snapshot?.stage;
    if (ctx) {
      ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
      if (stage) {
        for (let i = stage.balloon_index; i < stage.balloon_count; i++) {
          const p = balloonPosition(i, t, this.canvas.width, this.canvas.height);
          ctx.beginPath();
          ctx.arc(p.x, p.y, i === stage.balloon_index ? 26 : 16, 0, Math.PI * 2);
          ctx.fillStyle = i === stage.balloon_index ? "#d33" : "#99c";
          ctx.fill();
        }
      }
    }
    requestAnimationFrame((next) => this.draw(next));
  }
}

void new App().start();
