import { ApiClient } from "../src/api";
import { counterIds, GameClient } from "../src/machine";
import type { QuizAnswer } from "../src/types";
import { FakeServer, SCRIPT_BALLOONS } from "./fake-server";

export const QUIZ_ANSWERS: Record<string, QuizAnswer> = {
  "q-001": { verdict: "phishing", tags: ["IpAddressHost"] },
  "q-002": { verdict: "legitimate", tags: [] },
};

export async function freshClient(
  server = new FakeServer(),
): Promise<{ server: FakeServer; api: ApiClient; client: GameClient }> {
  const api = new ApiClient(server.transport);
  const client = await GameClient.create(api, "tester", "corpus.json", 7, counterIds("t"));
  return { server, api, client };
}

/** Drive a fresh client through tutorial + quiz to the first balloon. */
export async function clientInStage() {
  const ctx = await freshClient();
  for (let i = 0; i < 3; i++) await ctx.client.tutorialNext();
  await ctx.client.submitQuiz(QUIZ_ANSWERS);
  return ctx;
}

export { FakeServer, SCRIPT_BALLOONS };
