/** Pure presentation helpers.
 *
 * Balloon motion is cosmetic only: positions are a deterministic function
 * of the balloon index and an animation clock, so visuals can never alter
 * the logical schedule, which comes entirely from the server.
 */

import type { Snapshot } from "./types";

export interface Point {
  x: number;
  y: number;
}

export function balloonPosition(
  index: number,
  clockMs: number,
  width: number,
  height: number,
): Point {
  const t = clockMs / 1000;
  const lane = (index * 0.37) % 1;
  return {
    x: width * (0.15 + 0.7 * lane) + Math.sin(t * 0.9 + index) * width * 0.05,
    y: height * (0.75 - 0.4 * ((t * 0.08 + index * 0.21) % 1)),
  };
}

export function formatMs(remaining: number): string {
  const s = Math.max(0, Math.ceil(remaining / 1000));
  return `${Math.floor(s / 60)}:${String(s % 60).padStart(2, "0")}`;
}

/** One-line HUD summary; also what the tests inspect. */
export function hudLine(snapshot: Snapshot, nowMs: number): string {
  const st = snapshot.stage;
  if (st === null) {
    return `phase ${snapshot.phase} — total score ${snapshot.total_score}`;
  }
  const parts = [
    `stage ${st.name}`,
    `balloon ${st.balloon_index + 1}/${st.balloon_count}`,
    `lives ${st.lives}`,
    `score ${st.score}`,
  ];
  if (st.stage_deadline_ms !== null) {
    parts.push(`time ${formatMs(st.stage_deadline_ms - nowMs)}`);
  }
  const deadline = st.balloon?.balloon_deadline_ms;
  if (deadline != null) {
    parts.push(`balloon ${formatMs(deadline - nowMs)}`);
  }
  return parts.join("  ");
}
