#!/usr/bin/env python3
"""Audit a directory of session event logs.

For each log: replays it, verifies recomputed scores/lives against the
recorded events, and prints a one-line summary (scores, lives endings,
review completion).

Usage:
    python3 scripts/replay_audit.py RUNS_DIR
"""

import argparse
import sys
from pathlib import Path

from phishgame.session import read_events, replay, verify_log


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("runs_dir", type=Path)
    args = ap.parse_args()

    logs = sorted(p for p in args.runs_dir.glob("*.jsonl")
                  if not p.name.endswith(".responses.jsonl"))
    if not logs:
        print(f"no event logs under {args.runs_dir}", file=sys.stderr)
        sys.exit(1)

    bad = 0
    for path in logs:
        events = read_events(path)
        state = replay(events)
        failures = verify_log(events)
        status = "ok" if not failures else f"DIVERGENT at seq {failures[0].seq}"
        scores = ", ".join(f"{s}={v}" for s, v in state.stage_scores.items())
        print(f"{path.name}: {len(events)} events, phase={state.phase}, "
              f"[{scores}] — {status}")
        bad += bool(failures)
    sys.exit(1 if bad else 0)


if __name__ == "__main__":
    main()
