"""Operator commands: corpora, server, bot cohorts, reports, log verification.

Every command is a thin composition of module operations.  Randomness
enters only through explicit ``--seed`` flags; failures exit nonzero with
one machine-readable ``error: <kind>: <detail>`` line on stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .assessment import AssessmentRecord, build_record, format_report_text, test_hypotheses
from .corpus import (
    CorpusFormatError,
    GenerationSpec,
    default_brands,
    load_brands,
    generate_corpus,
    read_corpus,
    write_corpus,
)
from .session import EventLogFormatError, SessionError, read_events, verify_log, write_events
from .simulation import read_cohort, run_cohort_with_logs


def _fail(kind: str, detail: str, code: int = 1) -> None:
    click.echo(f"error: {kind}: {detail}", err=True)
    sys.exit(code)


@click.group()
@click.version_option(package_name="phishgame")
def main() -> None:
    """Phishing-awareness balloon-shooter: corpora, server, simulation, reports."""


# ---------------------------------------------------------------------------
# corpus


@main.group()
def corpus() -> None:
    """Generate and inspect item corpora."""


@corpus.command("generate")
@click.option("--brands", "brands_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Brand seed JSON (defaults to the built-in list).")
@click.option("--seed", type=int, required=True)
@click.option("--count", type=int, required=True)
@click.option("--fake-fraction", type=float, default=0.5, show_default=True)
@click.option("--kind-mix", type=float, default=0.3, show_default=True,
              help="Fraction of items that are emails rather than bare URLs.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
def corpus_generate(brands_file, seed, count, fake_fraction, kind_mix, out_file) -> None:
    """Write a deterministic JSONL corpus; same flags, byte-identical file."""
    try:
        brands = load_brands(brands_file) if brands_file else default_brands()
        spec = GenerationSpec(seed=seed, count=count,
                              fake_fraction=fake_fraction, kind_mix=kind_mix)
        items = generate_corpus(brands, spec)
    except (ValueError, OSError) as exc:
        _fail("generation", str(exc))
    write_corpus(items, out_file)
    fakes = sum(1 for it in items if not it.legitimate)
    click.echo(f"wrote {len(items)} items ({fakes} fake) to {out_file}")


# ---------------------------------------------------------------------------
# serve


@main.command()
@click.option("--data-dir", type=click.Path(file_okay=False),
              envvar="PHISHGAME_DATA_DIR", required=True,
              help="Directory for corpora, session logs and the index.")
@click.option("--bind", default="127.0.0.1:8000", show_default=True,
              help="host:port to listen on.")
def serve(data_dir, bind) -> None:
    """Run the HTTP service (JSON protocol; see docs/protocol.md)."""
    import uvicorn

    from .service import create_app

    try:
        host, _, port_s = bind.rpartition(":")
        port = int(port_s)
        if not host:
            raise ValueError(bind)
    except ValueError:
        _fail("bad-bind", f"expected host:port, got {bind!r}")
    app = create_app(data_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


# ---------------------------------------------------------------------------
# simulate


@main.command()
@click.option("--cohort", "cohort_file", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Cohort JSON: {v, profiles: [...]}.")
@click.option("--corpus", "corpus_file", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True,
              help="Directory for per-session event logs and records.json.")
def simulate(cohort_file, corpus_file, seed, out_dir) -> None:
    """Run every profile in the cohort through a full session."""
    try:
        profiles = read_cohort(cohort_file)
        items = read_corpus(corpus_file)
    except (CorpusFormatError, ValueError) as exc:
        _fail("bad-input", str(exc))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        runs = run_cohort_with_logs(profiles, items, seed)
    except SessionError as exc:
        _fail("simulation", str(exc))
    records = []
    for profile, (state, events, record) in zip(profiles, runs):
        write_events(events, out / f"{state.session_id}.jsonl")
        records.append(record.to_dict())
    with open(out / "records.json", "w", encoding="utf-8") as fh:
        json.dump(records, fh, indent=2)
        fh.write("\n")
    click.echo(f"simulated {len(records)} sessions into {out_dir}")


# ---------------------------------------------------------------------------
# report


@main.command()
@click.option("--sessions", "sessions_dir", type=click.Path(exists=True, file_okay=False),
              required=True, help="Directory of per-session event logs (*.jsonl).")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here (otherwise print text).")
@click.option("--alpha", type=float, default=0.05, show_default=True)
def report(sessions_dir, out_file, alpha) -> None:
    """Derive per-session knowledge metrics and the hypothesis report."""
    logs = sorted(Path(sessions_dir).glob("*.jsonl"))
    records: list[AssessmentRecord] = []
    for path in logs:
        if path.name.endswith(".responses.jsonl"):
            continue
        try:
            records.append(build_record(read_events(path)))
        except (EventLogFormatError, SessionError) as exc:
            _fail("bad-log", f"{path.name}: {exc}")
    if not records:
        _fail("no-input", f"no event logs under {sessions_dir}")
    try:
        rep = test_hypotheses(records, alpha=alpha)
    except ValueError as exc:
        _fail("insufficient-data", str(exc))
    if out_file:
        doc = {"records": [r.to_dict() for r in records], "report": rep.to_dict()}
        with open(out_file, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        click.echo(f"wrote report over {len(records)} sessions to {out_file}")
    else:
        click.echo(format_report_text(rep, records))


# ---------------------------------------------------------------------------
# verify


@main.command()
@click.option("--session", "session_file", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Event log to replay and audit.")
def verify(session_file) -> None:
    """Replay a log, recompute scores/lives from ground truth; exit 1 on divergence."""
    try:
        events = read_events(session_file)
    except EventLogFormatError as exc:
        _fail("bad-log", str(exc))
    failures = verify_log(events)
    if failures:
        for f in failures:
            click.echo(f"error: divergence: seq={f.seq}: {f.reason}", err=True)
        sys.exit(1)
    click.echo(f"ok: {len(events)} events verified")


if __name__ == "__main__":
    main()
