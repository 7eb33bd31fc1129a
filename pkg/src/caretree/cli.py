"""Command-line front door: validate, convert, run, step, render, serve."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .dot import export_dot
from .dsl import parse_tree, serialize
from .errors import (
    BudgetExceededError,
    CareTreeError,
    ConversionError,
    DeadlockError,
    ParseError,
)
from .flowchart import check_equivalence, convert_to_bt, parse_flowchart, validate_flowchart
from .session import ADVANCE, Session
from .sim import estimate_success_probability, load_scenario, run_scenario
from .trace import HALTED, NODE_ENTERED, NODE_RETURNED, ExecutionTrace
from .tree import Status, validate

pass_through_errors = (ParseError, CareTreeError)


@click.group()
@click.version_option(package_name="caretree")
def main() -> None:
    """Behavior-tree tooling for stepwise protocols."""


def _parse_file(path: Path):
    try:
        return parse_tree(path.read_text(), name=path.stem, source=str(path))
    except ParseError as exc:
        raise click.ClickException(str(exc))


@main.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_cmd(file: Path) -> None:
    """Parse FILE and report structural violations."""
    tree = _parse_file(file)
    problems = validate(tree)
    if problems:
        for problem in problems:
            click.echo(f"{file.name}: {problem}")
        sys.exit(1)
    click.echo(f"{file.name}: ok ({len(tree.nodes)} nodes)")


@main.command("convert")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), help="Write the tree here instead of stdout.")
@click.option("--verify/--no-verify", default=True, help="Check chart/tree equivalence after converting.")
def convert_cmd(file: Path, output: Path | None, verify: bool) -> None:
    """Convert a flowchart JSON file to an equivalent tree."""
    chart = parse_flowchart(json.loads(file.read_text()))
    problems = validate_flowchart(chart)
    if problems:
        for problem in problems:
            click.echo(f"{file.name}: {problem}", err=True)
        sys.exit(1)
    try:
        tree = convert_to_bt(chart)
    except ConversionError as exc:
        raise click.ClickException(str(exc))
    text = serialize(tree)
    if output:
        output.write_text(text)
        click.echo(f"wrote {output}")
    else:
        click.echo(text, nl=False)
    if verify:
        report = check_equivalence(chart, tree)
        if not report.equivalent:
            raise click.ClickException(f"converted tree disagrees with the chart: {report.counterexample}")
        mode = "exhaustively" if report.exhaustive else f"on {report.trials} sampled runs"
        click.echo(f"verified equivalent {mode}", err=True)


@main.command("run")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--trials", type=int, default=None, help="Estimate success probability over this many seeded trials.")
@click.option("--seed", type=int, default=None, help="Override the scenario's seed.")
@click.option("--trace", "trace_out", type=click.Path(dir_okay=False, path_type=Path), help="Write the run's trace as JSON lines.")
def run_cmd(file: Path, trials: int | None, seed: int | None, trace_out: Path | None) -> None:
    """Run a scenario file to completion."""
    scenario = load_scenario(json.loads(file.read_text()))
    if seed is not None:
        scenario = scenario.with_seed(seed)
    if trials is not None:
        estimate = estimate_success_probability(scenario, trials=trials, base_seed=scenario.seed)
        click.echo(f"{scenario.name or file.stem}: success probability ~ {estimate:.4f} over {trials} trials")
        return
    try:
        result = run_scenario(scenario)
    except (BudgetExceededError, DeadlockError) as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{scenario.name or file.stem}: {result.status.value} after {result.ticks} ticks, t={result.time:g}s")
    if trace_out:
        trace_out.write_text(result.trace.to_jsonl())
        click.echo(f"trace written to {trace_out}")


@main.command("step")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=0)
@click.option("--set", "assignments", multiple=True, metavar="KEY=JSON", help="Seed a blackboard key before starting (repeatable).")
def step_cmd(file: Path, seed: int, assignments: tuple[str, ...]) -> None:
    """Walk a tree interactively, answering each pending query by hand."""
    tree = _parse_file(file)
    blackboard = {}
    for assignment in assignments:
        key, sep, raw = assignment.partition("=")
        if not sep:
            raise click.BadParameter(f"expected KEY=JSON, got {assignment!r}", param_hint="--set")
        try:
            blackboard[key] = json.loads(raw)
        except json.JSONDecodeError:
            blackboard[key] = raw
    session = Session("local", file.stem, tree, seed=seed, blackboard=blackboard)
    while session.status is Status.RUNNING and session.pending is not None:
        pending = session.pending
        if pending.kind == "advance":
            if not click.confirm(f"{pending.prompt} — advance?", default=True):
                click.echo("stopped while still running")
                return
            session.submit(ADVANCE, None)
            continue
        answer = click.prompt(
            f"{pending.prompt} [s=success / f=failure / q=quit]",
            type=click.Choice(["s", "f", "q"]),
            show_choices=False,
        )
        if answer == "q":
            click.echo("stopped while still running")
            return
        session.submit(pending.leaf_name, Status.SUCCESS if answer == "s" else Status.FAILURE)
    click.echo(f"finished: {session.status.value} at t={session.engine.clock.now:g}s")


def _statuses_from_trace(text: str) -> dict[str, Status]:
    statuses: dict[str, Status] = {}
    for event in ExecutionTrace.from_jsonl(text):
        if event.kind == NODE_ENTERED and event.node_id:
            statuses[event.node_id] = Status.RUNNING
        elif event.kind == NODE_RETURNED and event.node_id and event.status:
            statuses[event.node_id] = event.status
        elif event.kind == HALTED and event.node_id:
            statuses.pop(event.node_id, None)
    return statuses


@main.command("render")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--status", "status_trace", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Color nodes by the latest status in this trace (.jsonl).")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), help="Write DOT here instead of stdout.")
def render_cmd(file: Path, status_trace: Path | None, output: Path | None) -> None:
    """Export a tree as Graphviz DOT, optionally colored by a run's trace."""
    tree = _parse_file(file)
    statuses = _statuses_from_trace(status_trace.read_text()) if status_trace else None
    dot = export_dot(tree, statuses=statuses, title=file.stem)
    if output:
        output.write_text(dot)
        click.echo(f"wrote {output}")
    else:
        click.echo(dot, nl=False)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", "-p", envvar="BT_PORT", default=8000, show_default=True, type=int)
@click.option("--data-dir", envvar="BT_DATA_DIR", default="caretree_data", show_default=True, type=click.Path(file_okay=False, path_type=Path))
@click.option("--corpus-dir", envvar="BT_CORPUS_DIR", default=None, type=click.Path(exists=True, file_okay=False, path_type=Path), help="Load protocols from this directory instead of the bundled corpus.")
@click.option("--frontend-dir", default=None, type=click.Path(file_okay=False, path_type=Path), help="Serve this built frontend at / (defaults to ./frontend/dist when present).")
def serve_cmd(host: str, port: int, data_dir: Path, corpus_dir: Path | None, frontend_dir: Path | None) -> None:
    """Start the HTTP API (and the stepper UI, when built)."""
    import uvicorn

    from .service import create_app

    if frontend_dir is None:
        candidate = Path("frontend") / "dist"
        frontend_dir = candidate if candidate.is_dir() else None
    app = create_app(data_dir=data_dir, corpus_directory=corpus_dir, frontend_dir=frontend_dir)
    click.echo(f"serving on http://{host}:{port} (data in {data_dir})")
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
