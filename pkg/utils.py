import json
from pathlib import Path
from typing import Any, Dict

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

console = Console()
error_console = Console(stderr=True)


def print_error(message: str, title: str = "error") -> None:
    error_console.print(Panel(message, title=title, style="red"))


class ProgressSpinner:
    """Shows a spinner with status text"""
    def __init__(self, text: str, enabled: bool = True):
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=error_console,
            transient=True,
            disable=not enabled,
        )
        self.task_id = self.progress.add_task(text, total=None)

    def update(self, text: str):
        self.progress.update(self.task_id, description=text)

    def __enter__(self):
        self.progress.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.progress.stop()


def dump_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_report(report: Dict[str, Any], path: str | Path) -> None:
    Path(path).write_text(dump_report(report))


def _factors(values) -> str:
    return " ⊕ ".join(f"Z/{f}" for f in values) if values else "0"


def results_table(command: str, results: Any) -> Table:
    """Human summary of a report's results"""
    table = Table(title=command)
    if command == "verify":
        table.add_column("suite")
        table.add_column("checked", justify="right")
        table.add_column("skipped", justify="right")
        table.add_column("counterexamples", justify="right")
        table.add_row(
            results["suite"],
            str(results["checked"]),
            str(results["skipped"]),
            f"[red]{len(results['counterexamples'])}[/red]" if results["counterexamples"] else "0",
        )
        return table
    if command == "catalog":
        table.add_column("entry")
        table.add_column("result")
        for row in results:
            table.add_row(row["entry"]["name"], row.get("summary", row.get("skipped", "")))
        return table
    table.add_column("quantity")
    table.add_column("value")
    for key, value in sorted(results.items()):
        if key in ("invariant_factors", "ambient"):
            value = _factors(value)
        elif isinstance(value, dict) and "invariant_factors" in value:
            value = _factors(value["invariant_factors"])
        elif isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
            value = value if len(value) <= 80 else value[:77] + "..."
        table.add_row(key, str(value))
    return table


def timing_table(metrics: Dict[str, Any]) -> Table:
    table = Table(title=f"timing ({metrics['elapsed_ms']} ms)")
    table.add_column("stage")
    table.add_column("calls", justify="right")
    table.add_column("total ms", justify="right")
    for name, stage in metrics["stages"].items():
        table.add_row(name, str(stage["calls"]), str(stage["total_ms"]))
    return table
