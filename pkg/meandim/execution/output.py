"""Output formatting and display for experiment results"""

import json
from pathlib import Path
from typing import Dict, List

import pandas as pd
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from meandim.execution.runner import ExperimentResult
from meandim.utils import to_jsonable


class OutputFormatter:
    """Writes results.json / results.csv and renders run summaries"""

    def __init__(self, console: Console = None):
        self.console = console or Console(stderr=True)

    def format_json(self, results: List[ExperimentResult], metadata: Dict = None) -> str:
        """Deterministic JSON: config order, sorted keys, no timestamps"""
        output = {
            "metadata": to_jsonable(metadata or {}),
            "total_experiments": len(results),
            "experiments": [r.to_dict() for r in results],
        }
        return json.dumps(output, indent=2, sort_keys=True, allow_nan=False)

    def format_frame(self, results: List[ExperimentResult]) -> pd.DataFrame:
        """Flat rows of every experiment, prefixed by experiment name and kind"""
        frames = []
        for result in results:
            rows = to_jsonable(result.rows)
            if not rows:
                continue
            frame = pd.DataFrame(rows)
            frame.insert(0, "kind", result.kind)
            frame.insert(0, "experiment", result.name)
            frames.append(frame)
        if not frames:
            return pd.DataFrame(columns=["experiment", "kind"])
        return pd.concat(frames, ignore_index=True, sort=False)

    def save_results(self, results: List[ExperimentResult], out_dir: str, formats: List[str],
                     metadata: Dict = None) -> List[str]:
        """Write the requested formats and return the file names"""
        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        written = []
        if "json" in formats:
            path = target / "results.json"
            path.write_text(self.format_json(results, metadata) + "\n", encoding="utf-8")
            written.append(path.name)
        if "csv" in formats:
            path = target / "results.csv"
            self.format_frame(results).to_csv(path, index=False, float_format="%.12g")
            written.append(path.name)
        return written

    def _create_rich_table(self, results: List[ExperimentResult]) -> Table:
        table = Table(title="meandim results", show_header=True, header_style="bold magenta")
        table.add_column("Experiment", style="bold cyan")
        table.add_column("Kind", style="dim")
        table.add_column("Headline", style="bold white", justify="right")
        table.add_column("Checks", justify="center")
        table.add_column("Unconverged", justify="right")
        table.add_column("Time", style="dim", justify="right")

        for result in results:
            headline = self._headline(result)
            failed = [k for k, v in result.checks.items() if not v]
            checks = "[green]pass[/green]" if not failed else f"[red]fail: {', '.join(failed)}[/red]"
            table.add_row(result.name, result.kind, headline, checks if result.checks else "-",
                          str(result.unconverged), f"{result.duration:.2f}s")
        return table

    @staticmethod
    def _headline(result: ExperimentResult) -> str:
        payload = result.payload
        if "estimate" in payload:
            estimate = payload["estimate"]
            value = estimate.get("slope", estimate.get("value"))
            return f"{value:.4f}" if isinstance(value, float) else str(value)
        if "rdim" in payload and payload["rdim"] is not None:
            return f"rdim {payload['rdim']['slope']:.4f}"
        if "density" in payload:
            return f"density {payload['density']['density']:.4f}"
        if "prodim" in payload:
            return f"prodim {payload['prodim']['value']:.4f}"
        if "stages" in payload:
            return f"{len(payload['stages'])} depths"
        if "suite" in payload:
            return payload["suite"]
        return "-"

    def display_results(self, results: List[ExperimentResult]):
        if not results:
            self.console.print("No experiments were run.", style="yellow")
            return
        self.console.print(self._create_rich_table(results))

    def display_summary(self, results: List[ExperimentResult], written: List[str], out_dir: str):
        failed = [r.name for r in results if not r.passed]
        unconverged = sum(r.unconverged for r in results)
        lines = [f"Experiments: {len(results)}", f"Outputs: {', '.join(written)} in {out_dir}"]
        if unconverged:
            lines.append(f"[red]Unconverged RD points: {unconverged}[/red]")
        if failed:
            lines.append(f"[yellow]Failed checks in: {', '.join(failed)}[/yellow]")
        border = "green" if not failed and not unconverged else "red"
        self.console.print(Panel("\n".join(lines), title="Run summary", border_style=border))
