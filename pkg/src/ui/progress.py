"""
Progress reporting for sweeps, figure builds and oracle suites.

Progress is drawn on stderr so tabular output on stdout stays clean.
"""

from __future__ import annotations

import time
from typing import List, Optional

from pydantic import BaseModel
from rich.progress import (
    Progress, SpinnerColumn, TextColumn, BarColumn, TaskProgressColumn,
    TimeElapsedColumn
)


class ProcessingStatus(BaseModel):
    """One finished stage of a long-running command."""
    stage: str
    completed: int
    total: int
    elapsed_time: float


class SweepProgress:
    """
    Transient progress bar counting finished items of one command.

    Usable as a context manager; `advance` doubles as the `progress`
    callback of the library functions that accept one.
    """

    def __init__(self, console, description: str, total: int, enabled: bool = True):
        self.console = console
        self.description = description
        self.total = max(1, total)
        self.enabled = enabled
        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            TimeElapsedColumn(),
            console=console,
            transient=True
        )
        self.task_id = None
        self.start_time: Optional[float] = None
        self.completed = 0
        self.history: List[ProcessingStatus] = []

    def __enter__(self) -> "SweepProgress":
        self.start_time = time.time()
        if self.enabled:
            self.progress.__enter__()
            self.task_id = self.progress.add_task(self.description, total=self.total)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if self.enabled:
            self.progress.__exit__(exc_type, exc_val, exc_tb)

    def advance(self, stage: str = "") -> None:
        """Mark one item done."""
        self.completed += 1
        self.history.append(ProcessingStatus(
            stage=stage,
            completed=self.completed,
            total=self.total,
            elapsed_time=self.get_elapsed_time(),
        ))
        if self.enabled and self.task_id is not None:
            self.progress.update(self.task_id, advance=1, description=f"{self.description} {stage}".strip())

    def get_elapsed_time(self) -> float:
        if self.start_time:
            return time.time() - self.start_time
        return 0.0
