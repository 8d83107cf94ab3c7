from __future__ import annotations

import typing
from functools import cached_property

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, TextColumn, TimeElapsedColumn
from rich.progress import Progress as RichProgress

if typing.TYPE_CHECKING:
    from types import TracebackType

    from rich.progress import TaskID


class Progress:
    """Progress bar on stderr. Does nothing when disabled or when stderr is not a
    terminal."""

    def __init__(self, total: int = 0, description: str = "Running", enabled: bool = True) -> None:
        self.total = total
        self.description = description
        self.console = Console(stderr=True)
        self.enabled = enabled and self.console.is_terminal
        self.done = 0
        self._task: TaskID | None = None

    @cached_property
    def bar(self) -> RichProgress:
        return RichProgress(
            TextColumn("{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self.console,
            transient=True,
        )

    def __enter__(self) -> Progress:
        if self.enabled:
            self.bar.start()
            self._task = self.bar.add_task(self.description, total=self.total)
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        if self.enabled:
            self.bar.stop()

    def advance(self) -> None:
        self.update(self.total, self.done + 1)

    def update(self, total: int, progress: int) -> None:
        self.total = total
        self.done = progress
        if self._task is not None:
            self.bar.update(self._task, total=total, completed=progress)
