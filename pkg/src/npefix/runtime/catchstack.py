"""Runtime model of open try frames.

Injected calls keep this stack in sync with execution: a frame is pushed
when a try body is entered and removed at the head of every catch and
finally. Removal is tolerant: removing an id twice, or one that is not on
top, is a no-op, because normal control flow legitimately reaches both the
catch and the finally of the same try.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..minij.typecheck import TypeTable


@dataclass
class CatchFrame:
    try_id: int
    types: tuple[str, ...]


class CatchStack:
    def __init__(self, table: TypeTable, trace: list[str] | None = None):
        self.table = table
        self.frames: list[CatchFrame] = []
        self.trace = trace

    def add(self, try_id: int, types: tuple[str, ...]):
        self.frames.append(CatchFrame(try_id, types))
        if self.trace is not None:
            self.trace.append(f"add {try_id} ({', '.join(types)})")

    def remove(self, try_id: int):
        for i in range(len(self.frames) - 1, -1, -1):
            if self.frames[i].try_id == try_id:
                del self.frames[i]
                if self.trace is not None:
                    self.trace.append(f"remove {try_id}")
                return
        if self.trace is not None:
            self.trace.append(f"remove {try_id} (absent)")

    def will_be_caught(self, exception_type: str) -> bool:
        """True iff some open frame catches the type or a supertype of it."""
        caught = any(
            self.table.is_subtype(exception_type, t)
            for frame in self.frames for t in frame.types)
        if self.trace is not None:
            self.trace.append(f"query {exception_type} -> {caught}")
        return caught

    def depth(self) -> int:
        return len(self.frames)
