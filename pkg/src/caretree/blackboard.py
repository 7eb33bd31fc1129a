"""Shared typed key-value store that leaves and decorators read and write."""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import MissingKeyError
from .values import TypedValue, value_kind


class Blackboard:
    """Last-write-wins store; reads of absent keys raise, never default."""

    def __init__(
        self,
        entries: dict[str, TypedValue] | None = None,
        on_write: Callable[[str, TypedValue], None] | None = None,
    ):
        self._entries: dict[str, TypedValue] = {}
        self.on_write = on_write
        for key, value in (entries or {}).items():
            value_kind(value)  # reject unsupported types up front
            self._entries[key] = value

    def get(self, key: str) -> TypedValue:
        if key not in self._entries:
            raise MissingKeyError(key)
        return self._entries[key]

    def set(self, key: str, value: TypedValue, record: bool = True) -> None:
        value_kind(value)
        self._entries[key] = value
        if record and self.on_write is not None:
            self.on_write(key, value)

    def has(self, key: str) -> bool:
        return key in self._entries

    def keys(self) -> Iterable[str]:
        return self._entries.keys()

    def snapshot(self) -> dict[str, TypedValue]:
        return dict(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)
