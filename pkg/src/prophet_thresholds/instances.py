"""Ordered item sequences with type labels and partition metadata."""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import Distribution
from .errors import LengthMismatch


@dataclass
class InstanceSequence:
    """Ordered items, their type labels and optional partition metadata ``(k, m)``."""

    items: tuple[Distribution, ...]
    type_ids: tuple = None
    partition: tuple[int, int] | None = None

    def __post_init__(self):
        self.items = tuple(self.items)
        if self.type_ids is None:
            ids: dict[Distribution, int] = {}
            self.type_ids = tuple(ids.setdefault(d, len(ids)) for d in self.items)
        else:
            self.type_ids = tuple(self.type_ids)
        if len(self.type_ids) != len(self.items):
            raise LengthMismatch("one type id per item required")
        seen: dict = {}
        for t, d in zip(self.type_ids, self.items):
            if seen.setdefault(t, d) != d:
                raise ValueError(f"type id {t!r} labels two different distributions")
        if self.partition is not None:
            k, m = (int(v) for v in self.partition)
            self.partition = (k, m)
            if k * m != len(self.items):
                raise ValueError(f"partition k={k}, m={m} does not cover {len(self.items)} items")
            base = sorted(self.type_ids[:k], key=repr)
            for b in range(1, m):
                if sorted(self.type_ids[b * k:(b + 1) * k], key=repr) != base:
                    raise ValueError(f"block {b} is not a permutation of block 0")

    def __len__(self):
        return len(self.items)

    @classmethod
    def iid(cls, d: Distribution, n: int) -> "InstanceSequence":
        return cls((d,) * n, (0,) * n)

    def types(self) -> dict:
        """Type id to its distribution, in order of first appearance."""
        out: dict = {}
        for t, d in zip(self.type_ids, self.items):
            out.setdefault(t, d)
        return out

    def counts(self) -> dict:
        out: dict = {}
        for t in self.type_ids:
            out[t] = out.get(t, 0) + 1
        return out
