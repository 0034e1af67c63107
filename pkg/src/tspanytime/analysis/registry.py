from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..core import Instance
from ..errors import MissingReferenceError
from ..solvers.exact import MAX_EXACT_N, held_karp_exact

SOURCES = ("exact-dp", "best-known")


@dataclass
class ReferenceEntry:
    length: float
    source: str
    provenance: list[str] = field(default_factory=list)


class ReferenceRegistry:
    """Per-instance reference lengths standing in for the optimum.

    Best-known entries only ever decrease. ``version`` increments on every
    change so downstream results can tell whether they are stale.
    """

    def __init__(self):
        self.entries: dict[str, ReferenceEntry] = {}
        self.version = 0

    def __contains__(self, instance_id):
        return instance_id in self.entries

    def __getitem__(self, instance_id) -> ReferenceEntry:
        try:
            return self.entries[instance_id]
        except KeyError:
            raise MissingReferenceError(instance_id) from None

    def length(self, instance_id) -> float:
        return self[instance_id].length

    def length_or_none(self, instance_id):
        e = self.entries.get(instance_id)
        return None if e is None else e.length

    def get(self, instance_id, default=None):
        return self.length_or_none(instance_id) if instance_id in self.entries else default

    def is_stale(self, version: int) -> bool:
        return version != self.version

    def set_exact(self, instance_id: str, length: float):
        cur = self.entries.get(instance_id)
        if cur is None or cur.source != "exact-dp" or cur.length != length:
            self.entries[instance_id] = ReferenceEntry(length, "exact-dp", [])
            self.version += 1

    def observe(self, instance_id: str, length: float, plan_id: str | None = None) -> bool:
        """Fold one observed tour length into a best-known entry; True if the reference moved."""
        cur = self.entries.get(instance_id)
        if cur is not None and cur.source == "exact-dp":
            return False
        if cur is None or length < cur.length:
            prov = [] if cur is None else list(cur.provenance)
            if plan_id and plan_id not in prov:
                prov.append(plan_id)
            self.entries[instance_id] = ReferenceEntry(length, "best-known", prov)
            self.version += 1
            return True
        if plan_id and plan_id not in cur.provenance and length == cur.length:
            cur.provenance.append(plan_id)
        return False

    def to_json(self) -> str:
        d = {k: {"length": _num(e.length), "source": e.source, "provenance": e.provenance}
             for k, e in sorted(self.entries.items())}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReferenceRegistry":
        reg = cls()
        for k, v in json.loads(text).items():
            reg.entries[k] = ReferenceEntry(v["length"], v["source"], list(v.get("provenance", [])))
        return reg

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "ReferenceRegistry":
        return cls.from_json(Path(path).read_text())


def _num(x):
    return int(x) if isinstance(x, float) and x.is_integer() else x


def reference_optimum(instance: Instance, trajectories: Iterable = (), allow_exact: bool = True,
                      registry: ReferenceRegistry | None = None, plan_id: str | None = None) -> ReferenceEntry:
    """Reference length for ``instance``: Held-Karp when small enough, else the best observed final length."""
    registry = registry if registry is not None else ReferenceRegistry()
    if allow_exact and instance.n <= MAX_EXACT_N:
        if instance.id not in registry or registry[instance.id].source != "exact-dp":
            _, opt = held_karp_exact(instance)
            registry.set_exact(instance.id, opt)
        return registry[instance.id]
    for t in trajectories:
        final = t.final_length if hasattr(t, "final_length") else t.final_len
        if final is not None:
            registry.observe(instance.id, final, plan_id or getattr(t, "plan", None))
    if instance.id not in registry:
        raise MissingReferenceError(instance.id)
    return registry[instance.id]
