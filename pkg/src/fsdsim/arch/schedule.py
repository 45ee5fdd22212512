"""Cycle schedule of the breadth-first, four-nodes-per-cycle FSD.

Every cycle runs three tasks on three different node groups: the PED
update (``d``), the interference-cancelled observation for the next level
(``b``) and direct enumeration (``de``). Group ``G(level, column)`` holds
four nodes; column ``c`` collects the paths that descend from the ``c``-th
top-level node. Timing per column, for levels 6 down to 0::

    b(L, c)   in the cycle of d(L+1, c)
    de(L, c)  one cycle later
    d(L, c)   when column c comes around again (4 cycles after b for P=4)

With ``P=8`` two columns are handled per task, so each level takes two
cycles instead of four.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import ConfigurationError
from ..fsd import DEFAULT_DISTRIBUTION, NodeDistribution

__all__ = [
    "TOP_LEVEL",
    "N_COLUMNS",
    "GroupId",
    "ScheduleEntry",
    "Hazard",
    "build_schedule",
    "check_hazards",
    "format_trace",
    "parse_trace",
]

TOP_LEVEL = 7
N_COLUMNS = 4
# levels whose symbols are fixed by full expansion (no enumeration needed)
FULL_LEVELS = (7, 6)


@dataclass(frozen=True, order=True)
class GroupId:
    level: int
    column: int

    def __post_init__(self):
        if not 0 <= self.level <= TOP_LEVEL:
            raise ValueError(f"level {self.level} out of range")
        max_col = 1 if self.level == TOP_LEVEL else N_COLUMNS
        if not 1 <= self.column <= max_col:
            raise ValueError(f"column {self.column} out of range for level {self.level}")

    def __str__(self) -> str:
        return f"G{self.level}.{self.column}"

    @classmethod
    def parse(cls, text: str) -> "GroupId":
        level, column = text.strip().lstrip("G").split(".")
        return cls(int(level), int(column))


@dataclass(frozen=True)
class ScheduleEntry:
    cycle: int
    d: tuple[GroupId, ...] = ()
    b: tuple[GroupId, ...] = ()
    de: tuple[GroupId, ...] = ()

    def tasks(self):
        for kind in ("d", "b", "de"):
            for g in getattr(self, kind):
                yield kind, g


@dataclass(frozen=True)
class Hazard:
    kind: str  # "read-before-write" or "overwrite"
    cycle: int
    task: str
    group: GroupId
    detail: str = field(default="", compare=False)


def build_schedule(levels: int = 8, parallelism: int = 4,
                   dist: NodeDistribution = DEFAULT_DISTRIBUTION) -> list[ScheduleEntry]:
    if levels != TOP_LEVEL + 1 or dist.counts != DEFAULT_DISTRIBUTION.counts:
        raise ConfigurationError(f"schedule only defined for 8 levels and {DEFAULT_DISTRIBUTION}")
    if parallelism not in (4, 8):
        raise ConfigurationError(f"parallelism must be 4 or 8, got {parallelism}")
    per_task = parallelism // 4
    slots = N_COLUMNS // per_task

    tasks: dict[int, dict[str, list[GroupId]]] = {}

    def put(cycle, kind, groups):
        tasks.setdefault(cycle, {"d": [], "b": [], "de": []})[kind].extend(groups)

    put(1, "d", [GroupId(7, 1)])
    put(1, "b", [GroupId(6, c) for c in range(1, N_COLUMNS + 1)])
    for level in range(6, -1, -1):
        for slot in range(slots):
            cycle = 2 + slots * (6 - level) + slot
            cols = range(slot * per_task + 1, (slot + 1) * per_task + 1)
            put(cycle, "d", [GroupId(level, c) for c in cols])
            if level > 0:
                put(cycle, "b", [GroupId(level - 1, c) for c in cols])
                put(cycle + 1, "de", [GroupId(level - 1, c) for c in cols])

    return [
        ScheduleEntry(cycle, tuple(t["d"]), tuple(t["b"]), tuple(t["de"]))
        for cycle, t in sorted(tasks.items())
    ]


def _requirements(kind: str, g: GroupId) -> list[tuple[str, GroupId | None, str]]:
    """Producers a task reads from: (task kind, group, what). ``None`` group
    means the value is available at reset."""
    L, c = g.level, g.column
    reqs = []
    if kind == "d":
        reqs.append(("b", None if L == TOP_LEVEL else g, "b"))
        if L <= 5:
            reqs.append(("de", g, "survivor symbol"))
        if L == 6:
            reqs.append(("d", GroupId(7, 1), "parent ped"))
        elif L <= 5:
            reqs.append(("d", GroupId(L + 1, c), "parent ped"))
    elif kind == "b":
        for j in range(L + 1, 6):
            reqs.append(("de", GroupId(j, c), f"symbol of level {j}"))
    elif kind == "de":
        reqs.append(("b", g, "b"))
    return reqs


def check_hazards(schedule: Iterable[ScheduleEntry]) -> list[Hazard]:
    """Dependency check of a schedule.

    Reports a ``read-before-write`` hazard when a task runs in the same or
    an earlier cycle than a producer of one of its inputs, and an
    ``overwrite`` hazard when a b value is replaced in the cache before its
    last reader has run. Hazards are returned, never raised.
    """
    schedule = list(schedule)
    when: dict[tuple[str, GroupId], int] = {}
    for entry in schedule:
        for kind, g in entry.tasks():
            when[(kind, g)] = entry.cycle

    hazards = []
    for entry in schedule:
        for kind, g in entry.tasks():
            for src_kind, src, what in _requirements(kind, g):
                if src is None:
                    continue
                produced = when.get((src_kind, src))
                if produced is None or produced >= entry.cycle:
                    hazards.append(Hazard(
                        "read-before-write", entry.cycle, kind, g,
                        f"{what} from {src_kind}({src}) at cycle {produced}",
                    ))
            # b(L, c) replaces b(L+1, c) in the column's cache entries
            if kind == "b":
                above = GroupId(7, 1) if g.level == 6 else GroupId(g.level + 1, g.column)
                for reader in ("de", "d"):
                    read = when.get((reader, above))
                    if read is not None and read > entry.cycle:
                        hazards.append(Hazard(
                            "overwrite", entry.cycle, kind, g,
                            f"b({above}) still needed by {reader} at cycle {read}",
                        ))
    return hazards


def _fmt(groups) -> str:
    return "|".join(str(g) for g in groups)


def format_trace(schedule: Iterable[ScheduleEntry]) -> str:
    lines = ["cycle,d_group,b_group,de_group"]
    for e in schedule:
        lines.append(f"{e.cycle},{_fmt(e.d)},{_fmt(e.b)},{_fmt(e.de)}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str) -> list[ScheduleEntry]:
    out = []
    for line in text.strip().splitlines()[1:]:
        cycle, d, b, de = line.split(",")

        def groups(field_text):
            return tuple(GroupId.parse(t) for t in field_text.split("|") if t)

        out.append(ScheduleEntry(int(cycle), groups(d), groups(b), groups(de)))
    return out
