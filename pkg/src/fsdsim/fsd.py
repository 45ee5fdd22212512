"""Floating-point reference of the fixed-complexity sphere decoder (FSD).

The tree has ``n = 2 n_t`` levels; array index ``i`` of a path is level
``i`` and the search runs from level ``n - 1`` down to ``0``. At a level with
full expansion every child of every surviving path is kept; at a level with
single expansion each path keeps only the child chosen by direct
enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ConfigurationError, InputShapeError
from .mimo import QAM16, Constellation, real_to_bits

__all__ = [
    "NodeDistribution",
    "DEFAULT_DISTRIBUTION",
    "Candidate",
    "CandidateList",
    "compute_b",
    "direct_enumerate",
    "accumulate_ped",
    "fsd_search",
    "hard_decision",
    "path_ped",
]


@dataclass(frozen=True)
class NodeDistribution:
    """Children kept per parent at each level.

    ``counts[i]`` belongs to level ``i``. The compact string form lists
    level 0 first, so ``"11111144"`` expands fully at levels 6 and 7.
    """

    counts: tuple[int, ...]
    n_branches: int = 4

    def __post_init__(self):
        if not self.counts:
            raise ConfigurationError("empty node distribution")
        bad = [c for c in self.counts if c not in (1, self.n_branches)]
        if bad:
            raise ConfigurationError(
                f"node counts must be 1 or {self.n_branches}, got {list(self.counts)}"
            )

    @classmethod
    def parse(cls, text: str, n_branches: int = 4) -> "NodeDistribution":
        text = text.strip().strip("{}").replace(",", "").replace(" ", "")
        if not text.isdigit():
            raise ConfigurationError(f"cannot parse node distribution {text!r}")
        return cls(tuple(int(ch) for ch in text), n_branches)

    def __str__(self) -> str:
        return "".join(str(c) for c in self.counts)

    @property
    def n_levels(self) -> int:
        return len(self.counts)

    @property
    def list_size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def nodes_per_level(self) -> tuple[int, ...]:
        """Visited nodes at each level (index = level)."""
        out = [0] * self.n_levels
        alive = 1
        for level in range(self.n_levels - 1, -1, -1):
            alive *= self.counts[level]
            out[level] = alive
        return tuple(out)

    @property
    def visited_nodes(self) -> int:
        return sum(self.nodes_per_level)


DEFAULT_DISTRIBUTION = NodeDistribution((1, 1, 1, 1, 1, 1, 4, 4))


@dataclass(frozen=True)
class Candidate:
    path: np.ndarray
    ped: float
    level_peds: np.ndarray | None = None


@dataclass
class CandidateList:
    """Candidate paths (detection order) with their accumulated PEDs.

    ``level_peds[k, i]`` is the PED of path ``k`` after level ``i`` (so
    column 0 equals ``peds``).
    """

    paths: np.ndarray
    peds: np.ndarray
    level_peds: np.ndarray | None = None
    visited_nodes: int = 0

    def __len__(self) -> int:
        return len(self.peds)

    def __iter__(self) -> Iterator[Candidate]:
        for k in range(len(self)):
            lp = None if self.level_peds is None else self.level_peds[k]
            yield Candidate(self.paths[k], float(self.peds[k]), lp)

    def __getitem__(self, k) -> Candidate:
        lp = None if self.level_peds is None else self.level_peds[k]
        return Candidate(self.paths[k], float(self.peds[k]), lp)

    def best_index(self) -> int:
        # np.argmin returns the earliest minimum
        return int(np.argmin(self.peds))

    def contains(self, path) -> bool:
        return bool(np.any(np.all(self.paths == np.asarray(path), axis=1)))


def compute_b(R, y_zf, path, level: int) -> float:
    """Interference-cancelled observation at ``level`` given ``path[level+1:]``."""
    R = np.asarray(R)
    path = np.asarray(path, dtype=float)
    return float(y_zf[level] - R[level, level + 1 :] @ path[level + 1 :])


def direct_enumerate(b: float, r_ii: float, constellation: Constellation = QAM16) -> float:
    """Child minimising ``|b - r_ii s|``; ties go to the smaller symbol."""
    best, best_err = None, np.inf
    for s in constellation.alphabet:
        err = abs(b - r_ii * s)
        if err < best_err:
            best, best_err = s, err
    return float(best)


def accumulate_ped(d_prev: float, b: float, r_ii: float, s: float) -> float:
    e = b - r_ii * s
    return d_prev + e * e


def path_ped(R, y_zf, path) -> float:
    """Full Euclidean distance ``||y_zf - R path||^2``."""
    r = np.asarray(y_zf) - np.asarray(R) @ np.asarray(path, dtype=float)
    return float(r @ r)


def fsd_search(
    R,
    y_zf,
    dist: NodeDistribution = DEFAULT_DISTRIBUTION,
    constellation: Constellation = QAM16,
) -> CandidateList:
    """Breadth-first FSD tree search.

    Candidates come out in generation order: each full expansion replaces a
    path by its children in alphabet order, so for ``11111144`` candidate
    ``4a + b`` descends from the ``a``-th level-7 node and the ``b``-th
    level-6 child (column-major over the node groups).
    """
    R = np.asarray(R, dtype=float)
    y_zf = np.asarray(y_zf, dtype=float)
    n = len(y_zf)
    if R.shape != (n, n):
        raise InputShapeError(f"R has shape {R.shape}, y_zf has length {n}")
    if dist.n_levels != n:
        raise ConfigurationError(f"distribution has {dist.n_levels} levels, system has {n}")
    if dist.n_branches != constellation.n_branches:
        raise ConfigurationError("distribution and constellation disagree on branch count")

    alphabet = constellation.alphabet
    nb = len(alphabet)
    paths = np.zeros((1, n))
    level_peds = np.zeros((1, n))
    peds = np.zeros(1)
    visited = 0
    for level in range(n - 1, -1, -1):
        b = y_zf[level] - paths[:, level + 1 :] @ R[level, level + 1 :]
        r_ii = R[level, level]
        if dist.counts[level] == nb:
            k = len(peds)
            paths = np.repeat(paths, nb, axis=0)
            level_peds = np.repeat(level_peds, nb, axis=0)
            peds = np.repeat(peds, nb)
            b = np.repeat(b, nb)
            sym = np.tile(alphabet, k)
        else:
            err = np.abs(b[:, None] - r_ii * alphabet[None, :])
            sym = alphabet[np.argmin(err, axis=1)]
        paths[:, level] = sym
        e = b - r_ii * sym
        peds = peds + e * e
        level_peds[:, level] = peds
        visited += len(peds)
    return CandidateList(paths=paths, peds=peds, level_peds=level_peds, visited_nodes=visited)


def hard_decision(candidates: CandidateList, perm: Sequence[int] | None = None,
                  constellation: Constellation = QAM16) -> np.ndarray:
    """Bits of the minimum-PED candidate (earliest wins ties)."""
    if len(candidates) == 0:
        raise InputShapeError("empty candidate list")
    path = candidates.paths[candidates.best_index()]
    if perm is not None:
        s = np.empty_like(path)
        s[np.asarray(perm)] = path
        path = s
    return real_to_bits(path, constellation)
