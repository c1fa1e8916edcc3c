"""Directed communication graphs and per-round randomness.

One master seed drives everything; each round draws its topology, fading
coefficients, and interval length from independent substreams keyed by
(seed, round index, purpose), so replay is exact regardless of evaluation
order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    FixedTopology,
    RandomStronglyConnected,
    RoundRealization,
    SimConfig,
)

__all__ = [
    "Digraph",
    "is_strongly_connected",
    "random_strongly_connected",
    "sample_round",
    "substream",
    "TAG_TOPOLOGY",
    "TAG_FADING",
    "TAG_DELTA",
    "TAG_INIT",
]

# Purpose tags for per-round substreams.
TAG_TOPOLOGY = 0
TAG_FADING = 1
TAG_DELTA = 2
TAG_INIT = 3


@dataclass(frozen=True)
class Digraph:
    """Directed graph on nodes 0..n-1; arcs are ordered (tail, head) pairs."""

    n: int
    arcs: frozenset

    def __init__(self, n, arcs):
        n = int(n)
        if n < 1:
            raise ValueError("digraph needs at least one node")
        pairs = frozenset((int(j), int(i)) for j, i in arcs)
        for j, i in pairs:
            if j == i:
                raise ValueError(f"self-loop ({j},{i}) not allowed")
            if not (0 <= j < n and 0 <= i < n):
                raise ValueError(f"arc ({j},{i}) out of range for n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "arcs", pairs)

    def out_lists(self) -> list:
        """Adjacency lists tail -> heads."""
        out = [[] for _ in range(self.n)]
        for j, i in self.arcs:
            out[j].append(i)
        return out

    def reversed(self) -> "Digraph":
        return Digraph(self.n, {(i, j) for j, i in self.arcs})


def _reachable_from(start: int, out: list) -> set:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in out[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_strongly_connected(g: Digraph) -> bool:
    """True iff every ordered node pair is joined by a directed path.

    Two traversals: forward from node 0 and forward on the reversed graph.
    """
    if g.n == 1:
        return True
    if len(_reachable_from(0, g.out_lists())) != g.n:
        return False
    return len(_reachable_from(0, g.reversed().out_lists())) == g.n


def random_strongly_connected(
    n: int, extra_arc_probability: float, rng: np.random.Generator
) -> Digraph:
    """Strongly connected digraph: random Hamiltonian cycle plus extras.

    A directed cycle over a random node permutation guarantees strong
    connectivity; every remaining ordered pair is then added independently
    with extra_arc_probability.  No rejection loop, so density is unbiased
    and generation never stalls.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not (0.0 <= extra_arc_probability <= 1.0):
        raise ValueError("extra_arc_probability must lie in [0, 1]")
    perm = rng.permutation(n)
    arcs = {(int(perm[i]), int(perm[(i + 1) % n])) for i in range(n)}
    candidates = [
        (j, i) for j in range(n) for i in range(n) if j != i and (j, i) not in arcs
    ]
    if candidates and extra_arc_probability > 0.0:
        keep = rng.random(len(candidates)) < extra_arc_probability
        arcs.update(pair for pair, take in zip(candidates, keep) if take)
    return Digraph(n, arcs)


def substream(seed: int, k: int, tag: int) -> np.random.Generator:
    """Independent generator for (round k, purpose tag) under one master seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(k, tag)))


def sample_round(config: SimConfig, k: int) -> RoundRealization:
    """Draw round k's interval length, arc set, and fading coefficients."""
    lo, hi = config.delta_bounds
    delta = float(substream(config.seed, k, TAG_DELTA).uniform(lo, hi))

    if isinstance(config.topology, FixedTopology):
        arcs = config.topology.arcs
    elif isinstance(config.topology, RandomStronglyConnected):
        g = random_strongly_connected(
            config.n,
            config.topology.extra_arc_probability,
            substream(config.seed, k, TAG_TOPOLOGY),
        )
        arcs = g.arcs
    else:
        raise TypeError(f"unknown topology mode {type(config.topology).__name__}")

    ordered = sorted(arcs)
    draws = config.fading.sample(substream(config.seed, k, TAG_FADING), len(ordered))
    xi = {arc: float(v) for arc, v in zip(ordered, draws)}
    return RoundRealization(k=k, n=config.n, delta=delta, arcs=frozenset(arcs), xi=xi)
