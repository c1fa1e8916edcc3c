"""Broadcast channel model: superposition, three-signal scheme, normalization.

All agents broadcast simultaneously; a receiver observes only the
fading-weighted sum of the incoming signals.  Dividing the two payload sums
by the sum obtained from an all-ones reference signal cancels the unknown
coefficients, leaving a convex combination of the neighbors' values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AgentState, FormationSpec, RoundRealization
from .topology import Digraph

__all__ = [
    "BroadcastSignals",
    "NormalizedFadingMatrix",
    "IsolatedReceiverError",
    "broadcast_signals",
    "wmac_receive",
    "normalized_receive",
    "build_h_matrix",
]


class IsolatedReceiverError(ValueError):
    """Receiver has no in-neighbors: the normalizing sum would be zero."""


@dataclass(frozen=True)
class BroadcastSignals:
    """The three values an agent puts on the air at an update instant.

    tau_x/tau_y are the displacement-compensated position; tau_prime is the
    constant reference that lets receivers divide the fading away.
    """

    tau_x: float
    tau_y: float
    tau_prime: float = 1.0

    def __post_init__(self):
        if self.tau_prime != 1.0:
            raise ValueError("reference signal must be exactly 1")


def broadcast_signals(state: AgentState, spec: FormationSpec, agent_index: int) -> BroadcastSignals:
    """Signals agent agent_index would broadcast from the given state."""
    dx, dy = spec.displacements[agent_index]
    return BroadcastSignals(tau_x=state.x - dx, tau_y=state.y - dy)


def wmac_receive(signals, coefficients) -> float:
    """Superposition at a receiver: sum of coefficient * signal (noiseless).

    The receiver cannot see individual terms, only this sum.
    """
    sig = np.asarray(signals, dtype=float)
    coef = np.asarray(coefficients, dtype=float)
    if sig.shape != coef.shape or sig.ndim != 1 or sig.size == 0:
        raise ValueError("signals and coefficients must be equal-length nonempty vectors")
    if np.any(coef <= 0.0):
        raise ValueError("fading coefficients must be strictly positive")
    return float(coef @ sig)


def normalized_receive(
    round_: RoundRealization,
    states,
    spec: FormationSpec,
    receiver: int,
):
    """What receiver i actually learns in one round: (zeta_x, zeta_y).

    Three superimposed sums arrive (x payload, y payload, all-ones
    reference); dividing by the reference yields a convex combination of the
    in-neighbors' compensated positions, independent of the raw coefficients.
    """
    neighbors = round_.in_neighbors(receiver)
    if not neighbors:
        raise IsolatedReceiverError(
            f"agent {receiver} has no in-neighbors in round {round_.k}"
        )
    coef = [round_.xi[(j, receiver)] for j in neighbors]
    sent = [broadcast_signals(states[j], spec, j) for j in neighbors]
    nu_x = wmac_receive([s.tau_x for s in sent], coef)
    nu_y = wmac_receive([s.tau_y for s in sent], coef)
    nu_ref = wmac_receive([s.tau_prime for s in sent], coef)
    return nu_x / nu_ref, nu_y / nu_ref


@dataclass(frozen=True)
class NormalizedFadingMatrix:
    """Row-normalized fading weights: entry (i, j) weighs transmitter j at
    receiver i.  Rows of agents with at least one in-neighbor sum to 1;
    agents without in-neighbors get an all-zero row."""

    H: np.ndarray

    def __init__(self, H):
        H = np.asarray(H, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        if np.any(H < 0.0) or np.any(H > 1.0 + 1e-12):
            raise ValueError("normalized coefficients must lie in [0, 1]")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    def row_sum_deviation(self) -> float:
        """Max |row sum - 1| over rows that have any in-neighbor."""
        sums = self.H.sum(axis=1)
        occupied = sums > 0.0
        if not np.any(occupied):
            return 0.0
        return float(np.max(np.abs(sums[occupied] - 1.0)))

    def support_digraph(self) -> Digraph:
        """Arc (j, i) for every positive entry H[i, j]."""
        rows, cols = np.nonzero(self.H > 0.0)
        return Digraph(self.n, {(int(j), int(i)) for i, j in zip(rows, cols)})


def build_h_matrix(round_: RoundRealization) -> NormalizedFadingMatrix:
    """Per-round normalized fading matrix with rows summing to 1.

    Receiver i's row divides its raw coefficients by their total, so the
    support pattern equals the round's arc set transposed into
    (receiver, transmitter) position.
    """
    n = round_.n
    raw = np.zeros((n, n))
    for (j, i), value in round_.xi.items():
        raw[i, j] = value
    totals = raw.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        H = np.where(totals > 0.0, raw / totals, 0.0)
    return NormalizedFadingMatrix(H)
