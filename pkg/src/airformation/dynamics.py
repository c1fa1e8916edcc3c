"""Hybrid dynamics: discrete broadcast update plus exact inter-update flow.

Each round has two phases.  At the update instant every agent keeps its
position and pulls its auxiliary state toward the received normalized
broadcast (weight sigma).  Between updates, position and auxiliary state
relax toward each other under gains (a, b); that linear flow has an exact
2x2 closed form, so no numerical integration is ever needed.

Stacking per-agent pairs gives 2n x 2n block operators: Phi for the flow,
D for the update, and their product Omega advancing a whole round.  All
three are row-stochastic, which is what drives consensus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import IsolatedReceiverError, NormalizedFadingMatrix, normalized_receive
from .model import AgentState, ControlParams, FormationSpec, RoundRealization

__all__ = [
    "AgentTransition",
    "TransitionOperator",
    "agent_transition",
    "apply_update",
    "propagate_interval",
    "build_operator",
    "step_matrix_form",
    "tilde_vector",
]


@dataclass(frozen=True)
class AgentTransition:
    """Entries of one agent's 2x2 flow matrix over a fixed interval.

    Rows [phi_a, phi_b] and [phi_c, phi_d] each sum to 1 and all entries are
    strictly positive for any positive gains and interval.
    """

    phi_a: float
    phi_b: float
    phi_c: float
    phi_d: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.phi_a, self.phi_b], [self.phi_c, self.phi_d]])


def agent_transition(a: float, b: float, dt: float) -> AgentTransition:
    """Exact flow of dx/dt = -a(x - theta), dtheta/dt = b(x - theta) over dt.

    The system matrix has eigenvalues 0 and -(a+b); projecting onto the two
    eigendirections gives the entries in closed form.  1 - e^{-z} is
    evaluated via expm1 to avoid cancellation for small z.
    """
    if not (a > 0.0 and b > 0.0 and dt > 0.0):
        raise ValueError("a, b, dt must all be strictly positive")
    z = (a + b) * dt
    decay = math.exp(-z)
    rise = -math.expm1(-z)  # 1 - e^{-z}, accurate near 0
    s = a + b
    return AgentTransition(
        phi_a=(a * decay + b) / s,
        phi_b=a * rise / s,
        phi_c=b * rise / s,
        phi_d=(b * decay + a) / s,
    )


def apply_update(
    states,
    round_: RoundRealization,
    spec: FormationSpec,
    sigma: float,
    isolated: str = "error",
):
    """Discrete update at the round's broadcast instant.

    Positions stay put; each auxiliary state becomes a sigma-weighted blend
    of itself, the agent's own displacement, and the received normalized
    broadcast.  isolated="hold" keeps theta unchanged for agents without
    in-neighbors instead of raising (useful for arbitrary fixed topologies).
    """
    if not (0.0 < sigma < 1.0):
        raise ValueError("sigma must lie strictly in (0, 1)")
    if isolated not in ("error", "hold"):
        raise ValueError("isolated must be 'error' or 'hold'")
    updated = []
    for i, state in enumerate(states):
        try:
            zeta_x, zeta_y = normalized_receive(round_, states, spec, i)
        except IsolatedReceiverError:
            if isolated == "error":
                raise
            updated.append(state)
            continue
        dx, dy = spec.displacements[i]
        updated.append(
            AgentState(
                x=state.x,
                y=state.y,
                theta_x=(1.0 - sigma) * state.theta_x + sigma * dx + sigma * zeta_x,
                theta_y=(1.0 - sigma) * state.theta_y + sigma * dy + sigma * zeta_y,
            )
        )
    return updated


def propagate_interval(
    states,
    params: ControlParams,
    delta: float,
    sample_offsets,
):
    """Snapshots of the continuous flow at each requested offset in (0, delta].

    Every snapshot is computed directly from the start-of-interval states via
    the closed form at that offset (no step chaining, no integrator error).
    Returns one list of AgentStates per offset, in the given order.
    """
    if not delta > 0.0:
        raise ValueError("delta must be > 0")
    offsets = [float(s) for s in sample_offsets]
    for s in offsets:
        if not (0.0 < s <= delta * (1.0 + 1e-12)):
            raise ValueError(f"sample offset {s} outside (0, {delta}]")
    n = len(states)
    p = params.resolved(n)
    snapshots = []
    for s in offsets:
        snap = []
        for i, st in enumerate(states):
            fx = agent_transition(p.a_x[i], p.b_x[i], s)
            fy = agent_transition(p.a_y[i], p.b_y[i], s)
            snap.append(
                AgentState(
                    x=fx.phi_a * st.x + fx.phi_b * st.theta_x,
                    theta_x=fx.phi_c * st.x + fx.phi_d * st.theta_x,
                    y=fy.phi_a * st.y + fy.phi_b * st.theta_y,
                    theta_y=fy.phi_c * st.y + fy.phi_d * st.theta_y,
                )
            )
        snapshots.append(snap)
    return snapshots


@dataclass(frozen=True)
class TransitionOperator:
    """2n x 2n operators advancing the stacked tilde state by one round.

    phi: block-diagonal flow; d: the update map; omega = phi @ d.  All act on
    vectors laid out as [x_0..x_{n-1}, theta_0..theta_{n-1}] in tilde
    (displacement-compensated) coordinates.
    """

    phi: np.ndarray
    d: np.ndarray
    omega: np.ndarray

    @property
    def n(self) -> int:
        return self.phi.shape[0] // 2


def build_operator(
    round_: RoundRealization,
    params: ControlParams,
    H: NormalizedFadingMatrix,
    axis: str,
) -> TransitionOperator:
    """Assemble Phi, D, Omega for one round and one axis.

    Phi stacks the per-agent closed-form entries into four diagonal blocks;
    D mixes theta with the H-weighted positions (weight sigma); Omega = Phi D
    is the full round map.  With a strongly connected round, Omega is
    irreducible and primitive, which the analysis module can certify.
    """
    n = round_.n
    if H.n != n:
        raise ValueError(f"H is {H.n}x{H.n} but round has n={n}")
    p = params.resolved(n)
    a, b = p.gains(axis)
    trans = [agent_transition(a[i], b[i], round_.delta) for i in range(n)]
    phi = np.zeros((2 * n, 2 * n))
    phi[:n, :n] = np.diag([t.phi_a for t in trans])
    phi[:n, n:] = np.diag([t.phi_b for t in trans])
    phi[n:, :n] = np.diag([t.phi_c for t in trans])
    phi[n:, n:] = np.diag([t.phi_d for t in trans])

    sigma = p.sigma
    d = np.zeros((2 * n, 2 * n))
    d[:n, :n] = np.eye(n)
    d[n:, :n] = sigma * H.H
    d[n:, n:] = (1.0 - sigma) * np.eye(n)

    omega = phi @ d
    return TransitionOperator(phi=phi, d=d, omega=omega)


def step_matrix_form(tilde_vec, op: TransitionOperator) -> np.ndarray:
    """One round in matrix form: Omega applied to the stacked tilde state."""
    vec = np.asarray(tilde_vec, dtype=float)
    if vec.shape != (op.omega.shape[0],):
        raise ValueError(f"state vector must have shape ({op.omega.shape[0]},)")
    return op.omega @ vec


def tilde_vector(states, spec: FormationSpec, axis: str) -> np.ndarray:
    """Stack one axis of the given states as [x_tilde..., theta_tilde...]."""
    n = len(states)
    vec = np.empty(2 * n)
    for i, st in enumerate(states):
        d = spec.displacements[i][0 if axis == "x" else 1]
        if axis == "x":
            vec[i] = st.x - d
            vec[n + i] = st.theta_x - d
        elif axis == "y":
            vec[i] = st.y - d
            vec[n + i] = st.theta_y - d
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return vec
