"""Domain types shared across the simulator.

Planar agents carry a physical position (x, y) and an auxiliary controller
state (theta_x, theta_y).  Formation goals are per-agent displacements from
an (implicitly agreed) centroid.  A "round" is one synchronized broadcast
instant followed by a continuous-flow interval of random length.

Agents are indexed 0..n-1 throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "AgentState",
    "FormationSpec",
    "ControlParams",
    "UniformFading",
    "FixedTopology",
    "RandomStronglyConnected",
    "RoundRealization",
    "SimConfig",
    "ConfigError",
    "tilde_state",
    "untilde_state",
    "FADING_REJECT_EPS",
]

# Draws at or below this value are rejected so fading stays strictly positive.
FADING_REJECT_EPS = 1e-12


class ConfigError(ValueError):
    """Raised when a configuration violates a documented invariant."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class AgentState:
    """State of one agent: position (meters) plus auxiliary controller state.

    Positions are continuous in time; theta_x/theta_y may jump at update
    instants only.
    """

    x: float
    y: float
    theta_x: float
    theta_y: float

    def __post_init__(self):
        for name in ("x", "y", "theta_x", "theta_y"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"AgentState.{name} must be finite")

    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def theta(self) -> np.ndarray:
        return np.array([self.theta_x, self.theta_y])


@dataclass(frozen=True, eq=False)
class FormationSpec:
    """Desired displacement of each agent from the formation centroid."""

    displacements: np.ndarray  # shape (n, 2), meters

    def __eq__(self, other):
        if not isinstance(other, FormationSpec):
            return NotImplemented
        return np.array_equal(self.displacements, other.displacements)

    def __init__(self, displacements):
        arr = np.asarray(displacements, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("displacements must be an (n, 2) array of planar offsets")
        if arr.shape[0] < 2:
            raise ValueError("formation needs at least 2 agents")
        if not np.all(np.isfinite(arr)):
            raise ValueError("displacements must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "displacements", arr)

    @property
    def n(self) -> int:
        return self.displacements.shape[0]

    def displacement(self, i: int) -> np.ndarray:
        return self.displacements[i]

    @staticmethod
    def regular_polygon(n: int, circumradius: float = 1.0) -> "FormationSpec":
        """Vertices of a regular n-gon centered on the centroid."""
        angles = 2.0 * np.pi * np.arange(n) / n
        return FormationSpec(
            np.column_stack([circumradius * np.cos(angles), circumradius * np.sin(angles)])
        )


@dataclass(frozen=True, eq=False)
class ControlParams:
    """Per-agent controller gains (1/s) and the shared mixing weight sigma.

    sigma weighs how strongly the auxiliary state adopts the received
    broadcast at each update; it must stay strictly inside (0, 1).
    """

    a_x: np.ndarray
    a_y: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    sigma: float

    def __eq__(self, other):
        if not isinstance(other, ControlParams):
            return NotImplemented
        return self.sigma == other.sigma and all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("a_x", "a_y", "b_x", "b_y")
        )

    def __init__(self, a_x, a_y, b_x, b_y, sigma):
        arrays = {}
        for name, value in (("a_x", a_x), ("a_y", a_y), ("b_x", b_x), ("b_y", b_y)):
            arr = np.atleast_1d(np.asarray(value, dtype=float))
            if arr.ndim != 1:
                raise ValueError(f"ControlParams.{name} must be a scalar or 1-d sequence")
            if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
                raise ValueError(f"ControlParams.{name} entries must be finite and > 0")
            arr.setflags(write=False)
            arrays[name] = arr
        sizes = {arr.shape[0] for arr in arrays.values() if arr.shape[0] > 1}
        if len(sizes) > 1:
            raise ValueError("ControlParams gain vectors disagree in length")
        sigma = float(sigma)
        if not (0.0 < sigma < 1.0):
            raise ValueError("sigma must lie strictly in (0, 1)")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "sigma", sigma)

    @staticmethod
    def homogeneous(n: int, a: float = 0.5, b: float = 0.5, sigma: float = 0.8) -> "ControlParams":
        """Identical gains on both axes for all n agents."""
        ax = np.full(n, float(a))
        bx = np.full(n, float(b))
        return ControlParams(ax, ax.copy(), bx, bx.copy(), sigma)

    def gains(self, axis: str) -> tuple[np.ndarray, np.ndarray]:
        """(a, b) gain vectors for axis 'x' or 'y'."""
        if axis == "x":
            return self.a_x, self.b_x
        if axis == "y":
            return self.a_y, self.b_y
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    def resolved(self, n: int) -> "ControlParams":
        """Broadcast scalar gains out to length n."""
        def expand(arr):
            if arr.shape[0] == n:
                return arr
            if arr.shape[0] == 1:
                return np.full(n, arr[0])
            raise ValueError(f"gain vector has length {arr.shape[0]}, expected {n} or 1")

        return ControlParams(
            expand(self.a_x), expand(self.a_y), expand(self.b_x), expand(self.b_y), self.sigma
        )


@dataclass(frozen=True)
class UniformFading:
    """Uniform(lo, hi) fading draws, rejecting values at (numerically) zero.

    The channel model needs strictly positive coefficients, so with lo == 0
    draws <= FADING_REJECT_EPS are redrawn; the correction has measure zero.
    """

    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi):
            raise ValueError("uniform fading requires 0 <= lo < hi")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        draws = rng.uniform(self.lo, self.hi, size=size)
        while True:
            bad = draws <= FADING_REJECT_EPS
            if not np.any(bad):
                return draws
            draws[bad] = rng.uniform(self.lo, self.hi, size=int(bad.sum()))


@dataclass(frozen=True)
class FixedTopology:
    """Same arc set every round; arcs are (transmitter, receiver) pairs."""

    arcs: frozenset

    def __init__(self, arcs):
        pairs = frozenset((int(j), int(i)) for j, i in arcs)
        for j, i in pairs:
            if j == i:
                raise ValueError(f"self-loop ({j},{i}) not allowed")
        object.__setattr__(self, "arcs", pairs)


@dataclass(frozen=True)
class RandomStronglyConnected:
    """Fresh strongly connected digraph each round: a random Hamiltonian
    cycle plus each remaining arc independently with extra_arc_probability."""

    extra_arc_probability: float = 0.2

    def __post_init__(self):
        if not (0.0 <= self.extra_arc_probability <= 1.0):
            raise ValueError("extra_arc_probability must lie in [0, 1]")


@dataclass(frozen=True)
class RoundRealization:
    """Everything random about one round: interval length, arcs, fading.

    Arc (j, i) means agent j's broadcast reaches agent i; xi[(j, i)] is the
    raw fading coefficient on that link, constant within the round.
    """

    k: int
    n: int
    delta: float
    arcs: frozenset
    xi: dict

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("round index must be nonnegative")
        if self.n < 2:
            raise ValueError("a round needs n >= 2 agents")
        if not (self.delta > 0.0 and np.isfinite(self.delta)):
            raise ValueError("delta must be finite and > 0")
        for j, i in self.arcs:
            if j == i:
                raise ValueError(f"self-loop ({j},{i}) not allowed")
            if not (0 <= j < self.n and 0 <= i < self.n):
                raise ValueError(f"arc ({j},{i}) out of range for n={self.n}")
        if set(self.xi) != set(self.arcs):
            raise ValueError("xi must be defined on exactly the arc set")
        for arc, value in self.xi.items():
            if not (value > 0.0 and np.isfinite(value)):
                raise ValueError(f"xi{arc} must be finite and > 0")

    def in_neighbors(self, i: int) -> list:
        """Transmitters whose broadcast reaches agent i, ascending."""
        return sorted(j for j, r in self.arcs if r == i)

    def rescale_receiver(self, i: int, c: float) -> "RoundRealization":
        """Multiply all of receiver i's fading coefficients by c > 0."""
        if not c > 0.0:
            raise ValueError("scale factor must be > 0")
        xi = {arc: (v * c if arc[1] == i else v) for arc, v in self.xi.items()}
        return RoundRealization(self.k, self.n, self.delta, self.arcs, xi)


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Full description of a simulation run; with the seed it pins every draw.

    initial_positions/initial_theta override the random start; when absent,
    positions are drawn uniformly from [-initial_box, initial_box]^2 and
    theta starts equal to the position.
    """

    n: int
    formation: FormationSpec
    params: ControlParams
    delta_bounds: tuple = (10.0, 30.0)
    fading: UniformFading = UniformFading(0.0, 1.0)
    topology: object = RandomStronglyConnected(0.2)
    seed: int = 0
    max_rounds: int = 50
    convergence_tol: float = 1e-2
    sample_rate: int = 50
    initial_positions: np.ndarray | None = None
    initial_theta: np.ndarray | None = None
    initial_box: float = 5.0
    matrix_shadow: bool = True
    certify_rounds: bool = True

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigError(problems)

    def __eq__(self, other):
        if not isinstance(other, SimConfig):
            return NotImplemented
        def same_optional(a, b):
            if a is None or b is None:
                return (a is None) == (b is None)
            return np.array_equal(np.asarray(a), np.asarray(b))

        return (
            self.n == other.n
            and self.formation == other.formation
            and self.params == other.params
            and self.delta_bounds == other.delta_bounds
            and self.fading == other.fading
            and self.topology == other.topology
            and self.seed == other.seed
            and self.max_rounds == other.max_rounds
            and self.convergence_tol == other.convergence_tol
            and self.sample_rate == other.sample_rate
            and same_optional(self.initial_positions, other.initial_positions)
            and same_optional(self.initial_theta, other.initial_theta)
            and self.initial_box == other.initial_box
            and self.matrix_shadow == other.matrix_shadow
            and self.certify_rounds == other.certify_rounds
        )

    def problems(self) -> list:
        """Human-readable invariant violations, with field paths; empty if valid."""
        out = []
        if self.n < 2:
            out.append(f"n: must be >= 2, got {self.n}")
        if self.formation.n != self.n:
            out.append(
                f"formation.displacements: has {self.formation.n} rows, expected n={self.n}"
            )
        lo, hi = self.delta_bounds
        if not (0.0 < lo <= hi):
            out.append(f"delta_bounds: need 0 < lower <= upper, got ({lo}, {hi})")
        try:
            self.params.resolved(self.n)
        except ValueError as exc:
            out.append(f"params: {exc}")
        if isinstance(self.topology, FixedTopology):
            for j, i in self.topology.arcs:
                if not (0 <= j < self.n and 0 <= i < self.n):
                    out.append(f"topology.arcs: ({j},{i}) out of range for n={self.n}")
        elif not isinstance(self.topology, RandomStronglyConnected):
            out.append(f"topology: unknown mode {type(self.topology).__name__}")
        if not (0 <= self.seed < 2**64):
            out.append("seed: must be an unsigned 64-bit integer")
        if self.max_rounds < 1:
            out.append(f"max_rounds: must be >= 1, got {self.max_rounds}")
        if not self.convergence_tol > 0.0:
            out.append(f"convergence_tol: must be > 0, got {self.convergence_tol}")
        if self.sample_rate < 1:
            out.append(f"sample_rate: must be >= 1, got {self.sample_rate}")
        for name in ("initial_positions", "initial_theta"):
            value = getattr(self, name)
            if value is not None:
                arr = np.asarray(value, dtype=float)
                if arr.shape != (self.n, 2):
                    out.append(f"{name}: expected shape ({self.n}, 2), got {arr.shape}")
                elif not np.all(np.isfinite(arr)):
                    out.append(f"{name}: entries must be finite")
        if not self.initial_box > 0.0:
            out.append(f"initial_box: must be > 0, got {self.initial_box}")
        return out


def tilde_state(state: AgentState, spec: FormationSpec, agent_index: int):
    """Displacement-compensated coordinates of one agent.

    Returns (x - d_x, theta_x - d_x, y - d_y, theta_y - d_y); in these
    coordinates formation control is plain consensus.
    """
    if not 0 <= agent_index < spec.n:
        raise IndexError(f"agent_index {agent_index} out of range for n={spec.n}")
    dx, dy = spec.displacements[agent_index]
    return (state.x - dx, state.theta_x - dx, state.y - dy, state.theta_y - dy)


def untilde_state(tilde, spec: FormationSpec, agent_index: int) -> AgentState:
    """Inverse of tilde_state: restore raw coordinates from compensated ones."""
    if not 0 <= agent_index < spec.n:
        raise IndexError(f"agent_index {agent_index} out of range for n={spec.n}")
    tx, ttx, ty, tty = tilde
    dx, dy = spec.displacements[agent_index]
    return AgentState(x=tx + dx, y=ty + dy, theta_x=ttx + dx, theta_y=tty + dy)
