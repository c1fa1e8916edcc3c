"""Numerical certification of the matrix properties the protocol relies on.

Irreducibility is a purely structural property (it depends only on where the
positive entries sit), so it is decided by strong connectivity of the support
digraph.  Primitivity is decided by boolean powers up to the Wielandt bound.
product_limit runs the left-product of round operators until its rows agree,
which is how the consensus value is predicted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import TransitionOperator
from .model import FormationSpec
from .topology import Digraph, is_strongly_connected

__all__ = [
    "MatrixCertificate",
    "ProductConvergenceError",
    "certify",
    "product_limit",
    "formation_error",
    "SUPPORT_EPS_FACTOR",
]

# An entry counts as positive if it exceeds this fraction of the matrix max.
SUPPORT_EPS_FACTOR = 1e-14


class ProductConvergenceError(RuntimeError):
    """Operator product failed to reach row agreement within the round budget."""

    def __init__(self, rounds: int, disagreement: float):
        self.rounds = rounds
        self.disagreement = disagreement
        super().__init__(
            f"rows still disagree by {disagreement:.3e} after {rounds} factors"
        )


@dataclass(frozen=True)
class MatrixCertificate:
    """What certify() established about one square nonnegative matrix.

    row_sum_deviation is always reported; row_stochastic just thresholds it
    at the tolerance the caller supplied.  primitivity_exponent is the
    smallest h with an entrywise-positive h-th boolean power, if one exists
    within the Wielandt bound.
    """

    size: int
    row_stochastic: bool
    row_sum_deviation: float
    irreducible: bool
    primitive: bool
    primitivity_exponent: int | None
    support_graph: Digraph  # positive off-diagonal pattern; diagonal omitted

    def __post_init__(self):
        if self.primitive and not self.irreducible:
            raise ValueError("primitive implies irreducible")

    def as_dict(self) -> dict:
        return {
            "size": self.size,
            "row_stochastic": self.row_stochastic,
            "row_sum_deviation": self.row_sum_deviation,
            "irreducible": self.irreducible,
            "primitive": self.primitive,
            "primitivity_exponent": self.primitivity_exponent,
        }


def wielandt_bound(m: int) -> int:
    """Largest primitivity exponent possible for an m x m matrix."""
    return m * m - 2 * m + 2 if m > 1 else 1


def certify(M, tol: float = 1e-12) -> MatrixCertificate:
    """Certify nonnegativity structure, row sums, irreducibility, primitivity.

    Entries are thresholded at SUPPORT_EPS_FACTOR times the matrix max to
    form the boolean support pattern; entries below -tol are rejected.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    if np.any(M < -tol):
        raise ValueError(f"entry {M.min():.3e} is negative beyond tolerance {tol}")
    m = M.shape[0]

    deviation = float(np.max(np.abs(M.sum(axis=1) - 1.0)))
    row_stochastic = deviation <= tol

    scale = float(M.max())
    pattern = M > (SUPPORT_EPS_FACTOR * scale if scale > 0.0 else 0.0)

    off_diag = [
        (int(j), int(i)) for i, j in zip(*np.nonzero(pattern)) if i != j
    ]
    support = Digraph(m, off_diag)
    irreducible = is_strongly_connected(support) and m >= 1

    primitive = False
    exponent = None
    power = pattern.copy()
    for h in range(1, wielandt_bound(m) + 1):
        if power.all():
            primitive = True
            exponent = h
            break
        power = (power.astype(np.uint8) @ pattern.astype(np.uint8)) > 0
    return MatrixCertificate(
        size=m,
        row_stochastic=row_stochastic,
        row_sum_deviation=deviation,
        irreducible=irreducible,
        primitive=primitive,
        primitivity_exponent=exponent,
        support_graph=support,
    )


def product_limit(operators, tol: float = 1e-10, max_rounds: int = 10000):
    """Run the left-product of round operators until all rows agree.

    operators may be any iterable of TransitionOperator or raw square
    matrices; factors are consumed newest-on-the-left, matching how the
    round maps compose in time.  Returns (consensus_weights, rounds_used)
    where consensus_weights is the common row (it sums to 1 and, for
    strongly connected rounds, is entrywise positive): the limit state is
    consensus_weights @ initial_state, componentwise per axis.

    Raises ProductConvergenceError if max_rounds factors do not suffice.
    """
    product = None
    used = 0
    disagreement = np.inf
    for op in operators:
        if used >= max_rounds:
            break
        omega = op.omega if isinstance(op, TransitionOperator) else np.asarray(op, dtype=float)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise ValueError("each operator must be a square matrix")
        product = omega if product is None else omega @ product
        used += 1
        disagreement = float(np.max(product.max(axis=0) - product.min(axis=0)))
        if disagreement < tol:
            weights = product[0].copy()
            return weights, used
    if product is None:
        raise ValueError("no operators supplied")
    raise ProductConvergenceError(used, disagreement)


def formation_error(states, spec: FormationSpec) -> float:
    """Largest distance of any agent from its slot around the empirical centroid.

    Zero exactly when the formation is achieved around the mean of the
    displacement-compensated positions.
    """
    n = len(states)
    if n != spec.n:
        raise ValueError(f"got {n} states for a formation of {spec.n}")
    compensated = np.array(
        [[st.x, st.y] for st in states]
    ) - spec.displacements
    centroid = compensated.mean(axis=0)
    return float(np.max(np.linalg.norm(compensated - centroid, axis=1)))
