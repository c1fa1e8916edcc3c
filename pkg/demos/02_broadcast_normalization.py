"""Simultaneous broadcasts superimpose: a receiver observes only a
fading-weighted sum and never the individual terms.  Broadcasting a constant
reference alongside the payload lets the receiver divide the unknown
coefficients away.  The result is a convex combination of the neighbors'
values, no channel knowledge required."""

import numpy as np

from airformation import (
    AgentState,
    FormationSpec,
    RoundRealization,
    build_h_matrix,
    normalized_receive,
    wmac_receive,
)

rng = np.random.default_rng(0)

signals = [2.0, -1.0, 4.0]
coefficients = rng.uniform(0.1, 1.0, size=3)
print("payloads     :", signals)
print("fading       :", coefficients.round(4))
print("superposition:", wmac_receive(signals, coefficients))
print("reference sum:", wmac_receive([1.0, 1.0, 1.0], coefficients))
print("ratio        :", wmac_receive(signals, coefficients) / wmac_receive([1.0] * 3, coefficients))

spec = FormationSpec([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
states = [AgentState(*rng.normal(scale=2.0, size=4)) for _ in range(4)]
arcs = {(1, 0), (2, 0), (3, 0)}

print("\nsame topology, three different channel realizations -> same zeta:")
for trial in range(3):
    xi = {arc: float(rng.uniform(0.05, 5.0)) for arc in sorted(arcs)}
    r = RoundRealization(k=0, n=4, delta=10.0, arcs=frozenset(arcs), xi=xi)
    zeta = normalized_receive(r, states, spec, 0)
    print(f"  xi={ {a: round(v, 3) for a, v in xi.items()} }  zeta=({zeta[0]:+.10f}, {zeta[1]:+.10f})")

r = RoundRealization(
    k=0, n=4, delta=10.0, arcs=frozenset(arcs),
    xi={arc: float(rng.uniform(0.05, 5.0)) for arc in sorted(arcs)},
)
H = build_h_matrix(r)
print("\nnormalized fading matrix (rows sum to 1 where a receiver has neighbors):")
print(H.H.round(4))
print("row sums:", H.H.sum(axis=1))
