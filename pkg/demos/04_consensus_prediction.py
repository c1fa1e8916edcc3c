"""With a constant round (fixed arcs and fading), the agreement point is
predictable in advance: the left-product of round operators converges to a
rank-one matrix whose common row gives the weights of the initial states.
This script runs the network and compares where it actually lands."""

import itertools

import numpy as np

from airformation import (
    AgentState,
    ControlParams,
    FormationSpec,
    RoundRealization,
    build_h_matrix,
    build_operator,
    product_limit,
    simulate,
    tilde_vector,
)

n = 3
arcs = {(0, 1), (1, 2), (2, 0), (0, 2)}
xi = {(0, 1): 0.9, (1, 2): 0.4, (2, 0): 1.3, (0, 2): 0.7}
round0 = RoundRealization(k=0, n=n, delta=15.0, arcs=frozenset(arcs), xi=xi)

spec = FormationSpec([[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]])
params = ControlParams.homogeneous(n, a=0.5, b=0.5, sigma=0.8)
states = [AgentState(2.0, 1.0, 2.0, 1.0), AgentState(-1.0, 0.5, -1.0, 0.5), AgentState(0.5, -2.0, 0.5, -2.0)]

op = build_operator(round0, params, build_h_matrix(round0), "x")
weights, used = product_limit(itertools.repeat(op, 10000), tol=1e-12)
print(f"product limit reached after {used} factors")
print("consensus weights:", weights.round(6), " sum:", weights.sum())

predicted = float(weights @ tilde_vector(states, spec, "x"))
print(f"\npredicted x-axis agreement value: {predicted:+.9f}")

rounds = [
    RoundRealization(k=k, n=n, delta=15.0, arcs=frozenset(arcs), xi=dict(xi))
    for k in range(300)
]
trace = simulate(states, rounds, spec, params, convergence_tol=1e-13, sample_rate=1,
                 certify_rounds=False)
final = trace.final_states(n)
print("simulated tilde x at the end   :", tilde_vector(final, spec, "x").round(9))
print("agents' raw final x            :", [round(s.x, 6) for s in final])
print("slots (agreement + displacement):",
      [round(predicted + d[0], 6) for d in spec.displacements])
