"""Between broadcasts, each agent's position and auxiliary state relax
toward each other.  That flow has an exact closed form; this script shows it
against a brute-force ODE integration and demonstrates the conserved
weighted sum that prevents divergence."""

import numpy as np
from scipy.integrate import solve_ivp

from airformation import AgentState, ControlParams, agent_transition, propagate_interval

a, b, dt = 0.5, 0.5, 20.0
t = agent_transition(a, b, dt)
print(f"flow matrix over {dt}s with a={a}, b={b}:")
print(t.matrix())
print("row sums:", t.matrix().sum(axis=1))

sol = solve_ivp(
    lambda _, y: [-a * (y[0] - y[1]), b * (y[0] - y[1])],
    (0.0, dt), [4.0, -1.0], method="DOP853", rtol=1e-11, atol=1e-13,
)
closed = t.matrix() @ np.array([4.0, -1.0])
print("\nclosed form vs integrator from (x, theta) = (4, -1):")
print("  closed    :", closed)
print("  integrated:", sol.y[:, -1])

params = ControlParams.homogeneous(1 + 1, a=a, b=b)
states = [AgentState(4.0, 0.0, -1.0, 0.0), AgentState(0.0, 0.0, 0.0, 0.0)]
offsets = np.linspace(0.5, dt, 8)
print(f"\nb*x + a*theta along the flow (should be constant at {b*4.0 + a*-1.0}):")
for offset, snap in zip(offsets, propagate_interval(states, params, dt, offsets)):
    print(f"  t={offset:5.1f}s  x={snap[0].x:+.6f}  theta={snap[0].theta_x:+.6f}  "
          f"b*x+a*theta={b*snap[0].x + a*snap[0].theta_x:+.12f}")
