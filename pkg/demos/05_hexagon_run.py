"""Full pipeline on the six-agent hexagon preset: random strongly connected
topology and fading every round, convergence detection, and the
wireless-resource comparison against per-link orthogonal access.  Writes the
trajectory/metrics/config files that the plotting package consumes."""

import sys

from airformation import account_costs, emit_outputs, preset, run, sample_round

cfg = preset("hexagon6")
if len(sys.argv) > 1:
    import dataclasses
    cfg = dataclasses.replace(cfg, seed=int(sys.argv[1]))

trace = run(cfg)
rounds = [sample_round(cfg, k) for k in range(trace.rounds_executed())]
costs = account_costs(rounds)

print(f"seed {cfg.seed}: "
      + ("converged at round "
         f"{trace.converged_round}" if trace.converged_round is not None else "did not converge"))
print(f"{'k':>3} {'t_k (s)':>9} {'delta':>7} {'error':>12} {'g_bc':>5} {'g_orth':>7}")
for s in trace.round_summaries:
    print(f"{s.k:>3} {s.t_k:>9.2f} {s.delta:>7.2f} {s.formation_error:>12.3e} "
          f"{s.g_broadcast_cumulative:>5} {s.g_orthogonal_cumulative:>7}")

if trace.consensus_point:
    cx, cy = trace.consensus_point
    print(f"\nformation centroid: ({cx:+.4f}, {cy:+.4f})")
print(f"broadcast transmissions used : {costs.cumulative_broadcast}")
print(f"orthogonal baseline would use: {costs.cumulative_orthogonal}")

paths = emit_outputs(trace, costs, cfg, "airformation_out")
for name, path in paths.items():
    print(f"{name}: {path}")
