"""One communication round is a linear map: update (D), then flow (Phi).
Their product Omega is row-stochastic with positive diagonal, and when the
round's digraph is strongly connected it is irreducible and primitive, which
is exactly what makes the infinite product collapse to consensus."""

import numpy as np

from airformation import (
    ControlParams,
    FormationSpec,
    RandomStronglyConnected,
    SimConfig,
    build_h_matrix,
    build_operator,
    certify,
    sample_round,
)

cfg = SimConfig(
    n=4,
    formation=FormationSpec.regular_polygon(4),
    params=ControlParams.homogeneous(4, a=0.5, b=0.5, sigma=0.8),
    topology=RandomStronglyConnected(0.3),
    seed=2024,
)
r = sample_round(cfg, 0)
print(f"round 0: delta={r.delta:.2f}s, arcs={sorted(r.arcs)}")

H = build_h_matrix(r)
op = build_operator(r, cfg.params, H, "x")

for name, M in (("Phi", op.phi), ("D", op.d), ("Omega", op.omega)):
    dev = np.max(np.abs(M.sum(axis=1) - 1.0))
    print(f"\n{name} (row-sum deviation {dev:.2e}):")
    print(M.round(3))

cert = certify(op.omega, tol=1e-12)
print("\ncertificate for Omega:")
for key, value in cert.as_dict().items():
    print(f"  {key}: {value}")
