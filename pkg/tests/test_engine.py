import itertools

import numpy as np
import pytest

from airformation.analysis import product_limit
from airformation.channel import build_h_matrix
from airformation.dynamics import build_operator, tilde_vector
from airformation.engine import (
    account_costs,
    initial_states,
    run,
    simulate,
)
from airformation.model import (
    AgentState,
    ControlParams,
    FixedTopology,
    FormationSpec,
    RandomStronglyConnected,
    RoundRealization,
    SimConfig,
)
from airformation.topology import sample_round


def hexagon_config(**overrides):
    n = overrides.pop("n", 6)
    base = dict(
        n=n,
        formation=FormationSpec.regular_polygon(n),
        params=ControlParams.homogeneous(n),
        topology=RandomStronglyConnected(0.5),
        seed=7,
        max_rounds=30,
        sample_rate=10,
    )
    base.update(overrides)
    return SimConfig(**base)


def constant_rounds(n, arcs, xi, delta, count):
    return [
        RoundRealization(k=k, n=n, delta=delta, arcs=frozenset(arcs), xi=dict(xi))
        for k in range(count)
    ]


def test_in_formation_start_converges_at_round_zero():
    n = 4
    spec = FormationSpec.regular_polygon(n)
    c = np.array([2.0, -1.0])
    pos = spec.displacements + c
    cfg = hexagon_config(n=n, initial_positions=pos, initial_theta=pos.copy())
    trace = run(cfg)
    assert trace.converged_round == 0
    assert trace.rounds_executed() == 1
    assert trace.consensus_point == pytest.approx(tuple(c), abs=1e-12)
    for s in trace.samples:  # nothing moved
        want = pos[s.agent]
        assert s.x == pytest.approx(want[0], abs=1e-12)
        assert s.y == pytest.approx(want[1], abs=1e-12)


def test_identical_config_gives_identical_trace():
    cfg = hexagon_config()
    t1 = run(cfg)
    t2 = run(cfg)
    assert t1.samples == t2.samples
    assert t1.round_summaries == t2.round_summaries
    assert t1.converged_round == t2.converged_round
    assert t1.consensus_point == t2.consensus_point


def test_positions_continuous_at_round_boundaries():
    cfg = hexagon_config(sample_rate=4, max_rounds=8, convergence_tol=1e-12)
    trace = run(cfg)
    # group samples per agent in time order; positions must form a continuous
    # path: the boundary sample of round k equals the state entering round k+1,
    # and the first flow sample of round k+1 stays close (smooth flow), while
    # theta is allowed to jump at the boundary.
    per_agent = {}
    for s in trace.samples:
        per_agent.setdefault(s.agent, []).append(s)
    for agent, samples in per_agent.items():
        ts = [s.t for s in samples]
        assert all(t2 > t1 for t1, t2 in zip(ts, ts[1:]))  # strictly increasing


def test_sample_counts_per_round():
    cfg = hexagon_config(sample_rate=5, max_rounds=3, convergence_tol=1e-15)
    trace = run(cfg)
    rounds = trace.rounds_executed()
    assert len(trace.samples) == cfg.n * (1 + 5 * rounds)  # initial + per round


def test_convergence_flag_matches_tolerance():
    cfg = hexagon_config(max_rounds=40, convergence_tol=1e-3)
    trace = run(cfg)
    assert trace.converged_round is not None
    last = trace.round_summaries[-1]
    assert last.formation_error < 1e-3
    for summary in trace.round_summaries[:-1]:
        assert summary.formation_error >= 1e-3


def test_non_convergence_returns_trace_without_flag():
    cfg = hexagon_config(max_rounds=1, convergence_tol=1e-12)
    trace = run(cfg)
    assert trace.converged_round is None
    assert trace.consensus_point is None
    assert trace.rounds_executed() == 1


def test_round_certificates_present_and_clean():
    cfg = hexagon_config(max_rounds=4, convergence_tol=1e-15, certify_rounds=True)
    trace = run(cfg)
    for summary in trace.round_summaries:
        for axis in ("x", "y"):
            cert = summary.certificates[axis]
            assert cert["row_stochastic"] and cert["irreducible"] and cert["primitive"]


def test_fixed_topology_with_isolated_agent_holds_theta():
    # agent 2 has no in-neighbors: its theta must hold at updates, yet the
    # run proceeds (positions still flow toward theta)
    n = 3
    arcs = {(2, 0), (0, 1)}  # nothing points into 2
    cfg = hexagon_config(
        n=n,
        topology=FixedTopology(arcs),
        initial_positions=np.array([[0.0, 0.0], [1.0, 1.0], [4.0, -2.0]]),
        initial_theta=np.array([[0.0, 0.0], [1.0, 1.0], [4.0, -2.0]]),
        max_rounds=2,
        convergence_tol=1e-15,
        matrix_shadow=False,
        certify_rounds=False,
    )
    trace = run(cfg)
    assert trace.rounds_executed() == 2
    # theta of agent 2 never jumps: with theta(0) = x(0) it stays put entirely
    for s in trace.samples:
        if s.agent == 2:
            assert s.theta_x == pytest.approx(4.0, abs=1e-12)
            assert s.theta_y == pytest.approx(-2.0, abs=1e-12)


def test_simulated_limit_matches_product_prediction():
    # constant round (fixed arcs, fixed fading): the product limit's weight
    # vector must predict where the network settles, axis by axis
    n = 2
    spec = FormationSpec([[1.0, 0.5], [-1.0, -0.5]])
    params = ControlParams.homogeneous(n, a=0.5, b=0.5, sigma=0.8)
    arcs = {(0, 1), (1, 0)}
    xi = {(0, 1): 0.3, (1, 0): 1.7}
    rounds = constant_rounds(n, arcs, xi, delta=15.0, count=400)
    states = [AgentState(2.0, -1.0, 0.5, 3.0), AgentState(-4.0, 2.5, 1.0, 0.0)]

    trace = simulate(
        states, rounds, spec, params,
        convergence_tol=1e-14, sample_rate=1, certify_rounds=False,
    )
    final = trace.final_states(n)

    H = build_h_matrix(rounds[0])
    for axis in ("x", "y"):
        op = build_operator(rounds[0], params, H, axis)
        weights, _ = product_limit(itertools.repeat(op, 10000), tol=1e-12)
        predicted = float(weights @ tilde_vector(states, spec, axis))
        got = tilde_vector(final, spec, axis)
        assert np.allclose(got, predicted, atol=1e-6)


def test_span_of_tilde_state_never_grows():
    cfg = hexagon_config(max_rounds=25, convergence_tol=1e-14, sample_rate=1)
    spec = cfg.formation
    states = initial_states(cfg)
    rounds = [sample_round(cfg, k) for k in range(cfg.max_rounds)]
    trace = simulate(
        states, rounds, spec, cfg.params,
        convergence_tol=cfg.convergence_tol, sample_rate=1, certify_rounds=False,
    )
    # reconstruct round-boundary states from the per-round final samples
    boundary = {}
    for s in trace.samples:
        boundary.setdefault(s.t, {})[s.agent] = s
    times = sorted(boundary)
    for axis in ("x", "y"):
        spans = []
        for t in times:
            states_t = [
                AgentState(v.x, v.y, v.theta_x, v.theta_y)
                for _, v in sorted(boundary[t].items())
            ]
            vec = tilde_vector(states_t, spec, axis)
            spans.append(vec.max() - vec.min())
        assert all(s2 <= s1 + 1e-12 for s1, s2 in zip(spans, spans[1:]))


def test_account_costs_formulas():
    # ten arcs on six agents: orthogonal access needs 20 transmissions,
    # broadcast needs 3; seven rounds of broadcast total 21
    arcs10 = {(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2), (1, 3), (2, 4), (3, 5)}
    xi = {arc: 0.5 for arc in arcs10}
    rounds = constant_rounds(6, arcs10, xi, delta=20.0, count=7)
    report = account_costs(rounds)
    assert report.per_round_orthogonal == [20] * 7
    assert report.per_round_broadcast == [3] * 7
    assert report.cumulative_broadcast == 21
    assert report.cumulative_orthogonal == 140


def test_two_agent_costs():
    arcs = {(0, 1), (1, 0)}
    rounds = constant_rounds(2, arcs, {a: 1.0 for a in arcs}, delta=10.0, count=1)
    report = account_costs(rounds)
    assert report.per_round_orthogonal == [4]
    assert report.per_round_broadcast == [3]


def test_orthogonal_cost_exceeds_broadcast_for_n_greater_two():
    cfg = hexagon_config(n=5, topology=RandomStronglyConnected(0.0))
    for k in range(50):
        r = sample_round(cfg, k)
        report = account_costs([r])
        assert report.per_round_orthogonal[0] > 3
