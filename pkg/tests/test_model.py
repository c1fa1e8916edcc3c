import numpy as np
import pytest

from airformation.model import (
    AgentState,
    ConfigError,
    ControlParams,
    FormationSpec,
    RandomStronglyConnected,
    RoundRealization,
    SimConfig,
    UniformFading,
    tilde_state,
    untilde_state,
)


def test_tilde_state_direct_subtraction():
    spec = FormationSpec([[3.0, 0.0], [0.0, 0.0]])
    st = AgentState(x=3.0, y=2.0, theta_x=1.0, theta_y=5.0)
    tx, ttx, ty, tty = tilde_state(st, spec, 0)
    assert tx == 0.0
    assert ttx == -2.0
    assert ty == 2.0
    assert tty == 5.0


def test_tilde_state_zero_displacement_is_identity():
    spec = FormationSpec([[0.0, 0.0], [0.0, 0.0]])
    st = AgentState(x=1.25, y=-0.5, theta_x=0.75, theta_y=2.0)
    assert tilde_state(st, spec, 1) == (st.x, st.theta_x, st.y, st.theta_y)


def test_tilde_untilde_round_trip_to_machine_precision():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        spec = FormationSpec(rng.normal(size=(n, 2)))
        i = int(rng.integers(0, n))
        st = AgentState(*rng.normal(scale=10.0, size=4))
        back = untilde_state(tilde_state(st, spec, i), spec, i)
        for got, want in zip(
            (back.x, back.theta_x, back.y, back.theta_y),
            (st.x, st.theta_x, st.y, st.theta_y),
        ):
            assert got == pytest.approx(want, rel=5e-16, abs=5e-15)


def test_tilde_state_index_out_of_range():
    spec = FormationSpec([[0.0, 0.0], [1.0, 1.0]])
    st = AgentState(0.0, 0.0, 0.0, 0.0)
    with pytest.raises(IndexError):
        tilde_state(st, spec, 2)
    with pytest.raises(IndexError):
        tilde_state(st, spec, -1)


def test_agent_state_rejects_non_finite():
    with pytest.raises(ValueError):
        AgentState(np.nan, 0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        AgentState(0.0, np.inf, 0.0, 0.0)


def test_formation_spec_validation():
    with pytest.raises(ValueError):
        FormationSpec([[1.0, 0.0]])  # single agent
    with pytest.raises(ValueError):
        FormationSpec([[1.0], [2.0]])  # not planar
    with pytest.raises(ValueError):
        FormationSpec([[np.nan, 0.0], [0.0, 0.0]])


def test_regular_polygon_centroid_at_origin():
    spec = FormationSpec.regular_polygon(6, circumradius=1.0)
    assert spec.n == 6
    assert np.allclose(spec.displacements.mean(axis=0), 0.0, atol=1e-15)
    assert np.allclose(np.linalg.norm(spec.displacements, axis=1), 1.0)


def test_control_params_bounds():
    with pytest.raises(ValueError):
        ControlParams(0.0, 0.5, 0.5, 0.5, sigma=0.5)
    with pytest.raises(ValueError):
        ControlParams(0.5, 0.5, 0.5, 0.5, sigma=1.0)
    with pytest.raises(ValueError):
        ControlParams(0.5, 0.5, 0.5, 0.5, sigma=0.0)
    p = ControlParams.homogeneous(3, a=0.5, b=0.4, sigma=0.8)
    assert p.a_x.shape == (3,)
    ax, bx = p.gains("x")
    assert np.all(ax == 0.5) and np.all(bx == 0.4)


def test_uniform_fading_rejects_zero_draws():
    fading = UniformFading(0.0, 1.0)
    rng = np.random.default_rng(3)
    draws = fading.sample(rng, 10000)
    assert np.all(draws > 1e-12)
    assert np.all(draws <= 1.0)
    with pytest.raises(ValueError):
        UniformFading(0.5, 0.5)
    with pytest.raises(ValueError):
        UniformFading(-1.0, 1.0)


def test_round_realization_validation():
    good = RoundRealization(
        k=0, n=2, delta=20.0, arcs=frozenset({(0, 1), (1, 0)}),
        xi={(0, 1): 0.5, (1, 0): 0.25},
    )
    assert good.in_neighbors(0) == [1]
    assert good.in_neighbors(1) == [0]
    with pytest.raises(ValueError):
        RoundRealization(k=0, n=2, delta=0.0, arcs=frozenset({(0, 1)}), xi={(0, 1): 1.0})
    with pytest.raises(ValueError):
        RoundRealization(k=0, n=2, delta=1.0, arcs=frozenset({(0, 0)}), xi={(0, 0): 1.0})
    with pytest.raises(ValueError):
        RoundRealization(k=0, n=2, delta=1.0, arcs=frozenset({(0, 1)}), xi={})
    with pytest.raises(ValueError):
        RoundRealization(k=0, n=2, delta=1.0, arcs=frozenset({(0, 1)}), xi={(0, 1): 0.0})


def test_rescale_receiver_touches_only_that_receiver():
    r = RoundRealization(
        k=0, n=3, delta=10.0,
        arcs=frozenset({(0, 1), (2, 1), (1, 0), (0, 2)}),
        xi={(0, 1): 0.5, (2, 1): 0.25, (1, 0): 0.125, (0, 2): 2.0},
    )
    scaled = r.rescale_receiver(1, 4.0)
    assert scaled.xi[(0, 1)] == 2.0
    assert scaled.xi[(2, 1)] == 1.0
    assert scaled.xi[(1, 0)] == 0.125
    assert scaled.xi[(0, 2)] == 2.0


def _config(**overrides):
    n = overrides.pop("n", 3)
    base = dict(
        n=n,
        formation=FormationSpec.regular_polygon(n),
        params=ControlParams.homogeneous(n),
        topology=RandomStronglyConnected(0.3),
        seed=5,
    )
    base.update(overrides)
    return SimConfig(**base)


def test_sim_config_accepts_valid():
    cfg = _config()
    assert cfg.problems() == []


def test_sim_config_rejects_bad_fields():
    with pytest.raises(ConfigError, match="delta_bounds"):
        _config(delta_bounds=(30.0, 10.0))
    with pytest.raises(ConfigError, match="convergence_tol"):
        _config(convergence_tol=0.0)
    with pytest.raises(ConfigError, match="formation"):
        _config(n=4, formation=FormationSpec.regular_polygon(3))
    with pytest.raises(ConfigError, match="initial_positions"):
        _config(initial_positions=np.zeros((2, 2)))
