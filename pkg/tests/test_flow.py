"""Deformation flow between two realisations of one relative jet."""

import numpy as np
import pytest

from jetlab.flow import (
    FlowConfig,
    FlowProblem,
    Trajectory,
    envelope_violation,
    field_bound_constant,
    integrate,
    map_level_set,
    roundtrip_check,
)
from jetlab.poly import Polynomial, PolyMap
from jetlab.sigma import SigmaSet


def _problem(config=None):
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    f = x**3 - 3 * x * y**3
    g = f + x**4 * y
    return FlowProblem(f, g, SigmaSet(2, [(0,)]), 3, config)


def _line_problem(config=None, r=3):
    x = Polynomial.variable(1, 0)
    return FlowProblem(x, x + x**4, SigmaSet(1, [(0,)]), r, config)


# --- problem validation -------------------------------------------------------


def test_difference_must_be_flat_on_sigma():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    f = x**3 - 3 * x * y**3
    with pytest.raises(ValueError):
        FlowProblem(f, f + x * y, SigmaSet(2, [(0,)]), 3)


def test_arity_mismatch_rejected():
    x = Polynomial.variable(2, 0)
    z = Polynomial.variable(3, 0)
    with pytest.raises(ValueError):
        FlowProblem(x, z, SigmaSet(2, [(0,)]), 2)
    with pytest.raises(ValueError):
        FlowProblem(x, x, SigmaSet(3, [(0,)]), 2)


def test_component_count_must_match():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    with pytest.raises(ValueError):
        FlowProblem(PolyMap([x]), PolyMap([x, y]), SigmaSet(2, [(0,)]), 2)


# --- the happy path -------------------------------------------------------------


def test_level_is_preserved_along_the_flow():
    traj = integrate(_problem(), (0.5, 0.5))
    assert traj.status == "ok"
    assert traj.ts[0] == 0.0 and traj.ts[-1] == 1.0
    assert traj.max_residual < 1e-9
    assert all(d > 0 for d in traj.distances)


def test_identity_deformation_does_not_move():
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    f = x**3 - 3 * x * y**3
    prob = FlowProblem(f, f, SigmaSet(2, [(0,)]), 3)
    traj = integrate(prob, (0.4, -0.3))
    assert traj.status == "ok"
    assert np.array_equal(traj.endpoint, np.array([0.4, -0.3]))
    assert traj.max_residual == 0.0


def test_roundtrip_returns_to_the_seed():
    err, fwd, back = roundtrip_check(_problem(), (0.5, 0.5))
    assert err < 1e-9
    assert fwd.status == "ok" and back.status == "ok"
    assert back.ts[-1] == 0.0


def test_points_on_sigma_are_bitwise_immobile():
    traj = integrate(_problem(), (0.0, 0.7))
    assert traj.status == "ok"
    assert traj.ts == [0.0, 1.0]
    assert np.array_equal(traj.endpoint, np.array([0.0, 0.7]))
    assert traj.residuals == [0.0, 0.0]


def test_envelope_bound_holds_with_measured_constant():
    prob = _problem()
    seeds = [(0.5, 0.5), (0.3, -0.7), (-0.6, 0.4)]
    c = field_bound_constant(prob, seeds)
    assert c > 0
    for seed in seeds:
        traj = integrate(prob, seed)
        assert envelope_violation(traj, c) <= 1e-12


def test_map_level_set_collects_all_seeds():
    lsm = map_level_set(_problem(), [(0.5, 0.5), (0.3, -0.7)])
    assert lsm.failures == []
    assert lsm.max_residual < 1e-9
    assert len(lsm.endpoints) == 2
    assert np.allclose(lsm.seeds[0], (0.5, 0.5))


# --- terminating statuses ---------------------------------------------------------


def test_hit_sigma_stops_at_the_floor():
    traj = integrate(_line_problem(FlowConfig(distance_floor=0.995)), (1.0,))
    assert traj.status == "hit-sigma"
    assert traj.distances[-1] <= 0.995


def test_exited_region_stops_at_the_boundary():
    traj = integrate(_line_problem(FlowConfig(region_radius=1.001)), (-1.0,))
    assert traj.status == "exited-region"
    assert abs(traj.endpoint[0]) > 1.001


def test_degenerate_gradient_is_reported():
    x = Polynomial.variable(1, 0)
    prob = FlowProblem(
        x**2,
        x**2 + x**5,
        SigmaSet(1, [(0,)]),
        4,
        FlowConfig(degeneracy_floor=100.0),
    )
    traj = integrate(prob, (0.5,))
    assert traj.status == "degenerate"
    assert "degenerate" in traj.message


def test_step_budget_exhaustion_is_reported():
    traj = integrate(_problem(FlowConfig(max_steps=3)), (0.5, 0.5))
    assert traj.status == "step-underflow"
    assert "budget" in traj.message


# --- trajectory bookkeeping ---------------------------------------------------------


def test_trajectory_rejects_stalled_time():
    traj = Trajectory()
    traj.append(0.0, np.array([1.0]), 0.0, 1.0)
    with pytest.raises(ValueError):
        traj.append(0.0, np.array([1.0]), 0.0, 1.0)


def test_trajectory_to_dict_schema():
    traj = integrate(_problem(), (0.5, 0.5))
    payload = traj.to_dict()
    assert payload["status"] == "ok"
    assert len(payload["samples"]) == len(traj.ts)
    first = payload["samples"][0]
    assert set(first) == {"t", "x", "F_residual", "d_sigma"}


def test_tighter_tolerance_does_not_worsen_the_residual():
    loose = integrate(_problem(FlowConfig(tol=1e-6)), (0.5, 0.5))
    tight = integrate(_problem(FlowConfig(tol=1e-10)), (0.5, 0.5))
    assert tight.max_residual <= loose.max_residual * 10 + 1e-15
    assert len(tight.ts) >= len(loose.ts)
