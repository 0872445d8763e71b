import numpy as np
import pytest

from magsphere.core import (
    DegenerateConfiguration,
    DomainError,
    ReducedState,
    SystemParams,
    cot_potential,
    identical_params,
)
from magsphere.fullspace import (
    FullState,
    body_frame,
    euler_angles,
    full_integrate,
    full_rhs,
    geodesic_distance,
    lift_state,
    momentum_map,
    one_particle_integrate,
    circle_radius,
    reduce_state,
)
from magsphere.reduced import casimir, integrate

GENERAL = SystemParams(1.3, 0.7, 1.0, -2.0, 0.9)


def test_full_state_validation():
    with pytest.raises(DomainError):
        FullState([0, 0, -2], [0, 1, 0], [0, 0, 0], [0, 0, 0])
    with pytest.raises(DomainError):
        FullState([0, 0, -1], [0, 1, 0], [0, 0, 1], [0, 0, 0])  # p1 not tangent
    with pytest.raises(DegenerateConfiguration):
        FullState([0, 0, -1], [0, 0, 1], [0, 0, 0], [0, 0, 0])  # antipodal


def test_geodesic_distance():
    assert geodesic_distance([0, 0, 1], [0, 1, 0]) == pytest.approx(np.pi / 2)
    assert geodesic_distance([1, 0, 0], [np.cos(0.3), np.sin(0.3), 0]) == pytest.approx(0.3)


def test_body_frame_is_rotation(rng):
    for _ in range(20):
        q1 = rng.normal(size=3)
        q1 /= np.linalg.norm(q1)
        q2 = rng.normal(size=3)
        q2 /= np.linalg.norm(q2)
        g = body_frame(q1, q2)
        assert np.allclose(g.T @ g, np.eye(3), atol=1e-12)
        assert np.linalg.det(g) == pytest.approx(1.0)
        # g carries the reference placement onto the configuration
        q = geodesic_distance(q1, q2)
        assert np.allclose(g @ [0, 0, -1], q1, atol=1e-12)
        assert np.allclose(g @ [0, np.sin(q), -np.cos(q)], q2, atol=1e-12)


def test_euler_angle_reconstruction(rng):
    for _ in range(10):
        q1 = rng.normal(size=3)
        q1 /= np.linalg.norm(q1)
        q2 = rng.normal(size=3)
        q2 /= np.linalg.norm(q2)
        g = body_frame(q1, q2)
        theta, phi, psi = euler_angles(g)
        assert g[2, 2] == pytest.approx(np.cos(theta))


def test_reduce_lift_roundtrip(rng):
    for p in (identical_params(2.5), GENERAL):
        for _ in range(30):
            s = ReducedState(*rng.uniform(-1, 1, 3), rng.uniform(0.3, 2.8), rng.uniform(-1, 1))
            back = reduce_state(lift_state(s, p), p)
            assert np.max(np.abs(back.as_array() - s.as_array())) < 1e-12


def test_momentum_map_squared_is_casimir(rng):
    for p in (identical_params(2.5), GENERAL):
        for _ in range(30):
            s = ReducedState(*rng.uniform(-1, 1, 3), rng.uniform(0.3, 2.8), rng.uniform(-1, 1))
            phi = momentum_map(lift_state(s, p), p).phi
            assert float(phi @ phi) == pytest.approx(casimir(s, p), rel=1e-12)


def test_constraint_forces_preserve_sphere(params, V):
    s = ReducedState(0.05, -0.1, 0.12, 1.5, 0.03)
    full = lift_state(s, params)
    dy = full_rhs(full.as_array(), params, V)
    # d|q_i|^2/dt = 0 and d(q_i . p_i)/dt = 0
    y = full.as_array()
    for qi, pi in ((0, 6), (3, 9)):
        assert abs(y[qi:qi + 3] @ dy[qi:qi + 3]) < 1e-14
        assert abs(y[qi:qi + 3] @ dy[pi:pi + 3] + dy[qi:qi + 3] @ y[pi:pi + 3]) < 1e-14


def test_full_integration_conserves_momentum(params, V):
    from magsphere.equilibria import type2

    rec = type2(1.8, params.B)[0]
    s = rec.state.replace(m1=0.02, m2=rec.state.m2 + 0.03, p=0.01)
    traj = full_integrate(lift_state(s, params), params, V, t_end=5.0, dt=1e-3)
    assert traj.phi_drift.max() < 1e-10


def test_full_reduces_to_reduced_trajectory(params, V):
    s = ReducedState(0.05, -0.1, 0.12, 1.5, 0.03)
    red = integrate(s, params, V, t_end=2.0, dt=1e-3)
    full = full_integrate(lift_state(s, params), params, V, t_end=2.0, dt=1e-3)
    end = reduce_state(FullState.from_array(full.states[-1]), params)
    assert np.max(np.abs(end.as_array() - red.states[-1])) < 1e-8


def test_one_particle_circle_law(rng):
    """A free charged particle moves on a circle of radius
    r^2 = mu^2 |v|^2 / (B^2 e^2 + mu^2 |v|^2)."""
    for _ in range(10):
        mu = rng.uniform(0.5, 2.0)
        e = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        B = rng.uniform(0.5, 4.0)
        x0 = rng.normal(size=3)
        v0 = rng.normal(size=3)
        _, states = one_particle_integrate(x0, v0, mu, e, B, t_end=3.0, dt=1e-3)
        v = np.linalg.norm(states[0, 3:6] / mu)
        expected = mu**2 * v**2 / (B**2 * e**2 + mu**2 * v**2)
        assert circle_radius(states, mu, e, B) ** 2 == pytest.approx(expected, rel=1e-8)


def test_full_csv_header(params, V):
    s = ReducedState(0, 0.05, 0, 1.4, 0)
    traj = full_integrate(lift_state(s, params), params, V, t_end=0.05, dt=1e-2)
    header = traj.to_csv().splitlines()[0]
    assert header.startswith("t,q1x,q1y,q1z,q2x") and header.endswith("phix,phiy,phiz")
