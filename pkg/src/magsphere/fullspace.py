"""Unreduced dynamics of one and two charged particles on the unit sphere.

This module is the oracle side of the build: everything here is phrased in
ambient 3-space with constraint forces, and is used to cross-validate the
reduced system.  The magnetic field is radial with uniform magnitude B, so
the Lorentz force on a particle at position x with velocity v is
e * B * (v x x).
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .core import (
    BodyFrameVelocity,
    CollisionApproach,
    DegenerateConfiguration,
    DomainError,
    NonFiniteState,
    Potential,
    Q_EDGE,
    ReducedState,
    SystemParams,
    body_velocity_to_reduced,
    reduced_to_body_velocity,
)

_UNIT_TOL = 1e-10


@dataclass(frozen=True)
class FullState:
    """Positions and momenta of both particles in ambient coordinates."""

    q1: np.ndarray
    q2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray

    def __post_init__(self):
        for name in ("q1", "q2", "p1", "p2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if abs(np.linalg.norm(self.q1) - 1) > _UNIT_TOL or abs(np.linalg.norm(self.q2) - 1) > _UNIT_TOL:
            raise DomainError("positions must lie on the unit sphere")
        if abs(self.q1 @ self.p1) > _UNIT_TOL or abs(self.q2 @ self.p2) > _UNIT_TOL:
            raise DomainError("momenta must be tangent to the sphere")
        if np.linalg.norm(np.cross(self.q1, self.q2)) < 1e-12:
            raise DegenerateConfiguration("particles coincident or antipodal")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q1, self.q2, self.p1, self.p2])

    @staticmethod
    def from_array(y) -> "FullState":
        y = np.asarray(y, dtype=float)
        return FullState(y[0:3], y[3:6], y[6:9], y[9:12])


@dataclass(frozen=True)
class MomentumValue:
    phi: np.ndarray


def geodesic_distance(q1, q2) -> float:
    return float(np.arctan2(np.linalg.norm(np.cross(q1, q2)), float(np.dot(q1, q2))))


def momentum_map(state: FullState, params: SystemParams) -> MomentumValue:
    phi = (
        -params.B * (params.e1 * state.q1 + params.e2 * state.q2)
        + np.cross(state.q1, state.p1)
        + np.cross(state.q2, state.p2)
    )
    return MomentumValue(phi)


def _momentum_map_array(y, params: SystemParams):
    q1, q2, p1, p2 = y[0:3], y[3:6], y[6:9], y[9:12]
    return -params.B * (params.e1 * q1 + params.e2 * q2) + np.cross(q1, p1) + np.cross(q2, p2)


def full_rhs(y, params: SystemParams, V: Potential):
    """Newtonian equations with Lorentz, inter-particle and constraint forces."""
    q1, q2, p1, p2 = y[0:3], y[3:6], y[6:9], y[9:12]
    mu1, mu2, e1, e2, B = params.mu1, params.mu2, params.e1, params.e2, params.B
    v1 = p1 / mu1
    v2 = p2 / mu2

    q = geodesic_distance(q1, q2)
    dV = V.derivative(q)
    sin_q = np.sin(q)
    # tangential gradient of the geodesic distance at each particle
    f1 = dV * (q2 - np.cos(q) * q1) / sin_q
    f2 = dV * (q1 - np.cos(q) * q2) / sin_q

    lorentz1 = e1 * B * np.cross(v1, q1)
    lorentz2 = e2 * B * np.cross(v2, q2)

    # Lagrange multipliers: keep q_i . v_i = 0 given |q_i| = 1
    lam1 = -mu1 * (v1 @ v1)
    lam2 = -mu2 * (v2 @ v2)

    dp1 = f1 + lorentz1 + lam1 * q1
    dp2 = f2 + lorentz2 + lam2 * q2
    return np.concatenate([v1, v2, dp1, dp2])


def full_vector_field(state: FullState, params: SystemParams, V: Potential) -> np.ndarray:
    return full_rhs(state.as_array(), params, V)


def _project(y):
    """Renormalize positions and remove normal momentum components."""
    out = y.copy()
    for qi, pi in ((0, 6), (3, 9)):
        q = out[qi : qi + 3]
        q /= np.linalg.norm(q)
        p = out[pi : pi + 3]
        p -= (p @ q) * q
    return out


@dataclass(frozen=True)
class FullTrajectory:
    times: np.ndarray
    states: np.ndarray            # shape (n, 12)
    phi: np.ndarray               # shape (n, 3)
    params: SystemParams

    @property
    def phi_drift(self) -> np.ndarray:
        return np.max(np.abs(self.phi - self.phi[0]), axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = [f"{v}{i}{a}" for v in ("q", "p") for i in (1, 2) for a in "xyz"]
        buf.write("t," + ",".join(cols) + ",phix,phiy,phiz\n")
        for t, y, f in zip(self.times, self.states, self.phi):
            buf.write(",".join(f"{v:.15g}" for v in [t, *y, *f]) + "\n")
        return buf.getvalue()


def full_integrate(
    initial: FullState,
    params: SystemParams,
    V: Potential,
    t_end: float,
    dt: float,
) -> FullTrajectory:
    """RK4 with per-step projection onto the sphere and its tangent planes."""
    if dt <= 0 or t_end <= 0:
        raise DomainError("dt and t_end must be positive")
    n_steps = int(round(t_end / dt))
    y = initial.as_array()
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 12))
    phi = np.empty((n_steps + 1, 3))

    def record(i, t, yi):
        times[i] = t
        states[i] = yi
        phi[i] = _momentum_map_array(yi, params)

    record(0, 0.0, y)
    for i in range(1, n_steps + 1):
        k1 = full_rhs(y, params, V)
        k2 = full_rhs(_project(y + 0.5 * dt * k1), params, V)
        k3 = full_rhs(_project(y + 0.5 * dt * k2), params, V)
        k4 = full_rhs(_project(y + dt * k3), params, V)
        y = _project(y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(f"non-finite full state at t={i * dt}")
        q = geodesic_distance(y[0:3], y[3:6])
        if not (Q_EDGE <= q <= np.pi - Q_EDGE):
            raise CollisionApproach(f"geodesic distance {q} left guarded domain at t={i * dt}")
        record(i, i * dt, y)

    return FullTrajectory(times, states, phi, params)


def body_frame(q1, q2) -> np.ndarray:
    """Rotation g carrying the reference placement onto (q1, q2).

    Reference: particle 1 at (0,0,-1), particle 2 at (0, sin q, -cos q).
    Built directly from the two position vectors; no Euler angles.
    """
    q = geodesic_distance(q1, q2)
    if not (Q_EDGE <= q <= np.pi - Q_EDGE):
        raise DegenerateConfiguration("particles coincident or antipodal")
    e3 = -np.asarray(q1, dtype=float)
    e2 = (np.asarray(q2, dtype=float) + np.cos(q) * e3) / np.sin(q)
    e1 = np.cross(e2, e3)
    return np.column_stack([e1, e2, e3])


def euler_angles(g) -> tuple[float, float, float]:
    """(theta, phi, psi) of a rotation matrix in the z-x-z style convention
    used for the reference parametrization.  Conversion utility only."""
    g = np.asarray(g, dtype=float)
    theta = float(np.arccos(np.clip(g[2, 2], -1.0, 1.0)))
    if abs(np.sin(theta)) < 1e-12:
        phi = float(np.arctan2(g[1, 0], g[0, 0]))
        psi = 0.0
    else:
        phi = float(np.arctan2(g[2, 0], g[2, 1]))
        psi = float(np.arctan2(g[0, 2], -g[1, 2]))
    return theta, phi, psi


def reduce_state(state: FullState, params: SystemParams) -> ReducedState:
    """Quotient a full state by the rotation group.

    Finds the body frame, pulls the velocities back, extracts the angular
    velocity and qdot, and applies the kinetic-energy Legendre map.
    """
    q = geodesic_distance(state.q1, state.q2)
    g = body_frame(state.q1, state.q2)
    u1 = g.T @ (state.p1 / params.mu1)
    u2 = g.T @ (state.p2 / params.mu2)
    s, c = np.sin(q), np.cos(q)
    # u1 = w x (0,0,-1) = (-w2, w1, 0)
    w1 = u1[1]
    w2 = -u1[0]
    # u2 = w x (0, s, -c) + (0, c, s) qdot
    w3 = (-u2[0] - w2 * c) / s
    # both remaining components carry w1 + qdot; combine for conditioning
    w1_plus_qdot = (c * u2[1] + s * u2[2])
    qdot = w1_plus_qdot - w1
    vel = BodyFrameVelocity(w1, w2, w3, qdot)
    return body_velocity_to_reduced(vel, q, params)


def lift_state(state: ReducedState, params: SystemParams) -> FullState:
    """Embed a reduced state at the reference placement (g = identity)."""
    vel = reduced_to_body_velocity(state, params)
    q = state.q
    s, c = np.sin(q), np.cos(q)
    x1 = np.array([0.0, 0.0, -1.0])
    x2 = np.array([0.0, s, -c])
    w = np.array([vel.omega1, vel.omega2, vel.omega3])
    v1 = np.cross(w, x1)
    v2 = np.cross(w, x2) + np.array([0.0, c, s]) * vel.qdot
    return FullState(x1, x2, params.mu1 * v1, params.mu2 * v2)


def one_particle_rhs(y, mu: float, e: float, B: float):
    x, p = y[0:3], y[3:6]
    v = p / mu
    dp = e * B * np.cross(v, x) - mu * (v @ v) * x
    return np.concatenate([v, dp])


def one_particle_integrate(x0, v0, mu: float, e: float, B: float, t_end: float, dt: float):
    """Free charged particle on the sphere; returns (times, states(n, 6))."""
    x0 = np.asarray(x0, dtype=float)
    x0 = x0 / np.linalg.norm(x0)
    v0 = np.asarray(v0, dtype=float)
    v0 = v0 - (v0 @ x0) * x0
    y = np.concatenate([x0, mu * v0])
    n_steps = int(round(t_end / dt))
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 6))
    times[0], states[0] = 0.0, y

    def proj(z):
        out = z.copy()
        out[0:3] /= np.linalg.norm(out[0:3])
        out[3:6] -= (out[3:6] @ out[0:3]) * out[0:3]
        return out

    for i in range(1, n_steps + 1):
        k1 = one_particle_rhs(y, mu, e, B)
        k2 = one_particle_rhs(proj(y + 0.5 * dt * k1), mu, e, B)
        k3 = one_particle_rhs(proj(y + 0.5 * dt * k2), mu, e, B)
        k4 = one_particle_rhs(proj(y + dt * k3), mu, e, B)
        y = proj(y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        times[i], states[i] = i * dt, y
    return times, states


def circle_radius(states, mu: float, e: float, B: float) -> float:
    """Euclidean radius of a one-particle orbit, extracted from its conserved
    momentum value: the orbit lies on the cone x . phi = const."""
    x, p = states[0, 0:3], states[0, 3:6]
    phi = -e * B * x + np.cross(x, p)
    n = phi / np.linalg.norm(phi)
    cos_alpha = states[:, 0:3] @ n
    if np.max(np.abs(cos_alpha - cos_alpha[0])) > 1e-7:
        raise NonFiniteState("orbit does not stay on a cone; not a circle")
    return float(np.sqrt(1.0 - cos_alpha[0] ** 2))
