"""The reduced Poisson system on (m1, m2, m3, q, p).

Hamiltonian, Casimir, bracket tensor, equations of motion and a fixed-step
integrator with invariant monitoring.  The bracket table is normative; a
test pins the identity rhs = sigma . grad(H).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    CollisionApproach,
    DomainError,
    NonFiniteState,
    Potential,
    Q_EDGE,
    ReducedState,
    SystemParams,
)


def hamiltonian(state: ReducedState, params: SystemParams, V: Potential) -> float:
    return float(hamiltonian_array(state.as_array(), params, V))


def hamiltonian_array(x, params: SystemParams, V: Potential):
    mu1, mu2 = params.mu1, params.mu2
    m1, m2, m3, q, p = x
    cot = np.cos(q) / np.sin(q)
    csc2 = 1.0 / np.sin(q) ** 2
    kinetic = (
        mu2 * ((m1 - p) ** 2 + m2**2)
        + m3 * (-2 * mu2 * m2 * cot + mu1 * m3 * csc2 + mu2 * m3 * cot**2)
    ) / (2 * mu1 * mu2)
    return kinetic + p**2 / (2 * mu2) + V.value(q)


def grad_hamiltonian(x, params: SystemParams, V: Potential):
    """Analytic gradient of H; the (m, p)-components are the body velocities."""
    mu1, mu2 = params.mu1, params.mu2
    m1, m2, m3, q, p = x
    s = np.sin(q)
    cot = np.cos(q) / s
    csc2 = 1.0 / s**2
    dm1 = (m1 - p) / mu1
    dm2 = (m2 - m3 * cot) / mu1
    dm3 = cot * (m3 * cot - m2) / mu1 + m3 * csc2 / mu2
    dq = m3 * csc2 * (mu2 * m2 - (mu1 + mu2) * m3 * cot) / (mu1 * mu2) + V.derivative(q)
    dp = (p * (mu1 + mu2) - mu2 * m1) / (mu1 * mu2)
    return np.array([dm1, dm2, dm3, dq, dp])


def casimir(state: ReducedState, params: SystemParams) -> float:
    return float(casimir_array(state.as_array(), params))


def casimir_array(x, params: SystemParams):
    m1, m2, m3, q, p = x
    B, e1, e2 = params.B, params.e1, params.e2
    return (
        m1**2
        + (m2 - B * e2 * np.sin(q)) ** 2
        + (m3 + B * (e1 + e2 * np.cos(q))) ** 2
    )


def grad_casimir(x, params: SystemParams):
    m1, m2, m3, q, p = x
    B, e1, e2 = params.B, params.e1, params.e2
    u = m2 - B * e2 * np.sin(q)
    w = m3 + B * (e1 + e2 * np.cos(q))
    return np.array(
        [
            2 * m1,
            2 * u,
            2 * w,
            -2 * B * e2 * (u * np.cos(q) + w * np.sin(q)),
            0.0 * m1,
        ]
    )


@dataclass(frozen=True)
class PoissonTensor:
    """Antisymmetric 5x5 bracket matrix evaluated at a state."""

    matrix: np.ndarray

    def apply(self, grad: np.ndarray) -> np.ndarray:
        return self.matrix @ grad


def poisson_tensor(state: ReducedState, params: SystemParams) -> PoissonTensor:
    return PoissonTensor(poisson_matrix(state.as_array(), params))


def poisson_matrix(x, params: SystemParams) -> np.ndarray:
    m1, m2, m3, q, p = x
    B, e1, e2 = params.B, params.e1, params.e2
    s, c = np.sin(q), np.cos(q)
    sig = np.zeros((5, 5), dtype=np.result_type(x, float))
    pairs = {
        (0, 1): -m3 - B * (e1 + e2 * c),
        (0, 2): m2 - B * e2 * s,
        (1, 2): -m1,
        (1, 4): B * e2 * c,
        (2, 4): B * e2 * s,
        (3, 4): 1.0,
    }
    for (i, j), v in pairs.items():
        sig[i, j] = v
        sig[j, i] = -v
    return sig


def vector_field(state: ReducedState, params: SystemParams, V: Potential) -> np.ndarray:
    """Right-hand side (m1', m2', m3', q', p') of the reduced equations."""
    return rhs(state.as_array(), params, V)


def rhs(x, params: SystemParams, V: Potential):
    mu1, mu2 = params.mu1, params.mu2
    B, e1, e2 = params.B, params.e1, params.e2
    m1, m2, m3, q, p = x
    s = np.sin(q)
    c = np.cos(q)
    cot = c / s
    csc = 1.0 / s
    csc2 = csc * csc
    inv = 1.0 / (mu1 * mu2)

    dm1 = -inv * (
        mu2 * (m2 - m3 * cot) * (B * e1 + m2 * cot + m3)
        + B * e2 * mu1 * m3 * csc
        - mu1 * m2 * m3 * csc2
    )
    dm2 = inv * (
        mu2 * (m1 - p) * (B * e1 + m3)
        + B * e2 * mu1 * p * c
        + mu2 * m1 * cot * (m2 - m3 * cot)
        - mu1 * m1 * m3 * csc2
    )
    dm3 = inv * (mu1 * B * e2 * p * s + mu2 * (m2 * p - m1 * m3 * cot))
    dq = inv * (p * (mu1 + mu2) - mu2 * m1)
    dp = -inv * (
        m3 * csc * (B * e2 * mu1 + csc * (mu2 * m2 - m3 * (mu1 + mu2) * cot))
        + mu1 * mu2 * V.derivative(q)
    )
    return np.array([dm1, dm2, dm3, dq, dp])


def residual(x, params: SystemParams, V: Potential) -> float:
    """Max-norm of the reduced vector field; zero at relative equilibria."""
    return float(np.max(np.abs(rhs(np.asarray(x, dtype=float), params, V))))


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step sample of a reduced orbit with invariant-drift records."""

    times: np.ndarray
    states: np.ndarray            # shape (n, 5)
    energy: np.ndarray
    casimir: np.ndarray
    params: SystemParams
    potential_name: str = "cot"

    @property
    def energy_drift(self) -> np.ndarray:
        return np.abs(self.energy - self.energy[0])

    @property
    def casimir_drift(self) -> np.ndarray:
        return np.abs(self.casimir - self.casimir[0])

    def final_state(self) -> ReducedState:
        return ReducedState.from_array(self.states[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,m1,m2,m3,q,p,H,C\n")
        for t, x, h, c in zip(self.times, self.states, self.energy, self.casimir):
            row = [t, *x, h, c]
            buf.write(",".join(f"{v:.15g}" for v in row) + "\n")
        return buf.getvalue()


def _casimir_projection(x, params: SystemParams, c_target: float):
    """Rescale the shifted momentum vector back onto the Casimir sphere."""
    m1, m2, m3, q, p = x
    B, e1, e2 = params.B, params.e1, params.e2
    v = np.array([m1, m2 - B * e2 * np.sin(q), m3 + B * (e1 + e2 * np.cos(q))])
    norm = np.linalg.norm(v)
    if norm == 0:
        return x
    v *= np.sqrt(c_target) / norm
    return np.array(
        [
            v[0],
            v[1] + B * e2 * np.sin(q),
            v[2] - B * (e1 + e2 * np.cos(q)),
            q,
            p,
        ]
    )


def integrate(
    initial: ReducedState,
    params: SystemParams,
    V: Potential,
    t_end: float,
    dt: float,
    project_casimir: bool = False,
) -> Trajectory:
    """Classical fixed-step RK4 on the reduced equations.

    Drift in H and C is monitored, not enforced, unless `project_casimir`
    is set (useful for long runs).  Raises CollisionApproach if q leaves
    the guarded interval and NonFiniteState on numeric blow-up.
    """
    if dt <= 0 or t_end <= 0:
        raise DomainError("dt and t_end must be positive")
    n_steps = int(round(t_end / dt))
    x = initial.as_array()
    c0 = casimir_array(x, params)

    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, 5))
    energy = np.empty(n_steps + 1)
    cas = np.empty(n_steps + 1)

    def record(i, t, xi):
        times[i] = t
        states[i] = xi
        energy[i] = hamiltonian_array(xi, params, V)
        cas[i] = casimir_array(xi, params)

    record(0, 0.0, x)
    for i in range(1, n_steps + 1):
        k1 = rhs(x, params, V)
        k2 = rhs(x + 0.5 * dt * k1, params, V)
        k3 = rhs(x + 0.5 * dt * k2, params, V)
        k4 = rhs(x + dt * k3, params, V)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"non-finite state at t={i * dt}")
        if not (Q_EDGE <= x[3] <= np.pi - Q_EDGE):
            raise CollisionApproach(f"q={x[3]} left the guarded domain at t={i * dt}")
        if project_casimir:
            x = _casimir_projection(x, params, c0)
        record(i, i * dt, x)

    return Trajectory(times, states, energy, cas, params, V.name)
