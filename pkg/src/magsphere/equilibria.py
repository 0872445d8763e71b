"""Relative equilibria of the reduced system.

All relative equilibria have m1 = p = 0.  For identical particles with the
cotangent potential the two families are available in closed form (the
side-by-side family for every q != pi/2, and the isosceles family above a
threshold field strength).  For general masses and charges the solver goes
through a quartic in m3 followed by admissibility filtering and a Newton
polish, and the right-angle configuration q = pi/2 is handled by its own
2x2 system.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Union

import numpy as np

from .core import (
    DEFAULT_TOL,
    DomainError,
    NearRightAngle,
    NoAdmissibleRoot,
    Potential,
    ReducedState,
    SystemParams,
    Tolerances,
    cot_potential,
    identical_params,
)
from .reduced import casimir_array, hamiltonian_array, rhs

RIGHT_ANGLE_BAND = 1e-6


class Family(Enum):
    TypeI_plus = "TypeI+"
    TypeI_minus = "TypeI-"
    TypeII_plus = "TypeII+"
    TypeII_minus = "TypeII-"
    General = "General"
    RightAngle = "RightAngle"


@dataclass(frozen=True)
class EquilibriumRecord:
    family: Family
    state: ReducedState
    params: SystemParams
    H: float
    C: float
    residual: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "q": self.state.q,
            "B": self.params.B,
            "m2": self.state.m2,
            "m3": self.state.m3,
            "H": self.H,
            "C": self.C,
            "residual": self.residual,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class RightAngleFamily:
    """One-parameter family of right-angle equilibria (B = 0, equal masses):
    the hyperbola m2 * m3 = product, with m1 = p = 0 and q = pi/2."""

    product: float
    params: SystemParams

    def member(self, m2: float) -> ReducedState:
        if m2 == 0:
            raise DomainError("m2 = 0 is not on the hyperbola")
        return ReducedState(0.0, m2, self.product / m2, np.pi / 2, 0.0)


def make_record(
    family: Family,
    m2: float,
    m3: float,
    q: float,
    params: SystemParams,
    V: Potential,
    degenerate: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> EquilibriumRecord:
    state = ReducedState(0.0, float(m2), float(m3), float(q), 0.0)
    x = state.as_array()
    res = float(np.max(np.abs(rhs(x, params, V))))
    return EquilibriumRecord(
        family=family,
        state=state,
        params=params,
        H=float(hamiltonian_array(x, params, V)),
        C=float(casimir_array(x, params)),
        residual=res,
        degenerate=degenerate,
    )


# ---------------------------------------------------------------------------
# closed forms for identical particles, V = cot
# ---------------------------------------------------------------------------

def type2_threshold(q: float) -> float:
    """Field strength above which the isosceles family exists at distance q."""
    return 2.0 * np.sqrt(1.0 / (np.sin(q) * (1.0 - np.cos(q))))


def type1(q: float, B: float) -> tuple[EquilibriumRecord, EquilibriumRecord]:
    """The two closed-form side-by-side equilibria (exchange-related pair)."""
    if abs(q - np.pi / 2) < RIGHT_ANGLE_BAND:
        raise NearRightAngle("the side-by-side family does not exist at q = pi/2")
    params = identical_params(B)
    V = cot_potential(params)
    h = q / 2
    s, c = np.sin(q), np.cos(q)
    tan = s / c
    rad = 4.0 / np.sin(h) + B**2 * (s * tan) ** 2 / np.cos(h)
    root = np.sqrt(rad)
    denom = np.sin(h) - np.sin(3 * h)
    recs = []
    for fam, sign in ((Family.TypeI_plus, +1.0), (Family.TypeI_minus, -1.0)):
        m2 = (2 * B * np.sin(h) ** 3 * s + sign * np.cos(h) ** 1.5 * c * root) / denom
        m3 = 0.5 * (B * s * tan - sign * np.sqrt(np.cos(h)) * root)
        recs.append(make_record(fam, m2, m3, q, params, V))
    return recs[0], recs[1]


def type2(q: float, B: float, tol: Tolerances = DEFAULT_TOL) -> List[EquilibriumRecord]:
    """Closed-form isosceles equilibria: 2 above the threshold, 1 on it, 0 below."""
    params = identical_params(B)
    V = cot_potential(params)
    h = q / 2
    disc = B**2 - 2.0 / (np.sin(h) ** 2 * np.sin(q))
    if disc < -tol.degenerate:
        return []
    if abs(disc) <= tol.degenerate:
        m2 = -2 * np.sin(h) ** 4 / np.sin(q) * B
        m3 = np.sin(h) ** 2 * B
        return [make_record(Family.TypeII_plus, m2, m3, q, params, V, degenerate=True)]
    root = np.sqrt(disc)
    out = []
    for fam, sign in ((Family.TypeII_plus, +1.0), (Family.TypeII_minus, -1.0)):
        m2 = -2 * np.sin(h) ** 4 / np.sin(q) * (B + sign * root)
        m3 = np.sin(h) ** 2 * (B + sign * root)
        out.append(make_record(fam, m2, m3, q, params, V))
    return out


def casimir_on_type1(q: float, B: float) -> float:
    """Closed-form Casimir value along the side-by-side family."""
    if abs(q - np.pi / 2) < RIGHT_ANGLE_BAND:
        raise NearRightAngle("q = pi/2 is outside the family")
    h = q / 2
    tan = np.tan(q)
    return np.cos(h) / np.sin(h) ** 3 * (1.0 + 0.5 * B**2 * np.sin(q) * tan**2)


# ---------------------------------------------------------------------------
# general masses and charges: quartic route
# ---------------------------------------------------------------------------

def quartic_coefficients(q: float, params: SystemParams, V: Potential) -> np.ndarray:
    """Descending coefficients of the squared equilibrium condition in m3."""
    mu1, mu2, e1, e2, B = params.mu1, params.mu2, params.e1, params.e2, params.B
    s, c = np.sin(q), np.cos(q)
    csc = 1.0 / s
    sec = 1.0 / c
    dV = V.derivative(q)
    c4 = -4 * mu1 * csc**4
    c3 = 4 * B * csc**4 * (e1 * mu2 - e2 * mu1 * np.cos(2 * q) * sec)
    c2 = 2 * csc**3 * sec * (
        2 * B**2 * e2 * s * (e2 * mu1 * c - e1 * mu2)
        - 2 * mu2 * dV * (mu2 + mu1 * np.cos(2 * q))
    )
    c1 = 4 * B * mu2 * csc * dV * (2 * e2 * mu1 - e1 * mu2 * sec)
    c0 = 4 * mu1 * mu2**2 * dV**2
    return np.array([c4, c3, c2, c1, c0])


def admissibility(m3: float, q: float, params: SystemParams) -> float:
    """Radicand A of the branch square root; candidates need A >= 0."""
    mu1, mu2, e1, e2, B = params.mu1, params.mu2, params.e1, params.e2, params.B
    s, c = np.sin(q), np.cos(q)
    cot, csc = c / s, 1.0 / s
    return (
        4 * mu2 * m3 * cot * csc * (mu2 * c * (B * e1 + m3) - B * e2 * mu1)
        + (-mu2 * (B * e1 + m3) + mu1 * m3 * csc**2 + mu2 * m3 * cot**2) ** 2
    )


def m2_from_m3(m3: float, sign: float, q: float, params: SystemParams) -> float:
    mu1, mu2, e1, B = params.mu1, params.mu2, params.e1, params.B
    s, c = np.sin(q), np.cos(q)
    cot2 = (c / s) ** 2
    csc2 = 1.0 / s**2
    A = max(admissibility(m3, q, params), 0.0)
    return (
        np.tan(q)
        * (m3 * (mu1 * csc2 + mu2 * cot2 - mu2) - B * e1 * mu2 + sign * np.sqrt(A))
        / (2 * mu2)
    )


def _equilibrium_conditions(m2, m3, q, params, V):
    """(m1', p') components of the reduced field at m1 = p = 0."""
    x = np.array([0.0, m2, m3, q, 0.0], dtype=np.result_type(m2, m3, float))
    f = rhs(x, params, V)
    return np.array([f[0], f[4]])


def _polish(m2, m3, q, params, V, iters=30, tol=1e-13):
    """2D Newton on the two nontrivial equilibrium conditions."""
    h = 1e-200
    z = np.array([m2, m3], dtype=float)
    for _ in range(iters):
        F = _equilibrium_conditions(z[0], z[1], q, params, V)
        if np.max(np.abs(F)) < tol:
            break
        if V.analytic:
            J = np.empty((2, 2))
            J[:, 0] = _equilibrium_conditions(z[0] + 1j * h, z[1], q, params, V).imag / h
            J[:, 1] = _equilibrium_conditions(z[0], z[1] + 1j * h, q, params, V).imag / h
        else:
            d = 1e-7
            J = np.empty((2, 2))
            J[:, 0] = (
                _equilibrium_conditions(z[0] + d, z[1], q, params, V)
                - _equilibrium_conditions(z[0] - d, z[1], q, params, V)
            ) / (2 * d)
            J[:, 1] = (
                _equilibrium_conditions(z[0], z[1] + d, q, params, V)
                - _equilibrium_conditions(z[0], z[1] - d, q, params, V)
            ) / (2 * d)
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        z = z - step
        if not np.all(np.isfinite(z)):
            return None
    F = _equilibrium_conditions(z[0], z[1], q, params, V)
    if np.max(np.abs(F)) > 1e-10:
        return None
    return z


def solve_general(
    q: float,
    params: SystemParams,
    V: Potential,
    tol: Tolerances = DEFAULT_TOL,
) -> List[EquilibriumRecord]:
    """All relative equilibria at distance q for arbitrary masses and charges.

    Roots of the quartic (companion-matrix eigenvalues) seed a Newton polish
    of the un-squared system; inadmissible and spurious roots are discarded.
    At least one record is always returned for V'(q) != 0 (an existence
    theorem backs this; violation raises NoAdmissibleRoot).
    """
    if abs(q - np.pi / 2) < RIGHT_ANGLE_BAND:
        raise NearRightAngle("m2 is indeterminate at q = pi/2; use solve_right_angle")
    if V.derivative(q) == 0:
        raise DomainError("equilibrium theory requires V'(q) != 0")

    coeffs = quartic_coefficients(q, params, V)
    roots = np.roots(coeffs)
    scale = max(1.0, np.max(np.abs(roots)))
    found: list[tuple[float, float]] = []
    for r in roots:
        if abs(r.imag) > 1e-8 * scale:
            continue
        m3 = float(r.real)
        A = admissibility(m3, q, params)
        if A < -1e-12:
            continue
        for sign in (+1.0, -1.0):
            m2 = m2_from_m3(m3, sign, q, params)
            z = _polish(m2, m3, q, params, V)
            if z is None:
                continue
            if admissibility(z[1], q, params) < -1e-12:
                continue
            dup = any(
                abs(z[0] - u) < 1e-7 * max(1, abs(u)) and abs(z[1] - v) < 1e-7 * max(1, abs(v))
                for u, v in found
            )
            if not dup:
                found.append((float(z[0]), float(z[1])))
    records = [
        make_record(Family.General, m2, m3, q, params, V, tol=tol) for m2, m3 in found
    ]
    records = [r for r in records if r.residual < tol.record_residual]
    if not records:
        raise NoAdmissibleRoot(
            f"no admissible equilibrium found at q={q}; this contradicts the existence theorem"
        )
    return records


# ---------------------------------------------------------------------------
# the right-angle configuration q = pi/2
# ---------------------------------------------------------------------------

def right_angle_discriminant(params: SystemParams, V: Potential) -> float:
    dV = V.derivative(np.pi / 2)
    e1, e2, mu1, mu2, B = params.e1, params.e2, params.mu1, params.mu2, params.B
    return (
        B**4 * e1**2 * e2**2
        + 2 * B**2 * e1 * e2 * (mu1 + mu2) * dV
        + (mu1 - mu2) ** 2 * dV**2
    )


def solve_right_angle(
    params: SystemParams,
    V: Potential,
    tol: Tolerances = DEFAULT_TOL,
) -> Union[List[EquilibriumRecord], RightAngleFamily]:
    """Equilibria at q = pi/2: 0, 1 or 2 records by discriminant sign.

    The special case B = 0 with equal masses degenerates into a hyperbola of
    solutions and is reported as a RightAngleFamily instead of records.
    """
    dV = V.derivative(np.pi / 2)
    e1, e2, mu1, mu2, B = params.e1, params.e2, params.mu1, params.mu2, params.B
    if B == 0:
        if mu1 == mu2:
            # the 2x2 system collapses to m2 * m3 = -mu * V'(pi/2)
            return RightAngleFamily(product=-mu1 * dV, params=params)
        return []

    # quadratic in m3 obtained by eliminating m2 from the 2x2 system
    a = B * e2 * mu1
    b = -(B**2 * e1 * e2 * mu2 + (mu2 - mu1) * mu2 * dV)
    c = -(mu2**2) * B * e1 * dV
    disc = right_angle_discriminant(params, V)
    if disc < -tol.degenerate:
        return []
    if abs(disc) <= tol.degenerate:
        m3_roots = [-b / (2 * a)]
        degenerate = True
    else:
        sq = mu2 * np.sqrt(disc)  # b^2 - 4ac = mu2^2 * disc
        m3_roots = [(-b + sq) / (2 * a), (-b - sq) / (2 * a)]
        degenerate = False
    out = []
    for m3 in m3_roots:
        if m3 == 0:
            continue
        m2 = -mu1 * (B * e2 * m3 + mu2 * dV) / (mu2 * m3)
        z = _polish(m2, m3, np.pi / 2, params, V)
        if z is not None:
            m2, m3 = z
        out.append(
            make_record(Family.RightAngle, m2, m3, np.pi / 2, params, V, degenerate=degenerate)
        )
    return out
