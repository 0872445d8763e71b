"""Linear stability of relative equilibria.

Jacobians and Hessians are obtained by complex-step differentiation of the
analytic right-hand side and gradients (exact to machine precision for the
built-in potential); a central-difference fallback covers tabulated
potentials.  The characteristic polynomial at any equilibrium has the form
x(-x^4 + a x^2 + b) and the classification is read off the pair (a, b).
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List

import numpy as np

from .core import (
    DEFAULT_TOL,
    DegeneratePoint,
    OutsideDomain,
    Potential,
    ResidualTooLarge,
    Tolerances,
)
from .equilibria import EquilibriumRecord
from .reduced import grad_casimir, grad_hamiltonian, rhs


class Classification(Enum):
    LinearlyStable = "LinearlyStable"
    LinearlyUnstable = "LinearlyUnstable"
    Degenerate = "Degenerate"


@dataclass(frozen=True)
class LinearizationReport:
    jacobian: np.ndarray
    char_coeffs: tuple[float, float]       # (a, b) of x(-x^4 + a x^2 + b)
    eigenvalues: np.ndarray
    classification: Classification
    hessian_signature: tuple[int, int, int]


def jacobian_matrix(x, params, V: Potential) -> np.ndarray:
    """d(rhs)/dx at x; complex step when the potential allows it."""
    x = np.asarray(x, dtype=float)
    J = np.empty((5, 5))
    if V.analytic:
        h = 1e-200
        for j in range(5):
            z = x.astype(complex)
            z[j] += 1j * h
            J[:, j] = rhs(z, params, V).imag / h
    else:
        d = 1e-6
        for j in range(5):
            e = np.zeros(5)
            e[j] = d
            J[:, j] = (rhs(x + e, params, V) - rhs(x - e, params, V)) / (2 * d)
    return J


def _hessian_of(grad_fn, x, analytic: bool) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    H = np.empty((5, 5))
    if analytic:
        h = 1e-200
        for j in range(5):
            z = x.astype(complex)
            z[j] += 1j * h
            H[:, j] = grad_fn(z).imag / h
    else:
        d = 1e-6
        for j in range(5):
            e = np.zeros(5)
            e[j] = d
            H[:, j] = (grad_fn(x + e) - grad_fn(x - e)) / (2 * d)
    return 0.5 * (H + H.T)


def classify(a: float, b: float, tol: float = 1e-10) -> Classification:
    """Stability from the reduced characteristic factor -x^4 + a x^2 + b.

    Linear stability needs all four nonzero roots imaginary: a < 0,
    a^2 + 4b > 0 and b < 0.  Anything within tol of a boundary is
    reported Degenerate rather than forced into a class.
    """
    disc = a * a + 4 * b
    if abs(a) <= tol or abs(b) <= tol or abs(disc) <= tol:
        return Classification.Degenerate
    if a < 0 and disc > 0 and b < 0:
        return Classification.LinearlyStable
    return Classification.LinearlyUnstable


def char_coefficients(J: np.ndarray, zero_tol: float = 1e-12) -> tuple[float, float]:
    """(a, b) after deflating the guaranteed zero root of the degree-5 poly."""
    c = np.poly(J)          # [1, c4, c3, c2, c1, c0]
    # the Casimir forces a root at zero; deflation is division by x
    a = -float(c[2])
    b = -float(c[4])
    return a, b


def hessian_signature(
    record: EquilibriumRecord,
    V: Potential,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[int, int, int]:
    """Signature of the Hessian of H restricted to the Casimir level set.

    At a relative equilibrium grad H = lam * grad C, so the restricted
    second variation is P (D2H - lam * D2C) P on the orthogonal complement
    of grad C.
    """
    if record.residual > tol.record_residual:
        raise ResidualTooLarge(f"residual {record.residual} too large for Hessian analysis")
    x = record.state.as_array()
    params = record.params
    gH = grad_hamiltonian(x, params, V)
    gC = grad_casimir(x, params)
    lam = float(gH @ gC) / float(gC @ gC)
    D2H = _hessian_of(lambda z: grad_hamiltonian(z, params, V), x, V.analytic)
    D2C = _hessian_of(lambda z: grad_casimir(z, params), x, True)
    M = D2H - lam * D2C

    # orthonormal basis of the complement of grad C
    n = gC / np.linalg.norm(gC)
    basis = np.linalg.svd(np.eye(5) - np.outer(n, n))[0][:, :4]
    R = basis.T @ M @ basis
    if abs(np.linalg.det(R)) < 1e-10:
        raise DegeneratePoint("restricted Hessian is singular (cusp)")
    w = np.linalg.eigvalsh(R)
    n_plus = int(np.sum(w > tol.eigenvalue))
    n_minus = int(np.sum(w < -tol.eigenvalue))
    return n_plus, n_minus, 4 - n_plus - n_minus


def linearize(
    record: EquilibriumRecord,
    V: Potential,
    tol: Tolerances = DEFAULT_TOL,
    with_hessian: bool = True,
) -> LinearizationReport:
    """Full linear analysis at a residual-checked equilibrium."""
    if record.residual > tol.record_residual:
        raise ResidualTooLarge(
            f"record residual {record.residual} exceeds {tol.record_residual}"
        )
    x = record.state.as_array()
    J = jacobian_matrix(x, record.params, V)
    a, b = char_coefficients(J)
    eigs = np.linalg.eigvals(J)
    sig = (0, 0, 0)
    if with_hessian:
        try:
            sig = hessian_signature(record, V, tol)
        except DegeneratePoint:
            sig = (0, 0, 4)
    return LinearizationReport(
        jacobian=J,
        char_coeffs=(a, b),
        eigenvalues=eigs,
        classification=classify(a, b, tol.classify),
        hessian_signature=sig,
    )


def type1_boundary(q: float) -> float:
    """Field strength where the side-by-side family changes stability."""
    s, c = np.sin(q), np.cos(q)
    rad = c**3 * (2 + c) / (2 * s**3 * np.sin(q / 2) ** 2)
    if rad < 0:
        raise OutsideDomain(f"no stability boundary at q={q} (radicand < 0)")
    return float(np.sqrt(rad))


def threshold_stability(q0: float) -> Classification:
    """Stability of the single degenerate isosceles equilibrium on the
    existence threshold; governed by the sign of 1 + 2 cos(q0)."""
    s = 1 + 2 * np.cos(q0)
    if abs(s) <= 1e-12:
        return Classification.Degenerate
    return Classification.LinearlyStable if s > 0 else Classification.LinearlyUnstable


def stability_rows(
    records: Iterable[EquilibriumRecord],
    V: Potential,
    tol: Tolerances = DEFAULT_TOL,
) -> List[dict]:
    rows = []
    for r in records:
        rep = linearize(r, V, tol)
        rows.append(
            {
                "q": r.state.q,
                "B": r.params.B,
                "family": r.family.value,
                "a": rep.char_coeffs[0],
                "b": rep.char_coeffs[1],
                "class": rep.classification.value,
                "n_plus": rep.hessian_signature[0],
                "n_minus": rep.hessian_signature[1],
                "n_zero": rep.hessian_signature[2],
            }
        )
    return rows


def stability_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    buf.write("q,B,family,a,b,class,n_plus,n_minus,n_zero\n")
    for r in rows:
        buf.write(
            f"{r['q']:.15g},{r['B']:.15g},{r['family']},{r['a']:.15g},{r['b']:.15g},"
            f"{r['class']},{r['n_plus']},{r['n_minus']},{r['n_zero']}\n"
        )
    return buf.getvalue()
