"""Parameter sweeps and derived curves.

Produces the data behind the bifurcation pictures: the isosceles existence
threshold, stability maps, energy-Casimir branch data with cusp locations,
the admissible (B, C) region for the isosceles family, and the directional
limit study of the side-by-side family at the right angle.
"""

from __future__ import annotations

import io
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    DEFAULT_TOL,
    DomainError,
    Potential,
    SystemParams,
    Tolerances,
    cot_potential,
    identical_params,
)
from .equilibria import (
    EquilibriumRecord,
    Family,
    casimir_on_type1,
    type1,
    type2,
    type2_threshold,
)
from .stability import Classification, linearize
from .reduced import casimir_array

B_CRITICAL = (4.0 / 3.0) * 3.0**0.25      # minimum of the existence threshold
Q_CRITICAL = 2.0 * np.pi / 3.0


# ---------------------------------------------------------------------------
# plumbing: grids and emission
# ---------------------------------------------------------------------------

def refined_axis(lo: float, hi: float, n: int, foci: Sequence[float] = ()) -> np.ndarray:
    """Axis of n samples on (lo, hi), log-refined toward each focus point."""
    base = np.linspace(lo, hi, n - 8 * len(foci) if foci else n)
    extra = []
    for f in foci:
        for side in (-1.0, 1.0):
            pts = f + side * np.geomspace(1e-4, 5e-2, 4) * (hi - lo)
            extra.append(pts)
    axis = np.concatenate([base] + extra) if extra else base
    axis = axis[(axis > lo) & (axis < hi)]
    return np.unique(np.sort(axis))


def default_q_axis(n: int = 400) -> np.ndarray:
    return refined_axis(0.02, np.pi - 0.02, n, foci=(np.pi / 2,))


def default_B_axis(n: int = 200) -> np.ndarray:
    return np.linspace(0.05, 10.0, n)


@dataclass(frozen=True)
class AtlasGrid:
    """Grid sweep output: per-cell equilibrium entries plus metadata."""

    axes: dict
    cells: list
    metadata: dict


def _metadata(params: Optional[SystemParams], potential: str, tol: Tolerances) -> dict:
    md = {
        "potential": potential,
        "tol_residual": tol.record_residual,
        "tol_classify": tol.classify,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if params is not None:
        md.update(mu1=params.mu1, mu2=params.mu2, e1=params.e1, e2=params.e2, B=params.B)
    return md


def csv_with_metadata(columns: Sequence[str], rows: Iterable[Sequence], metadata: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in metadata.items()) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else f"{v:.15g}" for v in row) + "\n")
    return buf.getvalue()


def json_with_metadata(payload, metadata: dict) -> str:
    return json.dumps({"metadata": metadata, "data": payload}, indent=1)


# ---------------------------------------------------------------------------
# threshold curve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdCurve:
    points: list                     # (q, B) pairs
    minimum: tuple                   # (q*, B*)


def threshold_curve(q_samples: Iterable[float]) -> ThresholdCurve:
    """Existence threshold of the isosceles family, with its minimum point."""
    pts = [(float(q), type2_threshold(q)) for q in q_samples]
    return ThresholdCurve(points=pts, minimum=(Q_CRITICAL, B_CRITICAL))


def type2_window(B: float) -> tuple[float, float]:
    """The q-interval on which the isosceles family exists at strength B."""
    if B <= B_CRITICAL:
        raise DomainError(f"B={B} at or below the critical strength {B_CRITICAL}")
    f = lambda q: type2_threshold(q) - B
    q0 = brentq(f, 1e-6, Q_CRITICAL, xtol=1e-14)
    q1 = brentq(f, Q_CRITICAL, np.pi - 1e-9, xtol=1e-14)
    return q0, q1


# ---------------------------------------------------------------------------
# energy-Casimir diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    tag: str
    q: np.ndarray
    C: np.ndarray
    H: np.ndarray
    cusps: list                      # refined (q, C, H) triples


@dataclass(frozen=True)
class EnergyCasimirDiagram:
    B: float
    branches: List[Branch]

    @property
    def cusps(self) -> list:
        return [c for b in self.branches for c in b.cusps]


def _quadratic_vertex(x, y) -> float:
    """Sub-grid extremum location from a 3-point quadratic fit."""
    c = np.polyfit(x, y, 2)
    if c[0] == 0:
        return float(x[1])
    return float(-c[1] / (2 * c[0]))


def _find_cusps(q, C, H):
    """Extrema of C along a branch: divided-difference sign changes."""
    dC = np.diff(C)
    cusps = []
    for i in range(len(dC) - 1):
        if dC[i] == 0 or dC[i] * dC[i + 1] > 0:
            continue
        sl = slice(max(i, 0), i + 3)
        qc = _quadratic_vertex(q[sl], C[sl])
        Cc = float(np.interp(qc, q, C))
        Hc = float(np.interp(qc, q, H))
        cusps.append((qc, Cc, Hc))
    return cusps


def energy_casimir_diagram(
    B: float,
    q_samples: Optional[np.ndarray] = None,
) -> EnergyCasimirDiagram:
    """Branches of (C, H) values over the equilibrium families at fixed B.

    Cusps (extrema of C along a branch) mark the saddle-node bifurcations
    of the reduced systems parametrized by the Casimir.
    """
    if B <= 0:
        raise DomainError("B must be positive")
    if q_samples is None:
        q_samples = default_q_axis()
    branches = []
    for tag, lo, hi in (
        ("TypeI_acute", 0.0, np.pi / 2),
        ("TypeI_obtuse", np.pi / 2, np.pi),
    ):
        qs = q_samples[(q_samples > lo + 1e-4) & (q_samples < hi - 1e-4)]
        recs = [type1(q, B)[0] for q in qs]
        C = np.array([r.C for r in recs])
        H = np.array([r.H for r in recs])
        branches.append(Branch(tag, qs, C, H, _find_cusps(qs, C, H)))
    if B > B_CRITICAL:
        q0, q1 = type2_window(B)
        qs = np.linspace(q0 + 1e-9, q1 - 1e-9, max(200, len(q_samples) // 2))
        for tag, idx in (("TypeII_plus", 0), ("TypeII_minus", 1)):
            recs = [type2(q, B)[idx] for q in qs]
            C = np.array([r.C for r in recs])
            H = np.array([r.H for r in recs])
            branches.append(Branch(tag, qs, C, H, _find_cusps(qs, C, H)))
    return EnergyCasimirDiagram(B=B, branches=branches)


# ---------------------------------------------------------------------------
# image of the energy-Casimir map; zero Casimir level
# ---------------------------------------------------------------------------

def image_halfplane_witness(C0: float, B: float) -> Callable[[float], float]:
    """H as a function of q on the Casimir level C0 (at m aligned, p = 0).

    Monotone decreasing from +inf to -inf, witnessing that every energy
    value is attained on every level set.
    """
    if C0 < 0:
        raise DomainError("C0 must be nonnegative")

    def H(q: float) -> float:
        return C0 / 2.0 + np.cos(q) / np.sin(q) + B**2 / np.tan(q / 2.0) ** 2

    return H


@dataclass(frozen=True)
class ZeroCasimirReport:
    B: float
    min_value: float
    min_q: float
    has_equilibria: bool


def zero_casimir_no_equilibria(B: float, q_samples: Optional[np.ndarray] = None) -> ZeroCasimirReport:
    """Evaluates the equilibrium obstruction csc q + 2 B^2 cot^2(q/2) on the
    zero Casimir level; a positive minimum proves there are no equilibria."""
    if B == 0:
        raise DomainError("B must be nonzero")
    if q_samples is None:
        q_samples = default_q_axis()
    vals = 1.0 / np.sin(q_samples) + 2 * B**2 / np.tan(q_samples / 2.0) ** 2
    i = int(np.argmin(vals))
    return ZeroCasimirReport(
        B=B, min_value=float(vals[i]), min_q=float(q_samples[i]),
        has_equilibria=bool(vals[i] <= 0),
    )


# ---------------------------------------------------------------------------
# (B, C) admissibility of the isosceles family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BCRegion:
    B_values: np.ndarray
    traces: list        # per B: dict with q, C_plus, C_minus, C_min, C_max
    meeting_point: tuple


def bc_region(
    B_samples: Optional[np.ndarray] = None,
    n_q: int = 400,
) -> BCRegion:
    """Casimir values attained by the isosceles family, per field strength.

    For each admissible B the two branches trace a closed curve in (q, C);
    its extrema bound the (B, C) region and are the saddle-node locations.
    """
    if B_samples is None:
        B_samples = np.linspace(B_CRITICAL + 0.01, 10.0, 120)
    traces = []
    for B in B_samples:
        if B <= B_CRITICAL:
            continue
        q0, q1 = type2_window(B)
        qs = np.linspace(q0 + 1e-10, q1 - 1e-10, n_q)
        Cp, Cm = [], []
        for q in qs:
            recs = type2(q, B)
            Cp.append(recs[0].C)
            Cm.append(recs[1].C if len(recs) > 1 else recs[0].C)
        Cp, Cm = np.array(Cp), np.array(Cm)
        allC = np.concatenate([Cp, Cm])
        traces.append(
            {"B": float(B), "q": qs, "C_plus": Cp, "C_minus": Cm,
             "C_min": float(np.min(allC)), "C_max": float(np.max(allC))}
        )
    # the region pinches off at the critical strength; C there from the
    # degenerate record
    rec = type2(Q_CRITICAL, B_CRITICAL)[0]
    return BCRegion(B_values=np.asarray(B_samples), traces=traces,
                    meeting_point=(B_CRITICAL, rec.C))


# ---------------------------------------------------------------------------
# directional limits at the right angle
# ---------------------------------------------------------------------------

def _richardson(values: np.ndarray) -> float:
    """Limit of f(h), f(h/2), f(h/4), ... assuming an error series in h."""
    v = np.array(values, dtype=float)
    for k in range(1, len(v)):
        v = (2.0**k * v[1:] - v[:-1]) / (2.0**k - 1.0)
    return float(v[0])


@dataclass(frozen=True)
class LimitReport:
    slope: float
    m2_limit: float
    m3_limit: float
    product_limit: float
    expected: tuple
    witness_product: float           # fixed-B evaluation near pi/2
    metadata: dict


def appendix_limit_study(
    a: float,
    h0: float = 1e-2,
    depth: int = 8,
    witness_B: float = 0.01,
) -> LimitReport:
    """Directional limit of the side-by-side family along B = a (q - pi/2).

    Approaches from q > pi/2 (where B >= 0 for a >= 0); the other side is
    its image under time reversal.  A fixed-B evaluation at the same q
    witnesses that the limit is not uniform in B.
    """
    if a < 0:
        raise DomainError("slope must be nonnegative; use time reversal for a < 0")
    hs = h0 / 2.0 ** np.arange(depth)
    m2s, m3s = [], []
    for h in hs:
        q = np.pi / 2 + h
        rec = type1(q, a * h)[0]
        m2s.append(rec.state.m2)
        m3s.append(rec.state.m3)
    m2_lim = _richardson(np.array(m2s))
    m3_lim = _richardson(np.array(m3s))
    prod_lim = _richardson(np.array(m2s) * np.array(m3s))
    root = np.sqrt(a * a + 4.0)
    expected = ((a - root) / 2.0, (-root - a) / 2.0, 1.0)
    wrec = type1(np.pi / 2 + hs[-1], witness_B)[0]
    return LimitReport(
        slope=a,
        m2_limit=m2_lim,
        m3_limit=m3_lim,
        product_limit=prod_lim,
        expected=expected,
        witness_product=float(wrec.state.m2 * wrec.state.m3),
        metadata={
            "path": "B = a*(q - pi/2), approach from q > pi/2",
            "negative_side": "time-reversal image (B >= 0 convention)",
            "h0": h0, "depth": depth, "witness_B": witness_B,
        },
    )


# ---------------------------------------------------------------------------
# axis-angle geometry of the rotating configurations
# ---------------------------------------------------------------------------

def axis_angles(record: EquilibriumRecord) -> tuple[float, float]:
    """Cosines of the angles between each particle axis and the rotation axis.

    The rotation axis of a relative equilibrium is the momentum vector; in
    the body frame the particles sit at (0,0,-1) and (0, sin q, -cos q).
    """
    s = record.state
    params = record.params
    phi = np.array(
        [
            s.m1,
            s.m2 - params.B * params.e2 * np.sin(s.q),
            s.m3 + params.B * (params.e1 + params.e2 * np.cos(s.q)),
        ]
    )
    # orient the axis so the isosceles family has both cosines = cos(q/2)
    n = -phi / np.linalg.norm(phi)
    x1 = np.array([0.0, 0.0, -1.0])
    x2 = np.array([0.0, np.sin(s.q), -np.cos(s.q)])
    return float(x1 @ n), float(x2 @ n)


# ---------------------------------------------------------------------------
# grid sweeps with stability classes
# ---------------------------------------------------------------------------

def stability_grid(
    q_axis: Optional[np.ndarray] = None,
    B_axis: Optional[np.ndarray] = None,
    families: str = "both",
    tol: Tolerances = DEFAULT_TOL,
) -> AtlasGrid:
    """Classified closed-form equilibria over a (q, B) grid (identical
    particles).  Cell entries are (family, H, C, class) tuples."""
    if q_axis is None:
        q_axis = default_q_axis(120)
    if B_axis is None:
        B_axis = default_B_axis(60)
    cells = []
    for q in q_axis:
        for B in B_axis:
            params = identical_params(B)
            V = cot_potential(params)
            entries = []
            recs = []
            if families in ("both", "type1") and abs(q - np.pi / 2) > 1e-4:
                recs += list(type1(q, B))
            if families in ("both", "type2"):
                recs += type2(q, B)
            for r in recs:
                if r.residual > tol.record_residual:
                    continue
                rep = linearize(r, V, tol, with_hessian=False)
                entries.append((r.family.value, r.H, r.C, rep.classification.value))
            cells.append({"q": float(q), "B": float(B), "entries": entries})
    return AtlasGrid(
        axes={"q": q_axis, "B": B_axis},
        cells=cells,
        metadata=_metadata(None, "cot", tol),
    )
