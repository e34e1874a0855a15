"""Davis-Wielandt shell computations.

The shell of A is {(Re u*Au, Im u*Au, u*A*Au) : ||u|| = 1} in R^3 — a
convex body for n >= 3.  This module evaluates points and support
functions, tests membership in the canonical comparison sets (paraboloid
P, gain cap H_gamma, phase wedge V_alpha, slope cut K_k), constructs
normal-matrix witnesses for subset points, generates Monte-Carlo clouds
of the shell union over a sectored-disk set, and produces the
four-multiplier separation certificate for DW(-A^{-1}) against
H_gamma ∩ V_alpha ∩ K_delta.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from . import lmi
from .gainphase import SectorSpec, sample_sectored_disk_batch
from .linalg import (
    as_square,
    det_and_inverse,
    hermitian_part,
    hermitian_split,
    SingularMatrixError,
)

__all__ = [
    "DwPoint",
    "CanonicalSet",
    "SeparationCertificate",
    "dw_point",
    "dw_point_batch",
    "dw_support",
    "dw_projection",
    "in_canonical",
    "superset_member",
    "subset_member",
    "normal_witness",
    "monte_carlo_union",
    "separation_certificate",
    "hull_membership_residual",
    "write_cloud_csv",
    "write_projection_csv",
]

PARABOLOID_SLACK = 1e-10
MEMBERSHIP_SLACK = 1e-10


@dataclass(frozen=True)
class DwPoint:
    """One shell point (x, y, z) = (Re u*Au, Im u*Au, u*A*Au)."""

    x: float
    y: float
    z: float
    normalized: bool = False  # True when a non-unit u was rescaled

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


class CanonicalSet(Enum):
    PARABOLOID = "P"
    GAIN_CAP = "H"
    PHASE_WEDGE = "V"
    SLOPE_CUT = "K"


@dataclass(frozen=True)
class SeparationCertificate:
    """Multipliers certifying DW(-A^{-1}) ∩ (H_gamma ∩ V_alpha ∩ K_delta) = {}."""

    k: np.ndarray  # four non-negative multipliers
    margin: float
    delta: float

    def __post_init__(self):
        if np.any(np.asarray(self.k) < 0) or not np.any(np.asarray(self.k) > 0):
            raise ValueError("multipliers must be non-negative, not all zero")


def dw_point(a, u) -> DwPoint:
    """Shell point of A at (unit) vector u; non-unit u is normalized."""
    a = as_square(a)
    u = np.asarray(u, dtype=complex).reshape(-1)
    if u.shape[0] != a.shape[0]:
        raise ValueError("vector length does not match matrix order")
    nrm = float(np.linalg.norm(u))
    if nrm == 0.0:
        raise ValueError("zero vector has no shell point")
    normalized = abs(nrm - 1.0) > 1e-10
    u = u / nrm
    au = a @ u
    w = complex(u.conj() @ au)
    return DwPoint(w.real, w.imag, float(np.real(au.conj() @ au)), normalized)


def dw_point_batch(mats: np.ndarray, us: np.ndarray) -> np.ndarray:
    """Vectorized shell points: (draws, n, n) x (draws, n) -> (draws, 3)."""
    us = us / np.linalg.norm(us, axis=1, keepdims=True)
    au = np.einsum("kij,kj->ki", mats, us)
    w = np.einsum("ki,ki->k", us.conj(), au)
    z = np.real(np.einsum("ki,ki->k", au.conj(), au))
    return np.column_stack([w.real, w.imag, z])


def dw_support(a, direction) -> tuple[float, np.ndarray]:
    """Support value of DW(A) in a direction (a, b, c) plus a maximizer.

    The support equals lambda_max(a H(A) + b K(A) + c A*A); the returned
    unit vector attains it.
    """
    a = as_square(a)
    d = np.asarray(direction, dtype=float).reshape(-1)
    if d.shape != (3,):
        raise ValueError("direction must have three components")
    if not np.any(d != 0):
        raise ValueError("direction must be nonzero")
    h, k = hermitian_split(a)
    m = d[0] * h + d[1] * k + d[2] * (a.conj().T @ a)
    w, v = np.linalg.eigh((m + m.conj().T) / 2.0)
    return float(w[-1]), v[:, -1].copy()


def dw_projection(a, plane: str = "XZ", n_dirs: int = 256) -> np.ndarray:
    """Support polygon of the shell's projection onto the XZ or XY plane.

    For n >= 3 the shell is convex and the polygon traces its projected
    boundary; for n <= 2 it is the boundary hull of the projected
    surface.  Returns an (n_dirs, 2) array of ordered vertices.
    """
    if n_dirs < 8:
        raise ValueError("need at least 8 directions")
    plane = plane.upper()
    if plane not in ("XZ", "XY"):
        raise ValueError("plane must be 'XZ' or 'XY'")
    pts = []
    for t in np.linspace(0.0, 2.0 * math.pi, n_dirs, endpoint=False):
        if plane == "XZ":
            direction = (math.cos(t), 0.0, math.sin(t))
        else:
            direction = (math.cos(t), math.sin(t), 0.0)
        _, u = dw_support(a, direction)
        p = dw_point(a, u)
        pts.append((p.x, p.z) if plane == "XZ" else (p.x, p.y))
    return np.asarray(pts)


def in_canonical(p: DwPoint, which: CanonicalSet, gamma: float = 1.0,
                 alpha: float = 0.0, k: float = 1.0,
                 slack: float = MEMBERSHIP_SLACK) -> bool:
    """Membership of a point in one canonical set, with absolute slack.

    All four sets live inside the paraboloid x^2 + y^2 <= z.  The phase
    wedge at alpha = pi/2 degenerates to the half-space x >= 0.
    """
    x, y, z = p.x, p.y, p.z
    if x * x + y * y > z + slack:
        return False
    if which is CanonicalSet.PARABOLOID:
        return True
    if which is CanonicalSet.GAIN_CAP:
        return z <= gamma * gamma + slack
    if which is CanonicalSet.PHASE_WEDGE:
        if abs(alpha - math.pi / 2) <= 1e-14:
            return x >= -slack
        t = math.tan(alpha)
        return (-t * x - slack <= y <= t * x + slack)
    if which is CanonicalSet.SLOPE_CUT:
        return z <= k * x + slack
    raise ValueError(f"unknown canonical set {which}")


def _require_symmetric(spec: SectorSpec):
    if not spec.symmetric:
        raise ValueError("spec must be symmetric (beta = -alpha)")
    if spec.beta >= math.pi / 2:
        raise ValueError("half-width must be below pi/2")


def superset_member(p: DwPoint, spec: SectorSpec,
                    slack: float = MEMBERSHIP_SLACK) -> bool:
    """Membership in the shell-union superset H_g ∩ V_a ∩ K_{g sec^2 a}."""
    _require_symmetric(spec)
    g, a = spec.gamma, spec.beta
    return (in_canonical(p, CanonicalSet.GAIN_CAP, gamma=g, slack=slack)
            and in_canonical(p, CanonicalSet.PHASE_WEDGE, alpha=a, slack=slack)
            and in_canonical(p, CanonicalSet.SLOPE_CUT,
                             k=g / math.cos(a) ** 2, slack=slack))


def subset_member(p: DwPoint, spec: SectorSpec,
                  slack: float = MEMBERSHIP_SLACK) -> bool:
    """Membership in the normal-matrix shell union H_g ∩ V_a ∩ K_{g sec a}."""
    _require_symmetric(spec)
    g, a = spec.gamma, spec.beta
    return (in_canonical(p, CanonicalSet.GAIN_CAP, gamma=g, slack=slack)
            and in_canonical(p, CanonicalSet.PHASE_WEDGE, alpha=a, slack=slack)
            and in_canonical(p, CanonicalSet.SLOPE_CUT,
                             k=g / math.cos(a), slack=slack))


def normal_witness(p: DwPoint, spec: SectorSpec, n: int = 3) -> np.ndarray:
    """Normal member of the sectored-disk set whose shell contains ``p``.

    Two construction cases split along x vs sqrt(z) cos(alpha):
    two conjugate phases on the paraboloid level z when
    sqrt(z) cos(a) <= x, otherwise a triangle facet through the origin
    spanned by the phase-boundary pair (with zero padding).  Points on
    the case border use the first construction (no rank drop).
    """
    if n < 3:
        raise ValueError("witness construction needs n >= 3")
    if not subset_member(p, spec, slack=1e-9 * max(1.0, spec.gamma ** 2)):
        raise ValueError("point is outside the subset; no witness exists")
    g, al = spec.gamma, spec.beta
    x, y, z = p.x, p.y, p.z
    if z <= 0.0:
        return np.zeros((n, n), dtype=complex)
    sz = math.sqrt(z)
    if x >= sz * math.cos(al):
        # interpolate two conjugate phases at level z
        c = min(1.0, max(x / sz, math.cos(al)))
        th = math.acos(c)
        diag = [sz * np.exp(1j * th)] + [sz * np.exp(-1j * th)] * (n - 1)
        return np.diag(diag)
    # triangle facet through the origin
    z1s = (z / x) * math.cos(al)  # sqrt(z1)
    diag = [z1s * np.exp(1j * al), z1s * np.exp(-1j * al)] + [0.0] * (n - 2)
    return np.diag(diag)


def hull_membership_residual(p: DwPoint, m) -> float:
    """LP residual of ``p`` against the eigenvalue-lift hull of normal M.

    For normal M the shell is the convex hull of
    (Re l_i, Im l_i, |l_i|^2); returns the infinity-norm violation of the
    best convex combination (0 when the point is in the hull).
    """
    m = as_square(m)
    lam = np.linalg.eigvals(m)
    lifts = np.column_stack([lam.real, lam.imag, np.abs(lam) ** 2])
    k = lifts.shape[0]
    # minimize s  s.t.  |lifts.T w - p| <= s, sum w = 1, w >= 0
    c = np.zeros(k + 1)
    c[-1] = 1.0
    a_ub = []
    b_ub = []
    target = p.as_array()
    for row in range(3):
        a_ub.append(np.concatenate([lifts[:, row], [-1.0]]))
        b_ub.append(target[row])
        a_ub.append(np.concatenate([-lifts[:, row], [-1.0]]))
        b_ub.append(-target[row])
    a_eq = [np.concatenate([np.ones(k), [0.0]])]
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  A_eq=np.array(a_eq), b_eq=[1.0],
                  bounds=[(0, None)] * k + [(0, None)], method="highs")
    if not res.success:
        return math.inf
    return float(res.x[-1])


def monte_carlo_union(spec: SectorSpec, n: int, draws: int, seed,
                      batch: int = 20000) -> np.ndarray:
    """Monte-Carlo cloud of the shell union: (draws, 3) array of points.

    Each point is the shell point of a random set member at a random
    unit vector; deterministic in ``seed``.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    rng = np.random.default_rng(seed)
    out = np.empty((draws, 3))
    done = 0
    while done < draws:
        k = min(batch, draws - done)
        mats = sample_sectored_disk_batch(spec, n, k, rng)
        us = (rng.standard_normal((k, n))
              + 1j * rng.standard_normal((k, n)))
        out[done: done + k] = dw_point_batch(mats, us)
        done += k
    return out


def separation_certificate(a, gamma: float, alpha: float, delta: float,
                           budget: int = lmi.DEFAULT_BUDGET,
                           tol: float = lmi.DEFAULT_TOL):
    """Certificate that DW(-A^{-1}) misses H_gamma ∩ V_alpha ∩ K_delta.

    Solves for non-negative k_i with

        k1 (I - g^2 A*A) + k2 H(e^{-j(pi/2-a)} A)
        + k3 H(e^{+j(pi/2-a)} A) + k4 (delta H(A) + I)  >  0.

    ``delta = inf`` drops the fourth multiplier (the plain S-procedure
    form).  Returns a SeparationCertificate, or the solver's
    infeasible-within-budget report (never a proof of infeasibility).
    """
    a = as_square(a)
    if not (0 <= alpha < math.pi / 2):
        raise ValueError("alpha must lie in [0, pi/2)")
    if not math.isinf(delta) and delta < gamma:
        raise ValueError("delta must be >= gamma")
    _, inv = det_and_inverse(a)
    if inv is None:
        raise SingularMatrixError("separation certificate requires invertible A")
    problem = separation_problem(a, gamma, alpha, delta)
    result = lmi.solve(problem, budget=budget, tol=tol)
    if not result.feasible:
        return result
    k = result.scalars
    if math.isinf(delta):
        k = np.append(k, 0.0)
    return SeparationCertificate(k=k, margin=result.margin, delta=delta)


def separation_problem(a, gamma: float, alpha: float,
                       delta: float) -> lmi.LmiProblem:
    """The four-multiplier LMI underlying :func:`separation_certificate`."""
    a = as_square(a)
    n = a.shape[0]
    eye = np.eye(n)
    problem = lmi.LmiProblem(n)
    problem.add_scalar(eye - gamma ** 2 * (a.conj().T @ a), name="k1")
    problem.add_scalar(hermitian_part(np.exp(-1j * (math.pi / 2 - alpha)) * a),
                       name="k2")
    problem.add_scalar(hermitian_part(np.exp(1j * (math.pi / 2 - alpha)) * a),
                       name="k3")
    if not math.isinf(delta):
        problem.add_scalar(delta * hermitian_part(a) + eye, name="k4")
    return problem


def write_cloud_csv(path, cloud: np.ndarray):
    """Write an (n, 3) cloud as x,y,z rows (17 significant digits)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "z"])
        for row in cloud:
            w.writerow([format(v, ".17g") for v in row])


def write_projection_csv(path, polygon: np.ndarray, plane: str = "XZ"):
    """Write projection polygon vertices as two-column rows."""
    cols = ["x", "z"] if plane.upper() == "XZ" else ["x", "y"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in polygon:
            w.writerow([format(v, ".17g") for v in row])
