"""Matrix-level robustness tests for gain/phase-bounded uncertainty.

Small gain and small phase baselines, the four-multiplier sufficient and
necessary LMI tests (asymmetric sectors handled through rotation to the
symmetric normal form), the two-multiplier half-disk test, the
three-multiplier S-procedure baseline, the mu-style upper bounds found
by bisection over the gain radius, and a sampling falsification oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import lmi
from .dwshell import separation_problem
from .gainphase import (
    NotPhaseDefinedError,
    SectorSpec,
    matrix_phases,
    sample_sectored_disk_batch,
    TWO_PI,
)
from .linalg import as_square, det_and_inverse, hermitian_part, singular_values

__all__ = [
    "Method",
    "Verdict",
    "MatrixTestReport",
    "MuBound",
    "small_gain",
    "small_phase",
    "sufficient_test",
    "necessary_test",
    "half_disk_test",
    "s_procedure_test",
    "mu_hat",
    "mu_tilde",
    "brute_force_violation",
]

GAMMA_CAP = 1e6
BISECT_MAX_ITERS = 60


class Method(Enum):
    SMALL_GAIN = "small-gain"
    SMALL_PHASE = "small-phase"
    SUFFICIENT = "sufficient"
    NECESSARY = "necessary"
    HALF_DISK = "half-disk"
    S_PROCEDURE = "s-procedure"


class Verdict(Enum):
    CERTIFIED_ROBUST = "certified-robust"
    NO_CERTIFICATE = "no-certificate"


@dataclass
class MatrixTestReport:
    """Outcome of one LMI-based matrix robustness test."""

    verdict: Verdict
    method: Method
    margin: float
    certificate: lmi.FeasibilityCertificate | None = None
    note: str = ""

    def __post_init__(self):
        if self.verdict is Verdict.CERTIFIED_ROBUST:
            assert self.certificate is not None and self.margin > 0

    @property
    def certified(self) -> bool:
        return self.verdict is Verdict.CERTIFIED_ROBUST


def small_gain(a, gamma: float) -> bool:
    """Matrix small gain test: sigma_max(A) < 1/gamma.

    Necessary and sufficient for det(I + A B) != 0 over the whole
    gamma-ball (no phase information used).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return float(singular_values(as_square(a))[0]) < 1.0 / gamma


def small_phase(a, spec: SectorSpec, tol: float = 1e-8) -> bool | None:
    """Matrix small phase test (gain information unused).

    Checks [alpha, beta] ⊂ (-pi - min_phase(A), pi - max_phase(A))
    modulo 2 pi.  Returns None (falsy) when A is not quasi-sectorial, in
    which case the test does not apply.
    """
    a = as_square(a)
    try:
        info = matrix_phases(a, tol)
    except NotPhaseDefinedError:
        return None
    if info.rank == 0:
        return True  # A = 0: I + AB = I always
    start = -math.pi - info.min_phase
    width = TWO_PI - (info.max_phase - info.min_phase)
    da = (spec.alpha - start) % TWO_PI
    db = (spec.beta - start) % TWO_PI
    return bool(0 < da and db < width and da <= db)


def _solve_report(problem: lmi.LmiProblem, method: Method, budget, tol,
                  note: str = "") -> MatrixTestReport:
    result = lmi.solve(problem, budget=budget, tol=tol)
    if result.feasible:
        return MatrixTestReport(Verdict.CERTIFIED_ROBUST, method,
                                result.margin, result, note)
    return MatrixTestReport(
        Verdict.NO_CERTIFICATE, method, result.best_margin, None,
        note or f"best margin {result.best_margin:.3e}, "
                f"upper bound {result.upper_bound:.3e} "
                f"after {result.iterations} iterations")


def _rotated(a, spec: SectorSpec):
    """Symmetric normal form: (e^{j center} A, half-width).

    The uncertainty side rotates by e^{-j center}, so the analysis
    matrix rotates the opposite way and det(I + AB) is unchanged.
    """
    return np.exp(1j * spec.center) * as_square(a), spec.half_width


def sufficient_test(a, spec: SectorSpec, budget: int = lmi.DEFAULT_BUDGET,
                    tol: float = lmi.DEFAULT_TOL) -> MatrixTestReport:
    """Four-multiplier sufficient test for det(I + AB) != 0 on the sector disk.

    No invertibility requirement on A.  Sector widths of exactly pi are
    routed to the half-disk form on the rotated matrix.
    """
    a_rot, half = _rotated(a, spec)
    if half >= math.pi / 2 - 1e-12:
        rep = half_disk_test(a_rot, spec.gamma, budget=budget, tol=tol)
        return MatrixTestReport(rep.verdict, Method.SUFFICIENT, rep.margin,
                                rep.certificate, "width-pi sector: half-disk form")
    problem = separation_problem(a_rot, spec.gamma, half,
                                 spec.gamma / math.cos(half) ** 2)
    return _solve_report(problem, Method.SUFFICIENT, budget, tol)


def necessary_test(a, spec: SectorSpec, budget: int = lmi.DEFAULT_BUDGET,
                   tol: float = lmi.DEFAULT_TOL) -> MatrixTestReport:
    """Four-multiplier necessary test (invertible A required).

    NO_CERTIFICATE here means a genuine violation exists: some sector
    disk member B makes I + AB singular (up to the solver budget caveat).
    """
    a = as_square(a)
    _, inv = det_and_inverse(a)
    if inv is None:
        raise ValueError("necessary_test requires an invertible matrix")
    a_rot, half = _rotated(a, spec)
    if half >= math.pi / 2 - 1e-12:
        rep = half_disk_test(a_rot, spec.gamma, budget=budget, tol=tol)
        return MatrixTestReport(rep.verdict, Method.NECESSARY, rep.margin,
                                rep.certificate, "width-pi sector: half-disk form")
    problem = separation_problem(a_rot, spec.gamma, half,
                                 spec.gamma / math.cos(half))
    return _solve_report(problem, Method.NECESSARY, budget, tol)


def half_disk_test(a, gamma: float, budget: int = lmi.DEFAULT_BUDGET,
                   tol: float = lmi.DEFAULT_TOL) -> MatrixTestReport:
    """Two-multiplier half-disk test: k1 (I - g^2 A*A) + k2 H(A) > 0.

    Necessary and sufficient for invertible A; still sufficient for
    singular A.
    """
    a = as_square(a)
    n = a.shape[0]
    problem = lmi.LmiProblem(n)
    problem.add_scalar(np.eye(n) - gamma ** 2 * (a.conj().T @ a), name="k1")
    problem.add_scalar(hermitian_part(a), name="k2")
    return _solve_report(problem, Method.HALF_DISK, budget, tol)


def s_procedure_test(a, spec: SectorSpec, budget: int = lmi.DEFAULT_BUDGET,
                     tol: float = lmi.DEFAULT_TOL) -> MatrixTestReport:
    """Three-multiplier S-procedure baseline (symmetric sector).

    Strictly weaker than :func:`sufficient_test`: its certificates embed
    with the fourth multiplier at zero.
    """
    if not spec.symmetric:
        raise ValueError("s_procedure_test expects a symmetric sector")
    a = as_square(a)
    problem = separation_problem(a, spec.gamma, spec.beta, math.inf)
    return _solve_report(problem, Method.S_PROCEDURE, budget, tol)


@dataclass
class MuBound:
    """Upper bound on the phase-sensitive structured singular value.

    ``value`` is 1/gamma_star where gamma_star is the largest certified
    feasible gain radius; ``trace`` records the bisection decisions.
    """

    value: float
    gamma_star: float
    unbounded: bool = False
    trace: list = field(default_factory=list)

    def __float__(self):
        return self.value


def _mu_bisect(a, alpha: float, delta_of_gamma, tol: float,
               budget: int) -> MuBound:
    a = as_square(a)
    _, inv = det_and_inverse(a)
    if inv is None:
        raise ValueError("mu bounds require an invertible matrix")
    if not (0 < alpha < math.pi / 2):
        raise ValueError("alpha must lie in (0, pi/2)")
    trace = []

    def feasible(g):
        problem = separation_problem(a, g, alpha, delta_of_gamma(g))
        res = lmi.solve(problem, budget=budget)
        trace.append((g, bool(res.feasible)))
        return res.feasible

    sigma = float(singular_values(a)[0])
    lo = min(1e-6, 0.5 / sigma)
    if not feasible(lo):
        # Pathological scaling; fall back to the nominal bracket edge.
        lo = 1e-6
    hi = max(1.0, 2.0 * lo)
    while feasible(hi):
        hi *= 8.0
        if hi > GAMMA_CAP:
            return MuBound(1.0 / GAMMA_CAP, GAMMA_CAP, True, trace)
    for _ in range(BISECT_MAX_ITERS):
        if hi - lo <= tol * lo:
            break
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return MuBound(1.0 / lo, lo, False, trace)


def mu_hat(a, alpha: float, tol: float = 1e-3,
           budget: int = 3000) -> MuBound:
    """S-procedure upper bound: 1/sup{gamma : three-multiplier LMI feasible}."""
    return _mu_bisect(a, alpha, lambda g: math.inf, tol, budget)


def mu_tilde(a, alpha: float, tol: float = 1e-3,
             budget: int = 3000) -> MuBound:
    """Tighter four-multiplier upper bound; mu_tilde <= mu_hat always.

    Bisection over gamma relies on monotone feasibility (shrinking gamma
    shrinks the uncertainty set), asserted empirically by the test suite.
    """
    sec2 = 1.0 / math.cos(alpha) ** 2
    return _mu_bisect(a, alpha, lambda g: g * sec2, tol, budget)


def brute_force_violation(a, spec: SectorSpec, draws: int, seed,
                          batch: int = 20000):
    """Sampling falsification oracle over the sector disk.

    Returns (min |det(I + A B)|, argmin B) over ``draws`` random set
    members; deterministic in ``seed``.
    """
    a = as_square(a)
    if draws < 1:
        raise ValueError("draws must be >= 1")
    n = a.shape[0]
    rng = np.random.default_rng(seed)
    eye = np.eye(n)
    best = math.inf
    best_b = None
    done = 0
    while done < draws:
        k = min(batch, draws - done)
        bs = sample_sectored_disk_batch(spec, n, k, rng)
        dets = np.abs(np.linalg.det(eye[None, :, :] + a[None, :, :] @ bs))
        i = int(np.argmin(dets))
        if dets[i] < best:
            best = float(dets[i])
            best_b = bs[i].copy()
        done += k
    return best, best_b
