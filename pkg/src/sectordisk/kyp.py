"""State-space LMI robustness conditions.

Two assemblies: the symmetric-sector condition with a single Lyapunov
variable P > 0 over the whole frequency axis, and the asymmetric-sector
condition with Hermitian X and Y > 0 restricting the check to
non-negative frequencies (generalized-KYP form with frequency weight
[[0, X+jY], [X-jY, 0]]).

The constraints are complex Hermitian even for real systems (the phase
rotations enter the off-diagonal blocks), so everything is solved in
complex arithmetic with P, X, Y parameterized over Hermitian
coordinates; definiteness side constraints share the solver's joint
margin.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_lyapunov

from . import lmi
from .gainphase import SectorSpec
from .linalg import hermitian_part
from .ltisys import StateSpaceModel, freq_response, is_stable, log_grid

__all__ = [
    "KypVariant",
    "PConvention",
    "KypProblem",
    "assemble_theorem5",
    "assemble_theorem6",
    "solve_kyp",
    "verify_kyp",
    "symmetric_frequency_margin",
]


class KypVariant(Enum):
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


class PConvention(Enum):
    """Weight of the fourth multiplier block in the asymmetric assembly.

    HALF_WIDTH uses gamma sec^2((beta-alpha)/2) (consistent with the
    matrix-level sufficient condition); FULL_WIDTH uses
    gamma sec^2(beta-alpha).  Both are sound; they differ in
    conservatism, and which one validates externally supplied
    certificates is problem data, not a toolkit choice.
    """

    HALF_WIDTH = "half-width"
    FULL_WIDTH = "full-width"


@dataclass
class KypProblem:
    """Assembled state-space feasibility problem."""

    sys: StateSpaceModel
    spec: SectorSpec
    variant: KypVariant
    problem: lmi.LmiProblem
    p_convention: PConvention | None = None

    @property
    def constraint_dim(self) -> int:
        return self.sys.n_states + self.sys.n_inputs


def _warn_if_uncontrollable(sys: StateSpaceModel):
    """Rank check of the controllability matrix (generalized-KYP premise).

    Deficiency only warns; verifying controllability beyond this check is
    the caller's responsibility.
    """
    n = sys.n_states
    if n == 0:
        return
    blocks = [sys.b]
    for _ in range(n - 1):
        blocks.append(sys.a @ blocks[-1])
    rank = np.linalg.matrix_rank(np.hstack(blocks))
    if rank < n:
        warnings.warn(
            f"(A, B) controllability matrix has rank {rank} < {n}; the "
            "frequency-restricted equivalence assumes controllability",
            stacklevel=3)


def _gain_block(c, d, gamma, m):
    return np.block([
        [gamma ** 2 * c.conj().T @ c, gamma ** 2 * c.conj().T @ d],
        [gamma ** 2 * d.conj().T @ c, gamma ** 2 * d.conj().T @ d - np.eye(m)],
    ])


def _rotation_block(c, d, phase, n):
    """[[0, -conj(e)C*], [-eC, -2H(eD)]] with e = exp(j phase)."""
    e = np.exp(1j * phase)
    return np.block([
        [np.zeros((n, n)), -np.conj(e) * c.conj().T],
        [-e * c, -2.0 * hermitian_part(e * d)],
    ])


def assemble_theorem5(sys: StateSpaceModel, gamma: float,
                      alpha: float) -> KypProblem:
    """Symmetric-sector state-space condition.

    Feasibility of

        [[A*P + PA, PB], [B*P, 0]] + sum_i k_i M_i < 0,  P > 0, k >= 0

    certifies closed-loop stability against every stable uncertainty
    with gain below gamma and phases within [-alpha, alpha] at all
    frequencies.  At alpha = pi/2 the fourth block degenerates to the
    passivity form (cos^2 term vanishes).
    """
    if not sys.square:
        raise ValueError("assembly requires a square system")
    if not (0 <= alpha <= math.pi / 2):
        raise ValueError("alpha must lie in [0, pi/2]")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    n, m = sys.n_states, sys.n_inputs
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    m1 = _gain_block(c, d, gamma, m)
    m2 = _rotation_block(c, d, math.pi / 2 - alpha, n)
    m3 = _rotation_block(c, d, -(math.pi / 2 - alpha), n)
    m4 = np.block([
        [np.zeros((n, n)), -c.conj().T],
        [-c, -(d.conj().T + d) - (2 * math.cos(alpha) ** 2 / gamma) * np.eye(m)],
    ])

    problem = lmi.LmiProblem(n + m)
    for i, blk in enumerate((m1, m2, m3, m4)):
        problem.add_scalar(-blk, name=f"k{i + 1}")
    if n:
        zm = np.zeros((m, m))

        def lyap_image(p):
            return -np.block([[a.conj().T @ p + p @ a, p @ b],
                              [b.conj().T @ p, zm]])

        problem.add_hermitian_var(n, lyap_image, positive=True, name="P")
    spec = SectorSpec.from_symmetric(gamma, alpha) if alpha > 0 else \
        SectorSpec(gamma, -1e-12, 1e-12)
    return KypProblem(sys, spec, KypVariant.SYMMETRIC, problem)


def assemble_theorem6(sys: StateSpaceModel, gamma: float, alpha: float,
                      beta: float,
                      p_convention: PConvention = PConvention.HALF_WIDTH
                      ) -> KypProblem:
    """Asymmetric-sector condition over non-negative frequencies.

    Feasibility of

        [A B; I 0]* [[0, X+jY], [X-jY, 0]] [A B; I 0] + sum_i k_i M_i < 0

    with Hermitian X, Y > 0 and k >= 0 certifies robustness against the
    gain/phase-bounded uncertainty set on [alpha, beta].  The third
    multiplier block carries the lower phase bound through the rotation
    e^{+-j(pi/2 + alpha)}; the fourth block's weight p follows
    ``p_convention``.
    """
    if not sys.square:
        raise ValueError("assembly requires a square system")
    spec = SectorSpec(gamma, alpha, beta)
    if spec.half_width >= math.pi / 2:
        raise ValueError("sector width must be below pi")
    _warn_if_uncontrollable(sys)
    n, m = sys.n_states, sys.n_inputs
    a, b, c, d = sys.a, sys.b, sys.c, sys.d
    q = spec.center
    if p_convention is PConvention.HALF_WIDTH:
        p = gamma / math.cos(spec.half_width) ** 2
    else:
        p = gamma / math.cos(beta - alpha) ** 2
    m1 = _gain_block(c, d, gamma, m)
    m2 = _rotation_block(c, d, -(math.pi / 2 - beta), n)
    m3 = _rotation_block(c, d, math.pi / 2 + alpha, n)
    e4 = p * np.exp(1j * q)
    m4 = np.block([
        [np.zeros((n, n)), -np.conj(e4) * c.conj().T],
        [-e4 * c, -2.0 * p * hermitian_part(np.exp(1j * q) * d) + np.eye(m)],
    ])

    problem = lmi.LmiProblem(n + m)
    for i, blk in enumerate((m1, m2, m3, m4)):
        problem.add_scalar(-blk, name=f"k{i + 1}")
    if n:
        zm = np.zeros((m, m))

        def x_image(x):
            return -np.block([[x @ a + a.conj().T @ x, x @ b],
                              [b.conj().T @ x, zm]])

        def y_image(y):
            return -np.block([[1j * (a.conj().T @ y - y @ a), -1j * (y @ b)],
                              [1j * (b.conj().T @ y), zm]])

        problem.add_hermitian_var(n, x_image, positive=False, name="X")
        problem.add_hermitian_var(n, y_image, positive=True, name="Y")
    return KypProblem(sys, spec, KypVariant.ASYMMETRIC, problem,
                      p_convention)


def _lyapunov_seeds(kp: KypProblem) -> list[np.ndarray]:
    """Structured warm starts from the Lyapunov solution of the plant."""
    sys = kp.sys
    n = sys.n_states
    if n == 0 or not is_stable(sys):
        return []
    try:
        p0 = solve_lyapunov(sys.a.conj().T, -np.eye(n))
    except Exception:
        return []
    p0 = (p0 + p0.conj().T) / 2.0
    coords = lmi.coords_from_hermitian(p0)
    coords = coords / max(1.0, float(np.max(np.abs(coords))))
    seeds = []
    if kp.variant is KypVariant.SYMMETRIC:
        for s in (1.0, 0.1):
            seeds.append(kp.problem.pack(
                np.zeros(4), [lmi.hermitian_from_coords(s * coords, n)]))
    else:
        for s in (1.0, 0.1):
            seeds.append(kp.problem.pack(
                np.zeros(4),
                [np.zeros((n, n)), lmi.hermitian_from_coords(s * coords, n)]))
    return seeds


def solve_kyp(kp: KypProblem, budget: int = lmi.DEFAULT_BUDGET,
              tol: float = lmi.DEFAULT_TOL):
    """Solve an assembled problem; certificates carry (k, P) or (k, X, Y)."""
    return lmi.solve(kp.problem, budget=budget, tol=tol,
                     seeds=_lyapunov_seeds(kp))


def verify_kyp(kp: KypProblem, scalars, matrices) -> float:
    """Joint margin of candidate multipliers and matrix values.

    Pure linear algebra (no solver): the minimum eigenvalue over the
    negated constraint and the definiteness side blocks.
    """
    return lmi.verify(kp.problem, scalars, matrices)


def symmetric_frequency_margin(sys: StateSpaceModel, gamma: float,
                               alpha: float, k, grid=None) -> np.ndarray:
    """Frequency-domain margins implied by a symmetric-sector certificate.

    Evaluates, per frequency, the minimum eigenvalue of

        k1 (I - g^2 G*G) + 2 k2 H(e^{+j(pi/2-a)} G)
        + 2 k3 H(e^{-j(pi/2-a)} G) + k4 (2 H(G) + (2 cos^2 a / g) I)

    which a feasible state-space certificate forces positive at every
    frequency.
    """
    if grid is None:
        grid = log_grid(1e-2, 1e2, 200)
    k = np.asarray(k, dtype=float)
    out = []
    m = sys.n_inputs
    rot = math.pi / 2 - alpha
    for omega in grid:
        g = freq_response(sys, omega)
        s = (k[0] * (np.eye(m) - gamma ** 2 * (g.conj().T @ g))
             + 2 * k[1] * hermitian_part(np.exp(1j * rot) * g)
             + 2 * k[2] * hermitian_part(np.exp(-1j * rot) * g)
             + k[3] * (2 * hermitian_part(g)
                       + (2 * math.cos(alpha) ** 2 / gamma) * np.eye(m)))
        out.append(float(np.linalg.eigvalsh((s + s.conj().T) / 2)[0]))
    return np.asarray(out)
