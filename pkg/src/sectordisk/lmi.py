"""Small dense LMI feasibility solver.

Finds non-negative scalar multipliers and Hermitian matrix variables that
make an affine Hermitian-valued constraint positive definite.  Strategy:
maximize the joint minimum eigenvalue of all constraint blocks over a
normalized (boxed) variable set with a cutting-plane method.  Each cut

    t <= Re(v* C_b v) + sum_i x_i Re(v* K_bi v)

is globally valid for any unit vector ``v`` because the constraint blocks
are affine in the decision vector, so the LP relaxation optimum is a true
upper bound on the achievable margin.  The LP is solved with HiGHS via
``scipy.optimize.linprog``.

Feasibility of the original (conic) problem is scale-invariant: the
constraints are positively homogeneous in the variables, so any feasible
ray intersects the unit box.  A positive box margin therefore certifies
feasibility; budget exhaustion or a box upper bound below the target
yields ``infeasible-within-budget``, which is NOT a proof of
infeasibility of the original problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .linalg import as_hermitian, matrix_to_json

__all__ = [
    "LmiProblem",
    "FeasibilityCertificate",
    "InfeasibleWithinBudget",
    "solve",
    "verify",
    "hermitian_basis_dim",
    "hermitian_from_coords",
    "coords_from_hermitian",
]

DEFAULT_BUDGET = 10_000
DEFAULT_TOL = 1e-7


def hermitian_basis_dim(order: int) -> int:
    """Real degrees of freedom of an order-n Hermitian matrix (n^2)."""
    return order * order


def hermitian_basis(order: int) -> list[np.ndarray]:
    """Fixed real-coordinate basis of the Hermitian matrices of ``order``.

    Ordering: diagonal units E_ii, then for each i<j the pair
    (E_ij + E_ji) and j(E_ij - E_ji).
    """
    basis = []
    for i in range(order):
        e = np.zeros((order, order), dtype=complex)
        e[i, i] = 1.0
        basis.append(e)
    for i in range(order):
        for j in range(i + 1, order):
            e = np.zeros((order, order), dtype=complex)
            e[i, j] = 1.0
            e[j, i] = 1.0
            basis.append(e)
            e = np.zeros((order, order), dtype=complex)
            e[i, j] = 1.0j
            e[j, i] = -1.0j
            basis.append(e)
    return basis


def hermitian_from_coords(x, order: int) -> np.ndarray:
    """Assemble a Hermitian matrix from its real coordinate vector."""
    x = np.asarray(x, dtype=float)
    if x.size != hermitian_basis_dim(order):
        raise ValueError("coordinate vector has the wrong length")
    m = np.zeros((order, order), dtype=complex)
    for c, b in zip(x, hermitian_basis(order)):
        m += c * b
    return m


def coords_from_hermitian(v) -> np.ndarray:
    """Inverse of :func:`hermitian_from_coords`."""
    m = as_hermitian(v, rtol=1e-9)
    order = m.shape[0]
    out = [m[i, i].real for i in range(order)]
    for i in range(order):
        for j in range(i + 1, order):
            out.append(m[i, j].real)
            out.append(m[i, j].imag)
    return np.asarray(out, dtype=float)


@dataclass
class _ScalarTerm:
    coefficient: np.ndarray
    nonneg: bool
    name: str


@dataclass
class _MatrixVar:
    order: int
    images: list[np.ndarray]  # contribution of each coordinate to the main block
    positive: bool
    name: str


class LmiProblem:
    """Affine Hermitian feasibility problem.

    The main constraint is

        constant + sum_i k_i * coeff_i + sum_v map_v(V_v)  >  0

    with scalars ``k_i`` (optionally sign-constrained nonnegative) and
    Hermitian matrix variables ``V_v`` (optionally side-constrained
    positive definite).  All blocks are affine, hence positively
    homogeneous when the constant term is zero.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("constraint dimension must be >= 1")
        self.dim = int(dim)
        self.constant = np.zeros((dim, dim), dtype=complex)
        self.scalar_terms: list[_ScalarTerm] = []
        self.matrix_vars: list[_MatrixVar] = []

    # -- construction -------------------------------------------------

    def set_constant(self, c) -> "LmiProblem":
        self.constant = self._check(c)
        return self

    def add_scalar(self, coefficient, nonneg: bool = True, name: str = "") -> int:
        """Add a scalar-multiplied coefficient term; returns its index."""
        term = _ScalarTerm(self._check(coefficient), bool(nonneg),
                           name or f"k{len(self.scalar_terms) + 1}")
        self.scalar_terms.append(term)
        return len(self.scalar_terms) - 1

    def add_hermitian_var(self, order: int, image_of, positive: bool = False,
                          name: str = "") -> int:
        """Add an order-n Hermitian matrix variable.

        ``image_of`` maps a Hermitian matrix to its (linear) contribution
        to the main constraint; it is materialized over the coordinate
        basis once here.  ``positive=True`` adds the side constraint
        V > 0, enforced through the same joint margin.
        """
        if order < 1:
            raise ValueError("matrix variable order must be >= 1")
        images = []
        for b in hermitian_basis(order):
            img = self._check(image_of(b))
            images.append(img)
        var = _MatrixVar(int(order), images, bool(positive),
                         name or f"V{len(self.matrix_vars) + 1}")
        self.matrix_vars.append(var)
        return len(self.matrix_vars) - 1

    def _check(self, m) -> np.ndarray:
        m = as_hermitian(m, rtol=1e-9)
        if m.shape != (self.dim, self.dim):
            raise ValueError(
                f"coefficient shape {m.shape} does not match dim {self.dim}")
        return m

    # -- packing ------------------------------------------------------

    @property
    def n_scalars(self) -> int:
        return len(self.scalar_terms)

    @property
    def n_coords(self) -> int:
        return self.n_scalars + sum(
            hermitian_basis_dim(v.order) for v in self.matrix_vars)

    def pack(self, scalars, matrices=None) -> np.ndarray:
        """Flatten (scalars, matrices) into one real decision vector."""
        scalars = np.asarray(scalars, dtype=float)
        if scalars.size != self.n_scalars:
            raise ValueError("wrong number of scalar values")
        parts = [scalars]
        matrices = matrices or []
        if len(matrices) != len(self.matrix_vars):
            raise ValueError("wrong number of matrix values")
        for var, val in zip(self.matrix_vars, matrices):
            coords = coords_from_hermitian(val)
            if coords.size != hermitian_basis_dim(var.order):
                raise ValueError("matrix value has the wrong order")
            parts.append(coords)
        return np.concatenate(parts) if parts else np.zeros(0)

    def unpack(self, x) -> tuple[np.ndarray, list[np.ndarray]]:
        x = np.asarray(x, dtype=float)
        scalars = x[: self.n_scalars].copy()
        matrices = []
        ofs = self.n_scalars
        for var in self.matrix_vars:
            n = hermitian_basis_dim(var.order)
            matrices.append(hermitian_from_coords(x[ofs: ofs + n], var.order))
            ofs += n
        return scalars, matrices

    # -- assembled block view -----------------------------------------

    def blocks(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """All constraint blocks as (constant, coefficient-stack) pairs.

        Block 0 is the main constraint; one extra block per positive
        definite side constraint.  The coefficient stack has shape
        (n_coords, blockdim, blockdim).
        """
        d = self.n_coords
        out = []
        main = np.zeros((d, self.dim, self.dim), dtype=complex)
        for i, term in enumerate(self.scalar_terms):
            main[i] = term.coefficient
        ofs = self.n_scalars
        for var in self.matrix_vars:
            for k, img in enumerate(var.images):
                main[ofs + k] = img
            ofs += hermitian_basis_dim(var.order)
        out.append((self.constant.copy(), main))

        ofs = self.n_scalars
        for var in self.matrix_vars:
            n = hermitian_basis_dim(var.order)
            if var.positive:
                side = np.zeros((d, var.order, var.order), dtype=complex)
                for k, b in enumerate(hermitian_basis(var.order)):
                    side[ofs + k] = b
                out.append((np.zeros((var.order, var.order), dtype=complex),
                            side))
            ofs += n
        return out

    def nonneg_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_coords, dtype=bool)
        for i, term in enumerate(self.scalar_terms):
            mask[i] = term.nonneg
        return mask

    def scale(self) -> float:
        """Max spectral norm over all coefficient matrices and the constant."""
        s = float(np.linalg.norm(self.constant, 2)) if self.dim else 0.0
        for c, stack in self.blocks():
            s = max(s, float(np.linalg.norm(c, 2)))
            for k in stack:
                s = max(s, float(np.linalg.norm(k, 2)))
        return max(s, np.finfo(float).tiny)

    def to_json(self) -> dict:
        """Audit dump of the problem's coefficient data."""
        return {
            "dim": self.dim,
            "constant": matrix_to_json(self.constant),
            "scalar_terms": [
                {"name": t.name, "nonneg": t.nonneg,
                 "coefficient": matrix_to_json(t.coefficient)}
                for t in self.scalar_terms
            ],
            "matrix_vars": [
                {"name": v.name, "order": v.order, "positive": v.positive,
                 "images": [matrix_to_json(img) for img in v.images]}
                for v in self.matrix_vars
            ],
        }


@dataclass
class FeasibilityCertificate:
    """Solution of an LMI feasibility problem.

    ``margin`` is the joint minimum eigenvalue over the main constraint
    and all side-constraint blocks, recomputed from the cleaned values.
    """

    scalars: np.ndarray
    matrices: list[np.ndarray]
    margin: float
    iterations: int
    upper_bound: float = np.inf
    feasible: bool = True

    def to_json(self) -> dict:
        return {
            "feasible": True,
            "scalars": [float(s) for s in self.scalars],
            "matrices": [matrix_to_json(m) for m in self.matrices],
            "margin": self.margin,
            "iterations": self.iterations,
        }


@dataclass
class InfeasibleWithinBudget:
    """Failure to find a positive-margin point within the budget.

    Explicitly NOT a proof of infeasibility; ``upper_bound`` is the
    cutting-plane bound on the best achievable margin over the normalized
    box at exit, and ``margin_history`` records the best margin seen per
    iteration for diagnostics.
    """

    best_margin: float
    iterations: int
    upper_bound: float
    scalars: np.ndarray = field(default_factory=lambda: np.zeros(0))
    matrices: list[np.ndarray] = field(default_factory=list)
    margin_history: list[float] = field(default_factory=list)
    feasible: bool = False

    def to_json(self) -> dict:
        return {
            "feasible": False,
            "best_margin": self.best_margin,
            "iterations": self.iterations,
            "upper_bound": self.upper_bound,
        }


def verify(problem: LmiProblem, scalars, matrices=None) -> float:
    """Joint margin of candidate values by direct eigenvalue evaluation.

    No optimization: assembles every block at the given values and
    returns the minimum eigenvalue across blocks.
    """
    x = problem.pack(scalars, matrices or [])
    return _evaluate(problem.blocks(), x)[0]


def _evaluate(blocks, x):
    """(joint margin, list of (block margin, bottom eigvecs)) at ``x``."""
    worst = np.inf
    details = []
    for c, stack in blocks:
        g = c + np.tensordot(x, stack, axes=(0, 0))
        g = (g + g.conj().T) / 2.0
        w, v = np.linalg.eigh(g)
        details.append((w[0], v))
        worst = min(worst, float(w[0]))
    return worst, details


def _cuts_from_eval(blocks, x, details, n_vecs=2):
    """Globally valid cuts t <= c + w.x from bottom eigenvectors."""
    rows = []
    for (c, stack), (_, vecs) in zip(blocks, details):
        for idx in range(min(n_vecs, vecs.shape[1])):
            v = vecs[:, idx]
            const = float(np.real(v.conj() @ c @ v))
            w = np.real(np.einsum("i,kij,j->k", v.conj(), stack, v))
            rows.append((const, w))
    return rows


def solve(problem: LmiProblem, budget: int = DEFAULT_BUDGET,
          tol: float = DEFAULT_TOL, seeds=None):
    """Solve an LMI feasibility problem.

    Parameters
    ----------
    problem : LmiProblem
    budget : int
        Maximum number of cutting-plane iterations (LP solves).
    tol : float
        Success requires a joint margin >= tol * problem.scale().
    seeds : sequence of decision vectors, optional
        Extra starting points evaluated before the loop (clipped to the
        normalized box); useful for structured warm starts.

    Returns
    -------
    FeasibilityCertificate or InfeasibleWithinBudget
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    blocks = problem.blocks()
    d = problem.n_coords
    if d == 0:
        raise ValueError("problem has no variables")
    scale = problem.scale()
    target = tol * scale
    mask = problem.nonneg_mask()
    lo = np.where(mask, 0.0, -1.0)
    hi = np.ones(d)

    t_cap = float(np.linalg.norm(problem.constant, 2)) + d * scale + 1.0

    cut_consts: list[float] = []
    cut_grads: list[np.ndarray] = []
    best_margin = -np.inf
    best_x = np.zeros(d)
    history: list[float] = []

    def record(x):
        nonlocal best_margin, best_x
        g, details = _evaluate(blocks, x)
        if g > best_margin:
            best_margin = g
            best_x = x.copy()
        for const, w in _cuts_from_eval(blocks, x, details):
            cut_consts.append(const)
            cut_grads.append(w)
        return g

    # Seed the model: origin, coordinate directions, caller-provided points.
    record(np.zeros(d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        record(e)
        if not mask[i]:
            record(-e)
    for s in seeds or []:
        s = np.asarray(s, dtype=float)
        if s.size != d:
            raise ValueError("seed has wrong dimension")
        record(np.clip(s, lo, hi))

    upper = np.inf
    iterations = 0
    polish_left = 40
    while iterations < budget:
        iterations += 1
        a_ub = np.hstack([
            -np.array(cut_grads),
            np.ones((len(cut_grads), 1)),
        ])
        b_ub = np.array(cut_consts)
        c_lp = np.zeros(d + 1)
        c_lp[-1] = -1.0
        bounds = [(lo[i], hi[i]) for i in range(d)] + [(None, t_cap)]
        res = linprog(c_lp, A_ub=a_ub, b_ub=b_ub, bounds=bounds,
                      method="highs")
        if not res.success:
            break
        upper = float(res.x[-1])
        x_lp = res.x[:d]
        g = record(x_lp)
        history.append(best_margin)

        if upper < target:
            break  # no point in the box can reach the target margin
        if best_margin >= target:
            # Polish: keep improving briefly so the certificate is not
            # razor-thin, then stop.
            if best_margin >= 0.6 * upper or polish_left <= 0:
                break
            polish_left -= 1
        if upper - best_margin <= 1e-13 * scale:
            break

    if best_margin >= target:
        margin, scal, mats = _clean(problem, blocks, best_x, mask)
        return FeasibilityCertificate(scal, mats, margin, iterations,
                                      upper_bound=upper)
    scal, mats = problem.unpack(best_x)
    return InfeasibleWithinBudget(
        best_margin=float(best_margin), iterations=iterations,
        upper_bound=float(upper), scalars=np.maximum(scal, 0.0) if scal.size
        else scal, matrices=mats, margin_history=history)


def _clean(problem, blocks, x, mask):
    """Project sign constraints exactly, then recompute the margin."""
    x = x.copy()
    x[mask] = np.maximum(x[mask], 0.0)
    margin = _evaluate(blocks, x)[0]
    scalars, matrices = problem.unpack(x)
    matrices = [(m + m.conj().T) / 2.0 for m in matrices]
    return float(margin), scalars, matrices
