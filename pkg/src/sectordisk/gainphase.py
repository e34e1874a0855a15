"""Matrix gain and phase machinery.

Sectoriality is decided from the rotated Hermitian parts
H(e^{-j th} A) = cos(th) H(A) + sin(th) K(A): the matrix is sectorial
exactly when some rotation makes that Hermitian part positive definite,
and phases are extracted from the congruence-canonical decomposition of
the (compressed) core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import (
    as_square,
    eig_hermitian,
    hermitian_split,
    range_compress,
    singular_values,
)

__all__ = [
    "SectorSpec",
    "Sectoriality",
    "PhaseInfo",
    "NotPhaseDefinedError",
    "nr_support",
    "classify_sectorial",
    "classify_detail",
    "matrix_phases",
    "in_sectored_disk",
    "sample_sectored_disk",
    "sample_sectored_disk_batch",
    "rotate_to_symmetric",
    "scalar_sectored_disk_ok",
]

DEFAULT_TOL = 1e-8
_COARSE_ANGLES = 720
TWO_PI = 2.0 * math.pi


class NotPhaseDefinedError(ValueError):
    """Phases requested for a matrix outside the (quasi-)sectorial classes."""


@dataclass(frozen=True)
class SectorSpec:
    """Gain/phase uncertainty description: radius ``gamma``, sector [alpha, beta].

    Angles in radians; the sector midpoint must lie in [-pi, pi) and the
    width in (0, pi].
    """

    gamma: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        mid = 0.5 * (self.alpha + self.beta)
        if not (-math.pi <= mid < math.pi):
            raise ValueError("sector midpoint must lie in [-pi, pi)")
        width = self.beta - self.alpha
        if not (0 < width <= math.pi):
            raise ValueError("sector width must lie in (0, pi]")

    @property
    def symmetric(self) -> bool:
        return abs(self.beta + self.alpha) <= 1e-14

    @property
    def half_width(self) -> float:
        return 0.5 * (self.beta - self.alpha)

    @property
    def center(self) -> float:
        return 0.5 * (self.alpha + self.beta)

    @classmethod
    def from_symmetric(cls, gamma: float, alpha: float) -> "SectorSpec":
        """Symmetric sector of half-width ``alpha``: [-alpha, alpha]."""
        return cls(gamma, -alpha, alpha)


class Sectoriality(Enum):
    SECTORIAL = "sectorial"
    QUASI_SECTORIAL = "quasi-sectorial"
    SEMI_SECTORIAL = "semi-sectorial"
    NON_SECTORIAL = "non-sectorial"


@dataclass(frozen=True)
class PhaseInfo:
    """Sectoriality class plus the sorted phase list and phase center."""

    kind: Sectoriality
    phases: np.ndarray  # descending, radians
    center: float  # in [-pi, pi)
    rank: int
    approximate: bool = False

    @property
    def max_phase(self) -> float:
        return float(self.phases[0])

    @property
    def min_phase(self) -> float:
        return float(self.phases[-1])


def _rotated_hermitian_eigs(a, n_angles: int = _COARSE_ANGLES):
    """Eigenvalues of cos(th) H + sin(th) K on an angle grid.

    Returns (angles, eigs) with eigs of shape (n_angles, n) ascending.
    """
    h, k = hermitian_split(a)
    th = np.linspace(-math.pi, math.pi, n_angles, endpoint=False)
    stack = np.cos(th)[:, None, None] * h + np.sin(th)[:, None, None] * k
    return th, np.linalg.eigvalsh(stack)


def _eig_at(a, th, which):
    h, k = hermitian_split(a)
    w = np.linalg.eigvalsh(math.cos(th) * h + math.sin(th) * k)
    return w[0] if which == "min" else w[-1]


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_opt(f, lo, hi, maximize, iters=60):
    """Golden-section search; returns the located argopt."""
    sign = -1.0 if maximize else 1.0
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = sign * f(d)
    return 0.5 * (a + b)


def _refined_extremum(a, which, maximize):
    """Extremum over rotations of lambda_{min,max}(H(e^{-j th} A)).

    Coarse 720-point grid followed by golden-section refinement around
    the best grid cell.
    """
    th, eigs = _rotated_hermitian_eigs(a)
    curve = eigs[:, 0] if which == "min" else eigs[:, -1]
    idx = int(np.argmax(curve)) if maximize else int(np.argmin(curve))
    step = TWO_PI / len(th)
    f = lambda t: _eig_at(a, t, which)
    x = _golden_opt(f, th[idx] - step, th[idx] + step, maximize)
    val = f(x)
    grid_val = curve[idx]
    if (maximize and grid_val > val) or (not maximize and grid_val < val):
        return float(th[idx]), float(grid_val)
    return float(x), float(val)


def nr_support(a, theta: float) -> float:
    """Support value of the numerical range in direction ``theta``.

    Equals max over unit u of Re(e^{-j theta} u* A u), i.e.
    lambda_max(H(e^{-j theta} A)).
    """
    return float(_eig_at(as_square(a), float(theta), "max"))


def classify_detail(a, tol: float = DEFAULT_TOL):
    """Classify sectoriality with the deciding margin.

    Returns (kind, margin, ambiguous).  ``margin`` is the margin of the
    deciding test, relative comparisons use tol * sigma_max(A);
    ``ambiguous`` flags a margin within tolerance of zero.
    """
    a = as_square(a)
    scale = float(singular_values(a)[0])
    if scale == 0.0:
        # Zero matrix: W(A) = {0}; congruent to the empty diagonal.
        return Sectoriality.QUASI_SECTORIAL, 0.0, False

    _, sect_margin = _refined_extremum(a, "min", maximize=True)
    if sect_margin > tol * scale:
        return (Sectoriality.SECTORIAL, sect_margin,
                sect_margin <= 2 * tol * scale)

    _, interior_margin = _refined_extremum(a, "max", maximize=False)
    if interior_margin > tol * scale:
        # 0 has positive support in every direction: strictly interior.
        return (Sectoriality.NON_SECTORIAL, interior_margin,
                interior_margin <= 2 * tol * scale)

    # 0 on the boundary of W(A): quasi-sectorial iff the compressed core
    # is sectorial (no degenerate blocks).
    t1, r = range_compress(a)
    if r == 0:
        return Sectoriality.QUASI_SECTORIAL, 0.0, False
    core = t1 @ a @ t1.conj().T
    _, core_margin = _refined_extremum(core, "min", maximize=True)
    kind = (Sectoriality.QUASI_SECTORIAL if core_margin > tol * scale
            else Sectoriality.SEMI_SECTORIAL)
    ambiguous = abs(core_margin) <= 2 * tol * scale
    return kind, core_margin, ambiguous


def classify_sectorial(a, tol: float = DEFAULT_TOL) -> Sectoriality:
    """Sectoriality class of a square matrix (see :func:`classify_detail`)."""
    return classify_detail(a, tol)[0]


def _phases_of_core(core):
    """Phases of a sectorial core via the canonical congruence.

    Find th0 maximizing lambda_min(H(e^{-j th0} core)); with
    Ht = H(e^{-j th0} core) > 0 the phases are
    th0 + arctan(eig(Ht^{-1/2} K(e^{-j th0} core) Ht^{-1/2})).
    """
    th0, margin = _refined_extremum(core, "min", maximize=True)
    if margin <= 0:
        raise NotPhaseDefinedError("core is not sectorial at working precision")
    rotated = np.exp(-1j * th0) * core
    ht, kt = hermitian_split(rotated)
    w, v = eig_hermitian(ht)
    inv_sqrt = v @ np.diag(w ** -0.5) @ v.conj().T
    s = inv_sqrt @ kt @ inv_sqrt
    s = (s + s.conj().T) / 2.0
    phases = th0 + np.arctan(np.linalg.eigvalsh(s))
    return np.sort(phases)[::-1]


def _normalize_center(phases):
    center = 0.5 * (phases[0] + phases[-1])
    wrapped = (center + math.pi) % TWO_PI - math.pi
    return phases + (wrapped - center), wrapped


def matrix_phases(a, tol: float = DEFAULT_TOL,
                  allow_semi: bool = False) -> PhaseInfo:
    """Phases of a sectorial or quasi-sectorial matrix.

    Quasi-sectorial matrices are compressed onto the range of A* first;
    the result carries rank-many phases.  Semi-sectorial input raises
    :class:`NotPhaseDefinedError` unless ``allow_semi`` is set, in which
    case approximate phases of a slightly rotated-off-boundary core are
    returned with ``approximate=True`` (degenerate-block phases are out
    of scope).
    """
    a = as_square(a)
    kind, _, _ = classify_detail(a, tol)
    if kind is Sectoriality.NON_SECTORIAL:
        raise NotPhaseDefinedError("matrix is not semi-sectorial")

    approximate = False
    if kind is Sectoriality.SECTORIAL:
        core, rank = a, a.shape[0]
    else:
        t1, rank = range_compress(a)
        if rank == 0:
            return PhaseInfo(kind, np.zeros(0), 0.0, 0)
        core = t1 @ a @ t1.conj().T
        if kind is Sectoriality.SEMI_SECTORIAL:
            if not allow_semi:
                raise NotPhaseDefinedError(
                    "matrix is semi-sectorial; exact phases of degenerate "
                    "blocks are not computed (pass allow_semi=True for an "
                    "approximation)")
            th0, _ = _refined_extremum(core, "min", maximize=True)
            scale = float(singular_values(core)[0])
            core = core + 1e-9 * scale * np.exp(1j * th0) * np.eye(rank)
            approximate = True

    phases = _phases_of_core(core)
    phases, center = _normalize_center(phases)
    return PhaseInfo(kind, phases, float(center), rank, approximate)


def in_sectored_disk(b, spec: SectorSpec, tol: float = DEFAULT_TOL) -> bool:
    """Membership test for the gain/phase-bounded matrix set.

    True iff sigma_max(B) <= gamma (1 + tol) and all phases lie in
    [alpha - tol, beta + tol] up to a global 2 pi shift.  Non-sectorial
    matrices are not members; exactly-semi-sectorial input propagates
    :class:`NotPhaseDefinedError`.
    """
    b = as_square(b)
    if float(singular_values(b)[0]) > spec.gamma * (1.0 + tol):
        return False
    try:
        info = matrix_phases(b, tol)
    except NotPhaseDefinedError:
        if classify_sectorial(b, tol) is Sectoriality.NON_SECTORIAL:
            return False
        raise
    if info.rank == 0:
        return True
    for shift in (0.0, TWO_PI, -TWO_PI):
        lo = info.min_phase + shift
        hi = info.max_phase + shift
        if spec.alpha - tol <= lo and hi <= spec.beta + tol:
            return True
    return False


def sample_sectored_disk_batch(spec: SectorSpec, n: int, draws: int,
                               rng: np.random.Generator) -> np.ndarray:
    """Stack of ``draws`` random members of the sectored-disk set.

    Construction: B = T* diag(e^{j th_i}) T with th_i uniform in
    [alpha, beta] and T a complex Gaussian matrix, rescaled to spectral
    norm gamma times a uniform [0, 1] radius factor.  The distribution
    is NOT uniform over the set; only membership matters.
    """
    if n < 1:
        raise ValueError("matrix order must be >= 1")
    th = rng.uniform(spec.alpha, spec.beta, size=(draws, n))
    t = (rng.standard_normal((draws, n, n))
         + 1j * rng.standard_normal((draws, n, n))) / math.sqrt(2.0)
    d = np.exp(1j * th)
    b = np.conj(np.transpose(t, (0, 2, 1))) @ (d[:, :, None] * t)
    sv = np.linalg.svd(b, compute_uv=False)[:, 0]
    radius = rng.uniform(0.0, 1.0, size=draws)
    b *= (spec.gamma * radius / sv)[:, None, None]
    return b


def sample_sectored_disk(spec: SectorSpec, n: int, seed) -> np.ndarray:
    """One random member of the sectored-disk set (deterministic in seed)."""
    rng = np.random.default_rng(seed)
    return sample_sectored_disk_batch(spec, n, 1, rng)[0]


def rotate_to_symmetric(b, spec: SectorSpec):
    """Rotate (B, spec) to the symmetric-sector normal form.

    Returns (e^{-j (alpha+beta)/2} B, SectorSpec(gamma, -w, w)) with
    w the sector half-width; membership is preserved.
    """
    q = spec.center
    rotated = np.exp(-1j * q) * as_square(b)
    return rotated, SectorSpec(spec.gamma, -spec.half_width, spec.half_width)


def scalar_sectored_disk_ok(a: complex, spec: SectorSpec) -> bool:
    """Scalar robustness test: 1 + a b != 0 for every b in the sector disk.

    1 + a b vanishes for some admissible b exactly when -1/a is itself in
    the sector disk, i.e. when |a| >= 1/gamma and pi - arg(a) falls in
    [alpha, beta] modulo 2 pi.  Equivalently the test holds iff
    |a| < 1/gamma or arg(a) lies outside [pi - beta, pi - alpha] mod 2 pi
    (closed arc; boundary pairs do reach 1 + a b = 0).
    """
    a = complex(a)
    if a == 0:
        return True
    if abs(a) < 1.0 / spec.gamma:
        return True
    ang = math.atan2(a.imag, a.real)
    d = (math.pi - ang - spec.alpha) % TWO_PI
    angle_bad = d <= (spec.beta - spec.alpha)
    return not angle_bad
