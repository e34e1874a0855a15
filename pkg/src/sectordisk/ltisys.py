"""LTI system layer: state-space models, frequency response, H-infinity
norm, Gang-of-Four interconnection, frequency gridding, and the
frequency-wise sectored-disk sweep.

Stability is decided on the realization's state matrix; callers are
responsible for supplying minimal realizations (hidden stable modes are
not detected).
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lmi
from .gainphase import (
    NotPhaseDefinedError,
    PhaseInfo,
    SectorSpec,
    matrix_phases,
)
from .linalg import as_matrix, hermitian_part

__all__ = [
    "StateSpaceModel",
    "FrequencyBounds",
    "SweepReport",
    "PhasePoint",
    "ImaginaryAxisPoleError",
    "freq_response",
    "is_stable",
    "hinf_norm",
    "gang_of_four",
    "log_grid",
    "sweep_theorem4",
    "phase_response",
    "sample_diag_uncertainty",
]

STABILITY_MARGIN = 1e-9


class ImaginaryAxisPoleError(ValueError):
    """Frequency response requested at (numerically) a pole of the system."""


def _as_real_matrix(m, rows=None, cols=None, name="matrix"):
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if rows is not None and a.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {a.shape[0]}")
    if cols is not None and a.shape[1] != cols:
        raise ValueError(f"{name} must have {cols} cols, got {a.shape[1]}")
    return a


@dataclass(frozen=True)
class StateSpaceModel:
    """Real (A, B, C, D) realization of a proper transfer matrix."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        d = _as_real_matrix(self.d, name="D")
        p, m = d.shape
        n = np.asarray(self.a).shape[0] if np.asarray(self.a).size else 0
        a = np.asarray(self.a, dtype=float).reshape(n, n)
        b = _as_real_matrix(self.b, None, m, "B") if n else np.zeros((0, m))
        c = _as_real_matrix(self.c, p, None, "C") if n else np.zeros((p, 0))
        if n and (b.shape[0] != n or c.shape[1] != n):
            raise ValueError("state dimensions of A, B, C are inconsistent")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b if n else np.zeros((0, m)))
        object.__setattr__(self, "c", c if n else np.zeros((p, 0)))
        object.__setattr__(self, "d", d)

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.d.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.d.shape[0]

    @property
    def square(self) -> bool:
        return self.n_inputs == self.n_outputs

    @classmethod
    def static(cls, d) -> "StateSpaceModel":
        d = _as_real_matrix(d, name="D")
        return cls(np.zeros((0, 0)), np.zeros((0, d.shape[1])),
                   np.zeros((d.shape[0], 0)), d)

    def poles(self) -> np.ndarray:
        if self.n_states == 0:
            return np.zeros(0, dtype=complex)
        return np.linalg.eigvals(self.a)

    def to_json(self) -> dict:
        return {"A": self.a.tolist(), "B": self.b.tolist(),
                "C": self.c.tolist(), "D": self.d.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "StateSpaceModel":
        missing = {"A", "B", "C", "D"} - set(obj)
        if missing:
            raise ValueError(f"model JSON lacks fields {sorted(missing)}")
        return cls(np.asarray(obj["A"], dtype=float),
                   np.asarray(obj["B"], dtype=float),
                   np.asarray(obj["C"], dtype=float),
                   np.asarray(obj["D"], dtype=float))


def freq_response(sys: StateSpaceModel, omega: float) -> np.ndarray:
    """G(j omega) = C (j omega I - A)^{-1} B + D; omega = inf returns D."""
    if math.isinf(omega):
        return sys.d.astype(complex)
    if sys.n_states == 0:
        return sys.d.astype(complex)
    poles = sys.poles()
    scale = max(1.0, float(np.max(np.abs(poles))))
    if np.min(np.abs(1j * omega - poles)) <= 1e-10 * scale:
        raise ImaginaryAxisPoleError(
            f"omega = {omega} is an imaginary-axis pole of the realization")
    x = np.linalg.solve(1j * omega * np.eye(sys.n_states) - sys.a, sys.b)
    return sys.c @ x + sys.d


def is_stable(sys: StateSpaceModel) -> bool:
    """Hurwitz test on the realization (all state eigenvalues in Re < 0)."""
    if sys.n_states == 0:
        return True
    return bool(np.max(np.real(sys.poles())) < -STABILITY_MARGIN)


def _sigma_max(sys, omega):
    return float(np.linalg.svd(freq_response(sys, omega),
                               compute_uv=False)[0])


def hinf_norm(sys: StateSpaceModel, tol: float = 1e-4,
              n_grid: int = 600) -> float:
    """Supremum of sigma_max(G(j omega)) over frequency.

    Pole-informed log grid plus golden-section refinement around the top
    grid peaks; narrow resonances thinner than the grid can in principle
    be missed (increase ``n_grid`` for very lightly damped systems).
    """
    if not is_stable(sys):
        raise ValueError("hinf_norm requires a stable realization")
    if sys.n_states == 0:
        return float(np.linalg.svd(sys.d, compute_uv=False)[0]) \
            if sys.d.size else 0.0
    mags = np.abs(sys.poles())
    lo = 1e-2 * float(np.min(mags[mags > 0], initial=1.0))
    hi = 1e2 * float(np.max(mags, initial=1.0))
    grid = np.geomspace(lo, hi, n_grid)
    vals = np.array([_sigma_max(sys, w) for w in grid])
    best = max(_sigma_max(sys, 0.0),
               float(np.linalg.svd(sys.d, compute_uv=False)[0]))
    # refine the three largest local peaks
    order = np.argsort(vals)[::-1]
    seen = []
    for idx in order:
        if len(seen) >= 3:
            break
        if any(abs(idx - j) <= 2 for j in seen):
            continue
        seen.append(int(idx))
        a = grid[max(idx - 1, 0)]
        b = grid[min(idx + 1, n_grid - 1)]
        best = max(best, _golden_max(lambda w: _sigma_max(sys, w), a, b, tol))
    return max(best, float(np.max(vals)))


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol * max(a, 1e-30):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return max(fc, fd)


def gang_of_four(g: StateSpaceModel, h: StateSpaceModel) -> StateSpaceModel:
    """Realization of the closed-loop Gang of Four of the feedback pair.

    Maps inputs (u1, u2) to (v, G v) with v = (I + GH)^{-1} (u1 + H u2);
    the block transfer matrix is [[(I+GH)^{-1}, (I+GH)^{-1}H],
    [G(I+GH)^{-1}, G(I+GH)^{-1}H]].  Stability of the result defines
    closed-loop stability of the pair.
    """
    if not (g.square and h.square and g.n_inputs == h.n_inputs):
        raise ValueError("gang_of_four needs square systems of equal size")
    m = g.n_inputs
    n1, n2 = g.n_states, h.n_states
    lam_arg = np.eye(m) + h.d @ g.d
    if np.linalg.cond(lam_arg) > 1e12:
        raise ValueError("ill-posed interconnection: I + D_H D_G is singular")
    lam = np.linalg.inv(lam_arg)

    # v = Fx [xg; xh] + Fu [u1; u2]
    fx = lam @ np.block([[-h.d @ g.c, h.c]]) if n1 + n2 else \
        np.zeros((m, 0))
    fu = lam @ np.block([[np.eye(m), h.d]])
    # y_G = Gx [xg; xh] + Gu u
    gx = (np.block([[g.c, np.zeros((m, n2))]]) if n1 + n2 else
          np.zeros((m, 0))) + g.d @ fx
    gu = g.d @ fu

    a_cl = np.zeros((n1 + n2, n1 + n2))
    b_cl = np.zeros((n1 + n2, 2 * m))
    if n1:
        a_cl[:n1, :n1] = g.a
        a_cl[:n1, :] += g.b @ fx
        b_cl[:n1, :] = g.b @ fu
    if n2:
        a_cl[n1:, n1:] += h.a
        a_cl[n1:, :] += h.b @ (-gx)
        b_cl[n1:, :] = h.b @ (np.block([[np.zeros((m, m)), np.eye(m)]]) - gu)
    c_cl = np.vstack([fx, gx]) if n1 + n2 else np.zeros((2 * m, 0))
    d_cl = np.vstack([fu, gu])
    return StateSpaceModel(a_cl, b_cl, c_cl, d_cl)


def log_grid(wmin: float, wmax: float, n: int,
             sentinels: bool = False) -> np.ndarray:
    """``n`` log-spaced frequencies inclusive of both endpoints.

    ``sentinels=True`` appends the limit evaluations 0 and inf.
    """
    if not (0 < wmin < wmax):
        raise ValueError("need 0 < wmin < wmax")
    if n < 2:
        raise ValueError("need at least two grid points")
    grid = np.geomspace(wmin, wmax, n)
    grid[0], grid[-1] = wmin, wmax
    if sentinels:
        grid = np.concatenate([grid, [0.0, math.inf]])
    return grid


@dataclass(frozen=True)
class FrequencyBounds:
    """Piecewise-constant sector bounds over frequency.

    ``segments`` is a list of (w_max, SectorSpec) with strictly
    increasing w_max; the last w_max must be inf so every frequency is
    covered.  A frequency belongs to the first segment with w <= w_max.
    """

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(w), s) for w, s in self.segments)
        if not segs:
            raise ValueError("bounds need at least one segment")
        ws = [w for w, _ in segs]
        if any(w2 <= w1 for w1, w2 in zip(ws, ws[1:])):
            raise ValueError("segment breakpoints must increase")
        if not math.isinf(ws[-1]):
            raise ValueError("last segment must extend to infinity")
        for _, s in segs:
            if not isinstance(s, SectorSpec):
                raise TypeError("segment bound must be a SectorSpec")
        object.__setattr__(self, "segments", segs)

    @classmethod
    def constant(cls, spec: SectorSpec) -> "FrequencyBounds":
        return cls(((math.inf, spec),))

    def spec_at(self, omega: float) -> SectorSpec:
        for w_max, spec in self.segments:
            if omega <= w_max:
                return spec
        return self.segments[-1][1]

    def to_json(self) -> list:
        out = []
        for w, s in self.segments:
            out.append({"w_max": "inf" if math.isinf(w) else w,
                        "gamma": s.gamma, "alpha": s.alpha, "beta": s.beta})
        return out

    @classmethod
    def from_json(cls, obj) -> "FrequencyBounds":
        if not isinstance(obj, list) or not obj:
            raise ValueError("bounds JSON must be a non-empty list")
        segs = []
        for row in obj:
            w = row["w_max"]
            w = math.inf if w in ("inf", None) else float(w)
            segs.append((w, SectorSpec(float(row["gamma"]),
                                       float(row["alpha"]),
                                       float(row["beta"]))))
        return cls(tuple(segs))


def _theorem4_terms(gw: np.ndarray, spec: SectorSpec):
    """T_1..T_4 of the frequency-wise condition at one frequency.

    Width-pi sectors degenerate (sec^2 blows up): the fourth term is
    dropped and both rotations collapse onto 2 H(e^{jq} G), i.e. the
    half-disk form.
    """
    m = gw.shape[0]
    eye = np.eye(m)
    p, q = spec.half_width, spec.center
    t1 = eye - spec.gamma ** 2 * (gw.conj().T @ gw)
    if p >= math.pi / 2 - 1e-12:
        t2 = 2.0 * hermitian_part(np.exp(1j * q) * gw)
        return [t1, t2, t2], True
    t2 = 2.0 * hermitian_part(np.exp(-1j * (math.pi / 2 - p - q)) * gw)
    t3 = 2.0 * hermitian_part(np.exp(1j * (math.pi / 2 + q - p)) * gw)
    t4 = spec.gamma / math.cos(p) ** 2 \
        * hermitian_part(np.exp(1j * q) * gw) + eye
    return [t1, t2, t3, t4], False


@dataclass
class SweepReport:
    """Per-frequency certificates of the frequency-wise condition."""

    grid: np.ndarray
    ks: np.ndarray  # (n, 4)
    margins: np.ndarray
    feasible: np.ndarray  # bool per point

    @property
    def certified(self) -> bool:
        """True when every grid point carries a positive-margin certificate.

        Grid certification approximates the all-frequency condition; the
        per-point margins let callers judge coverage.
        """
        return bool(np.all(self.feasible))

    @property
    def infeasible_frequencies(self) -> np.ndarray:
        return self.grid[~self.feasible]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["omega", "k1", "k2", "k3", "k4", "margin"])
            for i, om in enumerate(self.grid):
                row = [om, *self.ks[i], self.margins[i]]
                w.writerow([format(v, ".17g") for v in row])


def _max_workers() -> int:
    raw = os.environ.get("SECTORDISK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sweep_theorem4(sys: StateSpaceModel, bounds: FrequencyBounds, grid,
                   budget: int = lmi.DEFAULT_BUDGET,
                   tol: float = lmi.DEFAULT_TOL) -> SweepReport:
    """Frequency-wise sectored-disk certification over a grid.

    At each grid frequency assembles T_1..T_4 from G(j omega) and the
    local sector bound and searches non-negative multipliers making the
    combination positive definite.  Per-frequency solves are independent
    (``SECTORDISK_THREADS`` caps the worker pool); the report is a
    deterministic ordered reduction.
    """
    if not is_stable(sys):
        raise ValueError("sweep requires a stable system")
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        raise ValueError("empty frequency grid")

    def solve_point(omega):
        spec = bounds.spec_at(omega)
        terms, half_disk = _theorem4_terms(freq_response(sys, omega), spec)
        problem = lmi.LmiProblem(sys.n_outputs)
        for i, t in enumerate(terms):
            problem.add_scalar(t, name=f"k{i + 1}")
        res = lmi.solve(problem, budget=budget, tol=tol)
        if res.feasible:
            k = res.scalars
            if half_disk:
                k = np.array([k[0], k[1], k[2], 0.0])
            return k, res.margin, True
        return np.zeros(4), res.best_margin, False

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(solve_point, grid))
    else:
        rows = [solve_point(w) for w in grid]
    ks = np.array([r[0] for r in rows])
    margins = np.array([r[1] for r in rows])
    feas = np.array([r[2] for r in rows], dtype=bool)
    return SweepReport(grid, ks, margins, feas)


@dataclass(frozen=True)
class PhasePoint:
    omega: float
    info: PhaseInfo | None
    error: str = ""


def phase_response(sys: StateSpaceModel, grid,
                   tol: float = 1e-8) -> list[PhasePoint]:
    """Matrix phases of G(j omega) along a grid.

    Semi-sectorial points return approximate phases (flagged); points
    where phases are undefined are recorded, not fatal.
    """
    if not is_stable(sys):
        raise ValueError("phase response requires a stable system")
    out = []
    for omega in grid:
        try:
            info = matrix_phases(freq_response(sys, omega), tol,
                                 allow_semi=True)
            out.append(PhasePoint(float(omega), info))
        except (NotPhaseDefinedError, ImaginaryAxisPoleError) as exc:
            out.append(PhasePoint(float(omega), None, str(exc)))
    return out


def sample_diag_uncertainty(m: int, gamma_cap: float, phase_cap: float,
                            seed) -> StateSpaceModel:
    """Random stable diagonal uncertainty within gain and phase caps.

    Each diagonal entry is c (s + z)/(s + p) (lead or lag): its phase
    peaks at +-arcsin((r-1)/(r+1)) for the pole/zero ratio r and its
    gain is bounded by c max(1, z/p), so the caps hold at every
    frequency.  Non-exhaustive falsification aid, deterministic in seed.
    """
    if not (0 < phase_cap < math.pi / 2):
        raise ValueError("phase_cap must lie in (0, pi/2)")
    rng = np.random.default_rng(seed)
    ratio = (1 + math.sin(phase_cap)) / (1 - math.sin(phase_cap))
    a = np.zeros((m, m))
    b = np.zeros((m, m))
    c = np.zeros((m, m))
    d = np.zeros((m, m))
    for i in range(m):
        r = rng.uniform(1.0, ratio)
        z = rng.uniform(0.1, 10.0)
        lead = rng.uniform() < 0.5
        pole = z * r if lead else z / r
        gain_bound = max(1.0, z / pole)
        ci = rng.uniform(0.2, 1.0) * gamma_cap / gain_bound
        # c (s+z)/(s+p) = c + c (z-p)/(s+p)
        a[i, i] = -pole
        b[i, i] = 1.0
        c[i, i] = ci * (z - pole)
        d[i, i] = ci
    return StateSpaceModel(a, b, c, d)
