"""Dense complex linear algebra substrate.

Everything downstream (phase computation, shell geometry, LMI assembly)
runs on plain complex ndarrays validated by the helpers here.  Accuracy
contracts (residual tolerances) are part of this module's API; the
backing algorithms are whatever LAPACK provides.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "DimensionError",
    "SingularMatrixError",
    "as_matrix",
    "as_square",
    "as_hermitian",
    "is_hermitian",
    "hermitian_part",
    "skew_part",
    "hermitian_split",
    "singular_values",
    "spectral_norm",
    "eig_hermitian",
    "det_and_inverse",
    "range_compress",
    "matrix_to_json",
    "matrix_from_json",
]

#: Relative tolerance used by the Hermitian validity check.
HERMITIAN_RTOL = 1e-12

#: Relative singular-value cutoff below which a matrix is reported singular.
SINGULAR_RTOL = 1e-12

#: Default relative rank tolerance for range compression.
RANK_RTOL = 1e-9


class DimensionError(ValueError):
    """Input matrix has the wrong shape for the requested operation."""


class SingularMatrixError(ValueError):
    """A matrix required to be invertible is singular at working precision."""


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D complex ndarray.

    Raises
    ------
    DimensionError
        If ``a`` is not two-dimensional with at least one row and column.
    ValueError
        If any entry is NaN or infinite.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def as_square(a) -> np.ndarray:
    """Like :func:`as_matrix` but additionally requires a square shape."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(a, rtol: float = HERMITIAN_RTOL) -> bool:
    """True if ``a`` equals its conjugate transpose within ``rtol``."""
    m = as_square(a)
    scale = 1.0 + np.max(np.abs(m))
    return bool(np.max(np.abs(m - m.conj().T)) <= rtol * scale)


def as_hermitian(a, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Validate Hermitian-ness and return the exactly symmetrized matrix."""
    m = as_square(a)
    if not is_hermitian(m, rtol):
        raise ValueError("matrix is not Hermitian at working precision")
    return (m + m.conj().T) / 2.0


def hermitian_part(a) -> np.ndarray:
    """Hermitian part (A + A*)/2."""
    m = as_square(a)
    return (m + m.conj().T) / 2.0


def skew_part(a) -> np.ndarray:
    """Skew part (A - A*)/(2j); Hermitian by construction."""
    m = as_square(a)
    return (m - m.conj().T) / 2.0j


def hermitian_split(a) -> tuple[np.ndarray, np.ndarray]:
    """Split a square matrix into (H, K) with A = H + jK, both Hermitian."""
    m = as_square(a)
    return (m + m.conj().T) / 2.0, (m - m.conj().T) / 2.0j


def singular_values(a) -> np.ndarray:
    """Singular values of ``a``, sorted descending."""
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def spectral_norm(a) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def eig_hermitian(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    values : ndarray
        Real eigenvalues in descending order.
    vectors : ndarray
        Orthonormal eigenvectors as columns, matching ``values``.
    """
    m = as_square(h)
    m = (m + m.conj().T) / 2.0
    w, v = np.linalg.eigh(m)
    return w[::-1].copy(), v[:, ::-1].copy()


def det_and_inverse(a) -> tuple[complex, np.ndarray | None]:
    """Determinant and inverse of a square matrix.

    Returns ``(det, inv)``; ``inv`` is ``None`` when the smallest singular
    value falls below ``SINGULAR_RTOL`` times the largest (the singular
    flag is a value, not an error).
    """
    m = as_square(a)
    det = complex(np.linalg.det(m))
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] < SINGULAR_RTOL * max(sv[0], np.finfo(float).tiny):
        return det, None
    return det, np.linalg.inv(m)


def range_compress(a, tol: float = RANK_RTOL) -> tuple[np.ndarray, int]:
    """Rank-revealing compression of a square matrix.

    Returns ``(T1, r)`` where ``r`` counts the singular values above
    ``tol * sigma_max`` and the rows of ``T1`` (r x n) form an orthonormal
    basis such that the columns of ``T1*`` span the range of ``A*``.
    ``T1 @ A @ T1*`` is the compressed core used for quasi-sectorial
    phase extraction.
    """
    m = as_square(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, sv, vh = np.linalg.svd(m)
    if sv[0] == 0.0:
        return np.zeros((0, m.shape[0]), dtype=complex), 0
    r = int(np.sum(sv > tol * sv[0]))
    return vh[:r, :].copy(), r


def matrix_to_json(a) -> dict:
    """Encode a complex matrix as {"rows", "cols", "re", "im"}."""
    m = as_matrix(a)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode the JSON object form produced by :func:`matrix_to_json`.

    The "im" field may be omitted for real matrices.
    """
    if not isinstance(obj, dict) or "re" not in obj:
        raise ValueError("expected an object with at least a 're' field")
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape:
        raise ValueError("'re' and 'im' must have matching shapes")
    m = re + 1j * im
    rows = obj.get("rows")
    cols = obj.get("cols")
    if rows is not None and cols is not None and m.shape != (rows, cols):
        raise ValueError(
            f"declared shape ({rows}, {cols}) does not match data {m.shape}"
        )
    return as_matrix(m)
