"""Bundled reference cases.

Seven benchmark problems with externally recorded reference values
(multipliers, matrix certificates, norm peaks, mu-style bounds) used by
the `repro` command and the acceptance suite.  This module is the single
place the reference data lives; everything else receives it as plain
arrays.

Known data defects, reproduced verbatim on purpose (the repro pipeline
reports them honestly):

* the asymmetric-case certificate (EX7) has an indefinite Y block, so it
  cannot satisfy its own side constraint, and its state matrix is not
  Hurwitz;
* the contrast case (REMARK) is not frequency-wise certifiable at the
  recorded sector (the condition genuinely fails for omega in roughly
  [5.9, 9.0]; at pi/4 half-width the intended contrast does appear).
"""

from __future__ import annotations

import math

import numpy as np

from .gainphase import SectorSpec
from .ltisys import FrequencyBounds, StateSpaceModel

__all__ = [
    "ex1_matrix", "EX1_SPEC", "EX1_REFERENCE_K",
    "EX2_ALPHA", "EX2_GAMMA_HAT", "EX2_GAMMA_TILDE",
    "ex3_plant", "ex3_bounds", "EX3_GRID",
    "ex5_system", "EX5_SPEC", "EX5_P", "EX5_K", "EX5_HINF",
    "ex6_system", "EX6_SPEC", "EX6_P", "EX6_K",
    "ex7_system", "EX7_SPEC", "EX7_X", "EX7_Y", "EX7_K",
    "remark_system", "REMARK_SPEC",
]


# -- case ex1: 3x3 complex matrix, symmetric sector --------------------

def ex1_matrix() -> np.ndarray:
    return np.array([
        [0.58 - 0.21j, -0.92 + 0.41j, 0.35 - 0.90j],
        [0.91 + 0.31j, 0.69 - 0.93j, 0.51 - 0.80j],
        [0.31 - 0.65j, 0.86 - 0.44j, 0.48 + 0.64j],
    ])


EX1_SPEC = SectorSpec.from_symmetric(1.0, math.pi / 3)

#: Reference multipliers for the four-term sufficient LMI on ex1.  The
#: recorded listing order does not satisfy the LMI; the values verify
#: under the assignment below (gain term, e^{-j(pi/2-a)} rotation,
#: e^{+j(pi/2-a)} rotation, sec^2 term), found by checking all 24
#: assignments of the four recorded numbers to the four terms.
EX1_REFERENCE_K = {
    "as_listed": [1.0, 5.2311, 4.3742, 0.0468],
    "verified_assignment": [0.0468, 5.2311, 1.0, 4.3742],
}


# -- case ex2: mu-style bounds on the ex1 matrix -----------------------

EX2_ALPHA = math.pi / 3
#: Reference sup-feasible gain radii: mu_hat = 1/0.5361, mu_tilde = 1/1.4436.
EX2_GAMMA_HAT = 0.5361
EX2_GAMMA_TILDE = 1.4436


# -- case ex3: 2x2 plant with piecewise frequency bounds ---------------

def ex3_plant() -> StateSpaceModel:
    """State-space form of the 2x2 first-order transfer matrix

        [[ (2s+1)/(5s+1),  12s/(10s+1) ],
         [ s/(20s+1),      (5s+2)/(8s+1) ]]

    realized entrywise (one state per entry, partial fractions).
    """
    a = np.diag([-1 / 5, -1 / 10, -1 / 20, -1 / 8])
    # entry (i, j) uses state k with  g_ij = d_ij + r_k / (s + p_k)
    b = np.array([
        [1.0, 0.0],   # state for g11, input 1
        [0.0, 1.0],   # state for g12, input 2
        [1.0, 0.0],   # state for g21, input 1
        [0.0, 1.0],   # state for g22, input 2
    ])
    c = np.array([
        [3 / 25, -12 / 100, 0.0, 0.0],
        [0.0, 0.0, -1 / 400, 11 / 64],
    ])
    d = np.array([
        [2 / 5, 12 / 10],
        [1 / 20, 5 / 8],
    ])
    return StateSpaceModel(a, b, c, d)


def ex3_bounds() -> FrequencyBounds:
    """Piecewise bounds: gain 10 then 4 past pi/9; symmetric sector
    half-widths pi/2, pi/3, pi/4, pi/6 with breakpoints pi/9, pi/6, pi/3."""
    return FrequencyBounds((
        (math.pi / 9, SectorSpec(10.0, -math.pi / 2, math.pi / 2)),
        (math.pi / 6, SectorSpec(4.0, -math.pi / 3, math.pi / 3)),
        (math.pi / 3, SectorSpec(4.0, -math.pi / 4, math.pi / 4)),
        (math.inf, SectorSpec(4.0, -math.pi / 6, math.pi / 6)),
    ))


EX3_GRID = (1e-2, 1e2, 200)


# -- case ex5: SISO symmetric state-space condition --------------------

def ex5_system() -> StateSpaceModel:
    return StateSpaceModel(
        a=[[0.3442, 1.1386], [-1.0904, -0.8495]],
        b=[[1.6975], [-0.8061]],
        c=[[0.5363, 0.3336]],
        d=[[-0.2373]],
    )


EX5_SPEC = SectorSpec.from_symmetric(1.0, math.pi / 3)
EX5_P = np.array([[15.5281, 9.0543], [9.0543, 15.9003]])
EX5_K = np.array([28.1602, 6.4926, 6.4926, 11.8703])
EX5_HINF = 1.1568


# -- case ex6: MIMO symmetric state-space condition --------------------

def ex6_system() -> StateSpaceModel:
    return StateSpaceModel(
        a=[[-0.699, 0.044, 0.855],
           [0.418, -0.477, -0.568],
           [-0.639, -0.074, -0.998]],
        b=[[0.812, 0.044], [0.361, -0.792], [0.029, 0.998]],
        c=[[0.359, 0.393, 0.543], [0.625, 0.077, 0.591]],
        d=[[-0.248, -0.847], [-0.044, -0.048]],
    )


EX6_SPEC = SectorSpec.from_symmetric(1.0, math.pi / 3)
EX6_P = np.array([
    [14.5345, 9.5677, 10.0333],
    [9.5677, 11.9948, 10.2902],
    [10.0333, 10.2902, 18.0862],
])
EX6_K = np.array([20.8005, 0.8003, 0.8003, 5.4204])


# -- case ex7: MIMO asymmetric-sector condition ------------------------

def ex7_system() -> StateSpaceModel:
    return StateSpaceModel(
        a=[[-1.908, -0.894, 1.635],
           [1.846, 1.882, 1.441],
           [1.735, 1.847, -1.601]],
        b=[[0.349, 1.517], [-1.796, 0.306], [1.983, -1.809]],
        c=[[0.537, 0.356, 0.666], [0.296, 0.002, 0.296]],
        d=[[-0.146, -0.117], [-0.634, -0.046]],
    )


EX7_SPEC = SectorSpec(1.0, -math.pi / 4, math.pi / 3)
EX7_X = np.array([
    [0.0055, -0.2315, -0.0719],
    [-0.2315, -0.2350, -0.2768],
    [-0.0719, -0.2768, 0.0197],
])
EX7_Y = np.array([
    [0.0319, 0.0838, 0.0432],
    [0.0838, 0.1200, 0.0851],
    [0.0432, 0.0851, 0.0357],
])
EX7_K = np.array([0.8189, 0.0221, 0.1010, 0.0580])


# -- contrast case: constant-multiplier condition infeasible -----------

def remark_system() -> StateSpaceModel:
    return StateSpaceModel(
        a=[[-3.803, -1.134, 3.474],
           [4.573, -12.656, 5.861],
           [1.559, 7.793, -15.323]],
        b=[[5.036, 3.568], [10.204, 10.512], [10.939, 13.879]],
        c=[[0.075, 0.131, 0.165], [0.378, 0.058, 0.128]],
        d=[[-0.218, -0.278], [-0.641, -0.575]],
    )


REMARK_SPEC = SectorSpec.from_symmetric(1.0, math.pi / 3)
