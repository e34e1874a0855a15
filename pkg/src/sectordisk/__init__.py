"""Robust stability analysis for MIMO LTI systems under simultaneous
gain and phase (sectored-disk) uncertainty.

Layers, bottom up: dense complex linear algebra (`linalg`), matrix gain
and phase machinery (`gainphase`), Davis-Wielandt shell geometry
(`dwshell`), a small LMI feasibility solver (`lmi`), matrix-level
robustness tests (`sectored`), the LTI system layer (`ltisys`),
state-space KYP-type conditions (`kyp`), bundled reference cases
(`benchmarks`), and a command-line front end (`cli`).
"""

from .gainphase import (
    NotPhaseDefinedError,
    PhaseInfo,
    SectorSpec,
    Sectoriality,
    classify_sectorial,
    in_sectored_disk,
    matrix_phases,
    nr_support,
    rotate_to_symmetric,
    sample_sectored_disk,
    scalar_sectored_disk_ok,
)
from .dwshell import (
    CanonicalSet,
    DwPoint,
    SeparationCertificate,
    dw_point,
    dw_projection,
    dw_support,
    in_canonical,
    monte_carlo_union,
    normal_witness,
    separation_certificate,
    subset_member,
    superset_member,
)
from .linalg import (
    det_and_inverse,
    eig_hermitian,
    hermitian_split,
    matrix_from_json,
    matrix_to_json,
    range_compress,
    singular_values,
)
from .lmi import (
    FeasibilityCertificate,
    InfeasibleWithinBudget,
    LmiProblem,
    solve,
    verify,
)
from .ltisys import (
    FrequencyBounds,
    StateSpaceModel,
    SweepReport,
    freq_response,
    gang_of_four,
    hinf_norm,
    is_stable,
    log_grid,
    phase_response,
    sweep_theorem4,
)
from .kyp import (
    KypProblem,
    KypVariant,
    PConvention,
    assemble_theorem5,
    assemble_theorem6,
    solve_kyp,
    verify_kyp,
)
from .sectored import (
    MatrixTestReport,
    Method,
    MuBound,
    Verdict,
    brute_force_violation,
    half_disk_test,
    mu_hat,
    mu_tilde,
    necessary_test,
    s_procedure_test,
    small_gain,
    small_phase,
    sufficient_test,
)

__version__ = "0.1.0"
