"""Orientation-tagged eight-blade algebra and its correlation experiments.

The package splits into focused layers:

``algebra``
    The eight-component product, orientation tags, norms and the closure
    quadric.
``conformal``
    Stereographic lifts of 3-space onto the unit sphere in four dimensions
    and the quaternion bridge.
``spin``
    Detector settings as embedded direction pairs, measurement outcomes,
    source-axis transport.
``oracle``
    Closed-form expectations the simulations are judged against.
``engine``
    Batched, seeded event-by-event runs plus the four-term scan.
``checks``
    The self-test suites behind ``septenary check``.
"""

from .algebra import (
    BLADE_NAMES,
    DualQuaternion,
    Multivector,
    basis_product,
    commutator,
    from_dual_quaternion,
    is_on_s7,
    mul_batch,
    mv_mul,
    mv_norm,
    mv_reverse,
    quadric_defect,
    scalar_part,
    to_dual_quaternion,
)
from .conformal import Quaternion, R4Point, stereo_phi, stereo_psi
from .engine import (
    TrialConfig,
    TrialRun,
    chsh_scan,
    paired_product,
    run_epr,
    run_ghz,
    run_trials,
)
from .errors import (
    ArityUnsupported,
    ConfigError,
    DegenerateInput,
    EmptyInput,
    OrientationMismatch,
    SeptenaryError,
)
from .oracle import (
    chsh_bound,
    chsh_value,
    epr_expectation,
    ghz_direction_expectation,
    ghz_expectation,
    ghz_role_scalar_part,
    nfold_scalar_part,
    torsion,
)
from .spin import (
    Detector,
    DirectionPair,
    SpinState,
    detector,
    make_pair_general,
    make_pair_ghz,
    make_pair_planar,
    measure,
    pair_coefficients,
    recover_source_axis,
    reflect_source_axis,
    spin_state,
)

__version__ = "0.1.0"

__all__ = [
    "ArityUnsupported",
    "BLADE_NAMES",
    "ConfigError",
    "DegenerateInput",
    "Detector",
    "DirectionPair",
    "DualQuaternion",
    "EmptyInput",
    "Multivector",
    "OrientationMismatch",
    "Quaternion",
    "R4Point",
    "SeptenaryError",
    "SpinState",
    "TrialConfig",
    "TrialRun",
    "basis_product",
    "chsh_bound",
    "chsh_scan",
    "chsh_value",
    "commutator",
    "detector",
    "epr_expectation",
    "from_dual_quaternion",
    "ghz_direction_expectation",
    "ghz_expectation",
    "ghz_role_scalar_part",
    "is_on_s7",
    "make_pair_general",
    "make_pair_ghz",
    "make_pair_planar",
    "measure",
    "mul_batch",
    "mv_mul",
    "mv_norm",
    "mv_reverse",
    "nfold_scalar_part",
    "paired_product",
    "pair_coefficients",
    "quadric_defect",
    "recover_source_axis",
    "reflect_source_axis",
    "run_epr",
    "run_ghz",
    "run_trials",
    "scalar_part",
    "spin_state",
    "stereo_phi",
    "stereo_psi",
    "to_dual_quaternion",
    "torsion",
]
