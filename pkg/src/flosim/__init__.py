"""Simulation of fermionic linear optics on a classical computer.

Single Slater determinants evolve and collapse in polynomial time; sums
of determinants handle the two-mode parity measurement that breaks the
single-determinant picture.  A dense Fock-space oracle cross-checks
every fast-path operation on small registers.
"""

from .errors import (
    FlosimError,
    BadConfig,
    BadContext,
    BadDimensions,
    BadIndexSet,
    DimensionMismatch,
    ImpossibleOutcome,
    IndexOutOfRange,
    ModesNotOrthogonal,
    NoAdmissibleBranch,
    NonSquare,
    NotAntisymmetric,
    NotHermitian,
    NotInSpan,
    NotUnitary,
    OddDimension,
    OracleCheckFailed,
    ParityGroupingUnsupported,
    ParseError,
    RankDeficient,
    TermCapExceeded,
    TooManyModes,
    WrongParticleNumber,
    ZeroVector,
)
from .linalg import (
    antisym_canonical,
    complement_basis,
    determinant,
    one_body_unitary,
    orthonormalize,
    pfaffian,
)
from .slater import (
    SlaterState,
    annihilate,
    decompose_mode,
    evolve,
    measure_mode,
    occupation_amplitude,
    rotate_in_first,
    slater_overlap,
    standard_state,
)
from .multislater import (
    SlaterSum,
    apply_two_mode_projector,
    evolve_sum,
    generic_p1_study,
    measure_mode_sum,
    measure_two_mode,
    reduce_to_two_fermion,
    slater_number_two_fermion,
    sum_norm,
    two_fermion_w,
)

__all__ = [
    "FlosimError",
    "BadConfig",
    "BadContext",
    "BadDimensions",
    "BadIndexSet",
    "DimensionMismatch",
    "ImpossibleOutcome",
    "IndexOutOfRange",
    "ModesNotOrthogonal",
    "NoAdmissibleBranch",
    "NonSquare",
    "NotAntisymmetric",
    "NotHermitian",
    "NotInSpan",
    "NotUnitary",
    "OddDimension",
    "OracleCheckFailed",
    "ParityGroupingUnsupported",
    "ParseError",
    "RankDeficient",
    "TermCapExceeded",
    "TooManyModes",
    "WrongParticleNumber",
    "ZeroVector",
    "antisym_canonical",
    "complement_basis",
    "determinant",
    "one_body_unitary",
    "orthonormalize",
    "pfaffian",
    "SlaterState",
    "annihilate",
    "decompose_mode",
    "evolve",
    "measure_mode",
    "occupation_amplitude",
    "rotate_in_first",
    "slater_overlap",
    "standard_state",
    "SlaterSum",
    "apply_two_mode_projector",
    "evolve_sum",
    "generic_p1_study",
    "measure_mode_sum",
    "measure_two_mode",
    "reduce_to_two_fermion",
    "slater_number_two_fermion",
    "sum_norm",
    "two_fermion_w",
]
