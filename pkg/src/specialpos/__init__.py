"""Special position SP(n-k) and Cayley-Bacharach for linear subspaces of
projective space, with exact arithmetic over Q and prime fields."""

from .certificates import verify_certificate
from .errors import BudgetExceeded, InputError, SpecialPosError
from .fields import Field, FieldElement, SeededRng, sample_uniform
from .grassmannian import (
    CbReport,
    GrassmannPointSet,
    PluckerPoint,
    cayley_bacharach_test,
    check_plucker_relations,
    enumerate_subspaces,
    plucker,
    schubert_sigma1_contains,
)
from .lab import (
    GeneratorSpec,
    SurveyResult,
    generate,
    plane_configuration_cover,
    quadric_through_lines,
    sharpness_search,
    survey_exhaustive,
)
from .linalg import Matrix, ProjSubspace, intersect, meets, preimage_closure, project_from, rref, span
from .special_position import (
    Configuration,
    PartitionReport,
    SpCertificate,
    Tester,
    Verdict,
    check_sp,
    decompose,
    sp_bruteforce,
    sp_tuple_witness,
    span_bound_report,
    verify_partition_inequality,
)

__version__ = "0.1.0"
