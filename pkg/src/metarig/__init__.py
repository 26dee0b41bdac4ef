"""Freeness verdicts and finite-quotient fingerprints for metabelian groups.

The pipeline decides, for a finitely presented group read in the metabelian
variety, whether it is free metabelian of rank n: the abelianization must be
Z^n and the relation module presented by the matrix of abelianized free
derivatives must be free of rank n over the integer Laurent ring, tested
through its determinantal ideals with strong Groebner bases over Z.  A second
pipeline compares two presentations by exact counts of maps into finite
metabelian targets and by invariant factors of finite module quotients.
"""

from .laurent import (
    LaurentPoly,
    PolyParseError,
    RankMismatchError,
    default_names,
    exact_div,
    parse_poly,
    render_poly,
)
from .grobner import (
    DEFAULT_BUDGET,
    Budget,
    BudgetExceeded,
    EvaluationCertificate,
    PolyIdeal,
    StrongBasis,
    contains_one,
    find_evaluation_certificate,
    laurent_unit_combination,
    laurent_unit_ideal,
    reduce,
    reduce_with_combination,
    strong_groebner,
    unit_combination,
)
from .presentations import (
    AbelianizationData,
    GroupPresentation,
    PresentationParseError,
    PresMatrix,
    TorsionAbelianizationError,
    Word,
    abelianization,
    alexander_matrix,
    commutator,
    exponent_matrix,
    fox_derivative_abelianized,
    free_reduce,
    parse_presentation,
    parse_presentation_file,
    parse_word_text,
    render_word,
    smith_normal_form,
)
from .fitting import (
    OUTCOME_FREE,
    OUTCOME_INCONCLUSIVE,
    OUTCOME_NOT_FREE,
    OUTCOME_OBSTRUCTION,
    FreenessVerdict,
    fitting_ideal,
    freeness_verdict,
    minors,
)
from .magnus import (
    MagnusElement,
    augmentation_image,
    render_element,
    word_to_magnus,
)
from .fingerprint import (
    CayleyParseError,
    FiniteGroup,
    FingerprintReport,
    NonMetabelianTargetError,
    abelian_group,
    alternating_group,
    cyclic,
    default_ideals,
    default_panel,
    dihedral,
    epi_count,
    fingerprint_compare,
    hom_count,
    is_metabelian,
    load_cayley_table,
    module_quotient_invariants,
    quaternion8,
    symmetric_group,
)
from .cli import AnalysisReport, analyze_presentation, main

__version__ = "0.1.0"
