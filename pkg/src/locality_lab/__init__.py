"""Finite model checking for relativistic causal principles.

Build small theories over finite history spaces and causal sites, then check
Einstein locality (two- and three-valued, with setting exemptions), common-
cause conditions, freedom of settings, signalling, screening off, and CHSH
values, all by exact enumeration at desk scale.
"""

__version__ = "0.1.0"

from .conditions import (
    CheckerPreconditionError,
    ModelTooLargeError,
    SignalVerdict,
    check_el_first,
    check_el_second,
    check_el_three_valued,
    check_freedom_of_settings,
    check_npcc_joint,
    check_npcc_mutual,
    construct_causal_antecedent,
    detect_signal,
)
from .eprb import (
    EprbModel,
    EprbVerification,
    build_box_ball_models,
    build_conspiriton_model,
    build_eprb_model,
    build_eprb_site,
    eprb_truth_table,
    pr_box_distribution,
    uniform_outcome_distribution,
    verify_eprb,
)
from .histories import (
    AssociationMap,
    Event,
    HistoryError,
    HistorySpace,
    Subalgebra,
    contains,
    full_specifications,
    generate_subalgebra,
    subalgebra_of,
)
from .meta import MetaTheory, demonstrate_meta_objection, meta_lift
from .modelspec import (
    Diagnostic,
    ModelDocument,
    ModelSpecError,
    build_distribution,
    build_theory,
    parse,
    serialize,
)
from .probability import (
    ChshScenario,
    Distribution,
    DistributionError,
    check_probabilistic_free_settings,
    check_so1,
    check_so2,
    chsh_value,
    condition,
    correlator,
    default_tolerance,
    local_deterministic_bound,
)
from .reports import ConditionReport, Witness
from .sites import (
    CausalSite,
    Region,
    SiteError,
    exclusive_past,
    is_spacelike,
    joint_past,
    mutual_past,
    past,
)
from .theory import (
    DeltaFamily,
    OnticTheory,
    Setting,
    TheoryError,
    ThreeValuedTheory,
    check_ontic_definiteness,
    correlated,
    derive_three_valued,
    enumerate_theories,
    standard_delta_family,
    weakly_correlated,
)
from .valuations import (
    FALSE,
    INDEFINITE,
    TRUE,
    ThreeValuation,
    TwoValuation,
    check_conjunction_table,
    coarse_grain,
    cyclical_negation,
    evaluate,
    is_complementary,
    is_definite_event,
)
