"""Diagrams of many-sorted first-order theories and their fusion (colimit)."""

__version__ = "0.1.0"

from .alignment import AlignmentSpec, MergeResult, build_span, merge
from .diagram import (
    Classification,
    Cocone,
    Cosmos,
    LanguageDiagram,
    ShapeGraph,
    TheoryDiagram,
    base,
    classify,
    diagram_sum,
    empty_diagram,
    factorize,
    language_fusion,
    move_along_cocone,
    pushout,
    pushout_by_sum_quotient,
    remove_node,
    single_node,
    theory_fusion,
)
from .errors import (
    DiagramError,
    MorphismError,
    ParseError,
    ResourceLimitError,
    TheoryFusionError,
    WellFormednessError,
)
from .lattice import (
    Theory,
    TheoryMorphism,
    clo_member,
    dir_exists,
    dir_forall_member,
    inv_member,
    inv_reify,
    leq,
    meet,
    quotient_theory,
    subtheory,
    theory_morphism,
    theory_sum,
    validate_theory_morphism,
)
from .morphism import (
    Endorelation,
    LanguageMorphism,
    compose,
    discrete,
    epi_mono_factorization,
    expr_map,
    expr_preimage,
    identity,
    kernel,
    quotient_language,
)
from .semantics import (
    Bounds,
    FiniteStructure,
    Limits,
    Status,
    Verdict,
    check_refutation,
    consistent,
    entails,
    evaluate,
    find_model,
    refute,
)
from .syntax import (
    Language,
    canonical_form,
    enumerate_expressions,
    is_well_formed,
    parse_expr,
    to_sexpr,
    well_formed,
)
from .workspace import Workspace, parse_workspace, print_canonical, print_workspace
