"""Identification of path-specific effects under classical, interventional
and separable semantics, with exact oracles and an assumption ledger."""

from .assumptions import (
    AssumptionEntry,
    AssumptionReport,
    Category,
    assumption_ledger,
    check_dismissible,
    check_exchangeability,
    check_strong_cwi,
    check_weak_cwi,
    cross_world_entries,
)
from .counterfactual import Const, Term, actual, do
from .distribution import JointDistribution
from .dsl import SpecDocument, bundled_specs, parse_file, parse_spec, serialize
from .errors import (
    AssumptionViolatedError,
    GraphValidationError,
    PseidError,
    SpecError,
    SpecSemanticError,
    SpecSyntaxError,
    UnsupportedCombinationError,
)
from .estimate import evaluate, evaluate_plugin, pse_contrast, telescoping_regimes
from .expansion import (
    ExpandedGraph,
    dismissible_conditions,
    expand_confounder,
    expand_node_intervened,
    expand_path_intervened,
)
from .formula import FormulaAst, canonical_bytes, normalize_formula, render_formula
from .graph import CausalGraph, NodeSpec, Role, causal_paths, d_separated, validate_graph
from .identify import EstimandSpec, Nuisance, Semantic, identify
from .regime import Approach, InterventionRegime, classical_term, regime_from_values, uniform_regime
from .sem import (
    DiscreteSem,
    Mechanism,
    NoiseMode,
    component_sem,
    counterfactual_joint,
    observational_distribution,
    oracle_interventional,
    oracle_nested,
    oracle_separable,
    random_component_sem,
    random_sem,
    sample,
)
from .swig import Swig, Sym, counterfactual_independencies, split

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
