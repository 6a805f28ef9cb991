"""Approximate entailment in quasimetric spaces.

Graded implications ``α →[d] β`` hold in a model when every ``α``-world lies
within distance ``d`` of some ``β``-world.  This package decides the least
provable degree from a finite theory, builds and checks forest proofs and
rule proofs, normalizes forest proofs, and searches for finite countermodels.
"""

from .degrees import INF, as_degree, format_degree, parse_degree
from .engine import DegreeResult, brute_force_degree, cost_table, entailment_degree, prove
from .forest import (STAR, CaseA, CaseB, CaseC, CaseD, ForestBuilder, ForestNode, ProofForest,
                     VerificationReport, forest_length, format_forest, parse_forest, render_forest,
                     verify_forest)
from .normalize import apply_pass, normalize_forest, purge_polarity
from .parser import ParseError, parse_formula, parse_implication, parse_theory
from .rules import (ProofBuilder, RuleStep, check_rule_proof, forest_to_rule_proof, format_rule_proof,
                    parse_rule_proof, rule_proof_to_forest)
from .semantics import (FiniteQuasimetricSpace, Model, evaluate, find_countermodel, hausdorff, neighbourhood,
                        point_distance, satisfies, validate_space)
from .syntax import (BasicImplication, GradedImplication, Literal, boolean_equivalent, clause_set_formula,
                     is_tautology, standard_clause_set, to_basic_theory)

__version__ = "0.1.0"
