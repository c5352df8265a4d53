"""Multiplicative linear logic half: formulas, structures, criteria, rewriting."""

from ludonet.mll.formulas import (
    Atom,
    DualAtom,
    Formula,
    FormulaSyntaxError,
    Par,
    Tensor,
    UndefinedOccurrence,
    dual,
    format_formula,
    formula_size,
    is_defined_at,
    parse_formula,
    subformula_at,
)
from ludonet.mll.structures import (
    LeafRef,
    ParaproofStructure,
    PartialFormulaTree,
    correction_graph,
    enumerate_switchings,
    format_structure,
    leaf_formula,
    par_nodes,
    parse_structure,
    retained_nodes,
    validate_structure,
)
from ludonet.mll.derivation import (
    Cut,
    DaimonAx,
    Derivation,
    Mix,
    Par as ParRule,
    Tensor as TensorRule,
    build_from_derivation,
)
from ludonet.mll.criteria import (
    Verdict,
    check_acyclicity,
    check_aj,
    check_cp,
    check_dr,
    enumerate_counterproofs,
    partitions_orthogonal,
)
from ludonet.mll.rewrite import (
    ParseState,
    check_parsing,
    cut_normalize,
    parse_redexes,
    sequentialize,
)
from ludonet.mll.gen import random_structure

__all__ = [name for name in dir() if not name.startswith("_")]
