"""Derivations: rule trees that assemble paraproof structures.

A derivation describes how a structure is put together from generalized
axioms by par, tensor, cut and mix rules.  Rule nodes are tagged with
positions in the finished structure (conclusion index plus occurrence),
so rebuilding is exact: the structure returned by `build_from_derivation`
uses precisely those coordinates.

Composition is checked bottom-up.  Every rule node assembles a set of
"open slots" (positions of fully built subtrees still available to later
rules).  A par link needs both children of its node open in one premise;
a tensor needs them open in two disjoint premises; a cut closes two dual
roots; mix glues two disjoint premises.  At the root, the open slots
must be exactly the roots of the non-cut conclusions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from ludonet.mll.formulas import (
    Formula,
    Par as ParFormula,
    Tensor as TensorFormula,
    dual,
    format_formula,
    is_defined_at,
    is_prefix,
    subformula_at,
)
from ludonet.mll.structures import (
    LeafRef,
    ParaproofStructure,
    PartialFormulaTree,
    format_occ,
)


class DerivationError(Exception):
    pass


@dataclass(frozen=True)
class DaimonAx:
    leaves: frozenset[LeafRef]

    def __init__(self, leaves: Iterable[tuple[int, str]]) -> None:
        object.__setattr__(
            self, "leaves", frozenset(LeafRef(r[0], r[1]) for r in leaves)
        )


@dataclass(frozen=True)
class Par:
    tree: int
    occ: str
    premise: "Rule"


@dataclass(frozen=True)
class Tensor:
    tree: int
    occ: str
    left: "Rule"
    right: "Rule"


@dataclass(frozen=True)
class Cut:
    left_tree: int
    right_tree: int
    left: "Rule"
    right: "Rule"


@dataclass(frozen=True)
class Mix:
    left: "Rule"
    right: "Rule"


Rule = Union[DaimonAx, Par, Tensor, Cut, Mix]


@dataclass(frozen=True)
class Derivation:
    conclusions: tuple[Formula, ...]
    root: Rule


def rule_name(r: Rule) -> str:
    if isinstance(r, DaimonAx):
        return "daimon-axiom"
    return {Par: "par", Tensor: "tensor", Cut: "cut", Mix: "mix"}[type(r)]


@dataclass
class _Assembled:
    open_slots: set[tuple[int, str]]
    cut_trees: set[int]
    classes: list[frozenset[LeafRef]]
    cuts: list[frozenset[int]]


def _merge_disjoint(d: Derivation, a: _Assembled, b: _Assembled, what: str) -> None:
    if a.open_slots & b.open_slots or a.cut_trees & b.cut_trees:
        raise DerivationError(f"{what}: premises overlap")
    # each open slot stands for the whole subtree below it, and those
    # regions must not overlap across premises (same tree is fine as long
    # as neither occurrence sits inside the other)
    for (i, u) in a.open_slots:
        for (j, v) in b.open_slots:
            if i == j and (is_prefix(u, v) or is_prefix(v, u)):
                raise DerivationError(
                    f"{what}: premises claim overlapping regions "
                    f"{i}:{format_occ(u)} and {j}:{format_occ(v)}"
                )
        if i in b.cut_trees:
            raise DerivationError(f"{what}: premises claim overlapping regions")
    for (j, v) in b.open_slots:
        if j in a.cut_trees:
            raise DerivationError(f"{what}: premises claim overlapping regions")


def _assemble(d: Derivation, r: Rule) -> _Assembled:
    n = len(d.conclusions)
    if isinstance(r, DaimonAx):
        if not r.leaves:
            raise DerivationError("daimon-axiom with no leaves")
        for ref in r.leaves:
            if not (0 <= ref.tree < n):
                raise DerivationError(f"axiom leaf {ref}: conclusion out of range")
            if not is_defined_at(d.conclusions[ref.tree], ref.occ):
                raise DerivationError(f"axiom leaf {ref}: undefined occurrence")
        return _Assembled(set(r.leaves), set(), [r.leaves], [])
    if isinstance(r, Par):
        prem = _assemble(d, r.premise)
        if not (0 <= r.tree < n) or not is_defined_at(d.conclusions[r.tree], r.occ):
            raise DerivationError(f"par at {r.tree}:{format_occ(r.occ)}: bad position")
        if not isinstance(subformula_at(d.conclusions[r.tree], r.occ), ParFormula):
            raise DerivationError(
                f"par at {r.tree}:{format_occ(r.occ)}: subformula is not a par"
            )
        for c in ("1", "2"):
            if (r.tree, r.occ + c) not in prem.open_slots:
                raise DerivationError(
                    f"par at {r.tree}:{format_occ(r.occ)}: child {c} not open"
                )
        prem.open_slots -= {(r.tree, r.occ + "1"), (r.tree, r.occ + "2")}
        prem.open_slots.add((r.tree, r.occ))
        return prem
    if isinstance(r, Tensor):
        left = _assemble(d, r.left)
        right = _assemble(d, r.right)
        _merge_disjoint(d, left, right, f"tensor at {r.tree}:{format_occ(r.occ)}")
        if not (0 <= r.tree < n) or not is_defined_at(d.conclusions[r.tree], r.occ):
            raise DerivationError(
                f"tensor at {r.tree}:{format_occ(r.occ)}: bad position"
            )
        if not isinstance(subformula_at(d.conclusions[r.tree], r.occ), TensorFormula):
            raise DerivationError(
                f"tensor at {r.tree}:{format_occ(r.occ)}: subformula is not a tensor"
            )
        if (r.tree, r.occ + "1") not in left.open_slots:
            raise DerivationError(
                f"tensor at {r.tree}:{format_occ(r.occ)}: child 1 not open on the left"
            )
        if (r.tree, r.occ + "2") not in right.open_slots:
            raise DerivationError(
                f"tensor at {r.tree}:{format_occ(r.occ)}: child 2 not open on the right"
            )
        slots = (left.open_slots - {(r.tree, r.occ + "1")}) | (
            right.open_slots - {(r.tree, r.occ + "2")}
        )
        slots.add((r.tree, r.occ))
        return _Assembled(
            slots,
            left.cut_trees | right.cut_trees,
            left.classes + right.classes,
            left.cuts + right.cuts,
        )
    if isinstance(r, Cut):
        left = _assemble(d, r.left)
        right = _assemble(d, r.right)
        _merge_disjoint(d, left, right, f"cut({r.left_tree},{r.right_tree})")
        i, j = r.left_tree, r.right_tree
        if i == j:
            raise DerivationError("cut between a conclusion and itself")
        if (i, "") not in left.open_slots:
            raise DerivationError(f"cut({i},{j}): root of {i} not open on the left")
        if (j, "") not in right.open_slots:
            raise DerivationError(f"cut({i},{j}): root of {j} not open on the right")
        if dual(d.conclusions[i]) != d.conclusions[j]:
            raise DerivationError(f"cut({i},{j}): conclusions are not dual")
        slots = (left.open_slots - {(i, "")}) | (right.open_slots - {(j, "")})
        return _Assembled(
            slots,
            left.cut_trees | right.cut_trees | {i, j},
            left.classes + right.classes,
            left.cuts + right.cuts + [frozenset((i, j))],
        )
    if isinstance(r, Mix):
        left = _assemble(d, r.left)
        right = _assemble(d, r.right)
        _merge_disjoint(d, left, right, "mix")
        return _Assembled(
            left.open_slots | right.open_slots,
            left.cut_trees | right.cut_trees,
            left.classes + right.classes,
            left.cuts + right.cuts,
        )
    raise TypeError(f"not a rule: {r!r}")


def build_from_derivation(d: Derivation) -> ParaproofStructure:
    done = _assemble(d, d.root)
    n = len(d.conclusions)
    expected = {(i, "") for i in range(n) if i not in done.cut_trees}
    if done.open_slots != expected:
        raise DerivationError(
            f"derivation leaves slots {sorted(done.open_slots)} open, "
            f"expected exactly the non-cut roots"
        )
    seen: set[LeafRef] = set()
    for cls in done.classes:
        if seen & cls:
            raise DerivationError("a leaf is claimed by two axioms")
        seen |= cls
    leaves_by_tree: dict[int, set[str]] = {i: set() for i in range(n)}
    for ref in seen:
        leaves_by_tree[ref.tree].add(ref.occ)
    trees = [
        PartialFormulaTree(d.conclusions[i], leaves_by_tree[i]) for i in range(n)
    ]
    return ParaproofStructure(trees, done.classes, done.cuts)


### rendering

def format_derivation(d: Derivation) -> str:
    lines = [
        "conclusions: " + "; ".join(format_formula(f) for f in d.conclusions)
    ]

    def walk(r: Rule, depth: int) -> None:
        pad = "  " * depth
        if isinstance(r, DaimonAx):
            entries = ", ".join(
                f"{ref.tree}:{format_occ(ref.occ)}"
                for ref in sorted(r.leaves, key=lambda x: (x.tree, len(x.occ), x.occ))
            )
            lines.append(f"{pad}daimon-axiom {{{entries}}}")
        elif isinstance(r, Par):
            lines.append(f"{pad}par {r.tree}:{format_occ(r.occ)}")
            walk(r.premise, depth + 1)
        elif isinstance(r, Tensor):
            lines.append(f"{pad}tensor {r.tree}:{format_occ(r.occ)}")
            walk(r.left, depth + 1)
            walk(r.right, depth + 1)
        elif isinstance(r, Cut):
            lines.append(f"{pad}cut({r.left_tree},{r.right_tree})")
            walk(r.left, depth + 1)
            walk(r.right, depth + 1)
        else:
            lines.append(f"{pad}mix")
            walk(r.left, depth + 1)
            walk(r.right, depth + 1)

    walk(d.root, 1)
    return "\n".join(lines) + "\n"


def derivation_to_obj(d: Derivation) -> dict:
    def walk(r: Rule) -> dict:
        if isinstance(r, DaimonAx):
            return {
                "rule": "daimon-axiom",
                "leaves": [
                    {"tree": ref.tree, "occ": format_occ(ref.occ)}
                    for ref in sorted(
                        r.leaves, key=lambda x: (x.tree, len(x.occ), x.occ)
                    )
                ],
            }
        if isinstance(r, Par):
            return {
                "rule": "par",
                "tree": r.tree,
                "occ": format_occ(r.occ),
                "premises": [walk(r.premise)],
            }
        if isinstance(r, Tensor):
            return {
                "rule": "tensor",
                "tree": r.tree,
                "occ": format_occ(r.occ),
                "premises": [walk(r.left), walk(r.right)],
            }
        if isinstance(r, Cut):
            return {
                "rule": "cut",
                "trees": [r.left_tree, r.right_tree],
                "premises": [walk(r.left), walk(r.right)],
            }
        return {"rule": "mix", "premises": [walk(r.left), walk(r.right)]}

    return {
        "conclusions": [format_formula(f) for f in d.conclusions],
        "root": walk(d.root),
    }
