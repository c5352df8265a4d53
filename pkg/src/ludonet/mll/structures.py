"""Paraproof structures: partial formula trees, leaf partitions, cuts.

A partial formula tree A^U is a formula together with a set U of
pairwise disjoint defined occurrences; the tree's nodes are the prefixes
of members of U.  A paraproof structure is an ordered forest of such
trees, a partition of all the leaves into nonempty classes (generalized
axiom links), and a set of cuts pairing conclusions with dual formulas.

A switching maps every internal par node to L or R; the induced
correction graph keeps the tree edges except that at each switched par
the edge to the right (under L) or left (under R) child is removed,
joins every partition class to its leaves, and joins every cut to the
two roots it involves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from ludonet.graphs import Graph
from ludonet.mll.formulas import (
    Formula,
    Par,
    dual,
    format_formula,
    is_defined_at,
    occurrences_disjoint,
    parse_formula,
    subformula_at,
)


class LeafRef(NamedTuple):
    tree: int
    occ: str


@dataclass(frozen=True)
class PartialFormulaTree:
    formula: Formula
    leaves: frozenset[str]

    def __init__(self, formula: Formula, leaves: Iterable[str]) -> None:
        object.__setattr__(self, "formula", formula)
        object.__setattr__(self, "leaves", frozenset(leaves))


@dataclass(frozen=True)
class ParaproofStructure:
    trees: tuple[PartialFormulaTree, ...]
    partition: frozenset[frozenset[LeafRef]]
    cuts: frozenset[frozenset[int]]

    def __init__(
        self,
        trees: Iterable[PartialFormulaTree],
        partition: Iterable[Iterable[tuple[int, str]]],
        cuts: Iterable[Iterable[int]] = (),
    ) -> None:
        object.__setattr__(self, "trees", tuple(trees))
        object.__setattr__(
            self,
            "partition",
            frozenset(frozenset(LeafRef(r[0], r[1]) for r in cls) for cls in partition),
        )
        object.__setattr__(self, "cuts", frozenset(frozenset(c) for c in cuts))


def all_leaves(s: ParaproofStructure) -> list[LeafRef]:
    refs = []
    for i, t in enumerate(s.trees):
        for u in sorted(t.leaves, key=_occ_key):
            refs.append(LeafRef(i, u))
    return refs


def leaf_formula(s: ParaproofStructure, ref: LeafRef) -> Formula:
    return subformula_at(s.trees[ref.tree].formula, ref.occ)


def retained_nodes(t: PartialFormulaTree) -> set[str]:
    """All prefixes of the leaf occurrences, the tree's node set."""
    nodes: set[str] = set()
    for u in t.leaves:
        for k in range(len(u) + 1):
            nodes.add(u[:k])
    return nodes


def par_nodes(s: ParaproofStructure) -> list[tuple[int, str]]:
    """Internal par nodes in depth-first discovery order.

    Internal means the node has at least one retained child, i.e. it is
    not itself a leaf.  The order fixes the meaning of switching bit k.
    """
    found: list[tuple[int, str]] = []
    for i, t in enumerate(s.trees):
        nodes = retained_nodes(t)
        stack = [""] if nodes else []
        while stack:
            v = stack.pop()
            if v in t.leaves:
                continue
            if isinstance(subformula_at(t.formula, v), Par):
                found.append((i, v))
            for c in ("2", "1"):  # pushed right first so left pops first
                if v + c in nodes:
                    stack.append(v + c)
    return found


def _occ_key(u: str) -> tuple[int, str]:
    return (len(u), u)


def _ref_key(r: LeafRef) -> tuple[int, int, str]:
    return (r.tree, len(r.occ), r.occ)


def sorted_partition(s: ParaproofStructure) -> list[list[LeafRef]]:
    classes = [sorted(cls, key=_ref_key) for cls in s.partition]
    classes.sort(key=lambda cls: [_ref_key(r) for r in cls])
    return classes


def sorted_cuts(s: ParaproofStructure) -> list[tuple[int, int]]:
    return sorted(tuple(sorted(c)) for c in s.cuts)


def validate_structure(s: ParaproofStructure, mode: str = "paraproof") -> list[str]:
    """Well-formedness diagnostics, empty when the structure is fine.

    Checks run in stages (trees, partition, cuts, then proof-mode axiom
    shape) and stop at the first stage that reports problems, so later
    messages are not consequences of earlier ones.
    """
    if mode not in ("paraproof", "proof"):
        raise ValueError(f"mode must be paraproof or proof, got {mode!r}")
    problems: list[str] = []
    for i, t in enumerate(s.trees):
        if not t.leaves:
            problems.append(f"tree {i}: empty leaf set")
            continue
        us = sorted(t.leaves, key=_occ_key)
        for u in us:
            if not re.fullmatch(r"[12]*", u):
                problems.append(f"tree {i}: bad occurrence {u!r}")
            elif not is_defined_at(t.formula, u):
                problems.append(f"tree {i}: occurrence {u!r} undefined in its formula")
        for a in range(len(us)):
            for b in range(a + 1, len(us)):
                if not occurrences_disjoint(us[a], us[b]):
                    problems.append(
                        f"tree {i}: occurrences {us[a]!r} and {us[b]!r} overlap"
                    )
    if problems:
        return problems

    expected = set(all_leaves(s))
    seen: set[LeafRef] = set()
    for cls in sorted_partition(s):
        if not cls:
            problems.append("partition: empty class")
            continue
        for r in cls:
            if r not in expected:
                problems.append(f"partition: {r.tree}:{r.occ or '.'} is not a leaf")
            elif r in seen:
                problems.append(f"partition: {r.tree}:{r.occ or '.'} in two classes")
            seen.add(r)
    missing = expected - seen
    for r in sorted(missing, key=_ref_key):
        problems.append(f"partition: leaf {r.tree}:{r.occ or '.'} not covered")
    if problems:
        return problems

    in_cut: set[int] = set()
    for c in sorted_cuts(s):
        if len(set(c)) != 2:
            problems.append(f"cut {c}: needs two distinct conclusions")
            continue
        i, j = c
        if not (0 <= i < len(s.trees) and 0 <= j < len(s.trees)):
            problems.append(f"cut {c}: conclusion index out of range")
            continue
        if dual(s.trees[i].formula) != s.trees[j].formula:
            problems.append(f"cut {c}: conclusion formulas are not dual")
        for k in (i, j):
            if k in in_cut:
                problems.append(f"cut {c}: conclusion {k} already cut")
            in_cut.add(k)
    if problems:
        return problems

    if mode == "proof":
        for cls in sorted_partition(s):
            if len(cls) != 2:
                problems.append(
                    f"proof mode: class of size {len(cls)} is not an axiom pair"
                )
                continue
            a, b = cls
            if dual(leaf_formula(s, a)) != leaf_formula(s, b):
                problems.append(
                    f"proof mode: class {{{a.tree}:{a.occ or '.'}, "
                    f"{b.tree}:{b.occ or '.'}}} is not a dual pair"
                )
    return problems


### switchings and correction graphs

Switching = dict


def enumerate_switchings(s: ParaproofStructure) -> Iterator[dict[tuple[int, str], str]]:
    """All 2^n switchings as a binary counter; bit k = 0 switches par k to L."""
    pars = par_nodes(s)
    for counter in range(1 << len(pars)):
        yield {
            p: ("L" if (counter >> k) & 1 == 0 else "R") for k, p in enumerate(pars)
        }


def correction_graph(
    s: ParaproofStructure, sw: dict[tuple[int, str], str]
) -> Graph:
    """Graph for one switching.

    Vertices: ("node", i, occ) per retained tree node, ("class", k) per
    partition class in canonical order, ("cut", m) per cut.  At a par
    switched L the edge to child 2 is dropped, switched R the edge to
    child 1; every other parent-child edge stays.
    """
    if set(sw) != set(par_nodes(s)):
        raise ValueError("switching domain is not the set of internal par nodes")
    g = Graph()
    for i, t in enumerate(s.trees):
        nodes = retained_nodes(t)
        for v in sorted(nodes, key=_occ_key):
            g.add_vertex(("node", i, v))
        for v in sorted(nodes, key=_occ_key):
            if v in t.leaves:
                continue
            dropped = ""
            if (i, v) in sw:
                dropped = "2" if sw[(i, v)] == "L" else "1"
            for c in ("1", "2"):
                if v + c in nodes and c != dropped:
                    g.add_edge(("node", i, v), ("node", i, v + c))
    for k, cls in enumerate(sorted_partition(s)):
        g.add_vertex(("class", k))
        for r in cls:
            g.add_edge(("class", k), ("node", r.tree, r.occ))
    for m, (i, j) in enumerate(sorted_cuts(s)):
        g.add_vertex(("cut", m))
        g.add_edge(("cut", m), ("node", i, ""))
        g.add_edge(("cut", m), ("node", j, ""))
    return g


### text format

def format_occ(u: str) -> str:
    return u if u else "."


def _parse_occ(text: str) -> str:
    text = text.strip()
    if text == ".":
        return ""
    if not re.fullmatch(r"[12]+", text):
        raise StructureSyntaxError(f"bad occurrence {text!r}")
    return text


class StructureSyntaxError(Exception):
    pass


def format_structure(s: ParaproofStructure) -> str:
    lines = []
    for i, t in enumerate(s.trees):
        occs = ", ".join(format_occ(u) for u in sorted(t.leaves, key=_occ_key))
        lines.append(f"tree {i}: {format_formula(t.formula)} @ {{{occs}}}")
    for cls in sorted_partition(s):
        entries = ", ".join(f"{r.tree}:{format_occ(r.occ)}" for r in cls)
        lines.append(f"class {{{entries}}}")
    for i, j in sorted_cuts(s):
        lines.append(f"cut {{{i},{j}}}")
    return "\n".join(lines) + "\n"


_TREE_LINE = re.compile(r"tree (\d+): (.*) @ \{(.*)\}$")
_CLASS_LINE = re.compile(r"class \{(.*)\}$")
_CUT_LINE = re.compile(r"cut \{(\d+),\s*(\d+)\}$")


def parse_structure(text: str) -> ParaproofStructure:
    trees: list[PartialFormulaTree] = []
    partition: list[list[LeafRef]] = []
    cuts: list[tuple[int, int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("tree "):
            m = _TREE_LINE.match(line)
            if m is None:
                raise StructureSyntaxError(f"bad tree line: {line!r}")
            idx = int(m.group(1))
            if idx != len(trees):
                raise StructureSyntaxError(f"tree index {idx} out of order")
            formula = parse_formula(m.group(2))
            leaves = [_parse_occ(p) for p in m.group(3).split(",") if p.strip()]
            if not leaves:
                raise StructureSyntaxError(f"tree {idx}: empty leaf set")
            trees.append(PartialFormulaTree(formula, leaves))
        elif line.startswith("class "):
            m = _CLASS_LINE.match(line)
            if m is None:
                raise StructureSyntaxError(f"bad class line: {line!r}")
            refs = []
            for part in m.group(1).split(","):
                part = part.strip()
                if not part:
                    continue
                if ":" not in part:
                    raise StructureSyntaxError(f"bad class entry {part!r}")
                i_text, occ_text = part.split(":", 1)
                refs.append(LeafRef(int(i_text), _parse_occ(occ_text)))
            if not refs:
                raise StructureSyntaxError("empty class")
            partition.append(refs)
        elif line.startswith("cut "):
            m = _CUT_LINE.match(line)
            if m is None:
                raise StructureSyntaxError(f"bad cut line: {line!r}")
            cuts.append((int(m.group(1)), int(m.group(2))))
        else:
            raise StructureSyntaxError(f"unrecognized line: {line!r}")
    return ParaproofStructure(trees, partition, cuts)
