"""Correctness criteria for paraproof structures.

Four deciders, all exhaustive by design at desk scale:

* check_dr          -- every switching's correction graph is a tree
* check_acyclicity  -- every switching's correction graph is a forest
                       (connectedness waived, the mix-friendly variant)
* check_cp          -- the structure's partition is orthogonal to the
                       partition induced by every counter-proof
* check_aj          -- the partition, read as a strategy, can always
                       answer inside the rules of the restriction game

Every rejection carries a concrete witness: a switching with a cycle or
a disconnection split, a counter-proof, or a play with no legal answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple, Optional

from ludonet.graphs import Graph
from ludonet.mll.formulas import (
    Formula,
    Par as ParFormula,
    Tensor as TensorFormula,
    dual,
    format_formula,
    subformula_at,
)
from ludonet.mll.structures import (
    LeafRef,
    ParaproofStructure,
    PartialFormulaTree,
    correction_graph,
    enumerate_switchings,
    format_occ,
    leaf_formula,
    par_nodes,
    sorted_partition,
    validate_structure,
)

DEFAULT_PAR_CAP = 24
DEFAULT_LEAF_CAP = 12


class SizeGuardError(Exception):
    """The input exceeds the configured exhaustive-search budget."""


@dataclass(frozen=True)
class Verdict:
    criterion: str
    accepted: bool
    witness: Optional[dict] = None

    def __post_init__(self) -> None:
        if self.accepted and self.witness is not None:
            raise ValueError("accepted verdicts carry no witness")
        if not self.accepted and self.witness is None:
            raise ValueError("rejections must carry a witness")

    def __bool__(self) -> bool:
        return self.accepted


def _require_valid(s: ParaproofStructure, mode: str = "paraproof") -> None:
    problems = validate_structure(s, mode)
    if problems:
        raise ValueError(f"invalid structure: {problems[0]}")


def _vertex_text(v: object) -> str:
    kind = v[0]
    if kind == "node":
        return f"node {v[1]}:{format_occ(v[2])}"
    if kind == "class":
        return f"class {v[1]}"
    return f"cut {v[1]}"


def _switching_obj(sw: dict[tuple[int, str], str]) -> dict[str, str]:
    return {f"{i}:{format_occ(u)}": side for (i, u), side in sorted(sw.items())}


def _check_switchings(
    s: ParaproofStructure, criterion: str, require_connected: bool, par_cap: int
) -> Verdict:
    _require_valid(s)
    pars = par_nodes(s)
    if len(pars) > par_cap:
        raise SizeGuardError(
            f"{len(pars)} par nodes exceed the cap of {par_cap} switchings bits"
        )
    for sw in enumerate_switchings(s):
        g = correction_graph(s, sw)
        cycle = g.find_cycle()
        if cycle is not None:
            return Verdict(
                criterion,
                False,
                {
                    "kind": "cycle",
                    "switching": _switching_obj(sw),
                    "cycle": [_vertex_text(v) for v in cycle],
                },
            )
        comps = g.components()
        # acyclic graph: vertex count minus edge count equals component count
        assert g.vertex_count() - g.edge_count() == len(comps)
        if require_connected and len(comps) > 1:
            return Verdict(
                criterion,
                False,
                {
                    "kind": "disconnected",
                    "switching": _switching_obj(sw),
                    "components": [
                        sorted(_vertex_text(v) for v in comp) for comp in comps
                    ],
                },
            )
    return Verdict(criterion, True)


def check_dr(s: ParaproofStructure, par_cap: int = DEFAULT_PAR_CAP) -> Verdict:
    """Every correction graph is connected and acyclic."""
    return _check_switchings(s, "dr", True, par_cap)


def check_acyclicity(s: ParaproofStructure, par_cap: int = DEFAULT_PAR_CAP) -> Verdict:
    """Every correction graph is acyclic; disconnection is fine."""
    return _check_switchings(s, "acyclicity", False, par_cap)


### the counter-proof criterion

def partitions_orthogonal(
    X: Iterable[Iterable[object]], Y: Iterable[Iterable[object]]
) -> bool:
    """Classes as vertices, shared elements as edges: orthogonal = tree."""
    xs = [frozenset(c) for c in X]
    ys = [frozenset(c) for c in Y]
    ground_x = set().union(*xs) if xs else set()
    ground_y = set().union(*ys) if ys else set()
    if ground_x != ground_y:
        raise ValueError("partitions are over different ground sets")
    if sum(len(c) for c in xs) != len(ground_x) or sum(len(c) for c in ys) != len(
        ground_y
    ):
        raise ValueError("inputs are not partitions (overlapping classes)")
    which_x = {e: k for k, c in enumerate(xs) for e in c}
    which_y = {e: k for k, c in enumerate(ys) for e in c}
    g = Graph()
    for k in range(len(xs)):
        g.add_vertex(("X", k))
    for k in range(len(ys)):
        g.add_vertex(("Y", k))
    for e in sorted(ground_x, key=repr):
        g.add_edge(("X", which_x[e]), ("Y", which_y[e]))
    return g.is_tree()


def set_partitions(items: list) -> Iterator[list[list]]:
    """All partitions of items into nonempty blocks, deterministic order."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in set_partitions(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1 :]
        yield [[first]] + sub


class CounterProof(NamedTuple):
    # partitions of each dual conclusion tree's leaves, by conclusion index
    per_tree: tuple[frozenset[frozenset[str]], ...]

    def induced(self) -> frozenset[frozenset[LeafRef]]:
        classes = []
        for i, part in enumerate(self.per_tree):
            for cls in part:
                classes.append(frozenset(LeafRef(i, u) for u in cls))
        return frozenset(classes)


@lru_cache(maxsize=None)
def _net_partitions(
    formula: Formula, leaves: frozenset[str]
) -> tuple[frozenset[frozenset[str]], ...]:
    """Partitions of the leaves making the single-tree structure a net."""
    accepted = []
    for part in set_partitions(sorted(leaves, key=lambda u: (len(u), u))):
        partition = [[(0, u) for u in cls] for cls in part]
        candidate = ParaproofStructure(
            [PartialFormulaTree(formula, leaves)], partition
        )
        if check_dr(candidate).accepted:
            accepted.append(frozenset(frozenset(cls) for cls in part))
    return tuple(accepted)


@lru_cache(maxsize=None)
def _extreme_partitions(
    formula: Formula, leaves: frozenset[str]
) -> tuple[frozenset[frozenset[str]], ...]:
    """Partitions with a derivation whose tensor splits are all one-sided."""
    leafset = frozenset(leaves)

    def below(prefixes: frozenset[str]) -> frozenset[str]:
        return frozenset(u for u in leafset if any(u.startswith(p) for p in prefixes))

    accepted = []
    for part in set_partitions(sorted(leaves, key=lambda u: (len(u), u))):
        classes = [frozenset(cls) for cls in part]

        def splits_cleanly(part_a: frozenset[str]) -> bool:
            return all(cls <= part_a or not (cls & part_a) for cls in classes)

        memo: dict[frozenset[str], bool] = {}

        def derivable(open_slots: frozenset[str]) -> bool:
            if open_slots in memo:
                return memo[open_slots]
            memo[open_slots] = False  # guards against useless re-entry
            ok = False
            if open_slots <= leafset and frozenset(open_slots) in classes:
                ok = True
            if not ok:
                for u in sorted(open_slots, key=lambda x: (len(x), x)):
                    if u in leafset:
                        continue
                    sub = subformula_at(formula, u)
                    rest = open_slots - {u}
                    if isinstance(sub, ParFormula):
                        if derivable(rest | {u + "1", u + "2"}):
                            ok = True
                            break
                    elif isinstance(sub, TensorFormula):
                        for alone, joined in ((u + "1", u + "2"), (u + "2", u + "1")):
                            if splits_cleanly(below(frozenset([alone]))) and derivable(
                                frozenset([alone])
                            ) and derivable(rest | {joined}):
                                ok = True
                                break
                        if ok:
                            break
            memo[open_slots] = ok
            return ok

        if derivable(frozenset([""])):
            accepted.append(frozenset(classes))
    return tuple(accepted)


def enumerate_counterproofs(
    s: ParaproofStructure,
    extreme_only: bool = False,
    leaf_cap: int = DEFAULT_LEAF_CAP,
) -> Iterator[CounterProof]:
    """All tuples of nets on the dual conclusions, one per conclusion.

    Component i ranges over the partitions of U_i that make the
    single-tree structure on the dual formula a net; with extreme_only,
    over those with a derivation whose tensor rules are one-sided.
    """
    _require_valid(s)
    if s.cuts:
        raise ValueError("counter-proofs are defined for cut-free structures")
    total = sum(len(t.leaves) for t in s.trees)
    if total > leaf_cap:
        raise SizeGuardError(f"{total} leaves exceed the cap of {leaf_cap}")
    per_tree_choices = []
    for t in s.trees:
        enum = _extreme_partitions if extreme_only else _net_partitions
        per_tree_choices.append(enum(dual(t.formula), t.leaves))
    for combo in itertools.product(*per_tree_choices):
        yield CounterProof(tuple(combo))


def check_cp(
    s: ParaproofStructure,
    leaf_cap: int = DEFAULT_LEAF_CAP,
    extreme_only: bool = False,
) -> Verdict:
    """Orthogonal to every induced counter-proof partition."""
    for cp in enumerate_counterproofs(s, extreme_only=extreme_only, leaf_cap=leaf_cap):
        if not partitions_orthogonal(s.partition, cp.induced()):
            witness = {
                "kind": "counter-proof",
                "per_tree": [
                    [sorted(format_occ(u) for u in cls) for cls in part]
                    for part in cp.per_tree
                ],
            }
            return Verdict("cp", False, witness)
    return Verdict("cp", True)


### the game criterion

class Move(NamedTuple):
    leaf: LeafRef
    sign: str  # "+" or "-"


def _move_text(m: Move) -> str:
    return f"({m.leaf.tree}:{format_occ(m.leaf.occ)}){m.sign}"


def is_play(s: ParaproofStructure, moves: list[Move]) -> bool:
    """Global alternation starting with Opponent plus the restriction
    conditions: each node's restriction alternates; at a tensor only
    Opponent changes component, at a par only Player does; the
    conclusions themselves sit under a virtual par, so only Player may
    hop between trees."""
    for k, m in enumerate(moves):
        want = "-" if k % 2 == 0 else "+"
        if m.sign != want:
            return False
    # the switcher is whoever plays the second move of a crossing pair:
    # b == "+" is a Player switch, b == "-" an Opponent switch
    for a, b in zip(moves, moves[1:]):
        if a.leaf.tree != b.leaf.tree and b.sign == "-":
            return False
    nodes: dict[tuple[int, str], list[Move]] = {}
    for m in moves:
        u = m.leaf.occ
        for k in range(len(u) + 1):
            nodes.setdefault((m.leaf.tree, u[:k]), []).append(m)
    for (i, v), seq in nodes.items():
        sub = subformula_at(s.trees[i].formula, v)
        for a, b in zip(seq, seq[1:]):
            if a.sign == b.sign:
                return False
            crosses = (
                len(a.leaf.occ) > len(v)
                and len(b.leaf.occ) > len(v)
                and a.leaf.occ[len(v)] != b.leaf.occ[len(v)]
            )
            if not crosses:
                continue
            if isinstance(sub, TensorFormula) and b.sign == "+":
                return False  # only Opponent may switch tensor components
            if isinstance(sub, ParFormula) and b.sign == "-":
                return False  # only Player may switch par components
    return True


def check_aj(
    s: ParaproofStructure, state_cap: int = 2_000_000
) -> Verdict:
    """The partition strategy always has a legal answer.

    Explores the opponent-move/answer plays without repeating a signed
    move (each axiom end is consumed once); state space deduplicated on
    (used signed moves, last move per node).
    """
    _require_valid(s, "proof")
    if s.cuts:
        raise ValueError("the game criterion is defined for cut-free structures")
    strategy: dict[LeafRef, LeafRef] = {}
    for cls in sorted_partition(s):
        a, b = cls
        strategy[a] = b
        strategy[b] = a
    leaves = sorted(strategy, key=lambda r: (r.tree, len(r.occ), r.occ))

    seen_states: set = set()

    def node_lasts(moves: list[Move]) -> tuple:
        lasts: dict[tuple[int, str], Move] = {}
        for m in moves:
            u = m.leaf.occ
            for k in range(len(u) + 1):
                lasts[(m.leaf.tree, u[:k])] = m
        return tuple(sorted(lasts.items()))

    stack: list[list[Move]] = [[]]
    while stack:
        if len(seen_states) > state_cap:
            raise SizeGuardError(f"game search exceeded {state_cap} states")
        prefix = stack.pop()
        used = frozenset(prefix)
        key = (used, node_lasts(prefix))
        if key in seen_states:
            continue
        seen_states.add(key)
        for leaf in leaves:
            omove = Move(leaf, "-")
            if omove in used:
                continue
            challenge = prefix + [omove]
            if not is_play(s, challenge):
                continue
            answer = Move(strategy[leaf], "+")
            extended = challenge + [answer]
            if not is_play(s, extended):
                return Verdict(
                    "aj",
                    False,
                    {
                        "kind": "play",
                        "play": [_move_text(m) for m in challenge],
                        "stuck_answer": _move_text(answer),
                    },
                )
            stack.append(extended)
    return Verdict("aj", True)
