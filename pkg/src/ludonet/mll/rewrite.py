"""The parsing rewrite system, sequentialization, and cut elimination.

Parsing contracts a structure step by step: a par whose two children sit
in one class folds them into the parent; a tensor whose children sit in
two distinct classes merges the classes; a cut whose two trees are down
to their roots merges their classes and drops both trees.  A structure
passes the weak criterion when some reduction reaches the state with
every conclusion at its root and a single class, the strong criterion
when every maximal reduction does.

The merged class of a cut step may be empty (a closed component), and
two closed components must not collapse into one, so parse states keep
their classes as a sorted tuple rather than a set.

Sequentialization replays a successful parse forward, combining one
derivation piece per class; with mix enabled, a reachable state whose
trees are all at their roots ends the search and leftover classes are
folded with mix nodes.

Cut elimination splits a cut between compound duals into the two
component cuts, and resolves a cut between two root leaves by merging
their classes.  A cut mixing a leaf with a compound tree first expands
the leaf one level so the compound step applies.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from ludonet.mll.criteria import SizeGuardError, Verdict
from ludonet.mll.derivation import (
    Cut as CutRule,
    DaimonAx,
    Derivation,
    Mix as MixRule,
    Par as ParRule,
    Rule,
    Tensor as TensorRule,
    build_from_derivation,
)
from ludonet.mll.formulas import (
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
    format_occ,
    format_structure,
    validate_structure,
)

DEFAULT_STATE_CAP = 200_000


def _class_key(cls: frozenset[LeafRef]) -> tuple:
    return (len(cls), sorted((r.tree, len(r.occ), r.occ) for r in cls))


def _canon_classes(classes) -> tuple[frozenset[LeafRef], ...]:
    return tuple(sorted(classes, key=_class_key))


class ParseState(NamedTuple):
    trees: tuple[PartialFormulaTree, ...]
    classes: tuple[frozenset[LeafRef], ...]  # sorted; empty classes kept
    cuts: frozenset[frozenset[int]]
    origin: tuple[int, ...]  # origin[k] = index of tree k in the input

    def key(self) -> tuple:
        return (self.trees, self.classes, self.cuts)


def initial_state(s: ParaproofStructure) -> ParseState:
    return ParseState(
        s.trees,
        _canon_classes(s.partition),
        s.cuts,
        tuple(range(len(s.trees))),
    )


def state_structure(state: ParseState) -> ParaproofStructure:
    """View of a parse state as a plain structure (empty classes dropped)."""
    return ParaproofStructure(
        state.trees, [c for c in state.classes if c], state.cuts
    )


def is_terminal(state: ParseState, allow_mix: bool = False) -> bool:
    if state.cuts:
        return False
    if any(t.leaves != frozenset([""]) for t in state.trees):
        return False
    if allow_mix:
        return True
    roots = frozenset(LeafRef(i, "") for i in range(len(state.trees)))
    return state.classes == (roots,)


def parse_redexes(
    state: ParseState, allow_mix: bool = False
) -> list[tuple[dict, ParseState]]:
    """Applicable steps as (rule tag, successor) pairs.

    Tags name positions in the ORIGINAL structure so that traces can be
    replayed after trees have been renumbered by cut steps.

    With allow_mix the par rule may also join leaves from two distinct
    classes, merging them; that is the mix rule folded into the par step
    (a mix premise followed by the ordinary par).
    """
    out: list[tuple[dict, ParseState]] = []
    which_class = {r: k for k, cls in enumerate(state.classes) for r in cls}

    def replace_classes(updates: dict[int, frozenset], drop: frozenset = frozenset()):
        new = [
            c
            for k, c in enumerate(state.classes)
            if k not in updates and k not in drop
        ]
        new.extend(updates.values())
        return _canon_classes(new)

    for i, t in enumerate(state.trees):
        for u1 in sorted(t.leaves, key=lambda x: (len(x), x)):
            if not u1.endswith("1"):
                continue
            u, u2 = u1[:-1], u1[:-1] + "2"
            if u2 not in t.leaves:
                continue
            sub = subformula_at(t.formula, u)
            new_tree = PartialFormulaTree(t.formula, (t.leaves - {u1, u2}) | {u})
            trees = state.trees[:i] + (new_tree,) + state.trees[i + 1 :]
            k1, k2 = which_class[LeafRef(i, u1)], which_class[LeafRef(i, u2)]
            if isinstance(sub, ParFormula) and k1 == k2:
                merged = (state.classes[k1] - {LeafRef(i, u1), LeafRef(i, u2)}) | {
                    LeafRef(i, u)
                }
                tag = {"rule": "par", "tree": state.origin[i], "occ": u}
                out.append(
                    (
                        tag,
                        ParseState(
                            trees,
                            replace_classes({k1: merged}),
                            state.cuts,
                            state.origin,
                        ),
                    )
                )
            elif isinstance(sub, ParFormula) and allow_mix and k1 != k2:
                merged = (
                    (state.classes[k1] - {LeafRef(i, u1)})
                    | (state.classes[k2] - {LeafRef(i, u2)})
                    | {LeafRef(i, u)}
                )
                tag = {"rule": "par-mix", "tree": state.origin[i], "occ": u}
                out.append(
                    (
                        tag,
                        ParseState(
                            trees,
                            replace_classes({k1: merged}, drop=frozenset({k2})),
                            state.cuts,
                            state.origin,
                        ),
                    )
                )
            elif isinstance(sub, TensorFormula) and k1 != k2:
                merged = (
                    (state.classes[k1] - {LeafRef(i, u1)})
                    | (state.classes[k2] - {LeafRef(i, u2)})
                    | {LeafRef(i, u)}
                )
                tag = {"rule": "tensor", "tree": state.origin[i], "occ": u}
                out.append(
                    (
                        tag,
                        ParseState(
                            trees,
                            replace_classes({k1: merged}, drop=frozenset({k2})),
                            state.cuts,
                            state.origin,
                        ),
                    )
                )

    for cut in sorted(tuple(sorted(c)) for c in state.cuts):
        i, j = cut
        if state.trees[i].leaves != frozenset([""]):
            continue
        if state.trees[j].leaves != frozenset([""]):
            continue
        k1, k2 = which_class[LeafRef(i, "")], which_class[LeafRef(j, "")]
        if k1 == k2:
            continue
        merged = (state.classes[k1] - {LeafRef(i, "")}) | (
            state.classes[k2] - {LeafRef(j, "")}
        )
        # renumber trees after deleting i and j
        remap = {}
        kept = []
        for k in range(len(state.trees)):
            if k in (i, j):
                continue
            remap[k] = len(kept)
            kept.append(state.trees[k])

        def move(cls: frozenset[LeafRef]) -> frozenset[LeafRef]:
            return frozenset(LeafRef(remap[r.tree], r.occ) for r in cls)

        classes = [
            move(c) for k, c in enumerate(state.classes) if k not in (k1, k2)
        ]
        classes.append(move(merged))
        cuts = frozenset(
            frozenset(remap[k] for k in c) for c in state.cuts if c != frozenset(cut)
        )
        origin = tuple(
            state.origin[k] for k in range(len(state.trees)) if k not in (i, j)
        )
        tag = {"rule": "cut", "trees": [state.origin[i], state.origin[j]]}
        out.append(
            (tag, ParseState(tuple(kept), _canon_classes(classes), cuts, origin))
        )
    return out


@dataclass
class ParseReport:
    verdict: Verdict
    trace: list[tuple[Optional[dict], ParseState]]  # (rule tag, state); tag None at start

    @property
    def accepted(self) -> bool:
        return self.verdict.accepted

    def __bool__(self) -> bool:
        return self.accepted


def _search(
    s: ParaproofStructure, state_cap: int, stop=None, allow_mix: bool = False
) -> tuple[dict, list[tuple], object]:
    """Breadth-first closure of the rewrite relation.

    Returns (nodes, order, found): nodes maps state key to
    (parent key, tag, state, successor count), order lists keys oldest
    first.  With a stop predicate, the search returns as soon as a
    matching state is discovered (found = its key); successor counts are
    then incomplete.  Without one, found is None and counts are exact.
    """
    start = initial_state(s)
    nodes: dict = {start.key(): (None, None, start, 0)}
    order = [start.key()]
    if stop is not None and stop(start):
        return nodes, order, start.key()
    queue = deque([start])
    while queue:
        state = queue.popleft()
        succs = parse_redexes(state, allow_mix=allow_mix)
        parent_key = state.key()
        p, t, st, _ = nodes[parent_key]
        nodes[parent_key] = (p, t, st, len(succs))
        for tag, nxt in succs:
            k = nxt.key()
            if k not in nodes:
                if len(nodes) > state_cap:
                    raise SizeGuardError(
                        f"parse search exceeded {state_cap} states"
                    )
                nodes[k] = (parent_key, tag, nxt, 0)
                order.append(k)
                if stop is not None and stop(nxt):
                    return nodes, order, k
                queue.append(nxt)
    return nodes, order, None


def _path_to(nodes: dict, key) -> list[tuple[Optional[dict], ParseState]]:
    path = []
    while key is not None:
        parent, tag, state, _ = nodes[key]
        path.append((tag, state))
        key = parent
    path.reverse()
    return path


def check_parsing(
    s: ParaproofStructure, mode: str = "weak", state_cap: int = DEFAULT_STATE_CAP
) -> ParseReport:
    if mode not in ("weak", "strong"):
        raise ValueError(f"mode must be weak or strong, got {mode!r}")
    problems = validate_structure(s)
    if problems:
        raise ValueError(f"invalid structure: {problems[0]}")
    criterion = f"parse-{mode}"
    if mode == "weak":
        nodes, order, found = _search(s, state_cap, stop=is_terminal)
        if found is not None:
            return ParseReport(Verdict(criterion, True), _path_to(nodes, found))
        # reject: witness is the first stuck (normal, non-terminal) state
        for key in order:
            _, _, state, succ_count = nodes[key]
            if succ_count == 0:
                return ParseReport(
                    Verdict(
                        criterion,
                        False,
                        {
                            "kind": "stuck",
                            "state": format_structure(state_structure(state)),
                        },
                    ),
                    _path_to(nodes, key),
                )
        raise AssertionError("rewriting admits no normal form")
    # strong: every normal reachable state must be terminal
    nodes, order, _ = _search(s, state_cap)
    accept_path: Optional[list] = None
    for key in order:
        _, _, state, succ_count = nodes[key]
        if succ_count == 0:
            if not is_terminal(state):
                return ParseReport(
                    Verdict(
                        criterion,
                        False,
                        {
                            "kind": "stuck",
                            "state": format_structure(state_structure(state)),
                        },
                    ),
                    _path_to(nodes, key),
                )
            if accept_path is None:
                accept_path = _path_to(nodes, key)
    assert accept_path is not None
    return ParseReport(Verdict(criterion, True), accept_path)


### sequentialization

def _replay(
    s: ParaproofStructure, trace: list[tuple[Optional[dict], ParseState]]
) -> tuple[dict[frozenset[LeafRef], Rule], list[Rule]]:
    """Follow a parse trace, building one derivation piece per class.

    Returns the pieces of the open classes plus the closed pieces whose
    class became empty at a cut step.
    """
    pieces: dict[frozenset[LeafRef], Rule] = {}
    closed: list[Rule] = []
    for cls in s.partition:
        pieces[cls] = DaimonAx(cls)

    def class_with(ref: LeafRef) -> frozenset[LeafRef]:
        for cls in pieces:
            if ref in cls:
                return cls
        raise AssertionError(f"no open class contains {ref}")

    for tag, _ in trace:
        if tag is None:
            continue
        if tag["rule"] == "par":
            t, u = tag["tree"], tag["occ"]
            cls = class_with(LeafRef(t, u + "1"))
            new = (cls - {LeafRef(t, u + "1"), LeafRef(t, u + "2")}) | {LeafRef(t, u)}
            pieces[new] = ParRule(t, u, pieces.pop(cls))
        elif tag["rule"] == "par-mix":
            t, u = tag["tree"], tag["occ"]
            c1 = class_with(LeafRef(t, u + "1"))
            c2 = class_with(LeafRef(t, u + "2"))
            new = (c1 - {LeafRef(t, u + "1")}) | (c2 - {LeafRef(t, u + "2")}) | {
                LeafRef(t, u)
            }
            pieces[new] = ParRule(t, u, MixRule(pieces.pop(c1), pieces.pop(c2)))
        elif tag["rule"] == "tensor":
            t, u = tag["tree"], tag["occ"]
            c1 = class_with(LeafRef(t, u + "1"))
            c2 = class_with(LeafRef(t, u + "2"))
            new = (c1 - {LeafRef(t, u + "1")}) | (c2 - {LeafRef(t, u + "2")}) | {
                LeafRef(t, u)
            }
            pieces[new] = TensorRule(t, u, pieces.pop(c1), pieces.pop(c2))
        elif tag["rule"] == "cut":
            a, b = tag["trees"]
            c1 = class_with(LeafRef(a, ""))
            c2 = class_with(LeafRef(b, ""))
            new = (c1 - {LeafRef(a, "")}) | (c2 - {LeafRef(b, "")})
            piece = CutRule(a, b, pieces.pop(c1), pieces.pop(c2))
            if new:
                pieces[new] = piece
            else:
                closed.append(piece)
        else:
            raise AssertionError(f"unknown trace tag {tag!r}")
    return pieces, closed


def sequentialize(
    s: ParaproofStructure,
    allow_mix: bool = False,
    state_cap: int = DEFAULT_STATE_CAP,
) -> Optional[Derivation]:
    """Derivation rebuilding s exactly, or None when parsing fails."""
    problems = validate_structure(s)
    if problems:
        raise ValueError(f"invalid structure: {problems[0]}")
    if not s.trees:
        return None
    nodes, order, goal = _search(
        s,
        state_cap,
        stop=lambda st: is_terminal(st, allow_mix=allow_mix),
        allow_mix=allow_mix,
    )
    if goal is None:
        return None
    trace = _path_to(nodes, goal)
    pieces, closed = _replay(s, trace)
    ordered = [pieces[cls] for cls in sorted(pieces, key=_class_key)] + closed
    root = ordered[0]
    for piece in ordered[1:]:
        root = MixRule(root, piece)
    derivation = Derivation(tuple(t.formula for t in s.trees), root)
    rebuilt = build_from_derivation(derivation)
    if rebuilt != s:
        raise AssertionError("sequentialization did not rebuild its input")
    return derivation


### cut elimination

def _remap_structure(
    trees: list[Optional[PartialFormulaTree]],
    classes: list[frozenset[LeafRef]],
    cuts: list[tuple[int, int]],
    ref_map,
) -> ParaproofStructure:
    """Compact away dropped (None) trees, renumbering refs and cuts."""
    remap: dict[int, int] = {}
    kept: list[PartialFormulaTree] = []
    for k, t in enumerate(trees):
        if t is not None:
            remap[k] = len(kept)
            kept.append(t)
    new_classes = []
    for cls in classes:
        moved = frozenset(
            LeafRef(remap[r2.tree], r2.occ) for r2 in (ref_map(r) for r in cls)
        )
        if moved:
            new_classes.append(moved)
    new_cuts = [frozenset((remap[i], remap[j])) for i, j in cuts]
    return ParaproofStructure(kept, new_classes, new_cuts)


def _eliminate_one(s: ParaproofStructure, cut: tuple[int, int]) -> ParaproofStructure:
    i, j = cut
    ti, tj = s.trees[i], s.trees[j]
    leaf_i = ti.leaves == frozenset([""])
    leaf_j = tj.leaves == frozenset([""])

    if leaf_i and leaf_j:
        # both trees at the root: merge their classes, drop trees and cut
        classes = [cls for cls in s.partition]
        holding = [k for k, cls in enumerate(classes) if LeafRef(i, "") in cls or LeafRef(j, "") in cls]
        merged = frozenset().union(*(classes[k] for k in holding)) - {
            LeafRef(i, ""),
            LeafRef(j, ""),
        }
        rest = [cls for k, cls in enumerate(classes) if k not in holding]
        if merged:
            rest.append(merged)
        trees: list[Optional[PartialFormulaTree]] = list(s.trees)
        trees[i] = None
        trees[j] = None
        cuts = [tuple(sorted(c)) for c in s.cuts if c != frozenset(cut)]
        return _remap_structure(trees, rest, cuts, lambda r: r)

    if leaf_i or leaf_j:
        # expand the root leaf one level so both sides are compound
        k = i if leaf_i else j
        tk = s.trees[k]
        expanded = PartialFormulaTree(tk.formula, {"1", "2"})
        trees2 = list(s.trees)
        trees2[k] = expanded
        classes2 = []
        for cls in s.partition:
            if LeafRef(k, "") in cls:
                cls = (cls - {LeafRef(k, "")}) | {LeafRef(k, "1"), LeafRef(k, "2")}
            classes2.append(cls)
        return _eliminate_one(
            ParaproofStructure(trees2, classes2, s.cuts), cut
        )

    # both compound: split into the two component cuts
    def halves(t: PartialFormulaTree) -> tuple[frozenset, frozenset]:
        return (
            frozenset(u[1:] for u in t.leaves if u.startswith("1")),
            frozenset(u[1:] for u in t.leaves if u.startswith("2")),
        )

    ui1, ui2 = halves(ti)
    vj1, vj2 = halves(tj)
    fi, fj = ti.formula, tj.formula
    n = len(s.trees)
    trees = list(s.trees)
    new_cuts = [tuple(sorted(c)) for c in s.cuts if c != frozenset(cut)]

    # first components stay at indices i and j
    if ui1 or vj1:
        trees[i] = PartialFormulaTree(fi.left, ui1) if ui1 else None
        trees[j] = PartialFormulaTree(fj.left, vj1) if vj1 else None
        if ui1 and vj1:
            new_cuts.append((i, j))
    else:
        trees[i] = None
        trees[j] = None
    # second components are appended
    second_i = second_j = None
    if ui2:
        second_i = len(trees)
        trees.append(PartialFormulaTree(fi.right, ui2))
    if vj2:
        second_j = len(trees)
        trees.append(PartialFormulaTree(fj.right, vj2))
    if second_i is not None and second_j is not None:
        new_cuts.append((second_i, second_j))

    def ref_map(r: LeafRef) -> LeafRef:
        if r.tree == i:
            if r.occ.startswith("1"):
                return LeafRef(i, r.occ[1:])
            return LeafRef(second_i, r.occ[1:])
        if r.tree == j:
            if r.occ.startswith("1"):
                return LeafRef(j, r.occ[1:])
            return LeafRef(second_j, r.occ[1:])
        return r

    return _remap_structure(trees, list(s.partition), new_cuts, ref_map)


def cut_normalize(s: ParaproofStructure, trace: bool = False):
    """Eliminate every cut; returns the cut-free structure.

    With trace=True, returns (structure, states) where states runs from
    the input to the normal form inclusive.
    """
    problems = validate_structure(s)
    if problems:
        raise ValueError(f"invalid structure: {problems[0]}")
    states = [s]
    current = s
    while current.cuts:
        cut = min(tuple(sorted(c)) for c in current.cuts)
        current = _eliminate_one(current, cut)
        states.append(current)
    if trace:
        return current, states
    return current
