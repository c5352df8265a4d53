"""Random paraproof structures with known ground truth.

Structures are composed bottom-up from axiom pieces: dual axiom pairs in
proof mode, daimon classes over a few conclusions in paraproof mode.
Pieces are joined by tensor (and optionally mix), conclusions inside a
piece are joined by par, and cuts splice in a mirrored axiom net on the
dual formula so that every cut is balanced leaf-for-leaf and eliminates
fully.  Every operation preserves the net property, so an unperturbed
sample is sequentializable by construction.

Perturbation then reshuffles the partition with some probability: proof
mode swaps partners between two axiom classes on equal formulas (the
classes stay dual pairs), paraproof mode merges, splits, or moves
leaves.  Perturbed samples are still well-formed but usually fail the
correctness criteria, giving an adversarial half to test corpora.
"""

from __future__ import annotations

import random

from ludonet.mll.formulas import Atom, Formula, Par, Tensor, dual
from ludonet.mll.structures import (
    LeafRef,
    ParaproofStructure,
    PartialFormulaTree,
    leaf_formula,
    validate_structure,
)

_ALPHABET = ("X", "Y", "Z")


def random_formula(rng: random.Random, max_depth: int) -> Formula:
    if max_depth <= 0 or rng.random() < 0.4:
        name = rng.choice(_ALPHABET)
        atom: Formula = Atom(name)
        return atom if rng.random() < 0.5 else dual(atom)
    left = random_formula(rng, max_depth - 1)
    right = random_formula(rng, max_depth - 1)
    return Tensor(left, right) if rng.random() < 0.5 else Par(left, right)


def axiom_pair(formula: Formula) -> ParaproofStructure:
    return ParaproofStructure(
        [PartialFormulaTree(formula, [""]), PartialFormulaTree(dual(formula), [""])],
        [[(0, ""), (1, "")]],
    )


def daimon_axiom(formulas: list[Formula]) -> ParaproofStructure:
    return ParaproofStructure(
        [PartialFormulaTree(f, [""]) for f in formulas],
        [[(i, "") for i in range(len(formulas))]],
    )


def _shift(s: ParaproofStructure, offset: int) -> ParaproofStructure:
    return ParaproofStructure(
        s.trees,
        [[(r.tree + offset, r.occ) for r in cls] for cls in s.partition],
        [[i + offset for i in c] for c in s.cuts],
    )


def disjoint_union(s1: ParaproofStructure, s2: ParaproofStructure) -> ParaproofStructure:
    moved = _shift(s2, len(s1.trees))
    return ParaproofStructure(
        s1.trees + s2.trees,
        list(s1.partition) + list(moved.partition),
        list(s1.cuts) + list(moved.cuts),
    )


def _join_last_two(
    s: ParaproofStructure, a: int, b: int, connective
) -> ParaproofStructure:
    """Replace conclusions a and b by connective(a, b) as the last tree."""
    ta, tb = s.trees[a], s.trees[b]
    joined = PartialFormulaTree(
        connective(ta.formula, tb.formula),
        {"1" + u for u in ta.leaves} | {"2" + u for u in tb.leaves},
    )
    remap = {}
    kept = []
    for k, t in enumerate(s.trees):
        if k in (a, b):
            continue
        remap[k] = len(kept)
        kept.append(t)
    joined_index = len(kept)

    def move(r: LeafRef) -> LeafRef:
        if r.tree == a:
            return LeafRef(joined_index, "1" + r.occ)
        if r.tree == b:
            return LeafRef(joined_index, "2" + r.occ)
        return LeafRef(remap[r.tree], r.occ)

    return ParaproofStructure(
        kept + [joined],
        [[move(r) for r in cls] for cls in s.partition],
        [[remap[i] for i in c] for c in s.cuts],
    )


def par_join(s: ParaproofStructure, a: int, b: int) -> ParaproofStructure:
    return _join_last_two(s, a, b, Par)


def tensor_join(
    s1: ParaproofStructure, a: int, s2: ParaproofStructure, b: int
) -> ParaproofStructure:
    both = disjoint_union(s1, s2)
    return _join_last_two(both, a, b + len(s1.trees), Tensor)


def mirror_axiom_net(formula: Formula, leaves: frozenset[str]) -> ParaproofStructure:
    """Net with conclusions formula^leaves and dual^leaves, leaves paired
    occurrence by occurrence."""
    return ParaproofStructure(
        [
            PartialFormulaTree(formula, leaves),
            PartialFormulaTree(dual(formula), leaves),
        ],
        [[(0, u), (1, u)] for u in sorted(leaves)],
    )


def cut_against_mirror(s: ParaproofStructure, a: int) -> ParaproofStructure:
    """Cut conclusion a against a mirrored axiom net on its dual.

    The mirror's second tree (same formula as a) becomes a fresh free
    conclusion, so the structure keeps the same number of free ends.
    """
    ta = s.trees[a]
    partner = mirror_axiom_net(dual(ta.formula), ta.leaves)
    both = disjoint_union(s, partner)
    cuts = list(both.cuts) + [[a, len(s.trees)]]
    return ParaproofStructure(both.trees, both.partition, cuts)


def _free_conclusions(s: ParaproofStructure) -> list[int]:
    in_cut = {i for c in s.cuts for i in c}
    return [i for i in range(len(s.trees)) if i not in in_cut]


def _perturb_proof(s: ParaproofStructure, rng: random.Random) -> ParaproofStructure:
    """Swap partners between two axiom classes whose second elements carry
    the same formula; the classes remain dual pairs."""
    classes = [sorted(c, key=lambda r: (r.tree, len(r.occ), r.occ)) for c in s.partition]
    classes.sort(key=lambda c: [(r.tree, len(r.occ), r.occ) for r in c])
    candidates = []
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            for x in classes[i]:
                for y in classes[j]:
                    if leaf_formula(s, x) == leaf_formula(s, y) and x != y:
                        candidates.append((i, j, x, y))
    if not candidates:
        return s
    i, j, x, y = rng.choice(candidates)
    ci = frozenset(classes[i]) - {x} | {y}
    cj = frozenset(classes[j]) - {y} | {x}
    rest = [frozenset(c) for k, c in enumerate(classes) if k not in (i, j)]
    return ParaproofStructure(s.trees, rest + [ci, cj], s.cuts)


def _perturb_paraproof(s: ParaproofStructure, rng: random.Random) -> ParaproofStructure:
    classes = [sorted(c, key=lambda r: (r.tree, len(r.occ), r.occ)) for c in s.partition]
    classes.sort(key=lambda c: [(r.tree, len(r.occ), r.occ) for r in c])
    moves = ["merge", "split", "move"]
    rng.shuffle(moves)
    for op in moves:
        if op == "merge" and len(classes) >= 2:
            i, j = rng.sample(range(len(classes)), 2)
            merged = frozenset(classes[i]) | frozenset(classes[j])
            rest = [frozenset(c) for k, c in enumerate(classes) if k not in (i, j)]
            return ParaproofStructure(s.trees, rest + [merged], s.cuts)
        if op == "split":
            big = [k for k, c in enumerate(classes) if len(c) >= 2]
            if big:
                k = rng.choice(big)
                cls = classes[k]
                cut_at = rng.randrange(1, len(cls))
                rest = [frozenset(c) for m, c in enumerate(classes) if m != k]
                return ParaproofStructure(
                    s.trees,
                    rest + [frozenset(cls[:cut_at]), frozenset(cls[cut_at:])],
                    s.cuts,
                )
        if op == "move" and len(classes) >= 2:
            donors = [k for k, c in enumerate(classes) if len(c) >= 2]
            if donors:
                k = rng.choice(donors)
                m = rng.choice([x for x in range(len(classes)) if x != k])
                leaf = rng.choice(classes[k])
                rest = [frozenset(c) for x, c in enumerate(classes) if x not in (k, m)]
                return ParaproofStructure(
                    s.trees,
                    rest
                    + [frozenset(classes[k]) - {leaf}, frozenset(classes[m]) | {leaf}],
                    s.cuts,
                )
    return s


def random_structure(
    seed: int,
    size_budget: int,
    mode: str = "proof",
    allow_cuts: bool = False,
    allow_mix: bool = False,
    perturb: float = 0.0,
) -> ParaproofStructure:
    """Deterministic random structure with about size_budget leaves."""
    if size_budget < 1:
        raise ValueError("size budget must be at least 1")
    if mode not in ("proof", "paraproof"):
        raise ValueError(f"mode must be proof or paraproof, got {mode!r}")
    rng = random.Random(seed)
    depth_cap = 1 if size_budget <= 4 else 2

    def leaves_of(piece: ParaproofStructure) -> int:
        return sum(len(t.leaves) for t in piece.trees)

    pieces: list[ParaproofStructure] = []
    total = 0
    while total < size_budget:
        if mode == "proof":
            piece = axiom_pair(random_formula(rng, rng.randint(0, depth_cap)))
        else:
            count = rng.randint(1, min(3, max(1, size_budget - total)))
            piece = daimon_axiom(
                [random_formula(rng, rng.randint(0, depth_cap)) for _ in range(count)]
            )
        pieces.append(piece)
        total += leaves_of(piece)

    # joining phase: bring everything down to one piece
    while len(pieces) > 1:
        i, j = rng.sample(range(len(pieces)), 2)
        s1, s2 = pieces[i], pieces[j]
        pieces = [p for k, p in enumerate(pieces) if k not in (i, j)]
        if allow_mix and rng.random() < 0.3:
            pieces.append(disjoint_union(s1, s2))
        else:
            a = rng.choice(_free_conclusions(s1))
            b = rng.choice(_free_conclusions(s2))
            pieces.append(tensor_join(s1, a, s2, b))
    s = pieces[0]

    # par joins inside the piece
    free = _free_conclusions(s)
    while len(free) > 2 and rng.random() < 0.6:
        a, b = rng.sample(free, 2)
        s = par_join(s, a, b)
        free = _free_conclusions(s)

    if allow_cuts:
        for _ in range(rng.randint(1, 2)):
            free = _free_conclusions(s)
            if not free:
                break
            s = cut_against_mirror(s, rng.choice(free))

    if perturb > 0 and rng.random() < perturb:
        s = _perturb_proof(s, rng) if mode == "proof" else _perturb_paraproof(s, rng)

    assert not validate_structure(s, mode)
    return s
