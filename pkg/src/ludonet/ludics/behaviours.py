"""Universe-bounded behaviours over interactive designs.

A universe fixes a base, a finite ramification alphabet, and a depth
bound, making the design space finite.  Behaviours are orthogonally
closed sets inside such a universe; all computations here are relative
to one and say nothing about designs outside it.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

from .designs import (
    DAIMON,
    Address,
    Base,
    Daimon,
    Design,
    DesignError,
    Negative,
    Omega,
    Positive,
    Proper,
    Ramification,
    check_design,
    dai_minus,
    design_depth,
    design_union,
    format_address,
    format_ramification,
    is_positive,
    negative,
    negative_base,
    positive_base,
    proper,
    ram_design,
    ram_key,
    skunk,
)
from .engine import orthogonal, token_run

ENUMERATION_CAP_VARIABLE = "LUDONET_ENUM_CAP"
DEFAULT_ENUMERATION_CAP = 20000
MAX_ALPHABET = 8
MAX_DEPTH = 5


class UniverseError(DesignError):
    """Raised when an enumeration or a universe parameter leaves its caps."""


class BehaviourError(DesignError):
    """Raised when a behaviour operation is used outside its contract."""


def _default_cap() -> int:
    raw = os.environ.get(ENUMERATION_CAP_VARIABLE)
    if raw is None:
        return DEFAULT_ENUMERATION_CAP
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_ENUMERATION_CAP


# ---------------------------------------------------------------------------
# Universes


@dataclass(frozen=True)
class Universe:
    """A finite design space: one address, an alphabet, a depth bound."""

    base: Base
    alphabet: frozenset[Ramification]
    depth: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet",
                           frozenset(frozenset(j) for j in self.alphabet))
        if self.base.polarity == "+" and len(self.base.right) != 1:
            raise UniverseError("a positive universe needs exactly one address")
        if self.base.polarity == "-" and self.base.right:
            raise UniverseError("a negative universe carries no free addresses")
        if self.depth < 0:
            raise UniverseError("the depth bound cannot be negative")
        if len(self.alphabet) > MAX_ALPHABET:
            raise UniverseError("alphabet above the cap of %d ramifications"
                                % MAX_ALPHABET)
        if self.depth > MAX_DEPTH:
            raise UniverseError("depth above the cap of %d" % MAX_DEPTH)

    @property
    def polarity(self) -> str:
        return self.base.polarity

    @property
    def address(self) -> Address:
        if self.base.polarity == "+":
            return next(iter(self.base.right))
        return self.base.left

    @property
    def dual(self) -> "Universe":
        if self.base.polarity == "+":
            return Universe(negative_base(self.address), self.alphabet,
                            self.depth)
        return Universe(positive_base(self.address), self.alphabet, self.depth)

    def sorted_alphabet(self) -> list[Ramification]:
        return sorted(self.alphabet, key=ram_key)


def _used_ramifications(d: Design) -> Iterable[Ramification]:
    if isinstance(d, Negative):
        for j, sub in d.branches:
            yield j
            yield from _used_ramifications(sub)
    elif isinstance(d, Proper):
        yield d.ramification
        for _, child in d.children:
            yield from _used_ramifications(child)


def design_in_universe(d: Design, u: Universe) -> bool:
    """Exact membership in the universe's design space."""
    if isinstance(d, Omega):
        return False
    if is_positive(d) != (u.polarity == "+"):
        return False
    if not check_design(d, u.base):
        return False
    if design_depth(d) > u.depth:
        return False
    return all(j in u.alphabet for j in _used_ramifications(d))


def enumerate_designs(u: Universe, cap: Optional[int] = None) -> tuple[Design, ...]:
    """Every design of the universe, in a deterministic order.

    Counts constructions against ``cap`` and stops with an error rather
    than grinding through an astronomic space.
    """
    if cap is None:
        cap = _default_cap()
    rams = u.sorted_alphabet()
    budget = [0]

    def bump() -> None:
        budget[0] += 1
        if budget[0] > cap:
            raise UniverseError(
                "enumeration exceeded the cap of %d designs" % cap)

    memo_pos: dict[tuple, tuple[Positive, ...]] = {}
    memo_neg: dict[tuple, tuple[Negative, ...]] = {}

    def positives(context: tuple[Address, ...], depth: int) -> tuple[Positive, ...]:
        key = (context, depth)
        if key in memo_pos:
            return memo_pos[key]
        out: dict[Positive, None] = {DAIMON: None}
        bump()
        if depth >= 1:
            for idx, focus in enumerate(context):
                rest = context[:idx] + context[idx + 1:]
                for ram in rams:
                    biases = sorted(ram)
                    slots = len(biases)
                    for assign in itertools.product(range(slots + 1),
                                                    repeat=len(rest)):
                        extras: dict[int, list[Address]] = {
                            i: [] for i in biases}
                        for addr, slot in zip(rest, assign):
                            if slot < slots:
                                extras[biases[slot]].append(addr)
                        son_choices = [
                            negatives_for(focus + (i,), tuple(extras[i]),
                                          depth - 1)
                            for i in biases]
                        for combo in itertools.product(*son_choices):
                            d = proper(focus, ram, dict(zip(biases, combo)))
                            if d not in out:
                                bump()
                                out[d] = None
        memo_pos[key] = tuple(out)
        return memo_pos[key]

    def negatives_for(focus: Address, extras: tuple[Address, ...],
                      value_depth: int) -> tuple[Negative, ...]:
        key = (focus, extras, value_depth)
        if key in memo_neg:
            return memo_neg[key]
        per_branch = []
        for j in rams:
            opened = tuple(focus + (k,) for k in sorted(j)) + extras
            values: tuple
            if value_depth < 0:
                values = (None,)
            else:
                values = (None,) + positives(opened, value_depth)
            per_branch.append((j, values))
        out: dict[Negative, None] = {}
        for combo in itertools.product(*(values for _, values in per_branch)):
            branches = {j: v for (j, _), v in zip(per_branch, combo)
                        if v is not None}
            d = negative(focus, branches)
            if d not in out:
                bump()
                out[d] = None
        memo_neg[key] = tuple(out)
        return memo_neg[key]

    if u.polarity == "+":
        return tuple(positives((u.address,), u.depth))
    return tuple(negatives_for(u.address, (), u.depth))


# ---------------------------------------------------------------------------
# Orthogonal sets and behaviours


def _converges(pos: Positive, neg: Negative) -> bool:
    return orthogonal(pos, (neg,))


def orthogonal_set(designs: Iterable[Design], u: Universe,
                   cap: Optional[int] = None) -> tuple[Design, ...]:
    """All designs of the dual side orthogonal to every given one."""
    pool = enumerate_designs(u.dual, cap)
    given = tuple(designs)
    if u.polarity == "+":
        return tuple(x for x in pool
                     if all(_converges(d, x) for d in given))
    return tuple(x for x in pool
                 if all(_converges(x, d) for d in given))


@dataclass(frozen=True)
class Behaviour:
    """An orthogonally closed set of designs inside one universe.

    Members are exactly the universe designs orthogonal to every design
    in ``testers``; the testers of an ``orth`` behaviour are its given
    generators, those of a ``biorth`` behaviour are the generators'
    orthogonal computed within the universe.
    """

    universe: Universe
    testers: tuple[Design, ...]
    generators: tuple[Design, ...]
    form: str
    _members: Optional[tuple[Design, ...]] = field(
        default=None, compare=False, repr=False)

    @property
    def polarity(self) -> str:
        return self.universe.polarity

    def __eq__(self, other) -> bool:
        return (isinstance(other, Behaviour)
                and self.universe == other.universe
                and frozenset(self.testers) == frozenset(other.testers))

    def __hash__(self) -> int:
        return hash((self.universe, frozenset(self.testers)))


def behaviour(generators: Iterable[Design], u: Universe, form: str = "orth",
              cap: Optional[int] = None) -> Behaviour:
    """Close a generator set into a behaviour.

    ``orth`` reads the generators as counter-designs and takes their
    orthogonal, so the generators live on the dual side of ``u``;
    ``biorth`` closes same-side generators by the double orthogonal.
    """
    gens = tuple(dict.fromkeys(generators))
    if form == "orth":
        for g in gens:
            if not design_in_universe(g, u.dual):
                raise BehaviourError("generator %s is outside the dual "
                                     "universe" % _describe(g))
        made = Behaviour(u, gens, gens, "orth")
    elif form == "biorth":
        for g in gens:
            if not design_in_universe(g, u):
                raise BehaviourError("generator %s is outside the universe"
                                     % _describe(g))
        made = Behaviour(u, orthogonal_set(gens, u, cap), gens, "biorth")
    else:
        raise BehaviourError("unknown closure form %r" % form)
    anchor = DAIMON if u.polarity == "+" else dai_minus(
        u.address, u.sorted_alphabet())
    if not contains(made, anchor):
        raise BehaviourError("a behaviour always keeps its concession design")
    return made


def _describe(d: Design) -> str:
    from .designs import format_design
    return format_design(d)


def biorthogonal(generators: Iterable[Design], u: Universe,
                 cap: Optional[int] = None) -> Behaviour:
    return behaviour(generators, u, form="biorth", cap=cap)


def contains(G: Behaviour, d: Design) -> bool:
    """Exact membership, universe-relative."""
    if not design_in_universe(d, G.universe):
        return False
    if G.polarity == "+":
        return all(_converges(d, t) for t in G.testers)
    return all(_converges(t, d) for t in G.testers)


def members(G: Behaviour, cap: Optional[int] = None) -> tuple[Design, ...]:
    """The full member tuple; needs the universe to enumerate under cap."""
    if G._members is None:
        pool = enumerate_designs(G.universe, cap)
        found = tuple(d for d in pool if contains(G, d))
        object.__setattr__(G, "_members", found)
    return G._members


def dual_behaviour(G: Behaviour, cap: Optional[int] = None) -> Behaviour:
    """The orthogonal behaviour, with the members of ``G`` as testers."""
    return Behaviour(G.universe.dual, members(G, cap), G.testers, "biorth")


# ---------------------------------------------------------------------------
# Incarnation and directories


def incarnation(d: Design, G: Behaviour) -> Design:
    """The least member of ``G`` below ``d``: what interaction can see.

    Computed operationally as the union of the parts the testers visit.
    """
    if not contains(G, d):
        raise BehaviourError("incarnation needs a member of the behaviour")
    if G.polarity == "+":
        if isinstance(d, Daimon):
            return d
        if not G.testers:
            # every tester is silent, so only the first action shows
            return proper(d.focus, d.ramification,
                          {i: skunk(d.focus + (i,)) for i in d.ramification})
        parts = [token_run(d, t).pullback_left for t in G.testers]
    else:
        if not G.testers:
            return skunk(d.focus)
        parts = [token_run(t, d).pullback_right for t in G.testers]
    merged = parts[0]
    for part in parts[1:]:
        merged = design_union(merged, part)
    return merged


def incarnation_set(G: Behaviour, cap: Optional[int] = None) -> tuple[Design, ...]:
    """The incarnated members: the quotient interaction actually sees."""
    out: dict[Design, None] = {}
    for m in members(G, cap):
        out[incarnation(m, G)] = None
    return tuple(out)


def directory(G: Behaviour) -> frozenset[Ramification]:
    """The root ramifications the behaviour engages."""
    u = G.universe
    if G.polarity == "+":
        return frozenset(
            I for I in u.alphabet
            if contains(G, ram_design(u.address, I, u.sorted_alphabet())))
    probe = incarnation(dai_minus(u.address, u.sorted_alphabet()), G)
    return frozenset(j for j, _ in probe.branches)


def disjoint_behaviours(G: Behaviour, H: Behaviour) -> bool:
    return not (directory(G) & directory(H))


# ---------------------------------------------------------------------------
# Additives


ADDITIVE_OPS = ("with", "plus", "intersect", "union")


def additive(G: Behaviour, H: Behaviour, op: str,
             cap: Optional[int] = None) -> Behaviour:
    """Combine two behaviours on one base.

    ``intersect`` and ``union`` are unrestricted; ``with`` and ``plus``
    ask for disjoint directories first, and ``plus`` checks that the
    closure adds nothing to the plain union.
    """
    if op not in ADDITIVE_OPS:
        raise BehaviourError("unknown additive %r" % op)
    if G.universe != H.universe:
        raise BehaviourError("additives need one shared universe")
    if op in ("with", "plus") and not disjoint_behaviours(G, H):
        shared = directory(G) & directory(H)
        raise BehaviourError(
            "disjointness violation: directories share %s"
            % " ".join(sorted(map(format_ramification, shared))))
    if op in ("with", "intersect"):
        testers = tuple(dict.fromkeys(G.testers + H.testers))
        return Behaviour(G.universe, testers,
                         tuple(dict.fromkeys(G.generators + H.generators)),
                         "orth" if (G.form, H.form) == ("orth", "orth")
                         else "biorth")
    union = tuple(dict.fromkeys(members(G, cap) + members(H, cap)))
    closed = behaviour(union, G.universe, form="biorth", cap=cap)
    if op == "plus":
        if frozenset(members(closed, cap)) != frozenset(union):
            raise BehaviourError("the closure of a disjoint union grew: "
                                 "internal completeness failed")
    return closed


# ---------------------------------------------------------------------------
# Delocation


def relevant_addresses(u: Universe) -> tuple[Address, ...]:
    """Every address a universe design can mention."""
    seen: dict[Address, None] = {}
    biases = sorted({i for j in u.alphabet for i in j})

    def grow(addr: Address, positives_left: int, opened: bool) -> None:
        # opened means a branch action may extend the address next
        if addr in seen and opened:
            return
        seen[addr] = None
        if positives_left <= 0:
            return
        for i in biases:
            son = addr + (i,)
            seen[son] = None
            for k in biases:
                grow(son + (k,), positives_left - 1, True)

    if u.polarity == "+":
        grow(u.address, u.depth, False)
    else:
        seen[u.address] = None
        for k in biases:
            grow(u.address + (k,), u.depth, True)
    return tuple(sorted(seen))


def validate_delocation(theta: Callable[[Address], Address],
                        u: Universe) -> bool:
    """Whether the rename respects sons and never merges addresses."""
    addrs = relevant_addresses(u)
    images = {}
    biases = sorted({i for j in u.alphabet for i in j})
    for addr in addrs:
        image = theta(addr)
        if image in images and images[image] != addr:
            return False
        images[image] = addr
        for i in biases:
            son = theta(addr + (i,))
            if len(son) != len(image) + 1 or son[:-1] != image:
                return False
    return True


def delocate(d: Design, theta: Callable[[Address], Address]) -> Design:
    """Rename every address through ``theta``, keeping the tree shape."""
    if isinstance(d, (Omega, Daimon)):
        return d
    if isinstance(d, Negative):
        image = theta(d.focus)
        branches = {}
        for j, sub in d.branches:
            renamed = frozenset(theta(d.focus + (k,))[-1] for k in j)
            if len(renamed) != len(j):
                raise BehaviourError("delocation merges the branch %s"
                                     % format_ramification(j))
            branches[renamed] = delocate(sub, theta)
        return negative(image, branches)
    image = theta(d.focus)
    children = {}
    ram = set()
    for i, child in d.children:
        son = theta(d.focus + (i,))
        if len(son) != len(image) + 1 or son[:-1] != image:
            raise BehaviourError("delocation breaks the son %s"
                                 % format_address(d.focus + (i,)))
        ram.add(son[-1])
        children[son[-1]] = delocate(child, theta)
    if len(ram) != len(d.ramification):
        raise BehaviourError("delocation merges sons of %s"
                             % format_address(d.focus))
    return proper(image, frozenset(ram), children)


def delocate_behaviour(G: Behaviour, theta: Callable[[Address], Address],
                       target: Optional[Universe] = None) -> Behaviour:
    """The behaviour recognized by the delocated testers.

    ``target`` widens the universe when the rename leaves the original
    alphabet; it must share the base and cover the renamed testers.
    """
    u = target if target is not None else G.universe
    if u.base != G.universe.base:
        raise BehaviourError("delocation keeps the base")
    testers = tuple(delocate(t, theta) for t in G.testers)
    for t in testers:
        if not design_in_universe(t, u.dual):
            raise BehaviourError("tester %s leaves the target universe"
                                 % _describe(t))
    return Behaviour(u, testers,
                     tuple(delocate(g, theta) for g in G.generators), G.form)


def tagging_delocation(tag: int, stride: int = 2) -> Callable[[Address], Address]:
    """Retag the first step of an address; distinct tags give disjoint images."""
    if stride < 1 or not 0 <= tag < stride:
        raise BehaviourError("the tag must fall under the stride")

    def theta(addr: Address) -> Address:
        if not addr:
            return addr
        return (stride * addr[0] + tag,) + addr[1:]

    return theta


def delocated_alphabet(u: Universe, theta: Callable[[Address], Address]) -> frozenset[Ramification]:
    """Alphabet extended with the root renames a tagging map produces."""
    renamed = frozenset(
        frozenset(theta(u.address + (i,))[-1] for i in j) for j in u.alphabet)
    return u.alphabet | renamed


# ---------------------------------------------------------------------------
# Serialization and fixtures


def behaviour_to_obj(G: Behaviour, cap: Optional[int] = None) -> dict:
    from .designs import format_base, format_design
    u = G.universe
    try:
        count: Optional[int] = len(members(G, cap))
    except UniverseError:
        count = None
    return {
        "universe": {
            "base": format_base(u.base),
            "alphabet": [format_ramification(j) for j in u.sorted_alphabet()],
            "depth": u.depth,
        },
        "form": G.form,
        "generators": sorted(format_design(g) for g in G.generators),
        "member-count": count,
        "directory": [format_ramification(j)
                      for j in sorted(directory(G), key=ram_key)],
    }


def coloured_point_fixture() -> dict:
    """Record-like designs observed by field-selecting behaviours.

    Three fields sit at the root: radius at bias 0, angle at bias 1,
    colour at bias 2, with sample values 2, 180, and 9.
    """
    radius, angle, colour = frozenset({0}), frozenset({1}), frozenset({2})
    values = {0: 2, 1: 180, 2: 9}
    alphabet = frozenset({radius, angle, colour,
                          frozenset({180}), frozenset({9})})
    u = Universe(negative_base(()), alphabet, 2)

    point = negative((), {
        field_ram: proper((bias,), frozenset({values[bias]}),
                          {values[bias]: skunk((bias, values[bias]))})
        for bias, field_ram in ((0, radius), (1, angle), (2, colour))
    })

    def prober(field_ram: Ramification) -> Positive:
        bias = next(iter(field_ram))
        return proper((), field_ram,
                      {bias: dai_minus((bias,), sorted(alphabet, key=ram_key))})

    coloured_circles = behaviour([prober(radius), prober(colour)], u)
    points = behaviour([prober(radius), prober(angle)], u)
    circles = behaviour([prober(radius)], u)
    colours = behaviour([prober(colour)], u)
    return {
        "universe": u,
        "point": point,
        "coloured-circles": coloured_circles,
        "points": points,
        "circles": circles,
        "colours": colours,
    }


FIXTURES: Mapping[str, Callable[[], dict]] = {
    "coloured-point": coloured_point_fixture,
}
