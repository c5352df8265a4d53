"""Designs: address-indexed interactive strategies with explicit partiality.

A design is a tree of polarized actions over *addresses* (finite words of
naturals).  A positive action ``(+ xi I)`` focuses the address ``xi`` and opens
one sub-location ``xi.i`` per bias ``i`` in the finite ramification ``I``; each
sub-location carries a negative sub-design.  A negative design on focus ``zeta``
maps finitely many ramifications ``J`` to positive continuations, every other
ramification answering the divergent design ``omega``.  Two positive leaves
close a branch: ``dai`` (immediate success, the daimon) and ``omega``
(divergence).  Canonical form never stores an ``omega`` branch, so structural
equality coincides with design equality.

Typing assigns *bases*: a positive design uses a base ``|- L`` and a negative
design a base ``zeta |- L`` where ``L`` is a finite set of pairwise disjoint
addresses.  Affinity is the heart of the discipline: distinct biases of one
positive action must consume disjoint parts of the context.  ``infer_base``
reconstructs the least base or reports which rule failed (propagation of an
inner failure, an affinity clash, or an ill-formed base).

Text format::

    design   = "dai" | "omega" | positive | negative
    positive = "(+" address ram negative* ")"      one child per bias, sorted
    negative = "(-" address branch* ")"
    branch   = "(" ram "->" design ")"
    ram      = "{" nat* "}"
    address  = "e" | nat ("." nat)*

Chronicles are the linear view of a design: alternating action sequences
ending with a positive action or the daimon marker.  ``to_chronicles`` /
``from_chronicles`` convert both ways; the set-of-chronicles presentation
must satisfy coherence, focalization, subaddress and affinity conditions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

Address = tuple[int, ...]
Ramification = frozenset[int]

EMPTY_ADDRESS: Address = ()


class DesignError(Exception):
    """Malformed design construction or query."""


class DesignParseError(Exception):
    """Unreadable design text."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ChronicleSetError(Exception):
    """A chronicle set violating one of the named design conditions."""

    def __init__(self, condition: str, detail: str):
        super().__init__(f"{condition}: {detail}")
        self.condition = condition


# ---------------------------------------------------------------------------
# addresses


def address_is_prefix(a: Address, b: Address) -> bool:
    return len(a) <= len(b) and b[: len(a)] == a


def addresses_disjoint(a: Address, b: Address) -> bool:
    """Neither address extends the other."""
    return not address_is_prefix(a, b) and not address_is_prefix(b, a)


def pairwise_disjoint(addresses: Iterable[Address]) -> bool:
    items = sorted(set(addresses))
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if not addresses_disjoint(a, b):
                return False
    return True


def format_address(a: Address) -> str:
    return "e" if not a else ".".join(str(i) for i in a)


def parse_address(text: str) -> Address:
    text = text.strip()
    if text == "e":
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise DesignParseError(f"bad address {text!r}")
    if any(p < 0 for p in parts):
        raise DesignParseError(f"negative bias in address {text!r}")
    return parts


def format_ramification(j: Ramification) -> str:
    return "{" + " ".join(str(i) for i in sorted(j)) + "}"


def ram_key(j: Ramification) -> tuple[int, ...]:
    # total order on ramifications used everywhere a branch list is sorted
    return tuple(sorted(j))


# ---------------------------------------------------------------------------
# design trees


@dataclass(frozen=True)
class Omega:
    """The divergent positive design: no action, no answer."""

    def __repr__(self) -> str:
        return "omega"


@dataclass(frozen=True)
class Daimon:
    """The positive design that terminates immediately with success."""

    def __repr__(self) -> str:
        return "dai"


@dataclass(frozen=True)
class Proper:
    """Positive design starting with an action on ``focus`` with ``ramification``."""

    focus: Address
    ramification: Ramification
    children: tuple[tuple[int, "Negative"], ...]

    def child(self, bias: int) -> "Negative":
        for i, sub in self.children:
            if i == bias:
                return sub
        raise DesignError(f"bias {bias} outside ramification")

    def __repr__(self) -> str:
        return format_design(self)


@dataclass(frozen=True)
class Negative:
    """Negative design on ``focus``: finitely many ramifications answered."""

    focus: Address
    branches: tuple[tuple[Ramification, "Positive"], ...]

    def branch(self, j: Ramification) -> "Positive":
        for key, sub in self.branches:
            if key == j:
                return sub
        return OMEGA

    @property
    def support(self) -> frozenset[Ramification]:
        return frozenset(key for key, _ in self.branches)

    def __repr__(self) -> str:
        return format_design(self)


Positive = Union[Omega, Daimon, Proper]
Design = Union[Omega, Daimon, Proper, Negative]

OMEGA = Omega()
DAIMON = Daimon()


def proper(focus: Address, ramification: Iterable[int],
           children: Mapping[int, Negative]) -> Proper:
    ram = frozenset(ramification)
    if set(children) != ram:
        raise DesignError("children must be keyed exactly by the ramification")
    for i, sub in children.items():
        if sub.focus != focus + (i,):
            raise DesignError(
                f"child at bias {i} must have focus {format_address(focus + (i,))}")
    ordered = tuple(sorted(children.items()))
    return Proper(focus, ram, ordered)


def negative(focus: Address, branches: Mapping[Ramification, Positive]) -> Negative:
    kept = {frozenset(j): p for j, p in branches.items() if not isinstance(p, Omega)}
    ordered = tuple(sorted(kept.items(), key=lambda kv: ram_key(kv[0])))
    return Negative(focus, ordered)


def is_positive(d: Design) -> bool:
    return not isinstance(d, Negative)


def design_size(d: Design) -> int:
    """Number of actions (daimon leaves count, omega does not)."""
    if isinstance(d, Omega):
        return 0
    if isinstance(d, Daimon):
        return 1
    if isinstance(d, Proper):
        return 1 + sum(design_size(sub) for _, sub in d.children)
    return sum(design_size(p) for _, p in d.branches)


def design_depth(d: Design) -> int:
    """Nesting depth counted in positive actions."""
    if isinstance(d, (Omega, Daimon)):
        return 0
    if isinstance(d, Proper):
        return 1 + max((design_depth(sub) for _, sub in d.children), default=0)
    return max((design_depth(p) for _, p in d.branches), default=0)


def is_slice(d: Design) -> bool:
    """True when every negative node answers at most one ramification."""
    if isinstance(d, (Omega, Daimon)):
        return True
    if isinstance(d, Proper):
        return all(is_slice(sub) for _, sub in d.children)
    return len(d.branches) <= 1 and all(is_slice(p) for _, p in d.branches)


# ---------------------------------------------------------------------------
# bases and typing


@dataclass(frozen=True)
class Base:
    """``left |- right``; a positive base has no left address."""

    left: Optional[Address]
    right: frozenset[Address]

    @property
    def polarity(self) -> str:
        return "-" if self.left is not None else "+"

    def __repr__(self) -> str:
        return format_base(self)


def positive_base(*addresses: Address) -> Base:
    return Base(None, frozenset(addresses))


def negative_base(left: Address, *addresses: Address) -> Base:
    return Base(left, frozenset(addresses))


def format_base(b: Base) -> str:
    rhs = " ".join(format_address(a) for a in sorted(b.right)) or "()"
    if b.left is None:
        return f"|- {rhs}" if b.right else "|-"
    lhs = format_address(b.left)
    return f"{lhs} |- {rhs}" if b.right else f"{lhs} |-"


def parse_base(text: str) -> Base:
    if "|-" not in text:
        raise DesignParseError("base needs a |- separator")
    lhs, rhs = text.split("|-", 1)
    rights = frozenset(parse_address(p) for p in rhs.split() if p != "()")
    lhs = lhs.strip()
    return Base(parse_address(lhs) if lhs else None, rights)


def base_errors(b: Base) -> list[str]:
    """Well-formedness: all base addresses pairwise disjoint."""
    errors: list[str] = []
    addresses = list(b.right) + ([b.left] if b.left is not None else [])
    for i, a in enumerate(addresses):
        for c in addresses[i + 1 :]:
            if not addresses_disjoint(a, c):
                errors.append(
                    f"addresses {format_address(a)} and {format_address(c)} overlap")
    return errors


def base_parity_warnings(b: Base) -> list[str]:
    """Advisory only: right addresses share a parity opposite to the left one."""
    warnings: list[str] = []
    lengths = {len(a) % 2 for a in b.right}
    if len(lengths) > 1:
        warnings.append("right-hand addresses mix parities")
    if b.left is not None and lengths and (len(b.left) % 2) in lengths:
        warnings.append("left-hand address shares parity with the right side")
    return warnings


@dataclass(frozen=True)
class Fail:
    """Failed base inference: which rule fired and where."""

    rule: str  # "affinity" | "base"
    detail: str

    def __repr__(self) -> str:
        return f"FAIL({self.rule}: {self.detail})"


InferenceResult = Union[Base, Fail]


def infer_base(d: Positive, context: Iterable[Address] = ()) -> InferenceResult:
    """Least base ``|- L`` with ``L`` containing ``context``, or a failure.

    Failures propagate from sub-designs unchanged; an affinity failure means
    two distinct biases of one positive action consumed a common address; a
    base failure means the collected addresses are not pairwise disjoint.
    """
    ctx = frozenset(context)
    if not pairwise_disjoint(ctx):
        raise DesignError("context addresses must be pairwise disjoint")
    return _infer_positive(d, ctx)


def _infer_positive(d: Positive, ctx: frozenset[Address]) -> InferenceResult:
    if isinstance(d, (Omega, Daimon)):
        return Base(None, ctx)
    extras_by_bias: dict[int, frozenset[Address]] = {}
    for bias, sub in d.children:
        union: frozenset[Address] = frozenset()
        for j, branch in sub.branches:
            opened = frozenset(sub.focus + (k,) for k in j)
            result = _infer_positive(branch, opened)
            if isinstance(result, Fail):
                return result  # propagation
            union |= result.right - opened
        extras_by_bias[bias] = union
    biases = sorted(extras_by_bias)
    for n, b1 in enumerate(biases):
        for b2 in biases[n + 1 :]:
            clash = extras_by_bias[b1] & extras_by_bias[b2]
            if clash:
                a = sorted(clash)[0]
                return Fail(
                    "affinity",
                    f"address {format_address(a)} used under biases {b1} and {b2} "
                    f"of the action on {format_address(d.focus)}")
    collected = frozenset({d.focus}) | (ctx - {d.focus})
    for union in extras_by_bias.values():
        collected |= union
    candidate = Base(None, collected)
    errors = base_errors(candidate)
    if errors:
        return Fail("base", f"at focus {format_address(d.focus)}: {errors[0]}")
    return candidate


def infer_base_negative(d: Negative, context: Iterable[Address] = ()) -> InferenceResult:
    """Least base ``focus |- L`` with ``L`` containing ``context``, or a failure."""
    ctx = frozenset(context)
    collected = frozenset(ctx)
    for j, branch in d.branches:
        opened = frozenset(d.focus + (k,) for k in j)
        result = _infer_positive(branch, opened)
        if isinstance(result, Fail):
            return result
        collected |= result.right - opened
    candidate = Base(d.focus, collected)
    errors = base_errors(candidate)
    if errors:
        return Fail("base", f"at focus {format_address(d.focus)}: {errors[0]}")
    return candidate


def check_design(d: Design, b: Base) -> bool:
    """True iff a typing derivation gives ``d`` the base ``b``."""
    if base_errors(b):
        return False
    if isinstance(d, Negative):
        if b.left is None or d.focus != b.left:
            return False
        result = infer_base_negative(d, b.right)
        return isinstance(result, Base) and result.right == b.right
    if b.left is not None:
        return False
    result = infer_base(d, b.right)
    return isinstance(result, Base) and result.right == b.right


# ---------------------------------------------------------------------------
# chronicles

END_DAIMON = "dai"
END_OMEGA = "omega"
END_CREATED = "omega-created"


@dataclass(frozen=True)
class ChAction:
    sign: str  # "+" or "-"
    focus: Address
    ramification: Ramification

    def dual(self) -> "ChAction":
        return ChAction("-" if self.sign == "+" else "+", self.focus,
                        self.ramification)

    def __repr__(self) -> str:
        return format_action(self)


@dataclass(frozen=True)
class Chronicle:
    """Alternating action sequence; ``end`` marks a daimon or omega tail."""

    actions: tuple[ChAction, ...]
    end: Optional[str] = None

    def __repr__(self) -> str:
        return format_chronicle(self)


def format_action(a: ChAction) -> str:
    return f"({a.sign} {format_address(a.focus)} {format_ramification(a.ramification)})"


def format_chronicle(c: Chronicle) -> str:
    parts = [format_action(a) for a in c.actions]
    if c.end is not None:
        parts.append(c.end)
    return " ".join(parts) if parts else "(empty)"


def chronicle_key(c: Chronicle) -> tuple:
    return (
        tuple((a.sign, a.focus, ram_key(a.ramification)) for a in c.actions),
        c.end or "",
    )


def action_of_positive(d: Proper) -> ChAction:
    return ChAction("+", d.focus, d.ramification)


def to_chronicles(d: Design) -> frozenset[Chronicle]:
    """The linear presentation: all action paths ending positively."""
    if isinstance(d, Omega):
        return frozenset()
    if isinstance(d, Daimon):
        return frozenset({Chronicle((), END_DAIMON)})
    if isinstance(d, Proper):
        head = action_of_positive(d)
        out = {Chronicle((head,), None)}
        for _, sub in d.children:
            for c in to_chronicles(sub):
                out.add(Chronicle((head,) + c.actions, c.end))
        return frozenset(out)
    out = set()
    for j, branchd in d.branches:
        head = ChAction("-", d.focus, j)
        for c in to_chronicles(branchd):
            out.add(Chronicle((head,) + c.actions, c.end))
    return frozenset(out)


def _chronicle_element_errors(c: Chronicle, polarity: str) -> Optional[str]:
    if c.end not in (None, END_DAIMON):
        return f"unexpected end marker {c.end!r}"
    sign = polarity
    for a in c.actions:
        if a.sign != sign:
            return f"signs do not alternate at {format_action(a)}"
        sign = "-" if sign == "+" else "+"
    if c.end is None:
        if not c.actions:
            return "empty chronicle"
        if c.actions[-1].sign != "+":
            return "chronicle must end with a positive action or the daimon"
    elif c.actions and c.actions[-1].sign == "+":
        return "the daimon marker fills a positive slot"
    return None


def from_chronicles(chronicles: Iterable[Chronicle], base: Base) -> Design:
    """Rebuild the design tree, validating the chronicle-set conditions.

    Raises :class:`ChronicleSetError` naming the violated condition:
    ``alternation``, ``prefix-closure``, ``coherence``, ``focalization``,
    ``subaddress`` or ``affinity``.
    """
    items = sorted(set(chronicles), key=chronicle_key)
    polarity = base.polarity
    for c in items:
        err = _chronicle_element_errors(c, polarity)
        if err:
            raise ChronicleSetError("alternation", f"{format_chronicle(c)}: {err}")

    positive_prefixes = set()
    for c in items:
        if c.end is None:
            positive_prefixes.add(c.actions)
    for c in items:
        for k in range(1, len(c.actions)):
            if c.actions[k - 1].sign == "+" and c.actions[:k] not in positive_prefixes:
                raise ChronicleSetError(
                    "prefix-closure",
                    f"missing positive prefix of {format_chronicle(c)}")

    for n, c1 in enumerate(items):
        for c2 in items[n + 1 :]:
            k = 0
            limit = min(len(c1.actions), len(c2.actions))
            while k < limit and c1.actions[k] == c2.actions[k]:
                k += 1
            diverges = (k < len(c1.actions) and k < len(c2.actions)) or (
                k == limit and len(c1.actions) == len(c2.actions)
                and c1.end != c2.end)
            if not diverges:
                continue
            if k < len(c1.actions) and k < len(c2.actions):
                a1, a2 = c1.actions[k], c2.actions[k]
                if a1.sign == "-" and a2.sign == "-":
                    continue
            raise ChronicleSetError(
                "coherence",
                f"{format_chronicle(c1)} and {format_chronicle(c2)} "
                "diverge at a positive point")

    for c in items:
        for k, a in enumerate(c.actions):
            if a.sign == "-":
                if k == 0:
                    if base.left is None or a.focus != base.left:
                        raise ChronicleSetError(
                            "focalization",
                            f"initial negative action {format_action(a)} must "
                            "sit on the base focus")
                    continue
                father = c.actions[k - 1]
                if (father.sign != "+" or len(a.focus) != len(father.focus) + 1
                        or a.focus[: len(father.focus)] != father.focus
                        or a.focus[-1] not in father.ramification):
                    raise ChronicleSetError(
                        "focalization",
                        f"{format_action(a)} is not justified by its father")
            else:
                if a.focus in base.right:
                    continue
                justified = False
                for earlier in c.actions[:k]:
                    if (earlier.sign == "-" and len(a.focus) == len(earlier.focus) + 1
                            and a.focus[: len(earlier.focus)] == earlier.focus
                            and a.focus[-1] in earlier.ramification):
                        justified = True
                        break
                if not justified:
                    raise ChronicleSetError(
                        "subaddress",
                        f"{format_action(a)} focuses an unopened address")

    if polarity == "+":
        design: Design = _rebuild_positive(items)
    else:
        design = _rebuild_negative(items, base.left)  # type: ignore[arg-type]

    if not check_design(design, base):
        # the structural conditions hold, so the leftover failure is affine
        raise ChronicleSetError("affinity", "rebuilt design does not type at the base")
    return design


def _rebuild_positive(items: list[Chronicle]) -> Positive:
    if not items:
        return OMEGA
    heads = {
        (c.actions[0] if c.actions else None) for c in items
    }
    if heads == {None}:
        return DAIMON
    if None in heads or len(heads) > 1:
        raise ChronicleSetError("coherence", "ambiguous first positive action")
    head = next(iter(heads))
    rests: dict[int, dict[Ramification, list[Chronicle]]] = {}
    for c in items:
        tail = c.actions[1:]
        if not tail and c.end is None:
            continue
        neg = tail[0] if tail else None
        if neg is None:
            raise ChronicleSetError("coherence", "daimon after a positive action")
        bias = neg.focus[-1]
        rests.setdefault(bias, {}).setdefault(neg.ramification, []).append(
            Chronicle(tail[1:], c.end))
    children: dict[int, Negative] = {}
    for bias in head.ramification:
        groups = rests.get(bias, {})
        focus = head.focus + (bias,)
        branches = {
            j: _rebuild_positive(sub) for j, sub in groups.items()
        }
        children[bias] = negative(focus, branches)
    return proper(head.focus, head.ramification, children)


def _rebuild_negative(items: list[Chronicle], focus: Address) -> Negative:
    groups: dict[Ramification, list[Chronicle]] = {}
    for c in items:
        first = c.actions[0]
        groups.setdefault(first.ramification, []).append(
            Chronicle(c.actions[1:], c.end))
    branches = {j: _rebuild_positive(sub) for j, sub in groups.items()}
    return negative(focus, branches)


# ---------------------------------------------------------------------------
# orderings

ORDERS = ("obs", "left", "right", "stable")


def compare(d1: Design, d2: Design, order: str = "obs") -> bool:
    """Ordering test between same-polarity designs.

    ``obs``    observational order: grow omegas and cut subtrees to daimon.
    ``left``   daimon-cutting half only.
    ``right``  omega-growing half only.
    ``stable`` chronicle-set inclusion (coincides with ``right``).
    """
    if order == "obs":
        return _obs(d1, d2, allow_omega=True, allow_daimon=True)
    if order == "left":
        return _obs(d1, d2, allow_omega=False, allow_daimon=True)
    if order == "right":
        return _obs(d1, d2, allow_omega=True, allow_daimon=False)
    if order == "stable":
        return to_chronicles(d1) <= to_chronicles(d2)
    raise DesignError(f"unknown order {order!r}")


def _obs(d1: Design, d2: Design, allow_omega: bool, allow_daimon: bool) -> bool:
    if allow_omega and isinstance(d1, Omega):
        return True
    if allow_daimon and isinstance(d2, Daimon):
        return True
    if isinstance(d1, (Omega, Daimon)) or isinstance(d2, (Omega, Daimon)):
        return type(d1) is type(d2)
    if isinstance(d1, Proper) and isinstance(d2, Proper):
        if d1.focus != d2.focus or d1.ramification != d2.ramification:
            return False
        return all(
            _obs(d1.child(i), d2.child(i), allow_omega, allow_daimon)
            for i in d1.ramification)
    if isinstance(d1, Negative) and isinstance(d2, Negative):
        if d1.focus != d2.focus:
            return False
        for j in d1.support | d2.support:
            if not _obs(d1.branch(j), d2.branch(j), allow_omega, allow_daimon):
                return False
        return True
    return False


def decompose(d1: Design, d2: Design) -> tuple[Design, Design]:
    """For ``d1`` obs-below ``d2``: the least/greatest midpoints.

    Returns ``(lo, hi)`` such that ``d1 <=left m <=right d2`` holds exactly for
    the designs ``m`` with ``lo <= m <= hi`` in the intersection order.
    """
    if not compare(d1, d2, "obs"):
        raise DesignError("decompose needs d1 obs-below d2")
    return _decompose(d1, d2)


def _decompose(d1: Design, d2: Design) -> tuple[Design, Design]:
    if isinstance(d1, Omega):
        if isinstance(d2, Daimon):
            return OMEGA, DAIMON
        return OMEGA, OMEGA
    if isinstance(d1, Daimon):
        return DAIMON, DAIMON
    if isinstance(d2, Daimon):
        return DAIMON, DAIMON
    if isinstance(d1, Proper) and isinstance(d2, Proper):
        lo_children: dict[int, Negative] = {}
        hi_children: dict[int, Negative] = {}
        for i in d1.ramification:
            lo, hi = _decompose(d1.child(i), d2.child(i))
            lo_children[i], hi_children[i] = lo, hi  # type: ignore[assignment]
        return (proper(d1.focus, d1.ramification, lo_children),
                proper(d1.focus, d1.ramification, hi_children))
    assert isinstance(d1, Negative) and isinstance(d2, Negative)
    lo_branches: dict[Ramification, Positive] = {}
    hi_branches: dict[Ramification, Positive] = {}
    for j in d1.support | d2.support:
        lo, hi = _decompose(d1.branch(j), d2.branch(j))
        lo_branches[j], hi_branches[j] = lo, hi  # type: ignore[assignment]
    return (negative(d1.focus, lo_branches), negative(d1.focus, hi_branches))


# ---------------------------------------------------------------------------
# named designs


def dai() -> Daimon:
    return DAIMON


def dai_minus(focus: Address, alphabet: Iterable[Ramification]) -> Negative:
    """Negative design answering every alphabet ramification with the daimon."""
    return negative(focus, {frozenset(j): DAIMON for j in alphabet})


def skunk(focus: Address) -> Negative:
    """The negative design that never answers."""
    return negative(focus, {})


def skunk_plus(focus: Address, ramification: Iterable[int]) -> Proper:
    """One positive action, then silence at every opened address."""
    ram = frozenset(ramification)
    return proper(focus, ram, {i: skunk(focus + (i,)) for i in ram})


def ram_design(focus: Address, ramification: Iterable[int],
               alphabet: Iterable[Ramification]) -> Proper:
    """One positive action, then the daimon at every opened address."""
    ram = frozenset(ramification)
    alphabet = tuple(alphabet)
    return proper(focus, ram,
                  {i: dai_minus(focus + (i,), alphabet) for i in ram})


def directory_design(ramifications: Iterable[Ramification],
                     focus: Address = EMPTY_ADDRESS) -> Negative:
    """Negative design accepting exactly the listed ramifications."""
    return negative(focus, {frozenset(j): DAIMON for j in ramifications})


def fax(left_focus: Address, right_focus: Address,
        alphabet: Iterable[Ramification], depth: int) -> Negative:
    """Finite copycat approximant between two addresses.

    Echoes each probed ramification from ``left_focus`` onto ``right_focus``
    and recurses with the two sides swapped, ``depth`` negative layers deep.
    """
    alphabet = tuple(frozenset(j) for j in alphabet)
    if depth <= 0:
        return skunk(left_focus)
    branches: dict[Ramification, Positive] = {}
    for j in alphabet:
        children = {
            i: fax(right_focus + (i,), left_focus + (i,), alphabet, depth - 1)
            for i in j
        }
        branches[j] = proper(right_focus, j, children)
    return negative(left_focus, branches)


@dataclass(frozen=True)
class DesignGenerator:
    """Self-referential design given by bounded unfolding.

    ``approximant(depth)`` values form a chain in the stable order.
    """

    expand: Callable[[int], Design]

    def approximant(self, depth: int) -> Design:
        return self.expand(depth)


def fax_generator(left_focus: Address, right_focus: Address,
                  alphabet: Iterable[Ramification]) -> DesignGenerator:
    alphabet = tuple(frozenset(j) for j in alphabet)
    return DesignGenerator(lambda d: fax(left_focus, right_focus, alphabet, d))


# ---------------------------------------------------------------------------
# sub-designs and intersections


def sub_positives(d: Positive) -> Iterator[Positive]:
    """All stable-order predecessors of ``d`` (omega included)."""
    yield OMEGA
    if isinstance(d, Omega):
        return
    if isinstance(d, Daimon):
        yield DAIMON
        return
    child_lists = []
    for i, sub in d.children:
        child_lists.append((i, list(sub_negatives(sub))))
    for combo in _product(child_lists):
        yield proper(d.focus, d.ramification, dict(combo))


def sub_negatives(d: Negative) -> Iterator[Negative]:
    branch_lists = []
    for j, sub in d.branches:
        branch_lists.append((j, list(sub_positives(sub))))
    for combo in _product(branch_lists):
        yield negative(d.focus, dict(combo))


def _product(keyed_lists):
    if not keyed_lists:
        yield []
        return
    key, options = keyed_lists[0]
    for rest in _product(keyed_lists[1:]):
        for option in options:
            yield [(key, option)] + rest


def sub_designs(d: Design) -> Iterator[Design]:
    if isinstance(d, Negative):
        return sub_negatives(d)
    return sub_positives(d)


def design_intersection(d1: Design, d2: Design) -> Design:
    """Meet in the stable order (intersection of chronicle sets)."""
    if isinstance(d1, Negative) != isinstance(d2, Negative):
        raise DesignError("cannot intersect designs of opposite polarities")
    if isinstance(d1, Negative) and isinstance(d2, Negative):
        if d1.focus != d2.focus:
            raise DesignError("cannot intersect negatives on distinct foci")
        branches = {
            j: design_intersection(d1.branch(j), d2.branch(j))
            for j in d1.support & d2.support
        }
        return negative(d1.focus, branches)
    if isinstance(d1, Daimon) and isinstance(d2, Daimon):
        return DAIMON
    if (isinstance(d1, Proper) and isinstance(d2, Proper)
            and d1.focus == d2.focus and d1.ramification == d2.ramification):
        children = {
            i: design_intersection(d1.child(i), d2.child(i))
            for i in d1.ramification
        }
        return proper(d1.focus, d1.ramification, children)
    return OMEGA


def design_union(d1: Design, d2: Design) -> Design:
    """Join in the stable order; defined when the chronicle union is a design."""
    if isinstance(d1, Negative) and isinstance(d2, Negative):
        if d1.focus != d2.focus:
            raise DesignError("cannot join negatives on distinct foci")
        branches: dict[Ramification, Positive] = {}
        for j in d1.support | d2.support:
            branches[j] = design_union(d1.branch(j), d2.branch(j))  # type: ignore[assignment]
        return negative(d1.focus, branches)
    if isinstance(d1, Omega):
        return d2
    if isinstance(d2, Omega):
        return d1
    if isinstance(d1, Daimon) and isinstance(d2, Daimon):
        return DAIMON
    if (isinstance(d1, Proper) and isinstance(d2, Proper)
            and d1.focus == d2.focus and d1.ramification == d2.ramification):
        children = {
            i: design_union(d1.child(i), d2.child(i)) for i in d1.ramification
        }
        return proper(d1.focus, d1.ramification, children)
    raise DesignError("chronicle union is not deterministic")


# ---------------------------------------------------------------------------
# text format


def format_design(d: Design) -> str:
    if isinstance(d, Omega):
        return "omega"
    if isinstance(d, Daimon):
        return "dai"
    if isinstance(d, Proper):
        parts = [
            "(+", format_address(d.focus), format_ramification(d.ramification)
        ]
        parts.extend(format_design(sub) for _, sub in d.children)
        return " ".join(parts) + ")"
    parts = ["(-", format_address(d.focus)]
    for j, sub in d.branches:
        parts.append(f"({format_ramification(j)} -> {format_design(sub)})")
    return " ".join(parts) + ")"


def _tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in "(){}":
            tokens.append((ch, line, col))
            i += 1
            col += 1
            continue
        if text.startswith("->", i):
            tokens.append(("->", line, col))
            i += 2
            col += 2
            continue
        j = i
        while j < len(text) and not text[j].isspace() and text[j] not in "(){}":
            if text.startswith("->", j):
                break
            j += 1
        tokens.append((text[i:j], line, col))
        col += j - i
        i = j
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[tuple[str, int, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def next(self, expect: Optional[str] = None) -> str:
        if self.pos >= len(self.tokens):
            raise DesignParseError("unexpected end of input")
        tok, line, col = self.tokens[self.pos]
        if expect is not None and tok != expect:
            raise DesignParseError(f"expected {expect!r}, found {tok!r}", line, col)
        self.pos += 1
        return tok

    def error(self, message: str):
        if self.pos < len(self.tokens):
            _, line, col = self.tokens[self.pos]
        else:
            line, col = 1, 1
        raise DesignParseError(message, line, col)


def parse_design(text: str) -> Design:
    stream = _TokenStream(_tokenize(text))
    design = _parse_design(stream)
    if stream.peek() is not None:
        stream.error("trailing input after design")
    return design


def _parse_ram(stream: _TokenStream) -> Ramification:
    stream.next("{")
    items = []
    while stream.peek() != "}":
        tok = stream.next()
        try:
            items.append(int(tok))
        except ValueError:
            stream.error(f"bad bias {tok!r}")
    stream.next("}")
    return frozenset(items)


def _parse_design(stream: _TokenStream) -> Design:
    tok = stream.peek()
    if tok == "dai":
        stream.next()
        return DAIMON
    if tok == "omega":
        stream.next()
        return OMEGA
    if tok != "(":
        stream.error(f"expected a design, found {tok!r}")
    stream.next("(")
    head = stream.next()
    if head == "+":
        focus = parse_address(stream.next())
        ram = _parse_ram(stream)
        children: dict[int, Negative] = {}
        while stream.peek() != ")":
            sub = _parse_design(stream)
            if not isinstance(sub, Negative):
                stream.error("positive actions take negative children")
            if not sub.focus or sub.focus[:-1] != focus:
                stream.error("child focus must extend the action focus")
            children[sub.focus[-1]] = sub
        stream.next(")")
        missing = frozenset(ram) - set(children)
        for i in missing:
            children[i] = skunk(focus + (i,))
        if set(children) != set(ram):
            stream.error("children must be keyed by the ramification")
        return proper(focus, ram, children)
    if head == "-":
        focus = parse_address(stream.next())
        branches: dict[Ramification, Positive] = {}
        while stream.peek() != ")":
            stream.next("(")
            j = _parse_ram(stream)
            stream.next("->")
            sub = _parse_design(stream)
            if isinstance(sub, Negative):
                stream.error("branches carry positive designs")
            stream.next(")")
            if j in branches:
                stream.error(f"duplicate branch {format_ramification(j)}")
            branches[j] = sub
        stream.next(")")
        return negative(focus, branches)
    stream.error(f"expected + or -, found {head!r}")
    raise AssertionError  # unreachable


# ---------------------------------------------------------------------------
# random generation (seeded, affine by construction)


def random_positive_design(rng: random.Random, available: Iterable[Address],
                           alphabet: Iterable[Ramification], depth: int,
                           daimon_weight: float = 0.25,
                           omega_weight: float = 0.15) -> Positive:
    """Random typable positive design using a subset of ``available`` foci.

    Affinity holds by construction: sibling biases receive disjoint slices of
    the leftover context.
    """
    available = list(available)
    alphabet = [frozenset(j) for j in alphabet]
    roll = rng.random()
    if depth <= 0 or not available or not alphabet or roll < daimon_weight:
        return DAIMON if (depth <= 0 or not available or not alphabet
                          or rng.random() < 0.7) else OMEGA
    if roll < daimon_weight + omega_weight:
        return OMEGA
    focus = rng.choice(available)
    ram = rng.choice(alphabet)
    leftovers = [a for a in available if a != focus]
    shares: dict[int, list[Address]] = {i: [] for i in ram}
    for a in leftovers:
        choices = [None] + list(ram)
        pick = rng.choice(choices)
        if pick is not None:
            shares[pick].append(a)
    children: dict[int, Negative] = {}
    for i in ram:
        branches: dict[Ramification, Positive] = {}
        for j in alphabet:
            if rng.random() < 0.6:
                opened = [focus + (i, k) for k in j]
                branches[j] = random_positive_design(
                    rng, opened + shares[i], alphabet, depth - 1,
                    daimon_weight, omega_weight)
        children[i] = negative(focus + (i,), branches)
    return proper(focus, ram, children)


def random_negative_design(rng: random.Random, focus: Address,
                           alphabet: Iterable[Ramification], depth: int,
                           daimon_weight: float = 0.25,
                           omega_weight: float = 0.15,
                           extra: Iterable[Address] = ()) -> Negative:
    alphabet = [frozenset(j) for j in alphabet]
    extra = list(extra)
    branches: dict[Ramification, Positive] = {}
    for j in alphabet:
        if rng.random() < 0.7:
            opened = [focus + (k,) for k in j] + extra
            branches[j] = random_positive_design(
                rng, opened, alphabet, depth - 1, daimon_weight, omega_weight)
    return negative(focus, branches)
