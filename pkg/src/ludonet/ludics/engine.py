"""Normalization engines for interactive designs.

Weak head reduction on cut nets, bounded strong normalization, a token
walk over action occurrences, orthogonality, views, and separating
counter-designs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from ..graphs import Graph
from .designs import (
    DAIMON,
    EMPTY_ADDRESS,
    END_CREATED,
    END_DAIMON,
    END_OMEGA,
    OMEGA,
    Address,
    Base,
    ChAction,
    Chronicle,
    Daimon,
    Design,
    DesignError,
    Fail,
    Negative,
    Omega,
    Positive,
    Proper,
    Ramification,
    action_of_positive,
    addresses_disjoint,
    check_design,
    chronicle_key,
    compare,
    design_size,
    format_address,
    format_base,
    format_chronicle,
    format_design,
    format_ramification,
    from_chronicles,
    infer_base,
    infer_base_negative,
    is_positive,
    negative,
    negative_base,
    positive_base,
    proper,
    ram_key,
    random_negative_design,
    random_positive_design,
    skunk,
)


class EngineError(DesignError):
    """Raised when a net or a machine is used outside its contract."""


# ---------------------------------------------------------------------------
# Cut nets


@dataclass(frozen=True)
class Net:
    """A principal positive design with a pool of negative partners."""

    principal: Positive
    partners: tuple[Negative, ...] = ()

    def __post_init__(self) -> None:
        if not is_positive(self.principal):
            raise EngineError("the principal design of a net must be positive")
        for p in self.partners:
            if not isinstance(p, Negative):
                raise EngineError("net partners must be negative designs")


@dataclass(frozen=True)
class NetReport:
    """Validation verdict for a net.

    ``bases`` lists the least inferred base of every component, principal
    first.  ``net_type`` collects the uncut free addresses of the component
    the principal design can actually reach; partners outside it are
    listed in ``unreachable``.
    """

    ok: bool
    errors: tuple[str, ...]
    bases: tuple[Base, ...]
    net_type: Optional[frozenset[Address]]
    cuts: tuple[Address, ...]
    reachable: tuple[int, ...]
    unreachable: tuple[int, ...]


def validate_net(net: Net) -> NetReport:
    """Check the wiring conditions on a net and compute its type."""
    errors: list[str] = []
    bases: list[Base] = []

    inferred = infer_base(net.principal)
    if isinstance(inferred, Fail):
        errors.append("principal design is untypable: %s rule fails (%s)"
                      % (inferred.rule, inferred.detail))
    else:
        bases.append(inferred)
    for k, partner in enumerate(net.partners):
        got = infer_base_negative(partner)
        if isinstance(got, Fail):
            errors.append("partner %d is untypable: %s rule fails (%s)"
                          % (k, got.rule, got.detail))
        else:
            bases.append(got)
    if errors:
        return NetReport(False, tuple(errors), (), None, (), (), ())

    # component 0 is the principal design, component k+1 is partner k
    occurrences: dict[Address, list[tuple[int, str]]] = {}
    for addr in bases[0].right:
        occurrences.setdefault(addr, []).append((0, "right"))
    for comp, base in enumerate(bases[1:], start=1):
        occurrences.setdefault(base.left, []).append((comp, "left"))
        for addr in base.right:
            occurrences.setdefault(addr, []).append((comp, "right"))

    addrs = sorted(occurrences)
    for a, b in itertools.combinations(addrs, 2):
        if not addresses_disjoint(a, b):
            errors.append("base addresses %s and %s overlap"
                          % (format_address(a), format_address(b)))

    cuts: list[Address] = []
    cut_edges: list[tuple[int, int]] = []
    for addr in addrs:
        occ = occurrences[addr]
        if len(occ) > 2:
            errors.append("address %s appears %d times across the bases"
                          % (format_address(addr), len(occ)))
        elif len(occ) == 2:
            sides = {side for _, side in occ}
            if sides != {"left", "right"}:
                errors.append("address %s is shared by two %s sides"
                              % (format_address(addr), occ[0][1]))
            else:
                cuts.append(addr)
                cut_edges.append((occ[0][0], occ[1][0]))

    graph = Graph()
    for comp in range(len(bases)):
        graph.add_vertex(comp)
    for a, b in cut_edges:
        graph.add_edge(a, b)
    cycle = graph.find_cycle()
    if cycle is not None:
        errors.append("cut graph has a cycle through components %s"
                      % " ".join(str(v) for v in cycle))

    reach = {0}
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for u in graph.neighbors(v):
            if u not in reach:
                reach.add(u)
                frontier.append(u)
    reachable = tuple(k for k in range(len(net.partners)) if k + 1 in reach)
    unreachable = tuple(k for k in range(len(net.partners)) if k + 1 not in reach)
    cut_set = set(cuts)
    net_type = frozenset(addr for comp in sorted(reach)
                         for addr in bases[comp].right if addr not in cut_set)
    return NetReport(not errors, tuple(errors), tuple(bases),
                     net_type if not errors else None,
                     tuple(cuts), reachable, unreachable)


# ---------------------------------------------------------------------------
# Weak head reduction


@dataclass(frozen=True)
class MachineState:
    """Current head design against the pool of pending partners."""

    positive: Positive
    partners: tuple[Negative, ...]

    def partner_for(self, focus: Address) -> Optional[Negative]:
        for p in self.partners:
            if p.focus == focus:
                return p
        return None


@dataclass(frozen=True)
class Outcome:
    """Verdict of a weak run.

    ``kind`` is one of ``daimon``, ``omega`` (the head met a missing
    branch), ``omega-created`` (fuel ran out), or ``head`` (the head
    action is free; ``residual`` can resume the run after a choice).
    """

    kind: str
    focus: Optional[Address] = None
    ramification: Optional[Ramification] = None
    residual: Optional[MachineState] = None


@dataclass(frozen=True)
class RunResult:
    outcome: Outcome
    steps: int
    trace: tuple[MachineState, ...]


def make_state(net: Net) -> MachineState:
    return MachineState(net.principal, tuple(net.partners))


def sufficient_fuel(start: Union[Net, MachineState]) -> int:
    """Enough steps to exhaust any interaction between finite designs.

    Every step consumes one head action for good, so the total action
    count bounds the run length.
    """
    state = make_state(start) if isinstance(start, Net) else start
    return design_size(state.positive) + sum(
        design_size(p) for p in state.partners) + 1


def _state_type(state: MachineState) -> Optional[frozenset[Address]]:
    report = validate_net(Net(state.positive, state.partners))
    return report.net_type if report.ok else None


def weak_run(start: Union[Net, MachineState], fuel: Optional[int] = None,
             debug: bool = False) -> RunResult:
    """Iterate the head interaction step until a verdict.

    ``fuel`` bounds the number of steps; running out yields an
    ``omega-created`` outcome.  ``debug`` revalidates the state after
    every step and checks that its type never grows.
    """
    state = make_state(start) if isinstance(start, Net) else start
    if fuel is None:
        fuel = sufficient_fuel(state)
    previous_type = _state_type(state) if debug else None
    if debug and previous_type is None:
        raise EngineError("debug run started from an invalid state")
    trace = [state]
    steps = 0
    while True:
        head = state.positive
        if isinstance(head, Daimon):
            outcome = Outcome("daimon")
            break
        if isinstance(head, Omega):
            outcome = Outcome("omega")
            break
        partner = state.partner_for(head.focus)
        if partner is None:
            outcome = Outcome("head", head.focus, head.ramification, state)
            break
        if steps >= fuel:
            outcome = Outcome("omega-created")
            break
        continuation = partner.branch(head.ramification)
        pool = tuple(n for _, n in head.children) + tuple(
            p for p in state.partners if p is not partner)
        state = MachineState(continuation, pool)
        steps += 1
        trace.append(state)
        if debug:
            current = _state_type(state)
            if current is None:
                raise EngineError("interaction step left an invalid state")
            if not current <= previous_type:
                raise EngineError(
                    "interaction step grew the net type from %s to %s"
                    % (sorted(map(format_address, previous_type)),
                       sorted(map(format_address, current))))
            previous_type = current
    return RunResult(outcome, steps, tuple(trace))


def format_state(state: MachineState) -> str:
    pool = ", ".join(format_address(p.focus) for p in state.partners)
    return "%s | %s" % (format_design(state.positive), pool or "-")


# ---------------------------------------------------------------------------
# Strong normalization over a finite frontier


def strong_normalize(net: Net, alphabet: Iterable[Ramification],
                     depth: Optional[int] = None,
                     fuel: Optional[int] = None) -> frozenset[Chronicle]:
    """Normal form of a net as a set of tagged chronicles.

    Every free head action is recorded and then resumed against each
    choice of son and ramification from ``alphabet``; ``depth`` bounds the
    number of head actions a single chronicle may collect.  Leaves keep
    the distinction between meeting the daimon, running into a missing
    branch, and running out of fuel.
    """
    if depth is not None and depth < 1:
        raise EngineError("the exploration depth must be at least 1")
    offered = sorted({frozenset(j) for j in alphabet}, key=ram_key)
    entries: set[Chronicle] = set()
    stack: list[tuple[tuple[ChAction, ...], MachineState, Optional[int]]] = [
        ((), make_state(net), depth)]
    while stack:
        prefix, state, budget = stack.pop()
        result = weak_run(state, fuel=fuel)
        kind = result.outcome.kind
        if kind == "daimon":
            entries.add(Chronicle(prefix, END_DAIMON))
        elif kind == "omega":
            entries.add(Chronicle(prefix, END_OMEGA))
        elif kind == "omega-created":
            entries.add(Chronicle(prefix, END_CREATED))
        else:
            focus = result.outcome.focus
            head = ChAction("+", focus, result.outcome.ramification)
            entries.add(Chronicle(prefix + (head,), None))
            residual = result.outcome.residual
            if budget is None or budget > 1:
                nested = None if budget is None else budget - 1
                for i in sorted(result.outcome.ramification):
                    child = residual.positive.child(i)
                    for j in offered:
                        follow = ChAction("-", focus + (i,), j)
                        stack.append((prefix + (head, follow),
                                      MachineState(child.branch(j),
                                                   residual.partners),
                                      nested))
    return frozenset(entries)


def normal_form_to_design(entries: Iterable[Chronicle], base: Base) -> Design:
    """Forget the omega leaves and rebuild the design the entries draw."""
    kept = [c for c in entries if c.end not in (END_OMEGA, END_CREATED)]
    return from_chronicles(kept, base)


def normal_form_strings(entries: Iterable[Chronicle]) -> list[str]:
    return [format_chronicle(c) for c in sorted(entries, key=chronicle_key)]


# ---------------------------------------------------------------------------
# Orthogonality


def orthogonal(design: Positive, partners: Iterable[Negative],
               fuel: Optional[int] = None) -> bool:
    """Whether the closed interaction against the pool meets the daimon.

    The pool must close the design: partner foci are pairwise distinct,
    none carries free addresses, and the design checks against the base
    they span.
    """
    pool = tuple(partners)
    foci = []
    for p in pool:
        got = infer_base_negative(p)
        if isinstance(got, Fail):
            raise EngineError("orthogonality needs typable partners: %s rule "
                              "fails (%s)" % (got.rule, got.detail))
        if got.right:
            raise EngineError(
                "partner on %s carries free addresses %s"
                % (format_address(p.focus),
                   " ".join(sorted(map(format_address, got.right)))))
        foci.append(p.focus)
    if len(set(foci)) != len(foci):
        raise EngineError("two partners test the same address")
    base = positive_base(*foci)
    if not check_design(design, base):
        raise EngineError("base mismatch: the design does not check against %s"
                          % format_base(base))
    result = weak_run(MachineState(design, pool), fuel=fuel)
    if result.outcome.kind == "head":
        raise EngineError("closed interaction reached a free head action")
    return result.outcome.kind == "daimon"


# ---------------------------------------------------------------------------
# Token walk over action occurrences

Atom = Union[int, str, Ramification]
Occurrence = tuple[Atom, ...]
Position = tuple[str, Occurrence]


@dataclass(frozen=True)
class TokenRun:
    """Full record of a token walk across a single closed cut.

    ``pullback_left`` and ``pullback_right`` restrict the two designs to
    the actions the token visited.
    """

    outcome: str
    trace: tuple[Position, ...]
    bindings: tuple[tuple[Position, Position], ...]
    visited_left: frozenset[Occurrence]
    visited_right: frozenset[Occurrence]
    pullback_left: Positive
    pullback_right: Negative


def format_occurrence(occ: Occurrence) -> str:
    parts = []
    for atom in occ:
        if isinstance(atom, frozenset):
            parts.append(format_ramification(atom))
        else:
            parts.append(str(atom))
    return ".".join(parts) if parts else "e"


def format_position(pos: Position) -> str:
    return "%s:%s" % (pos[0], format_occurrence(pos[1]))


def _resolve(root: Design, occ: Occurrence, negative_root: bool):
    """The syntax under an occurrence: a positive node or a branch action.

    Unstored branches resolve like stored ones; their sons are omegas.
    """
    if negative_root:
        if not occ:
            raise EngineError("the right root carries no occurrence")
        j = occ[0]
        if len(occ) == 1:
            return ("neg", root.focus, j)
        pos = root.branch(j)
        k = 2
    else:
        pos = root
        k = 0
    while k < len(occ):
        child = pos.child(occ[k])
        j = occ[k + 1]
        if k + 2 == len(occ):
            return ("neg", child.focus, j)
        pos = child.branch(j)
        k += 3
    return ("pos", pos)


def _negative_ancestors(root: Design, occ: Occurrence,
                        negative_root: bool) -> list[tuple[Occurrence, Address]]:
    """Branch-action occurrences above ``occ``, outermost first."""
    out: list[tuple[Occurrence, Address]] = []
    if negative_root:
        if not occ:
            return out
        out.append((occ[:1], root.focus))
        if len(occ) == 1:
            return out
        pos = root.branch(occ[0])
        k = 2
    else:
        pos = root
        k = 0
    while k + 2 <= len(occ):
        child = pos.child(occ[k])
        out.append((occ[:k + 2], child.focus))
        if k + 3 > len(occ):
            break
        pos = child.branch(occ[k + 1])
        k += 3
    return out


def _restrict_positive(node: Positive, occ: Occurrence,
                       visited) -> Positive:
    if occ not in visited:
        return OMEGA
    if isinstance(node, (Omega, Daimon)):
        return node
    children = {}
    for i, child in node.children:
        kept = {}
        for j, sub in child.branches:
            if occ + (i, j) in visited:
                kept[j] = _restrict_positive(sub, occ + (i, j, "1"), visited)
        children[i] = negative(child.focus, kept)
    return proper(node.focus, node.ramification, children)


def _restrict_partner(root: Negative, visited) -> Negative:
    kept = {}
    for j, sub in root.branches:
        if (j,) in visited:
            kept[j] = _restrict_positive(sub, (j, "1"), visited)
    return negative(root.focus, kept)


def token_run(design: Positive, partner: Negative) -> TokenRun:
    """Walk a single closed cut one action occurrence at a time.

    The token starts on the left root, switches sides through the
    bindings it lays down, and must never revisit a position.
    """
    inferred = infer_base(design)
    if isinstance(inferred, Fail) or not inferred.right <= {partner.focus}:
        raise EngineError("the token walk needs a single closed cut")
    got = infer_base_negative(partner)
    if isinstance(got, Fail) or got.right:
        raise EngineError("the token walk needs a single closed cut")

    roots = {"L": design, "R": partner}
    visited: dict[str, dict[Occurrence, None]] = {"L": {}, "R": {}}
    bind_map: dict[Position, Position] = {}
    bindings: list[tuple[Position, Position]] = []
    trace: list[Position] = []
    side: str = "L"
    occ: Occurrence = ()
    outcome: Optional[str] = None
    while outcome is None:
        pos = (side, occ)
        if occ in visited[side]:
            raise EngineError("token revisited %s" % format_position(pos))
        visited[side][occ] = None
        trace.append(pos)
        resolved = _resolve(roots[side], occ, side == "R")
        if resolved[0] == "neg":
            occ = occ + ("1",)
            continue
        node = resolved[1]
        if isinstance(node, Daimon):
            outcome = "daimon"
            break
        if isinstance(node, Omega):
            outcome = "omega"
            break
        if side == "L" and occ == ():
            target: Position = ("R", (node.ramification,))
        else:
            anchor = None
            wanted = node.focus[:-1]
            for anc, anc_focus in reversed(
                    _negative_ancestors(roots[side], occ, side == "R")):
                if anc_focus == wanted:
                    anchor = anc
                    break
            if anchor is None:
                raise EngineError("no pointer for the action on %s"
                                  % format_address(node.focus))
            other = bind_map.get((side, anchor))
            if other is None:
                raise EngineError("pointer at %s is not bound yet"
                                  % format_position((side, anchor)))
            target = (other[0],
                      other[1] + (node.focus[-1], node.ramification))
        if pos in bind_map or target in bind_map:
            raise EngineError("binding slot already occupied")
        bind_map[pos] = target
        bind_map[target] = pos
        bindings.append((pos, target))
        side, occ = target

    left = frozenset(visited["L"])
    right = frozenset(visited["R"])
    return TokenRun(outcome, tuple(trace), tuple(bindings), left, right,
                    _restrict_positive(design, (), visited["L"]),
                    _restrict_partner(partner, visited["R"]))


# ---------------------------------------------------------------------------
# Views, tight counter-designs, separation


def view_actions(actions: Sequence[ChAction]) -> tuple[ChAction, ...]:
    """The opponent's reading of a chronicle.

    Branch actions append their dual; head actions restart from the view
    of their pointer, or from scratch when the base justifies them.
    """
    def walk(k: int) -> list[ChAction]:
        if k == 0:
            return []
        a = actions[k - 1]
        if a.sign == "-":
            return walk(k - 1) + [a.dual()]
        for m in range(k - 2, -1, -1):
            b = actions[m]
            if (b.sign == "-" and b.focus == a.focus[:-1]
                    and a.focus[-1] in b.ramification):
                return walk(m + 1) + [a.dual()]
        return [a.dual()]

    return tuple(walk(len(actions)))


def opp(r: Chronicle) -> Design:
    """The tightest counter-design engaging exactly the moves of ``r``.

    It follows the chronicle and concedes right after its last head
    action; everywhere off the path it gives up silently.
    """
    actions = r.actions
    if not actions:
        raise EngineError("an empty chronicle does not pin a counter-design")
    elements = []
    for k in range(1, len(actions) + 1):
        v = view_actions(actions[:k])
        if v[-1].sign == "+":
            elements.append(Chronicle(v, None))
    if actions[-1].sign == "+":
        elements.append(Chronicle(view_actions(actions), END_DAIMON))
    first = actions[0]
    base = negative_base(first.focus) if first.sign == "+" \
        else positive_base(first.focus)
    return from_chronicles(elements, base)


def chronicle_design(r: Chronicle) -> Design:
    """The least design whose chronicle set contains ``r``."""
    if not r.actions:
        return DAIMON if r.end == END_DAIMON else OMEGA
    elements = []
    for k in range(1, len(r.actions) + 1):
        if r.actions[k - 1].sign == "+":
            elements.append(Chronicle(r.actions[:k], None))
    if r.end == END_DAIMON:
        elements.append(r)
    opened: set[Address] = set()
    rights: set[Address] = set()
    for a in r.actions:
        if a.sign == "-":
            opened.update(a.focus + (i,) for i in a.ramification)
        elif a.focus not in opened:
            rights.add(a.focus)
    first = r.actions[0]
    if first.sign == "+":
        base = positive_base(*sorted(rights))
    else:
        base = negative_base(first.focus, *sorted(rights))
    return from_chronicles(elements, base)


def _diverge_pos(p1: Positive, p2: Positive, path: list[ChAction]):
    if isinstance(p1, Omega) or isinstance(p2, Daimon):
        return None
    if isinstance(p1, Daimon):
        return ("daimon", list(path))
    a = action_of_positive(p1)
    if (not isinstance(p2, Proper) or p2.focus != p1.focus
            or p2.ramification != p1.ramification):
        return ("action", list(path) + [a])
    for i in sorted(p1.ramification):
        c1 = p1.child(i)
        c2 = p2.child(i)
        support = {j for j, _ in c1.branches} | {j for j, _ in c2.branches}
        for j in sorted(support, key=ram_key):
            found = _diverge_pos(c1.branch(j), c2.branch(j),
                                 path + [a, ChAction("-", c1.focus, j)])
            if found is not None:
                return found
    return None


def _first_divergence(d1: Design, d2: Design):
    if isinstance(d1, Negative):
        support = {j for j, _ in d1.branches} | {j for j, _ in d2.branches}
        for j in sorted(support, key=ram_key):
            found = _diverge_pos(d1.branch(j), d2.branch(j),
                                 [ChAction("-", d1.focus, j)])
            if found is not None:
                return found
        return None
    return _diverge_pos(d1, d2, [])


def separation_witness(d1: Design, d2: Design,
                       base_focus: Address = EMPTY_ADDRESS) -> Optional[Design]:
    """A counter-design converging with ``d1`` but not with ``d2``.

    Returns None when ``d1`` observationally sits below ``d2``, so no
    counter-design can tell them apart in that order.  Works on a single
    closed address on either side; ``base_focus`` names it when neither
    design plays an action.
    """
    if is_positive(d1) != is_positive(d2):
        raise EngineError("separation compares designs of one polarity")
    if is_positive(d1):
        rights: set[Address] = set()
        for d in (d1, d2):
            got = infer_base(d)
            if isinstance(got, Fail):
                raise EngineError("separation needs typable designs: %s rule "
                                  "fails (%s)" % (got.rule, got.detail))
            rights |= got.right
        if len(rights) > 1:
            raise EngineError("separation needs a single-address base")
        if rights:
            base_focus = next(iter(rights))
    else:
        if d1.focus != d2.focus:
            raise EngineError("separation compares designs on one base")
        for d in (d1, d2):
            got = infer_base_negative(d)
            if isinstance(got, Fail):
                raise EngineError("separation needs typable designs: %s rule "
                                  "fails (%s)" % (got.rule, got.detail))
            if got.right:
                raise EngineError("separation needs closed negative designs")

    if compare(d1, d2, "obs"):
        return None
    found = _first_divergence(d1, d2)
    if found is None:
        raise EngineError("designs compare unrelated yet never diverge")
    _, path = found
    witness = skunk(base_focus) if not path else opp(Chronicle(tuple(path)))
    if is_positive(d1):
        meets, avoids = orthogonal(d1, (witness,)), orthogonal(d2, (witness,))
    else:
        meets, avoids = orthogonal(witness, (d1,)), orthogonal(witness, (d2,))
    if not meets or avoids:
        raise EngineError("separating counter-design failed its own check")
    return witness


# ---------------------------------------------------------------------------
# Random nets


def random_closed_net(rng: random.Random, alphabet: Iterable[Ramification],
                      depth: int = 3) -> Net:
    """A single-cut closed net for exercising the machines."""
    alphabet = [frozenset(j) for j in alphabet]
    cut = (rng.randrange(3),)
    head = random_positive_design(rng, [cut], alphabet, depth,
                                  daimon_weight=0.2, omega_weight=0.1)
    partner = random_negative_design(rng, cut, alphabet, depth,
                                     daimon_weight=0.45, omega_weight=0.1)
    return Net(head, (partner,))


def random_chained_net(rng: random.Random, alphabet: Iterable[Ramification],
                       depth: int = 3) -> Net:
    """Principal over two addresses, partners chained through a third.

    The first partner may mention the third address freely, so closing it
    takes the whole pool.
    """
    alphabet = [frozenset(j) for j in alphabet]
    a, b, c = (0,), (1,), (2,)
    head = random_positive_design(rng, [a, b], alphabet, depth,
                                  daimon_weight=0.2, omega_weight=0.1)
    first = random_negative_design(rng, a, alphabet, depth,
                                   daimon_weight=0.3, omega_weight=0.1,
                                   extra=[c])
    second = random_negative_design(rng, b, alphabet, depth,
                                    daimon_weight=0.3, omega_weight=0.1)
    third = random_negative_design(rng, c, alphabet, depth,
                                   daimon_weight=0.3, omega_weight=0.1)
    return Net(head, (first, second, third))
