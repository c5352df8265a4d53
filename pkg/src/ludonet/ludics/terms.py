"""Variable syntax for designs and the environment machine.

Designs translate to a calculus of named calls and branching
abstractions: a positive design becomes a call of the variable standing
for its focus, a negative design becomes a finite map from ramifications
to abstractions.  Slices are the single-branch fragment, where the
calculus is affine.  The machine here is the general, non-affine one:
environments map variables to closures, so it also runs terms no design
can express.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .designs import (
    DAIMON,
    OMEGA,
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
    format_ramification,
    is_positive,
    is_slice,
    negative,
    proper,
    ram_key,
)

__all__ = [
    "TermError", "TermOmega", "TermDaimon", "Call", "Abstraction",
    "Branching", "TERM_OMEGA", "TERM_DAIMON", "PosTerm", "NegTerm",
    "call", "abstraction", "branching", "free_variables", "affine_check",
    "rename_free", "canonical_term", "alpha_equal", "term_size",
    "design_to_term", "term_to_design", "slice_to_term", "term_to_slice",
    "is_slice", "Closure", "FreeMark", "MachineOutcome", "machine_run",
    "strong_run", "fax_term", "format_term", "parse_term",
    "random_slice_of", "base_names",
]


class TermError(DesignError):
    """Raised for malformed terms, affinity violations, typing failures."""


# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True)
class TermOmega:
    def __repr__(self) -> str:
        return "TERM_OMEGA"


@dataclass(frozen=True)
class TermDaimon:
    def __repr__(self) -> str:
        return "TERM_DAIMON"


TERM_OMEGA = TermOmega()
TERM_DAIMON = TermDaimon()


@dataclass(frozen=True)
class Call:
    """A positive term: the variable applied at a set of argument slots."""

    var: str
    args: tuple[tuple[int, "Branching"], ...]

    @property
    def ramification(self) -> Ramification:
        return frozenset(i for i, _ in self.args)

    def arg(self, i: int) -> "Branching":
        for k, m in self.args:
            if k == i:
                return m
        raise TermError("no argument at slot %d" % i)


@dataclass(frozen=True)
class Abstraction:
    """Binders for one branch; names pair with the sorted branch key."""

    params: tuple[str, ...]
    body: "PosTerm"


@dataclass(frozen=True)
class Branching:
    """A negative term: a finite map from ramifications to abstractions."""

    branches: tuple[tuple[Ramification, Abstraction], ...]

    def branch(self, j: Ramification) -> Optional[Abstraction]:
        for key, ab in self.branches:
            if key == j:
                return ab
        return None

    @property
    def support(self) -> frozenset[Ramification]:
        return frozenset(j for j, _ in self.branches)


PosTerm = Union[Call, TermOmega, TermDaimon]
NegTerm = Branching

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


def call(var: str, args: Mapping[int, Branching]) -> Call:
    if not _NAME.match(var):
        raise TermError("bad variable name %r" % var)
    items = tuple(sorted(args.items()))
    for i, m in items:
        if i < 0:
            raise TermError("argument slots are natural numbers")
        if not isinstance(m, Branching):
            raise TermError("arguments must be branching terms")
    return Call(var, items)


def abstraction(params: Sequence[str], body: PosTerm) -> Abstraction:
    names = tuple(params)
    for x in names:
        if not _NAME.match(x):
            raise TermError("bad variable name %r" % x)
    if len(set(names)) != len(names):
        raise TermError("an abstraction binds distinct names")
    if not isinstance(body, (Call, TermOmega, TermDaimon)):
        raise TermError("abstraction bodies are positive terms")
    return Abstraction(names, body)


def branching(branches: Mapping[Ramification, Abstraction]) -> Branching:
    # silent bodies are dropped, mirroring the canonical design form
    kept = {}
    for j, ab in branches.items():
        key = frozenset(j)
        if not isinstance(ab, Abstraction):
            raise TermError("branches map to abstractions")
        if len(ab.params) != len(key):
            raise TermError("branch %s binds %d names, needs %d"
                            % (format_ramification(key), len(ab.params),
                               len(key)))
        if isinstance(ab.body, TermOmega):
            continue
        kept[key] = ab
    return Branching(tuple(sorted(kept.items(), key=lambda kv: ram_key(kv[0]))))


def term_size(t: Union[PosTerm, NegTerm, Abstraction]) -> int:
    if isinstance(t, TermOmega):
        return 0
    if isinstance(t, TermDaimon):
        return 1
    if isinstance(t, Call):
        return 1 + sum(term_size(m) for _, m in t.args)
    if isinstance(t, Abstraction):
        return term_size(t.body)
    return sum(1 + term_size(ab) for _, ab in t.branches)


def free_variables(t: Union[PosTerm, NegTerm, Abstraction]) -> frozenset[str]:
    if isinstance(t, (TermOmega, TermDaimon)):
        return frozenset()
    if isinstance(t, Call):
        out = {t.var}
        for _, m in t.args:
            out |= free_variables(m)
        return frozenset(out)
    if isinstance(t, Abstraction):
        return free_variables(t.body) - frozenset(t.params)
    out = set()
    for _, ab in t.branches:
        out |= free_variables(ab)
    return frozenset(out)


def affine_check(t: Union[PosTerm, NegTerm]) -> bool:
    """True when no slice of the term calls a variable twice.

    Arguments of one call must use disjoint variables, and none may
    reuse the head; sibling branches are alternatives, so they may
    share freely.
    """
    fresh = iter(range(1, 1 << 30))
    free_ids: dict[str, int] = {}
    ok = True

    def walk(node, scope: dict[str, int]) -> frozenset[int]:
        # returns the ids the node can call in at least one slice
        nonlocal ok
        if isinstance(node, (TermOmega, TermDaimon)) or not ok:
            return frozenset()
        if isinstance(node, Call):
            ident = scope.get(node.var)
            if ident is None:
                ident = free_ids.setdefault(node.var, next(fresh))
            uses = {ident}
            for _, m in node.args:
                sub = walk(m, scope)
                if sub & uses:
                    ok = False
                    return frozenset()
                uses |= sub
            return frozenset(uses)
        if isinstance(node, Abstraction):
            inner = dict(scope)
            for x in node.params:
                inner[x] = next(fresh)
            return walk(node.body, inner) - frozenset(
                inner[x] for x in node.params)
        out: set[int] = set()
        for _, ab in node.branches:
            out |= walk(ab, scope)
        return frozenset(out)

    walk(t, {})
    return ok


def rename_free(t, old: str, new: str):
    """Substitute a variable for a free variable, respecting binders."""
    if isinstance(t, (TermOmega, TermDaimon)):
        return t
    if isinstance(t, Call):
        var = new if t.var == old else t.var
        return Call(var, tuple((i, rename_free(m, old, new))
                               for i, m in t.args))
    if isinstance(t, Abstraction):
        if old in t.params:
            return t
        return Abstraction(t.params, rename_free(t.body, old, new))
    return Branching(tuple((j, rename_free(ab, old, new))
                           for j, ab in t.branches))


def canonical_term(t):
    """Rename bound variables by traversal order; decides α-equality."""
    counter = iter(range(1 << 30))

    def walk(node, scope: dict[str, str]):
        if isinstance(node, (TermOmega, TermDaimon)):
            return node
        if isinstance(node, Call):
            return Call(scope.get(node.var, node.var),
                        tuple((i, walk(m, scope)) for i, m in node.args))
        if isinstance(node, Abstraction):
            inner = dict(scope)
            fresh = tuple("b%d" % next(counter) for _ in node.params)
            inner.update(zip(node.params, fresh))
            return Abstraction(fresh, walk(node.body, inner))
        return Branching(tuple((j, walk(ab, scope))
                               for j, ab in node.branches))

    return walk(t, {})


def alpha_equal(t1, t2) -> bool:
    return canonical_term(t1) == canonical_term(t2)


# ---------------------------------------------------------------------------
# Designs <-> terms


def base_names(b: Base, names: Optional[Mapping[Address, str]] = None
               ) -> dict[Address, str]:
    """One variable per base address on the right, defaults x0, x1, ..."""
    addresses = sorted(b.right)
    out: dict[Address, str] = {}
    for k, addr in enumerate(addresses):
        out[addr] = names[addr] if names and addr in names else "x%d" % k
    if len(set(out.values())) != len(out):
        raise TermError("base variables must be distinct")
    return out


def design_to_term(d: Design, b: Base,
                   names: Optional[Mapping[Address, str]] = None
                   ) -> Union[PosTerm, NegTerm]:
    """Express a design over its base in variable syntax."""
    if not check_design(d, b):
        raise TermError("the design does not check against the base")
    scope = base_names(b, names)
    counter = iter(range(1 << 30))

    def fresh() -> str:
        return "y%d" % next(counter)

    def pos(node: Positive, scope: Mapping[Address, str]) -> PosTerm:
        if isinstance(node, Omega):
            return TERM_OMEGA
        if isinstance(node, Daimon):
            return TERM_DAIMON
        if node.focus not in scope:
            raise TermError("no variable stands for the focus")
        args = {i: neg(child, node.focus + (i,), scope)
                for i, child in node.children}
        return call(scope[node.focus], args)

    def neg(node: Negative, at: Address, scope: Mapping[Address, str]
            ) -> Branching:
        branches = {}
        for j, value in node.branches:
            params = []
            inner = dict(scope)
            for k in sorted(j):
                x = fresh()
                params.append(x)
                inner[at + (k,)] = x
            branches[j] = Abstraction(tuple(params), pos(value, inner))
        return Branching(tuple(sorted(branches.items(),
                                      key=lambda kv: ram_key(kv[0]))))

    if is_positive(d):
        return pos(d, scope)
    return neg(d, b.left, scope)


def term_to_design(t: Union[PosTerm, NegTerm], b: Base,
                   names: Optional[Mapping[Address, str]] = None) -> Design:
    """Recover the design; fails on non-affine or ill-scoped terms."""
    if not affine_check(t):
        raise TermError("affinity violation: a slice calls a variable twice")
    scope = {v: addr for addr, v in base_names(b, names).items()}

    def pos(node: PosTerm, scope: Mapping[str, Address]) -> Positive:
        if isinstance(node, TermOmega):
            return OMEGA
        if isinstance(node, TermDaimon):
            return DAIMON
        if not isinstance(node, Call):
            raise TermError("expected a positive term")
        focus = scope.get(node.var)
        if focus is None:
            raise TermError("unbound variable %s" % node.var)
        children = {i: neg(m, focus + (i,), scope) for i, m in node.args}
        return proper(focus, node.ramification, children)

    def neg(node: NegTerm, at: Address, scope: Mapping[str, Address]
            ) -> Negative:
        if not isinstance(node, Branching):
            raise TermError("expected a branching term")
        branches = {}
        for j, ab in node.branches:
            inner = dict(scope)
            for k, x in zip(sorted(j), ab.params):
                inner[x] = at + (k,)
            branches[j] = pos(ab.body, inner)
        return negative(at, branches)

    if isinstance(t, Branching):
        if b.polarity != "-":
            raise TermError("a branching term needs a negative base")
        out: Design = neg(t, b.left, scope)
    else:
        if b.polarity != "+":
            raise TermError("a positive term needs a positive base")
        out = pos(t, scope)
    if not check_design(out, b):
        raise TermError("the term does not type against the base")
    return out


def slice_to_term(d: Design, b: Base,
                  names: Optional[Mapping[Address, str]] = None
                  ) -> Union[PosTerm, NegTerm]:
    if not is_slice(d):
        raise TermError("not a slice: a negative answers two ramifications")
    return design_to_term(d, b, names)


def term_to_slice(t: Union[PosTerm, NegTerm], b: Base,
                  names: Optional[Mapping[Address, str]] = None) -> Design:
    d = term_to_design(t, b, names)
    if not is_slice(d):
        raise TermError("not a slice: a branching carries two branches")
    return d


def random_slice_of(rng, d: Design) -> Design:
    """Keep one branch per negative, chosen at random."""
    if isinstance(d, (Omega, Daimon)):
        return d
    if isinstance(d, Proper):
        return proper(d.focus, d.ramification,
                      {i: random_slice_of(rng, sub) for i, sub in d.children})
    if not d.branches:
        return d
    j, value = d.branches[rng.randrange(len(d.branches))]
    return negative(d.focus, {j: random_slice_of(rng, value)})


# ---------------------------------------------------------------------------
# The environment machine


@dataclass(frozen=True, eq=False)
class Closure:
    term: Branching
    env: Mapping[str, object]


@dataclass(frozen=True)
class FreeMark:
    """A stand-in the strong reader binds parameters to; calls of it stop
    the machine as heads."""

    name: str


@dataclass(frozen=True, eq=False)
class MachineOutcome:
    kind: str                       # daimon | omega | omega-created | head
    steps: int
    var: Optional[str] = None
    ramification: Optional[Ramification] = None
    residual: Optional[tuple[Call, Mapping[str, object]]] = None


DEFAULT_MACHINE_FUEL = 10000


def machine_run(P: PosTerm, env: Mapping[str, object],
                fuel: Optional[int] = None) -> MachineOutcome:
    """Run a positive term against an environment of closures.

    A head call of a variable the environment does not bind (or binds to
    a free mark) is the root of the normal form and stops the run.
    """
    if fuel is None:
        fuel = DEFAULT_MACHINE_FUEL
    steps = 0
    while True:
        if isinstance(P, TermDaimon):
            return MachineOutcome("daimon", steps)
        if isinstance(P, TermOmega):
            return MachineOutcome("omega", steps)
        if not isinstance(P, Call):
            raise TermError("machine states are positive terms")
        bound = env.get(P.var)
        if bound is None or isinstance(bound, FreeMark):
            name = bound.name if isinstance(bound, FreeMark) else P.var
            return MachineOutcome("head", steps, var=name,
                                  ramification=P.ramification,
                                  residual=(P, env))
        if not isinstance(bound, Closure):
            raise TermError("environments bind closures")
        if steps >= fuel:
            return MachineOutcome("omega-created", steps)
        steps += 1
        ab = bound.term.branch(P.ramification)
        if ab is None:
            P = TERM_OMEGA
            continue
        # the arguments close over the whole current environment
        inner = dict(bound.env)
        for (i, m), x in zip(P.args, ab.params):
            inner[x] = Closure(m, env)
        P, env = ab.body, inner


def strong_run(P: PosTerm, env: Mapping[str, object], depth: int = 12,
               fuel: Optional[int] = None) -> PosTerm:
    """Normal form as a term, exploring under binders up to a depth.

    Frontiers cut by the depth or the fuel read back as silence.
    """
    counter = iter(range(1 << 30))

    def read_pos(P: PosTerm, env: Mapping[str, object], d: int) -> PosTerm:
        out = machine_run(P, env, fuel)
        if out.kind == "daimon":
            return TERM_DAIMON
        if out.kind in ("omega", "omega-created"):
            return TERM_OMEGA
        if d <= 0:
            return TERM_OMEGA
        head, at = out.residual
        args = {i: read_neg(Closure(m, at), d)
                for i, m in head.args}
        return call(out.var, args)

    def read_neg(cl: Closure, d: int) -> Branching:
        branches = {}
        for j, ab in cl.term.branches:
            fresh = tuple("f%d" % next(counter) for _ in ab.params)
            inner = dict(cl.env)
            for x, f in zip(ab.params, fresh):
                inner[x] = FreeMark(f)
            branches[j] = Abstraction(fresh, read_pos(ab.body, inner, d - 1))
        return branching(branches)

    return read_pos(P, env, depth)


def fax_term(var: str, alphabet: Iterable[Ramification], depth: int,
             _counter: Optional[list] = None) -> Branching:
    """The copycat: the variable in all its nested expansions.

    Each branch relays the call to ``var`` and wires every argument to a
    copycat one level shallower.  A relay crosses two levels per action
    (one to open the branch, one to pass the call on), so renaming a
    term whose calls nest d deep needs 2*d levels.
    """
    if _counter is None:
        _counter = [0]
    if depth <= 0:
        return Branching(())
    alphabet = sorted({frozenset(j) for j in alphabet}, key=ram_key)
    branches = {}
    for I in alphabet:
        params = []
        for _ in sorted(I):
            params.append("c%d" % _counter[0])
            _counter[0] += 1
        args = {i: fax_term(x, alphabet, depth - 1, _counter)
                for i, x in zip(sorted(I), params)}
        branches[I] = Abstraction(tuple(params), call(var, args))
    return branching(branches)


# ---------------------------------------------------------------------------
# Text format


def format_term(t: Union[PosTerm, NegTerm]) -> str:
    if isinstance(t, TermOmega):
        return "omega"
    if isinstance(t, TermDaimon):
        return "dai"
    if isinstance(t, Call):
        inner = " ".join(format_term(m) for _, m in t.args)
        slots = " ".join(str(i) for i, _ in t.args)
        return "%s{%s}@{%s}" % (t.var, inner, slots)
    if isinstance(t, Abstraction):
        return "\\{%s}.%s" % (" ".join(t.params), format_term(t.body))
    parts = []
    for j, ab in t.branches:
        parts.append("%s = %s" % (format_ramification(j), format_term(ab)))
    return "{%s}" % "; ".join(parts)


_TOKEN = re.compile(r"\s*([{}().;\\=@]|[A-Za-z_][A-Za-z0-9_']*|\d+)")


def _tokenize(s: str) -> list[str]:
    out, k = [], 0
    while k < len(s):
        m = _TOKEN.match(s, k)
        if not m:
            if s[k:].strip():
                raise TermError("cannot read %r" % s[k:].strip()[:12])
            break
        out.append(m.group(1))
        k = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.k = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.k] if self.k < len(self.tokens) else None

    def take(self, want: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise TermError("unexpected end of term")
        if want is not None and tok != want:
            raise TermError("expected %r, found %r" % (want, tok))
        self.k += 1
        return tok

    def positive(self) -> PosTerm:
        tok = self.peek()
        if tok == "dai":
            self.take()
            return TERM_DAIMON
        if tok == "omega":
            self.take()
            return TERM_OMEGA
        var = self.take()
        if not _NAME.match(var):
            raise TermError("expected a variable, found %r" % var)
        self.take("{")
        args_terms = []
        while self.peek() != "}":
            args_terms.append(self.negative())
        self.take("}")
        self.take("@")
        self.take("{")
        slots = []
        while self.peek() != "}":
            slots.append(int(self.take()))
        self.take("}")
        if len(slots) != len(args_terms):
            raise TermError("slot list does not match the arguments")
        return call(var, dict(zip(slots, args_terms)))

    def abstraction_tail(self) -> tuple[tuple[str, ...], PosTerm]:
        self.take("\\")
        self.take("{")
        params = []
        while self.peek() != "}":
            params.append(self.take())
        self.take("}")
        self.take(".")
        return tuple(params), self.positive()

    def negative(self) -> Branching:
        if self.peek() == "\\":
            # bare binder: one branch keyed by the first slot numbers
            params, body = self.abstraction_tail()
            key = frozenset(range(len(params)))
            return Branching(((key, Abstraction(params, body)),)
                             if not isinstance(body, TermOmega) else ())
        self.take("{")
        branches: dict[Ramification, Abstraction] = {}
        while self.peek() != "}":
            self.take("{")
            biases = []
            while self.peek() != "}":
                biases.append(int(self.take()))
            self.take("}")
            key = frozenset(biases)
            if len(key) != len(biases):
                raise TermError("repeated bias in a branch key")
            self.take("=")
            params, body = self.abstraction_tail()
            if key in branches:
                raise TermError("branch %s given twice"
                                % format_ramification(key))
            branches[key] = Abstraction(params, body)
            if self.peek() == ";":
                self.take()
        self.take("}")
        return branching(branches)


def parse_term(s: str) -> Union[PosTerm, NegTerm]:
    p = _Parser(_tokenize(s))
    if p.peek() in ("\\", "{"):
        out: Union[PosTerm, NegTerm] = p.negative()
    else:
        out = p.positive()
    if p.peek() is not None:
        raise TermError("trailing input after the term")
    return out
