"""Command line front end and the local exploration service.

Every command builds one JSON-compatible document; the text rendering is
derived from that document, and the HTTP service returns the same bytes
the command line prints.  Exit codes: 0 accepted or reported, 1 rejected
with a witness, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .ludics.behaviours import (
    FIXTURES,
    Universe,
    additive,
    behaviour,
    behaviour_to_obj,
    delocate,
    delocate_behaviour,
    delocated_alphabet,
    directory,
    incarnation,
    members,
    tagging_delocation,
)
from .ludics.designs import (
    DAIMON,
    ChAction,
    Chronicle,
    DesignError,
    DesignParseError,
    Fail,
    Negative,
    check_design,
    compare,
    dai_minus,
    directory_design,
    fax,
    format_action,
    format_address,
    format_base,
    format_chronicle,
    format_design,
    format_ramification,
    infer_base,
    infer_base_negative,
    is_positive,
    negative_base,
    parse_base,
    parse_design,
    positive_base,
    ram_design,
    ram_key,
    random_positive_design,
    skunk,
    skunk_plus,
)
from .ludics.engine import (
    EngineError,
    MachineState,
    Net,
    format_occurrence,
    make_state,
    normal_form_strings,
    normal_form_to_design,
    orthogonal,
    random_chained_net,
    random_closed_net,
    strong_normalize,
    token_run,
    validate_net,
    weak_run,
)
from .ludics.terms import (
    Closure,
    TermError,
    design_to_term,
    format_term,
    machine_run,
    parse_term,
    strong_run,
    term_to_design,
)
from .mll.criteria import (
    SizeGuardError,
    check_acyclicity,
    check_aj,
    check_cp,
    check_dr,
)
from .mll.derivation import derivation_to_obj, format_derivation
from .mll.formulas import FormulaSyntaxError
from .mll.gen import random_structure
from .mll.rewrite import check_parsing, cut_normalize, sequentialize
from .mll.structures import (
    StructureSyntaxError,
    format_structure,
    parse_structure,
)


class InputError(Exception):
    """Malformed command input; maps to exit code 2."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        super().__init__(message)
        self.line = line
        self.column = column

    def document(self) -> dict:
        doc: dict = {"error": str(self)}
        if self.line is not None:
            doc["line"] = self.line
            doc["column"] = self.column
        return doc


class Rejection(Exception):
    """Domain-level refusal; maps to exit code 1."""

    def __init__(self, witness: dict):
        super().__init__(witness.get("reason", "rejected"))
        self.witness = witness


# ---------------------------------------------------------------------------
# shared parsing helpers

_RAM_TEXT = re.compile(r"\{([0-9 ]*)\}\Z")


def parse_ramification(text: str):
    m = _RAM_TEXT.match(text.strip())
    if m is None:
        raise InputError("ramifications look like {0 2}, got %r" % text)
    inner = m.group(1).split()
    return frozenset(int(k) for k in inner)


def parse_alphabet(text: str):
    """Comma-separated ramifications, e.g. ``{},{0},{0 1}``."""
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        return []
    return sorted({parse_ramification(p) for p in parts}, key=ram_key)


def format_alphabet(alphabet) -> list[str]:
    return [format_ramification(j) for j in sorted(alphabet, key=ram_key)]


def _parse_design_text(text: str):
    try:
        return parse_design(text)
    except DesignParseError as exc:
        raise InputError(str(exc), exc.line, exc.column)


def parse_net_text(text: str) -> Net:
    """Blocks separated by ``--`` lines; the positive principal comes first."""
    blocks: list[list[str]] = [[]]
    for line in text.splitlines():
        if line.strip() == "--":
            blocks.append([])
        else:
            blocks[-1].append(line)
    chunks = ["\n".join(b).strip() for b in blocks]
    chunks = [c for c in chunks if c]
    if not chunks:
        raise InputError("empty net input")
    principal = _parse_design_text(chunks[0])
    if not is_positive(principal):
        raise InputError("the first design of a net must be positive")
    partners = []
    for c in chunks[1:]:
        d = _parse_design_text(c)
        if not isinstance(d, Negative):
            raise InputError("net partners must be negative designs")
        partners.append(d)
    return Net(principal, tuple(partners))


def format_net_text(net: Net) -> str:
    parts = [format_design(net.principal)]
    for p in net.partners:
        parts.append("--")
        parts.append(format_design(p))
    return "\n".join(parts) + "\n"


def net_ramifications(net: Net):
    """Every ramification an action of the net mentions."""
    out = set()

    def walk(d):
        if isinstance(d, Negative):
            for j, sub in d.branches:
                out.add(j)
                walk(sub)
        elif hasattr(d, "ramification"):
            out.add(d.ramification)
            for _, sub in d.children:
                walk(sub)

    walk(net.principal)
    for p in net.partners:
        walk(p)
    return sorted(out, key=ram_key)


def _parse_structure_text(text: str):
    try:
        return parse_structure(text)
    except StructureSyntaxError as exc:
        line = getattr(exc, "line", None)
        column = getattr(exc, "column", None)
        raise InputError(str(exc), line, column)
    except (FormulaSyntaxError, ValueError) as exc:
        raise InputError(str(exc))


def _parse_base_text(text: str):
    try:
        return parse_base(text)
    except (DesignError, DesignParseError, ValueError) as exc:
        raise InputError("bad base %r: %s" % (text, exc))


def _parse_term_text(text: str):
    try:
        return parse_term(text)
    except TermError as exc:
        raise InputError(str(exc))


# ---------------------------------------------------------------------------
# verdict documents (shared between the command line and the service)


def check_document(criterion: str, text: str) -> dict:
    s = _parse_structure_text(text)
    try:
        if criterion == "dr":
            verdict = check_dr(s)
        elif criterion == "mix":
            verdict = check_acyclicity(s)
        elif criterion == "cp":
            verdict = check_cp(s)
        elif criterion == "aj":
            verdict = check_aj(s)
        elif criterion in ("parse-weak", "parse-strong"):
            verdict = check_parsing(s, criterion.split("-")[1]).verdict
        else:
            raise InputError("unknown criterion %r" % criterion)
    except SizeGuardError as exc:
        raise InputError(str(exc))
    except ValueError as exc:
        raise InputError(str(exc))
    return {
        "command": "check",
        "criterion": verdict.criterion,
        "accepted": verdict.accepted,
        "witness": verdict.witness,
    }


def sequentialize_document(text: str, allow_mix: bool) -> dict:
    s = _parse_structure_text(text)
    try:
        derivation = sequentialize(s, allow_mix=allow_mix)
    except ValueError as exc:
        raise InputError(str(exc))
    doc = {
        "command": "sequentialize",
        "allow-mix": allow_mix,
        "accepted": derivation is not None,
    }
    if derivation is None:
        doc["witness"] = {"reason": "no parsing run reaches a terminal state"}
    else:
        doc["derivation"] = derivation_to_obj(derivation)
        doc["rendering"] = format_derivation(derivation)
    return doc


def cut_normalize_document(text: str, trace: bool) -> dict:
    s = _parse_structure_text(text)
    try:
        if trace:
            result, states = cut_normalize(s, trace=True)
        else:
            result = cut_normalize(s)
            states = None
    except ValueError as exc:
        raise InputError(str(exc))
    doc = {
        "command": "cut-normalize",
        "normal-form": format_structure(result),
        "cuts-eliminated": len(s.cuts),
    }
    if states is not None:
        doc["trace"] = [format_structure(st) for st in states]
    return doc


def design_infer_base_document(text: str) -> dict:
    d = _parse_design_text(text)
    result = infer_base(d) if is_positive(d) else infer_base_negative(d)
    doc = {"command": "design-infer-base", "design": format_design(d)}
    if isinstance(result, Fail):
        raise Rejection({"rule": result.rule, "reason": result.detail,
                         **doc})
    doc["base"] = format_base(result)
    return doc


def design_check_document(text: str, base_text: str) -> dict:
    d = _parse_design_text(text)
    b = _parse_base_text(base_text)
    return {
        "command": "design-check",
        "design": format_design(d),
        "base": format_base(b),
        "accepted": check_design(d, b),
    }


def design_compare_document(text: str, order: str) -> dict:
    chunks = [c for c in
              ("\n".join(b).strip() for b in _split_blocks(text)) if c]
    if len(chunks) != 2:
        raise InputError("compare expects two designs separated by a -- line")
    d1 = _parse_design_text(chunks[0])
    d2 = _parse_design_text(chunks[1])
    try:
        related = compare(d1, d2, order)
    except (DesignError, ValueError) as exc:
        raise InputError(str(exc))
    return {
        "command": "design-compare",
        "order": order,
        "left": format_design(d1),
        "right": format_design(d2),
        "accepted": related,
    }


def _split_blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = [[]]
    for line in text.splitlines():
        if line.strip() == "--":
            blocks.append([])
        else:
            blocks[-1].append(line)
    return blocks


NAMED_DESIGNS = ("dai", "dai-minus", "skunk", "skunk-plus", "ram",
                 "directory", "fax")


def design_named_document(name: str, focus, alphabet, ram, depth: int,
                          right) -> dict:
    if name == "dai":
        d = DAIMON
    elif name == "dai-minus":
        d = dai_minus(focus, alphabet)
    elif name == "skunk":
        d = skunk(focus)
    elif name == "skunk-plus":
        d = skunk_plus(focus, ram)
    elif name == "ram":
        d = ram_design(focus, ram, alphabet)
    elif name == "directory":
        d = directory_design(alphabet, focus)
    elif name == "fax":
        d = fax(focus, right, alphabet, depth)
    else:
        raise InputError("unknown named design %r" % name)
    return {"command": "design-named", "name": name,
            "design": format_design(d)}


def normalize_document(net_text: str, strong: bool, depth: Optional[int],
                       alphabet_text: Optional[str],
                       fuel: Optional[int]) -> dict:
    net = parse_net_text(net_text)
    report = validate_net(net)
    if not report.ok:
        raise InputError("invalid net: %s" % report.problems[0])
    if not strong:
        result = weak_run(make_state(net), fuel=fuel)
        out = result.outcome
        return {
            "command": "normalize",
            "mode": "weak",
            "outcome": out.kind,
            "steps": result.steps,
            "focus": None if out.focus is None else format_address(out.focus),
            "ramification": (None if out.ramification is None
                             else format_ramification(out.ramification)),
        }
    if alphabet_text is None:
        alphabet = net_ramifications(net)
    else:
        alphabet = parse_alphabet(alphabet_text)
    try:
        entries = strong_normalize(net, alphabet, depth=depth, fuel=fuel)
    except EngineError as exc:
        raise InputError(str(exc))
    base = positive_base(*sorted(report.net_type))
    return {
        "command": "normalize",
        "mode": "strong",
        "alphabet": format_alphabet(alphabet),
        "depth": depth,
        "chronicles": normal_form_strings(entries),
        "design": format_design(normal_form_to_design(entries, base)),
    }


def _token_section(net: Net) -> Optional[dict]:
    if len(net.partners) != 1:
        return None
    try:
        run = token_run(net.principal, net.partners[0])
    except EngineError:
        return None
    return {
        "outcome": run.outcome,
        "visited-principal": sorted(
            format_occurrence(o) for o in run.visited_left),
        "visited-partner": sorted(
            format_occurrence(o) for o in run.visited_right),
        "pullback-principal": format_design(run.pullback_left),
        "pullback-partner": format_design(run.pullback_right),
    }


def orthogonal_document(net_text: str, fuel: Optional[int]) -> dict:
    net = parse_net_text(net_text)
    try:
        verdict = orthogonal(net.principal, net.partners, fuel=fuel)
    except EngineError as exc:
        raise InputError(str(exc))
    return {
        "command": "orthogonal",
        "accepted": verdict,
        "token": _token_section(net) if verdict else None,
    }


# behaviours


def _universe(base_text: str, alphabet_text: str, depth: int) -> Universe:
    base = _parse_base_text(base_text)
    alphabet = parse_alphabet(alphabet_text)
    try:
        return Universe(base, frozenset(alphabet), depth)
    except DesignError as exc:
        raise InputError(str(exc))


def _generator_designs(text: str):
    chunks = [c for c in
              ("\n".join(b).strip() for b in _split_blocks(text)) if c]
    return [_parse_design_text(c) for c in chunks]


def _behaviour_from(generator_texts, u: Universe, form: str):
    gens = [_parse_design_text(t) if isinstance(t, str) else t
            for t in generator_texts]
    try:
        return behaviour(gens, u, form=form)
    except DesignError as exc:
        raise InputError(str(exc))


def _fixture_behaviour(fixture: str, which: str):
    if fixture not in FIXTURES:
        raise InputError("unknown fixture %r" % fixture)
    data = FIXTURES[fixture]()
    if which not in data or which == "universe":
        options = sorted(k for k in data if k != "universe")
        raise InputError("fixture %r offers %s" % (fixture, ", ".join(options)))
    value = data[which]
    if not hasattr(value, "universe"):
        raise InputError("fixture entry %r is not a behaviour" % which)
    return value


def behaviour_document(op: str, *, base: Optional[str] = None,
                       alphabet: Optional[str] = None, depth: int = 2,
                       form: str = "orth", generators=(), design: Optional[str] = None,
                       left=(), right=(), tag: int = 0, stride: int = 2,
                       fixture: Optional[str] = None, which: Optional[str] = None,
                       with_members: bool = False, cap: Optional[int] = None) -> dict:
    if fixture is not None:
        if op in ("with", "plus"):
            G = _fixture_behaviour(fixture, which or "")
            H = _fixture_behaviour(fixture, design or "")
        else:
            G = _fixture_behaviour(fixture, which or "")
        u = G.universe
    else:
        if base is None or alphabet is None:
            raise InputError("behaviour commands need --base and --alphabet "
                             "unless --fixture is given")
        u = _universe(base, alphabet, depth)
        if op in ("with", "plus"):
            G = _behaviour_from(left, u, form)
            H = _behaviour_from(right, u, form)
        else:
            G = _behaviour_from(generators, u, "biorth" if op == "biorth"
                                else form)
    doc: dict = {"command": "behaviour", "op": op}
    try:
        if op == "biorth":
            doc["result"] = behaviour_to_obj(G, cap)
            if with_members:
                doc["members"] = sorted(
                    format_design(d) for d in members(G, cap))
        elif op == "directory":
            doc["result"] = behaviour_to_obj(G, cap)
            doc["directory"] = format_alphabet(directory(G))
        elif op == "incarnation":
            if design is None:
                raise InputError("incarnation needs --design")
            d = _parse_design_text(design)
            doc["design"] = format_design(d)
            doc["incarnation"] = format_design(incarnation(d, G))
            doc["behaviour"] = behaviour_to_obj(G, cap)
        elif op in ("with", "plus"):
            result = additive(G, H, "with" if op == "with" else "plus",
                              cap=cap)
            doc["left"] = behaviour_to_obj(G, cap)
            doc["right"] = behaviour_to_obj(H, cap)
            doc["result"] = behaviour_to_obj(result, cap)
        elif op == "delocate":
            theta = tagging_delocation(tag, stride)
            target = Universe(u.base, delocated_alphabet(u, theta), u.depth)
            result = delocate_behaviour(G, theta, target)
            doc["theta"] = {"tag": tag, "stride": stride}
            doc["generators"] = sorted(
                format_design(delocate(g, theta)) for g in G.generators)
            doc["result"] = behaviour_to_obj(result, cap)
        else:
            raise InputError("unknown behaviour operation %r" % op)
    except InputError:
        raise
    except DesignError as exc:
        message = str(exc)
        if "disjoint" in message or "share" in message:
            raise Rejection({"reason": message, "command": "behaviour",
                             "op": op})
        raise InputError(message)
    return doc


# lambda bridge


def lambda_to_term_document(text: str, base_text: str) -> dict:
    d = _parse_design_text(text)
    b = _parse_base_text(base_text)
    try:
        t = design_to_term(d, b)
    except (TermError, DesignError) as exc:
        raise Rejection({"reason": str(exc), "command": "lambda-to-term"})
    return {
        "command": "lambda-to-term",
        "base": format_base(b),
        "design": format_design(d),
        "term": format_term(t),
    }


def lambda_to_slice_document(text: str, base_text: str) -> dict:
    t = _parse_term_text(text)
    b = _parse_base_text(base_text)
    try:
        d = term_to_design(t, b)
    except TermError as exc:
        raise Rejection({"reason": str(exc), "command": "lambda-to-slice"})
    return {
        "command": "lambda-to-slice",
        "base": format_base(b),
        "term": format_term(t),
        "design": format_design(d),
    }


def lambda_run_document(text: str, strong: bool, depth: int,
                        fuel: Optional[int]) -> dict:
    chunks = [c for c in
              ("\n".join(b).strip() for b in _split_blocks(text)) if c]
    if not chunks:
        raise InputError("empty term input")
    term = _parse_term_text(chunks[0])
    env = {}
    for chunk in chunks[1:]:
        name, eq, body = chunk.partition("=")
        if not eq:
            raise InputError("environment entries look like `name = term`")
        env[name.strip()] = Closure(_parse_term_text(body.strip()), {})
    try:
        if strong:
            result = strong_run(term, env, depth=depth, fuel=fuel)
            return {
                "command": "lambda-run",
                "mode": "strong",
                "depth": depth,
                "term": format_term(result),
            }
        out = machine_run(term, env, fuel=fuel)
    except TermError as exc:
        raise InputError(str(exc))
    return {
        "command": "lambda-run",
        "mode": "weak",
        "outcome": out.kind,
        "steps": out.steps,
        "var": out.var,
        "ramification": (None if out.ramification is None
                         else format_ramification(out.ramification)),
    }


# corpus generation


def gen_document(kind: str, seed: int, count: int, *, size: int = 8,
                 mode: str = "proof", cuts: bool = False, mix: bool = False,
                 perturb: float = 0.0, alphabet_text: str = "{},{0}",
                 depth: int = 3, chained: bool = False,
                 base_text: str = "|- 0") -> dict:
    items = []
    for k in range(count):
        if kind == "structure":
            try:
                s = random_structure(seed + k, size, mode=mode,
                                     allow_cuts=cuts, allow_mix=mix,
                                     perturb=perturb)
            except ValueError as exc:
                raise InputError(str(exc))
            items.append(format_structure(s))
        elif kind == "net":
            rng = random.Random(seed + k)
            alphabet = parse_alphabet(alphabet_text)
            maker = random_chained_net if chained else random_closed_net
            items.append(format_net_text(maker(rng, alphabet, depth)))
        elif kind == "design":
            rng = random.Random(seed + k)
            alphabet = parse_alphabet(alphabet_text)
            b = _parse_base_text(base_text)
            if b.left is not None:
                raise InputError("gen design draws positive designs; "
                                 "give a base of the form |- a b")
            available = sorted(b.right)
            if not available:
                raise InputError("the base must offer at least one address")
            d = random_positive_design(rng, available, alphabet, depth)
            items.append(format_design(d))
        else:
            raise InputError("unknown corpus kind %r" % kind)
    return {"command": "gen", "kind": kind, "seed": seed, "count": count,
            "items": items}


# ---------------------------------------------------------------------------
# exploration sessions


class IllegalChoice(Exception):
    def __init__(self, offered):
        super().__init__("illegal choice")
        self.offered = offered


class ExploreSession:
    """Demand-driven normalization steered one branch choice at a time.

    Auto-steps run the head interaction until the daimon, a missing
    branch, exhausted fuel, or a free head action; on a head the explorer
    picks a son and a ramification, which appends one negative action and
    resumes.  The chronicle index grows along the branch of the normal
    form being explored, and the whole run replays from the choice list.
    """

    def __init__(self, net: Net, alphabet, depth: Optional[int] = None,
                 fuel: Optional[int] = None, sid: Optional[str] = None):
        if depth is not None and depth < 1:
            raise InputError("the exploration depth must be at least 1")
        self.id = sid
        self.net = net
        self.alphabet = sorted({frozenset(j) for j in alphabet}, key=ram_key)
        self.depth = depth
        self.fuel = fuel
        self.lock = threading.Lock()
        self.history: list = []
        self.q: list[ChAction] = []
        self.steps = 0
        self.outcome = "omega"
        self.offered: list = []
        self._residual = None
        self._pullback = None
        self._state = make_state(net)
        self._advance()
        if self.outcome == "daimon" and not self.history:
            self._pullback = _token_section(net)

    def _heads(self) -> int:
        return sum(1 for a in self.q if a.sign == "+")

    def _advance(self) -> None:
        result = weak_run(self._state, fuel=self.fuel)
        self.steps += result.steps
        out = result.outcome
        self.outcome = out.kind
        if out.kind != "head":
            self._residual = None
            self.offered = []
            return
        self.q.append(ChAction("+", out.focus, out.ramification))
        self._residual = out.residual
        if self.depth is not None and self._heads() >= self.depth:
            self.offered = []
        else:
            self.offered = [(i, j) for i in sorted(out.ramification)
                            for j in self.alphabet]

    @property
    def ended(self) -> bool:
        return not self.offered

    def choose(self, i: int, j) -> None:
        j = frozenset(j)
        if (i, j) not in self.offered:
            raise IllegalChoice(list(self.offered))
        head = self._residual.positive
        self.history.append((i, j))
        self.q.append(ChAction("-", head.focus + (i,), j))
        self._state = MachineState(head.child(i).branch(j),
                                   self._residual.partners)
        self._advance()


_END_OF = {"daimon": "dai", "omega": "omega", "omega-created": "omega-created"}


def session_document(s: ExploreSession, include_id: bool = True) -> dict:
    end = _END_OF.get(s.outcome)
    head = s._residual.positive if s._residual is not None else None
    doc = {
        "command": "explore",
        "alphabet": [format_ramification(j) for j in s.alphabet],
        "chronicle": format_chronicle(Chronicle(tuple(s.q), end)),
        "depth": s.depth,
        "designs": {
            "principal": format_design(s.net.principal),
            "partners": [format_design(p) for p in s.net.partners],
        },
        "ended": s.ended,
        "focus": None if head is None else format_address(head.focus),
        "history": [{"i": i, "ram": format_ramification(j)}
                    for i, j in s.history],
        "offered": [{"i": i, "ram": format_ramification(j)}
                    for i, j in s.offered],
        "outcome": s.outcome,
        "pullback": s._pullback,
        "q": [format_action(a) for a in s.q],
        "ramification": (None if head is None
                         else format_ramification(head.ramification)),
        "steps": s.steps,
    }
    if include_id:
        doc["id"] = s.id
    return doc


def _session_from_payload(net_text: str, alphabet_text: Optional[str],
                          depth: Optional[int], fuel: Optional[int],
                          sid: Optional[str] = None) -> ExploreSession:
    net = parse_net_text(net_text)
    report = validate_net(net)
    if not report.ok:
        raise InputError("invalid net: %s" % report.problems[0])
    if alphabet_text is None:
        alphabet = net_ramifications(net)
    else:
        alphabet = parse_alphabet(alphabet_text)
    return ExploreSession(net, alphabet, depth=depth, fuel=fuel, sid=sid)


_CHOICE_TEXT = re.compile(r"\s*(\d+)\s+(\{[0-9 ]*\})\s*\Z")


def parse_choice(text: str):
    m = _CHOICE_TEXT.match(text)
    if m is None:
        raise InputError("choices look like `1 {0 2}`, got %r" % text)
    return int(m.group(1)), parse_ramification(m.group(2))


def explore_document(net_text: str, alphabet_text: Optional[str],
                     depth: Optional[int], fuel: Optional[int],
                     choices) -> dict:
    session = _session_from_payload(net_text, alphabet_text, depth, fuel)
    for raw in choices:
        i, j = parse_choice(raw) if isinstance(raw, str) else raw
        try:
            session.choose(i, j)
        except IllegalChoice as exc:
            raise InputError(
                "illegal choice %d %s; offered: %s"
                % (i, format_ramification(j),
                   " ".join("%d %s" % (oi, format_ramification(oj))
                            for oi, oj in exc.offered) or "none"))
    return session_document(session, include_id=False)


# ---------------------------------------------------------------------------
# rendering


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _render_lines(value, indent: int, lines: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if isinstance(item, (dict, list)):
                lines.append("%s%s:" % (pad, key))
                _render_lines(item, indent + 1, lines)
            else:
                lines.append("%s%s: %s" % (pad, key, _scalar(item)))
    elif isinstance(value, list):
        if not value:
            lines.append("%s(none)" % pad)
        for item in value:
            if isinstance(item, (dict, list)):
                lines.append("%s-" % pad)
                _render_lines(item, indent + 1, lines)
            else:
                lines.append("%s- %s" % (pad, _scalar(item)))
    else:
        lines.append("%s%s" % (pad, _scalar(value)))


def _scalar(item) -> str:
    if item is None:
        return "-"
    if isinstance(item, bool):
        return "yes" if item else "no"
    if isinstance(item, str) and "\n" in item:
        return json.dumps(item)
    return str(item)


def render_text(doc: dict) -> str:
    lines: list[str] = []
    _render_lines(doc, 0, lines)
    return "\n".join(lines) + "\n"


def render(doc: dict, fmt: str) -> str:
    return render_json(doc) if fmt == "json" else render_text(doc)


# ---------------------------------------------------------------------------
# the service


class SessionStore:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._sessions: dict[str, ExploreSession] = {}

    def create(self, session: ExploreSession) -> ExploreSession:
        with self._lock:
            sid = uuid.uuid4().hex
            session.id = sid
            self._sessions[sid] = session
            return session

    def get(self, sid: str) -> Optional[ExploreSession]:
        with self._lock:
            return self._sessions.get(sid)


def _check_payload(body: dict) -> dict:
    return check_document(str(body.get("criterion", "")),
                          str(body.get("structure", "")))


def _normalize_payload(body: dict) -> dict:
    return normalize_document(
        str(body.get("net", "")),
        body.get("mode", "weak") == "strong",
        body.get("depth"),
        body.get("alphabet"),
        body.get("fuel"),
    )


def _behaviour_payload(body: dict) -> dict:
    return behaviour_document(
        str(body.get("op", "")),
        base=body.get("base"),
        alphabet=body.get("alphabet"),
        depth=int(body.get("depth", 2)),
        form=str(body.get("form", "orth")),
        generators=list(body.get("generators", [])),
        design=body.get("design"),
        left=list(body.get("left", [])),
        right=list(body.get("right", [])),
        tag=int(body.get("tag", 0)),
        stride=int(body.get("stride", 2)),
        fixture=body.get("fixture"),
        which=body.get("which"),
        with_members=bool(body.get("members", False)),
        cap=body.get("cap"),
    )


def _orthogonal_payload(body: dict) -> dict:
    return orthogonal_document(str(body.get("net", "")), body.get("fuel"))


class ServiceHandler(BaseHTTPRequestHandler):
    store: SessionStore = None  # set by serve()

    def log_message(self, *args) -> None:  # quiet by default
        pass

    def _send(self, status: int, doc: dict) -> None:
        payload = render_json(doc).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(payload)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            body = json.loads(raw.decode())
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise InputError("bad JSON body: %s" % exc)
        if not isinstance(body, dict):
            raise InputError("the request body must be a JSON object")
        return body

    def do_GET(self) -> None:
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        if len(parts) == 2 and parts[0] == "sessions":
            session = self.store.get(parts[1])
            if session is None:
                self._send(404, {"error": "no such session"})
                return
            with session.lock:
                self._send(200, session_document(session))
            return
        self._send(404, {"error": "unknown path %r" % self.path})

    def do_POST(self) -> None:
        parts = [p for p in self.path.split("?")[0].split("/") if p]
        try:
            body = self._body()
            if parts == ["sessions"]:
                session = _session_from_payload(
                    str(body.get("net", "")), body.get("alphabet"),
                    body.get("depth"), body.get("fuel"))
                self.store.create(session)
                self._send(201, session_document(session))
            elif len(parts) == 3 and parts[0] == "sessions" \
                    and parts[2] == "choice":
                self._choice(parts[1], body)
            elif parts == ["check"]:
                self._send(200, _check_payload(body))
            elif parts == ["normalize"]:
                self._send(200, _normalize_payload(body))
            elif parts == ["behaviour"]:
                self._send(200, _behaviour_payload(body))
            elif parts == ["orthogonal"]:
                self._send(200, _orthogonal_payload(body))
            else:
                self._send(404, {"error": "unknown path %r" % self.path})
        except InputError as exc:
            self._send(400, exc.document())
        except Rejection as exc:
            self._send(200, {"accepted": False, "witness": exc.witness})

    def _choice(self, sid: str, body: dict) -> None:
        session = self.store.get(sid)
        if session is None:
            self._send(404, {"error": "no such session"})
            return
        if "i" not in body or "ram" not in body:
            raise InputError("a choice carries `i` and `ram`")
        i = int(body["i"])
        j = parse_ramification(str(body["ram"]))
        with session.lock:
            try:
                session.choose(i, j)
            except IllegalChoice as exc:
                self._send(409, {
                    "error": "illegal choice",
                    "offered": [{"i": oi, "ram": format_ramification(oj)}
                                for oi, oj in exc.offered],
                })
                return
            self._send(200, session_document(session))


def serve(port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    store = SessionStore()
    handler = type("Handler", (ServiceHandler,), {"store": store})
    server = ThreadingHTTPServer((host, port), handler)
    return server


# ---------------------------------------------------------------------------
# argument wiring


def _read_input(path: Optional[str]) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(str(exc))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ludonet",
        description="Proof structure checkers and interactive design "
                    "normalization.")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run a correctness criterion")
    p.add_argument("criterion", choices=("dr", "mix", "cp", "aj",
                                         "parse-weak", "parse-strong"))
    p.add_argument("file", nargs="?")

    p = sub.add_parser("sequentialize", help="rebuild a derivation")
    p.add_argument("--mix", action="store_true")
    p.add_argument("file", nargs="?")

    p = sub.add_parser("cut-normalize", help="eliminate every cut")
    p.add_argument("--trace", action="store_true")
    p.add_argument("file", nargs="?")

    p = sub.add_parser("design", help="single-design utilities")
    dsub = p.add_subparsers(dest="design_command", required=True)
    d = dsub.add_parser("infer-base")
    d.add_argument("file", nargs="?")
    d = dsub.add_parser("check")
    d.add_argument("--base", required=True)
    d.add_argument("file", nargs="?")
    d = dsub.add_parser("compare")
    d.add_argument("--order", choices=("obs", "left", "right", "stable"),
                   default="obs")
    d.add_argument("file", nargs="?")
    d = dsub.add_parser("named")
    d.add_argument("name", choices=NAMED_DESIGNS)
    d.add_argument("--focus", default="e")
    d.add_argument("--right", default="e")
    d.add_argument("--alphabet", default="{},{0}")
    d.add_argument("--ram", default="{}")
    d.add_argument("--depth", type=int, default=2)

    p = sub.add_parser("normalize", help="run a net to its verdict")
    p.add_argument("--strong", action="store_true")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--alphabet", default=None)
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("file", nargs="?")

    p = sub.add_parser("orthogonal", help="closed interaction verdict")
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("file", nargs="?")

    p = sub.add_parser("behaviour", help="universe-bounded behaviours")
    p.add_argument("op", choices=("biorth", "incarnation", "directory",
                                  "with", "plus", "delocate"))
    p.add_argument("--base")
    p.add_argument("--alphabet")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--form", choices=("orth", "biorth"), default="orth")
    p.add_argument("--design")
    p.add_argument("--tag", type=int, default=0)
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--fixture")
    p.add_argument("--which")
    p.add_argument("--members", action="store_true")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--left", help="generator file for the first operand")
    p.add_argument("--right", help="generator file for the second operand")
    p.add_argument("file", nargs="?")

    p = sub.add_parser("lambda", help="designs as variable terms")
    lsub = p.add_subparsers(dest="lambda_command", required=True)
    l = lsub.add_parser("to-term")
    l.add_argument("--base", required=True)
    l.add_argument("file", nargs="?")
    l = lsub.add_parser("to-slice")
    l.add_argument("--base", required=True)
    l.add_argument("file", nargs="?")
    l = lsub.add_parser("run")
    l.add_argument("--strong", action="store_true")
    l.add_argument("--depth", type=int, default=12)
    l.add_argument("--fuel", type=int, default=None)
    l.add_argument("file", nargs="?")

    p = sub.add_parser("gen", help="deterministic random corpora")
    p.add_argument("--kind", choices=("structure", "net", "design"),
                   default="structure")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--size", type=int, default=8)
    p.add_argument("--mode", choices=("proof", "paraproof"), default="proof")
    p.add_argument("--cuts", action="store_true")
    p.add_argument("--mix", action="store_true")
    p.add_argument("--perturb", type=float, default=0.0)
    p.add_argument("--alphabet", default="{},{0}")
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--chained", action="store_true")
    p.add_argument("--base", default="|- 0")

    p = sub.add_parser("explore", help="steer strong normalization")
    p.add_argument("--alphabet", default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("--choose", action="append", default=[],
                   help="a choice `i {ram}`, repeatable, applied in order")
    p.add_argument("file", nargs="?")

    p = sub.add_parser("serve", help="local exploration service")
    p.add_argument("--port", type=int, default=8943)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _dispatch(args) -> dict:
    if args.command == "check":
        return check_document(args.criterion, _read_input(args.file))
    if args.command == "sequentialize":
        return sequentialize_document(_read_input(args.file), args.mix)
    if args.command == "cut-normalize":
        return cut_normalize_document(_read_input(args.file), args.trace)
    if args.command == "design":
        if args.design_command == "infer-base":
            return design_infer_base_document(_read_input(args.file))
        if args.design_command == "check":
            return design_check_document(_read_input(args.file), args.base)
        if args.design_command == "compare":
            return design_compare_document(_read_input(args.file), args.order)
        focus = _parse_address_text(args.focus)
        right = _parse_address_text(args.right)
        return design_named_document(
            args.name, focus, parse_alphabet(args.alphabet),
            parse_ramification(args.ram), args.depth, right)
    if args.command == "normalize":
        return normalize_document(_read_input(args.file), args.strong,
                                  args.depth, args.alphabet, args.fuel)
    if args.command == "orthogonal":
        return orthogonal_document(_read_input(args.file), args.fuel)
    if args.command == "behaviour":
        generators: list = []
        left: list = []
        right: list = []
        if args.op in ("with", "plus") and args.fixture is None:
            if not args.left or not args.right:
                raise InputError("with/plus take --left and --right "
                                 "generator files")
            left = _generator_designs(_read_input(args.left))
            right = _generator_designs(_read_input(args.right))
        elif args.fixture is None:
            generators = _generator_designs(_read_input(args.file))
        return behaviour_document(
            args.op, base=args.base, alphabet=args.alphabet,
            depth=args.depth, form=args.form, generators=generators,
            design=args.design, left=left, right=right, tag=args.tag,
            stride=args.stride, fixture=args.fixture, which=args.which,
            with_members=args.members, cap=args.cap)
    if args.command == "lambda":
        if args.lambda_command == "to-term":
            return lambda_to_term_document(_read_input(args.file), args.base)
        if args.lambda_command == "to-slice":
            return lambda_to_slice_document(_read_input(args.file), args.base)
        return lambda_run_document(_read_input(args.file), args.strong,
                                   args.depth, args.fuel)
    if args.command == "gen":
        return gen_document(
            args.kind, args.seed, args.count, size=args.size, mode=args.mode,
            cuts=args.cuts, mix=args.mix, perturb=args.perturb,
            alphabet_text=args.alphabet, depth=args.depth,
            chained=args.chained, base_text=args.base)
    if args.command == "explore":
        return explore_document(_read_input(args.file), args.alphabet,
                                args.depth, args.fuel, args.choose)
    raise InputError("unknown command %r" % args.command)


def _parse_address_text(text: str):
    from .ludics.designs import parse_address
    try:
        return parse_address(text)
    except (DesignError, ValueError) as exc:
        raise InputError("bad address %r: %s" % (text, exc))


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        server = serve(args.port, args.host)
        host, port = server.server_address[:2]
        print("serving on http://%s:%d" % (host, port), flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
        return 0
    try:
        doc = _dispatch(args)
    except InputError as exc:
        sys.stderr.write(render(exc.document(), args.format))
        return 2
    except Rejection as exc:
        sys.stdout.write(render({"accepted": False, "witness": exc.witness},
                                args.format))
        return 1
    sys.stdout.write(render(doc, args.format))
    return 0 if doc.get("accepted", True) else 1


if __name__ == "__main__":
    sys.exit(main())
