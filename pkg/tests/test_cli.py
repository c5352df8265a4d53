"""Command line verdicts, exploration sessions, and the local service."""

import hashlib
import io
import json
import threading
import urllib.error
import urllib.request
from contextlib import redirect_stderr, redirect_stdout

import pytest

from ludonet.cli import (
    ExploreSession,
    IllegalChoice,
    InputError,
    main,
    net_ramifications,
    parse_alphabet,
    parse_net_text,
    parse_ramification,
    serve,
    session_document,
)
from ludonet.ludics.designs import DAIMON, dai_minus, negative, proper
from ludonet.ludics.engine import (
    Net,
    normal_form_strings,
    random_chained_net,
    strong_normalize,
)

import random

AXIOM = "tree 0: C @ {.}\ntree 1: C^ @ {.}\nclass {0:., 1:.}\n"
CYCLE = "tree 0: (C * C^) @ {1, 2}\nclass {0:1, 0:2}\n"
RAM_NET = ("(+ 0 {0 1} (- 0.0 ({} -> dai) ({0} -> dai)) "
           "(- 0.1 ({} -> dai) ({0} -> dai)))\n--\n"
           "(- 0 ({} -> dai) ({0} -> dai) ({0 1} -> dai))\n")
OPEN_NET = ("(+ 0 {1} (- 0.1 ({0} -> dai) ({} -> (+ 5 {}))))\n--\n"
            "(- 5 ({} -> dai))\n")


def run_cli(args, stdin=""):
    out, err = io.StringIO(), io.StringIO()
    real_stdin = None
    import sys
    real_stdin = sys.stdin
    sys.stdin = io.StringIO(stdin)
    try:
        with redirect_stdout(out), redirect_stderr(err):
            code = main(args)
    finally:
        sys.stdin = real_stdin
    return code, out.getvalue(), err.getvalue()


def doc_of(args, stdin=""):
    code, out, err = run_cli(args, stdin)
    assert out, err
    return code, json.loads(out)


# ---------------------------------------------------------------------------
# input plumbing


def test_alphabet_and_ramification_parsing():
    assert parse_ramification("{0 2}") == frozenset({0, 2})
    assert parse_alphabet("{},{0},{0 1}") == [
        frozenset(), frozenset({0}), frozenset({0, 1})]
    with pytest.raises(InputError):
        parse_ramification("0 2")


def test_net_text_round_trip():
    net = parse_net_text(OPEN_NET)
    assert len(net.partners) == 1
    with pytest.raises(InputError):
        parse_net_text("(- 0 ({} -> dai))")     # negative principal
    with pytest.raises(InputError):
        parse_net_text(OPEN_NET + "--\n(+ 3 {})\n")


def test_parse_errors_exit_2_with_position():
    code, out, err = run_cli(["design", "infer-base"], "(+ 0 {0}")
    assert code == 2 and not out
    doc = json.loads(err)
    assert "line" in doc and "column" in doc


def test_bad_formula_exits_2():
    bad = "tree 0: (C 8 C^) @ {1, 2}\nclass {0:1, 0:2}\n"
    code, out, err = run_cli(["check", "dr"], bad)
    assert code == 2 and not out
    assert "bad character" in json.loads(err)["error"]


# ---------------------------------------------------------------------------
# structure checkers


def test_check_accepts_the_axiom():
    code, doc = doc_of(["check", "dr"], AXIOM)
    assert code == 0 and doc["accepted"] and doc["witness"] is None


def test_check_rejects_the_tensor_cycle_with_witness():
    code, doc = doc_of(["check", "dr"], CYCLE)
    assert code == 1 and not doc["accepted"]
    assert doc["witness"]["kind"] == "cycle"


def test_check_runs_every_criterion():
    for criterion in ("dr", "mix", "cp", "aj", "parse-weak", "parse-strong"):
        code, doc = doc_of(["check", criterion], AXIOM)
        assert code == 0 and doc["accepted"], criterion


def test_sequentialize_and_cut_normalize():
    code, doc = doc_of(["sequentialize"], AXIOM)
    assert code == 0 and doc["derivation"]["root"]["rule"] == "daimon-axiom"
    code, doc = doc_of(["sequentialize"], CYCLE)
    assert code == 1 and "witness" in doc

    _, gen = doc_of(["gen", "--kind", "structure", "--seed", "3",
                     "--cuts", "--size", "8"])
    cut_text = gen["items"][0]
    code, doc = doc_of(["cut-normalize", "--trace"], cut_text)
    assert code == 0
    assert doc["trace"][0] == cut_text
    assert doc["trace"][-1] == doc["normal-form"]
    assert "cut" not in doc["normal-form"]


# ---------------------------------------------------------------------------
# design utilities


def test_design_commands():
    text = "(+ 0 {0} (- 0.0 ({} -> dai)))"
    code, doc = doc_of(["design", "infer-base"], text)
    assert code == 0 and doc["base"] == "|- 0"
    code, doc = doc_of(["design", "check", "--base", "|- 0"], text)
    assert code == 0 and doc["accepted"]
    code, doc = doc_of(["design", "check", "--base", "|- 3"], text)
    assert code == 1 and not doc["accepted"]
    code, doc = doc_of(["design", "compare", "--order", "stable"],
                       "(+ 0 {})\n--\n(+ 0 {})")
    assert code == 0 and doc["accepted"]
    code, doc = doc_of(["design", "compare", "--order", "stable"],
                       "(+ 0 {0} (- 0.0))\n--\n(+ 0 {})")
    assert code == 1 and not doc["accepted"]


def test_design_infer_base_rejects_affinity_clashes():
    clash = "(+ 0 {0 1} (- 0.0 ({} -> (+ 7 {}))) (- 0.1 ({} -> (+ 7 {}))))"
    code, doc = doc_of(["design", "infer-base"], clash)
    assert code == 1 and doc["witness"]["rule"] == "affinity"


def test_named_designs():
    code, doc = doc_of(["design", "named", "ram", "--focus", "0",
                        "--ram", "{0 1}", "--alphabet", "{},{0}"])
    assert code == 0
    assert doc["design"] == ("(+ 0 {0 1} (- 0.0 ({} -> dai) ({0} -> dai)) "
                             "(- 0.1 ({} -> dai) ({0} -> dai)))")
    code, doc = doc_of(["design", "named", "fax", "--focus", "0",
                        "--right", "1", "--alphabet", "{0}", "--depth", "1"])
    assert code == 0
    assert doc["design"] == "(- 0 ({0} -> (+ 1 {0} (- 1.0))))"


# ---------------------------------------------------------------------------
# normalization and orthogonality


def test_normalize_weak_document():
    code, doc = doc_of(["normalize"], OPEN_NET)
    assert code == 0
    assert doc["outcome"] == "head" and doc["focus"] == "0"
    assert doc["ramification"] == "{1}"


def test_normalize_strong_on_the_ram_fixture():
    code, doc = doc_of(["normalize", "--strong"], RAM_NET)
    assert code == 0 and doc["chronicles"] == ["dai"]
    assert doc["design"] == "dai"


def test_orthogonal_reports_the_token_pullback():
    net = "(+ 0 {})\n--\n(- 0 ({} -> dai))\n"
    code, doc = doc_of(["orthogonal"], net)
    assert code == 0 and doc["accepted"]
    assert doc["token"]["outcome"] == "daimon"
    assert doc["token"]["visited-principal"] == ["e"]
    code, doc = doc_of(["orthogonal"],
                       "(+ 0 {0} (- 0.0))\n--\n(- 0 ({} -> dai))\n")
    assert code == 1 and not doc["accepted"] and doc["token"] is None


# ---------------------------------------------------------------------------
# behaviours and the lambda bridge


def test_behaviour_biorth_members():
    code, doc = doc_of(["behaviour", "biorth", "--base", "|- 0",
                        "--alphabet", "{},{0}", "--depth", "2", "--members"],
                       "(+ 0 {0} (- 0.0 ({} -> dai)))")
    assert code == 0
    assert doc["result"]["member-count"] == len(doc["members"]) == 8


def test_behaviour_fixture_commands():
    code, doc = doc_of(["behaviour", "directory", "--fixture",
                        "coloured-point", "--which", "points"])
    assert code == 0 and doc["directory"] == ["{0}", "{1}"]
    point = ("(- e ({0} -> (+ 0 {2} (- 0.2))) ({1} -> (+ 1 {180} (- 1.180)))"
             " ({2} -> (+ 2 {9} (- 2.9))))")
    code, doc = doc_of(["behaviour", "incarnation", "--fixture",
                        "coloured-point", "--which", "points",
                        "--design", point])
    assert code == 0
    assert doc["incarnation"] == ("(- e ({0} -> (+ 0 {2} (- 0.2))) "
                                  "({1} -> (+ 1 {180} (- 1.180))))")


def test_behaviour_with_requires_disjoint_directories(tmp_path):
    g1 = tmp_path / "g1.txt"
    g1.write_text("(+ e {0} (- 0 ({} -> dai)))")
    g2 = tmp_path / "g2.txt"
    g2.write_text("(+ e {1} (- 1 ({} -> dai)))")
    code, doc = doc_of(["behaviour", "with", "--base", "e |-",
                        "--alphabet", "{},{0},{1}", "--depth", "2",
                        "--left", str(g1), "--right", str(g2)])
    assert code == 0
    assert doc["result"]["directory"] == ["{0}", "{1}"]
    code, doc = doc_of(["behaviour", "with", "--base", "e |-",
                        "--alphabet", "{},{0},{1}", "--depth", "2",
                        "--left", str(g1), "--right", str(g1)])
    assert code == 1
    assert "disjointness" in doc["witness"]["reason"]


def test_behaviour_delocate():
    code, doc = doc_of(["behaviour", "delocate", "--base", "e |-",
                        "--alphabet", "{},{0}", "--depth", "2",
                        "--tag", "1", "--stride", "2"],
                       "(+ e {0} (- 0))")
    assert code == 0 and doc["generators"] == ["(+ e {1} (- 1))"]
    assert "{1}" in doc["result"]["universe"]["alphabet"]


def test_lambda_commands():
    text = "(+ 0 {0} (- 0.0 ({} -> dai)))"
    code, doc = doc_of(["lambda", "to-term", "--base", "|- 0"], text)
    assert code == 0 and doc["term"] == "x0{{{} = \\{}.dai}}@{0}"
    code, back = doc_of(["lambda", "to-slice", "--base", "|- 0"], doc["term"])
    assert code == 0 and back["design"] == text
    code, doc = doc_of(["lambda", "run"],
                       doc["term"] + "\n--\nx0 = {{0} = \\{y}.dai}")
    assert code == 0 and doc["outcome"] == "daimon" and doc["steps"] == 1
    code, doc = doc_of(["lambda", "run", "--strong"], "w{{}}@{1}")
    assert code == 0 and doc["term"] == "w{{}}@{1}"
    code, doc = doc_of(["lambda", "to-slice", "--base", "|- 3"],
                       "x{{{} = \\{}.x{}@{}}}@{3}")
    assert code == 1 and "affinity" in doc["witness"]["reason"]


# ---------------------------------------------------------------------------
# corpora


GOLDEN_HASHES = {
    "structure": "f88e9c0d17896e37a37550e56e7f7b438e9c4eaaeb4087b7ec4c3997a59bcbf9",
    "net": "1ce381a124aeb1455f83256a24133b9889fce9be137e6c43195eeb8c21fc2be3",
    "design": "c207a3c535f34c53abfde0465000f90956403aebcaa54a2a7c7acc69c7b2e57a",
}

GEN_ARGS = {
    "structure": ["gen", "--kind", "structure", "--seed", "42", "--count",
                  "5", "--size", "8", "--mode", "paraproof", "--mix"],
    "net": ["gen", "--kind", "net", "--seed", "9", "--count", "4",
            "--alphabet", "{},{0},{0 1}", "--depth", "3"],
    "design": ["gen", "--kind", "design", "--seed", "2", "--count", "6",
               "--base", "|- 0 4", "--alphabet", "{},{0},{2}", "--depth", "3"],
}


@pytest.mark.parametrize("kind", sorted(GOLDEN_HASHES))
def test_gen_corpora_are_stable(kind):
    code, out, _ = run_cli(GEN_ARGS[kind])
    assert code == 0
    assert hashlib.sha256(out.encode()).hexdigest() == GOLDEN_HASHES[kind]


def test_gen_output_parses_back():
    _, doc = doc_of(GEN_ARGS["net"])
    for item in doc["items"]:
        parse_net_text(item)


# ---------------------------------------------------------------------------
# exploration sessions


def test_session_on_immediate_daimon():
    net = Net(DAIMON, (dai_minus((0,), [frozenset()]),))
    s = ExploreSession(net, [frozenset()])
    doc = session_document(s, include_id=False)
    assert doc["outcome"] == "daimon" and doc["q"] == []
    assert doc["chronicle"] == "dai" and doc["ended"]


def test_session_offers_every_son_ramification_pair():
    net = parse_net_text(OPEN_NET)
    alphabet = net_ramifications(net)
    s = ExploreSession(net, alphabet)
    assert s.outcome == "head"
    head_ram = frozenset({1})
    assert s.offered == [(i, j) for i in sorted(head_ram) for j in s.alphabet]
    with pytest.raises(IllegalChoice):
        s.choose(7, frozenset())


def test_session_replays_bit_exactly():
    net = parse_net_text(OPEN_NET)
    alphabet = net_ramifications(net)
    first = ExploreSession(net, alphabet)
    first.choose(1, frozenset({0}))
    second = ExploreSession(net, alphabet)
    second.choose(1, frozenset({0}))
    assert (json.dumps(session_document(first, False), sort_keys=True)
            == json.dumps(session_document(second, False), sort_keys=True))


def test_session_depth_budget_stops_offering():
    net = parse_net_text(OPEN_NET)
    s = ExploreSession(net, net_ramifications(net), depth=1)
    assert s.outcome == "head" and s.offered == [] and s.ended


def test_exhaustive_exploration_matches_strong_normalization():
    rng = random.Random(5)
    alphabet = [frozenset(), frozenset({0}), frozenset({0, 1})]
    for _ in range(12):
        net = random_chained_net(rng, alphabet, depth=3)
        offered = net_ramifications(net)
        want = set(normal_form_strings(
            strong_normalize(net, offered, depth=3)))
        got = set()
        stack = [[]]
        while stack:
            history = stack.pop()
            s = ExploreSession(net, offered, depth=3)
            for i, j in history:
                s.choose(i, j)
            got.add(session_document(s, False)["chronicle"])
            for choice in s.offered:
                stack.append(history + [choice])
        assert got == want


def test_explore_command():
    code, doc = doc_of(["explore", "--choose", "1 {0}"], OPEN_NET)
    assert code == 0 and doc["outcome"] == "daimon"
    assert doc["chronicle"] == "(+ 0 {1}) (- 0.1 {0}) dai"
    assert doc["history"] == [{"i": 1, "ram": "{0}"}]
    code, out, err = run_cli(["explore", "--choose", "4 {0}"], OPEN_NET)
    assert code == 2 and "illegal" in err


# ---------------------------------------------------------------------------
# the service


@pytest.fixture(scope="module")
def service():
    server = serve(0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield "http://127.0.0.1:%d" % server.server_address[1]
    server.shutdown()
    server.server_close()


def _post(base, path, obj):
    req = urllib.request.Request(base + path, json.dumps(obj).encode(),
                                 {"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, resp.read().decode()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode()


def _get(base, path):
    try:
        with urllib.request.urlopen(base + path) as resp:
            return resp.status, resp.read().decode()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode()


def test_service_session_lifecycle(service):
    code, body = _post(service, "/sessions", {"net": OPEN_NET})
    assert code == 201
    doc = json.loads(body)
    assert doc["outcome"] == "head" and doc["id"]
    code, body = _get(service, "/sessions/" + doc["id"])
    assert code == 200 and json.loads(body) == doc

    code, body = _post(service, "/sessions/%s/choice" % doc["id"],
                       {"i": 1, "ram": "{0}"})
    after = json.loads(body)
    assert code == 200 and after["outcome"] == "daimon"
    assert after["chronicle"] == "(+ 0 {1}) (- 0.1 {0}) dai"

    code, body = _post(service, "/sessions/%s/choice" % doc["id"],
                       {"i": 1, "ram": "{0}"})
    rejected = json.loads(body)
    assert code == 409 and rejected["error"] == "illegal choice"
    assert rejected["offered"] == []

    code, body = _get(service, "/sessions/missing")
    assert code == 404


def test_service_rejects_illegal_choice_with_offers(service):
    code, body = _post(service, "/sessions", {"net": OPEN_NET})
    sid = json.loads(body)["id"]
    code, body = _post(service, "/sessions/%s/choice" % sid,
                       {"i": 9, "ram": "{}"})
    doc = json.loads(body)
    assert code == 409
    assert {"i": 1, "ram": "{0}"} in doc["offered"]


def test_service_matches_cli_bytes(service):
    code, body = _post(service, "/check",
                       {"criterion": "dr", "structure": CYCLE})
    cli_code, out, _ = run_cli(["check", "dr"], CYCLE)
    assert code == 200 and cli_code == 1 and body == out

    code, body = _post(service, "/normalize",
                       {"net": RAM_NET, "mode": "strong"})
    cli_code, out, _ = run_cli(["normalize", "--strong"], RAM_NET)
    assert code == 200 and cli_code == 0 and body == out

    code, body = _post(service, "/behaviour",
                       {"op": "directory", "fixture": "coloured-point",
                        "which": "points"})
    cli_code, out, _ = run_cli(["behaviour", "directory", "--fixture",
                                "coloured-point", "--which", "points"])
    assert code == 200 and cli_code == 0 and body == out


def test_service_orthogonal_endpoint(service):
    net = "(+ 0 {})\n--\n(- 0 ({} -> dai))\n"
    code, body = _post(service, "/orthogonal", {"net": net})
    doc = json.loads(body)
    assert code == 200 and doc["accepted"]
    assert doc["token"]["pullback-principal"] == "(+ 0 {})"


def test_service_reports_input_errors(service):
    code, body = _post(service, "/check",
                       {"criterion": "dr", "structure": "garbage"})
    assert code == 400 and "error" in json.loads(body)
    code, body = _post(service, "/sessions", {"net": "(- 0)"})
    assert code == 400


def test_service_replay_is_deterministic(service):
    docs = []
    for _ in range(2):
        code, body = _post(service, "/sessions", {"net": OPEN_NET})
        sid = json.loads(body)["id"]
        code, body = _post(service, "/sessions/%s/choice" % sid,
                           {"i": 1, "ram": "{}"})
        doc = json.loads(body)
        doc.pop("id")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_session_pullback_on_closed_daimon_net():
    net = parse_net_text("(+ 0 {})\n--\n(- 0 ({} -> dai))\n")
    s = ExploreSession(net, [])
    doc = session_document(s, False)
    assert doc["pullback"]["outcome"] == "daimon"
    assert doc["pullback"]["pullback-principal"] == "(+ 0 {})"
    assert doc["pullback"]["pullback-partner"] == "(- 0 ({} -> dai))"
    assert doc["pullback"]["visited-partner"]
