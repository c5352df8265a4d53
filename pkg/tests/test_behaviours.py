"""Behaviour layer: universes, closures, incarnation, additives."""

import json
import random

import pytest

from ludonet.ludics.behaviours import (
    Behaviour,
    BehaviourError,
    Universe,
    UniverseError,
    additive,
    behaviour,
    behaviour_to_obj,
    biorthogonal,
    coloured_point_fixture,
    contains,
    delocate,
    delocate_behaviour,
    delocated_alphabet,
    design_in_universe,
    directory,
    disjoint_behaviours,
    dual_behaviour,
    enumerate_designs,
    incarnation,
    incarnation_set,
    members,
    orthogonal_set,
    relevant_addresses,
    tagging_delocation,
    validate_delocation,
    FIXTURES,
)
from ludonet.ludics.designs import (
    DAIMON,
    OMEGA,
    DesignError,
    check_design,
    compare,
    dai_minus,
    design_intersection,
    design_union,
    format_design,
    format_ramification,
    negative,
    negative_base,
    positive_base,
    proper,
    ram_design,
    ram_key,
    skunk,
    to_chronicles,
)

E = ()
RAME = frozenset()
RAM0 = frozenset({0})
RAM1 = frozenset({1})

# two small spaces every law test can afford to enumerate
R_PAIR = frozenset({RAME, RAM0})
UP = Universe(positive_base(E), R_PAIR, 2)
UN = UP.dual


def fmt_rams(rams):
    return sorted(map(format_ramification, rams))


# ---------------------------------------------------------------------------
# universes and enumeration


def test_universe_validation():
    with pytest.raises(UniverseError):
        Universe(positive_base(E), R_PAIR, -1)
    with pytest.raises(UniverseError):
        Universe(positive_base(E), R_PAIR, 9)
    with pytest.raises(UniverseError):
        Universe(negative_base(E),
                 frozenset(frozenset({k}) for k in range(9)), 1)


def test_universe_dual_swaps_polarity():
    assert UP.dual == UN
    assert UN.dual == UP
    assert UP.address == E and UN.address == E


def test_smallest_space_has_two_designs():
    u = Universe(positive_base(E), frozenset({RAME}), 1)
    got = set(enumerate_designs(u))
    assert got == {DAIMON, proper(E, RAME, {})}


def test_enumeration_monotone_in_depth():
    u1 = Universe(positive_base(E), R_PAIR, 1)
    e1, e2 = enumerate_designs(u1), enumerate_designs(UP)
    assert len(e1) == 6 and len(e2) == 16
    assert set(e1) < set(e2)


def test_enumerated_designs_all_check():
    for u in (UP, UN):
        for d in enumerate_designs(u):
            assert check_design(d, u.base)
            assert design_in_universe(d, u)


def test_membership_agrees_with_enumeration():
    deeper = Universe(positive_base(E), R_PAIR, 3)
    inside = [d for d in enumerate_designs(deeper, cap=300000)
              if design_in_universe(d, UP)]
    assert frozenset(inside) == frozenset(enumerate_designs(UP))


def test_negative_enumeration_counts_value_depth():
    # branch values may use the full depth budget
    assert len(enumerate_designs(UN)) == 34


def test_enumeration_cap_raises():
    wide = Universe(negative_base(E),
                    frozenset({RAM0, RAM1, frozenset({2})}), 2)
    with pytest.raises(UniverseError):
        enumerate_designs(wide, cap=5000)


def test_enumeration_is_deterministic():
    assert enumerate_designs(UP) == enumerate_designs(UP)


def test_membership_rejects_foreign_shapes():
    assert not design_in_universe(OMEGA, UP)
    assert not design_in_universe(skunk(E), UP)
    assert not design_in_universe(DAIMON, UN)
    stranger = proper(E, frozenset({7}), {7: skunk((7,))})
    assert not design_in_universe(stranger, UP)


# ---------------------------------------------------------------------------
# closures


def test_orthogonal_set_of_nothing_is_everything():
    pool = orthogonal_set([], UP)
    assert frozenset(pool) == frozenset(enumerate_designs(UN))


def test_daimon_in_every_positive_behaviour():
    rng = random.Random(3)
    negs = enumerate_designs(UN)
    for _ in range(10):
        G = behaviour(rng.sample(negs, rng.randrange(1, 4)), UP)
        assert contains(G, DAIMON)


def test_behaviour_rejects_misplaced_generators():
    with pytest.raises(BehaviourError):
        behaviour([DAIMON], UP)          # daimon is not a counter-design here
    with pytest.raises(BehaviourError):
        behaviour([skunk(E)], UP, form="biorth")


def test_singleton_biorthogonal_is_the_upper_cone():
    rng = random.Random(11)
    pool = enumerate_designs(UP)
    for _ in range(12):
        phi = rng.choice(pool)
        G = biorthogonal([phi], UP)
        cone = frozenset(d for d in pool if compare(phi, d, "obs"))
        assert frozenset(members(G)) == cone


def test_biorthogonal_extensive_and_idempotent():
    rng = random.Random(5)
    pool = enumerate_designs(UP)
    for _ in range(10):
        gens = rng.sample(pool, rng.randrange(1, 4))
        G = biorthogonal(gens, UP)
        mem = frozenset(members(G))
        assert all(g in mem for g in gens)
        again = biorthogonal(members(G), UP)
        assert frozenset(members(again)) == mem


def test_members_upward_closed():
    rng = random.Random(17)
    pool = enumerate_designs(UP)
    negs = enumerate_designs(UN)
    for _ in range(8):
        G = behaviour(rng.sample(negs, rng.randrange(1, 4)), UP)
        mem = frozenset(members(G))
        for m in mem:
            for d in pool:
                if compare(m, d, "obs"):
                    assert d in mem


def test_members_stable_under_compatible_meets():
    rng = random.Random(23)
    negs = enumerate_designs(UN)
    pos = enumerate_designs(UP)
    checked = 0
    for _ in range(8):
        for u, pool in ((UP, negs), (UN, pos)):
            G = behaviour(rng.sample(pool, rng.randrange(1, 4)), u)
            mem = tuple(members(G))
            for a in mem:
                for b in mem:
                    try:
                        bound = design_union(a, b)
                    except DesignError:
                        continue
                    assert contains(G, design_intersection(a, b))
                    assert contains(G, bound)
                    checked += 1
    assert checked > 100


def test_dual_behaviour_roundtrip():
    rng = random.Random(29)
    negs = enumerate_designs(UN)
    for _ in range(6):
        G = behaviour(rng.sample(negs, rng.randrange(1, 4)), UP)
        back = dual_behaviour(dual_behaviour(G))
        assert frozenset(members(back)) == frozenset(members(G))


# ---------------------------------------------------------------------------
# incarnation


def test_incarnation_requires_membership():
    G = behaviour([skunk(E)], UP)
    outsider = proper(E, frozenset({5}), {5: skunk((5,))})
    with pytest.raises(BehaviourError):
        incarnation(outsider, G)
    diverging = behaviour([negative(E, {RAM0: proper((0,), RAM0, {
        0: skunk((0, 0))})})], UP)
    with pytest.raises(BehaviourError):
        incarnation(proper(E, RAME, {}), diverging)


def test_incarnation_of_daimon_is_daimon():
    G = behaviour([skunk(E)], UP)
    assert incarnation(DAIMON, G) is DAIMON


def test_incarnation_in_the_full_negative_behaviour_is_silent():
    top = behaviour([], UN)
    rng = random.Random(31)
    pool = enumerate_designs(UN)
    for _ in range(6):
        d = rng.choice(pool)
        assert incarnation(d, top) == skunk(E)


def test_incarnation_is_the_least_member_below():
    rng = random.Random(37)
    negs = enumerate_designs(UN)
    pos = enumerate_designs(UP)
    for _ in range(8):
        G = behaviour(rng.sample(negs, rng.randrange(1, 3)), UP)
        for m in members(G):
            inc = incarnation(m, G)
            assert contains(G, inc)
            assert compare(inc, m, "stable")
            for other in pos:
                if contains(G, other) and compare(other, m, "stable"):
                    assert compare(inc, other, "stable")


def test_dual_recognized_by_incarnations_alone():
    rng = random.Random(41)
    negs = enumerate_designs(UN)
    pos = enumerate_designs(UP)
    for u, pool in ((UP, negs), (UN, pos)):
        for _ in range(6):
            G = behaviour(rng.sample(pool, rng.randrange(1, 4)), u)
            via_all = dual_behaviour(G)
            via_incs = Behaviour(u.dual, incarnation_set(G), G.testers,
                                 "biorth")
            assert frozenset(members(via_all)) == frozenset(members(via_incs))


# ---------------------------------------------------------------------------
# directories


def test_directory_of_the_full_negative_behaviour_is_empty():
    assert directory(behaviour([], UN)) == frozenset()


def test_directory_of_the_full_positive_behaviour_is_the_alphabet():
    assert directory(behaviour([], UP)) == R_PAIR


def test_directory_matches_root_actions_of_members():
    rng = random.Random(43)
    negs = enumerate_designs(UN)
    for _ in range(8):
        G = behaviour(rng.sample(negs, rng.randrange(1, 4)), UP)
        roots = frozenset(m.ramification for m in members(G)
                          if m is not DAIMON)
        assert directory(G) == roots


def test_directory_invariant_under_dual():
    rng = random.Random(47)
    negs = enumerate_designs(UN)
    pos = enumerate_designs(UP)
    for u, pool in ((UP, negs), (UN, pos)):
        for _ in range(8):
            G = behaviour(rng.sample(pool, rng.randrange(1, 4)), u)
            assert directory(dual_behaviour(G)) == directory(G)


# ---------------------------------------------------------------------------
# additives


def _bare():
    return proper(E, RAME, {})


def _opener():
    return proper(E, RAM0, {0: dai_minus((0,), sorted(R_PAIR, key=ram_key))})


def test_plus_of_disjoint_is_the_plain_union():
    G = biorthogonal([_bare()], UP)
    H = biorthogonal([_opener()], UP)
    assert disjoint_behaviours(G, H)
    S = additive(G, H, "plus")
    assert frozenset(members(S)) == frozenset(members(G)) | frozenset(members(H))


def test_plus_incarnation_is_the_union_of_incarnations():
    G = biorthogonal([_bare()], UP)
    H = biorthogonal([_opener()], UP)
    S = additive(G, H, "plus")
    assert (frozenset(incarnation_set(S))
            == frozenset(incarnation_set(G)) | frozenset(incarnation_set(H)))


def test_positive_disjointness_is_meeting_only_in_daimon():
    G = biorthogonal([_bare()], UP)
    H = biorthogonal([_opener()], UP)
    assert frozenset(members(G)) & frozenset(members(H)) == {DAIMON}
    mixed = biorthogonal([_bare(), _opener()], UP)
    assert not disjoint_behaviours(G, mixed)
    assert frozenset(members(G)) & frozenset(members(mixed)) != {DAIMON}


def test_additive_refuses_shared_directories():
    G = biorthogonal([_bare()], UP)
    mixed = biorthogonal([_bare(), _opener()], UP)
    with pytest.raises(BehaviourError, match="disjointness violation"):
        additive(G, mixed, "plus")
    with pytest.raises(BehaviourError, match="disjointness violation"):
        additive(G, mixed, "with")
    # unrestricted forms still work
    additive(G, mixed, "intersect")
    additive(G, mixed, "union")


def test_union_can_grow_beyond_the_plain_union():
    pool = enumerate_designs(UP)
    lo = biorthogonal([pool[1]], UP)
    hi = biorthogonal([pool[-1]], UP)
    joined = additive(lo, hi, "union")
    assert (frozenset(members(lo)) | frozenset(members(hi))
            <= frozenset(members(joined)))


def test_intersect_is_the_tester_union():
    G = biorthogonal([_bare()], UP)
    H = biorthogonal([_opener()], UP)
    I = additive(G, H, "intersect")
    assert frozenset(I.testers) == frozenset(G.testers) | frozenset(H.testers)
    assert (frozenset(members(I))
            == frozenset(members(G)) & frozenset(members(H)))


# negative pair on a two-letter alphabet, each probing one field
R_TWO = frozenset({RAM0, RAM1})
UN_TWO = Universe(negative_base(E), R_TWO, 1)


def _field_probe(bias):
    alpha = sorted(R_TWO, key=ram_key)
    return proper(E, frozenset({bias}), {bias: dai_minus((bias,), alpha)})


def test_with_incarnation_bijection():
    A = behaviour([_field_probe(0)], UN_TWO)
    B = behaviour([_field_probe(1)], UN_TWO)
    W = additive(A, B, "with")
    IA, IB, IW = incarnation_set(A), incarnation_set(B), incarnation_set(W)
    assert (len(IA), len(IB), len(IW)) == (3, 3, 9)
    paired = {design_union(a, b) for a in IA for b in IB}
    assert paired == set(IW)

    def restrict(d, rams):
        return negative(d.focus, {j: v for j, v in d.branches if j in rams})

    for w in IW:
        a = restrict(w, directory(A))
        b = restrict(w, directory(B))
        assert a in set(IA) and b in set(IB)
        assert design_union(a, b) == w


def test_dual_of_with_is_union_of_duals():
    A = behaviour([_field_probe(0)], UN_TWO)
    B = behaviour([_field_probe(1)], UN_TWO)
    W = additive(A, B, "with")
    got = frozenset(members(dual_behaviour(W)))
    want = (frozenset(members(dual_behaviour(A)))
            | frozenset(members(dual_behaviour(B))))
    assert got == want


def test_negative_disjointness_means_disjoint_chronicles():
    def prefixes(d):
        out = set()
        for ch in to_chronicles(d):
            for k in range(1, len(ch.actions) + 1):
                out.add(ch.actions[:k])
        return out

    A = behaviour([_field_probe(0)], UN_TWO)
    B = behaviour([_field_probe(1)], UN_TWO)
    for a in incarnation_set(A):
        for b in incarnation_set(B):
            assert not (prefixes(a) & prefixes(b))
    mixed = behaviour([_field_probe(0), _field_probe(1)], UN_TWO)
    assert any(prefixes(x) & prefixes(y)
               for x in incarnation_set(mixed) for y in incarnation_set(A))


# ---------------------------------------------------------------------------
# delocation


def test_relevant_addresses_cover_the_space():
    addrs = set(relevant_addresses(UP))
    for d in enumerate_designs(UP):
        stack = [d]
        while stack:
            node = stack.pop()
            if hasattr(node, "focus"):
                assert node.focus in addrs
            if hasattr(node, "children"):
                stack.extend(c for _, c in node.children)
            elif hasattr(node, "branches"):
                stack.extend(v for _, v in node.branches)


def test_identity_delocation():
    ident = lambda a: a
    assert validate_delocation(ident, UP)
    for d in enumerate_designs(UP):
        assert delocate(d, ident) == d


def test_tagging_delocation_validates_and_splits():
    R_ONE = frozenset({RAM0})
    u = Universe(negative_base(E), R_ONE, 1)
    g = proper(E, RAM0, {0: dai_minus((0,), [RAM0])})
    G = behaviour([g], u)
    t0, t1 = tagging_delocation(0), tagging_delocation(1)
    assert validate_delocation(t0, u) and validate_delocation(t1, u)
    wide = Universe(negative_base(E),
                    delocated_alphabet(u, t0) | delocated_alphabet(u, t1), 1)
    D0 = delocate_behaviour(G, t0, wide)
    D1 = delocate_behaviour(G, t1, wide)
    assert directory(D0) == frozenset({RAM0})
    assert directory(D1) == frozenset({RAM1})
    assert disjoint_behaviours(D0, D1)
    W = additive(D0, D1, "with")
    assert (len(incarnation_set(W))
            == len(incarnation_set(D0)) * len(incarnation_set(D1)))


def test_delocated_designs_still_check():
    t1 = tagging_delocation(1, stride=3)
    wide_alphabet = delocated_alphabet(UN, t1)
    wide = Universe(negative_base(E), wide_alphabet, 2)
    for d in enumerate_designs(UN, cap=100000):
        image = delocate(d, t1)
        assert design_in_universe(image, wide)


def test_non_injective_rename_fails_validation():
    crush = lambda a: a[:1] if len(a) > 1 else a
    assert not validate_delocation(crush, UP)
    with pytest.raises(BehaviourError):
        tagging_delocation(2, stride=2)


# ---------------------------------------------------------------------------
# the coloured record fixture


def test_fixture_registry():
    assert set(FIXTURES) == {"coloured-point"}
    assert coloured_point_fixture()["universe"].depth == 2


def test_coloured_incarnation_keeps_probed_fields_only():
    fx = coloured_point_fixture()
    psi, G = fx["point"], fx["coloured-circles"]
    assert contains(G, psi)
    expected = negative(E, {
        RAM0: proper((0,), frozenset({2}), {2: skunk((0, 2))}),
        frozenset({2}): proper((2,), frozenset({9}), {9: skunk((2, 9))}),
    })
    assert incarnation(psi, G) == expected


def test_coloured_incarnation_in_the_full_behaviour_is_silent():
    fx = coloured_point_fixture()
    top = behaviour([], fx["universe"])
    assert incarnation(fx["point"], top) == skunk(E)


def test_coloured_directories():
    fx = coloured_point_fixture()
    assert fmt_rams(directory(fx["coloured-circles"])) == ["{0}", "{2}"]
    assert fmt_rams(directory(fx["points"])) == ["{0}", "{1}"]
    assert fmt_rams(directory(fx["circles"])) == ["{0}"]
    assert fmt_rams(directory(fx["colours"])) == ["{2}"]


def test_coloured_intersections():
    fx = coloured_point_fixture()
    both = additive(fx["circles"], fx["colours"], "intersect")
    assert both == fx["coloured-circles"]
    assert additive(fx["circles"], fx["colours"], "with") == both
    with pytest.raises(BehaviourError, match="disjointness violation"):
        additive(fx["coloured-circles"], fx["points"], "with")


def test_coloured_point_membership_across_behaviours():
    fx = coloured_point_fixture()
    psi = fx["point"]
    for name in ("coloured-circles", "points", "circles", "colours"):
        assert contains(fx[name], psi)
    # dropping the colour field leaves the colour-probing behaviours
    partial = negative(E, {
        RAM0: proper((0,), frozenset({2}), {2: skunk((0, 2))}),
        RAM1: proper((1,), frozenset({180}), {180: skunk((1, 180))}),
    })
    assert contains(fx["points"], partial)
    assert contains(fx["circles"], partial)
    assert not contains(fx["colours"], partial)
    assert not contains(fx["coloured-circles"], partial)


def test_serialization_shape():
    fx = coloured_point_fixture()
    obj = behaviour_to_obj(fx["coloured-circles"], cap=5000)
    assert json.loads(json.dumps(obj)) == obj
    assert obj["universe"]["base"] == "e |-"
    assert obj["universe"]["alphabet"] == ["{0}", "{1}", "{2}", "{9}", "{180}"]
    assert obj["member-count"] is None       # space too large to enumerate
    assert obj["directory"] == ["{0}", "{2}"]
    assert len(obj["generators"]) == 2

    small = behaviour([skunk(E)], UP)
    small_obj = behaviour_to_obj(small)
    assert small_obj["member-count"] == len(members(small))
