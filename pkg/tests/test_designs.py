import random

import pytest

from ludonet.ludics.designs import (
    DAIMON,
    OMEGA,
    Base,
    ChAction,
    Chronicle,
    ChronicleSetError,
    Daimon,
    DesignError,
    DesignParseError,
    Fail,
    Negative,
    Omega,
    Proper,
    addresses_disjoint,
    base_errors,
    base_parity_warnings,
    check_design,
    compare,
    dai_minus,
    decompose,
    design_depth,
    design_intersection,
    design_size,
    design_union,
    directory_design,
    fax,
    fax_generator,
    format_address,
    format_base,
    format_design,
    from_chronicles,
    infer_base,
    infer_base_negative,
    is_slice,
    negative,
    negative_base,
    parse_address,
    parse_base,
    parse_design,
    positive_base,
    proper,
    ram_design,
    random_negative_design,
    random_positive_design,
    skunk,
    skunk_plus,
    sub_designs,
    sub_positives,
    to_chronicles,
)

E = ()
RAM01 = frozenset({0, 1})
RAM0 = frozenset({0})
RAME = frozenset()


def plus(focus, ram, children=None):
    ram = frozenset(ram)
    children = dict(children or {})
    for i in ram:
        children.setdefault(i, skunk(focus + (i,)))
    return proper(focus, ram, children)


# ---------------------------------------------------------------------------
# addresses and bases


def test_address_formatting_round_trip():
    for addr in [E, (0,), (1, 2, 3)]:
        assert parse_address(format_address(addr)) == addr
    assert format_address(E) == "e"


def test_address_disjointness():
    assert addresses_disjoint((0,), (1,))
    assert not addresses_disjoint((0,), (0, 1))
    assert not addresses_disjoint(E, (4,))


def test_base_well_formedness():
    assert base_errors(positive_base((0,), (1,))) == []
    assert base_errors(positive_base(E, (1,)))
    assert base_errors(negative_base((0,), (0, 1)))


def test_base_parity_is_a_warning_not_an_error():
    mixed = positive_base((0,), (1, 2))
    assert base_errors(mixed) == []
    assert base_parity_warnings(mixed)
    assert base_parity_warnings(negative_base((0,), (1,)))
    assert base_parity_warnings(negative_base((0,), (1, 2))) == []


def test_base_text_round_trip():
    for b in [positive_base(E), positive_base((0,), (1,)), negative_base((2,), (3,))]:
        assert parse_base(format_base(b)) == b


# ---------------------------------------------------------------------------
# construction and canonical form


def test_omega_branches_are_never_stored():
    assert negative((0,), {RAME: OMEGA}) == skunk((0,))
    assert negative((0,), {RAME: DAIMON}).support == {RAME}


def test_child_focus_must_extend_action_focus():
    with pytest.raises(DesignError):
        proper(E, RAM0, {0: skunk((7,))})
    with pytest.raises(DesignError):
        proper(E, RAM0, {})


def test_design_size_and_depth():
    d = ram_design(E, {0, 1}, [RAME])
    # one positive action plus one daimon leaf per bias
    assert design_size(d) == 3
    assert design_depth(d) == 1
    assert design_size(OMEGA) == 0
    assert design_size(DAIMON) == 1


def test_is_slice():
    assert is_slice(DAIMON)
    assert is_slice(skunk_plus(E, {0, 1}))
    assert not is_slice(dai_minus(E, [RAME, RAM0]))
    assert is_slice(dai_minus(E, [RAM0]))


# ---------------------------------------------------------------------------
# base inference


def test_infer_base_on_leaves():
    assert infer_base(DAIMON, [(1,)]) == positive_base((1,))
    assert infer_base(OMEGA, []) == positive_base()


def test_infer_base_collects_the_focus():
    assert infer_base(plus((4,), {0, 1})) == positive_base((4,))


def test_infer_base_reports_deep_free_addresses():
    # the branch under bias 0 calls on the otherwise-unmentioned address 9
    d = plus((1,), {0}, {0: negative((1, 0), {RAME: plus((9,), RAME)})})
    assert infer_base(d) == positive_base((1,), (9,))


def test_infer_base_affinity_failure():
    clash = plus(
        (1,),
        {0, 1},
        {
            0: negative((1, 0), {RAME: plus((9,), RAME)}),
            1: negative((1, 1), {RAME: plus((9,), RAME)}),
        },
    )
    result = infer_base(clash)
    assert isinstance(result, Fail)
    assert result.rule == "affinity"
    assert "9" in result.detail


def test_same_bias_branches_may_share_an_address():
    shared = plus(
        (1,),
        {0},
        {
            0: negative(
                (1, 0),
                {RAME: plus((9,), RAME), RAM0: plus((9,), RAME)},
            )
        },
    )
    assert infer_base(shared) == positive_base((1,), (9,))


def test_infer_base_ill_formed_base_failure():
    # reusing the consumed address 3.0 as a free focus below its own opener
    d = plus((3,), {0}, {0: negative((3, 0), {RAME: plus((3, 0), RAME)})})
    result = infer_base(d)
    assert isinstance(result, Fail)
    assert result.rule == "base"


def test_infer_base_failure_propagates_from_sub_designs():
    inner = plus(
        (1,),
        {0, 1},
        {
            0: negative((1, 0), {RAME: plus((9,), RAME)}),
            1: negative((1, 1), {RAME: plus((9,), RAME)}),
        },
    )
    outer = plus((2,), {5}, {5: negative((2, 5), {RAME: inner})})
    result = infer_base(outer)
    assert isinstance(result, Fail)
    assert result.rule == "affinity"


def test_infer_base_negative():
    assert infer_base_negative(skunk((2,))) == negative_base((2,))
    assert infer_base_negative(dai_minus((2,), [RAME, RAM0])) == negative_base((2,))
    uses_context = negative((2,), {RAME: plus((5,), RAME)})
    assert infer_base_negative(uses_context) == negative_base((2,), (5,))


def test_check_design_examples():
    assert check_design(DAIMON, positive_base())
    assert check_design(DAIMON, positive_base((1,), (2,)))
    assert not check_design(DAIMON, positive_base(E, (1,)))  # ill-formed base
    assert check_design(skunk((1,)), negative_base((1,)))
    assert not check_design(skunk((1,)), positive_base((1,)))
    assert check_design(plus(E, {0, 1}), positive_base(E))
    assert not check_design(plus(E, {0, 1}), positive_base((1,)))


def test_check_design_allows_weakening():
    # daimon types at any well-formed base, a proper design at any superset
    d = plus((1,), {0})
    assert check_design(d, positive_base((1,), (2,)))
    assert not check_design(d, positive_base((2,)))


def test_weakening_must_stay_well_formed():
    d = plus((1,), RAME)
    assert not check_design(d, positive_base((1,), (1, 0)))


def test_inference_matches_check_on_random_designs():
    rng = random.Random(11)
    for _ in range(150):
        d = random_positive_design(rng, [(0,), (1,)], [RAME, RAM0], 3)
        result = infer_base(d, [(0,), (1,)])
        assert isinstance(result, Base)
        assert check_design(d, result)


# ---------------------------------------------------------------------------
# chronicles


def test_leaf_chronicles():
    assert to_chronicles(OMEGA) == frozenset()
    assert to_chronicles(DAIMON) == {Chronicle((), "dai")}
    assert to_chronicles(skunk((1,))) == frozenset()


def test_ram_design_chronicles_by_hand():
    d = ram_design(E, {0, 1}, [RAME])
    head = ChAction("+", E, RAM01)
    expected = {
        Chronicle((head,), None),
        Chronicle((head, ChAction("-", (0,), RAME)), "dai"),
        Chronicle((head, ChAction("-", (1,), RAME)), "dai"),
    }
    assert to_chronicles(d) == expected


def test_chronicle_round_trip_on_named_designs():
    cases = [
        (DAIMON, positive_base()),
        (ram_design(E, {0, 1}, [RAME, RAM0]), positive_base(E)),
        (skunk_plus(E, {2}), positive_base(E)),
        (dai_minus(E, [RAME, RAM01]), negative_base(E)),
        (skunk(E), negative_base(E)),
        (fax((1,), (2,), [RAM0], 2), negative_base((1,), (2,))),
    ]
    for d, b in cases:
        assert from_chronicles(to_chronicles(d), b) == d


def test_chronicle_round_trip_on_random_designs():
    rng = random.Random(23)
    for _ in range(120):
        d = random_negative_design(rng, E, [RAME, RAM0, RAM01], 3)
        assert from_chronicles(to_chronicles(d), negative_base(E)) == d


def test_from_chronicles_rejects_bad_alternation():
    a = ChAction("+", E, RAM0)
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles([Chronicle((a, a), None)], positive_base(E))
    assert err.value.condition == "alternation"


def test_from_chronicles_requires_prefix_closure():
    head = ChAction("+", E, RAM0)
    deep = Chronicle((head, ChAction("-", (0,), RAME), ChAction("+", (1,), RAME)), None)
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles([deep], positive_base(E, (1,)))
    assert err.value.condition == "prefix-closure"


def test_from_chronicles_rejects_positive_divergence():
    c1 = Chronicle((ChAction("+", E, RAM0),), None)
    c2 = Chronicle((ChAction("+", E, RAM01),), None)
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles([c1, c2], positive_base(E))
    assert err.value.condition == "coherence"


def test_from_chronicles_rejects_daimon_against_action():
    c1 = Chronicle((), "dai")
    c2 = Chronicle((ChAction("+", E, RAM0),), None)
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles([c1, c2], positive_base(E))
    assert err.value.condition == "coherence"


def test_from_chronicles_checks_focalization():
    head = ChAction("+", E, RAM0)
    stray = Chronicle((head, ChAction("-", (1,), RAME), ChAction("+", (5,), RAME)), None)
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles(
            [Chronicle((head,), None), stray], positive_base(E, (5,)))
    assert err.value.condition == "focalization"


def test_from_chronicles_checks_subaddress():
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles(
            [Chronicle((ChAction("+", (7,), RAME),), None)], positive_base((1,)))
    assert err.value.condition == "subaddress"


def test_from_chronicles_checks_affinity():
    head = ChAction("+", (1,), RAM01)
    reuse = ChAction("+", (2,), RAME)
    chronicles = [
        Chronicle((head,), None),
        Chronicle((head, ChAction("-", (1, 0), RAME), reuse), None),
        Chronicle((head, ChAction("-", (1, 1), RAME), reuse), None),
    ]
    with pytest.raises(ChronicleSetError) as err:
        from_chronicles(chronicles, positive_base((1,), (2,)))
    assert err.value.condition == "affinity"


# ---------------------------------------------------------------------------
# orderings


def test_omega_below_everything_below_daimon():
    samples = [OMEGA, DAIMON, plus(E, {0, 1}), ram_design(E, {0}, [RAME])]
    for d in samples:
        assert compare(OMEGA, d, "obs")
        assert compare(d, DAIMON, "obs")


def test_left_and_right_split_the_axioms():
    assert compare(OMEGA, plus(E, RAME), "right")
    assert not compare(OMEGA, plus(E, RAME), "left")
    assert compare(plus(E, RAME), DAIMON, "left")
    assert not compare(plus(E, RAME), DAIMON, "right")
    # both axioms reach the daimon from omega
    assert compare(OMEGA, DAIMON, "left")
    assert compare(OMEGA, DAIMON, "right")


def test_skunk_below_dai_minus():
    assert compare(skunk(E), dai_minus(E, [RAME]), "obs")
    assert compare(skunk(E), dai_minus(E, [RAME]), "left")
    assert compare(skunk(E), dai_minus(E, [RAME]), "right")
    assert not compare(dai_minus(E, [RAME]), skunk(E), "obs")


def test_ramifications_must_match():
    assert not compare(plus(E, {0}), plus(E, {0, 1}), "obs")
    assert not compare(plus(E, {0}), plus(E, {0, 1}), "stable")


def test_stable_order_is_chronicle_inclusion():
    rng = random.Random(31)
    for _ in range(200):
        d1 = random_negative_design(rng, E, [RAME, RAM0], 2)
        d2 = random_negative_design(rng, E, [RAME, RAM0], 2)
        expected = to_chronicles(d1) <= to_chronicles(d2)
        assert compare(d1, d2, "stable") == expected
        assert compare(d1, d2, "right") == expected


def _obs_by_divergence(d1, d2):
    """Chronicle-level characterization: at every positive slot reached by
    both designs, the lower one stops, the upper one concedes with the
    daimon, or they play the same action."""
    s1, s2 = to_chronicles(d1), to_chronicles(d2)

    def tails(chronicles, prefix):
        out = set()
        for c in chronicles:
            if len(c.actions) > len(prefix) and c.actions[: len(prefix)] == prefix:
                out.add(c.actions[len(prefix)])
            if c.actions == prefix and c.end == "dai":
                out.add("dai")
        return out

    def check(q):
        n1, n2 = tails(s1, q), tails(s2, q)
        if not n1:
            return True
        if n2 == {"dai"}:
            return True
        if n1 != n2 or n1 == {"dai"}:
            return n1 == n2
        a = next(iter(n1))
        opponents = tails(s1, q + (a,)) | tails(s2, q + (a,))
        return all(check(q + (a, b)) for b in opponents)

    if isinstance(d1, Negative):
        roots = tails(s1, ()) | tails(s2, ())
        return all(check((b,)) for b in roots)
    return check(())


def test_obs_order_matches_divergence_characterization():
    rng = random.Random(37)
    seen_related = 0
    for _ in range(300):
        d1 = random_negative_design(rng, E, [RAME, RAM0], 2)
        d2 = random_negative_design(rng, E, [RAME, RAM0], 2)
        expected = _obs_by_divergence(d1, d2)
        assert compare(d1, d2, "obs") == expected
        seen_related += expected
    assert seen_related  # the generator produces related pairs too


def test_obs_is_the_meet_of_left_and_right_composites():
    # obs-related pairs decompose through a midpoint, and conversely
    rng = random.Random(41)
    for _ in range(200):
        d1 = random_positive_design(rng, [(0,)], [RAME, RAM0], 2)
        d2 = random_positive_design(rng, [(0,)], [RAME, RAM0], 2)
        if compare(d1, d2, "obs"):
            lo, hi = decompose(d1, d2)
            assert compare(d1, lo, "left") and compare(lo, d2, "right")
            assert compare(d1, hi, "left") and compare(hi, d2, "right")


def test_decompose_of_omega_daimon():
    assert decompose(OMEGA, DAIMON) == (OMEGA, DAIMON)
    # both extremes are midpoints, so the path is not unique
    assert compare(OMEGA, OMEGA, "left") and compare(OMEGA, DAIMON, "right")
    assert compare(OMEGA, DAIMON, "left") and compare(DAIMON, DAIMON, "right")


def test_decompose_brackets_exactly():
    rng = random.Random(43)
    checked = 0
    for _ in range(120):
        d2 = random_positive_design(rng, [(0,)], [RAME, RAM0], 2)
        d1 = random_positive_design(rng, [(0,)], [RAME, RAM0], 2)
        if not compare(d1, d2, "obs"):
            continue
        lo, hi = decompose(d1, d2)
        pool = set(sub_designs(d2)) | set(sub_designs(d1)) | {d1, d2, lo, hi, DAIMON}
        for m in pool:
            threaded = compare(d1, m, "left") and compare(m, d2, "right")
            boxed = (compare(lo, m, "left") and compare(lo, m, "right")
                     and compare(m, hi, "left") and compare(m, hi, "right"))
            assert threaded == boxed, (d1, d2, m)
        checked += 1
    assert checked >= 10


def test_decompose_requires_obs():
    with pytest.raises(DesignError):
        decompose(DAIMON, OMEGA)


# ---------------------------------------------------------------------------
# named designs


def test_named_design_shapes():
    assert dai_minus((1,), [RAME]) == negative((1,), {RAME: DAIMON})
    assert skunk((1,)) == negative((1,), {})
    assert skunk_plus(E, {0}) == proper(E, RAM0, {0: skunk((0,))})
    assert ram_design(E, {0}, [RAME]) == proper(
        E, RAM0, {0: negative((0,), {RAME: DAIMON})})
    assert directory_design([RAM0, RAM01]) == negative(
        E, {RAM0: DAIMON, RAM01: DAIMON})


def test_fax_depth_one_by_hand():
    d = fax((1,), (2,), [RAM0], 1)
    expected = negative(
        (1,), {RAM0: proper((2,), RAM0, {0: skunk((2, 0))})})
    assert d == expected


def test_fax_swaps_sides_at_each_layer():
    d = fax((1,), (2,), [RAM0], 2)
    outer = d.branch(RAM0)
    assert isinstance(outer, Proper) and outer.focus == (2,)
    inner = outer.child(0).branch(RAM0)
    assert isinstance(inner, Proper) and inner.focus == (1, 0)


def test_fax_approximants_form_a_chain():
    gen = fax_generator((1,), (2,), [RAME, RAM0])
    approximants = [gen.approximant(d) for d in range(4)]
    for lo, hi in zip(approximants, approximants[1:]):
        assert compare(lo, hi, "stable")
        assert compare(lo, hi, "right")
    assert approximants[0] == skunk((1,))


def test_fax_is_typable():
    d = fax((1,), (2,), [RAM0, RAM01], 2)
    assert infer_base_negative(d) == negative_base((1,), (2,))


# ---------------------------------------------------------------------------
# sub-designs, meets and joins


def test_sub_positives_of_small_ram():
    d = ram_design(E, {0}, [RAME])
    subs = set(sub_positives(d))
    assert subs == {OMEGA, skunk_plus(E, {0}), d}


def test_sub_designs_are_stable_predecessors():
    rng = random.Random(47)
    d = random_negative_design(rng, E, [RAME, RAM0], 2)
    subs = list(sub_designs(d))
    assert len(subs) == len(set(subs))
    for s in subs:
        assert compare(s, d, "stable")


def test_intersection_and_union_match_chronicle_sets():
    rng = random.Random(53)
    for _ in range(150):
        d1 = random_negative_design(rng, E, [RAME, RAM0], 2)
        d2 = random_negative_design(rng, E, [RAME, RAM0], 2)
        meet = design_intersection(d1, d2)
        assert to_chronicles(meet) == (to_chronicles(d1) & to_chronicles(d2))
        try:
            join = design_union(d1, d2)
        except DesignError:
            continue
        assert to_chronicles(join) == (to_chronicles(d1) | to_chronicles(d2))


def test_union_rejects_conflicting_actions():
    with pytest.raises(DesignError):
        design_union(plus(E, {0}), plus(E, {0, 1}))


# ---------------------------------------------------------------------------
# text format


def test_format_parse_round_trip_on_leaves():
    assert parse_design("dai") == DAIMON
    assert parse_design("omega") == OMEGA
    assert parse_design("(- e)") == skunk(E)


def test_format_parse_round_trip_on_random_designs():
    rng = random.Random(59)
    for _ in range(120):
        d = random_negative_design(rng, E, [RAME, RAM0, RAM01], 3)
        assert parse_design(format_design(d)) == d
        p = random_positive_design(rng, [(0,), (1,)], [RAME, RAM0], 3)
        assert parse_design(format_design(p)) == p


def test_parse_fills_missing_children_with_skunks():
    assert parse_design("(+ e {0})") == skunk_plus(E, {0})


def test_parse_reports_positions():
    with pytest.raises(DesignParseError) as err:
        parse_design("(+ e {0} dai)")
    assert "1:" in str(err.value)
    with pytest.raises(DesignParseError):
        parse_design("(+ e {0}")
    with pytest.raises(DesignParseError):
        parse_design("(- e ({0} -> dai) ({0} -> omega))")


def test_parse_rejects_stray_child_focus():
    with pytest.raises(DesignParseError):
        parse_design("(+ e {0} (- 5))")


# ---------------------------------------------------------------------------
# random generation sanity


def test_random_designs_are_canonical_and_typable():
    rng = random.Random(61)
    for _ in range(150):
        d = random_negative_design(rng, E, [RAME, RAM0], 3)
        assert isinstance(infer_base_negative(d), Base)
        for j, sub in d.branches:
            assert not isinstance(sub, Omega)
