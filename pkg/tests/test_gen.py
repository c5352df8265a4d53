import pytest

from ludonet.mll.criteria import check_dr
from ludonet.mll.gen import random_structure
from ludonet.mll.structures import all_leaves, validate_structure


def test_budget_one_is_a_single_axiom():
    s = random_structure(1, 1, mode="proof")
    assert len(s.trees) == 2
    assert len(s.partition) == 1
    assert validate_structure(s, "proof") == []


def test_deterministic_per_seed():
    for seed in (0, 7, 123):
        a = random_structure(seed, 8, mode="paraproof", allow_cuts=True, perturb=0.5)
        b = random_structure(seed, 8, mode="paraproof", allow_cuts=True, perturb=0.5)
        assert a == b
    assert random_structure(0, 8) != random_structure(1, 8)


def test_thousand_samples_validate():
    for seed in range(250):
        for mode in ("proof", "paraproof"):
            for cuts in (False, True):
                s = random_structure(
                    seed, 12, mode=mode, allow_cuts=cuts, perturb=0.4
                )
                assert validate_structure(s, mode) == [], (seed, mode, cuts)


def test_unperturbed_samples_are_nets():
    for seed in range(150):
        s = random_structure(seed, 8, mode="proof", allow_cuts=seed % 2 == 0)
        assert check_dr(s, par_cap=32)


def test_perturbation_produces_rejected_cases():
    rejected = sum(
        1
        for seed in range(150)
        if not check_dr(random_structure(seed, 8, mode="proof", perturb=1.0), par_cap=32)
    )
    assert rejected > 30


def test_budget_controls_growth():
    small = random_structure(3, 2)
    big = random_structure(3, 12)
    assert len(all_leaves(big)) > len(all_leaves(small))


def test_bad_arguments():
    with pytest.raises(ValueError):
        random_structure(0, 0)
    with pytest.raises(ValueError):
        random_structure(0, 3, mode="net")
