import pytest
from hypothesis import given, strategies as st

from ludonet.mll.formulas import (
    Atom,
    DualAtom,
    FormulaSyntaxError,
    Par,
    Tensor,
    dual,
    format_formula,
    formula_size,
    is_defined_at,
    is_prefix,
    occurrences_disjoint,
    parse_formula,
    subformula_at,
)

X, Y, Z = Atom("X"), Atom("Y"), Atom("Z")


def atoms(draw_names=st.sampled_from("XYZW")):
    return st.builds(Atom, draw_names) | st.builds(DualAtom, draw_names)


formulas = st.recursive(
    atoms(),
    lambda sub: st.builds(Tensor, sub, sub) | st.builds(Par, sub, sub),
    max_leaves=12,
)


def test_dual_atom():
    assert dual(X) == DualAtom("X")
    assert dual(DualAtom("X")) == X


def test_dual_de_morgan():
    assert dual(Tensor(X, Y)) == Par(DualAtom("X"), DualAtom("Y"))
    assert dual(Par(X, Y)) == Tensor(DualAtom("X"), DualAtom("Y"))


@given(formulas)
def test_dual_involutive(f):
    assert dual(dual(f)) == f


def test_subformula_at_root():
    assert subformula_at(X, "") == X


def test_subformula_nested():
    f = Par(Tensor(X, Y), Z)
    assert subformula_at(f, "12") == Y
    assert subformula_at(f, "1") == Tensor(X, Y)
    assert subformula_at(f, "2") == Z


def test_subformula_undefined_on_atom():
    assert not is_defined_at(X, "1")
    with pytest.raises(Exception):
        subformula_at(X, "1")


@given(formulas)
def test_size_counts_atoms_and_connectives(f):
    if isinstance(f, (Atom, DualAtom)):
        assert formula_size(f) == 1
    else:
        assert formula_size(f) == 1 + formula_size(f.left) + formula_size(f.right)


def test_prefixes():
    assert is_prefix("", "12")
    assert is_prefix("1", "12")
    assert not is_prefix("12", "1")
    assert not is_prefix("2", "12")


def test_disjoint_occurrences():
    assert occurrences_disjoint("11", "12")
    assert occurrences_disjoint("11", "2")
    assert not occurrences_disjoint("1", "12")
    assert not occurrences_disjoint("12", "1")


def test_parse_basics():
    assert parse_formula("X") == X
    assert parse_formula("X^") == DualAtom("X")
    assert parse_formula("(X * Y)") == Tensor(X, Y)
    assert parse_formula("(X % Y)") == Par(X, Y)


def test_parse_dual_of_compound():
    # postfix ^ computes the dual, it is not stored
    assert parse_formula("(X * Y)^") == Par(DualAtom("X"), DualAtom("Y"))
    assert parse_formula("X^^") == X


def test_parse_rejects_garbage():
    for bad in ("", "(X *", "X Y", "(X & Y)", ")", "(X * Y) Z"):
        with pytest.raises(FormulaSyntaxError):
            parse_formula(bad)


@given(formulas)
def test_format_parse_round_trip(f):
    assert parse_formula(format_formula(f)) == f
