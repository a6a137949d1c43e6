import pytest

from sdsim.expr import (
    Binary, Call, NumberLiteral, VarRef, emax, format_expr, format_name, integ, normalize_name, random_normal,
    ref, references,
)


def test_operator_overloading_builds_trees():
    e = ref("A") + 1
    assert e == Binary("+", VarRef("A"), NumberLiteral(1.0))
    assert 2 / ref("B") == Binary("/", NumberLiteral(2.0), VarRef("B"))


def test_arity_enforced():
    with pytest.raises(ValueError):
        Call("MAX", (NumberLiteral(1.0),))
    with pytest.raises(ValueError):
        Call("RANDOM_NORMAL", tuple(NumberLiteral(1.0) for _ in range(4)))


def test_unknown_function_rejected():
    with pytest.raises(ValueError):
        Call("EXP", (NumberLiteral(1.0),))


def test_names_normalized():
    assert normalize_name("  Avg   Quality ") == "Avg Quality"
    assert ref("Avg  Quality") == ref("Avg Quality")


def test_quoting():
    assert format_name("Rebalancing & Regularization") == '"Rebalancing & Regularization"'
    assert format_name("Avg. new recommendations") == "Avg. new recommendations"
    assert format_name("3D") == '"3D"'


def test_format_minimal_parentheses():
    e = (ref("a") - ref("b")) / ref("c") + ref("d") * (ref("e") - ref("f"))
    assert format_expr(e) == "(a - b)/c + d*(e - f)"
    assert format_expr(ref("a") - (ref("b") - ref("c"))) == "a - (b - c)"
    assert format_expr(ref("a") / (ref("b") * ref("c"))) == "a/(b*c)"


def test_format_functions():
    assert format_expr(emax(0, ref("x"))) == "MAX(0, x)"
    assert format_expr(integ(ref("f"), 1)) == "INTEG(f, 1)"
    assert format_expr(random_normal(1, 5, ref("m"), ref("s"), 1)).startswith("RANDOM NORMAL(")


def test_references_unique_in_first_seen_order():
    e = ref("b") * ref("a") + ref("b")
    assert references(e) == ["b", "a"]
