import pytest
from hypothesis import given, strategies as st

from primforms.formula.parser import (BinOp, Neg, Num, ParseError, Pm, Pow, Sqrt, Subst, Sym, Var,
                                      count_markers, parse, symbols, to_text)
from primforms.formula.verify import load_dataset

DATASET = load_dataset()

leaves = st.one_of(st.integers(0, 10 ** 6).map(Num), st.sampled_from(["E4", "E6", "d", "C2", "d9"]).map(Sym),
                   st.just(Var()))


def _extend(inner):
    return st.one_of(
        inner.map(Sqrt), inner.map(Pm), inner.map(Neg),
        st.builds(BinOp, st.sampled_from("+-*/"), inner, inner),
        st.builds(Pow, inner, st.integers(2, 9)),
        st.builds(Subst, inner, st.integers(2, 3)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=12)


@given(exprs)
def test_print_parse_round_trip(e):
    assert parse(to_text(e)) == e


@pytest.mark.parametrize("entry", DATASET, ids=lambda e: e.id)
def test_dataset_round_trip(entry):
    e = parse(entry.expression)
    assert parse(to_text(e)) == e
    assert to_text(parse(to_text(e))) == to_text(e)


def test_precedence_and_markers():
    e = parse("E4^3-(13+pm(sqrt(144169)))*d")
    assert e == BinOp("-", Pow(Sym("E4"), 3),
                      BinOp("*", BinOp("+", Num(13), Pm(Sqrt(Num(144169)))), Sym("d")))
    assert count_markers(e) == (1, 0)
    assert symbols(e) == {"E4", "d"}
    assert count_markers(parse("v*pm(1)+pm(2)")) == (2, 1)
    assert parse("2-3-4") == BinOp("-", BinOp("-", Num(2), Num(3)), Num(4))
    assert parse("-x^2") == Neg(Pow(Sym("x"), 2))


@pytest.mark.parametrize("text", ["(E4", "E4)", "E4 E6", "E4^", "pm 3", "", "E4^x", "3 $ 4"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)
