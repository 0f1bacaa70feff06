"""Evaluation of terms into right-monogamous acyclic cospans."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from cmonrw.corpus import SIG3, random_term
from cmonrw.cospan import (
    FinFunction,
    cospan_to_function,
    function_to_cospan,
    is_right_monogamous,
    iso_equal,
)
from cmonrw.errors import ContainsGenerator, TypeMismatch, UnknownGenerator
from cmonrw.hypergraph import is_acyclic
from cmonrw.sigterm import (
    Eta,
    Gen,
    Id,
    Mu,
    Par,
    Seq,
    Sym,
    parse_term,
    term_type,
)
from cmonrw.translate import cmon_term_to_function, eval_term, generator_cospan


def test_generator_cospan_shape(sig):
    c = generator_cospan("f", sig)
    assert c.arity == 2 and c.coarity == 1
    assert len(c.carrier.nodes) == 3
    assert len(c.carrier.edges) == 1
    (edge,) = c.carrier.edges.values()
    assert edge.label == "f"
    assert edge.sources == c.left and edge.targets == c.right


def test_eval_structural_atoms(sig):
    assert iso_equal(
        eval_term(Mu(), sig), function_to_cospan(FinFunction(2, 1, (0, 0)))
    )
    assert iso_equal(
        eval_term(Eta(), sig), function_to_cospan(FinFunction(0, 1, ()))
    )
    assert cospan_to_function(eval_term(Sym(1, 2), sig)).table == (2, 0, 1)


def test_eval_checks_generator_against_signature(sig):
    with pytest.raises(UnknownGenerator):
        eval_term(Gen("zz", 1, 1), sig)
    with pytest.raises(TypeMismatch):
        eval_term(Gen("f", 1, 1), sig)  # declared 2 -> 1


@given(st.integers(0, 2**32 - 1))
def test_eval_output_is_right_monogamous_acyclic(seed):
    rng = random.Random(seed)
    t = random_term(rng, SIG3)
    c = eval_term(t, SIG3)
    assert is_right_monogamous(c)
    assert is_acyclic(c.carrier)
    assert (c.arity, c.coarity) == term_type(t)


def test_merge_commutativity_holds_in_cospans(sig):
    assert iso_equal(
        eval_term(Mu(), sig), eval_term(Seq(Sym(1, 1), Mu()), sig)
    )


def test_merge_unit_holds_in_cospans(sig):
    both = Seq(Par(Eta(), Id(1)), Mu())
    assert iso_equal(eval_term(both, sig), eval_term(Id(1), sig))


def test_interchange_holds_in_cospans(sig):
    lhs = parse_term("(a + b) ; (b + a)", sig)
    rhs = parse_term("(a ; b) + (b ; a)", sig)
    assert iso_equal(eval_term(lhs, sig), eval_term(rhs, sig))


def test_cmon_term_to_function_merge_tree():
    t = Seq(Par(Mu(), Id(1)), Mu())
    assert cmon_term_to_function(t) == FinFunction(3, 1, (0, 0, 0))


def test_cmon_term_to_function_rejects_generators(sig):
    with pytest.raises(ContainsGenerator):
        cmon_term_to_function(Gen("a", 1, 1))
