"""Term-level brute-force oracle: law variants, closure, bounded equality."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from cmonrw.corpus import SIG3, random_term
from cmonrw.cospan import iso_equal
from cmonrw.errors import BoundTooSmall
from cmonrw.oracle import (
    LAWS,
    EqResult,
    axiom_closure,
    enumerate_rewrites_bruteforce,
    one_step_variants,
    terms_equal_mod_axioms,
)
from cmonrw.sigterm import (
    Signature,
    Eta,
    Gen,
    Id,
    Mu,
    Par,
    Seq,
    Sym,
    term_size,
    term_type,
)
from cmonrw.translate import eval_term

F = Gen("f", 1, 1)
G = Gen("g", 1, 1)
SIG_FG = Signature((("f", 1, 1), ("g", 1, 1)))


def naive_closure(t, bound):
    """Reference BFS straight over one_step_variants."""
    seen = {t}
    frontier = [t]
    truncated = False
    while frontier:
        nxt = []
        for cur in frontier:
            for v in one_step_variants(cur):
                if term_size(v) > bound:
                    truncated = True
                elif v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen, truncated


def test_every_law_variant_preserves_type():
    probes = [
        Mu(),
        Eta(),
        Id(2),
        Sym(1, 2),
        Seq(F, G),
        Par(F, Mu()),
        Seq(Par(Eta(), Id(1)), Mu()),
    ]
    for t in probes:
        for v in one_step_variants(t):
            assert term_type(v) == term_type(t), (t, v)


def test_law_variants_are_bidirectional():
    # every variant can step back to its origin
    probes = [Mu(), Seq(F, G), Par(F, G), Seq(Par(Eta(), Id(1)), Mu())]
    for t in probes:
        for v in one_step_variants(t):
            assert t in set(one_step_variants(v)), (t, v)


def test_variants_are_sound_in_the_cospan_model():
    probes = [Mu(), Seq(F, G), Sym(2, 1), Seq(Par(F, Eta()), Mu())]
    for t in probes:
        base = eval_term(t, SIG_FG)
        for v in one_step_variants(t):
            assert iso_equal(eval_term(v, SIG_FG), base)


def test_closure_of_mu_frozen_size_and_commutativity_witness():
    cl = axiom_closure(Mu(), 6)
    assert len(cl.members) == 211
    assert Seq(Sym(1, 1), Mu()) in cl.members
    assert cl.truncated


def test_closure_of_identity_contains_its_self_composition():
    cl = axiom_closure(Id(1), 3)
    assert Seq(Id(1), Id(1)) in cl.members


def test_closure_of_eta_at_its_own_size_is_singleton():
    cl = axiom_closure(Eta(), 1)
    assert cl.members == frozenset([Eta()])
    assert cl.truncated


def test_closure_rejects_bound_below_seed():
    with pytest.raises(BoundTooSmall):
        axiom_closure(Seq(F, G), 2)


@pytest.mark.parametrize(
    "seed,bound,count",
    [
        (Mu(), 6, 211),
        (Eta(), 5, 136),
        (Id(1), 5, 288),
        (Sym(1, 1), 5, 189),
        (F, 7, 2997),
    ],
)
def test_pooled_closure_matches_reference_bfs(seed, bound, count):
    cl = axiom_closure(seed, bound)
    members, truncated = naive_closure(seed, bound)
    assert cl.members == frozenset(members)
    assert cl.truncated == truncated
    assert len(cl.members) == count


def test_closure_symmetry_on_sampled_members():
    cl = axiom_closure(Mu(), 6)
    rng = random.Random(0)
    for m in rng.sample(sorted(cl.members, key=repr), 5):
        assert Mu() in axiom_closure(m, 6).members


def test_equality_mod_axioms_examples():
    assert (
        terms_equal_mod_axioms(Mu(), Seq(Sym(1, 1), Mu()), 6)
        == EqResult.EQUAL
    )
    assert terms_equal_mod_axioms(Id(1), Id(1), 3) == EqResult.EQUAL
    # different types are reported distinct immediately
    assert (
        terms_equal_mod_axioms(Mu(), Eta(), 6)
        == EqResult.DISTINCT_WITHIN_BOUND
    )
    # same type, disjoint truncated closures: cannot certify
    assert terms_equal_mod_axioms(F, G, 3) == EqResult.UNKNOWN


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_equal_terms_evaluate_iso(seed):
    rng = random.Random(seed)
    t = random_term(rng, SIG3, max_generators=2, max_width=2)
    if term_size(t) > 7:
        return
    cl = axiom_closure(t, term_size(t) + 2)
    base = eval_term(t, SIG3)
    for m in sorted(cl.members, key=repr)[:20]:
        assert iso_equal(eval_term(m, SIG3), base)


def test_identity_rule_rewrites_to_closure_equal_terms():
    results = enumerate_rewrites_bruteforce((F, F), Seq(F, G), 9)
    base = eval_term(Seq(F, G), SIG_FG)
    assert results
    for r in results:
        assert iso_equal(eval_term(r, SIG_FG), base)


def test_whole_term_redex_rewrite():
    results = enumerate_rewrites_bruteforce((F, G), F, 7)
    keys = {
        iso_equal(eval_term(r, SIG_FG), eval_term(G, SIG_FG))
        for r in results
    }
    assert keys == {True}


def test_eta_attachment_variant_found_at_widened_bound():
    # the merge-attachment rewrite of `f` by id_1 => g needs a size-9
    # context witness, so bound 7 misses it and bound 9 finds it
    target = eval_term(Seq(Par(F, Seq(Eta(), G)), Mu()), SIG_FG)
    small = enumerate_rewrites_bruteforce((Id(1), G), F, 7)
    assert not any(iso_equal(eval_term(r, SIG_FG), target) for r in small)
    wide = enumerate_rewrites_bruteforce((Id(1), G), F, 9)
    assert any(iso_equal(eval_term(r, SIG_FG), target) for r in wide)


def test_laws_cover_the_expected_names():
    names = [law.name for law in LAWS]
    assert len(names) == len(set(names)) == 14
    assert sum(law.derived for law in LAWS) == 1
