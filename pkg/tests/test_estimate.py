import itertools
import random

import pytest

from ofdiag.augment import build_augmented
from ofdiag.errors import InfeasibleObservationError, UnknownOutputError
from ofdiag.estimate import (
    Diagnoser,
    canonical,
    diagnose,
    initial_estimate,
    observable_next,
    unobservable_reach,
)
from ofdiag.model import EPS
from ofdiag.observation import is_faulty, output_string
from ofdiag.oracle import extended_strings
from helpers import aug, est, random_models


def brute_end_states(m, w, max_len):
    """Augmented states reached by every extended string of length <= max_len with output w."""
    ends = set()
    for s in extended_strings(m, max_len):
        if output_string(e.out for e in s) != tuple(w):
            continue
        q = m.transitions[(s[-1].state, s[-1].event)] if s else m.initial
        ends.add((q, "F" if is_faulty(s, m) else "N"))
    return ends


def test_unobservable_reach_examples(aug1):
    assert unobservable_reach(aug1, est("1N")) == est("1N", "2F", "5N")
    assert unobservable_reach(aug1, est("3F")) == est("2F", "3F", "4F")
    assert unobservable_reach(aug1, ()) == ()


def test_observable_next_examples(aug1):
    assert observable_next(aug1, est("1N", "2F", "5N"), "a") == est("3F", "6N")
    assert observable_next(aug1, est("3F", "6N"), "b") == est("4F", "5N")
    assert observable_next(aug1, est("1N"), "c") == ()


def test_observable_next_unknown_output(aug1):
    with pytest.raises(UnknownOutputError):
        observable_next(aug1, est("1N"), "z")
    with pytest.raises(UnknownOutputError):
        observable_next(aug1, est("1N"), EPS)


def test_estimates_agree_with_enumeration(g1, aug1):
    for w in [(), ("a",), ("a", "b"), ("a", "c"), ("a", "b", "a")]:
        r = diagnose(aug1, w).estimate
        assert {(s.state, s.label) for s in r} == brute_end_states(g1, w, 10), w


def test_diagnose_examples(g1, aug1):
    verdict, r = diagnose(aug1, ["a", "c"])
    assert verdict == 1
    assert r == est("2F")
    assert brute_end_states(g1, ("a", "c"), 8) == {("2", "F")}
    assert all(is_faulty(s, g1) for s in extended_strings(g1, 8)
               if output_string(e.out for e in s) == ("a", "c"))

    verdict, r = diagnose(aug1, ["a", "b"])
    assert verdict == 0 and aug("5N") in r
    assert diagnose(aug1, []) == (0, est("1N", "2F", "5N"))


def test_diagnose_infeasible(aug1):
    with pytest.raises(InfeasibleObservationError) as info:
        diagnose(aug1, ["b"])
    assert info.value.position == 0


def test_online_session_is_unchanged_by_bad_symbol(aug1):
    d = Diagnoser(aug1)
    d.observe("a")
    assert d.observe("c") == 1
    before = d.estimate
    with pytest.raises(InfeasibleObservationError):
        d.observe("b")
    assert d.estimate == before and d.observed == ["a", "c"]
    assert d.observe("a") == 1


@pytest.mark.parametrize("m", list(random_models(40, seed=5)), ids=lambda m: m.name)
def test_reach_properties(m):
    a = build_augmented(m)
    rng = random.Random(m.name)
    for _ in range(20):
        r1 = canonical(x for x in a.states if rng.random() < 0.4)
        r2 = canonical(set(r1) | {x for x in a.states if rng.random() < 0.3})
        u1 = unobservable_reach(a, r1)
        assert set(r1) <= set(u1)
        assert unobservable_reach(a, u1) == u1
        assert set(u1) <= set(unobservable_reach(a, r2))
        other = canonical(x for x in a.states if rng.random() < 0.4)
        for d in m.outputs:
            n1, n2 = observable_next(a, r1, d), observable_next(a, r2, d)
            assert set(n1) <= set(n2)
            union = observable_next(a, canonical(set(r1) | set(other)), d)
            assert set(union) == set(n1) | set(observable_next(a, other, d))


def test_no_false_alarm_on_normal_runs_g1(g1, aug1):
    checked = 0
    for s in extended_strings(g1, 8):
        if is_faulty(s, g1):
            continue
        assert diagnose(aug1, output_string(e.out for e in s)).verdict == 0
        checked += 1
    assert checked == 31


def _explanations(m, w):
    """Fault labels of all runs with output exactly w, by reachability in plant x position."""
    start = (m.initial, False, 0)
    seen, todo = {start}, [start]
    while todo:
        q, faulty, i = todo.pop()
        for (src, e), dst in m.transitions.items():
            if src != q:
                continue
            for d in m.obs[(src, e)]:
                if d == EPS:
                    j = i
                elif i < len(w) and d == w[i]:
                    j = i + 1
                else:
                    continue
                nxt = (dst, faulty or e in m.faults, j)
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
    return {faulty for _q, faulty, i in seen if i == len(w)}


def _universal_verdict(m, w):
    """1 iff every run explaining w is faulty; None when nothing explains it."""
    ends = _explanations(m, w)
    if not ends:
        return None
    return int(ends == {True})


def _check_all_outputs(m, a, n_max):
    for n in range(n_max + 1):
        for w in itertools.product(m.outputs, repeat=n):
            expected = _universal_verdict(m, w)
            if expected is None:
                with pytest.raises(InfeasibleObservationError):
                    diagnose(a, w)
                continue
            assert diagnose(a, w).verdict == expected, w


def test_diagnoser_matches_universal_condition_g1(g1, aug1):
    assert _universal_verdict(g1, ("a", "c")) == 1
    assert _universal_verdict(g1, ("a", "b")) == 0
    _check_all_outputs(g1, aug1, 6)


@pytest.mark.parametrize("m", list(random_models(15, seed=9, states=3, events=2, outputs=2)),
                         ids=lambda m: m.name)
def test_diagnoser_matches_universal_condition_random(m):
    _check_all_outputs(m, build_augmented(m), 5)


def test_initial_estimate(aug1):
    assert initial_estimate(aug1) == est("1N", "2F", "5N")
