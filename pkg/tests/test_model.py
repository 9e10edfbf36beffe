import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofdiag.augment import build_augmented
from ofdiag.errors import ModelSyntaxError, ReservedTokenError, SchemaError
from ofdiag.fixtures import NAMES, fixture_path, load_fixture
from ofdiag.model import EPS, export_dot, model_to_dict, parse_model, serialize_model, validate
from ofdiag.oracle import GenParams, random_model
from ofdiag.verifier import build_verification_structure

G1_CLASSES = {
    "states": ["1", "2", "3", "4", "5", "6"],
    "initial": "1",
    "events": ["a", "b", "c", "f", "u"],
    "fault_events": ["f"],
    "observation_classes": {"reliable": ["a"], "unreliable": ["b", "c"], "unobservable": ["f", "u"]},
    "transitions": [
        {"from": "1", "event": "f", "to": "2"},
        {"from": "2", "event": "a", "to": "3"},
        {"from": "3", "event": "b", "to": "4"},
        {"from": "4", "event": "c", "to": "2"},
        {"from": "1", "event": "u", "to": "5"},
        {"from": "5", "event": "a", "to": "6"},
        {"from": "6", "event": "b", "to": "5"},
    ],
}


def test_parse_g1(g1):
    assert len(g1.states) == 6
    assert len(g1.events) == 5
    assert g1.obs[("3", "b")] == {"b", EPS}
    assert g1.transitions[("3", "b")] == "4"
    assert g1.faults == {"f"}
    assert g1.fair_outputs == {"b", "c"}


def test_observation_classes_expand_like_intermittent_loss(g1):
    m = parse_model(json.dumps(G1_CLASSES))
    for (q, e), outs in m.obs.items():
        expected = {"a": {"a"}, "b": {"b", EPS}, "c": {"c", EPS}, "f": {EPS}, "u": {EPS}}[e]
        assert outs == expected, (q, e)
    assert m.outputs == ("a", "b", "c")
    # same plant as the per-transition fixture, up to the fair set
    assert m.with_fair_outputs(g1.fair_outputs) == g1


def test_eps_declared_as_output_is_rejected():
    data = model_to_dict(load_fixture("g1"))
    data["outputs"].append("eps")
    with pytest.raises(ReservedTokenError):
        parse_model(json.dumps(data))


def test_syntax_error_carries_position():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model('{\n  "states": [1,\n}')
    assert info.value.line == 3


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("states"), "<root>"),
        (lambda d: d["transitions"][0].pop("obs"), "/transitions/0"),
        (lambda d: d["transitions"].append(dict(d["transitions"][0], to="3")), "/transitions/7"),
        (lambda d: d.update(initial=1), "/initial"),
        (lambda d: d.update(observation_classes={"reliable": ["a"]}), "/transitions/0/obs"),
    ],
)
def test_schema_violations(mutate, field):
    data = model_to_dict(load_fixture("g1"))
    mutate(data)
    with pytest.raises(SchemaError) as info:
        parse_model(json.dumps(data))
    assert info.value.field == field


def test_class_missing_for_event():
    data = json.loads(json.dumps(G1_CLASSES))
    data["observation_classes"]["unobservable"] = ["f"]
    with pytest.raises(SchemaError, match="no observation class"):
        parse_model(json.dumps(data))


@pytest.mark.parametrize("name", NAMES)
def test_bundled_fixtures_validate(name):
    m = parse_model(fixture_path(name).read_text())
    assert validate(m).ok


def test_liveness_violation(g1):
    report = validate(g1.without_transition("4", "c"))
    assert [(v.rule, v.element) for v in report.violations] == [("liveness", "4")]


def test_empty_obs_violation(g1):
    report = validate(g1.with_obs("3", "b", set()))
    assert report.rules() == {"obs-empty"}
    assert report.violations[0].element == "3-b->4"


def test_violations_are_ordered(g1):
    broken = g1.without_transition("4", "c").with_obs("3", "b", set())
    broken = broken.with_fair_outputs({"zz"})
    rules = [v.rule for v in validate(broken).violations]
    assert rules == sorted(rules) == ["fair-outputs", "liveness", "obs-empty"]


def test_unknown_endpoints_and_events_reported():
    data = model_to_dict(load_fixture("g1"))
    data["transitions"].append({"from": "9", "event": "z", "to": "1", "obs": ["q"]})
    report = validate(parse_model(json.dumps(data)))
    assert {"endpoints", "events", "obs-range"} <= report.rules()


def test_non_live_model_still_parses_and_exports(g1):
    broken = g1.without_transition("4", "c")
    assert "digraph" in export_dot(broken)
    assert parse_model(serialize_model(broken)) == broken


def test_round_trip_fixtures():
    for name in NAMES:
        m = load_fixture(name)
        assert parse_model(serialize_model(m)) == m


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6), st.integers(1, 4), st.integers(1, 3),
    st.floats(0, 1), st.integers(0, 2**32),
)
def test_round_trip_random(states, events, outputs, eps_prob, seed):
    m = random_model(GenParams(states=states, events=events, outputs=outputs,
                               eps_prob=eps_prob, seed=seed))
    assert parse_model(serialize_model(m)) == m


def test_dot_model_labels(g1):
    dot = export_dot(g1)
    assert '"3" -> "4" [label="b\\\\{b,eps}"];' in dot
    assert '"1" -> "2" [label="f\\\\{eps}", color=red];' in dot
    assert dot.startswith('digraph "G1" {')


def test_dot_augmented_node_ids(g1):
    dot = export_dot(build_augmented(g1))
    for node in ("1N", "2F", "3F", "4F", "5N", "6N"):
        assert f'"{node}" [shape=circle' in dot
    assert '"3F" -> "4F" [label="(3,b,eps)"];' in dot


def test_dot_verifier_marks_classes(g1):
    dot = export_dot(build_verification_structure(build_augmented(g1)))
    assert '"(2F,{2F})" [shape=doublecircle];' in dot
    assert '"(3F,{2F,3F,4F,5N,6N})" [shape=ellipse, style=dashed];' in dot
    assert '"(1N,{1N,2F,5N})" [shape=ellipse];' in dot


def test_dot_is_deterministic(g1):
    assert export_dot(g1).encode() == export_dot(load_fixture("g1")).encode()
    v1 = build_verification_structure(build_augmented(g1))
    v2 = build_verification_structure(build_augmented(load_fixture("g1")))
    assert export_dot(v1) == export_dot(v2)


def test_export_rejects_unknown_objects():
    with pytest.raises(TypeError):
        export_dot(object())
