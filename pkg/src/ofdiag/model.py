"""Discrete-event system models with state-dependent non-deterministic outputs.

A :class:`DesModel` is a deterministic automaton whose transitions each carry a
set of possible output symbols.  The empty output is written ``"eps"`` in model
files and is represented internally by :data:`EPS`.
"""
import json
import re
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

import jsonschema

from .errors import ModelSyntaxError, ReservedTokenError, SchemaError

EPS = "eps"

OBSERVATION_CLASSES = ("reliable", "unreliable", "unobservable")

_NUM_RE = re.compile(r"(\d+)")


def natural_key(name):
    """Sort key that orders ``"q2"`` before ``"q10"``."""
    parts = []
    for chunk in _NUM_RE.split(str(name)):
        if not chunk:
            continue
        if chunk.isdigit():
            parts.append((0, int(chunk), chunk))
        else:
            parts.append((1, 0, chunk))
    return tuple(parts)


def output_key(out):
    # eps sorts after every real output symbol
    return (out == EPS, natural_key(out))


def sorted_outputs(outs: Iterable[str]) -> list:
    return sorted(set(outs), key=output_key)


@dataclass(frozen=True)
class DesModel:
    """Plant automaton plus output function, fault events and fair outputs.

    ``transitions`` maps ``(state, event)`` to the successor state and ``obs``
    maps the same keys to the non-empty set of outputs that firing the event
    in that state may produce.  Instances are immutable; use
    :meth:`with_fair_outputs` to analyse the same plant under another fairness
    hypothesis.
    """

    states: tuple
    initial: str
    events: tuple
    outputs: tuple
    faults: frozenset
    transitions: Mapping
    obs: Mapping
    fair_outputs: frozenset = frozenset()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "events", tuple(self.events))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "faults", frozenset(self.faults))
        object.__setattr__(self, "fair_outputs", frozenset(self.fair_outputs))
        object.__setattr__(self, "transitions", MappingProxyType(dict(self.transitions)))
        object.__setattr__(
            self,
            "obs",
            MappingProxyType({k: frozenset(v) for k, v in dict(self.obs).items()}),
        )

    __hash__ = None

    def successor(self, state, event):
        return self.transitions.get((state, event))

    def enabled(self, state):
        """Events defined at ``state``, in declaration order."""
        return [e for e in self.events if (state, e) in self.transitions] + sorted(
            {e for (q, e) in self.transitions if q == state and e not in self.events},
            key=natural_key,
        )

    def is_fault(self, event):
        return event in self.faults

    @property
    def outputs_eps(self) -> frozenset:
        return frozenset(self.outputs) | {EPS}

    def with_fair_outputs(self, fair) -> "DesModel":
        return replace(self, fair_outputs=frozenset(fair))

    def with_obs(self, state, event, outs) -> "DesModel":
        obs = dict(self.obs)
        obs[(state, event)] = frozenset(outs)
        return replace(self, obs=obs)

    def without_transition(self, state, event) -> "DesModel":
        trans = {k: v for k, v in self.transitions.items() if k != (state, event)}
        obs = {k: v for k, v in self.obs.items() if k != (state, event)}
        return replace(self, transitions=trans, obs=obs)


# ---------------------------------------------------------------------------
# file format

_ID = {"type": "string", "minLength": 1}
_ID_LIST = {"type": "array", "items": _ID}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["states", "initial", "events", "transitions"],
    "properties": {
        "name": {"type": "string"},
        "states": {**_ID_LIST, "minItems": 1},
        "initial": _ID,
        "events": _ID_LIST,
        "outputs": _ID_LIST,
        "fault_events": _ID_LIST,
        "fair_outputs": _ID_LIST,
        "observation_classes": {
            "type": "object",
            "properties": {k: _ID_LIST for k in OBSERVATION_CLASSES},
            "additionalProperties": False,
        },
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "event", "to"],
                "properties": {
                    "from": _ID,
                    "event": _ID,
                    "to": _ID,
                    "obs": _ID_LIST,
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

_VALIDATOR = jsonschema.Draft7Validator(MODEL_SCHEMA)


def _schema_path(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else "<root>"


def model_from_dict(data) -> DesModel:
    """Build a model from an already-decoded JSON document."""
    errors = sorted(_VALIDATOR.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise SchemaError(_schema_path(err.absolute_path), err.message)

    outputs = data.get("outputs")
    classes = data.get("observation_classes")
    if outputs is not None and EPS in outputs:
        raise ReservedTokenError("/outputs", f"'{EPS}' is reserved for the empty output")

    per_transition = [i for i, t in enumerate(data["transitions"]) if "obs" in t]
    if classes is not None and per_transition:
        raise SchemaError(
            f"/transitions/{per_transition[0]}/obs",
            "per-transition obs and observation_classes are mutually exclusive",
        )

    event_class = {}
    if classes is not None:
        for cls in OBSERVATION_CLASSES:
            for ev in classes.get(cls, []):
                if ev in event_class and event_class[ev] != cls:
                    raise SchemaError(
                        f"/observation_classes/{cls}",
                        f"event {ev!r} listed in both {event_class[ev]} and {cls}",
                    )
                event_class[ev] = cls
        if outputs is None:
            outputs = [
                ev
                for ev in data["events"]
                if event_class.get(ev) in ("reliable", "unreliable")
            ]
            if EPS in outputs:
                raise ReservedTokenError(
                    "/observation_classes", f"event '{EPS}' cannot double as an output"
                )
    elif outputs is None:
        raise SchemaError("/outputs", "required unless observation_classes is given")

    transitions = {}
    obs = {}
    for i, t in enumerate(data["transitions"]):
        key = (t["from"], t["event"])
        if key in transitions:
            raise SchemaError(
                f"/transitions/{i}",
                f"duplicate transition for state {key[0]!r} and event {key[1]!r}",
            )
        transitions[key] = t["to"]
        if classes is None:
            if "obs" not in t:
                raise SchemaError(f"/transitions/{i}", "missing 'obs'")
            obs[key] = frozenset(t["obs"])
        else:
            cls = event_class.get(t["event"])
            if cls is None:
                raise SchemaError(
                    f"/transitions/{i}/event",
                    f"event {t['event']!r} has no observation class",
                )
            ev = t["event"]
            obs[key] = {
                "reliable": frozenset({ev}),
                "unreliable": frozenset({ev, EPS}),
                "unobservable": frozenset({EPS}),
            }[cls]

    return DesModel(
        states=data["states"],
        initial=data["initial"],
        events=data["events"],
        outputs=outputs,
        faults=data.get("fault_events", []),
        transitions=transitions,
        obs=obs,
        fair_outputs=data.get("fair_outputs", []),
        name=data.get("name", ""),
    )


def parse_model(text: str) -> DesModel:
    """Parse the JSON model format.

    Raises :class:`ModelSyntaxError` for malformed JSON, :class:`SchemaError`
    for structural problems and :class:`ReservedTokenError` when ``"eps"`` is
    declared as an output.  Semantic checks (liveness and so on) are left to
    :func:`validate` so broken models can still be inspected.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    return model_from_dict(data)


def load_model(path) -> DesModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def model_to_dict(m: DesModel) -> dict:
    data = {}
    if m.name:
        data["name"] = m.name
    data.update(
        {
            "states": list(m.states),
            "initial": m.initial,
            "events": list(m.events),
            "outputs": list(m.outputs),
            "fault_events": [e for e in m.events if e in m.faults]
            + sorted(m.faults - set(m.events), key=natural_key),
            "fair_outputs": sorted_outputs(m.fair_outputs),
            "transitions": [
                {"from": q, "event": e, "to": dst, "obs": sorted_outputs(m.obs.get((q, e), ()))}
                for (q, e), dst in m.transitions.items()
            ],
        }
    )
    return data


def serialize_model(m: DesModel) -> str:
    return json.dumps(model_to_dict(m), indent=2) + "\n"


# ---------------------------------------------------------------------------
# validation


class Violation(NamedTuple):
    rule: str
    message: str
    element: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def rules(self) -> set:
        return {v.rule for v in self.violations}

    def __str__(self):
        if self.ok:
            return "model is valid"
        return "\n".join(f"[{v.rule}] {v.message}" for v in self.violations)


def validate(m: DesModel) -> ValidationReport:
    """Check every structural invariant of ``m``; the report lists all failures."""
    found = []
    states = set(m.states)
    events = set(m.events)

    def add(rule, message, element):
        found.append(Violation(rule, message, str(element)))

    if m.initial not in states:
        add("initial", f"initial state {m.initial!r} is not declared", m.initial)
    if EPS in m.outputs:
        add("outputs", f"'{EPS}' must not be declared as an output", EPS)
    for ev in m.faults - events:
        add("faults", f"fault event {ev!r} is not a declared event", ev)
    for d in m.fair_outputs - m.outputs_eps:
        add("fair-outputs", f"fair output {d!r} is neither an output nor eps", d)

    for (q, e), dst in m.transitions.items():
        label = f"{q}-{e}->{dst}"
        if q not in states:
            add("endpoints", f"transition {label} leaves undeclared state {q!r}", label)
        if dst not in states:
            add("endpoints", f"transition {label} enters undeclared state {dst!r}", label)
        if e not in events:
            add("events", f"transition {label} uses undeclared event {e!r}", label)
        outs = m.obs.get((q, e))
        if outs is None:
            add("obs-domain", f"transition {label} has no output set", label)
        elif not outs:
            add("obs-empty", f"transition {label} has an empty output set", label)
        elif outs - m.outputs_eps:
            bad = ",".join(sorted_outputs(outs - m.outputs_eps))
            add("obs-range", f"transition {label} emits undeclared outputs {bad}", label)
    for (q, e) in m.obs:
        if (q, e) not in m.transitions:
            add("obs-domain", f"output set given for undefined transition ({q},{e})", f"{q}-{e}")

    sources = {q for (q, _e) in m.transitions}
    for q in m.states:
        if q not in sources:
            add("liveness", f"state {q!r} has no outgoing transition", q)

    found.sort(key=lambda v: (v.rule, natural_key(v.element)))
    return ValidationReport(tuple(found))


# ---------------------------------------------------------------------------
# DOT export


def dot_quote(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_obs(outs) -> str:
    return "{" + ",".join(sorted_outputs(outs)) + "}"


def _model_dot(m: DesModel, options) -> list:
    name = options.get("name") or m.name or "G"
    lines = [f"digraph {dot_quote(name)} {{", f"  rankdir={options.get('rankdir', 'LR')};"]
    lines.append('  __start [shape=point, label=""];')
    for q in sorted(m.states, key=natural_key):
        lines.append(f"  {dot_quote(q)} [shape=circle];")
    lines.append(f"  __start -> {dot_quote(m.initial)};")
    for (q, e) in sorted(m.transitions, key=lambda k: (natural_key(k[0]), natural_key(k[1]))):
        label = f"{e}\\{format_obs(m.obs.get((q, e), ()))}"
        attrs = f"label={dot_quote(label)}"
        if e in m.faults:
            attrs += ", color=red"
        lines.append(f"  {dot_quote(q)} -> {dot_quote(m.transitions[(q, e)])} [{attrs}];")
    lines.append("}")
    return lines


def export_dot(obj, options=None) -> str:
    """Render a model, augmented system or verification structure as DOT.

    ``options`` may carry ``name`` (graph name) and ``rankdir``.  Output is
    byte-for-byte deterministic for equal inputs.
    """
    options = dict(options or {})
    if isinstance(obj, DesModel):
        lines = _model_dot(obj, options)
    else:
        from .augment import AugmentedSystem
        from .verifier import VerificationStructure

        if isinstance(obj, AugmentedSystem):
            lines = obj.dot_lines(options)
        elif isinstance(obj, VerificationStructure):
            lines = obj.dot_lines(options)
        else:
            raise TypeError(f"cannot export {type(obj).__name__} to DOT")
    return "\n".join(lines) + "\n"
