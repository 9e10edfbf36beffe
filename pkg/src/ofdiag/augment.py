"""The augmented system: extended events as labels, a fault bit in every state."""
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import InvalidModelError
from .model import DesModel, dot_quote, natural_key, output_key, sorted_outputs, validate
from .observation import ExtendedEvent

NORMAL = "N"
FAULTY = "F"


class AugmentedState(NamedTuple):
    state: str
    label: str

    @property
    def faulty(self) -> bool:
        return self.label == FAULTY

    def __str__(self):
        return f"{self.state}{self.label}"


def aug_key(s: AugmentedState):
    return (natural_key(s.state), s.label != NORMAL)


def event_key(e: ExtendedEvent):
    return (natural_key(e.state), natural_key(e.event), output_key(e.out))


def edge_key(edge):
    src, ev, dst = edge
    return (aug_key(src), event_key(ev), aug_key(dst))


def parse_aug_state(text: str) -> AugmentedState:
    text = text.strip()
    if len(text) < 2 or text[-1] not in (NORMAL, FAULTY):
        raise ValueError(f"not an augmented state: {text!r}")
    return AugmentedState(text[:-1], text[-1])


@dataclass(frozen=True, eq=False)
class AugmentedSystem:
    """Reachable part of the augmented automaton of ``model``."""

    model: DesModel
    states: tuple
    initial: AugmentedState
    edges: tuple
    _out: dict = field(repr=False)

    def successors(self, s: AugmentedState):
        """Outgoing ``(event, target)`` pairs of ``s`` in canonical order."""
        return self._out.get(s, ())

    def step(self, s: AugmentedState, ev: ExtendedEvent):
        for e, dst in self.successors(s):
            if e == ev:
                return dst
        return None

    @property
    def normal_states(self):
        return tuple(s for s in self.states if not s.faulty)

    @property
    def faulty_states(self):
        return tuple(s for s in self.states if s.faulty)

    def to_json(self) -> dict:
        return {
            "states": [str(s) for s in self.states],
            "initial": str(self.initial),
            "events": sorted({str(e) for _s, e, _d in self.edges}),
            "transitions": [
                {"from": str(s), "event": e.event, "out": e.out, "to": str(d)}
                for s, e, d in self.edges
            ],
        }

    def dot_lines(self, options) -> list:
        name = options.get("name") or "augmented"
        lines = [f"digraph {dot_quote(name)} {{", f"  rankdir={options.get('rankdir', 'LR')};"]
        lines.append('  __start [shape=point, label=""];')
        for s in self.states:
            style = ', style=filled, fillcolor="#f4cccc"' if s.faulty else ""
            lines.append(f"  {dot_quote(s)} [shape=circle{style}];")
        lines.append(f"  __start -> {dot_quote(self.initial)};")
        for s, e, d in self.edges:
            color = ", color=red" if e.event in self.model.faults else ""
            lines.append(f"  {dot_quote(s)} -> {dot_quote(d)} [label={dot_quote(e)}{color}];")
        lines.append("}")
        return lines


def build_augmented(m: DesModel) -> AugmentedSystem:
    """Construct the reachable augmented system.

    A transition enters an F-labelled state whenever the source is already
    faulty or the event is a fault; there is one edge per possible output.
    """
    report = validate(m)
    if not report.ok:
        raise InvalidModelError(report)

    init = AugmentedState(m.initial, NORMAL)
    seen = {init}
    queue = deque([init])
    out = {}
    while queue:
        src = queue.popleft()
        succ = []
        for ev in sorted(m.enabled(src.state), key=natural_key):
            q2 = m.transitions[(src.state, ev)]
            label = FAULTY if src.faulty or ev in m.faults else NORMAL
            dst = AugmentedState(q2, label)
            for d in sorted_outputs(m.obs[(src.state, ev)]):
                succ.append((ExtendedEvent(src.state, ev, d), dst))
            if dst not in seen:
                seen.add(dst)
                queue.append(dst)
        out[src] = tuple(succ)

    states = tuple(sorted(seen, key=aug_key))
    edges = tuple(
        sorted(((s, e, d) for s in states for e, d in out[s]), key=edge_key)
    )
    return AugmentedSystem(m, states, init, edges, out)
