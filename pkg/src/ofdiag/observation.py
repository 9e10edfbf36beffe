"""Extended events, output strings and the output-fairness check on lassos."""
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import InvalidLassoError, NotARunError, UndefinedStringError
from .model import EPS, DesModel


class ExtendedEvent(NamedTuple):
    """An event occurrence together with its source state and realised output."""

    state: str
    event: str
    out: str

    @property
    def silent(self) -> bool:
        return self.out == EPS

    def __str__(self):
        return f"({self.state},{self.event},{self.out})"


def parse_extended_event(text: str) -> ExtendedEvent:
    """Inverse of ``str(ExtendedEvent)``; identifiers must not contain commas."""
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"not an extended event: {text!r}")
    parts = [p.strip() for p in body[1:-1].split(",")]
    if len(parts) != 3 or not all(parts):
        raise ValueError(f"not an extended event: {text!r}")
    return ExtendedEvent(*parts)


class Projection(NamedTuple):
    states: tuple
    events: tuple
    outputs_raw: tuple

    @property
    def output(self) -> tuple:
        """Output string with the empty outputs removed."""
        return output_string(self.outputs_raw)


def output_string(outs) -> tuple:
    return tuple(o for o in outs if o != EPS)


def render_output(outs) -> str:
    """Concatenate an output string; multi-character symbols are dot-separated."""
    outs = output_string(outs)
    if all(len(o) == 1 for o in outs):
        return "".join(outs)
    return ".".join(outs)


def check_run(m: DesModel, s: Sequence[ExtendedEvent], start=None):
    """Raise :class:`NotARunError` unless ``s`` chains through ``m``.

    When ``start`` is given the first element must leave that state.  Returns
    the state reached (``start`` for an empty sequence).
    """
    current = start
    for i, ev in enumerate(s):
        if current is not None and ev.state != current:
            raise NotARunError(f"step {i}: {ev} does not start at state {current!r}")
        dst = m.successor(ev.state, ev.event)
        if dst is None:
            raise NotARunError(f"step {i}: event {ev.event!r} undefined at {ev.state!r}")
        if ev.out not in m.obs[(ev.state, ev.event)]:
            raise NotARunError(f"step {i}: output {ev.out!r} impossible for {ev}")
        current = dst
    return current


def is_run(m: DesModel, s, start=None) -> bool:
    try:
        check_run(m, s, start)
    except NotARunError:
        return False
    return True


def observation_set(m: DesModel, s: Sequence[str]) -> frozenset:
    """All output strings (as tuples) that the event string ``s`` may produce."""
    current = {()}
    q = m.initial
    for i, ev in enumerate(s):
        nxt = m.successor(q, ev)
        if nxt is None:
            raise UndefinedStringError(
                f"event string {' '.join(s)!r} leaves the language at position {i}"
            )
        outs = m.obs[(q, ev)]
        current = {w if d == EPS else w + (d,) for w in current for d in outs}
        q = nxt
    return frozenset(current)


def projections(s: Sequence[ExtendedEvent], m: DesModel = None) -> Projection:
    """Split an extended string into its state, event and output sequences.

    If ``m`` is given, ``s`` is first checked to be a run of it.
    """
    if m is not None:
        check_run(m, s)
    return Projection(
        tuple(e.state for e in s), tuple(e.event for e in s), tuple(e.out for e in s)
    )


def is_faulty(s: Sequence[ExtendedEvent], m: DesModel) -> bool:
    return any(e.event in m.faults for e in s)


@dataclass(frozen=True)
class Lasso:
    """Finite description ``prefix . cycle^omega`` of an infinite extended string."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(ExtendedEvent(*e) for e in self.prefix))
        object.__setattr__(self, "cycle", tuple(ExtendedEvent(*e) for e in self.cycle))

    def recurrent(self) -> frozenset:
        return frozenset(self.cycle)

    def unroll(self, k: int) -> tuple:
        return self.prefix + self.cycle * k

    def to_json(self) -> dict:
        return {"prefix": [str(e) for e in self.prefix], "cycle": [str(e) for e in self.cycle]}

    @classmethod
    def from_json(cls, data) -> "Lasso":
        return cls(
            tuple(parse_extended_event(t) for t in data["prefix"]),
            tuple(parse_extended_event(t) for t in data["cycle"]),
        )

    def compacted(self) -> "Lasso":
        """Equivalent lasso with the cycle rolled back into the prefix as far as possible."""
        prefix, cycle = list(self.prefix), list(self.cycle)
        while prefix and cycle and prefix[-1] == cycle[-1]:
            cycle = [prefix.pop()] + cycle[:-1]
        return Lasso(tuple(prefix), tuple(cycle))


def check_lasso(m: DesModel, lasso: Lasso):
    if not lasso.cycle:
        raise InvalidLassoError("lasso cycle must be non-empty")
    try:
        entry = check_run(m, lasso.prefix, m.initial)
        back = check_run(m, lasso.cycle, entry)
    except NotARunError as exc:
        raise InvalidLassoError(str(exc)) from None
    if back != lasso.cycle[0].state:
        raise InvalidLassoError(
            f"cycle ends in {back!r} but starts at {lasso.cycle[0].state!r}"
        )


def is_fair_lasso(m: DesModel, lasso: Lasso, fair=None) -> bool:
    """Decide output fairness of ``prefix . cycle^omega``.

    The events occurring infinitely often are exactly those of the cycle, so
    the run is fair iff every transition fired in the cycle also shows, in the
    cycle, each of its possible outputs that belongs to the fair set.
    ``fair`` defaults to ``m.fair_outputs``.
    """
    check_lasso(m, lasso)
    fair = m.fair_outputs if fair is None else frozenset(fair)
    seen = lasso.recurrent()
    for q, e, _out in seen:
        for d in fair & m.obs[(q, e)]:
            if (q, e, d) not in seen:
                return False
    return True
