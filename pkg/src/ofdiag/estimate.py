"""State estimation over the augmented system and the online diagnoser."""
from typing import Iterable, NamedTuple

from .augment import AugmentedState, AugmentedSystem, aug_key
from .errors import InfeasibleObservationError, UnknownOutputError
from .model import EPS

# An estimate is a sorted tuple of distinct augmented states.
Estimate = tuple


def canonical(states: Iterable[AugmentedState]) -> Estimate:
    return tuple(sorted(set(states), key=aug_key))


def format_estimate(r: Estimate) -> str:
    return "{" + ",".join(str(s) for s in r) + "}"


def unobservable_reach(a: AugmentedSystem, r: Iterable[AugmentedState]) -> Estimate:
    """Close ``r`` under edges whose realised output is empty."""
    seen = set(r)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for ev, dst in a.successors(s):
            if ev.out == EPS and dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return canonical(seen)


def observable_next(a: AugmentedSystem, r: Iterable[AugmentedState], out: str) -> Estimate:
    """States entered from ``r`` by one edge emitting ``out`` (no closure)."""
    if out == EPS or out not in a.model.outputs:
        raise UnknownOutputError(f"{out!r} is not an output symbol of the model")
    return canonical(dst for s in r for ev, dst in a.successors(s) if ev.out == out)


def initial_estimate(a: AugmentedSystem) -> Estimate:
    return unobservable_reach(a, [a.initial])


def update(a: AugmentedSystem, r: Estimate, out: str) -> Estimate:
    return unobservable_reach(a, observable_next(a, r, out))


def all_faulty(r: Estimate) -> bool:
    return all(s.faulty for s in r)


class Diagnosis(NamedTuple):
    verdict: int
    estimate: Estimate

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "estimate": [str(s) for s in self.estimate]}


class Diagnoser:
    """Online diagnoser: feed output symbols one at a time.

    ``verdict`` is 1 once every state consistent with the observations seen
    so far is faulty.  An output that no run can produce raises
    :class:`InfeasibleObservationError` and leaves the session unchanged.
    """

    def __init__(self, a: AugmentedSystem):
        self.system = a
        self.estimate = initial_estimate(a)
        self.observed = []

    @property
    def verdict(self) -> int:
        return int(all_faulty(self.estimate))

    def observe(self, out: str) -> int:
        r = update(self.system, self.estimate, out)
        if not r:
            raise InfeasibleObservationError(self.observed + [out], len(self.observed))
        self.observed.append(out)
        self.estimate = r
        return self.verdict


def diagnose(a: AugmentedSystem, w: Iterable[str]) -> Diagnosis:
    d = Diagnoser(a)
    for out in w:
        d.observe(out)
    return Diagnosis(d.verdict, d.estimate)
