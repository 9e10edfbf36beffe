"""Independent deciders, random models and fair simulation for cross-validation.

Nothing here is needed to verify a model; these routines exist to check the
verifier against brute force.  They are deliberately exponential.
"""
import random
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .augment import build_augmented
from .errors import LimitExceededError, PreconditionError
from .model import EPS, DesModel, sorted_outputs, validate
from .observation import ExtendedEvent, output_string
from .estimate import Diagnoser
from .verifier import OUTPUT_FAIR, Verdict, build_verification_structure, check_of_diagnosability

MAX_HORIZON = 12


# ---------------------------------------------------------------------------
# random models


@dataclass(frozen=True)
class GenParams:
    states: int = 3
    events: int = 2
    outputs: int = 2
    fault_density: float = 0.3
    eps_prob: float = 0.4
    fair_density: float = 0.5
    seed: int = 0
    transition_density: float = 0.6
    # outputs equal events with reliable/unreliable/unobservable classes
    event_classes: bool = False

    def __post_init__(self):
        for name in ("states", "events", "outputs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        for name in ("fault_density", "eps_prob", "fair_density", "transition_density"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def random_model(p: GenParams) -> DesModel:
    """Seeded random live model; the same parameters always give the same model."""
    rng = random.Random(p.seed)
    states = [str(i) for i in range(p.states)]
    events = [f"e{i}" for i in range(p.events)]
    faults = [e for e in events if rng.random() < p.fault_density]

    if p.event_classes:
        outputs = [e for e in events if e not in faults]
        unobservable = set(faults)
        unreliable = set()
        for e in outputs:
            r = rng.random()
            if r < 0.25:
                unobservable.add(e)
            elif r < 0.25 + 0.75 * p.eps_prob:
                unreliable.add(e)
        outputs = [e for e in outputs if e not in unobservable]
    else:
        outputs = [f"o{i}" for i in range(p.outputs)]

    def draw_obs(e):
        if p.event_classes:
            if e in unobservable:
                return {EPS}
            return {e, EPS} if e in unreliable else {e}
        outs = {o for o in outputs if rng.random() < 0.45}
        if rng.random() < p.eps_prob:
            outs.add(EPS)
        if not outs:
            outs.add(rng.choice(outputs))
        return outs

    transitions = {}
    obs = {}
    for q in states:
        for e in events:
            if rng.random() < p.transition_density:
                transitions[(q, e)] = rng.choice(states)
                obs[(q, e)] = draw_obs(e)
        if not any((q, e) in transitions for e in events):
            e = rng.choice(events)
            transitions[(q, e)] = q
            obs[(q, e)] = draw_obs(e)

    pool = list(outputs) + [EPS]
    fair = {d for d in pool if rng.random() < (p.fair_density if d != EPS else p.fair_density / 4)}
    return DesModel(
        states=states,
        initial=states[0],
        events=events,
        outputs=outputs,
        faults=faults,
        transitions=transitions,
        obs=obs,
        fair_outputs=fair,
        name=f"random-{p.seed}",
    )


def random_fair_set(m: DesModel, rng: random.Random, density=0.5) -> frozenset:
    return frozenset(d for d in sorted_outputs(m.outputs_eps) if rng.random() < density)


# ---------------------------------------------------------------------------
# brute-force loop search


def uncertain_region(v):
    """Edges of ``v`` whose endpoints are both faulty with a normal-containing estimate."""

    def unsure(s):
        return s.current.label == "F" and any(x.label == "N" for x in s.est)

    return [e for e in v.edges if unsure(e[0]) and unsure(e[2])]


def _reachable(v):
    seen = {v.initial}
    queue = deque([v.initial])
    while queue:
        s = queue.popleft()
        for _ev, d in v.successors(s):
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return seen


def brute_force_of_check(m: DesModel, fair=None, max_edges=16) -> Verdict:
    """Decide output-fair diagnosability by trying every edge subset.

    A subset of uncertain-region edges witnesses non-diagnosability iff it is
    strongly connected over its endpoints, closed under the fair outputs of
    every transition it uses and reachable from the initial state.
    """
    fair = m.fair_outputs if fair is None else frozenset(fair)
    v = build_verification_structure(build_augmented(m))
    edges = uncertain_region(v)
    if len(edges) > max_edges:
        raise LimitExceededError(
            f"uncertain region has {len(edges)} edges, oracle limit is {max_edges}"
        )
    n = len(edges)
    label_mask = {}
    for i, (_s, ev, _d) in enumerate(edges):
        label_mask[ev] = label_mask.get(ev, 0) | (1 << i)
    required = []
    never = 0
    for i, (_s, ev, _d) in enumerate(edges):
        masks = []
        for d in fair & m.obs[(ev.state, ev.event)]:
            mk = label_mask.get(ExtendedEvent(ev.state, ev.event, d), 0)
            if mk == 0:
                never |= 1 << i
            masks.append(mk)
        required.append(masks)
    node_id = {}
    src, dst = [], []
    for s, _ev, d in edges:
        src.append(node_id.setdefault(s, len(node_id)))
        dst.append(node_id.setdefault(d, len(node_id)))
    reachable = _reachable(v)
    reachable_nodes = {node_id[s] for s in node_id if s in reachable}

    allowed = ((1 << n) - 1) & ~never
    sub = allowed
    found = None
    while sub:
        if _fair_closed(sub, required) and _strongly_connected(sub, src, dst, reachable_nodes):
            found = sub
            break
        sub = (sub - 1) & allowed

    stats = {"uncertain_edges": n, "oracle": "subset-enumeration"}
    if found is not None:
        stats["loop_edges"] = [
            f"{edges[i][0]} {edges[i][1]} {edges[i][2]}" for i in range(n) if found >> i & 1
        ]
    return Verdict(OUTPUT_FAIR, found is None, None, stats)


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _fair_closed(mask, required):
    for i in _bits(mask):
        for mk in required[i]:
            if not mask & mk:
                return False
    return True


def _strongly_connected(mask, src, dst, reachable_nodes):
    fwd, bwd = {}, {}
    nodes = set()
    for i in _bits(mask):
        fwd.setdefault(src[i], []).append(dst[i])
        bwd.setdefault(dst[i], []).append(src[i])
        nodes.add(src[i])
        nodes.add(dst[i])
    root = next(iter(nodes))
    if root not in reachable_nodes:
        return False
    for adj in (fwd, bwd):
        seen = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != nodes:
            return False
    return True


# ---------------------------------------------------------------------------
# direct enumeration of extended strings


def enabled_extended(m: DesModel, q):
    """Extended events possible at plant state ``q``."""
    return [
        ExtendedEvent(q, e, d)
        for e in m.enabled(q)
        for d in sorted_outputs(m.obs[(q, e)])
    ]


def extended_strings(m: DesModel, max_len: int, start=None):
    """Every extended string of length at most ``max_len`` from ``start`` (default initial)."""
    start = m.initial if start is None else start
    stack = [(start, ())]
    while stack:
        q, s = stack.pop()
        yield s
        if len(s) < max_len:
            for ev in reversed(enabled_extended(m, q)):
                stack.append((m.transitions[(q, ev.event)], s + (ev,)))


def normal_explanation(m: DesModel, w):
    """Shortest fault-free extended string with output ``w``, or None.

    Works on the plant directly (states paired with progress through ``w``).
    """
    w = tuple(w)
    start = (m.initial, 0)
    if not w:
        return ()
    parent = {start: None}
    queue = deque([start])
    while queue:
        q, i = queue.popleft()
        for ev in enabled_extended(m, q):
            if ev.event in m.faults:
                continue
            if ev.out == EPS:
                node = (m.transitions[(q, ev.event)], i)
            elif ev.out == w[i]:
                node = (m.transitions[(q, ev.event)], i + 1)
            else:
                continue
            if node in parent:
                continue
            parent[node] = ((q, i), ev)
            if node[1] == len(w):
                path = []
                while parent[node] is not None:
                    node, ev = parent[node]
                    path.append(ev)
                return tuple(reversed(path))
            queue.append(node)
    return None


class BoundedResult(NamedTuple):
    horizon: int
    violation: bool
    faulty: tuple = ()
    normal: tuple = ()


def bounded_classical_check(m: DesModel, horizon: int) -> BoundedResult:
    """Search for a classical diagnosability violation up to ``horizon`` steps.

    A violation is a faulty extended string of exactly ``horizon`` events whose
    first fault occurs within the first half, together with a fault-free
    extended string producing the same output.  Finding one corroborates
    non-diagnosability; finding none proves nothing beyond the horizon.
    """
    if horizon > MAX_HORIZON:
        raise LimitExceededError(f"horizon {horizon} exceeds {MAX_HORIZON}")
    if horizon < 1:
        raise PreconditionError("horizon must be positive")
    report = validate(m)
    if not report.ok:
        raise PreconditionError(str(report))
    cache = {}
    for s in extended_strings(m, horizon):
        if len(s) != horizon:
            continue
        first = next((i for i, ev in enumerate(s) if ev.event in m.faults), None)
        if first is None or first >= (horizon + 1) // 2:
            continue
        w = output_string(ev.out for ev in s)
        if w not in cache:
            cache[w] = normal_explanation(m, w)
        if cache[w] is not None:
            return BoundedResult(horizon, True, s, cache[w])
    return BoundedResult(horizon, False)


def language_mismatch(m: DesModel, depth: int = 8):
    """First extended string (length <= depth) on which plant, augmented system
    and verification structure disagree, or None when all three agree.

    All three are deterministic over extended events, so comparing enabled
    events along the synchronised product decides bounded language equality.
    """
    a = build_augmented(m)
    v = build_verification_structure(a)
    start = (m.initial, a.initial, v.initial)
    frontier = [(start, ())]
    seen = {start}
    for _level in range(depth):
        nxt = []
        for (q, qa, qv), s in frontier:
            plant = set(enabled_extended(m, q))
            aug = {ev for ev, _d in a.successors(qa)}
            ver = {ev for ev, _d in v.successors(qv)}
            if not plant == aug == ver:
                odd = sorted(map(str, (plant | aug | ver) - (plant & aug & ver)))
                return s + (odd[0],)
            for ev in sorted(plant, key=str):
                node = (m.transitions[(q, ev.event)], a.step(qa, ev), v.step(qv, ev))
                if node not in seen:
                    seen.add(node)
                    nxt.append((node, s + (ev,)))
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# fair simulation


def simulate_fair_run(m: DesModel, steps: int, seed: int) -> tuple:
    """Seeded random run whose outputs rotate round-robin per transition.

    Each transition cycles through its possible outputs in a fixed order, so a
    transition fired infinitely often shows every output, fair ones included,
    infinitely often.
    """
    rng = random.Random(seed)
    turn = {}
    q = m.initial
    run = []
    for _ in range(steps):
        e = rng.choice(m.enabled(q))
        outs = sorted_outputs(m.obs[(q, e)])
        k = turn.get((q, e), 0)
        turn[(q, e)] = k + 1
        run.append(ExtendedEvent(q, e, outs[k % len(outs)]))
        q = m.transitions[(q, e)]
    return tuple(run)


class Detection(NamedTuple):
    fault_at: int  # index of first fault event, or None
    alarm_at: int  # index of the event after which the diagnoser first says 1
    verdicts: tuple  # diagnoser verdict after each event


def replay_diagnoser(m: DesModel, run) -> Detection:
    d = Diagnoser(build_augmented(m))
    verdicts = []
    alarm = None
    fault = None
    for i, ev in enumerate(run):
        if fault is None and ev.event in m.faults:
            fault = i
        if ev.out != EPS:
            d.observe(ev.out)
        verdicts.append(d.verdict)
        if alarm is None and d.verdict:
            alarm = i
    return Detection(fault, alarm, tuple(verdicts))


# ---------------------------------------------------------------------------
# verifier vs oracle


class TrialResult(NamedTuple):
    index: int
    label: str
    model: DesModel
    fair: frozenset
    uncertain_edges: int
    verifier: bool
    oracle: bool
    iterations: int
    bound: int

    @property
    def agree(self) -> bool:
        return self.verifier == self.oracle


def trial_model(seed, index, attempt, max_states=5, max_events=3, max_outputs=3):
    rng = random.Random(f"xcheck:{seed}:{index}:{attempt}")
    params = GenParams(
        states=rng.randint(1, max_states),
        events=rng.randint(1, max_events),
        outputs=rng.randint(1, max_outputs),
        fault_density=rng.choice([0.2, 0.35, 0.5]),
        eps_prob=rng.choice([0.0, 0.3, 0.6, 0.9]),
        fair_density=rng.choice([0.0, 0.4, 0.7, 1.0]),
        transition_density=rng.choice([0.4, 0.6, 0.8]),
        seed=rng.getrandbits(32),
    )
    return random_model(params)


def cross_check(trials, seed=0, max_states=5, max_edges=16, max_attempts=50):
    """Yield one :class:`TrialResult` per trial; oversized instances are resampled."""
    for index in range(trials):
        for attempt in range(max_attempts):
            m = trial_model(seed, index, attempt, max_states)
            try:
                oracle = brute_force_of_check(m, max_edges=max_edges)
            except LimitExceededError:
                continue
            verdict = check_of_diagnosability(m)
            yield TrialResult(
                index,
                f"{seed}:{index}:{attempt}",
                m,
                m.fair_outputs,
                oracle.stats["uncertain_edges"],
                verdict.diagnosable,
                oracle.diagnosable,
                verdict.stats["pruning_iterations"],
                verdict.stats["pruning_bound"],
            )
            break
        else:
            raise LimitExceededError(f"trial {index}: no instance within oracle limits")
