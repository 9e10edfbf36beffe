"""Shared test helpers: tiny constructors and brute-force enumerators."""
import itertools
import random

from ofdiag.augment import AugmentedState
from ofdiag.model import EPS, DesModel
from ofdiag.observation import ExtendedEvent
from ofdiag.oracle import GenParams, random_model


def X(q, e, d):
    return ExtendedEvent(str(q), e, d)


def aug(text):
    return AugmentedState(text[:-1], text[-1])


def est(*names):
    return tuple(aug(n) for n in names)


def model(transitions, faults=(), fair=(), initial="1", outputs=None):
    """``transitions``: list of (src, event, dst, outs)."""
    states = []
    for s, _e, d, _o in transitions:
        for q in (s, d):
            if q not in states:
                states.append(q)
    events = []
    for _s, e, _d, _o in transitions:
        if e not in events:
            events.append(e)
    if outputs is None:
        outputs = sorted({o for *_x, outs in transitions for o in outs if o != EPS})
    return DesModel(
        states=states,
        initial=initial,
        events=events,
        outputs=outputs,
        faults=faults,
        transitions={(s, e): d for s, e, d, _o in transitions},
        obs={(s, e): set(o) for s, e, _d, o in transitions},
        fair_outputs=fair,
    )


def brute_observations(m, events):
    """Output strings of an event string via explicit product over output choices."""
    q = m.initial
    choices = []
    for e in events:
        choices.append(sorted(m.obs[(q, e)]))
        q = m.transitions[(q, e)]
    return {tuple(d for d in combo if d != EPS) for combo in itertools.product(*choices)}


def random_models(n, seed, **overrides):
    """``n`` seeded random models with varied shapes."""
    rng = random.Random(seed)
    for i in range(n):
        params = dict(
            states=rng.randint(1, 5),
            events=rng.randint(1, 3),
            outputs=rng.randint(1, 3),
            eps_prob=rng.choice([0.0, 0.3, 0.6, 0.9]),
            fault_density=rng.choice([0.2, 0.4]),
            fair_density=rng.choice([0.0, 0.5, 1.0]),
            seed=rng.getrandbits(32),
        )
        params.update(overrides)
        yield random_model(GenParams(**params))
