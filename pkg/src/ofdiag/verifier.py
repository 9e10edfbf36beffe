"""Verification structure and the decision procedures built on it.

The verification structure pairs every augmented state of a concrete run with
the observer's estimate after the outputs produced so far.  A system fails to
be output-fairly diagnosable exactly when some reachable loop of that
structure stays among uncertain states and, for each transition it fires,
also shows every fair output of that transition.  Such loops are found by
pruning unfair edges out of the strongly connected components of the
uncertain region until nothing changes.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .augment import AugmentedState, AugmentedSystem, aug_key, build_augmented, event_key
from .errors import InvalidModelError, PreconditionError
from .estimate import Estimate, format_estimate, initial_estimate, update
from .graph import closed_walk, shortest_path, tarjan_scc
from .model import EPS, DesModel, dot_quote, sorted_outputs, validate
from .observation import (
    ExtendedEvent,
    Lasso,
    is_fair_lasso,
    is_faulty,
    output_string,
    parse_extended_event,
)

CERTAIN = "certain"
UNCERTAIN = "uncertain"
NORMAL = "normal"

CLASSICAL = "classical"
OUTPUT_FAIR = "output_fair"


class VState(NamedTuple):
    current: AugmentedState
    est: Estimate

    def __str__(self):
        return f"({self.current},{format_estimate(self.est)})"


def vstate_key(s: VState):
    return (aug_key(s.current), len(s.est), [aug_key(x) for x in s.est])


def classify(s: VState) -> str:
    if not s.current.faulty:
        return NORMAL
    if all(x.faulty for x in s.est):
        return CERTAIN
    return UNCERTAIN


@dataclass(frozen=True, eq=False)
class VerificationStructure:
    augmented: AugmentedSystem
    states: tuple
    initial: VState
    edges: tuple
    classification: dict
    _out: dict = field(repr=False)

    @property
    def model(self) -> DesModel:
        return self.augmented.model

    def successors(self, s: VState):
        return self._out.get(s, ())

    def step(self, s: VState, ev: ExtendedEvent):
        for e, dst in self.successors(s):
            if e == ev:
                return dst
        return None

    def replay(self, run):
        """V-state reached by an extended string from the initial state, or None."""
        s = self.initial
        for ev in run:
            s = self.step(s, ev)
            if s is None:
                return None
        return s

    def states_of(self, tag: str) -> tuple:
        return tuple(s for s in self.states if self.classification[s] == tag)

    def to_json(self) -> dict:
        return {
            "states": [
                {"id": str(s), "class": self.classification[s]} for s in self.states
            ],
            "initial": str(self.initial),
            "transitions": [
                {"from": str(s), "event": str(e), "to": str(d)} for s, e, d in self.edges
            ],
        }

    def dot_lines(self, options) -> list:
        name = options.get("name") or "verifier"
        highlight = {(str(s), str(e), str(d)) for s, e, d in options.get("highlight", ())}
        shapes = {
            CERTAIN: "shape=doublecircle",
            UNCERTAIN: "shape=ellipse, style=dashed",
            NORMAL: "shape=ellipse",
        }
        lines = [f"digraph {dot_quote(name)} {{", f"  rankdir={options.get('rankdir', 'LR')};"]
        lines.append('  __start [shape=point, label=""];')
        for s in self.states:
            lines.append(f"  {dot_quote(s)} [{shapes[self.classification[s]]}];")
        lines.append(f"  __start -> {dot_quote(self.initial)};")
        for s, e, d in self.edges:
            attrs = f"label={dot_quote(e)}"
            if (str(s), str(e), str(d)) in highlight:
                attrs += ", color=red, penwidth=2"
            lines.append(f"  {dot_quote(s)} -> {dot_quote(d)} [{attrs}];")
        lines.append("}")
        return lines


def build_verification_structure(a: AugmentedSystem) -> VerificationStructure:
    """Reachable part of the synchronisation of ``a`` with its own estimate."""
    init = VState(a.initial, initial_estimate(a))
    seen = {init}
    order = [init]
    queue = deque([init])
    out = {}
    while queue:
        src = queue.popleft()
        succ = []
        for ev, q2 in a.successors(src.current):
            est = src.est if ev.out == EPS else update(a, src.est, ev.out)
            dst = VState(q2, est)
            succ.append((ev, dst))
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                queue.append(dst)
        out[src] = tuple(succ)
    edges = tuple((s, ev, d) for s in order for ev, d in out[s])
    classification = {s: classify(s) for s in order}
    return VerificationStructure(a, tuple(order), init, edges, classification, out)


# ---------------------------------------------------------------------------
# fair uncertain loops


@dataclass
class PruneResult:
    components: list  # surviving components, each a list of V edges
    iterations: int  # pruning rounds that deleted at least one edge
    rounds: int  # SCC computations performed
    uncertain_edges: int


def prune_unfair(v: VerificationStructure, fair) -> PruneResult:
    """Strip unfair edges from the uncertain region's SCCs until a fixpoint.

    An edge labelled ``(q, e, d)`` is unfair inside its component when some
    fair output of transition ``(q, e)`` labels no edge of that component.
    Edges between different components can never lie on a loop and are
    dropped as well.
    """
    model = v.model
    fair = frozenset(fair)
    position = {s: i for i, s in enumerate(v.states)}
    unc = v.classification
    edges = [
        e for e in v.edges if unc[e[0]] == UNCERTAIN and unc[e[2]] == UNCERTAIN
    ]
    n_uncertain = len(edges)
    iterations = rounds = 0
    comp_of = {}
    while True:
        rounds += 1
        adj = {}
        for s, _ev, d in edges:
            adj.setdefault(s, []).append(d)
            adj.setdefault(d, [])
        nodes = sorted(adj, key=position.__getitem__)
        comp_of = {}
        for i, comp in enumerate(tarjan_scc(nodes, adj.__getitem__)):
            for s in comp:
                comp_of[s] = i
        edges = [e for e in edges if comp_of[e[0]] == comp_of[e[2]]]

        present = {}
        for s, (q, ev, d), _t in edges:
            present.setdefault((comp_of[s], q, ev), set()).add(d)
        keep = []
        for s, ev, d in edges:
            required = fair & model.obs[(ev.state, ev.event)]
            if required <= present[(comp_of[s], ev.state, ev.event)]:
                keep.append((s, ev, d))
        if len(keep) == len(edges):
            break
        edges = keep
        iterations += 1

    grouped = {}
    for e in edges:
        grouped.setdefault(comp_of[e[0]], []).append(e)
    comps = sorted(grouped.values(), key=lambda es: min(position[e[0]] for e in es))
    return PruneResult(comps, iterations, rounds, n_uncertain)


def pruning_bound(m: DesModel) -> int:
    return len(m.states) ** 2 * len(m.events) * len(m.outputs)


# ---------------------------------------------------------------------------
# verdicts and witnesses


@dataclass(frozen=True)
class Witness:
    """Evidence that a fault can stay hidden on a fair infinite run.

    ``lasso`` is the faulty run in plant terms (cycle rolled back into the
    prefix as far as possible); ``v_prefix``/``v_cycle`` are the same run as
    edges of the verification structure, the cycle staying among uncertain
    states.
    """

    lasso: Lasso
    v_prefix: tuple
    v_cycle: tuple
    fairness_certificate: tuple
    confusable_normals: tuple

    def to_json(self) -> dict:
        data = self.lasso.to_json()
        data["fairness_certificate"] = [dict(c) for c in self.fairness_certificate]
        data["confusable_normals"] = [dict(c) for c in self.confusable_normals]
        data["v_cycle"] = [
            {"from": str(s), "event": str(e), "to": str(d)} for s, e, d in self.v_cycle
        ]
        return data


@dataclass(frozen=True)
class Verdict:
    mode: str
    diagnosable: bool
    witness: Witness = None
    stats: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        data = {"mode": self.mode, "diagnosable": self.diagnosable}
        data["witness"] = self.witness.to_json() if self.witness else None
        data["stats"] = dict(self.stats)
        return data


def fairness_certificate(m: DesModel, cycle, fair) -> tuple:
    """For each transition fired in ``cycle``: its fair outputs and where they occur."""
    fair = frozenset(fair)
    entries = []
    seen = []
    for ev in cycle:
        if (ev.state, ev.event) not in seen:
            seen.append((ev.state, ev.event))
    for q, e in seen:
        required = sorted_outputs(fair & m.obs[(q, e)])
        covered = {
            d: [i for i, ev in enumerate(cycle) if (ev.state, ev.event, ev.out) == (q, e, d)]
            for d in required
        }
        entries.append({"state": q, "event": e, "required": required, "positions": covered})
    return tuple(entries)


def reconstruct_normal_witness(v: VerificationStructure, prefix) -> tuple:
    """A fault-free extended string with the same outputs as ``prefix``.

    ``prefix`` must be a run of ``v`` from its initial state ending in an
    uncertain state; the result is a shortest such normal string.
    """
    prefix = tuple(ExtendedEvent(*e) for e in prefix)
    end = v.replay(prefix)
    if end is None:
        raise PreconditionError("prefix is not a run of the verification structure")
    if v.classification[end] != UNCERTAIN:
        raise PreconditionError(
            f"prefix ends in {v.classification[end]} state {end}, not an uncertain one"
        )
    target = output_string(e.out for e in prefix)
    a = v.augmented

    def moves(node):
        s, i = node
        for ev, dst in a.successors(s):
            if dst.faulty:
                continue
            if ev.out == EPS:
                yield ev, (dst, i)
            elif i < len(target) and ev.out == target[i]:
                yield ev, (dst, i + 1)

    path = shortest_path((a.initial, 0), lambda n: n[1] == len(target), moves)
    if path is None:
        raise RuntimeError(f"no normal explanation for uncertain state {end}")
    return tuple(ev for _s, ev, _d in path)


def _fair_closed_walk(v, start, comp_edges, fair):
    """Closed walk at ``start`` inside one component that is fair by construction."""
    model = v.model
    out = {}
    for s, ev, d in comp_edges:
        out.setdefault(s, []).append((ev, d))
    for s in out:
        out[s].sort(key=lambda p: (event_key(p[0]), vstate_key(p[1])))
    moves = lambda s: out.get(s, ())  # noqa: E731

    walk = closed_walk(start, moves)
    ordered = sorted(comp_edges, key=lambda e: (event_key(e[1]), vstate_key(e[0])))
    while True:
        labels = {ev for _s, ev, _d in walk}
        missing = None
        for q, e, _d in sorted(labels, key=event_key):
            for d in sorted_outputs(fair & model.obs[(q, e)]):
                if ExtendedEvent(q, e, d) not in labels:
                    missing = ExtendedEvent(q, e, d)
                    break
            if missing:
                break
        if missing is None:
            return walk
        # splice a detour through the missing edge where it is cheapest
        best = None
        for edge in (x for x in ordered if x[1] == missing):
            for i, (node, _ev, _d) in enumerate(walk):
                detour = (
                    shortest_path(node, edge[0], moves)
                    + [edge]
                    + shortest_path(edge[2], node, moves)
                )
                if best is None or len(detour) < len(best[1]):
                    best = (i, detour)
        i, detour = best
        walk = walk[:i] + detour + walk[i:]


def _build_witness(v, comp_edges, fair) -> Witness:
    model = v.model
    members = {e[0] for e in comp_edges}
    v_prefix = shortest_path(v.initial, lambda s: s in members, v.successors)
    start = v_prefix[-1][2] if v_prefix else v.initial
    v_cycle = _fair_closed_walk(v, start, comp_edges, fair)

    run_prefix = tuple(e for _s, e, _d in v_prefix)
    run_cycle = tuple(e for _s, e, _d in v_cycle)
    lasso = Lasso(run_prefix, run_cycle).compacted()

    normals = []
    for k in (0, 1):
        t = run_prefix + run_cycle * k
        w = reconstruct_normal_witness(v, t)
        normals.append(
            {
                "prefix": [str(e) for e in t],
                "output": list(output_string(e.out for e in t)),
                "normal": [str(e) for e in w],
            }
        )
    witness = Witness(
        lasso,
        tuple(v_prefix),
        tuple(v_cycle),
        fairness_certificate(model, lasso.cycle, fair),
        tuple(normals),
    )
    _self_check(v, witness, fair)
    return witness


def _self_check(v, w: Witness, fair):
    model = v.model
    problems = []
    if not is_fair_lasso(model, w.lasso, fair):
        problems.append("lasso is not fair")
    if not is_faulty(w.lasso.prefix + w.lasso.cycle, model):
        problems.append("lasso is not faulty")
    if any(v.classification[s] != UNCERTAIN for s, _e, _d in w.v_cycle):
        problems.append("cycle leaves the uncertain region")
    if not w.v_cycle or w.v_cycle[0][0] != w.v_cycle[-1][2]:
        problems.append("cycle does not close in the verification structure")
    for entry in w.confusable_normals:
        normal = [parse_extended_event(e) for e in entry["normal"]]
        if is_faulty(normal, model):
            problems.append("confusable string is faulty")
        if list(output_string(e.out for e in normal)) != entry["output"]:
            problems.append("confusable string has a different output")
    if problems:
        raise RuntimeError("witness failed self-check: " + "; ".join(problems))


def _require_valid(m: DesModel):
    report = validate(m)
    if not report.ok:
        raise InvalidModelError(report)


def check_of_diagnosability(m: DesModel, fair=None, *, mode=OUTPUT_FAIR) -> Verdict:
    """Decide output-fair diagnosability of ``m`` w.r.t. ``fair``.

    ``fair`` defaults to the model's own fair outputs and may contain ``eps``.
    When the answer is negative the verdict carries a self-checked witness.
    """
    _require_valid(m)
    fair = m.fair_outputs if fair is None else frozenset(fair)
    unknown = fair - m.outputs_eps
    if unknown:
        raise PreconditionError(
            f"fair outputs {sorted_outputs(unknown)} are not outputs of the model"
        )
    v = build_verification_structure(build_augmented(m))
    pruned = prune_unfair(v, fair)
    stats = {
        "augmented_states": len(v.augmented.states),
        "v_states": len(v.states),
        "v_edges": len(v.edges),
        "uncertain_states": len(v.states_of(UNCERTAIN)),
        "uncertain_edges": pruned.uncertain_edges,
        "pruning_iterations": pruned.iterations,
        "scc_rounds": pruned.rounds,
        "pruning_bound": pruning_bound(m),
        "fair_outputs": sorted_outputs(fair),
    }
    if not pruned.components:
        return Verdict(mode, True, None, stats)
    witness = _build_witness(v, pruned.components[0], fair)
    return Verdict(mode, False, witness, stats)


def check_classical(m: DesModel) -> Verdict:
    """Classical diagnosability: the output-fair check with no fair outputs."""
    return check_of_diagnosability(m, frozenset(), mode=CLASSICAL)


def summarize(verdict: Verdict) -> str:
    """Human-readable account of a verdict."""
    name = "diagnosable" if verdict.mode == CLASSICAL else "OF-diagnosable"
    if verdict.diagnosable:
        return name
    w = verdict.witness
    lines = [f"NOT {name}"]
    lines.append("  faulty lasso:")
    lines.append("    prefix: " + " ".join(str(e) for e in w.lasso.prefix))
    lines.append("    cycle:  " + " ".join(str(e) for e in w.lasso.cycle) + "  (repeated forever)")
    for entry in w.fairness_certificate:
        if entry["required"]:
            cover = ", ".join(f"{d}@{pos}" for d, pos in entry["positions"].items())
            lines.append(f"    fair outputs of {entry['state']}-{entry['event']}: {cover}")
    for entry in w.confusable_normals:
        shown = " ".join(entry["output"]) or "(empty)"
        lines.append(f"  same output [{shown}] from normal run: " + (" ".join(entry["normal"]) or "(empty)"))
    return "\n".join(lines)
