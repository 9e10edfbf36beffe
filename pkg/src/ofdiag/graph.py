"""Small directed-graph helpers: Tarjan's SCCs and shortest paths."""
from collections import deque


def tarjan_scc(nodes, succ):
    """Strongly connected components of the graph ``(nodes, succ)``.

    ``succ(v)`` returns the successors of ``v``.  Iterative, so deep graphs do
    not hit the recursion limit.  Components come out in reverse topological
    order, each as a list in discovery order.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    result = []
    counter = 0

    for root in nodes:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(succ(root)))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    pushed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comp.reverse()
                result.append(comp)
    return result


def shortest_path(start, goal, out_edges):
    """Edges of a shortest path from ``start`` to ``goal`` (``[]`` if equal).

    ``out_edges(v)`` yields ``(label, target)`` pairs.  Returns a list of
    ``(source, label, target)`` triples, or ``None`` if ``goal`` is
    unreachable.  ``goal`` may be a predicate.
    """
    is_goal = goal if callable(goal) else (lambda v: v == goal)
    if is_goal(start):
        return []
    parent = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for label, w in out_edges(v):
            if w in parent:
                continue
            parent[w] = (v, label)
            if is_goal(w):
                path = []
                while parent[w] is not None:
                    u, lab = parent[w]
                    path.append((u, lab, w))
                    w = u
                path.reverse()
                return path
            queue.append(w)
    return None


def closed_walk(start, out_edges):
    """A shortest non-empty closed walk through ``start``, or ``None``."""
    best = None
    for label, w in out_edges(start):
        back = shortest_path(w, start, out_edges)
        if back is not None and (best is None or len(back) + 1 < len(best)):
            best = [(start, label, w)] + back
    return best
